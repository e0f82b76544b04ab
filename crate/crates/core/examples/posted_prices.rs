//! Sequential posted pricing: one traced run, the best uniform price, and the
//! better of the Myersonian and uniform policies.

use posted_price::mechanisms::{best_spm_revenue, run_spm_traced, uniform_price_search};
use posted_price::{AuctionInstance, DiscreteDistribution, PriceVector, SeedTree};

fn main() -> posted_price::Result<()> {
    let bidders = vec![
        DiscreteDistribution::uniform_grid(0.0, 1.0, 8)?,
        DiscreteDistribution::uniform_grid(0.0, 2.0, 8)?,
        DiscreteDistribution::new(vec![0.5, 3.0], vec![0.8, 0.2])?,
    ];
    let instance = AuctionInstance::k_unit(bidders, 2)?;

    let prices = PriceVector::custom(vec![0.6, 1.2, 2.5])?;
    let trace = run_spm_traced(&instance, &prices, &[0.9, 1.3, 3.0])?;
    println!(
        "offer order {:?}, winners {:?}, revenue {}",
        trace.offered, trace.outcome.winners, trace.outcome.revenue
    );

    let (p, up) = uniform_price_search(&instance)?;
    println!("best uniform price {p} earns {up:.4}");

    let best = best_spm_revenue(&instance, 100_000, SeedTree::new(5))?;
    println!(
        "Myersonian {:.4} +/- {:.4}, uniform {:.4}; chose {}",
        best.myersonian.mean,
        best.myersonian.std_error,
        best.uniform,
        best.chosen.as_str()
    );
    Ok(())
}
