//! Position auctions: click feasibility, the layered optimal auction, layered
//! posted pricing, and an exact certificate.

use posted_price::exact::EnumerationBudget;
use posted_price::position::{layer_weights, pa_exact, pa_feasible, pa_optimal, pa_spm};
use posted_price::{AuctionInstance, DiscreteDistribution, Feasibility, SeedTree};

fn main() -> posted_price::Result<()> {
    let alphas = vec![1.0, 0.5];
    println!("layer weights {:?}", layer_weights(&alphas));
    match pa_feasible(&[0.8, 0.8], &alphas) {
        Some(v) => println!(
            "clicks (0.8, 0.8) rejected: top {} sum to {} > {}",
            v.cardinality, v.lhs, v.rhs
        ),
        None => println!("clicks (0.8, 0.8) accepted"),
    }

    let instance = AuctionInstance::new(
        vec![
            DiscreteDistribution::uniform_grid(0.0, 1.0, 6)?,
            DiscreteDistribution::uniform_grid(0.0, 2.0, 6)?,
        ],
        Feasibility::Position { alphas },
    )?;

    let out = pa_optimal(&instance, &[0.75, 1.5])?;
    println!(
        "optimal at (0.75, 1.5): clicks {:?}, payments {:?}",
        out.clicks, out.payments
    );

    let sim = pa_spm(&instance, 50_000, SeedTree::new(4))?;
    println!(
        "layered posted pricing {:.4} +/- {:.4}, infeasible trials {}",
        sim.revenue.mean, sim.revenue.std_error, sim.infeasible_trials
    );

    let cert = pa_exact(&instance, EnumerationBudget::default())?;
    println!(
        "exact: Opt {:.5}, posted {:.5}, ratio {:.4}, bound {:.4}",
        cert.opt, cert.spm, cert.ratio, cert.bound
    );
    Ok(())
}
