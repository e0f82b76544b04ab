//! The winners-above-price curve `s(tau)`, computed exactly and by sampling.
//! Its integral equals the optimal revenue.

use posted_price::exact::EnumerationBudget;
use posted_price::myerson::{exact_s_curve, mc_s_curve};
use posted_price::{AuctionInstance, DiscreteDistribution, SeedTree};

fn main() -> posted_price::Result<()> {
    let d = DiscreteDistribution::new(vec![1.0, 2.0, 4.0], vec![0.5, 0.3, 0.2])?;
    let instance = AuctionInstance::k_unit(vec![d; 3], 2)?;

    let exact = exact_s_curve(&instance, None, EnumerationBudget::default())?;
    print!("{}", exact.curve.to_csv());
    println!(
        "Opt {:.6}, integral {:.6}, expected winners {:.4}",
        exact.opt,
        exact.curve.step_integral(),
        exact.expected_winners
    );

    let sampled = mc_s_curve(&instance, &exact.curve.grid, 50_000, SeedTree::new(11))?;
    for (tau, (e, m)) in exact
        .curve
        .grid
        .iter()
        .zip(exact.curve.s.iter().zip(&sampled.s))
    {
        println!("tau {tau:.2}: exact {e:.4}, sampled {m:.4}");
    }
    println!("sampled curve decreasing: {}", sampled.is_decreasing());
    Ok(())
}
