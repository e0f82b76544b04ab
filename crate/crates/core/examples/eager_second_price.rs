//! Eager second price next to posted pricing on the same reserves: on every
//! profile the eager auction collects at least as much.

use posted_price::mechanisms::{esp_revenues, run_esp, run_spm};
use posted_price::{AuctionInstance, DiscreteDistribution, PriceVector, SeedTree};

fn main() -> posted_price::Result<()> {
    let d = DiscreteDistribution::uniform_grid(0.0, 1.0, 10)?;
    let instance = AuctionInstance::single_item(vec![d; 3])?;
    let reserves = PriceVector::custom(vec![0.5, 0.45, 0.6])?;

    for values in [[0.95, 0.85, 0.65], [0.55, 0.05, 0.35], [0.75, 0.95, 0.25]] {
        let esp = run_esp(&instance, &reserves, &values)?;
        let spm = run_spm(&instance, &reserves, &values)?;
        println!(
            "values {values:?}: eager {:.3} (winner {:?}), posted {:.3}",
            esp.revenue, esp.winners, spm.revenue
        );
    }

    let r = esp_revenues(&instance, 100_000, SeedTree::new(2))?;
    println!(
        "Myersonian reserves {:.4} +/- {:.4}; best uniform reserve {} earns {:.4}",
        r.myersonian.mean, r.myersonian.std_error, r.uniform_reserve, r.uniform
    );
    Ok(())
}
