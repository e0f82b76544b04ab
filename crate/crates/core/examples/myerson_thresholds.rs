//! The optimal single-item auction: winners, threshold payments, and one
//! draw of resampled thresholds (the Myersonian price vector).

use posted_price::{AuctionInstance, DiscreteDistribution, MyersonAuction, SeedTree};

fn main() -> posted_price::Result<()> {
    let instance = AuctionInstance::single_item(vec![
        DiscreteDistribution::uniform_grid(0.0, 1.0, 10)?,
        DiscreteDistribution::uniform_grid(0.0, 2.0, 10)?,
    ])?;
    let auction = MyersonAuction::new(&instance)?;

    for values in [[0.95, 0.9], [0.75, 1.1], [0.25, 0.3]] {
        let outcome = auction.allocate(&values)?;
        println!(
            "values {values:?} -> winners {:?}, payments {:?}",
            outcome.winners, outcome.payments
        );
    }

    // Grid midpoints: 0.05, 0.15, ... for bidder 0 and 0.1, 0.3, ... for bidder 1.
    // Bidder 0's threshold against a fixed opponent value.
    for opp in [0.3, 0.9, 1.5] {
        println!(
            "bidder 0 must bid at least {:.3} against bidder 1 at {opp}",
            auction.threshold(0, &[opp])?
        );
    }

    let mut rng = SeedTree::new(3).stream(0);
    let sample = auction.resample_thresholds(&mut rng);
    println!(
        "resampled thresholds {:?} from opponents {:?}",
        sample.thresholds, sample.opponents
    );
    Ok(())
}
