//! Posted pricing beyond k units: a partition constraint run group by group,
//! and a user-defined matroid supplied through an independence oracle.

use std::sync::Arc;

use posted_price::mechanisms::{matroid_myersonian_spm, partition_spm};
use posted_price::{
    AuctionInstance, DiscreteDistribution, Feasibility, IndependenceOracle, SeedTree,
};

/// At most two winners overall, and at most one of bidders 0 and 1.
struct Laminar;

impl IndependenceOracle for Laminar {
    fn ground_size(&self) -> usize {
        4
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.len() <= 2 && set.iter().filter(|&&i| i < 2).count() <= 1
    }

    fn name(&self) -> &str {
        "laminar"
    }
}

fn main() -> posted_price::Result<()> {
    let bidders = vec![DiscreteDistribution::uniform_grid(0.0, 1.0, 5)?; 4];

    let partition = Feasibility::Partition {
        groups: vec![vec![0, 1], vec![2, 3]],
        caps: vec![1, 2],
    };
    let instance = AuctionInstance::new(bidders.clone(), partition)?;
    let p = partition_spm(&instance, 50_000, SeedTree::new(6))?;
    for g in &p.groups {
        println!(
            "group {:?} cap {}: revenue {:.4} via {}",
            g.members,
            g.cap,
            g.best.revenue,
            g.best.chosen.as_str()
        );
    }
    println!(
        "partition revenue {:.4}, guarantee {:.4}",
        p.revenue, p.guarantee
    );

    let instance = AuctionInstance::new(bidders, Feasibility::Matroid(Arc::new(Laminar)))?;
    let m = matroid_myersonian_spm(&instance, 50_000, SeedTree::new(6))?;
    println!("laminar matroid: {:.4} +/- {:.4}", m.mean, m.std_error);
    Ok(())
}
