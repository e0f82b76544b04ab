//! Posted prices versus the optimal auction.
//!
//! Discrete value distributions, Myerson's optimal auction with ironing,
//! sequential posted pricing and eager second-price auctions, exact revenue
//! evaluation by enumeration, factor-revealing linear programs, and
//! position auctions.

pub mod cli;
pub mod dist;
pub mod error;
pub mod exact;
pub mod factor_lp;
pub mod instance;
pub mod mechanisms;
pub mod myerson;
pub mod numeric;
pub mod parallel;
pub mod position;
pub mod rng;

pub use dist::DiscreteDistribution;
pub use error::{Error, Result};
pub use instance::{AuctionInstance, Feasibility, IndependenceOracle};
pub use mechanisms::{MechanismOutcome, PriceVector};
pub use myerson::MyersonAuction;
pub use rng::SeedTree;
