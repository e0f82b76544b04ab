//! Posted-price and eager second-price mechanisms.
//!
//! The posted-price mechanism (SPM) visits bidders in decreasing order of
//! their prices and sells to each one who accepts while the winner set stays
//! feasible. The eager second-price auction (ESP) first drops bidders below
//! their reserves, then runs a VCG-style auction on the survivors with the
//! reserves as payment floors.

mod esp;
mod spm;

use serde::Serialize;

use crate::error::{Error, Result};

/// Revenue of the posted-price mechanism on one value profile, unchecked.
pub(crate) fn spm_revenue(
    instance: &crate::instance::AuctionInstance,
    prices: &[f64],
    values: &[f64],
) -> f64 {
    spm::spm_core(instance, prices, values, None).revenue
}

/// Full posted-price outcome on one value profile, unchecked.
pub(crate) fn spm_outcome(
    instance: &crate::instance::AuctionInstance,
    prices: &[f64],
    values: &[f64],
) -> MechanismOutcome {
    spm::spm_core(instance, prices, values, None)
}

/// Revenue of the eager second-price auction on one value profile, unchecked.
pub(crate) fn esp_revenue(
    instance: &crate::instance::AuctionInstance,
    reserves: &[f64],
    values: &[f64],
) -> f64 {
    esp::esp_core(instance, reserves, values).revenue
}

pub use esp::{esp_revenues, esp_uniform_reserve, run_esp, uniform_esp_revenue, EspRevenues};
pub use spm::{
    best_spm_revenue, matroid_myersonian_spm, myersonian_spm_revenue, partition_spm, run_spm,
    run_spm_traced, spm_order, uniform_price_revenue, uniform_price_search, BestSpm, GroupResult,
    PartitionSpm, SpmTrace,
};

/// Origin of a price vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceLabel {
    Myersonian,
    Uniform,
    Custom,
}

impl PriceLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PriceLabel::Myersonian => "myersonian",
            PriceLabel::Uniform => "uniform",
            PriceLabel::Custom => "custom",
        }
    }
}

/// Per-bidder posted prices or reserves.
///
/// Prices are non-negative. A price of `+inf` is allowed and means the bidder
/// is never served; resampled thresholds take that value when no support
/// point of the bidder can win.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceVector {
    pub prices: Vec<f64>,
    pub label: PriceLabel,
}

impl PriceVector {
    pub fn new(prices: Vec<f64>, label: PriceLabel) -> Result<Self> {
        if let Some((i, p)) = prices
            .iter()
            .enumerate()
            .find(|(_, p)| p.is_nan() || **p < 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "price {i} is {p}; prices must be non-negative"
            )));
        }
        Ok(Self { prices, label })
    }

    pub fn custom(prices: Vec<f64>) -> Result<Self> {
        Self::new(prices, PriceLabel::Custom)
    }

    /// The same price for all `n` bidders.
    pub fn uniform(price: f64, n: usize) -> Result<Self> {
        Self::new(vec![price; n], PriceLabel::Uniform)
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Result of one mechanism run on one value profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismOutcome {
    pub mechanism: String,
    /// Winning bidders in increasing index order.
    pub winners: Vec<usize>,
    /// Payment of every bidder; zero for non-winners.
    pub payments: Vec<f64>,
    pub revenue: f64,
}

impl MechanismOutcome {
    pub fn new(mechanism: impl Into<String>, mut winners: Vec<usize>, payments: Vec<f64>) -> Self {
        winners.sort_unstable();
        let revenue = winners.iter().map(|&i| payments[i]).sum();
        Self {
            mechanism: mechanism.into(),
            winners,
            payments,
            revenue,
        }
    }

    pub fn empty(mechanism: impl Into<String>, n: usize) -> Self {
        Self::new(mechanism, Vec::new(), vec![0.0; n])
    }

    /// One JSON object on a single line, for audit logs.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("outcome serializes")
    }
}

/// A revenue figure with its sampling error; exact values carry zero samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            std_error: 0.0,
            samples: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.samples == 0
    }

    /// `mean -/+ z * std_error`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (
            self.mean - z * self.std_error,
            self.mean + z * self.std_error,
        )
    }
}

impl From<crate::parallel::Moments> for Estimate {
    fn from(m: crate::parallel::Moments) -> Self {
        Self {
            mean: m.mean(),
            std_error: m.std_error(),
            samples: m.count,
        }
    }
}
