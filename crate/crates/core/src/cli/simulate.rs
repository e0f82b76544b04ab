//! Monte-Carlo runs of one mechanism on one instance.

use clap::ValueEnum;
use serde::Serialize;

use super::certify::exact_opt_if_affordable;
use super::Table;
use crate::error::{Error, Result};
use crate::exact::EnumerationBudget;
use crate::instance::{AuctionInstance, Feasibility};
use crate::mechanisms::{
    best_spm_revenue, esp_revenue, esp_uniform_reserve, myersonian_spm_revenue, spm_revenue,
    uniform_price_search, Estimate, PriceLabel,
};
use crate::myerson::MyersonAuction;
use crate::parallel::trial_moments;
use crate::position::pa_spm;
use crate::rng::SeedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    /// Posted prices from resampled thresholds.
    MyersonianSpm,
    /// One posted price for everybody.
    UniformSpm,
    /// The better of the two posted-price mechanisms.
    BestSpm,
    /// Eager second price with resampled-threshold reserves.
    Esp,
    /// Eager second price with one reserve (single item).
    UniformEsp,
    /// The optimal auction.
    Optimal,
    /// Layered posted pricing for position auctions.
    PaSpm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub mechanism: Mechanism,
    pub n: usize,
    pub feasibility: &'static str,
    pub trials: u64,
    pub seed: u64,
    pub revenue: Estimate,
    /// Price policy actually used, for the best-of-two mechanism.
    pub chosen: Option<PriceLabel>,
    /// The uniform price or reserve, when one is used.
    pub uniform_price: Option<f64>,
    pub exact_opt: Option<f64>,
    pub ratio: Option<f64>,
    /// Normal 95% interval of the ratio.
    pub ratio_interval: Option<(f64, f64)>,
}

fn sample_values(instance: &AuctionInstance, rng: &mut crate::rng::Stream) -> Vec<f64> {
    instance.bidders().iter().map(|d| d.sample(rng)).collect()
}

pub fn simulate(
    instance: &AuctionInstance,
    mechanism: Mechanism,
    trials: u64,
    seed: u64,
    budget: EnumerationBudget,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let position = matches!(instance.feasibility(), Feasibility::Position { .. });
    if position != (mechanism == Mechanism::PaSpm) {
        return Err(Error::InvalidArgument(format!(
            "mechanism {mechanism:?} does not apply to {} feasibility",
            instance.feasibility().kind()
        )));
    }
    let seeds = SeedTree::new(seed);
    let n = instance.n();
    let mut chosen = None;
    let mut uniform_price = None;
    let revenue: Estimate = match mechanism {
        Mechanism::MyersonianSpm => myersonian_spm_revenue(instance, trials, seeds)?,
        Mechanism::UniformSpm => {
            let (p, _) = uniform_price_search(instance)?;
            uniform_price = Some(p);
            let prices = vec![p; n];
            trial_moments(trials, |t| {
                spm_revenue(
                    instance,
                    &prices,
                    &sample_values(instance, &mut seeds.stream(t)),
                )
            })
            .into()
        }
        Mechanism::BestSpm => {
            let best = best_spm_revenue(instance, trials, seeds)?;
            chosen = Some(best.chosen);
            uniform_price = Some(best.uniform_price);
            match best.chosen {
                PriceLabel::Uniform => Estimate::exact(best.uniform),
                _ => best.myersonian,
            }
        }
        Mechanism::Esp => {
            let auction = MyersonAuction::new(instance)?;
            trial_moments(trials, |t| {
                let mut rng = seeds.stream(t);
                let values = sample_values(instance, &mut rng);
                let reserves = auction.resample_thresholds(&mut rng).thresholds;
                esp_revenue(instance, &reserves, &values)
            })
            .into()
        }
        Mechanism::UniformEsp => {
            let (r, _) = esp_uniform_reserve(instance)?;
            uniform_price = Some(r);
            let reserves = vec![r; n];
            trial_moments(trials, |t| {
                esp_revenue(
                    instance,
                    &reserves,
                    &sample_values(instance, &mut seeds.stream(t)),
                )
            })
            .into()
        }
        Mechanism::Optimal => {
            let auction = MyersonAuction::new(instance)?;
            trial_moments(trials, |t| {
                let mut rng = seeds.stream(t);
                let idx: Vec<usize> = instance
                    .bidders()
                    .iter()
                    .map(|d| d.sample_index(&mut rng))
                    .collect();
                auction.outcome_at(&idx).revenue
            })
            .into()
        }
        Mechanism::PaSpm => pa_spm(instance, trials, seeds)?.revenue,
    };
    let exact_opt = exact_opt_if_affordable(instance, budget)?;
    let ratio = exact_opt.map(|o| if o > 0.0 { revenue.mean / o } else { 1.0 });
    let ratio_interval = exact_opt.filter(|&o| o > 0.0).map(|o| {
        let (lo, hi) = revenue.interval(1.96);
        (lo / o, hi / o)
    });
    Ok(SimulationReport {
        mechanism,
        n,
        feasibility: instance.feasibility().kind(),
        trials,
        seed,
        revenue,
        chosen,
        uniform_price,
        exact_opt,
        ratio,
        ratio_interval,
    })
}

impl Table for SimulationReport {
    fn header(&self) -> Vec<String> {
        [
            "mechanism",
            "n",
            "trials",
            "seed",
            "revenue",
            "std_error",
            "exact_opt",
            "ratio",
        ]
        .map(String::from)
        .to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.10}")).unwrap_or_default();
        vec![vec![
            format!("{:?}", self.mechanism),
            self.n.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            format!("{:.10}", self.revenue.mean),
            format!("{:.3e}", self.revenue.std_error),
            opt(self.exact_opt),
            opt(self.ratio),
        ]]
    }
}
