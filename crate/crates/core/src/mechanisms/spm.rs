use serde::Serialize;

use super::{Estimate, MechanismOutcome, PriceLabel, PriceVector};
use crate::error::{Error, Result};
use crate::factor_lp::solve_lp_spm_h;
use crate::instance::{AuctionInstance, Feasibility};
use crate::myerson::MyersonAuction;
use crate::numeric::truncated_mean;
use crate::parallel::trial_moments;
use crate::rng::SeedTree;

/// Visiting order: decreasing price, lower index first among equal prices.
pub fn spm_order(prices: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..prices.len()).collect();
    order.sort_by(|&a, &b| prices[b].total_cmp(&prices[a]).then(a.cmp(&b)));
    order
}

/// Offers made during one SPM run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpmTrace {
    /// Bidders that received an offer, in visiting order.
    pub offered: Vec<usize>,
    /// Bidders skipped because adding them would break feasibility.
    pub skipped: Vec<usize>,
    pub outcome: MechanismOutcome,
}

fn check_profile(instance: &AuctionInstance, len: usize, what: &str) -> Result<()> {
    if len != instance.n() {
        return Err(Error::InvalidArgument(format!(
            "{what} has length {len}, instance has {} bidders",
            instance.n()
        )));
    }
    Ok(())
}

fn reject_position(instance: &AuctionInstance, operation: &'static str) -> Result<()> {
    if let Feasibility::Position { .. } = instance.feasibility() {
        return Err(Error::UnsupportedFeasibility {
            operation,
            feasibility: "position",
        });
    }
    Ok(())
}

/// SPM run with the full offer trace.
pub fn run_spm_traced(
    instance: &AuctionInstance,
    prices: &PriceVector,
    values: &[f64],
) -> Result<SpmTrace> {
    check_profile(instance, prices.len(), "price vector")?;
    check_profile(instance, values.len(), "value profile")?;
    reject_position(instance, "posted pricing")?;
    let mut trace = SpmTrace {
        offered: Vec::new(),
        skipped: Vec::new(),
        outcome: MechanismOutcome::empty("spm", 0),
    };
    let outcome = spm_core(instance, &prices.prices, values, Some(&mut trace));
    trace.outcome = outcome;
    Ok(trace)
}

/// One run of the posted-price mechanism.
pub fn run_spm(
    instance: &AuctionInstance,
    prices: &PriceVector,
    values: &[f64],
) -> Result<MechanismOutcome> {
    check_profile(instance, prices.len(), "price vector")?;
    check_profile(instance, values.len(), "value profile")?;
    reject_position(instance, "posted pricing")?;
    Ok(spm_core(instance, &prices.prices, values, None))
}

pub(crate) fn spm_core(
    instance: &AuctionInstance,
    prices: &[f64],
    values: &[f64],
    mut trace: Option<&mut SpmTrace>,
) -> MechanismOutcome {
    let n = prices.len();
    let mut winners = Vec::new();
    let mut payments = vec![0.0; n];
    for i in spm_order(prices) {
        if !instance.can_add(&winners, i) {
            if let Some(t) = trace.as_deref_mut() {
                t.skipped.push(i);
            }
            continue;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.offered.push(i);
        }
        if values[i] >= prices[i] {
            winners.push(i);
            payments[i] = prices[i];
        }
    }
    MechanismOutcome::new("spm", winners, payments)
}

/// Expected revenue of the uniform price `p` in a k-unit instance:
/// `p * E[min(#{i : v_i >= p}, H)]`.
pub fn uniform_price_revenue(instance: &AuctionInstance, p: f64) -> Result<f64> {
    let h = instance.units().ok_or(Error::UnsupportedFeasibility {
        operation: "uniform price search",
        feasibility: instance.feasibility().kind(),
    })?;
    let accept: Vec<f64> = instance.bidders().iter().map(|d| d.survival(p)).collect();
    Ok(p * truncated_mean(&accept, h))
}

/// Best uniform price and its expected revenue (k-unit instances).
///
/// Between two consecutive support points every acceptance probability is
/// constant while the price grows, so revenue is maximized at a support
/// point and scanning the union of supports is exact. Ties go to the lowest
/// price.
pub fn uniform_price_search(instance: &AuctionInstance) -> Result<(f64, f64)> {
    let mut candidates: Vec<f64> = instance
        .bidders()
        .iter()
        .flat_map(|d| d.support().iter().copied())
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut best = (
        candidates[0],
        uniform_price_revenue(instance, candidates[0])?,
    );
    for &p in &candidates[1..] {
        let rev = uniform_price_revenue(instance, p)?;
        if rev > best.1 {
            best = (p, rev);
        }
    }
    Ok(best)
}

/// Monte-Carlo revenue of posted pricing with independently resampled
/// thresholds. Trial `t` uses stream `t` of `seeds` for both the values and
/// the thresholds.
pub fn myersonian_spm_revenue(
    instance: &AuctionInstance,
    trials: u64,
    seeds: SeedTree,
) -> Result<Estimate> {
    reject_position(instance, "posted pricing")?;
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let auction = MyersonAuction::new(instance)?;
    let n = instance.n();
    let moments = trial_moments(trials, |t| {
        let mut rng = seeds.stream(t);
        let values: Vec<f64> = instance
            .bidders()
            .iter()
            .map(|d| d.sample(&mut rng))
            .collect();
        let prices = auction.resample_thresholds(&mut rng).thresholds;
        debug_assert_eq!(prices.len(), n);
        spm_core(instance, &prices, &values, None).revenue
    });
    Ok(moments.into())
}

/// The better of the Myersonian and uniform posted-price mechanisms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestSpm {
    pub myersonian: Estimate,
    pub uniform: f64,
    pub uniform_price: f64,
    pub chosen: PriceLabel,
    pub revenue: f64,
}

impl BestSpm {
    pub(crate) fn pick(myersonian: Estimate, uniform_price: f64, uniform: f64) -> Self {
        let (chosen, revenue) = if myersonian.mean >= uniform {
            (PriceLabel::Myersonian, myersonian.mean)
        } else {
            (PriceLabel::Uniform, uniform)
        };
        Self {
            myersonian,
            uniform,
            uniform_price,
            chosen,
            revenue,
        }
    }
}

/// `max(MP, UP)` for a k-unit instance, with MP estimated by Monte-Carlo.
pub fn best_spm_revenue(
    instance: &AuctionInstance,
    trials: u64,
    seeds: SeedTree,
) -> Result<BestSpm> {
    let (price, up) = uniform_price_search(instance)?;
    let mp = myersonian_spm_revenue(instance, trials, seeds)?;
    Ok(BestSpm::pick(mp, price, up))
}

/// One group of a partition constraint, run as its own k-unit SPM.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupResult {
    pub members: Vec<usize>,
    pub cap: usize,
    pub best: BestSpm,
    /// Certified approximation factor for a `cap`-unit auction.
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSpm {
    pub groups: Vec<GroupResult>,
    pub revenue: f64,
    /// Smallest per-group factor, the guarantee for the whole instance.
    pub guarantee: f64,
}

/// Posted pricing under a partition constraint: each group runs its own
/// best-of-two k-unit SPM with the group's cap. Group `g` uses the child seed
/// tree `seeds.child(g)`.
pub fn partition_spm(
    instance: &AuctionInstance,
    trials: u64,
    seeds: SeedTree,
) -> Result<PartitionSpm> {
    let Feasibility::Partition { groups, caps } = instance.feasibility() else {
        return Err(Error::UnsupportedFeasibility {
            operation: "partition posted pricing",
            feasibility: instance.feasibility().kind(),
        });
    };
    let mut results = Vec::with_capacity(groups.len());
    for (g, (members, &cap)) in groups.iter().zip(caps).enumerate() {
        let sub = instance.restrict(members, Feasibility::KUnit(cap))?;
        let best = best_spm_revenue(&sub, trials, seeds.child(g as u64))?;
        let units = sub.units().unwrap_or(cap);
        let factor = solve_lp_spm_h(units)?.factor;
        results.push(GroupResult {
            members: members.clone(),
            cap,
            best,
            factor,
        });
    }
    let revenue = results.iter().map(|g| g.best.revenue).sum();
    let guarantee = results
        .iter()
        .map(|g| g.factor)
        .fold(f64::INFINITY, f64::min);
    Ok(PartitionSpm {
        groups: results,
        revenue,
        guarantee,
    })
}

/// Myersonian posted pricing under a matroid oracle. The oracle is checked
/// for downward closure first (exhaustively, up to 16 bidders).
pub fn matroid_myersonian_spm(
    instance: &AuctionInstance,
    trials: u64,
    seeds: SeedTree,
) -> Result<Estimate> {
    if !matches!(
        instance.feasibility(),
        Feasibility::Matroid(_) | Feasibility::Partition { .. } | Feasibility::KUnit(_)
    ) {
        return Err(Error::UnsupportedFeasibility {
            operation: "matroid posted pricing",
            feasibility: instance.feasibility().kind(),
        });
    }
    if instance.n() <= 16 {
        instance.validate_oracle()?;
    }
    myersonian_spm_revenue(instance, trials, seeds)
}
