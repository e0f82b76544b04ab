//! Brute-force ground truth on small discrete instances.
//!
//! Everything here enumerates value profiles exhaustively. Mechanisms with
//! resampled-threshold prices are evaluated through the exact distribution of
//! each bidder's threshold: the resampled thresholds are independent across
//! bidders, so their joint law is the product of the marginals, and each
//! marginal comes from one pass over that bidder's opponent profiles.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::instance::{AuctionInstance, Feasibility};
use crate::mechanisms::{esp_uniform_reserve, uniform_price_search};
use crate::myerson::{exact_threshold_marginal, MyersonAuction};
use crate::parallel::{chunked, CHUNK};
use crate::rng::stream_from_seed;

/// Limits on exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumerationBudget {
    /// Largest number of value profiles enumerated.
    pub max_profiles: u128,
    /// Largest number of joint (value, price) states enumerated for
    /// resampled-threshold mechanisms.
    pub max_threshold_profiles: u128,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_profiles: 10_000_000,
            max_threshold_profiles: 10_000_000,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_profiles: u128) -> Self {
        Self {
            max_profiles,
            max_threshold_profiles: max_profiles,
        }
    }

    fn check(required: u128, budget: u128) -> Result<()> {
        if required > budget {
            Err(Error::BudgetExceeded { required, budget })
        } else {
            Ok(())
        }
    }
}

/// The product space of value profiles, optionally with one bidder left out.
#[derive(Debug, Clone)]
pub struct ProfileSpace<'a> {
    bidders: &'a [DiscreteDistribution],
    skip: Option<usize>,
    len: u64,
}

impl<'a> ProfileSpace<'a> {
    pub fn new(instance: &'a AuctionInstance, budget: EnumerationBudget) -> Result<Self> {
        Self::build(instance, None, budget)
    }

    /// Profiles of everyone except bidder `skip`.
    pub fn without(
        instance: &'a AuctionInstance,
        skip: usize,
        budget: EnumerationBudget,
    ) -> Result<Self> {
        Self::build(instance, Some(skip), budget)
    }

    fn build(
        instance: &'a AuctionInstance,
        skip: Option<usize>,
        budget: EnumerationBudget,
    ) -> Result<Self> {
        let required: u128 = instance
            .bidders()
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != skip)
            .map(|(_, d)| d.len() as u128)
            .product();
        EnumerationBudget::check(required, budget.max_profiles)?;
        Ok(Self {
            bidders: instance.bidders(),
            skip,
            len: required as u64,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Writes profile number `p` into `idx` (support indices; the skipped
    /// bidder's slot is untouched) and returns its probability.
    pub fn decode(&self, mut p: u64, idx: &mut [usize]) -> f64 {
        let mut prob = 1.0;
        for (i, d) in self.bidders.iter().enumerate() {
            if Some(i) == self.skip {
                continue;
            }
            let m = d.len() as u64;
            let j = (p % m) as usize;
            p /= m;
            idx[i] = j;
            prob *= d.probs()[j];
        }
        prob
    }
}

/// One enumerated profile of the optimal auction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileTrace {
    pub values: Vec<f64>,
    pub probability: f64,
    pub winners: Vec<usize>,
    pub payments: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactOpt {
    pub revenue: f64,
    pub trace: Option<Vec<ProfileTrace>>,
}

impl ExactOpt {
    /// Per-profile CSV: `probability,v_0..,winners,revenue`.
    pub fn trace_csv(&self) -> Option<String> {
        let trace = self.trace.as_ref()?;
        let n = trace.first().map_or(0, |t| t.values.len());
        let mut out = String::from("probability");
        for i in 0..n {
            let _ = write!(out, ",v{i}");
        }
        out.push_str(",winners,revenue\n");
        for t in trace {
            let _ = write!(out, "{}", t.probability);
            for v in &t.values {
                let _ = write!(out, ",{v}");
            }
            let winners: Vec<String> = t.winners.iter().map(|w| w.to_string()).collect();
            let revenue: f64 = t.winners.iter().map(|&w| t.payments[w]).sum();
            let _ = writeln!(out, ",{},{revenue}", winners.join(" "));
        }
        Some(out)
    }
}

/// Exact optimal revenue, optionally with a per-profile trace.
pub fn exact_opt(
    instance: &AuctionInstance,
    budget: EnumerationBudget,
    trace: bool,
) -> Result<ExactOpt> {
    let auction = MyersonAuction::new(instance)?;
    let space = ProfileSpace::new(instance, budget)?;
    let n = instance.n();
    let parts = chunked(space.len(), CHUNK, |range| {
        let mut idx = vec![0; n];
        let mut total = 0.0;
        let mut rows = Vec::new();
        for p in range {
            let prob = space.decode(p, &mut idx);
            let out = auction.outcome_at(&idx);
            total += prob * out.revenue;
            if trace {
                rows.push(ProfileTrace {
                    values: (0..n)
                        .map(|i| instance.bidder(i).support()[idx[i]])
                        .collect(),
                    probability: prob,
                    winners: out.winners,
                    payments: out.payments,
                });
            }
        }
        (total, rows)
    });
    let mut revenue = 0.0;
    let mut rows = Vec::new();
    for (t, r) in parts {
        revenue += t;
        rows.extend(r);
    }
    Ok(ExactOpt {
        revenue,
        trace: trace.then_some(rows),
    })
}

/// Exact law of every bidder's resampled threshold, as
/// `(support index or None for "never wins", probability)` lists.
pub fn threshold_marginals(
    auction: &MyersonAuction<'_>,
    budget: EnumerationBudget,
) -> Result<Vec<Vec<(Option<usize>, f64)>>> {
    (0..auction.instance().n())
        .map(|i| exact_threshold_marginal(auction, i, budget))
        .collect()
}

/// Mechanisms with an exact evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MechanismTag {
    /// Posted prices from resampled thresholds.
    MP,
    /// Best uniform posted price.
    UP,
    /// Eager second price with resampled-threshold reserves.
    ME,
    /// Eager second price with the best common reserve.
    UE,
}

/// One bidder's joint (price, value) state. Rejecting states are merged:
/// a bidder below its price never affects the outcome.
#[derive(Debug, Clone, Copy)]
struct BidderState {
    price: f64,
    value: f64,
    prob: f64,
}

fn bidder_states(
    instance: &AuctionInstance,
    marginals: &[Vec<(Option<usize>, f64)>],
    keep_value: bool,
) -> Vec<Vec<BidderState>> {
    marginals
        .iter()
        .enumerate()
        .map(|(i, law)| {
            let d = instance.bidder(i);
            let mut states = Vec::new();
            let mut reject = 0.0;
            for &(t, pt) in law {
                let Some(t) = t else {
                    reject += pt;
                    continue;
                };
                let price = d.support()[t];
                if keep_value {
                    for j in 0..t {
                        reject += pt * d.probs()[j];
                    }
                    for j in t..d.len() {
                        states.push(BidderState {
                            price,
                            value: d.support()[j],
                            prob: pt * d.probs()[j],
                        });
                    }
                } else {
                    let accept = d.tail_at(t);
                    reject += pt * (1.0 - accept);
                    states.push(BidderState {
                        price,
                        value: price,
                        prob: pt * accept,
                    });
                }
            }
            if reject > 0.0 {
                states.push(BidderState {
                    price: f64::INFINITY,
                    value: -1.0,
                    prob: reject,
                });
            }
            states
        })
        .collect()
}

fn enumerate_states<F>(
    states: &[Vec<BidderState>],
    budget: EnumerationBudget,
    revenue: F,
) -> Result<f64>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let required: u128 = states.iter().map(|s| s.len() as u128).product();
    EnumerationBudget::check(required, budget.max_threshold_profiles)?;
    let n = states.len();
    let parts = chunked(required as u64, CHUNK, |range| {
        let mut prices = vec![0.0; n];
        let mut values = vec![0.0; n];
        let mut total = 0.0;
        for mut p in range {
            let mut prob = 1.0;
            for (i, s) in states.iter().enumerate() {
                let m = s.len() as u64;
                let st = s[(p % m) as usize];
                p /= m;
                prices[i] = st.price;
                values[i] = st.value;
                prob *= st.prob;
            }
            total += prob * revenue(&prices, &values);
        }
        total
    });
    Ok(parts.into_iter().sum())
}

/// Exact expected revenue of a mechanism.
pub fn exact_mechanism_value(
    instance: &AuctionInstance,
    tag: MechanismTag,
    budget: EnumerationBudget,
) -> Result<f64> {
    match tag {
        MechanismTag::UP => Ok(uniform_price_search(instance)?.1),
        MechanismTag::UE => Ok(esp_uniform_reserve(instance)?.1),
        MechanismTag::MP | MechanismTag::ME => {
            if instance.profile_count() > budget.max_profiles {
                return Err(Error::BudgetExceeded {
                    required: instance.profile_count(),
                    budget: budget.max_profiles,
                });
            }
            let auction = MyersonAuction::new(instance)?;
            let marginals = threshold_marginals(&auction, budget)?;
            if tag == MechanismTag::MP {
                let states = bidder_states(instance, &marginals, false);
                enumerate_states(&states, budget, |p, v| {
                    crate::mechanisms::spm_revenue(instance, p, v)
                })
            } else {
                if instance.units() != Some(1) {
                    return Err(Error::UnsupportedFeasibility {
                        operation: "exact Myersonian eager second price",
                        feasibility: instance.feasibility().kind(),
                    });
                }
                let states = bidder_states(instance, &marginals, true);
                enumerate_states(&states, budget, |p, v| {
                    crate::mechanisms::esp_revenue(instance, p, v)
                })
            }
        }
    }
}

/// Exact revenue of SPM and ESP for a fixed price vector.
pub fn exact_fixed_prices(
    instance: &AuctionInstance,
    prices: &[f64],
    budget: EnumerationBudget,
) -> Result<(f64, f64)> {
    let space = ProfileSpace::new(instance, budget)?;
    let n = instance.n();
    let mut idx = vec![0; n];
    let mut values = vec![0.0; n];
    let (mut spm, mut esp) = (0.0, 0.0);
    for p in 0..space.len() {
        let prob = space.decode(p, &mut idx);
        for i in 0..n {
            values[i] = instance.bidder(i).support()[idx[i]];
        }
        spm += prob * crate::mechanisms::spm_revenue(instance, prices, &values);
        esp += prob * crate::mechanisms::esp_revenue(instance, prices, &values);
    }
    Ok((spm, esp))
}

/// A profile where ESP earned less than SPM under the same prices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceViolation {
    pub prices: Vec<f64>,
    pub values: Vec<f64>,
    pub spm: f64,
    pub esp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    /// Number of (price vector, value profile) pairs compared.
    pub comparisons: u64,
    pub violations: Vec<DominanceViolation>,
}

/// Compares ESP and SPM revenue profile by profile, for every price vector
/// in the support of the resampled thresholds and for every uniform price
/// at a support point.
pub fn dominance_check(
    instance: &AuctionInstance,
    budget: EnumerationBudget,
) -> Result<DominanceReport> {
    let n = instance.n();
    let auction = MyersonAuction::new(instance)?;
    let marginals = threshold_marginals(&auction, budget)?;
    let price_law: Vec<Vec<f64>> = marginals
        .iter()
        .enumerate()
        .map(|(i, law)| {
            law.iter()
                .map(|&(t, _)| t.map_or(f64::INFINITY, |j| instance.bidder(i).support()[j]))
                .collect()
        })
        .collect();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let count: u128 = price_law.iter().map(|l| l.len() as u128).product();
    EnumerationBudget::check(
        count * instance.profile_count(),
        budget.max_threshold_profiles,
    )?;
    for mut p in 0..count as u64 {
        let mut v = Vec::with_capacity(n);
        for law in &price_law {
            v.push(law[(p % law.len() as u64) as usize]);
            p /= law.len() as u64;
        }
        vectors.push(v);
    }
    let mut points: Vec<f64> = instance
        .bidders()
        .iter()
        .flat_map(|d| d.support().iter().copied())
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    vectors.extend(points.into_iter().map(|p| vec![p; n]));

    let space = ProfileSpace::new(instance, budget)?;
    let mut idx = vec![0; n];
    let mut values = vec![0.0; n];
    let mut report = DominanceReport {
        comparisons: 0,
        violations: Vec::new(),
    };
    for prices in &vectors {
        for p in 0..space.len() {
            space.decode(p, &mut idx);
            for i in 0..n {
                values[i] = instance.bidder(i).support()[idx[i]];
            }
            let spm = crate::mechanisms::spm_revenue(instance, prices, &values);
            let esp = crate::mechanisms::esp_revenue(instance, prices, &values);
            report.comparisons += 1;
            if esp < spm - 1e-12 {
                report.violations.push(DominanceViolation {
                    prices: prices.clone(),
                    values: values.clone(),
                    spm,
                    esp,
                });
            }
        }
    }
    Ok(report)
}

/// Exact revenues of the optimal auction and the approximate mechanisms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactRevenues {
    pub opt: f64,
    pub mp: f64,
    pub up: f64,
    /// Present for single-item instances.
    pub me: Option<f64>,
    pub ue: Option<f64>,
}

impl ExactRevenues {
    pub fn best_spm(&self) -> f64 {
        self.mp.max(self.up)
    }

    pub fn best_esp(&self) -> Option<f64> {
        Some(self.me?.max(self.ue?))
    }
}

/// Exact Opt, MP and UP, plus ME and UE when the instance sells one item.
pub fn exact_revenues(
    instance: &AuctionInstance,
    budget: EnumerationBudget,
) -> Result<ExactRevenues> {
    let opt = exact_opt(instance, budget, false)?.revenue;
    let mp = exact_mechanism_value(instance, MechanismTag::MP, budget)?;
    let up = exact_mechanism_value(instance, MechanismTag::UP, budget)?;
    let (me, ue) = if instance.units() == Some(1) {
        (
            Some(exact_mechanism_value(instance, MechanismTag::ME, budget)?),
            Some(exact_mechanism_value(instance, MechanismTag::UE, budget)?),
        )
    } else {
        (None, None)
    };
    Ok(ExactRevenues {
        opt,
        mp,
        up,
        me,
        ue,
    })
}

/// Values are drawn from this many points spaced by [`GRID_STEP`].
pub const GRID_POINTS: u32 = 20;
pub const GRID_STEP: f64 = 0.5;

/// Reproducible random instance: each bidder gets between 1 and
/// `support_size` distinct points of the grid `{0.5, 1.0, ..., 10.0}` with
/// random positive probabilities.
pub fn random_instance(
    seed: u64,
    n: usize,
    support_size: usize,
    feasibility: Feasibility,
) -> Result<AuctionInstance> {
    if n == 0 || support_size == 0 || support_size > GRID_POINTS as usize {
        return Err(Error::InvalidArgument(format!(
            "random instances need n >= 1 and 1 <= support size <= {GRID_POINTS}"
        )));
    }
    let mut rng = stream_from_seed(seed);
    let mut bidders = Vec::with_capacity(n);
    for _ in 0..n {
        let m = rng.gen_range(1..=support_size);
        let mut points: Vec<u32> = Vec::with_capacity(m);
        while points.len() < m {
            let x = rng.gen_range(1..=GRID_POINTS);
            if !points.contains(&x) {
                points.push(x);
            }
        }
        points.sort_unstable();
        let weights: Vec<f64> = (0..m).map(|_| rng.gen_range(1..=10) as f64).collect();
        let total: f64 = weights.iter().sum();
        bidders.push(DiscreteDistribution::new(
            points.iter().map(|&x| x as f64 * GRID_STEP).collect(),
            weights.iter().map(|w| w / total).collect(),
        )?);
    }
    AuctionInstance::new(bidders, feasibility)
}
