//! Position auctions.
//!
//! Slot `j` receives `alpha_j` clicks, with `alpha_1 >= ... >= alpha_n`. An
//! expected-click vector `x` is implementable exactly when the `s` largest
//! entries sum to at most `alpha_1 + ... + alpha_s` for every `s`. Any such
//! auction is a mixture of unit auctions: layer `j` sells `j` identical units
//! and carries weight `alpha_j - alpha_{j+1}` (with `alpha_{n+1} = 0`).
//! Outcomes are reported in expected-click space; no slot lottery is built.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{exact_mechanism_value, exact_opt, EnumerationBudget, MechanismTag};
use crate::factor_lp::solve_lp_spm_h;
use crate::instance::{AuctionInstance, Feasibility};
use crate::mechanisms::{
    best_spm_revenue, spm_outcome, uniform_price_search, BestSpm, Estimate, PriceLabel,
};
use crate::myerson::{support_indices, MyersonAuction};
use crate::parallel::{chunked, Moments, CHUNK};
use crate::rng::SeedTree;

/// Relative slack allowed in the click constraints.
const CLICK_TOL: f64 = 1e-12;

/// A violated click constraint: the `cardinality` largest entries of `x`
/// sum to `lhs`, above the `rhs` clicks of the top slots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClickViolation {
    pub cardinality: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Bidders achieving `lhs`.
    pub members: Vec<usize>,
}

/// Checks the click vector against every set constraint at once, by sorting
/// and comparing prefix sums. Missing trailing `alphas` count as zero.
pub fn pa_feasible(x: &[f64], alphas: &[f64]) -> Option<ClickViolation> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for (s, &i) in order.iter().enumerate() {
        lhs += x[i];
        rhs += alphas.get(s).copied().unwrap_or(0.0);
        if lhs > rhs + CLICK_TOL * rhs.abs().max(1.0) {
            return Some(ClickViolation {
                cardinality: s + 1,
                lhs,
                rhs,
                members: order[..=s].to_vec(),
            });
        }
    }
    None
}

/// The same check over all `2^n` subsets; a test oracle for small `n`.
pub fn pa_feasible_subsets(x: &[f64], alphas: &[f64]) -> Option<ClickViolation> {
    let n = x.len();
    assert!(n <= 20, "subset check is exponential; n = {n}");
    let prefix: Vec<f64> = (0..=n)
        .scan(0.0, |acc, s| {
            if s > 0 {
                *acc += alphas.get(s - 1).copied().unwrap_or(0.0);
            }
            Some(*acc)
        })
        .collect();
    let mut worst: Option<ClickViolation> = None;
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let lhs: f64 = members.iter().map(|&i| x[i]).sum();
        let rhs = prefix[members.len()];
        if lhs > rhs + CLICK_TOL * rhs.abs().max(1.0) {
            let better = worst.as_ref().is_none_or(|w| members.len() < w.cardinality);
            if better {
                worst = Some(ClickViolation {
                    cardinality: members.len(),
                    lhs,
                    rhs,
                    members,
                });
            }
        }
    }
    worst
}

/// Layer weights `alpha_j - alpha_{j+1}`, indexed by `j - 1`.
pub fn layer_weights(alphas: &[f64]) -> Vec<f64> {
    (0..alphas.len())
        .map(|j| alphas[j] - alphas.get(j + 1).copied().unwrap_or(0.0))
        .collect()
}

fn alphas_of(instance: &AuctionInstance) -> Result<&[f64]> {
    match instance.feasibility() {
        Feasibility::Position { alphas } => Ok(alphas),
        other => Err(Error::UnsupportedFeasibility {
            operation: "position auction",
            feasibility: other.kind(),
        }),
    }
}

/// One unit layer of a position-auction outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerOutcome {
    /// Number of units sold in this layer.
    pub units: usize,
    pub weight: f64,
    /// `x_i^j`.
    pub allocation: Vec<f64>,
    /// `pi_i^j`.
    pub payments: Vec<f64>,
    pub revenue: f64,
}

/// Composed position-auction outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaOutcome {
    /// Expected clicks `x_i`.
    pub clicks: Vec<f64>,
    /// Expected payments `pi_i`.
    pub payments: Vec<f64>,
    pub layers: Vec<LayerOutcome>,
    pub revenue: f64,
}

impl PaOutcome {
    fn compose(n: usize, layers: Vec<LayerOutcome>) -> Self {
        let mut clicks = vec![0.0; n];
        let mut payments = vec![0.0; n];
        let mut revenue = 0.0;
        for l in &layers {
            for i in 0..n {
                clicks[i] += l.weight * l.allocation[i];
                payments[i] += l.weight * l.payments[i];
            }
            revenue += l.weight * l.revenue;
        }
        Self {
            clicks,
            payments,
            layers,
            revenue,
        }
    }
}

/// Optimal position auction at one value profile: the `j`-unit optimal
/// auction for every layer, all ranked by the same ironed virtual values.
pub fn pa_optimal(instance: &AuctionInstance, values: &[f64]) -> Result<PaOutcome> {
    let alphas = alphas_of(instance)?;
    let idx = support_indices(instance, values)?;
    let n = instance.n();
    let weights = layer_weights(alphas);
    let layers: Vec<LayerOutcome> = (1..=n)
        .into_par_iter()
        .map(|j| {
            let out = MyersonAuction::layer(instance, j).outcome_at(&idx);
            let mut allocation = vec![0.0; n];
            for &w in &out.winners {
                allocation[w] = 1.0;
            }
            LayerOutcome {
                units: j,
                weight: weights[j - 1],
                allocation,
                payments: out.payments,
                revenue: out.revenue,
            }
        })
        .collect();
    for pair in layers.windows(2) {
        if let Some(i) = (0..n).find(|&i| pair[0].allocation[i] > pair[1].allocation[i]) {
            return Err(Error::Invariant(format!(
                "bidder {i} wins with {} units but loses with {}",
                pair[0].units, pair[1].units
            )));
        }
    }
    Ok(PaOutcome::compose(n, layers))
}

/// The layer-`j` price policy chosen for the composed posted-price mechanism.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaSpmLayer {
    pub units: usize,
    pub weight: f64,
    pub best: BestSpm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaSpm {
    pub layers: Vec<PaSpmLayer>,
    /// Revenue of the composed mechanism with the chosen layer policies.
    pub revenue: Estimate,
    /// Average composed click vector.
    pub mean_clicks: Vec<f64>,
    pub trials: u64,
    /// Trials whose composed click vector broke a click constraint.
    pub infeasible_trials: u64,
}

/// Posted pricing for a position auction with `n^2` prices: every layer runs
/// the better of its Myersonian and uniform `j`-unit mechanisms, and the
/// layers are mixed with weights `alpha_j - alpha_{j+1}`.
///
/// The policy of layer `j` is picked using `seeds.child(j)`. The composed
/// mechanism is then simulated on `trials` profiles from `seeds.child(0)`,
/// where every layer sees the same values but draws its own resampled
/// thresholds.
pub fn pa_spm(instance: &AuctionInstance, trials: u64, seeds: SeedTree) -> Result<PaSpm> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let alphas = alphas_of(instance)?.to_vec();
    let n = instance.n();
    let weights = layer_weights(&alphas);
    let layer_instances: Vec<AuctionInstance> = (1..=n)
        .map(|j| instance.with_feasibility(Feasibility::KUnit(j)))
        .collect::<Result<_>>()?;
    let layers: Vec<PaSpmLayer> = layer_instances
        .par_iter()
        .enumerate()
        .map(|(l, inst)| {
            let best = best_spm_revenue(inst, trials, seeds.child(l as u64 + 1))?;
            Ok(PaSpmLayer {
                units: l + 1,
                weight: weights[l],
                best,
            })
        })
        .collect::<Result<_>>()?;
    let auctions: Vec<MyersonAuction> = layer_instances
        .iter()
        .map(MyersonAuction::new)
        .collect::<Result<_>>()?;
    let sim = seeds.child(0);
    let parts = chunked(trials, CHUNK, |range| {
        let mut m = Moments::default();
        let mut clicks = vec![0.0; n];
        let mut bad = 0u64;
        for t in range {
            let mut rng = sim.stream(t);
            let values: Vec<f64> = instance
                .bidders()
                .iter()
                .map(|d| d.sample(&mut rng))
                .collect();
            let mut x = vec![0.0; n];
            let mut revenue = 0.0;
            for (l, layer) in layers.iter().enumerate() {
                let prices = match layer.best.chosen {
                    PriceLabel::Uniform => vec![layer.best.uniform_price; n],
                    _ => auctions[l].resample_thresholds(&mut rng).thresholds,
                };
                if layer.weight == 0.0 {
                    continue;
                }
                let out = spm_outcome(&layer_instances[l], &prices, &values);
                for &w in &out.winners {
                    x[w] += layer.weight;
                }
                revenue += layer.weight * out.revenue;
            }
            if pa_feasible(&x, &alphas).is_some() {
                bad += 1;
            }
            for i in 0..n {
                clicks[i] += x[i];
            }
            m.push(revenue);
        }
        (m, clicks, bad)
    });
    let mut moments = Moments::default();
    let mut mean_clicks = vec![0.0; n];
    let mut infeasible_trials = 0;
    for (m, c, b) in parts {
        moments = moments.merge(m);
        for i in 0..n {
            mean_clicks[i] += c[i];
        }
        infeasible_trials += b;
    }
    for c in &mut mean_clicks {
        *c /= trials as f64;
    }
    Ok(PaSpm {
        layers,
        revenue: moments.into(),
        mean_clicks,
        trials,
        infeasible_trials,
    })
}

/// `sum_j f_j / LP(j)` for layer revenue fractions `f` and the `j`-unit
/// program values `lp_values` (both indexed by `j - 1`).
pub fn pa_bound(f: &[f64], lp_values: &[f64]) -> Result<f64> {
    if f.len() > lp_values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} fractions but {} program values",
            f.len(),
            lp_values.len()
        )));
    }
    if f.iter().any(|&x| !(x >= 0.0)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "layer fractions must be a distribution, got {f:?}"
        )));
    }
    Ok(f.iter().zip(lp_values).map(|(fj, lp)| fj / lp).sum())
}

/// Values of the continuous `j`-unit programs for `j = 1..=n`.
pub fn layer_lp_values(n: usize) -> Result<Vec<f64>> {
    (1..=n).map(|j| Ok(solve_lp_spm_h(j)?.lp_value)).collect()
}

/// Bound with estimated fractions: returns the bound and its standard error,
/// propagated linearly from the fractions' standard errors.
pub fn pa_bound_estimate(f: &[Estimate], lp_values: &[f64]) -> Result<Estimate> {
    let means: Vec<f64> = f.iter().map(|e| e.mean).collect();
    let total: f64 = means.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument(
            "layer revenue estimates sum to zero".into(),
        ));
    }
    let normalized: Vec<f64> = means.iter().map(|m| m / total).collect();
    let mean = pa_bound(&normalized, lp_values)?;
    let var: f64 = f
        .iter()
        .zip(lp_values)
        .map(|(e, lp)| (e.std_error / (total * lp)).powi(2))
        .sum();
    let samples = f.iter().map(|e| e.samples).max().unwrap_or(0);
    Ok(Estimate {
        mean,
        std_error: var.sqrt(),
        samples,
    })
}

/// Exact per-layer revenues of one position instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaExactLayer {
    pub units: usize,
    pub weight: f64,
    pub opt: f64,
    pub mp: f64,
    pub up: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaCertificate {
    pub layers: Vec<PaExactLayer>,
    /// Revenue of the optimal position auction.
    pub opt: f64,
    /// Revenue of the composed best-of-two posted-price mechanism.
    pub spm: f64,
    /// `f_j`: share of the optimal revenue earned by layer `j`.
    pub fractions: Vec<f64>,
    /// `sum_j f_j / LP(j)`.
    pub bound: f64,
    /// `spm / opt`, or 1 when both are zero.
    pub ratio: f64,
}

impl PaCertificate {
    /// Whether the composed mechanism earns at least `factor * opt`.
    pub fn certifies(&self, factor: f64) -> bool {
        self.spm >= factor * self.opt - 1e-12 * self.opt.abs().max(1.0)
    }
}

/// Exact optimal and posted-price revenue of a position instance, layer by
/// layer, with the bound implied by the layer fractions.
pub fn pa_exact(instance: &AuctionInstance, budget: EnumerationBudget) -> Result<PaCertificate> {
    let alphas = alphas_of(instance)?;
    let n = instance.n();
    let weights = layer_weights(alphas);
    let layers: Vec<PaExactLayer> = (1..=n)
        .into_par_iter()
        .map(|j| {
            let inst = instance.with_feasibility(Feasibility::KUnit(j))?;
            let opt = exact_opt(&inst, budget, false)?.revenue;
            let mp = exact_mechanism_value(&inst, MechanismTag::MP, budget)?;
            let up = uniform_price_search(&inst)?.1;
            Ok(PaExactLayer {
                units: j,
                weight: weights[j - 1],
                opt,
                mp,
                up,
            })
        })
        .collect::<Result<_>>()?;
    let opt: f64 = layers.iter().map(|l| l.weight * l.opt).sum();
    let spm: f64 = layers.iter().map(|l| l.weight * l.mp.max(l.up)).sum();
    let fractions: Vec<f64> = if opt > 0.0 {
        layers.iter().map(|l| l.weight * l.opt / opt).collect()
    } else {
        let mut f = vec![0.0; n];
        f[0] = 1.0;
        f
    };
    let bound = pa_bound(&fractions, &layer_lp_values(n)?)?;
    let ratio = if opt > 0.0 { spm / opt } else { 1.0 };
    Ok(PaCertificate {
        layers,
        opt,
        spm,
        fractions,
        bound,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DiscreteDistribution;
    use crate::exact::ProfileSpace;
    use crate::rng::stream_from_seed;
    use rand::Rng;

    fn grid_pair(m: usize, alphas: Vec<f64>) -> AuctionInstance {
        AuctionInstance::new(
            vec![
                DiscreteDistribution::uniform_grid(0.0, 1.0, m).unwrap(),
                DiscreteDistribution::uniform_grid(0.0, 2.0, m).unwrap(),
            ],
            Feasibility::Position { alphas },
        )
        .unwrap()
    }

    #[test]
    fn click_constraints() {
        let v = pa_feasible(&[0.8, 0.8], &[1.0, 0.5]).unwrap();
        assert_eq!(v.cardinality, 2);
        assert!((v.lhs - 1.6).abs() < 1e-15 && (v.rhs - 1.5).abs() < 1e-15);
        assert!(pa_feasible(&[1.0, 0.5], &[1.0, 0.5]).is_none());
        assert!(pa_feasible(&[0.5, 1.0], &[1.0, 0.5]).is_none());
        assert!(pa_feasible(&[0.0; 4], &[1.0, 0.5, 0.2, 0.0]).is_none());
        assert_eq!(
            pa_feasible(&[1.1, 0.0], &[1.0, 0.5]).unwrap().cardinality,
            1
        );
    }

    #[test]
    fn prefix_and_subset_forms_agree() {
        let mut rng = stream_from_seed(11);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=8);
            let mut alphas: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            alphas.sort_by(|a, b| b.total_cmp(a));
            let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * alphas[0]).collect();
            let a = pa_feasible(&x, &alphas);
            let b = pa_feasible_subsets(&x, &alphas);
            assert_eq!(a.is_some(), b.is_some(), "x={x:?} alphas={alphas:?}");
            if let (Some(a), Some(b)) = (a, b) {
                assert_eq!(a.cardinality, b.cardinality);
            }
        }
    }

    #[test]
    fn weights_telescope() {
        assert_eq!(
            layer_weights(&[1.0, 0.5, 0.5, 0.0]),
            vec![0.5, 0.0, 0.5, 0.0]
        );
        assert_eq!(layer_weights(&[2.0, 2.0]), vec![0.0, 2.0]);
    }

    #[test]
    fn optimal_layers_nest_and_compose() {
        let inst = grid_pair(6, vec![1.0, 0.4]);
        let space = ProfileSpace::new(&inst, EnumerationBudget::default()).unwrap();
        let mut idx = vec![0; 2];
        for p in 0..space.len() {
            space.decode(p, &mut idx);
            let values: Vec<f64> = (0..2).map(|i| inst.bidder(i).support()[idx[i]]).collect();
            let out = pa_optimal(&inst, &values).unwrap();
            assert!(pa_feasible(&out.clicks, &[1.0, 0.4]).is_none());
            let direct: f64 = out.layers.iter().map(|l| l.weight * l.revenue).sum();
            assert!((out.revenue - direct).abs() < 1e-12);
            assert!((out.revenue - out.payments.iter().sum::<f64>()).abs() < 1e-12);
            assert!(out.payments.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn single_slot_reduces_to_one_unit() {
        let inst = grid_pair(5, vec![1.0, 0.0]);
        let one = inst.with_feasibility(Feasibility::KUnit(1)).unwrap();
        let pa = pa_exact(&inst, EnumerationBudget::default()).unwrap();
        let opt = exact_opt(&one, EnumerationBudget::default(), false)
            .unwrap()
            .revenue;
        assert!((pa.opt - opt).abs() < 1e-12);
        assert_eq!(pa.fractions, vec![1.0, 0.0]);
        assert!((pa.bound - 1.0 / solve_lp_spm_h(1).unwrap().lp_value).abs() < 1e-12);
    }

    #[test]
    fn equal_slots_reduce_to_n_units() {
        let inst = grid_pair(5, vec![0.7, 0.7]);
        let all = inst.with_feasibility(Feasibility::KUnit(2)).unwrap();
        let pa = pa_exact(&inst, EnumerationBudget::default()).unwrap();
        let opt = exact_opt(&all, EnumerationBudget::default(), false)
            .unwrap()
            .revenue;
        assert!((pa.opt - 0.7 * opt).abs() < 1e-12);
    }

    #[test]
    fn exact_position_revenue_is_layer_sum() {
        let inst = grid_pair(8, vec![1.0, 0.6]);
        let space = ProfileSpace::new(&inst, EnumerationBudget::default()).unwrap();
        let mut idx = vec![0; 2];
        let mut enumerated = 0.0;
        for p in 0..space.len() {
            let prob = space.decode(p, &mut idx);
            let values: Vec<f64> = (0..2).map(|i| inst.bidder(i).support()[idx[i]]).collect();
            enumerated += prob * pa_optimal(&inst, &values).unwrap().revenue;
        }
        let pa = pa_exact(&inst, EnumerationBudget::default()).unwrap();
        assert!((pa.opt - enumerated).abs() < 1e-9);
        assert!(pa.certifies(0.6543), "{pa:?}");
    }

    #[test]
    fn composed_clicks_are_always_feasible() {
        let inst = grid_pair(6, vec![1.0, 0.5]);
        let out = pa_spm(&inst, 10_000, SeedTree::new(3)).unwrap();
        assert_eq!(out.infeasible_trials, 0);
        assert!(pa_feasible(&out.mean_clicks, &[1.0, 0.5]).is_none());
        let again = pa_spm(&inst, 10_000, SeedTree::new(3)).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn bound_endpoints() {
        let lp = layer_lp_values(3).unwrap();
        assert!((pa_bound(&[1.0, 0.0, 0.0], &lp).unwrap() - 0.6544).abs() < 1e-4);
        assert!((pa_bound(&[0.0, 1.0, 0.0], &lp).unwrap() - 0.7426).abs() < 1e-4);
        let mid = pa_bound(&[0.5, 0.5, 0.0], &lp).unwrap();
        assert!((mid - 0.5 * (1.0 / lp[0] + 1.0 / lp[1])).abs() < 1e-15);
        assert!(pa_bound(&[0.5, 0.4], &lp).is_err());
        assert!(pa_bound(&[1.5, -0.5], &lp).is_err());
        let est = pa_bound_estimate(&[Estimate::exact(2.0), Estimate::exact(0.0)], &lp).unwrap();
        assert!((est.mean - 1.0 / lp[0]).abs() < 1e-15);
    }

    #[test]
    fn non_position_instances_are_rejected() {
        let inst =
            AuctionInstance::single_item(vec![DiscreteDistribution::point(1.0).unwrap()]).unwrap();
        assert!(pa_optimal(&inst, &[1.0]).is_err());
        assert!(pa_spm(&inst, 10, SeedTree::new(1)).is_err());
    }
}
