//! The revenue-optimal auction on discrete instances.
//!
//! Bidders are ranked by ironed virtual value, and the highest-ranked bidders
//! with non-negative ironed virtual value win, subject to feasibility. Each
//! winner pays its threshold: the smallest support point of its own
//! distribution at which it would still win against the same opponents.
//! Winning at exactly the threshold counts as a win.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::exact::{EnumerationBudget, ProfileSpace};
use crate::instance::{AuctionInstance, Feasibility};
use crate::mechanisms::MechanismOutcome;
use crate::numeric::isotonic_decreasing;
use crate::parallel::{chunked, CHUNK};
use crate::rng::SeedTree;

/// How bidders with equal ironed virtual values are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
    HighestIndex,
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    Units(usize),
    Partition,
    Oracle,
}

/// Precomputed optimal auction for one instance.
#[derive(Debug, Clone)]
pub struct MyersonAuction<'a> {
    instance: &'a AuctionInstance,
    ironed: Vec<Vec<f64>>,
    rule: Rule,
    tie: TieBreak,
}

impl<'a> MyersonAuction<'a> {
    /// Optimal auction under the instance's own constraint. Position auctions
    /// are decomposed into unit layers instead, see [`MyersonAuction::layer`].
    pub fn new(instance: &'a AuctionInstance) -> Result<Self> {
        let rule = match instance.feasibility() {
            Feasibility::KUnit(h) => Rule::Units(*h),
            Feasibility::Partition { .. } => Rule::Partition,
            Feasibility::Matroid(_) => Rule::Oracle,
            Feasibility::Position { .. } => {
                return Err(Error::UnsupportedFeasibility {
                    operation: "optimal allocation",
                    feasibility: "position",
                })
            }
        };
        Ok(Self::build(instance, rule))
    }

    /// The `j`-unit optimal auction on the instance's bidders, whatever the
    /// instance's own constraint.
    pub fn layer(instance: &'a AuctionInstance, j: usize) -> Self {
        Self::build(instance, Rule::Units(j.min(instance.n())))
    }

    fn build(instance: &'a AuctionInstance, rule: Rule) -> Self {
        let ironed = instance
            .bidders()
            .iter()
            .map(|d| d.iron().values())
            .collect();
        Self {
            instance,
            ironed,
            rule,
            tie: TieBreak::default(),
        }
    }

    pub fn with_tie_break(mut self, tie: TieBreak) -> Self {
        self.tie = tie;
        self
    }

    pub fn instance(&self) -> &AuctionInstance {
        self.instance
    }

    /// Ironed virtual value of bidder `i` at support index `j`.
    pub fn ironed(&self, i: usize, j: usize) -> f64 {
        self.ironed[i][j]
    }

    /// Whether bidder `a` outranks bidder `b` at the given support indices.
    fn outranks(&self, a: usize, b: usize, idx: &[usize]) -> bool {
        let (pa, pb) = (self.ironed[a][idx[a]], self.ironed[b][idx[b]]);
        pa > pb
            || (pa == pb
                && match self.tie {
                    TieBreak::LowestIndex => a < b,
                    TieBreak::HighestIndex => a > b,
                })
    }

    /// Winners, in rank order, at a profile of support indices.
    pub fn winners(&self, idx: &[usize]) -> Vec<usize> {
        let mut ranked: Vec<usize> = (0..idx.len())
            .filter(|&i| self.ironed[i][idx[i]] >= 0.0)
            .collect();
        ranked.sort_by(|&a, &b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if self.outranks(a, b, idx) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        match self.rule {
            Rule::Units(h) => {
                ranked.truncate(h);
                ranked
            }
            Rule::Partition | Rule::Oracle => {
                let mut chosen = Vec::new();
                for i in ranked {
                    if self.instance.can_add(&chosen, i) {
                        chosen.push(i);
                    }
                }
                chosen
            }
        }
    }

    /// Whether bidder `i` wins at the profile.
    pub fn wins(&self, idx: &[usize], i: usize) -> bool {
        if self.ironed[i][idx[i]] < 0.0 {
            return false;
        }
        match self.rule {
            Rule::Units(h) => {
                let above = (0..idx.len())
                    .filter(|&k| {
                        k != i && self.ironed[k][idx[k]] >= 0.0 && self.outranks(k, i, idx)
                    })
                    .count();
                above < h
            }
            Rule::Partition => {
                let g = self.instance.group_of(i);
                let cap = match self.instance.feasibility() {
                    Feasibility::Partition { caps, .. } => caps[g],
                    _ => unreachable!("partition rule on a non-partition instance"),
                };
                let above = (0..idx.len())
                    .filter(|&k| {
                        k != i
                            && self.instance.group_of(k) == g
                            && self.ironed[k][idx[k]] >= 0.0
                            && self.outranks(k, i, idx)
                    })
                    .count();
                above < cap
            }
            Rule::Oracle => self.winners(idx).contains(&i),
        }
    }

    /// Support index of bidder `i`'s threshold against the opponents in
    /// `idx` (own entry ignored), or `None` when no support point wins.
    pub fn threshold_index(&self, i: usize, idx: &[usize]) -> Option<usize> {
        let mut probe = idx.to_vec();
        (0..self.instance.bidder(i).len()).find(|&j| {
            probe[i] = j;
            self.wins(&probe, i)
        })
    }

    /// Threshold value of bidder `i`; `+inf` when no support point wins.
    pub fn threshold_at(&self, i: usize, idx: &[usize]) -> f64 {
        self.threshold_index(i, idx)
            .map_or(f64::INFINITY, |j| self.instance.bidder(i).support()[j])
    }

    /// Allocation and threshold payments at a profile of support indices.
    pub fn outcome_at(&self, idx: &[usize]) -> MechanismOutcome {
        let n = idx.len();
        let mut winners = self.winners(idx);
        winners.sort_unstable();
        let mut payments = vec![0.0; n];
        for &i in &winners {
            payments[i] = self.threshold_at(i, idx);
        }
        MechanismOutcome::new("myerson", winners, payments)
    }

    /// Outcome at a profile of values, each of which must be a support point.
    pub fn allocate(&self, values: &[f64]) -> Result<MechanismOutcome> {
        let idx = support_indices(self.instance, values)?;
        Ok(self.outcome_at(&idx))
    }

    /// Threshold of bidder `i` against the opponent values listed in index
    /// order with bidder `i` omitted.
    pub fn threshold(&self, i: usize, opponents: &[f64]) -> Result<f64> {
        let n = self.instance.n();
        if i >= n || opponents.len() + 1 != n {
            return Err(Error::InvalidArgument(format!(
                "threshold of bidder {i} needs {} opponent values, got {}",
                n.saturating_sub(1),
                opponents.len()
            )));
        }
        let mut idx = vec![0; n];
        for (pos, &v) in opponents.iter().enumerate() {
            let k = if pos < i { pos } else { pos + 1 };
            idx[k] = self
                .instance
                .bidder(k)
                .index_of(v)
                .ok_or(Error::ValueNotInSupport {
                    bidder: k,
                    value: v,
                })?;
        }
        Ok(self.threshold_at(i, &idx))
    }

    /// Draws fresh opponents for every bidder independently and records each
    /// bidder's threshold against its own fresh opponents.
    pub fn resample_thresholds<R: Rng + ?Sized>(&self, rng: &mut R) -> ThresholdSample {
        let n = self.instance.n();
        let mut thresholds = Vec::with_capacity(n);
        let mut opponents = Vec::with_capacity(n);
        let mut idx = vec![0usize; n];
        for i in 0..n {
            let mut others = Vec::with_capacity(n - 1);
            for k in (0..n).filter(|&k| k != i) {
                let d = self.instance.bidder(k);
                idx[k] = d.sample_index(rng);
                others.push(d.support()[idx[k]]);
            }
            thresholds.push(self.threshold_at(i, &idx));
            opponents.push(others);
        }
        ThresholdSample {
            thresholds,
            opponents,
        }
    }
}

pub(crate) fn support_indices(instance: &AuctionInstance, values: &[f64]) -> Result<Vec<usize>> {
    if values.len() != instance.n() {
        return Err(Error::InvalidArgument(format!(
            "profile has {} values for {} bidders",
            values.len(),
            instance.n()
        )));
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            instance
                .bidder(i)
                .index_of(v)
                .ok_or(Error::ValueNotInSupport {
                    bidder: i,
                    value: v,
                })
        })
        .collect()
}

/// Optimal-auction outcome at a value profile.
pub fn myerson_allocate(instance: &AuctionInstance, values: &[f64]) -> Result<MechanismOutcome> {
    MyersonAuction::new(instance)?.allocate(values)
}

/// Threshold of bidder `i` against `opponents` (values of the other bidders in
/// index order).
pub fn threshold(instance: &AuctionInstance, i: usize, opponents: &[f64]) -> Result<f64> {
    MyersonAuction::new(instance)?.threshold(i, opponents)
}

/// One draw of independently resampled thresholds.
pub fn resample_thresholds<R: Rng + ?Sized>(
    instance: &AuctionInstance,
    rng: &mut R,
) -> Result<ThresholdSample> {
    Ok(MyersonAuction::new(instance)?.resample_thresholds(rng))
}

/// Per-bidder thresholds, each computed against its own freshly drawn
/// opponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSample {
    /// `t'_i`; `+inf` when bidder `i` cannot win against its sample.
    pub thresholds: Vec<f64>,
    /// For bidder `i`, the sampled values of the other bidders in index order.
    pub opponents: Vec<Vec<f64>>,
}

/// How an s-curve was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Provenance {
    Exact,
    /// Monte-Carlo estimate; `raw` holds the estimate before the monotone
    /// projection.
    MonteCarlo {
        samples: u64,
        raw: Vec<f64>,
    },
}

/// `tau -> s(tau)`: expected number of winners paying at least `tau`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SCurve {
    pub grid: Vec<f64>,
    pub s: Vec<f64>,
    pub provenance: Provenance,
}

impl SCurve {
    /// Integral of the step function that equals `s[k]` on `(grid[k-1], grid[k]]`.
    /// Exact for curves whose grid contains every payment value and starts at 0.
    pub fn step_integral(&self) -> f64 {
        let mut total = 0.0;
        let mut prev = 0.0;
        for (&tau, &s) in self.grid.iter().zip(&self.s) {
            total += (tau - prev) * s;
            prev = tau;
        }
        total
    }

    pub fn is_decreasing(&self) -> bool {
        self.s.windows(2).all(|w| w[1] <= w[0])
    }

    /// Value at `tau` by the left-continuous step convention.
    pub fn eval(&self, tau: f64) -> f64 {
        let k = self.grid.partition_point(|&g| g < tau);
        self.s.get(k).copied().unwrap_or(0.0)
    }

    pub fn to_csv(&self) -> String {
        let tag = match &self.provenance {
            Provenance::Exact => "exact".to_string(),
            Provenance::MonteCarlo { samples, .. } => format!("monte-carlo:{samples}"),
        };
        let mut out = String::from("tau,s,provenance\n");
        for (tau, s) in self.grid.iter().zip(&self.s) {
            let _ = writeln!(out, "{tau},{s},{tag}");
        }
        out
    }
}

/// Exact s-curve and optimal revenue by full profile enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSCurve {
    pub curve: SCurve,
    /// Expected optimal revenue.
    pub opt: f64,
    /// Expected number of winners.
    pub expected_winners: f64,
}

/// Exact s-curve. With `grid = None` the grid is 0 plus every payment value
/// that occurs with positive probability.
pub fn exact_s_curve(
    instance: &AuctionInstance,
    grid: Option<&[f64]>,
    budget: EnumerationBudget,
) -> Result<ExactSCurve> {
    let auction = MyersonAuction::new(instance)?;
    let space = ProfileSpace::new(instance, budget)?;
    // Payments with their probability mass, summed over bidders.
    let parts = chunked(space.len(), CHUNK, |range| {
        let mut idx = vec![0; instance.n()];
        let mut pays: Vec<(f64, f64)> = Vec::new();
        let mut opt = 0.0;
        let mut winners = 0.0;
        for p in range {
            let prob = space.decode(p, &mut idx);
            let out = auction.outcome_at(&idx);
            for &w in &out.winners {
                pays.push((out.payments[w], prob));
            }
            opt += prob * out.revenue;
            winners += prob * out.winners.len() as f64;
        }
        (pays, opt, winners)
    });
    let mut pays = Vec::new();
    let (mut opt, mut expected_winners) = (0.0, 0.0);
    for (p, o, w) in parts {
        pays.extend(p);
        opt += o;
        expected_winners += w;
    }
    pays.sort_by(|a, b| a.0.total_cmp(&b.0));
    let grid: Vec<f64> = match grid {
        Some(g) => g.to_vec(),
        None => {
            let mut g = vec![0.0];
            for &(pay, _) in &pays {
                if pay > *g.last().unwrap() {
                    g.push(pay);
                }
            }
            g
        }
    };
    // Suffix masses over the sorted payments.
    let mut suffix = vec![0.0; pays.len() + 1];
    for k in (0..pays.len()).rev() {
        suffix[k] = suffix[k + 1] + pays[k].1;
    }
    let s = grid
        .iter()
        .map(|&tau| suffix[pays.partition_point(|&(pay, _)| pay < tau)])
        .collect();
    Ok(ExactSCurve {
        curve: SCurve {
            grid,
            s,
            provenance: Provenance::Exact,
        },
        opt,
        expected_winners,
    })
}

/// Monte-Carlo s-curve on a given increasing grid, projected onto weakly
/// decreasing sequences.
pub fn mc_s_curve(
    instance: &AuctionInstance,
    grid: &[f64],
    samples: u64,
    seeds: SeedTree,
) -> Result<SCurve> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample is required".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "s-curve grid must be strictly increasing".into(),
        ));
    }
    let auction = MyersonAuction::new(instance)?;
    let g = grid.len();
    let counts = chunked(samples, CHUNK, |range| {
        // counts[k] = number of payments in [grid[k], grid[k+1])
        let mut bucket = vec![0u64; g + 1];
        let mut idx = vec![0; instance.n()];
        for t in range {
            let mut rng = seeds.stream(t);
            for (i, slot) in idx.iter_mut().enumerate() {
                *slot = instance.bidder(i).sample_index(&mut rng);
            }
            let out = auction.outcome_at(&idx);
            for &w in &out.winners {
                bucket[grid.partition_point(|&tau| tau <= out.payments[w])] += 1;
            }
        }
        bucket
    })
    .into_iter()
    .fold(vec![0u64; g + 1], |mut acc, b| {
        acc.iter_mut().zip(b).for_each(|(a, x)| *a += x);
        acc
    });
    // A payment in bucket b (>= 1) satisfies pay >= grid[k] for all k < b.
    let mut raw = vec![0.0; g];
    let mut running = 0u64;
    for k in (0..g).rev() {
        running += counts[k + 1];
        raw[k] = running as f64 / samples as f64;
    }
    let s = isotonic_decreasing(&raw, &vec![1.0; g]);
    Ok(SCurve {
        grid: grid.to_vec(),
        s,
        provenance: Provenance::MonteCarlo { samples, raw },
    })
}

/// Exact marginal distribution of bidder `i`'s threshold, as
/// `(support index or None, probability)` pairs.
pub fn exact_threshold_marginal(
    auction: &MyersonAuction<'_>,
    i: usize,
    budget: EnumerationBudget,
) -> Result<Vec<(Option<usize>, f64)>> {
    let instance = auction.instance();
    let space = ProfileSpace::without(instance, i, budget)?;
    let m = instance.bidder(i).len();
    let mut mass = vec![0.0; m + 1];
    let mut idx = vec![0; instance.n()];
    for p in 0..space.len() {
        let prob = space.decode(p, &mut idx);
        match auction.threshold_index(i, &idx) {
            Some(j) => mass[j] += prob,
            None => mass[m] += prob,
        }
    }
    Ok(mass
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > 0.0)
        .map(|(j, p)| ((j < m).then_some(j), p))
        .collect())
}

/// Revenue of a single bidder facing a take-it-or-leave-it price.
pub fn posted_revenue(d: &DiscreteDistribution, price: f64) -> f64 {
    price * d.survival(price)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;

    fn coin() -> DiscreteDistribution {
        DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap()
    }

    fn uniform_pair(m: usize) -> AuctionInstance {
        AuctionInstance::single_item(vec![
            DiscreteDistribution::uniform_grid(0.0, 1.0, m).unwrap(),
            DiscreteDistribution::uniform_grid(0.0, 2.0, m).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_bidder_pays_the_monopoly_price() {
        let inst = AuctionInstance::single_item(vec![coin()]).unwrap();
        let out = myerson_allocate(&inst, &[2.0]).unwrap();
        assert_eq!(out.winners, vec![0]);
        assert_eq!(out.payments, vec![1.0]);
        assert_eq!(threshold(&inst, 0, &[]).unwrap(), 1.0);
        let s = exact_s_curve(&inst, None, EnumerationBudget::default()).unwrap();
        assert_eq!(s.curve.grid, vec![0.0, 1.0]);
        assert_eq!(s.curve.s, vec![1.0, 1.0]);
        assert_eq!(s.opt, 1.0);
        assert_eq!(s.curve.eval(1.5), 0.0);
    }

    #[test]
    fn negative_virtual_values_leave_the_item_unsold() {
        // phi(1) = 1 - 0.5 * 9 / 0.5 < 0 for both bidders
        let d = DiscreteDistribution::new(vec![1.0, 10.0], vec![0.5, 0.5]).unwrap();
        let inst = AuctionInstance::single_item(vec![d.clone(), d]).unwrap();
        let out = myerson_allocate(&inst, &[1.0, 1.0]).unwrap();
        assert!(out.winners.is_empty());
        assert_eq!(out.revenue, 0.0);
    }

    #[test]
    fn uniform_pair_allocation_and_thresholds() {
        let m = 20;
        let inst = uniform_pair(m);
        // phi_1(0.825) ~ 0.65 beats phi_2(1.05) ~ 0.1
        let out = myerson_allocate(&inst, &[0.825, 1.05]).unwrap();
        assert_eq!(out.winners, vec![0]);
        let auction = MyersonAuction::new(&inst).unwrap();
        for &v2 in inst.bidder(1).support() {
            let t = auction.threshold(0, &[v2]).unwrap();
            let expected = f64::max(0.5, v2 - 0.5);
            if expected > 1.0 {
                assert_eq!(t, f64::INFINITY, "v2={v2}");
                continue;
            }
            assert!(
                (t - expected).abs() <= 1.0 / m as f64,
                "v2={v2}: {t} vs {expected}"
            );
        }
        for &v1 in inst.bidder(0).support() {
            let t = auction.threshold(1, &[v1]).unwrap();
            let expected = f64::max(1.0, v1 + 0.5);
            assert!(
                (t - expected).abs() <= 2.0 / m as f64,
                "v1={v1}: {t} vs {expected}"
            );
        }
    }

    #[test]
    fn winners_are_exactly_those_at_or_above_threshold() {
        let d = DiscreteDistribution::new(vec![1.0, 2.0, 10.0], vec![0.45, 0.1, 0.45]).unwrap();
        let inst = AuctionInstance::k_unit(vec![d, coin(), coin()], 2).unwrap();
        let auction = MyersonAuction::new(&inst).unwrap();
        let space = ProfileSpace::new(&inst, EnumerationBudget::default()).unwrap();
        let mut idx = vec![0; 3];
        for p in 0..space.len() {
            space.decode(p, &mut idx);
            let out = auction.outcome_at(&idx);
            assert!(out.winners.len() <= 2);
            for i in 0..3 {
                let t = auction.threshold_at(i, &idx);
                let v = inst.bidder(i).support()[idx[i]];
                assert_eq!(
                    out.winners.contains(&i),
                    v >= t,
                    "profile {idx:?} bidder {i}"
                );
                if out.winners.contains(&i) {
                    assert_eq!(out.payments[i], t);
                }
            }
        }
    }

    #[test]
    fn raising_an_opponent_never_helps() {
        let inst = uniform_pair(6)
            .with_feasibility(Feasibility::KUnit(1))
            .unwrap();
        let auction = MyersonAuction::new(&inst).unwrap();
        let supp = inst.bidder(1).support().to_vec();
        for w in supp.windows(2) {
            let lo = auction.threshold(0, &[w[0]]).unwrap();
            let hi = auction.threshold(0, &[w[1]]).unwrap();
            assert!(hi >= lo);
        }
    }

    #[test]
    fn opt_equals_step_integral_and_is_tie_break_invariant() {
        let d = DiscreteDistribution::new(vec![1.0, 2.0, 10.0], vec![0.45, 0.1, 0.45]).unwrap();
        for h in 1..=2 {
            let inst = AuctionInstance::k_unit(vec![d.clone(), d.clone(), coin()], h).unwrap();
            let exact = exact_s_curve(&inst, None, EnumerationBudget::default()).unwrap();
            assert!((exact.opt - exact.curve.step_integral()).abs() < 1e-9);
            assert!(exact.curve.is_decreasing());
            assert!((exact.curve.s[0] - exact.expected_winners).abs() < 1e-12);
            assert!(exact.curve.s[0] <= h as f64 + 1e-12);

            let reversed = MyersonAuction::new(&inst)
                .unwrap()
                .with_tie_break(TieBreak::HighestIndex);
            let space = ProfileSpace::new(&inst, EnumerationBudget::default()).unwrap();
            let mut idx = vec![0; 3];
            let mut other = 0.0;
            for p in 0..space.len() {
                let prob = space.decode(p, &mut idx);
                other += prob * reversed.outcome_at(&idx).revenue;
            }
            assert!(
                (other - exact.opt).abs() < 1e-12,
                "H={h}: {other} vs {}",
                exact.opt
            );
        }
    }

    #[test]
    fn two_iid_coins() {
        // phi = (0, 2) for both. Bidder 0 wins ties, so it pays 1 at (1,1) and
        // (2,1); the other profiles sell at 2.
        let inst = AuctionInstance::single_item(vec![coin(), coin()]).unwrap();
        let exact = exact_s_curve(&inst, None, EnumerationBudget::default()).unwrap();
        assert!((exact.opt - 1.5).abs() < 1e-15);
    }

    #[test]
    fn resampling_is_deterministic_and_trivial_for_one_bidder() {
        let single = AuctionInstance::single_item(vec![coin()]).unwrap();
        let mut rng = stream_from_seed(3);
        for _ in 0..10 {
            assert_eq!(
                resample_thresholds(&single, &mut rng).unwrap().thresholds,
                vec![1.0]
            );
        }
        let inst = uniform_pair(5);
        let a = resample_thresholds(&inst, &mut stream_from_seed(11)).unwrap();
        let b = resample_thresholds(&inst, &mut stream_from_seed(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.opponents[0].len(), 1);
    }

    fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let mut points: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
            .iter()
            .map(|&x| {
                let fa = a.partition_point(|&v| v <= x) as f64 / a.len() as f64;
                let fb = b.partition_point(|&v| v <= x) as f64 / b.len() as f64;
                (fa - fb).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn resampled_thresholds_match_the_threshold_marginal() {
        let d = DiscreteDistribution::uniform_grid(0.0, 1.0, 6).unwrap();
        let inst = AuctionInstance::single_item(vec![d.clone(), d.clone(), d]).unwrap();
        let auction = MyersonAuction::new(&inst).unwrap();
        let draws = 10_000;
        let mut rng = stream_from_seed(21);
        let mut resampled: Vec<f64> = Vec::new();
        let mut direct: Vec<f64> = Vec::new();
        let mut idx = vec![0; 3];
        for _ in 0..draws {
            resampled.push(auction.resample_thresholds(&mut rng).thresholds[0].min(1e9));
            for (i, slot) in idx.iter_mut().enumerate() {
                *slot = inst.bidder(i).sample_index(&mut rng);
            }
            direct.push(auction.threshold_at(0, &idx).min(1e9));
        }
        let stat = ks_statistic(&mut resampled, &mut direct);
        // two-sample critical value at alpha = 0.01
        let crit = 1.628 * (2.0 / draws as f64).sqrt();
        assert!(stat < crit, "KS {stat} >= {crit}");
    }

    #[test]
    fn monte_carlo_s_curve_agrees_with_exact() {
        let d = DiscreteDistribution::new(vec![1.0, 2.0, 4.0], vec![0.3, 0.4, 0.3]).unwrap();
        let e = DiscreteDistribution::new(vec![0.5, 1.5, 3.0], vec![0.5, 0.25, 0.25]).unwrap();
        let inst = AuctionInstance::single_item(vec![d.clone(), e, d]).unwrap();
        let exact = exact_s_curve(&inst, None, EnumerationBudget::default()).unwrap();
        let samples = 100_000;
        let mc = mc_s_curve(&inst, &exact.curve.grid, samples, SeedTree::new(5)).unwrap();
        let Provenance::MonteCarlo { raw, .. } = &mc.provenance else {
            panic!()
        };
        for ((&s, &r), &t) in exact.curve.s.iter().zip(raw).zip(&exact.curve.grid) {
            let sigma = (s * (1.0 - s) / samples as f64).sqrt();
            assert!((r - s).abs() <= 3.0 * sigma + 1e-12, "tau={t}: {r} vs {s}");
        }
        assert!(mc.is_decreasing());
        let beyond = mc_s_curve(&inst, &[100.0], 1000, SeedTree::new(1)).unwrap();
        assert_eq!(beyond.s, vec![0.0]);
        let csv = mc.to_csv();
        assert!(csv.starts_with("tau,s,provenance\n"));
    }

    #[test]
    fn isotonic_projection_keeps_decreasing_estimates() {
        let dec = vec![2.0, 1.5, 1.5, 0.25];
        assert_eq!(isotonic_decreasing(&dec, &[1.0; 4]), dec);
    }

    #[test]
    fn rejects_values_outside_the_support_and_positions() {
        let inst = AuctionInstance::single_item(vec![coin()]).unwrap();
        assert!(matches!(
            myerson_allocate(&inst, &[1.5]),
            Err(Error::ValueNotInSupport { .. })
        ));
        let pa = AuctionInstance::new(vec![coin()], Feasibility::Position { alphas: vec![1.0] })
            .unwrap();
        assert!(matches!(
            myerson_allocate(&pa, &[1.0]),
            Err(Error::UnsupportedFeasibility { .. })
        ));
    }
}
