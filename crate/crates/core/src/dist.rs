//! Discrete value distributions, virtual values and ironing.
//!
//! A bidder's value is a finite distribution on a strictly increasing support.
//! Virtual values are read off the revenue curve in quantile space: with
//! `q_j = P[V >= v_j]` and `R(q_j) = v_j * q_j` (plus `R(0) = 0`), the virtual
//! value of `v_j` is the slope of `R` between `q_{j+1}` and `q_j`. Ironing
//! replaces `R` by its upper concave envelope.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total probability mass accepted at construction.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Finite value distribution with strictly increasing support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    support: Vec<f64>,
    probs: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
    /// `tail[j] = P[V >= support[j]]`, with a trailing zero.
    #[serde(skip)]
    tail: Vec<f64>,
}

#[derive(Deserialize)]
struct DistributionFile {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl<'de> Deserialize<'de> for DiscreteDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DistributionFile::deserialize(d)?;
        DiscreteDistribution::new(raw.support, raw.probs).map_err(serde::de::Error::custom)
    }
}

impl DiscreteDistribution {
    /// Validates and builds a distribution. Probabilities must be positive and
    /// sum to one within [`MASS_TOLERANCE`]. Sums off by more than rounding
    /// error are renormalized, which keeps a save/load round trip exact.
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::dist("support", "must contain at least one point"));
        }
        if support.len() != probs.len() {
            return Err(Error::dist(
                "probs",
                format!(
                    "length {} does not match support length {}",
                    probs.len(),
                    support.len()
                ),
            ));
        }
        for (j, &v) in support.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::dist(
                    format!("support[{j}]"),
                    format!("{v} is not a finite non-negative value"),
                ));
            }
            if j > 0 && v <= support[j - 1] {
                return Err(Error::dist(
                    format!("support[{j}]"),
                    "support must be strictly increasing",
                ));
            }
        }
        for (j, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::dist(
                    format!("probs[{j}]"),
                    format!("{p} is not a positive probability"),
                ));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::dist(
                "probs",
                format!("probabilities sum to {total}, expected 1"),
            ));
        }
        let probs: Vec<f64> = if (total - 1.0).abs() <= 4.0 * f64::EPSILON * probs.len() as f64 {
            probs
        } else {
            probs.iter().map(|p| p / total).collect()
        };

        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cdf.push(acc);
        }
        *cdf.last_mut().unwrap() = 1.0;

        let mut tail = vec![0.0; probs.len() + 1];
        for j in (0..probs.len()).rev() {
            tail[j] = tail[j + 1] + probs[j];
        }
        tail[0] = 1.0;

        Ok(Self {
            support,
            probs,
            cdf,
            tail,
        })
    }

    /// Point mass at `value`.
    pub fn point(value: f64) -> Result<Self> {
        Self::new(vec![value], vec![1.0])
    }

    /// `m` equally likely midpoints of `[a, b]`, the discretization of the
    /// uniform distribution on `[a, b]`.
    pub fn uniform_grid(a: f64, b: f64, m: usize) -> Result<Self> {
        if m == 0 || !(b > a) || a < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "uniform grid needs 0 <= a < b and m >= 1, got [{a}, {b}], m={m}"
            )));
        }
        let width = (b - a) / m as f64;
        let support = (0..m).map(|j| a + width * (j as f64 + 0.5)).collect();
        Self::new(support, vec![1.0 / m as f64; m])
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: DistributionFile = serde_json::from_str(text).map_err(Error::from_json)?;
        Self::new(raw.support, raw.probs)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        *self.support.last().unwrap()
    }

    /// `P[V <= v]`.
    pub fn cdf(&self, v: f64) -> f64 {
        let k = self.support.partition_point(|&x| x <= v);
        if k == 0 {
            0.0
        } else {
            self.cdf[k - 1]
        }
    }

    /// `P[V >= v]`.
    pub fn survival(&self, v: f64) -> f64 {
        let k = self.support.partition_point(|&x| x < v);
        self.tail[k]
    }

    /// `P[V >= support[j]]`; `j == len()` gives 0.
    pub fn tail_at(&self, j: usize) -> f64 {
        self.tail[j]
    }

    /// Index of `v` in the support, if `v` is a support point.
    /// Index of the support point equal to `v`, up to a relative `1e-9`
    /// (so decimal literals match grid points computed in floating point).
    pub fn index_of(&self, v: f64) -> Option<usize> {
        let tol = 1e-9 * (1.0 + v.abs());
        let k = self.support.partition_point(|&x| x < v - tol);
        (k < self.support.len() && (self.support[k] - v).abs() <= tol).then_some(k)
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| v * p)
            .sum()
    }

    /// Draws a support index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.support.len() - 1)
    }

    /// Draws a value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.support[self.sample_index(rng)]
    }

    /// Discrete virtual values `phi(v_j) = v_j - (1 - F(v_j)) (v_{j+1} - v_j) / p_j`,
    /// with `phi(v_last) = v_last`.
    pub fn raw_virtual_values(&self) -> Vec<(f64, f64)> {
        let m = self.support.len();
        (0..m)
            .map(|j| {
                let v = self.support[j];
                if j + 1 == m {
                    (v, v)
                } else {
                    let gap = self.support[j + 1] - v;
                    (v, v - self.tail[j + 1] * gap / self.probs[j])
                }
            })
            .collect()
    }

    /// Ironed virtual values from the upper concave envelope of the revenue
    /// curve over the quantile grid.
    pub fn iron(&self) -> IronedVirtualFunction {
        let raw = self.raw_virtual_values();
        let m = self.support.len();
        // Revenue-curve points in increasing quantile order. Position 0 is the
        // origin; position t >= 1 is support index m - t.
        let point = |t: usize| -> (f64, f64) {
            if t == 0 {
                (0.0, 0.0)
            } else {
                let j = m - t;
                (self.tail[j], self.support[j] * self.tail[j])
            }
        };
        let mut hull: Vec<usize> = Vec::with_capacity(m + 1);
        for t in 0..=m {
            let (x, y) = point(t);
            while hull.len() >= 2 {
                let (x0, y0) = point(hull[hull.len() - 2]);
                let (x1, y1) = point(hull[hull.len() - 1]);
                // Drop the middle point when it lies on or below the chord.
                let cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(t);
        }

        let mut ironed = vec![0.0; m];
        for edge in hull.windows(2) {
            // Segment between positions t-1 and t carries support index m - t.
            let indices = (edge[0] + 1..=edge[1]).map(|t| m - t);
            if edge[1] - edge[0] == 1 {
                let j = m - edge[1];
                ironed[j] = raw[j].1;
            } else {
                let (mass, weighted) = indices.clone().fold((0.0, 0.0), |(w, s), j| {
                    (w + self.probs[j], s + self.probs[j] * raw[j].1)
                });
                let slope = weighted / mass;
                for j in indices {
                    ironed[j] = slope;
                }
            }
        }
        let monotone = raw.windows(2).all(|w| w[0].1 <= w[1].1);
        IronedVirtualFunction {
            breakpoints: self.support.iter().copied().zip(ironed).collect(),
            regular: monotone,
        }
    }

    /// Revenue-maximizing take-it-or-leave-it price `argmax_v v * P[V >= v]`
    /// over the support, lowest price on ties.
    pub fn monopoly_price(&self) -> (f64, f64) {
        let mut best = (self.support[0], self.support[0] * self.tail[0]);
        for j in 1..self.support.len() {
            let rev = self.support[j] * self.tail[j];
            // Revenues within rounding of each other count as tied.
            if rev > best.1 + 1e-12 * best.1.abs().max(1.0) {
                best = (self.support[j], rev);
            }
        }
        best
    }
}

/// Ironed virtual values, one per support point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IronedVirtualFunction {
    /// `(value, ironed virtual value)` pairs in support order.
    pub breakpoints: Vec<(f64, f64)>,
    /// True when the raw virtual values were already weakly increasing.
    pub regular: bool,
}

impl IronedVirtualFunction {
    pub fn values(&self) -> Vec<f64> {
        self.breakpoints.iter().map(|&(_, phi)| phi).collect()
    }

    pub fn at(&self, j: usize) -> f64 {
        self.breakpoints[j].1
    }

    pub fn is_monotone(&self) -> bool {
        self.breakpoints.windows(2).all(|w| w[0].1 <= w[1].1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::isotonic_increasing;
    use crate::rng::stream_from_seed;
    use proptest::prelude::*;

    fn two_point() -> DiscreteDistribution {
        DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn cdf_is_a_right_continuous_step() {
        let d = two_point();
        assert_eq!(d.cdf(1.0), 0.5);
        assert_eq!(d.cdf(0.999), 0.0);
        assert_eq!(d.cdf(2.0), 1.0);
        assert_eq!(d.cdf(1.5), 0.5);
        assert_eq!(d.survival(1.5), 0.5);
        assert_eq!(d.survival(1.0), 1.0);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(DiscreteDistribution::new(vec![], vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![2.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![-1.0], vec![1.0]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5, 0.4]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 2.0], vec![1.0, 0.0]).is_err());
        let err = DiscreteDistribution::from_json_str(r#"{"support":[1,2],"probs":[0.5,-0.5]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("probs[1]"), "{err}");
        let err = DiscreteDistribution::from_json_str("{\"support\":[1,2],\n\"probs\":[0.5 0.5]}")
            .unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let d = DiscreteDistribution::from_json_str(r#"{"support":[0.5,3],"probs":[0.25,0.75]}"#)
            .unwrap();
        let back = DiscreteDistribution::from_json_str(&d.to_json()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn virtual_values_of_small_distributions() {
        assert_eq!(
            two_point().raw_virtual_values(),
            vec![(1.0, 0.0), (2.0, 2.0)]
        );
        let point = DiscreteDistribution::point(3.5).unwrap();
        assert_eq!(point.raw_virtual_values(), vec![(3.5, 3.5)]);
        assert_eq!(point.iron().breakpoints, vec![(3.5, 3.5)]);
        assert_eq!(
            two_point().iron().breakpoints,
            two_point().raw_virtual_values()
        );
    }

    #[test]
    fn uniform_grid_virtual_values_approach_two_v_minus_one() {
        for &m in &[10usize, 100, 1000] {
            let d = DiscreteDistribution::uniform_grid(0.0, 1.0, m).unwrap();
            let worst = d
                .raw_virtual_values()
                .iter()
                .map(|&(v, phi)| (phi - (2.0 * v - 1.0)).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1.0 / m as f64, "m={m} worst={worst}");
        }
        let d = DiscreteDistribution::uniform_grid(0.0, 2.0, 200).unwrap();
        for (v, phi) in d.raw_virtual_values() {
            assert!((phi - (2.0 * v - 2.0)).abs() <= 2.0 / 200.0);
        }
    }

    #[test]
    fn irons_an_irregular_three_point_distribution() {
        let d = DiscreteDistribution::new(vec![1.0, 2.0, 10.0], vec![0.45, 0.1, 0.45]).unwrap();
        let raw: Vec<f64> = d.raw_virtual_values().iter().map(|p| p.1).collect();
        // q = (1, 0.55, 0.45), R = (1, 1.1, 4.5)
        assert!((raw[0] - (1.0 - 1.1) / 0.45).abs() < 1e-12);
        assert!((raw[1] - (1.1 - 4.5) / 0.1).abs() < 1e-12);
        assert_eq!(raw[2], 10.0);
        assert!(raw[1] < raw[0]);
        let ironed = d.iron();
        assert!(!ironed.regular);
        assert!(ironed.is_monotone());
        // Envelope from (0.45, 4.5) to (1, 1): slope -3.5 / 0.55.
        let pooled = -3.5 / 0.55;
        assert!((ironed.at(0) - pooled).abs() < 1e-12);
        assert!((ironed.at(1) - pooled).abs() < 1e-12);
        assert_eq!(ironed.at(2), 10.0);
    }

    #[test]
    fn monopoly_price_ties_break_low() {
        assert_eq!(two_point().monopoly_price(), (1.0, 1.0));
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let c = DiscreteDistribution::point(4.0).unwrap();
        let mut rng = stream_from_seed(1);
        assert!((0..100).all(|_| c.sample(&mut rng) == 4.0));

        let coin = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let mut rng = stream_from_seed(9);
        let draws = 100_000;
        let mean = (0..draws).map(|_| coin.sample(&mut rng)).sum::<f64>() / draws as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");

        let (mut a, mut b) = (stream_from_seed(5), stream_from_seed(5));
        let d = DiscreteDistribution::uniform_grid(0.0, 1.0, 7).unwrap();
        for _ in 0..50 {
            assert_eq!(d.sample(&mut a), d.sample(&mut b));
        }
    }

    #[test]
    fn empirical_frequencies_converge() {
        let d = DiscreteDistribution::new(vec![1.0, 2.0, 5.0], vec![0.2, 0.5, 0.3]).unwrap();
        let mut rng = stream_from_seed(77);
        let draws = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            counts[d.sample_index(&mut rng)] += 1;
        }
        for (c, &p) in counts.iter().zip(d.probs()) {
            let freq = *c as f64 / draws as f64;
            let band = 5.0 * (p * (1.0 - p) / draws as f64).sqrt();
            assert!((freq - p).abs() <= band, "freq {freq} vs {p}");
        }
    }

    fn arb_distribution() -> impl Strategy<Value = DiscreteDistribution> {
        (1usize..7).prop_flat_map(|m| {
            (
                proptest::collection::btree_set(0u32..60, m),
                proptest::collection::vec(1u32..100, m),
            )
                .prop_filter("distinct support", move |(s, _)| s.len() == m)
                .prop_map(|(s, w)| {
                    let total: u32 = w.iter().sum();
                    let support = s.into_iter().map(|x| x as f64 * 0.5).collect();
                    let probs = w.iter().map(|&x| x as f64 / total as f64).collect();
                    DiscreteDistribution::new(support, probs).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn ironing_is_monotone_and_matches_pooling(d in arb_distribution()) {
            let ironed = d.iron();
            prop_assert!(ironed.is_monotone());
            let raw: Vec<f64> = d.raw_virtual_values().iter().map(|p| p.1).collect();
            let pooled = isotonic_increasing(&raw, d.probs());
            for (a, b) in ironed.values().iter().zip(&pooled) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{} vs {}", a, b);
            }
            if ironed.regular {
                for (a, b) in ironed.values().iter().zip(&raw) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
                }
            }
        }

        #[test]
        fn regular_monopoly_price_is_first_nonnegative_virtual_value(d in arb_distribution()) {
            let ironed = d.iron();
            prop_assume!(ironed.regular);
            let (price, _) = d.monopoly_price();
            let first = ironed.breakpoints.iter().find(|&&(v, phi)| phi >= -1e-9 * (1.0 + v)).map(|&(v, _)| v);
            // The revenue of support points with phi = 0 ties with the next point up;
            // the lowest-price tie-break keeps the first non-negative point.
            prop_assert_eq!(Some(price), first);
        }
    }
}
