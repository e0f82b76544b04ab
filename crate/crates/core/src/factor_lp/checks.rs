//! Numerical harness for the inequalities the factor programs rely on.
//!
//! Two families are checked. Monotonicity: `y -> (x + 1 - q_n(y))/y`,
//! `y -> (2 - r_n(y))/y`, their large-`n` limits, and `x -> f_H(x)` are weakly
//! decreasing. Extremality: with `Z` a sum of independent Bernoulli(`s_i`)
//! variables and `sum s_i` fixed, both `E[(H - Z)^+]` and
//! `2 P[Z=0] + P[Z=1]` are largest when all `s_i` are equal, where the latter
//! equals `r_n(sum s_i)`.

use rand::Rng;
use serde::Serialize;

use super::kernels::{kernel_f_h, kernel_q_inf, kernel_r_inf, KernelSet};
use crate::numeric::poisson_binomial_pmf;

/// Points `1/m, 2/m, ..., 1` used for the `y` grids.
pub const Y_GRID: usize = 1000;
/// Allowed increase between consecutive grid values, for rounding.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneWitness {
    pub function: String,
    pub n: Option<u64>,
    pub x: Option<f64>,
    pub y: f64,
    pub increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub grid_points: usize,
    pub violations: Vec<MonotoneWitness>,
}

impl MonotoneReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn scan(
    report: &mut MonotoneReport,
    name: &str,
    n: Option<u64>,
    x: Option<f64>,
    grid: impl Iterator<Item = f64>,
    g: impl Fn(f64) -> f64,
) {
    let mut prev: Option<f64> = None;
    for y in grid {
        let v = g(y);
        report.grid_points += 1;
        if let Some(p) = prev {
            if !(v <= p + MONOTONE_SLACK) {
                report.violations.push(MonotoneWitness {
                    function: name.into(),
                    n,
                    x,
                    y,
                    increase: v - p,
                });
                return;
            }
        }
        prev = Some(v);
    }
}

/// Grid check of every monotonicity property for `n` in `1..=n_max`.
pub fn monotone_kernel_check(n_max: u64, kernels: KernelSet) -> MonotoneReport {
    let mut report = MonotoneReport {
        grid_points: 0,
        violations: Vec::new(),
    };
    let ys = || (1..=Y_GRID).map(|i| i as f64 / Y_GRID as f64);
    let xs: Vec<f64> = (0..=4).map(|i| i as f64 * 0.25).collect();
    for n in 1..=n_max {
        for &x in &xs {
            scan(&mut report, "(x+1-q_n(y))/y", Some(n), Some(x), ys(), |y| {
                (x + 1.0 - (kernels.q)(n, y)) / y
            });
        }
        scan(&mut report, "(2-r_n(y))/y", Some(n), None, ys(), |y| {
            (2.0 - (kernels.r)(n, y)) / y
        });
    }
    for &x in &xs {
        scan(&mut report, "(x+1-e^-y)/y", None, Some(x), ys(), |y| {
            (x + 1.0 - kernel_q_inf(y)) / y
        });
    }
    scan(&mut report, "(2-(2+y)e^-y)/y", None, None, ys(), |y| {
        (2.0 - kernel_r_inf(y)) / y
    });
    for h in 1..=10u64 {
        scan(
            &mut report,
            "f_H(x)",
            Some(h),
            None,
            (0..=2000).map(|i| i as f64 * 0.01),
            |x| kernel_f_h(h as usize, x),
        );
    }
    report
}

/// `E[(H - Z)^+] = sum_{i<H} (H - i) P[Z = i]`.
pub fn truncation_polynomial(s: &[f64], h: usize) -> f64 {
    let pmf = poisson_binomial_pmf(s);
    (0..h.min(pmf.len())).map(|i| (h - i) as f64 * pmf[i]).sum()
}

/// `2 P[Z = 0] + P[Z = 1]`.
pub fn esp_polynomial(s: &[f64]) -> f64 {
    let pmf = poisson_binomial_pmf(s);
    2.0 * pmf[0] + pmf.get(1).copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub units: usize,
    pub s_total: f64,
    pub trials: usize,
    pub equal_value: f64,
    pub max_random: f64,
    pub esp_equal_value: f64,
    pub esp_max_random: f64,
    /// `|esp_polynomial(equal point) - r_n(s_total)|`.
    pub esp_identity_error: f64,
    /// A point violating a checked property: one beating the equal point, or
    /// the equal point itself when the identity with `r_n` fails.
    pub witness: Option<Vec<f64>>,
}

impl ExtremalReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// A random point of `{s in [0,1]^n : sum s = s_total}`, reached from the
/// equal point by random mass transfers between coordinates.
pub fn random_simplex_point<R: Rng + ?Sized>(n: usize, s_total: f64, rng: &mut R) -> Vec<f64> {
    let mut s = vec![s_total / n as f64; n];
    if n < 2 {
        return s;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let lo = -(s[i].min(1.0 - s[j]));
        let hi = (1.0 - s[i]).min(s[j]);
        if hi > lo {
            let d = rng.gen_range(lo..=hi);
            s[i] = (s[i] + d).clamp(0.0, 1.0);
            s[j] = (s[j] - d).clamp(0.0, 1.0);
        }
    }
    s
}

/// Compares the equal point against `trials` random points with the same
/// total. Slack for rounding is 1e-12.
pub fn polynomial_extremal_check<R: Rng + ?Sized>(
    n: usize,
    h: usize,
    s_total: f64,
    trials: usize,
    rng: &mut R,
    kernels: KernelSet,
) -> ExtremalReport {
    let equal = vec![s_total / n as f64; n];
    let equal_value = truncation_polynomial(&equal, h);
    let esp_equal_value = esp_polynomial(&equal);
    let esp_identity_error = (esp_equal_value - (kernels.r)(n as u64, s_total)).abs();
    let mut report = ExtremalReport {
        n,
        units: h,
        s_total,
        trials,
        equal_value,
        max_random: f64::NEG_INFINITY,
        esp_equal_value,
        esp_max_random: f64::NEG_INFINITY,
        esp_identity_error,
        witness: (esp_identity_error > 1e-12).then(|| equal.clone()),
    };
    for _ in 0..trials {
        let s = random_simplex_point(n, s_total, rng);
        let p = truncation_polynomial(&s, h);
        let e = esp_polynomial(&s);
        report.max_random = report.max_random.max(p);
        report.esp_max_random = report.esp_max_random.max(e);
        if report.witness.is_none() && (p > equal_value + 1e-12 || e > esp_equal_value + 1e-12) {
            report.witness = Some(s);
        }
    }
    report
}
