//! Closed-form continuous programs, solved by quadrature and root finding.
//!
//! For `H` units the continuous program's optimum is attained by a solution
//! whose shape is `min(H, 1/tau)`-like up to a cutoff `tau*`, where `tau*`
//! solves
//!
//! ```text
//! integral_{1/H}^{tau*} E[min(Poisson(1/t), H)] dt = H^H / (H! e^H)
//! ```
//!
//! and the program's value is `1 + ln(H tau*)`. For one unit the integrand is
//! `1 - e^{-1/t}` and the right-hand side `1/e`.

use serde::Serialize;

use super::kernels::{multiunit_baseline, multiunit_gap, truncated_poisson_mean};
use crate::error::{Error, Result};
use crate::numeric::{bisect, integrate, newton};

/// Absolute tolerance of each quadrature.
pub const QUAD_TOL: f64 = 1e-12;
/// Bracket width at which bisection stops.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuousSolution {
    pub units: usize,
    pub tau_star: f64,
    /// Root found independently by Newton's method.
    pub tau_star_newton: f64,
    pub lp_value: f64,
    pub factor: f64,
    /// `1 - H^H/(H! e^H)`.
    pub baseline: f64,
}

fn integrand(h: usize, t: f64) -> f64 {
    truncated_poisson_mean(h, 1.0 / t)
}

/// Solves the `H`-unit continuous program, `1 <= H <= 170`.
pub fn solve_lp_spm_h(h: usize) -> Result<ContinuousSolution> {
    if h == 0 || h > 170 {
        return Err(Error::InvalidArgument(format!(
            "number of units must be in 1..=170, got {h}"
        )));
    }
    let lo = 1.0 / h as f64;
    let target = multiunit_gap(h);
    let residual = |tau: f64| integrate(|t| integrand(h, t), lo, tau, QUAD_TOL) - target;
    // The integrand is at least 1/t for large t, so the integral diverges
    // and a bracket exists.
    let mut hi = 2.0 * lo;
    while residual(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Invariant(
                "no bracket found for the cutoff equation".into(),
            ));
        }
    }
    let tau_star = bisect(residual, lo, hi, ROOT_TOL)?;
    let tau_star_newton = newton(
        residual,
        |t| integrand(h, t),
        0.5 * (lo + hi),
        lo,
        hi,
        1e-14,
    )?;
    let lp_value = 1.0 + (h as f64 * tau_star).ln();
    let factor = 1.0 / lp_value;
    let baseline = multiunit_baseline(h);
    if factor <= baseline {
        return Err(Error::Invariant(format!(
            "H={h}: factor {factor} does not exceed the baseline {baseline}"
        )));
    }
    Ok(ContinuousSolution {
        units: h,
        tau_star,
        tau_star_newton,
        lp_value,
        factor,
        baseline,
    })
}

/// Solves the single-unit continuous program.
pub fn solve_lp_spm_continuous() -> Result<ContinuousSolution> {
    solve_lp_spm_h(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_cutoff() {
        let s = solve_lp_spm_continuous().unwrap();
        assert!((s.tau_star - 1.695_715_5).abs() < 1e-6, "{}", s.tau_star);
        assert!((s.lp_value - 1.528_104_8).abs() < 1e-6, "{}", s.lp_value);
        assert!((s.factor - 0.654_405_4).abs() < 1e-6, "{}", s.factor);
        assert!((s.tau_star - s.tau_star_newton).abs() < 1e-9);
    }

    #[test]
    fn single_unit_matches_explicit_integrand() {
        let s = solve_lp_spm_continuous().unwrap();
        let lhs =
            (1.0 - (-1.0f64).exp()) + integrate(|t| 1.0 - (-1.0 / t).exp(), 1.0, s.tau_star, 1e-12);
        assert!((lhs - 1.0).abs() < 1e-10);
    }

    #[test]
    fn multi_unit_factors_beat_the_baseline() {
        let expected = [
            0.654_405_4,
            0.742_562_1,
            0.785_405_7,
            0.811_994_4,
            0.830_569_5,
            0.844_497_0,
            0.855_444_7,
            0.864_345_9,
            0.871_769_6,
            0.878_085_2,
        ];
        for (h, &want) in (1..=10).zip(&expected) {
            let s = solve_lp_spm_h(h).unwrap();
            assert!((s.factor - want).abs() < 1e-6, "H={h}: {}", s.factor);
            assert!(s.factor > s.baseline);
            assert!((s.tau_star - s.tau_star_newton).abs() < 1e-9);
        }
        assert!(solve_lp_spm_h(0).is_err());
        assert!(solve_lp_spm_h(171).is_err());
    }
}
