//! Finite factor-revealing programs on the grid `s_i = i/k`, `i = 1..=k`.
//!
//! Variable `w_i` is the optimal auction's revenue attributed to prices near
//! `s_i`; the objective `sum w_i` bounds the optimal revenue while the rows
//! normalize the approximate mechanisms' revenue.

use super::kernels::{kernel_q_inf, kernel_q_n, kernel_r_inf, kernel_r_n};
use super::simplex::{solve_lp, LpInstance, LpSolution, LpStatus};
use crate::error::{Error, Result};

fn grid(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64 / k as f64).collect()
}

fn check_args(n: u64, k: usize) -> Result<()> {
    if n == 0 || k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and k >= 2, got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// Posted pricing with `n` bidders: one uniform-price row per `j < k`
/// (`sum_{i>j} w_i j/i <= 1`) and one Myersonian row
/// (`sum_i w_i (1 - q_n(s_i))/s_i <= 1`).
pub fn build_lp_spm_n(n: u64, k: usize) -> Result<LpInstance> {
    check_args(n, k)?;
    let s = grid(k);
    let mut a = Vec::with_capacity(k);
    for j in 1..k {
        a.push(
            (1..=k)
                .map(|i| if i > j { j as f64 / i as f64 } else { 0.0 })
                .collect(),
        );
    }
    a.push(s.iter().map(|&si| (1.0 - kernel_q_n(n, si)) / si).collect());
    LpInstance::new(vec![1.0; k], a, vec![1.0; k])
}

fn build_esp_with(k: usize, q: impl Fn(f64) -> f64, r: impl Fn(f64) -> f64) -> Result<LpInstance> {
    let s = grid(k);
    let below: Vec<f64> = s.iter().map(|&si| (2.0 - r(si)) / si).collect();
    let mut a = Vec::with_capacity(k + 1);
    for j in 0..k {
        let sj = s[j];
        a.push(
            (0..k)
                .map(|i| {
                    if i <= j {
                        below[i]
                    } else {
                        (sj + 1.0 - q(s[i])) / s[i]
                    }
                })
                .collect(),
        );
    }
    a.push(s.iter().map(|&si| (1.0 - q(si)) / si).collect());
    let mut b = vec![2.0; k];
    b.push(1.0);
    LpInstance::new(vec![1.0; k], a, b)
}

/// Eager second price in the large-market limit: `k` mixed rows with
/// right-hand side 2 and one Myersonian row with right-hand side 1.
pub fn build_lp_esp(k: usize) -> Result<LpInstance> {
    check_args(1, k)?;
    build_esp_with(k, kernel_q_inf, kernel_r_inf)
}

/// Eager second price with `n` bidders (`q_n`, `r_n` in place of their limits).
pub fn build_lp_esp_n(n: u64, k: usize) -> Result<LpInstance> {
    check_args(n, k)?;
    build_esp_with(k, |y| kernel_q_n(n, y), |y| kernel_r_n(n, y))
}

/// Solves and returns `(1 / value, solution)`.
pub fn factor_of(lp: &LpInstance) -> Result<(f64, LpSolution)> {
    let sol = solve_lp(lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Invariant(format!(
            "factor LP ended with status {:?}",
            sol.status
        )));
    }
    Ok((1.0 / sol.objective, sol))
}

pub fn lp_spm_n_factor(n: u64, k: usize) -> Result<f64> {
    Ok(factor_of(&build_lp_spm_n(n, k)?)?.0)
}

pub fn lp_esp_factor(k: usize) -> Result<f64> {
    Ok(factor_of(&build_lp_esp(k)?)?.0)
}

pub fn lp_esp_n_factor(n: u64, k: usize) -> Result<f64> {
    Ok(factor_of(&build_lp_esp_n(n, k)?)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spm_rows_have_the_ratio_structure() {
        let lp = build_lp_spm_n(3, 10).unwrap();
        assert_eq!((lp.rows(), lp.cols()), (10, 10));
        for j in 1..10 {
            for i in 1..=10 {
                let want = if i > j { j as f64 / i as f64 } else { 0.0 };
                assert_eq!(lp.a[j - 1][i - 1], want);
            }
        }
        let last = &lp.a[9];
        assert!((last[4] - (1.0 - (1.0f64 - 0.5 / 3.0).powi(3)) / 0.5).abs() < 1e-15);
    }

    #[test]
    fn esp_rows_use_exponential_kernels() {
        let k = 8;
        let lp = build_lp_esp(k).unwrap();
        assert_eq!(lp.rows(), k + 1);
        for i in 1..=k {
            let s = i as f64 / k as f64;
            assert!((lp.a[k][i - 1] - (1.0 - (-s).exp()) / s).abs() < 1e-15);
            let below = (2.0 * (1.0 - (-s).exp()) - s * (-s).exp()) / s;
            assert!((lp.a[k - 1][i - 1] - below).abs() < 1e-14);
        }
        let s1 = 1.0 / k as f64;
        let s3 = 3.0 / k as f64;
        assert!((lp.a[0][2] - (s1 + 1.0 - (-s3).exp()) / s3).abs() < 1e-15);
        assert_eq!(lp.b[0], 2.0);
        assert_eq!(lp.b[k], 1.0);
    }

    #[test]
    fn esp_n_approaches_esp_for_large_n() {
        let a = build_lp_esp(50).unwrap();
        let b = build_lp_esp_n(1_000_000, 50).unwrap();
        for (ra, rb) in a.a.iter().zip(&b.a) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn small_programs_solve() {
        assert!((lp_spm_n_factor(1, 50).unwrap() - 1.0).abs() < 1e-12);
        assert!((lp_esp_n_factor(1, 50).unwrap() - 1.0).abs() < 1e-12);
        assert!((lp_esp_factor(50).unwrap() - 0.660_64).abs() < 1e-4);
        assert!(build_lp_spm_n(0, 10).is_err());
        assert!(build_lp_esp(1).is_err());
    }
}
