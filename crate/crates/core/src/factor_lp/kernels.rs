//! Scalar kernels appearing in the factor-revealing programs.

use crate::numeric::{ln_factorial, poisson_tail};

/// `f(x) = (1 - e^{-x}) / x`, with `f(0) = 1`.
pub fn kernel_f(x: f64) -> f64 {
    if x < 1e-6 {
        1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `E[min(Y, H)]` for `Y ~ Poisson(x)`.
pub fn truncated_poisson_mean(h: usize, x: f64) -> f64 {
    (1..=h).map(|i| poisson_tail(i, x)).sum()
}

/// `f_H(x) = (H - e^{-x} sum_{i<H} (H - i) x^i / i!) / x = E[min(Poisson(x), H)] / x`,
/// with `f_H(0) = 1`.
pub fn kernel_f_h(h: usize, x: f64) -> f64 {
    if h == 1 {
        return kernel_f(x);
    }
    if x == 0.0 {
        return 1.0;
    }
    truncated_poisson_mean(h, x) / x
}

/// `(1 - y/n)^(n - drop)` computed stably for large `n`.
fn power(n: u64, y: f64, exponent: u64) -> f64 {
    let base = 1.0 - y / n as f64;
    if base <= 0.0 {
        return if exponent == 0 { 1.0 } else { 0.0 };
    }
    if exponent <= 64 {
        base.powi(exponent as i32)
    } else {
        (exponent as f64 * (-y / n as f64).ln_1p()).exp()
    }
}

/// `q_n(y) = (1 - y/n)^n`.
pub fn kernel_q_n(n: u64, y: f64) -> f64 {
    power(n, y, n)
}

/// `r_n(y) = 2 (1 - y/n)^n + y (1 - y/n)^(n-1)`.
pub fn kernel_r_n(n: u64, y: f64) -> f64 {
    2.0 * power(n, y, n) + y * power(n, y, n - 1)
}

/// Limit of `q_n` as `n -> inf`.
pub fn kernel_q_inf(y: f64) -> f64 {
    (-y).exp()
}

/// Limit of `r_n` as `n -> inf`.
pub fn kernel_r_inf(y: f64) -> f64 {
    (2.0 + y) * (-y).exp()
}

/// `1 - (1 - 1/n)^n`, the classical posted-price factor for `n` bidders.
pub fn spm_baseline(n: u64) -> f64 {
    1.0 - kernel_q_n(n, 1.0)
}

/// `H^H / (H! e^H)`, in log space.
pub fn multiunit_gap(h: usize) -> f64 {
    let hf = h as f64;
    (hf * hf.ln() - ln_factorial(h) - hf).exp()
}

/// `1 - H^H / (H! e^H)`, the classical `H`-unit posted-price factor.
pub fn multiunit_baseline(h: usize) -> f64 {
    1.0 - multiunit_gap(h)
}

/// The pair of kernels checked by the inequality harness; swappable so tests can
/// inject a faulty kernel and watch the harness fail.
#[derive(Debug, Clone, Copy)]
pub struct KernelSet {
    pub q: fn(u64, f64) -> f64,
    pub r: fn(u64, f64) -> f64,
}

impl Default for KernelSet {
    fn default() -> Self {
        Self {
            q: kernel_q_n,
            r: kernel_r_n,
        }
    }
}

fn flipped_r(n: u64, y: f64) -> f64 {
    2.0 * kernel_q_n(n, y) - y * power(n, y, n - 1)
}

impl KernelSet {
    /// `r_n` with the sign of its second term flipped.
    pub fn sign_flipped_r() -> Self {
        Self {
            q: kernel_q_n,
            r: flipped_r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_values() {
        assert!((kernel_f(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(kernel_f(0.0), 1.0);
        assert!((kernel_f(1e-7) - kernel_f(2e-6)).abs() < 1e-6);
        for i in 0..10_000 {
            let x = i as f64 * 1e-3;
            assert!(kernel_f(x + 1e-3) < kernel_f(x));
        }
    }

    #[test]
    fn f_h_reduces_and_decreases() {
        assert!((kernel_f_h(1, 1.0) - kernel_f(1.0)).abs() < 1e-15);
        for h in 1..=10 {
            let mut prev = kernel_f_h(h, 0.0);
            for i in 1..=2000 {
                let x = i as f64 * 0.01;
                let cur = kernel_f_h(h, x);
                // f_H is flat to machine precision near zero for larger H.
                assert!(cur <= prev + 1e-15, "H={h} x={x}");
                prev = cur;
            }
            let direct = {
                let hf = h as f64;
                let mut term = 1.0;
                let mut sum = 0.0;
                for i in 0..h {
                    if i > 0 {
                        term *= hf / i as f64;
                    }
                    sum += (hf - i as f64) * term;
                }
                (hf - (-hf).exp() * sum) / hf
            };
            assert!((kernel_f_h(h, h as f64) - direct).abs() < 1e-13);
            assert!((kernel_f_h(h, h as f64) - multiunit_baseline(h)).abs() < 1e-13);
        }
    }

    #[test]
    fn q_and_r_values() {
        assert_eq!(kernel_q_n(2, 1.0), 0.25);
        assert_eq!(kernel_r_n(1, 1.0), 1.0);
        assert_eq!(kernel_r_n(1, 0.25), 1.75);
        for n in 1..=50u64 {
            for i in 0..=1000 {
                let y = i as f64 / 1000.0;
                assert!(kernel_q_n(n, y) <= kernel_q_inf(y) + 1e-15);
            }
        }
        for i in 0..=100 {
            let y = i as f64 / 100.0;
            assert!((kernel_q_n(1_000_000, y) - kernel_q_inf(y)).abs() < 1e-6);
            assert!((kernel_r_n(1_000_000, y) - kernel_r_inf(y)).abs() < 1e-6);
        }
    }

    #[test]
    fn baselines() {
        assert!((spm_baseline(1) - 1.0).abs() < 1e-15);
        assert!((spm_baseline(2) - 0.75).abs() < 1e-15);
        assert!((multiunit_baseline(1) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        // 1 - 2^2 / (2! e^2)
        assert!((multiunit_baseline(2) - (1.0 - 2.0 * (-2.0f64).exp())).abs() < 1e-15);
        assert!(multiunit_baseline(170).is_finite());
    }
}
