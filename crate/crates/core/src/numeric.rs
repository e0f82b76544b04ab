//! Small numerical toolbox: adaptive quadrature, scalar root finding,
//! isotonic projection and Poisson-binomial / Poisson tail probabilities.

use crate::error::{Error, Result};

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed nodes (1, 3, 5) and the center.
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = K15_WEIGHTS[7] * fc;
    let mut gauss = G7_WEIGHTS[3] * fc;
    for (j, &node) in GK_NODES.iter().enumerate().take(7) {
        let dx = half * node;
        let pair = f(center - dx) + f(center + dx);
        kronrod += K15_WEIGHTS[j] * pair;
        if j % 2 == 1 {
            gauss += G7_WEIGHTS[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` to absolute
/// tolerance `tol`. Intervals are bisected until the embedded error estimate
/// of every leaf is below its share of the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -integrate(f, b, a, tol);
    }
    let total_len = b - a;
    let mut stack = vec![(a, b, 0usize)];
    let mut sum = 0.0;
    let mut compensation = 0.0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(&f, lo, hi);
        let share = tol * (hi - lo) / total_len;
        if err <= share.max(f64::EPSILON * value.abs()) || depth >= 48 {
            let y = value - compensation;
            let t = sum + y;
            compensation = (t - sum) - y;
            sum = t;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    sum
}

/// Bisection on a bracket `[lo, hi]` with `g(lo)` and `g(hi)` of opposite
/// sign. Stops once the bracket is narrower than `tol`.
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::InvalidArgument(format!(
            "bisection bracket [{lo}, {hi}] does not straddle a root"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration from `x0`, safeguarded to stay inside `[lo, hi]`.
pub fn newton<G, D>(g: G, dg: D, x0: f64, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0;
    for _ in 0..100 {
        let slope = dg(x);
        if slope == 0.0 || !slope.is_finite() {
            return Err(Error::InvalidArgument(format!("zero derivative at {x}")));
        }
        let step = g(x) / slope;
        let mut next = x - step;
        if next <= lo || next >= hi {
            next = if next <= lo {
                0.5 * (x + lo)
            } else {
                0.5 * (x + hi)
            };
        }
        if (next - x).abs() <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::InvalidArgument(
        "newton iteration did not converge".into(),
    ))
}

/// Weighted least-squares projection onto weakly decreasing sequences
/// (pool-adjacent-violators).
pub fn isotonic_decreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    isotonic_increasing(&negated, weights)
        .into_iter()
        .map(|v| -v)
        .collect()
}

/// Weighted least-squares projection onto weakly increasing sequences.
pub fn isotonic_increasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // (weighted sum, weight, count) blocks
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v * w, w, 1));
        while blocks.len() > 1 {
            let (s1, w1, _) = blocks[blocks.len() - 1];
            let (s0, w0, _) = blocks[blocks.len() - 2];
            if s0 / w0 > s1 / w1 {
                let (_, _, c1) = blocks.pop().unwrap();
                let last = blocks.last_mut().unwrap();
                last.0 += s1;
                last.1 += w1;
                last.2 += c1;
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (s, w, c) in blocks {
        out.extend(std::iter::repeat_n(s / w, c));
    }
    out
}

/// Probability mass function of a sum of independent Bernoulli variables
/// with success probabilities `probs`. Entry `i` is `P[Z = i]`.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (done, &p) in probs.iter().enumerate() {
        for i in (1..=done + 1).rev() {
            pmf[i] = pmf[i] * (1.0 - p) + pmf[i - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// `E[min(Z, cap)]` for a Poisson-binomial `Z`.
pub fn truncated_mean(probs: &[f64], cap: usize) -> f64 {
    let pmf = poisson_binomial_pmf(probs);
    pmf.iter()
        .enumerate()
        .map(|(i, p)| i.min(cap) as f64 * p)
        .sum()
}

/// `P[Y >= h]` for `Y ~ Poisson(x)`, i.e. the regularized lower incomplete
/// gamma function `P(h, x)`.
pub fn poisson_tail(h: usize, x: f64) -> f64 {
    if h == 0 {
        return 1.0;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if h == 1 {
        return -(-x).exp_m1();
    }
    if x < h as f64 + 1.0 {
        // e^{-x} x^h / h! * sum_k x^k / ((h+1)...(h+k))
        let log_lead = -x + h as f64 * x.ln() - ln_factorial(h);
        let mut term = 1.0;
        let mut series = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * series {
            term *= x / (h as f64 + k);
            series += term;
            k += 1.0;
        }
        (log_lead.exp() * series).min(1.0)
    } else {
        let mut pmf = (-x).exp();
        let mut below = pmf;
        for l in 1..h {
            pmf *= x / l as f64;
            below += pmf;
        }
        (1.0 - below).max(0.0)
    }
}

/// `ln(n!)` by direct summation of logarithms.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}
