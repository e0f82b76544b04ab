//! Deterministic data-parallel loops.
//!
//! Work is cut into fixed-size chunks that do not depend on the thread count.
//! Each chunk is processed sequentially and the per-chunk results come back in
//! chunk order, so floating-point reductions are bit-identical however many
//! threads run them.

use std::ops::Range;

use rayon::prelude::*;

/// Default number of items per chunk.
pub const CHUNK: u64 = 2048;

/// Applies `work` to consecutive ranges covering `0..total` and returns the
/// results in range order.
pub fn chunked<A, F>(total: u64, chunk: u64, work: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync,
{
    let chunk = chunk.max(1);
    let count = total.div_ceil(chunk);
    (0..count)
        .into_par_iter()
        .map(|c| work(c * chunk..((c + 1) * chunk).min(total)))
        .collect()
}

/// Running sum and sum of squares of a scalar statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: Moments) -> Moments {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Standard error of the mean (zero for fewer than two observations).
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Applies `trial` to every index in `0..trials` and accumulates the returned
/// values into [`Moments`], deterministically.
pub fn trial_moments<F>(trials: u64, trial: F) -> Moments
where
    F: Fn(u64) -> f64 + Sync,
{
    chunked(trials, CHUNK, |range| {
        let mut m = Moments::default();
        for t in range {
            m.push(trial(t));
        }
        m
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge)
}
