//! The full kernel-inequality suite behind the `checks` command.

use rayon::prelude::*;
use serde::Serialize;

use super::Table;
use crate::factor_lp::checks::{
    monotone_kernel_check, polynomial_extremal_check, ExtremalReport, MonotoneReport,
};
use crate::factor_lp::KernelSet;
use crate::rng::SeedTree;

/// Largest `n` of the extremal sweep.
pub const EXTREMAL_N_MAX: usize = 6;
/// Largest number of units of the extremal sweep.
pub const EXTREMAL_H_MAX: usize = 3;
/// Spacing of the `sum s_i` grid.
pub const S_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChecksReport {
    pub n_max: u64,
    pub trials: usize,
    pub seed: u64,
    pub monotone: MonotoneReport,
    pub extremal_cells: usize,
    /// Largest `max_random - equal_value` over all cells, for either polynomial.
    pub worst_excess: f64,
    pub worst_identity_error: f64,
    /// Failing cells, with their witnesses.
    pub extremal_failures: Vec<ExtremalReport>,
    pub pass: bool,
}

/// `(n, H, sum s_i)` for every cell of the extremal sweep.
pub fn extremal_cells() -> Vec<(usize, usize, f64)> {
    let mut cells = Vec::new();
    for n in 1..=EXTREMAL_N_MAX {
        for h in 1..=EXTREMAL_H_MAX {
            let steps = (n as f64 / S_STEP).round() as usize;
            cells.extend((0..=steps).map(|i| (n, h, i as f64 * S_STEP)));
        }
    }
    cells
}

/// Runs the monotonicity grid for `1..=n_max` and the extremal sweep with
/// `trials` random points per cell. Cell `c` draws from stream `c` of `seed`.
pub fn run_checks(n_max: u64, trials: usize, seed: u64, kernels: KernelSet) -> ChecksReport {
    let monotone = monotone_kernel_check(n_max, kernels);
    let seeds = SeedTree::new(seed);
    let cells = extremal_cells();
    let reports: Vec<ExtremalReport> = cells
        .par_iter()
        .enumerate()
        .map(|(c, &(n, h, s))| {
            polynomial_extremal_check(n, h, s, trials, &mut seeds.stream(c as u64), kernels)
        })
        .collect();
    let worst_excess = reports
        .iter()
        .map(|r| (r.max_random - r.equal_value).max(r.esp_max_random - r.esp_equal_value))
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_identity_error = reports
        .iter()
        .map(|r| r.esp_identity_error)
        .fold(0.0, f64::max);
    let extremal_failures: Vec<ExtremalReport> =
        reports.into_iter().filter(|r| !r.passed()).collect();
    let pass = monotone.passed() && extremal_failures.is_empty();
    ChecksReport {
        n_max,
        trials,
        seed,
        monotone,
        extremal_cells: cells.len(),
        worst_excess,
        worst_identity_error,
        extremal_failures,
        pass,
    }
}

impl Table for ChecksReport {
    fn header(&self) -> Vec<String> {
        ["check", "cases", "failures", "worst"]
            .map(String::from)
            .to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![
            vec![
                "monotone".into(),
                self.monotone.grid_points.to_string(),
                self.monotone.violations.len().to_string(),
                String::new(),
            ],
            vec![
                "extremal".into(),
                self.extremal_cells.to_string(),
                self.extremal_failures.len().to_string(),
                format!("{:.3e}", self.worst_excess),
            ],
            vec![
                "esp identity".into(),
                self.extremal_cells.to_string(),
                String::new(),
                format!("{:.3e}", self.worst_identity_error),
            ],
        ]
    }
}
