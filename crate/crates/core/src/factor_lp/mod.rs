//! Factor-revealing programs and the numerical checks behind them.
//!
//! A dense simplex solver handles the finite programs; the continuous
//! programs reduce to a one-dimensional root of an integral equation.

pub mod builders;
pub mod checks;
pub mod continuous;
pub mod kernels;
pub mod simplex;
pub mod tables;

pub use builders::{
    build_lp_esp, build_lp_esp_n, build_lp_spm_n, factor_of, lp_esp_factor, lp_esp_n_factor,
    lp_spm_n_factor,
};
pub use checks::{
    monotone_kernel_check, polynomial_extremal_check, ExtremalReport, MonotoneReport,
};
pub use continuous::{solve_lp_spm_continuous, solve_lp_spm_h, ContinuousSolution};
pub use kernels::KernelSet;
pub use simplex::{
    solve_lp, solve_lp_with, Certificate, LpInstance, LpSolution, LpStatus, SimplexOptions,
};
pub use tables::{bound_table, BoundRow, BoundTable, Golden, GoldenDiff, TableConfig, TableKind};
