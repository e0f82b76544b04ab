//! Revenue certification: exact when the instance fits the enumeration
//! budget, Monte-Carlo otherwise.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::Table;
use crate::error::{Error, Result};
use crate::exact::{
    dominance_check, exact_opt, exact_revenues, random_instance, EnumerationBudget,
};
use crate::factor_lp::solve_lp_spm_h;
use crate::instance::{AuctionInstance, Feasibility};
use crate::mechanisms::{best_spm_revenue, Estimate};
use crate::myerson::{exact_s_curve, MyersonAuction};
use crate::parallel::trial_moments;
use crate::position::pa_exact;
use crate::rng::SeedTree;

/// Guarantee of the better eager second-price auction, single item.
pub const ESP_GUARANTEE: f64 = 0.6620;

/// Tolerance of the step-integral identity for the optimal revenue.
pub const OPT_IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyOptions {
    /// Overrides every default factor (a negative control when set too high).
    pub factor: Option<f64>,
    #[serde(skip)]
    pub budget: EnumerationBudget,
    /// Trials for the Monte-Carlo fallback.
    pub trials: u64,
    pub seed: u64,
    /// Also run the per-profile ESP-versus-SPM comparison.
    pub dominance: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            factor: None,
            budget: EnumerationBudget::default(),
            trials: 100_000,
            seed: 0,
            dominance: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EspCheck {
    pub me: f64,
    pub ue: f64,
    pub best: f64,
    pub factor: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceSummary {
    pub comparisons: u64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceCertificate {
    pub label: String,
    pub n: usize,
    pub feasibility: &'static str,
    pub units: Option<usize>,
    /// `"exact"` or `"monte-carlo"`.
    pub method: &'static str,
    pub opt: f64,
    pub mp: f64,
    pub up: f64,
    /// `max(mp, up)`, or the composed layer mechanism for position auctions.
    pub spm: f64,
    pub factor: f64,
    /// `spm - factor * opt`.
    pub margin: f64,
    pub ratio: f64,
    pub esp: Option<EspCheck>,
    /// Position auctions: `sum_j f_j / LP(j)`.
    pub layer_bound: Option<f64>,
    pub dominance: Option<DominanceSummary>,
    /// `|opt - integral of s|`.
    pub opt_identity_error: Option<f64>,
    /// Standard error of `margin` (Monte-Carlo only).
    pub std_error: Option<f64>,
    pub warning: Option<String>,
    pub pass: bool,
}

fn tol(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

fn units_factor(units: usize, opts: &CertifyOptions) -> Result<f64> {
    match opts.factor {
        Some(f) => Ok(f),
        None => Ok(solve_lp_spm_h(units)?.factor),
    }
}

/// Certifies one instance against its default or overridden factor.
pub fn certify_instance(
    label: &str,
    instance: &AuctionInstance,
    opts: &CertifyOptions,
) -> Result<InstanceCertificate> {
    let base =
        |units, method, opt: f64, mp: f64, up: f64, spm: f64, factor: f64| InstanceCertificate {
            label: label.to_string(),
            n: instance.n(),
            feasibility: instance.feasibility().kind(),
            units,
            method,
            opt,
            mp,
            up,
            spm,
            factor,
            margin: spm - factor * opt,
            ratio: ratio(spm, opt),
            esp: None,
            layer_bound: None,
            dominance: None,
            opt_identity_error: None,
            std_error: None,
            warning: None,
            pass: spm - factor * opt >= -tol(opt),
        };
    match instance.feasibility() {
        Feasibility::KUnit(_) => {
            let units = instance.units().expect("k-unit instance");
            let factor = units_factor(units, opts)?;
            let exact = match exact_revenues(instance, opts.budget) {
                Ok(r) => r,
                Err(Error::BudgetExceeded { .. }) => {
                    return monte_carlo(label, instance, units, factor, opts)
                }
                Err(e) => return Err(e),
            };
            let mut cert = base(
                Some(units),
                "exact",
                exact.opt,
                exact.mp,
                exact.up,
                exact.best_spm(),
                factor,
            );
            if let (Some(me), Some(ue)) = (exact.me, exact.ue) {
                let f = opts.factor.unwrap_or(ESP_GUARANTEE);
                let best = me.max(ue);
                let margin = best - f * exact.opt;
                cert.esp = Some(EspCheck {
                    me,
                    ue,
                    best,
                    factor: f,
                    margin,
                    pass: margin >= -tol(exact.opt),
                });
            }
            if opts.dominance {
                let d = dominance_check(instance, opts.budget)?;
                cert.dominance = Some(DominanceSummary {
                    comparisons: d.comparisons,
                    violations: d.violations.len(),
                });
            }
            let curve = exact_s_curve(instance, None, opts.budget)?;
            cert.opt_identity_error = Some((curve.curve.step_integral() - exact.opt).abs());
            cert.pass = cert.pass
                && cert.esp.as_ref().is_none_or(|e| e.pass)
                && cert.dominance.as_ref().is_none_or(|d| d.violations == 0)
                && cert
                    .opt_identity_error
                    .is_none_or(|e| e <= OPT_IDENTITY_TOL);
            Ok(cert)
        }
        Feasibility::Partition { groups, caps } => {
            let (mut opt, mut mp, mut up, mut spm) = (0.0, 0.0, 0.0, 0.0);
            let mut factor: f64 = f64::INFINITY;
            for (members, &cap) in groups.iter().zip(caps) {
                let sub = instance.restrict(members, Feasibility::KUnit(cap))?;
                let r = exact_revenues(&sub, opts.budget)?;
                opt += r.opt;
                mp += r.mp;
                up += r.up;
                spm += r.best_spm();
                factor = factor.min(units_factor(sub.units().expect("k-unit group"), opts)?);
            }
            Ok(base(None, "exact", opt, mp, up, spm, factor))
        }
        Feasibility::Position { .. } => {
            let pa = pa_exact(instance, opts.budget)?;
            let factor = units_factor(1, opts)?;
            let mp = pa.layers.iter().map(|l| l.weight * l.mp).sum();
            let up = pa.layers.iter().map(|l| l.weight * l.up).sum();
            let mut cert = base(None, "exact", pa.opt, mp, up, pa.spm, factor);
            cert.layer_bound = Some(pa.bound);
            if pa.spm < pa.bound * pa.opt - tol(pa.opt) {
                cert.warning = Some(format!(
                    "revenue ratio {} is below the layer bound {}",
                    pa.ratio, pa.bound
                ));
            }
            Ok(cert)
        }
        Feasibility::Matroid(_) => Err(Error::UnsupportedFeasibility {
            operation: "certification",
            feasibility: "matroid",
        }),
    }
}

fn monte_carlo(
    label: &str,
    instance: &AuctionInstance,
    units: usize,
    factor: f64,
    opts: &CertifyOptions,
) -> Result<InstanceCertificate> {
    let seeds = SeedTree::new(opts.seed);
    let auction = MyersonAuction::new(instance)?;
    let opt_seeds = seeds.child(1);
    let opt: Estimate = trial_moments(opts.trials, |t| {
        let mut rng = opt_seeds.stream(t);
        let idx: Vec<usize> = instance
            .bidders()
            .iter()
            .map(|d| d.sample_index(&mut rng))
            .collect();
        auction.outcome_at(&idx).revenue
    })
    .into();
    let best = best_spm_revenue(instance, opts.trials, seeds.child(2))?;
    let spm_se = if best.revenue == best.uniform {
        0.0
    } else {
        best.myersonian.std_error
    };
    let margin = best.revenue - factor * opt.mean;
    let se = (spm_se.powi(2) + (factor * opt.std_error).powi(2)).sqrt();
    let (pass, warning) = if margin >= 0.0 {
        (true, None)
    } else if margin >= -3.0 * se {
        (
            true,
            Some(format!(
                "margin {margin:.3e} is negative but within 3 standard errors ({se:.3e})"
            )),
        )
    } else {
        (false, None)
    };
    Ok(InstanceCertificate {
        label: label.to_string(),
        n: instance.n(),
        feasibility: instance.feasibility().kind(),
        units: Some(units),
        method: "monte-carlo",
        opt: opt.mean,
        mp: best.myersonian.mean,
        up: best.uniform,
        spm: best.revenue,
        factor,
        margin,
        ratio: ratio(best.revenue, opt.mean),
        esp: None,
        layer_bound: None,
        dominance: None,
        opt_identity_error: None,
        std_error: Some(se),
        warning,
        pass,
    })
}

/// A seeded family of random k-unit instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteSpec {
    pub seed: u64,
    pub count: u64,
    pub n_max: usize,
    pub support: usize,
    pub units: usize,
}

impl SuiteSpec {
    /// Instance `i` of the suite: its bidder count is uniform on
    /// `1..=n_max`.
    pub fn instance(&self, i: u64) -> Result<AuctionInstance> {
        let mut rng = SeedTree::new(self.seed).stream(i);
        let n = rng.gen_range(1..=self.n_max);
        random_instance(rng.gen(), n, self.support, Feasibility::KUnit(self.units))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub spec: SuiteSpec,
    pub instances: Vec<InstanceCertificate>,
    pub failures: usize,
    pub min_ratio: f64,
    pub min_esp_ratio: Option<f64>,
    pub dominance_comparisons: u64,
    pub dominance_violations: usize,
    pub max_opt_identity_error: f64,
    pub pass: bool,
}

pub fn certify_suite(spec: SuiteSpec, opts: &CertifyOptions) -> Result<SuiteReport> {
    if spec.n_max == 0 || spec.support == 0 || spec.units == 0 {
        return Err(Error::InvalidArgument(
            "suite needs n_max, support and units of at least 1".into(),
        ));
    }
    let instances: Vec<InstanceCertificate> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            certify_instance(
                &format!("random-{}-{i}", spec.seed),
                &spec.instance(i)?,
                opts,
            )
        })
        .collect::<Result<_>>()?;
    let failures = instances.iter().filter(|c| !c.pass).count();
    let min_ratio = instances
        .iter()
        .map(|c| c.ratio)
        .fold(f64::INFINITY, f64::min);
    let min_esp_ratio = instances
        .iter()
        .filter_map(|c| c.esp.as_ref().map(|e| ratio(e.best, c.opt)))
        .reduce(f64::min);
    let dominance_comparisons = instances
        .iter()
        .filter_map(|c| c.dominance.as_ref())
        .map(|d| d.comparisons)
        .sum();
    let dominance_violations = instances
        .iter()
        .filter_map(|c| c.dominance.as_ref())
        .map(|d| d.violations)
        .sum();
    let max_opt_identity_error = instances
        .iter()
        .filter_map(|c| c.opt_identity_error)
        .fold(0.0, f64::max);
    Ok(SuiteReport {
        spec,
        instances,
        failures,
        min_ratio,
        min_esp_ratio,
        dominance_comparisons,
        dominance_violations,
        max_opt_identity_error,
        pass: failures == 0,
    })
}

/// Exact optimal revenue, or `None` when enumeration is over budget.
pub(crate) fn exact_opt_if_affordable(
    instance: &AuctionInstance,
    budget: EnumerationBudget,
) -> Result<Option<f64>> {
    let r = match instance.feasibility() {
        Feasibility::Position { alphas } => {
            let weights = crate::position::layer_weights(alphas);
            let mut total = 0.0;
            for (j, w) in weights.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let layer = instance.with_feasibility(Feasibility::KUnit(j + 1))?;
                match exact_opt(&layer, budget, false) {
                    Ok(o) => total += w * o.revenue,
                    Err(Error::BudgetExceeded { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            return Ok(Some(total));
        }
        _ => exact_opt(instance, budget, false),
    };
    match r {
        Ok(o) => Ok(Some(o.revenue)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn cert_row(c: &InstanceCertificate) -> Vec<String> {
    vec![
        c.label.clone(),
        c.n.to_string(),
        c.feasibility.to_string(),
        c.method.to_string(),
        format!("{:.10}", c.opt),
        format!("{:.10}", c.spm),
        format!("{:.6}", c.ratio),
        format!("{:.6}", c.factor),
        format!("{:.3e}", c.margin),
        c.esp
            .as_ref()
            .map(|e| format!("{:.6}", ratio(e.best, c.opt)))
            .unwrap_or_default(),
        c.pass.to_string(),
    ]
}

const CERT_HEADER: [&str; 11] = [
    "label",
    "n",
    "feasibility",
    "method",
    "opt",
    "spm",
    "ratio",
    "factor",
    "margin",
    "esp_ratio",
    "pass",
];

impl Table for InstanceCertificate {
    fn header(&self) -> Vec<String> {
        CERT_HEADER.iter().map(|s| s.to_string()).collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![cert_row(self)]
    }
}

impl Table for SuiteReport {
    fn header(&self) -> Vec<String> {
        CERT_HEADER.iter().map(|s| s.to_string()).collect()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.instances.iter().map(cert_row).collect()
    }
}
