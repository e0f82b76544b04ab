//! Acceptance criteria 1-10. Every test writes one `criterion N: PASS|FAIL`
//! line straight to stdout (bypassing the test harness's capture) and then
//! asserts the same condition. The k = 1600 runs are tagged `slow`.

use std::io::Write as _;
use std::sync::OnceLock;
use std::time::Instant;

use posted_price::cli::certify::{
    certify_instance, certify_suite, CertifyOptions, SuiteReport, SuiteSpec, ESP_GUARANTEE,
};
use posted_price::cli::checks::run_checks;
use posted_price::dist::DiscreteDistribution;
use posted_price::exact::{random_instance, EnumerationBudget};
use posted_price::factor_lp::kernels::{multiunit_baseline, spm_baseline};
use posted_price::factor_lp::{
    bound_table, lp_esp_factor, lp_esp_n_factor, lp_spm_n_factor, solve_lp_spm_continuous,
    solve_lp_spm_h, KernelSet, TableConfig, TableKind,
};
use posted_price::position::{layer_lp_values, pa_bound, pa_exact, pa_feasible, pa_spm};
use posted_price::{AuctionInstance, Feasibility, SeedTree};

fn line(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {criterion}: {verdict} {detail}");
    let _ = out.flush();
}

fn golden(kind: TableKind, setting: &str, param: Option<u64>, k: Option<usize>) -> f64 {
    kind.goldens()
        .into_iter()
        .find(|g| g.setting == setting && g.param == param && g.k == k)
        .unwrap_or_else(|| panic!("no reference value for {setting} {param:?} {k:?}"))
        .value
}

#[test]
fn criterion_01_continuous_single_unit() {
    let start = Instant::now();
    let s = solve_lp_spm_continuous().unwrap();
    let secs = start.elapsed().as_secs_f64();
    let checks = [
        ("tau*", s.tau_star, 1.696, 5e-4),
        ("value", s.lp_value, 1.5283, 5e-5),
        ("factor", s.factor, 0.6543, 5e-5),
    ];
    let mut detail = String::new();
    let mut pass = secs < 1.0;
    for (name, got, want, tol) in checks {
        let ok = (got - want).abs() <= tol;
        pass &= ok;
        detail += &format!(
            "{name}={got:.7} (want {want} +/- {tol:e}: {}) ",
            if ok { "ok" } else { "off" }
        );
    }
    detail += &format!("runtime {secs:.3}s");
    line(1, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_02_multi_unit_bounds() {
    let expected = [
        0.6543, 0.7427, 0.7857, 0.8125, 0.8311, 0.8454, 0.8567, 0.8656, 0.8734, 0.8807,
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut off = Vec::new();
    let mut worst: f64 = 0.0;
    for (h, &want) in (1..=10).zip(&expected) {
        let s = solve_lp_spm_h(h).unwrap();
        let diff = (s.factor - want).abs();
        worst = worst.max(diff);
        if diff > 1e-3 {
            off.push(format!("H={h}: {:.5} vs {want}", s.factor));
            pass = false;
        }
        if s.factor <= multiunit_baseline(h) {
            off.push(format!("H={h}: not above the baseline"));
            pass = false;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    let detail = format!(
        "worst diff {worst:.2e}, runtime {secs:.2}s; mismatches: [{}]",
        off.join("; ")
    );
    line(2, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_03_finite_n_spm() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut off = Vec::new();
    for k in [200usize, 400] {
        for n in 1..=10u64 {
            let got = lp_spm_n_factor(n, k).unwrap();
            let want = golden(TableKind::SpmN, "spm-n", Some(n), Some(k));
            let diff = (got - want).abs();
            worst = worst.max(diff);
            if diff > 1e-4 {
                off.push(format!("n={n} k={k}: {got:.5} vs {want}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = off.is_empty() && secs < 120.0;
    let detail = format!(
        "k in {{200,400}}, n in 1..=10: worst diff {worst:.2e}, runtime {secs:.1}s {off:?}"
    );
    line(3, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
#[ignore = "slow"]
fn criterion_03_finite_n_spm_k1600() {
    let mut off = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 1..=10u64 {
        let got = lp_spm_n_factor(n, 1600).unwrap();
        let want = golden(TableKind::SmallN, "spm", Some(n), Some(1600));
        worst = worst.max((got - want).abs());
        if (got - want).abs() > 1e-4 {
            off.push(format!("n={n}: {got:.5} vs {want}"));
        }
    }
    let pass = off.is_empty();
    let detail = format!("k=1600 (slow): worst diff {worst:.2e} {off:?}");
    line(3, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_04_esp_programs() {
    let mut off = Vec::new();
    let mut worst: f64 = 0.0;
    let mut check = |label: String, got: f64, want: f64| {
        let diff = (got - want).abs();
        worst = worst.max(diff);
        if diff > 1e-4 {
            off.push(format!("{label}: {got:.5} vs {want}"));
        }
    };
    for k in [50usize, 100, 200, 400] {
        check(
            format!("esp k={k}"),
            lp_esp_factor(k).unwrap(),
            golden(TableKind::EspK, "esp-k", None, Some(k)),
        );
    }
    for k in [200usize, 400] {
        for n in 1..=10u64 {
            let want = golden(TableKind::EspN, "esp-n", Some(n), Some(k));
            check(
                format!("esp-n n={n} k={k}"),
                lp_esp_n_factor(n, k).unwrap(),
                want,
            );
        }
    }
    let pass = off.is_empty();
    let detail = format!("large-market k in {{50..400}} and n in 1..=10 at k in {{200,400}}: worst diff {worst:.2e} {off:?}");
    line(4, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
#[ignore = "slow"]
fn criterion_04_esp_k1600() {
    let got = lp_esp_factor(1600).unwrap();
    let pass = (got - 0.6620).abs() <= 1e-4;
    let detail = format!("k=1600 (slow): {got:.6} vs 0.6620");
    line(4, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_05_dominance_ladders() {
    let config = TableConfig {
        n: (1..=10).collect(),
        h: Vec::new(),
        k: vec![200, 400],
    };
    let spm = bound_table(TableKind::SpmN, &config).unwrap();
    let esp = bound_table(TableKind::EspN, &config).unwrap();
    let mut broken = Vec::new();
    let mut cells = 0;
    for k in [200usize, 400] {
        for n in 1..=10u64 {
            let s = spm.find("spm-n", Some(n), Some(k)).unwrap().value;
            let e = esp.find("esp-n", Some(n), Some(k)).unwrap().value;
            let b = spm_baseline(n);
            cells += 1;
            if !(e >= s - 1e-9 && s >= b - 1e-9) {
                broken.push(format!(
                    "n={n} k={k}: esp {e:.5}, spm {s:.5}, baseline {b:.5}"
                ));
            }
        }
    }
    let pass = broken.is_empty();
    let detail = format!("{cells} cells checked for esp >= spm >= 1-(1-1/n)^n {broken:?}");
    line(5, pass, &detail);
    assert!(pass, "{detail}");
}

struct Suites {
    one_unit: SuiteReport,
    two_unit: SuiteReport,
    secs: f64,
}

fn suites() -> &'static Suites {
    static SUITES: OnceLock<Suites> = OnceLock::new();
    SUITES.get_or_init(|| {
        let start = Instant::now();
        let opts = CertifyOptions {
            seed: 7,
            ..CertifyOptions::default()
        };
        let one_unit = certify_suite(
            SuiteSpec {
                seed: 7,
                count: 100,
                n_max: 3,
                support: 3,
                units: 1,
            },
            &opts,
        )
        .unwrap();
        let two_unit = certify_suite(
            SuiteSpec {
                seed: 8,
                count: 50,
                n_max: 4,
                support: 3,
                units: 2,
            },
            &opts,
        )
        .unwrap();
        Suites {
            one_unit,
            two_unit,
            secs: start.elapsed().as_secs_f64(),
        }
    })
}

#[test]
fn criterion_06_exact_certification_suite() {
    let s = suites();
    let spm_fail = |r: &SuiteReport| {
        r.instances
            .iter()
            .filter(|c| c.margin < -1e-12 * c.opt.max(1.0))
            .count()
    };
    let esp_fail = s
        .one_unit
        .instances
        .iter()
        .filter(|c| c.esp.as_ref().is_none_or(|e| !e.pass))
        .count();
    let esp_factor_ok = s
        .one_unit
        .instances
        .iter()
        .all(|c| c.esp.as_ref().is_some_and(|e| e.factor == ESP_GUARANTEE));
    let units_ok = s
        .two_unit
        .instances
        .iter()
        .all(|c| c.units == Some(2.min(c.n)));
    let (f1, f2) = (spm_fail(&s.one_unit), spm_fail(&s.two_unit));
    let pass = f1 == 0 && f2 == 0 && esp_fail == 0 && esp_factor_ok && units_ok && s.secs < 300.0;
    let detail = format!(
        "1-unit: {} instances, {f1} posted-price failures, min ratio {:.4}; eager: {esp_fail} failures, min ratio {:.4}; \
         2-unit: {} instances, {f2} failures, min ratio {:.4}; runtime {:.1}s",
        s.one_unit.instances.len(),
        s.one_unit.min_ratio,
        s.one_unit.min_esp_ratio.unwrap_or(f64::NAN),
        s.two_unit.instances.len(),
        s.two_unit.min_ratio,
        s.secs
    );
    line(6, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_07_per_profile_dominance() {
    let s = suites();
    let comparisons = s.one_unit.dominance_comparisons + s.two_unit.dominance_comparisons;
    let violations = s.one_unit.dominance_violations + s.two_unit.dominance_violations;
    let every = s
        .one_unit
        .instances
        .iter()
        .chain(&s.two_unit.instances)
        .all(|c| c.dominance.is_some());
    let pass = violations == 0 && comparisons > 0 && every;
    let detail = format!(
        "{comparisons} (price vector, profile) pairs, {violations} with eager revenue below posted"
    );
    line(7, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_08_kernel_harness() {
    let start = Instant::now();
    let r = run_checks(50, 10_000, 0, KernelSet::default());
    let pass = r.pass && r.worst_identity_error <= 1e-12;
    let detail = format!(
        "monotone grid {} points, {} violations; {} extremal cells x 10^4 points, {} failures, worst excess {:.2e}, \
         identity error {:.2e}; runtime {:.1}s",
        r.monotone.grid_points,
        r.monotone.violations.len(),
        r.extremal_cells,
        r.extremal_failures.len(),
        r.worst_excess,
        r.worst_identity_error,
        start.elapsed().as_secs_f64()
    );
    line(8, pass, &detail);
    assert!(pass, "{detail}");
}

fn grid_position(m1: usize, m2: usize, alphas: Vec<f64>) -> AuctionInstance {
    AuctionInstance::new(
        vec![
            DiscreteDistribution::uniform_grid(0.0, 1.0, m1).unwrap(),
            DiscreteDistribution::uniform_grid(0.0, 2.0, m2).unwrap(),
        ],
        Feasibility::Position { alphas },
    )
    .unwrap()
}

#[test]
fn criterion_09_position_auctions() {
    let mut notes = Vec::new();
    let mut pass = true;

    let inst = grid_position(6, 6, vec![1.0, 0.5]);
    let sim = pa_spm(&inst, 10_000, SeedTree::new(9)).unwrap();
    pass &= sim.infeasible_trials == 0;
    notes.push(format!(
        "{} of {} composed click vectors infeasible",
        sim.infeasible_trials, sim.trials
    ));

    let lp = layer_lp_values(2).unwrap();
    let b1 = pa_bound(&[1.0, 0.0], &lp).unwrap();
    let b2 = pa_bound(&[0.0, 1.0], &lp).unwrap();
    // Reported to four decimals; the exact continuous values sit 1e-4 away.
    let endpoints_ok = (b1 - 0.6543).abs() <= 5e-4 && (b2 - 0.7427).abs() <= 5e-4;
    pass &= endpoints_ok;
    notes.push(format!("bound endpoints {b1:.5}, {b2:.5}"));

    let witness = pa_feasible(&[0.8, 0.8], &[1.0, 0.5]);
    let rejected = witness.as_ref().is_some_and(|w| w.cardinality == 2);
    pass &= rejected;
    notes.push(format!("x=(0.8,0.8) rejected: {rejected}"));

    let mut instances = vec![
        grid_position(3, 3, vec![1.0, 0.5]),
        grid_position(5, 4, vec![1.0, 0.2]),
        grid_position(8, 8, vec![1.0, 0.9]),
        grid_position(6, 6, vec![1.0, 0.0]),
        grid_position(4, 6, vec![0.6, 0.6]),
    ];
    let mut rng_seed = 100;
    for alphas in [[1.0, 0.5], [0.8, 0.3], [1.0, 1.0], [0.5, 0.1]] {
        for _ in 0..5 {
            rng_seed += 1;
            let feas = Feasibility::Position {
                alphas: alphas.to_vec(),
            };
            instances.push(random_instance(rng_seed, 2, 3, feas).unwrap());
        }
    }
    let mut worst: f64 = f64::INFINITY;
    let mut failures = 0;
    for inst in &instances {
        let c = pa_exact(inst, EnumerationBudget::default()).unwrap();
        worst = worst.min(c.ratio);
        if !c.certifies(0.6543) {
            failures += 1;
        }
    }
    pass &= failures == 0;
    notes.push(format!(
        "{} exact instances, {failures} below 0.6543, min ratio {worst:.4}",
        instances.len()
    ));

    let detail = notes.join("; ");
    line(9, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_10_opt_identity() {
    let s = suites();
    let mut worst = s
        .one_unit
        .max_opt_identity_error
        .max(s.two_unit.max_opt_identity_error);
    let mut count = s.one_unit.instances.len() + s.two_unit.instances.len();
    let extra = AuctionInstance::single_item(vec![
        DiscreteDistribution::uniform_grid(0.0, 1.0, 20).unwrap(),
        DiscreteDistribution::uniform_grid(0.0, 2.0, 20).unwrap(),
    ])
    .unwrap();
    let c = certify_instance("uniform-pair", &extra, &CertifyOptions::default()).unwrap();
    worst = worst.max(c.opt_identity_error.unwrap());
    count += 1;
    let all_present = s
        .one_unit
        .instances
        .iter()
        .chain(&s.two_unit.instances)
        .all(|c| c.opt_identity_error.is_some());
    let pass = worst <= 1e-9 && all_present;
    let detail = format!("{count} exact instances, largest |Opt - integral of s| = {worst:.2e}");
    line(10, pass, &detail);
    assert!(pass, "{detail}");
}
