//! Command-line front end.
//!
//! Exit codes: 0 when every requested check passes, 1 when one fails, 2 for
//! usage, input, or configuration errors. Every JSON report carries the
//! crate version and a SHA-256 hash of the resolved configuration.

pub mod certify;
pub mod checks;
pub mod config;
pub mod simulate;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::factor_lp::{
    bound_table, build_lp_esp, build_lp_esp_n, build_lp_spm_n, solve_lp, solve_lp_spm_h,
    BoundTable, Certificate, GoldenDiff, KernelSet, LpInstance, LpStatus, TableConfig, TableKind,
};
use crate::instance::AuctionInstance;
use config::{parse_list, FileConfig};

/// Environment variable read for the worker-thread count.
pub const THREADS_ENV: &str = "POSTED_PRICE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Md,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "posted-price",
    version,
    about = "Posted-price mechanisms, factor-revealing bounds, and revenue certification"
)]
pub struct Cli {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (also read from POSTED_PRICE_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Cap on enumerated profiles for exact evaluation.
    #[arg(long, global = true)]
    pub max_profiles: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute bound tables, optionally against the bundled reference values.
    Tables(TablesArgs),
    /// Check revenue guarantees exactly, or by sampling when enumeration is too large.
    Certify(CertifyArgs),
    /// Run one mechanism on an instance file.
    Simulate(SimulateArgs),
    /// Solve one factor-revealing program, or an LP given as JSON.
    LpSolve(LpArgs),
    /// Run the kernel-inequality harness.
    Checks(ChecksArgs),
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Tables to build; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    pub which: Vec<String>,
    /// Bidder counts, e.g. `1..10` or `2,3,5`.
    #[arg(long)]
    pub n: Option<String>,
    /// Unit counts for the multi-unit table.
    #[arg(long = "H")]
    pub h: Option<String>,
    /// Discretization sizes.
    #[arg(long)]
    pub k: Option<String>,
    /// Compare against the bundled reference values.
    #[arg(long)]
    pub golden: bool,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Instance file to certify.
    #[arg(long, conflicts_with = "random")]
    pub instance: Option<PathBuf>,
    /// Number of random instances to certify instead.
    #[arg(long)]
    pub random: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub support: Option<usize>,
    #[arg(long)]
    pub units: Option<usize>,
    /// Required revenue fraction, replacing the proven factors.
    #[arg(long)]
    pub factor: Option<f64>,
    /// Trials for the sampling fallback.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Skip the per-profile ESP-versus-SPM comparison.
    #[arg(long)]
    pub no_dominance: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "best-spm")]
    pub mechanism: simulate::Mechanism,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Program {
    /// Posted pricing with `n` bidders on a `k`-point grid.
    SpmN,
    /// Eager second price, large market, `k`-point grid.
    Esp,
    /// Eager second price with `n` bidders.
    EspN,
    /// Continuous `H`-unit posted-pricing program.
    SpmH,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    #[arg(long, value_enum, required_unless_present = "file")]
    pub program: Option<Program>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "H")]
    pub h: Option<usize>,
    /// JSON file `{"c": [...], "a": [[...]], "b": [...]}` for `max c.x, Ax <= b, x >= 0`.
    #[arg(long, conflicts_with = "program")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChecksArgs {
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Random points per extremal cell.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Test hook: flip the sign of the second term of r_n.
    #[arg(long, hide = true)]
    pub flip_r: bool,
}

/// Rows for the csv and markdown renderings of a report.
pub trait Table {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(t: &dyn Table) -> String {
    let mut out = String::new();
    for row in std::iter::once(t.header()).chain(t.rows()) {
        out.push_str(
            &row.iter()
                .map(|f| csv_field(f))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    out
}

fn render_md(t: &dyn Table) -> String {
    let header = t.header();
    let mut out = format!(
        "| {} |\n|{}\n",
        header.join(" | "),
        "---|".repeat(header.len())
    );
    for row in t.rows() {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

/// The JSON wrapper of every report.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config_hash: String,
    pub config: &'a C,
    pub pass: bool,
    pub result: &'a R,
}

/// Lower-case hex SHA-256 of the configuration's JSON form.
pub fn config_hash<C: Serialize>(config: &C) -> String {
    let bytes = serde_json::to_vec(config).expect("configs serialize");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn envelope_json<C: Serialize, R: Serialize>(
    command: &str,
    config: &C,
    pass: bool,
    result: &R,
) -> String {
    let env = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(config),
        config,
        pass,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

struct Context {
    file: FileConfig,
    format: Option<Format>,
    output: Option<PathBuf>,
    max_profiles: Option<u64>,
}

impl Context {
    fn format(&self, default: Format) -> Result<Format> {
        if let Some(f) = self.format {
            return Ok(f);
        }
        match self.file.format.as_deref() {
            None => Ok(default),
            Some(s) => Format::from_str(s, true)
                .map_err(|_| Error::InvalidArgument(format!("unknown format \"{s}\""))),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(p) => std::fs::write(p, text)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }

    fn seed(&self, flag: Option<u64>, command: &str) -> Result<u64> {
        flag.or(self.file.seed).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{command} needs --seed (or `seed` in the config file)"
            ))
        })
    }

    fn report<C: Serialize, R: Serialize + Table>(
        &self,
        command: &str,
        config: &C,
        pass: bool,
        result: &R,
    ) -> Result<()> {
        let text = match self.format(Format::Json)? {
            Format::Json => envelope_json(command, config, pass, result),
            Format::Csv => render_csv(result),
            Format::Md => render_md(result),
        };
        self.emit(&text)
    }
}

/// Parses arguments and runs the command, returning the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 1 for failures of the computation itself, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } | Error::Invariant(_) | Error::OracleInconsistent(_) => 1,
        _ => 2,
    }
}

fn configure_threads(flag: Option<usize>, file: Option<usize>) -> Result<()> {
    let from_env =
        match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!("{THREADS_ENV}={v} is not a count"))
            })?),
            Err(_) => None,
        };
    if let Some(t) = flag.or(from_env).or(file) {
        // A pool built earlier in the same process wins; that only happens in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    Ok(())
}

/// Runs a parsed command. `Ok(false)` means a check failed.
pub fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    configure_threads(cli.threads, file.threads)?;
    let ctx = Context {
        file,
        format: cli.format,
        output: cli.output,
        max_profiles: cli.max_profiles,
    };
    match cli.command {
        Command::Tables(a) => cmd_tables(&ctx, a),
        Command::Certify(a) => cmd_certify(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::LpSolve(a) => cmd_lp(&ctx, a),
        Command::Checks(a) => cmd_checks(&ctx, a),
    }
}

#[derive(Debug, Serialize)]
struct TablesConfig {
    which: Vec<TableKind>,
    grid: TableConfig,
    golden: bool,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
struct TablesResult {
    tables: Vec<BoundTable>,
    golden: Vec<GoldenDiff>,
}

fn list_or<T: Clone>(
    flag: Option<&str>,
    file: Option<&Vec<T>>,
    conv: impl Fn(u64) -> T,
) -> Result<Vec<T>> {
    match flag {
        Some(s) => Ok(parse_list(s)?.into_iter().map(conv).collect()),
        None => Ok(file.cloned().unwrap_or_default()),
    }
}

fn cmd_tables(ctx: &Context, a: TablesArgs) -> Result<bool> {
    let names: Vec<String> = if !a.which.is_empty() {
        a.which.clone()
    } else if let Some(w) = &ctx.file.tables.which {
        w.clone()
    } else {
        TableKind::ALL
            .iter()
            .map(|k| k.name().to_string())
            .collect()
    };
    let which = names
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<TableKind>>>()?;
    let t = &ctx.file.tables;
    let grid = TableConfig {
        n: list_or(a.n.as_deref(), t.n.as_ref(), |x| x)?,
        h: list_or(a.h.as_deref(), t.h.as_ref(), |x| x as usize)?,
        k: list_or(a.k.as_deref(), t.k.as_ref(), |x| x as usize)?,
    };
    let config = TablesConfig {
        which,
        grid,
        golden: a.golden || t.golden.unwrap_or(false),
        tolerance: a.tolerance.or(t.tolerance).unwrap_or(1e-4),
    };
    let tables = config
        .which
        .iter()
        .map(|&k| bound_table(k, &config.grid))
        .collect::<Result<Vec<_>>>()?;
    let golden: Vec<GoldenDiff> = if config.golden {
        tables
            .iter()
            .flat_map(|t| t.compare(&t.kind.goldens(), config.tolerance))
            .collect()
    } else {
        Vec::new()
    };
    let pass = golden.iter().all(|d| d.pass);
    for d in golden.iter().filter(|d| !d.pass) {
        eprintln!(
            "mismatch: {} param={:?} k={:?}: computed {:.6}, reference {:.4}, diff {:.2e}",
            d.setting, d.param, d.k, d.computed, d.expected, d.diff
        );
    }
    let text = match ctx.format(Format::Md)? {
        Format::Json => envelope_json("tables", &config, pass, &TablesResult { tables, golden }),
        Format::Csv => tables
            .iter()
            .map(|t| format!("# {}\n{}", t.kind.name(), t.to_csv()))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Md => tables
            .iter()
            .map(|t| format!("### {}\n\n{}", t.kind.name(), t.to_markdown()))
            .collect::<Vec<_>>()
            .join("\n"),
    };
    ctx.emit(&text)?;
    Ok(pass)
}

#[derive(Debug, Serialize)]
struct CertifyConfig {
    instance: Option<String>,
    suite: Option<certify::SuiteSpec>,
    options: certify::CertifyOptions,
    max_profiles: u128,
    max_threshold_profiles: u128,
}

fn cmd_certify(ctx: &Context, a: CertifyArgs) -> Result<bool> {
    let c = &ctx.file.certify;
    let seed = ctx.seed(a.seed, "certify")?;
    let budget = ctx.file.budget(ctx.max_profiles);
    let options = certify::CertifyOptions {
        factor: a.factor.or(c.factor),
        budget,
        trials: a.trials.or(ctx.file.trials).unwrap_or(100_000),
        seed,
        dominance: !a.no_dominance,
    };
    let instance_path = a
        .instance
        .clone()
        .or_else(|| c.instance.as_ref().map(PathBuf::from));
    let random = a.random.or(c.random);
    let mut config = CertifyConfig {
        instance: None,
        suite: None,
        options,
        max_profiles: budget.max_profiles,
        max_threshold_profiles: budget.max_threshold_profiles,
    };
    match (instance_path, random) {
        (Some(path), _) => {
            let instance = load_instance(&path)?;
            config.instance = Some(path.display().to_string());
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let cert = certify::certify_instance(&label, &instance, &options)?;
            if let Some(w) = &cert.warning {
                eprintln!("warning: {w}");
            }
            ctx.report("certify", &config, cert.pass, &cert)?;
            Ok(cert.pass)
        }
        (None, Some(count)) => {
            let spec = certify::SuiteSpec {
                seed,
                count,
                n_max: a.n_max.or(c.n_max).unwrap_or(3),
                support: a.support.or(c.support).unwrap_or(3),
                units: a.units.or(c.units).unwrap_or(1),
            };
            config.suite = Some(spec);
            let report = certify::certify_suite(spec, &options)?;
            for c in report.instances.iter().filter(|c| c.warning.is_some()) {
                eprintln!(
                    "warning: {}: {}",
                    c.label,
                    c.warning.as_deref().unwrap_or_default()
                );
            }
            ctx.report("certify", &config, report.pass, &report)?;
            Ok(report.pass)
        }
        (None, None) => Err(Error::InvalidArgument(
            "certify needs --instance FILE or --random COUNT".into(),
        )),
    }
}

fn load_instance(path: &Path) -> Result<AuctionInstance> {
    AuctionInstance::from_json_file(path).map_err(|e| match e {
        Error::Io(io) => Error::InvalidArgument(format!("{}: {io}", path.display())),
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

#[derive(Debug, Serialize)]
struct SimulateConfig {
    instance: String,
    mechanism: simulate::Mechanism,
    trials: u64,
    seed: u64,
    max_profiles: u128,
}

fn cmd_simulate(ctx: &Context, a: SimulateArgs) -> Result<bool> {
    let seed = ctx.seed(a.seed, "simulate")?;
    let budget = ctx.file.budget(ctx.max_profiles);
    let config = SimulateConfig {
        instance: a.instance.display().to_string(),
        mechanism: a.mechanism,
        trials: a.trials.or(ctx.file.trials).unwrap_or(100_000),
        seed,
        max_profiles: budget.max_profiles,
    };
    let instance = load_instance(&a.instance)?;
    let report = simulate::simulate(&instance, config.mechanism, config.trials, seed, budget)?;
    ctx.report("simulate", &config, true, &report)?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct LpConfig {
    program: Option<Program>,
    n: Option<u64>,
    k: Option<usize>,
    units: Option<usize>,
    file: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct LpReport {
    pub program: Option<Program>,
    pub n: Option<u64>,
    pub k: Option<usize>,
    pub units: Option<usize>,
    pub status: Option<LpStatus>,
    pub value: f64,
    /// `1 / value` for the factor-revealing programs.
    pub factor: Option<f64>,
    pub iterations: Option<usize>,
    pub certificate: Option<Certificate>,
    pub tau_star: Option<f64>,
    pub primal: Option<Vec<f64>>,
    pub duals: Option<Vec<f64>>,
}

impl Table for LpReport {
    fn header(&self) -> Vec<String> {
        [
            "program",
            "n",
            "k",
            "H",
            "status",
            "value",
            "factor",
            "iterations",
        ]
        .map(String::from)
        .to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let o = |x: Option<String>| x.unwrap_or_default();
        vec![vec![
            o(self.program.map(|p| format!("{p:?}"))),
            o(self.n.map(|v| v.to_string())),
            o(self.k.map(|v| v.to_string())),
            o(self.units.map(|v| v.to_string())),
            o(self.status.map(|s| format!("{s:?}"))),
            format!("{:.10}", self.value),
            o(self.factor.map(|f| format!("{f:.10}"))),
            o(self.iterations.map(|v| v.to_string())),
        ]]
    }
}

/// Solves one program described by the arguments of `lp-solve`.
pub fn solve_program(
    program: Program,
    n: Option<u64>,
    k: Option<usize>,
    h: Option<usize>,
) -> Result<LpReport> {
    let need = |what: &str| Error::InvalidArgument(format!("{program:?} needs --{what}"));
    let lp = match program {
        Program::SpmH => {
            let units = h.ok_or_else(|| need("H"))?;
            let s = solve_lp_spm_h(units)?;
            return Ok(LpReport {
                program: Some(program),
                n: None,
                k: None,
                units: Some(units),
                status: None,
                value: s.lp_value,
                factor: Some(s.factor),
                iterations: None,
                certificate: None,
                tau_star: Some(s.tau_star),
                primal: None,
                duals: None,
            });
        }
        Program::SpmN => build_lp_spm_n(n.ok_or_else(|| need("n"))?, k.ok_or_else(|| need("k"))?)?,
        Program::Esp => build_lp_esp(k.ok_or_else(|| need("k"))?)?,
        Program::EspN => build_lp_esp_n(n.ok_or_else(|| need("n"))?, k.ok_or_else(|| need("k"))?)?,
    };
    let sol = solve_lp(&lp)?;
    let optimal = sol.status == LpStatus::Optimal;
    Ok(LpReport {
        program: Some(program),
        n: if program == Program::Esp { None } else { n },
        k,
        units: None,
        status: Some(sol.status),
        value: sol.objective,
        factor: optimal.then(|| 1.0 / sol.objective),
        iterations: Some(sol.iterations),
        certificate: sol.certificate,
        tau_star: None,
        primal: None,
        duals: None,
    })
}

fn cmd_lp(ctx: &Context, a: LpArgs) -> Result<bool> {
    let config = LpConfig {
        program: a.program,
        n: a.n,
        k: a.k,
        units: a.h,
        file: a.file.as_ref().map(|p| p.display().to_string()),
    };
    let report = match (&a.file, a.program) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let lp: LpInstance = serde_json::from_str(&text).map_err(Error::from_json)?;
            lp.validate()?;
            let sol = solve_lp(&lp)?;
            LpReport {
                program: None,
                n: None,
                k: None,
                units: None,
                status: Some(sol.status),
                value: sol.objective,
                factor: None,
                iterations: Some(sol.iterations),
                certificate: sol.certificate,
                tau_star: None,
                primal: Some(sol.primal),
                duals: Some(sol.duals),
            }
        }
        (None, Some(p)) => solve_program(p, a.n, a.k, a.h)?,
        (None, None) => {
            return Err(Error::InvalidArgument(
                "lp-solve needs --program or --file".into(),
            ))
        }
    };
    let pass = report.status.is_none_or(|s| s == LpStatus::Optimal);
    ctx.report("lp-solve", &config, pass, &report)?;
    Ok(pass)
}

#[derive(Debug, Serialize)]
struct ChecksConfig {
    n_max: u64,
    trials: usize,
    seed: u64,
    flip_r: bool,
}

fn cmd_checks(ctx: &Context, a: ChecksArgs) -> Result<bool> {
    let c = &ctx.file.checks;
    let config = ChecksConfig {
        n_max: a.n_max.or(c.n_max).unwrap_or(50),
        trials: a.trials.or(c.trials).unwrap_or(10_000),
        seed: a.seed.or(ctx.file.seed).unwrap_or(0),
        flip_r: a.flip_r,
    };
    let kernels = if config.flip_r {
        KernelSet::sign_flipped_r()
    } else {
        KernelSet::default()
    };
    let report = checks::run_checks(config.n_max, config.trials, config.seed, kernels);
    if !report.pass {
        for v in &report.monotone.violations {
            eprintln!(
                "monotonicity violated: {} n={:?} x={:?} at y={} (increase {:.3e})",
                v.function, v.n, v.x, v.y, v.increase
            );
        }
        for f in report.extremal_failures.iter().take(10) {
            eprintln!(
                "extremal check failed: n={} H={} sum={} witness={:?} identity error {:.3e}",
                f.n, f.units, f.s_total, f.witness, f.esp_identity_error
            );
        }
    }
    ctx.report("checks", &config, report.pass, &report)?;
    Ok(report.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_hex() {
        let h = config_hash(&serde_json::json!({"a": 1}));
        assert_eq!(h.len(), 64);
        assert_eq!(h, config_hash(&serde_json::json!({"a": 1})));
        assert_ne!(h, config_hash(&serde_json::json!({"a": 2})));
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(main_with_args(["posted-price", "bogus"]), 2);
        assert_eq!(main_with_args(["posted-price", "simulate"]), 2);
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), 2);
        assert_eq!(exit_code(&Error::Invariant("x".into())), 1);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn programs_solve() {
        let r = solve_program(Program::SpmN, Some(1), Some(200), None).unwrap();
        assert!((r.factor.unwrap() - 1.0).abs() < 1e-9);
        let r = solve_program(Program::SpmH, None, None, Some(1)).unwrap();
        assert!((r.tau_star.unwrap() - 1.6957).abs() < 1e-4);
        assert!(solve_program(Program::EspN, Some(2), None, None).is_err());
    }
}
