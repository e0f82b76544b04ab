//! Bound tables: every factor the crate can compute, with baselines and
//! checked-in reference values.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::builders::{lp_esp_factor, lp_esp_n_factor, lp_spm_n_factor};
use super::continuous::solve_lp_spm_h;
use super::kernels::{multiunit_baseline, spm_baseline};
use crate::error::{Error, Result};

/// The available tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    /// Baseline, SPM and ESP factors per bidder count.
    SmallN,
    /// Continuous `H`-unit factors and their baseline.
    Multiunit,
    /// `1/LP-SPM(n,k)`.
    SpmN,
    /// `1/LP-ESP(k)`.
    EspK,
    /// `1/LP-ESP(n,k)`.
    EspN,
}

impl TableKind {
    pub const ALL: [TableKind; 5] = [
        TableKind::SmallN,
        TableKind::Multiunit,
        TableKind::SpmN,
        TableKind::EspK,
        TableKind::EspN,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TableKind::SmallN => "small-n",
            TableKind::Multiunit => "multiunit",
            TableKind::SpmN => "spm-n",
            TableKind::EspK => "esp-k",
            TableKind::EspN => "esp-n",
        }
    }

    fn golden_source(&self) -> &'static str {
        match self {
            TableKind::SmallN => include_str!("../../data/goldens/small_n.csv"),
            TableKind::Multiunit => include_str!("../../data/goldens/multiunit.csv"),
            TableKind::SpmN => include_str!("../../data/goldens/spm_n.csv"),
            TableKind::EspK => include_str!("../../data/goldens/esp_k.csv"),
            TableKind::EspN => include_str!("../../data/goldens/esp_n.csv"),
        }
    }

    /// Reference values shipped with the crate.
    pub fn goldens(&self) -> Vec<Golden> {
        parse_goldens(self.golden_source()).expect("bundled goldens parse")
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown table \"{s}\"; expected one of small-n, multiunit, spm-n, esp-k, esp-n")))
    }
}

/// Parameters of a table run. Empty lists fall back to per-table defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default, rename = "H")]
    pub h: Vec<usize>,
    #[serde(default)]
    pub k: Vec<usize>,
}

impl TableConfig {
    fn ns(&self) -> Vec<u64> {
        if self.n.is_empty() {
            (1..=10).collect()
        } else {
            self.n.clone()
        }
    }

    fn hs(&self) -> Vec<usize> {
        if self.h.is_empty() {
            (1..=10).collect()
        } else {
            self.h.clone()
        }
    }

    fn ks(&self, kind: TableKind) -> Vec<usize> {
        if !self.k.is_empty() {
            return self.k.clone();
        }
        match kind {
            TableKind::SmallN => vec![1600],
            TableKind::EspK => vec![50, 100, 200, 400],
            _ => vec![200, 400],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub setting: String,
    /// Bidder count `n` or unit count `H`, depending on the setting.
    pub param: Option<u64>,
    pub k: Option<usize>,
    pub value: f64,
    pub method: String,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTable {
    pub kind: TableKind,
    pub rows: Vec<BoundRow>,
}

#[derive(Debug, Clone, Copy)]
enum Cell {
    Baseline(u64),
    MultiBaseline(usize),
    Multiunit(usize),
    SpmN(u64, usize, &'static str),
    EspN(u64, usize, &'static str),
    EspK(usize),
}

fn evaluate(cell: Cell) -> Result<BoundRow> {
    let start = Instant::now();
    let row =
        |setting: &str, param: Option<u64>, k: Option<usize>, value: f64, method: &str| BoundRow {
            setting: setting.to_string(),
            param,
            k,
            value,
            method: method.to_string(),
            runtime_secs: 0.0,
        };
    let mut out = match cell {
        Cell::Baseline(n) => row("baseline", Some(n), None, spm_baseline(n), "closed-form"),
        Cell::MultiBaseline(h) => row(
            "baseline",
            Some(h as u64),
            None,
            multiunit_baseline(h),
            "closed-form",
        ),
        Cell::Multiunit(h) => row(
            "multiunit",
            Some(h as u64),
            None,
            solve_lp_spm_h(h)?.factor,
            "quadrature+bisection",
        ),
        Cell::SpmN(n, k, setting) => {
            row(setting, Some(n), Some(k), lp_spm_n_factor(n, k)?, "simplex")
        }
        Cell::EspN(n, k, setting) => {
            row(setting, Some(n), Some(k), lp_esp_n_factor(n, k)?, "simplex")
        }
        Cell::EspK(k) => row("esp-k", None, Some(k), lp_esp_factor(k)?, "simplex"),
    };
    out.runtime_secs = start.elapsed().as_secs_f64();
    Ok(out)
}

/// Computes one table. Cells are solved in parallel; row order is fixed.
pub fn bound_table(kind: TableKind, config: &TableConfig) -> Result<BoundTable> {
    let mut cells = Vec::new();
    match kind {
        TableKind::SmallN => {
            let k = *config.ks(kind).last().expect("non-empty k grid");
            for n in config.ns() {
                cells.extend([
                    Cell::Baseline(n),
                    Cell::SpmN(n, k, "spm"),
                    Cell::EspN(n, k, "esp"),
                ]);
            }
        }
        TableKind::Multiunit => {
            for h in config.hs() {
                cells.extend([Cell::MultiBaseline(h), Cell::Multiunit(h)]);
            }
        }
        TableKind::SpmN => {
            for n in config.ns() {
                cells.push(Cell::Baseline(n));
                cells.extend(
                    config
                        .ks(kind)
                        .into_iter()
                        .map(|k| Cell::SpmN(n, k, "spm-n")),
                );
            }
        }
        TableKind::EspK => cells.extend(config.ks(kind).into_iter().map(Cell::EspK)),
        TableKind::EspN => {
            for n in config.ns() {
                cells.extend(
                    config
                        .ks(kind)
                        .into_iter()
                        .map(|k| Cell::EspN(n, k, "esp-n")),
                );
            }
        }
    }
    let rows = cells
        .into_par_iter()
        .map(evaluate)
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundTable { kind, rows })
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl BoundTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting,param,k,value,method,runtime_secs\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{},{:.3}",
                r.setting,
                fmt_opt(r.param),
                fmt_opt(r.k),
                r.value,
                r.method,
                r.runtime_secs
            );
        }
        out
    }

    /// One markdown row per (setting, k) with one column per parameter, or
    /// one column per `k` when no row has a parameter.
    pub fn to_markdown(&self) -> String {
        let by_k = self.rows.iter().all(|r| r.param.is_none());
        let column = |r: &BoundRow| if by_k { r.k.map(|k| k as u64) } else { r.param };
        let columns: BTreeSet<u64> = self.rows.iter().filter_map(column).collect();
        let mut labels: Vec<(String, Option<usize>)> = Vec::new();
        for r in &self.rows {
            let key = (r.setting.clone(), if by_k { None } else { r.k });
            if !labels.contains(&key) {
                labels.push(key);
            }
        }
        let head = if by_k {
            "k"
        } else if self.kind == TableKind::Multiunit {
            "H"
        } else {
            "n"
        };
        let mut out = format!("| {head} |");
        for c in &columns {
            let _ = write!(out, " {c} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(columns.len()));
        out.push('\n');
        for (setting, k) in labels {
            let label = match k {
                Some(k) => format!("{setting} (k={k})"),
                None => setting.clone(),
            };
            let _ = write!(out, "| {label} |");
            for c in &columns {
                let cell = self
                    .rows
                    .iter()
                    .find(|r| r.setting == setting && (by_k || r.k == k) && column(r) == Some(*c))
                    .map(|r| format!("{:.4}", r.value))
                    .unwrap_or_default();
                let _ = write!(out, " {cell} |");
            }
            out.push('\n');
        }
        out
    }

    pub fn find(&self, setting: &str, param: Option<u64>, k: Option<usize>) -> Option<&BoundRow> {
        self.rows
            .iter()
            .find(|r| r.setting == setting && r.param == param && r.k == k)
    }

    /// Compares every row that has a reference value.
    pub fn compare(&self, goldens: &[Golden], tol: f64) -> Vec<GoldenDiff> {
        self.rows
            .iter()
            .filter_map(|r| {
                let g = goldens
                    .iter()
                    .find(|g| g.setting == r.setting && g.param == r.param && g.k == r.k)?;
                let diff = (r.value - g.value).abs();
                Some(GoldenDiff {
                    setting: r.setting.clone(),
                    param: r.param,
                    k: r.k,
                    expected: g.value,
                    computed: r.value,
                    diff,
                    pass: diff <= tol,
                })
            })
            .collect()
    }
}

/// One reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Golden {
    pub setting: String,
    pub param: Option<u64>,
    pub k: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenDiff {
    pub setting: String,
    pub param: Option<u64>,
    pub k: Option<usize>,
    pub expected: f64,
    pub computed: f64,
    pub diff: f64,
    pub pass: bool,
}

/// Parses `setting,param,k,value` lines; `#` lines and the header are skipped.
pub fn parse_goldens(text: &str) -> Result<Vec<Golden>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("setting,") {
            continue;
        }
        let err = |column: usize, message: String| Error::Parse {
            line: lineno + 1,
            column,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(1, format!("expected 4 fields, found {}", fields.len())));
        }
        let opt = |s: &str, col: usize| -> Result<Option<u64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| err(col, format!("{e}")))
            }
        };
        out.push(Golden {
            setting: fields[0].to_string(),
            param: opt(fields[1], 2)?,
            k: opt(fields[2], 3)?.map(|k| k as usize),
            value: fields[3].parse().map_err(|e| err(4, format!("{e}")))?,
        });
    }
    Ok(out)
}
