//! Optional TOML run configuration and small argument parsers.
//!
//! Command-line flags take precedence over the file, which takes precedence
//! over built-in defaults.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::EnumerationBudget;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub budget: BudgetSection,
    #[serde(default)]
    pub tables: TablesSection,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default)]
    pub checks: ChecksSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub max_profiles: Option<u64>,
    pub max_threshold_profiles: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablesSection {
    pub which: Option<Vec<String>>,
    pub n: Option<Vec<u64>>,
    #[serde(rename = "H")]
    pub h: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
    pub golden: Option<bool>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    pub instance: Option<String>,
    pub random: Option<u64>,
    pub n_max: Option<usize>,
    pub support: Option<usize>,
    pub units: Option<usize>,
    pub factor: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    pub n_max: Option<u64>,
    pub trials: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| {
                    let before = &text[..s.start.min(text.len())];
                    let line = before.matches('\n').count() + 1;
                    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
                    (line, column)
                })
                .unwrap_or((0, 0));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    /// The budget flag, when given, caps both counts.
    pub fn budget(&self, max_profiles: Option<u64>) -> EnumerationBudget {
        let d = EnumerationBudget::default();
        let pick =
            |file: Option<u64>, default: u128| max_profiles.or(file).map_or(default, u128::from);
        EnumerationBudget {
            max_profiles: pick(self.budget.max_profiles, d.max_profiles),
            max_threshold_profiles: pick(
                self.budget.max_threshold_profiles,
                d.max_threshold_profiles,
            ),
        }
    }
}

/// Parses `"3"`, `"1..10"` (inclusive), `"1..=10"`, or comma-separated
/// mixtures such as `"1,2,5..7"`.
pub fn parse_list(text: &str) -> Result<Vec<u64>> {
    let bad =
        |what: &str| Error::InvalidArgument(format!("cannot parse \"{what}\" as a list or range"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let lo: u64 = a.trim().parse().map_err(|_| bad(part))?;
            let hi: u64 = b.trim().parse().map_err(|_| bad(part))?;
            if lo > hi {
                return Err(bad(part));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad(part))?);
        }
    }
    if out.is_empty() {
        return Err(bad(text));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("3").unwrap(), vec![3]);
        assert_eq!(parse_list("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_list("1..=2,7").unwrap(), vec![1, 2, 7]);
        assert_eq!(parse_list("200, 400").unwrap(), vec![200, 400]);
        assert!(parse_list("4..1").is_err());
        assert!(parse_list("x").is_err());
        assert!(parse_list("").is_err());
    }

    #[test]
    fn config_file_sections() {
        let c = FileConfig::parse(
            "seed = 7\n[tables]\nwhich = [\"multiunit\"]\nH = [1, 2]\n[budget]\nmax_profiles = 1000\n",
        )
        .unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.tables.h, Some(vec![1, 2]));
        assert_eq!(c.budget(None).max_profiles, 1000);
        assert_eq!(c.budget(Some(5)).max_profiles, 5);
        let err = FileConfig::parse("seed = 1\nbogus = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
