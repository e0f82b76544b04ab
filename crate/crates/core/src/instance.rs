//! Auction instances: bidder distributions plus a feasibility constraint.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};

/// A downward-closed family of feasible winner sets, queried one set at a time.
pub trait IndependenceOracle: Send + Sync {
    /// Number of ground-set elements (bidders).
    fn ground_size(&self) -> usize;

    /// Whether `set` (sorted, distinct indices) is feasible.
    fn is_independent(&self, set: &[usize]) -> bool;

    fn name(&self) -> &str {
        "oracle"
    }
}

/// Partition matroid: at most `caps[g]` winners from group `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOracle {
    group_of: Vec<usize>,
    caps: Vec<usize>,
}

impl PartitionOracle {
    pub fn new(groups: &[Vec<usize>], caps: &[usize], n: usize) -> Result<Self> {
        let group_of = validate_partition(groups, caps, n)?;
        Ok(Self {
            group_of,
            caps: caps.to_vec(),
        })
    }
}

impl IndependenceOracle for PartitionOracle {
    fn ground_size(&self) -> usize {
        self.group_of.len()
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let mut used = vec![0usize; self.caps.len()];
        for &i in set {
            let g = self.group_of[i];
            used[g] += 1;
            if used[g] > self.caps[g] {
                return false;
            }
        }
        true
    }

    fn name(&self) -> &str {
        "partition"
    }
}

/// Uniform matroid of rank `rank`: any set of at most `rank` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMatroid {
    pub n: usize,
    pub rank: usize,
}

impl IndependenceOracle for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.len() <= self.rank
    }

    fn name(&self) -> &str {
        "uniform"
    }
}

/// Which winner sets are allowed.
#[derive(Clone)]
pub enum Feasibility {
    /// At most `h` winners.
    KUnit(usize),
    /// Disjoint groups covering all bidders, each with a winner cap.
    Partition {
        groups: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    /// Ranked slots with weakly decreasing click-through rates, one per bidder.
    Position { alphas: Vec<f64> },
    /// Arbitrary matroid given by an independence oracle.
    Matroid(Arc<dyn IndependenceOracle>),
}

impl fmt::Debug for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feasibility::KUnit(h) => write!(f, "KUnit({h})"),
            Feasibility::Partition { groups, caps } => f
                .debug_struct("Partition")
                .field("groups", groups)
                .field("caps", caps)
                .finish(),
            Feasibility::Position { alphas } => {
                f.debug_struct("Position").field("alphas", alphas).finish()
            }
            Feasibility::Matroid(o) => write!(f, "Matroid({})", o.name()),
        }
    }
}

impl Feasibility {
    pub fn kind(&self) -> &'static str {
        match self {
            Feasibility::KUnit(_) => "kunit",
            Feasibility::Partition { .. } => "partition",
            Feasibility::Position { .. } => "position",
            Feasibility::Matroid(_) => "matroid",
        }
    }
}

fn validate_partition(groups: &[Vec<usize>], caps: &[usize], n: usize) -> Result<Vec<usize>> {
    if groups.len() != caps.len() {
        return Err(Error::InvalidInstance(format!(
            "{} groups but {} caps",
            groups.len(),
            caps.len()
        )));
    }
    let mut group_of = vec![usize::MAX; n];
    for (g, members) in groups.iter().enumerate() {
        if caps[g] == 0 {
            return Err(Error::InvalidInstance(format!("group {g} has cap 0")));
        }
        for &i in members {
            if i >= n {
                return Err(Error::InvalidInstance(format!(
                    "group {g} names bidder {i}, but n = {n}"
                )));
            }
            if group_of[i] != usize::MAX {
                return Err(Error::InvalidInstance(format!(
                    "bidder {i} appears in more than one group"
                )));
            }
            group_of[i] = g;
        }
    }
    if let Some(i) = group_of.iter().position(|&g| g == usize::MAX) {
        return Err(Error::InvalidInstance(format!(
            "bidder {i} is not in any group"
        )));
    }
    Ok(group_of)
}

/// Bidders with independent values and a feasibility constraint.
#[derive(Debug, Clone)]
pub struct AuctionInstance {
    bidders: Vec<DiscreteDistribution>,
    feasibility: Feasibility,
    group_of: Vec<usize>,
}

impl AuctionInstance {
    pub fn new(bidders: Vec<DiscreteDistribution>, feasibility: Feasibility) -> Result<Self> {
        let n = bidders.len();
        if n == 0 {
            return Err(Error::InvalidInstance(
                "an instance needs at least one bidder".into(),
            ));
        }
        let mut group_of = vec![0; n];
        let feasibility = match feasibility {
            Feasibility::KUnit(0) => {
                return Err(Error::InvalidInstance("H must be positive".into()))
            }
            Feasibility::KUnit(h) => Feasibility::KUnit(h.min(n)),
            Feasibility::Partition { groups, caps } => {
                group_of = validate_partition(&groups, &caps, n)?;
                Feasibility::Partition { groups, caps }
            }
            Feasibility::Position { alphas } => {
                if alphas.len() != n {
                    return Err(Error::InvalidInstance(format!(
                        "position auction needs {n} click-through rates, got {}",
                        alphas.len()
                    )));
                }
                if alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
                    return Err(Error::InvalidInstance(
                        "click-through rates must be finite and non-negative".into(),
                    ));
                }
                if alphas.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidInstance(
                        "click-through rates must be weakly decreasing".into(),
                    ));
                }
                Feasibility::Position { alphas }
            }
            Feasibility::Matroid(oracle) => {
                if oracle.ground_size() != n {
                    return Err(Error::InvalidInstance(format!(
                        "oracle ground set has {} elements, instance has {n} bidders",
                        oracle.ground_size()
                    )));
                }
                Feasibility::Matroid(oracle)
            }
        };
        Ok(Self {
            bidders,
            feasibility,
            group_of,
        })
    }

    /// Single-item instance.
    pub fn single_item(bidders: Vec<DiscreteDistribution>) -> Result<Self> {
        Self::new(bidders, Feasibility::KUnit(1))
    }

    pub fn k_unit(bidders: Vec<DiscreteDistribution>, h: usize) -> Result<Self> {
        Self::new(bidders, Feasibility::KUnit(h))
    }

    pub fn n(&self) -> usize {
        self.bidders.len()
    }

    pub fn bidders(&self) -> &[DiscreteDistribution] {
        &self.bidders
    }

    pub fn bidder(&self, i: usize) -> &DiscreteDistribution {
        &self.bidders[i]
    }

    pub fn feasibility(&self) -> &Feasibility {
        &self.feasibility
    }

    /// Same bidders under another constraint.
    pub fn with_feasibility(&self, feasibility: Feasibility) -> Result<Self> {
        Self::new(self.bidders.clone(), feasibility)
    }

    /// Number of units for k-unit instances.
    pub fn units(&self) -> Option<usize> {
        match self.feasibility {
            Feasibility::KUnit(h) => Some(h),
            _ => None,
        }
    }

    /// Largest feasible winner count.
    pub fn max_winners(&self) -> usize {
        match &self.feasibility {
            Feasibility::KUnit(h) => *h,
            Feasibility::Partition { groups, caps } => {
                groups.iter().zip(caps).map(|(g, &c)| g.len().min(c)).sum()
            }
            Feasibility::Position { .. } => self.n(),
            Feasibility::Matroid(o) => {
                let mut set = Vec::new();
                for i in 0..self.n() {
                    set.push(i);
                    if !o.is_independent(&set) {
                        set.pop();
                    }
                }
                set.len()
            }
        }
    }

    /// Group of bidder `i` under a partition constraint (0 otherwise).
    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    /// Whether `winners` (any order) with `candidate` added is still feasible.
    /// Position auctions admit every set (slots are assigned by rank).
    pub fn can_add(&self, winners: &[usize], candidate: usize) -> bool {
        match &self.feasibility {
            Feasibility::KUnit(h) => winners.len() < *h,
            Feasibility::Partition { caps, .. } => {
                let g = self.group_of[candidate];
                winners.iter().filter(|&&w| self.group_of[w] == g).count() < caps[g]
            }
            Feasibility::Position { .. } => true,
            Feasibility::Matroid(o) => {
                let mut set: Vec<usize> = winners
                    .iter()
                    .copied()
                    .chain(std::iter::once(candidate))
                    .collect();
                set.sort_unstable();
                o.is_independent(&set)
            }
        }
    }

    /// Whether `set` is a feasible winner set.
    pub fn is_feasible(&self, set: &[usize]) -> bool {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        let mut acc = Vec::with_capacity(sorted.len());
        for &i in &sorted {
            if !self.can_add(&acc, i) {
                return false;
            }
            acc.push(i);
        }
        true
    }

    /// Checks downward closure of a matroid oracle on every subset (n <= 16).
    /// For other constraints this is a no-op.
    pub fn validate_oracle(&self) -> Result<()> {
        let Feasibility::Matroid(oracle) = &self.feasibility else {
            return Ok(());
        };
        let n = self.n();
        if n > 16 {
            return Err(Error::InvalidArgument(format!(
                "exhaustive oracle validation is limited to 16 bidders, got {n}"
            )));
        }
        let members = |mask: u32| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
        if !oracle.is_independent(&[]) {
            return Err(Error::OracleInconsistent(
                "the empty set is reported dependent".into(),
            ));
        }
        for mask in 1u32..(1 << n) {
            if !oracle.is_independent(&members(mask)) {
                continue;
            }
            for i in 0..n {
                if mask >> i & 1 == 1 && !oracle.is_independent(&members(mask & !(1 << i))) {
                    return Err(Error::OracleInconsistent(format!(
                        "{:?} is independent but {:?} is not",
                        members(mask),
                        members(mask & !(1 << i))
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sub-instance restricted to the listed bidders, under `feasibility`.
    pub fn restrict(&self, members: &[usize], feasibility: Feasibility) -> Result<Self> {
        Self::new(
            members.iter().map(|&i| self.bidders[i].clone()).collect(),
            feasibility,
        )
    }

    /// Product of support sizes (number of value profiles).
    pub fn profile_count(&self) -> u128 {
        self.bidders.iter().map(|d| d.len() as u128).product()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(Error::from_json)?;
        file.into_instance()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Serializes to the instance file format. Oracle constraints have no file
    /// representation and are rejected.
    pub fn to_json(&self) -> Result<String> {
        let feasibility = match &self.feasibility {
            Feasibility::KUnit(h) => serde_json::json!({"kind": "kunit", "H": h}),
            Feasibility::Partition { groups, caps } => {
                serde_json::json!({"kind": "partition", "groups": groups, "caps": caps})
            }
            Feasibility::Position { alphas } => {
                serde_json::json!({"kind": "position", "alphas": alphas})
            }
            Feasibility::Matroid(_) => {
                return Err(Error::UnsupportedFeasibility {
                    operation: "instance export",
                    feasibility: "matroid",
                })
            }
        };
        let value = serde_json::json!({"bidders": self.bidders, "feasibility": feasibility});
        Ok(serde_json::to_string_pretty(&value).expect("instance serializes"))
    }
}

#[derive(Deserialize, Serialize)]
struct InstanceFile {
    bidders: Vec<DiscreteDistribution>,
    #[serde(default)]
    feasibility: Option<Value>,
    #[serde(default)]
    alphas: Option<Vec<f64>>,
}

impl InstanceFile {
    fn into_instance(self) -> Result<AuctionInstance> {
        let feasibility = match (self.feasibility, self.alphas) {
            (None, Some(alphas)) => Feasibility::Position { alphas },
            (None, None) => Feasibility::KUnit(1),
            (Some(spec), top_alphas) => parse_feasibility(&spec, top_alphas)?,
        };
        AuctionInstance::new(self.bidders, feasibility)
    }
}

fn parse_feasibility(spec: &Value, top_alphas: Option<Vec<f64>>) -> Result<Feasibility> {
    let bad = |msg: String| Error::InvalidInstance(format!("feasibility: {msg}"));
    let kind = spec
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing string field \"kind\"".into()))?;
    let field = |name: &str| {
        spec.get(name)
            .cloned()
            .ok_or_else(|| bad(format!("missing field \"{name}\"")))
    };
    match kind {
        "kunit" => {
            let h = spec
                .get("H")
                .or_else(|| spec.get("h"))
                .and_then(Value::as_u64);
            Ok(Feasibility::KUnit(
                h.ok_or_else(|| bad("missing integer field \"H\"".into()))? as usize,
            ))
        }
        "partition" => {
            let groups = serde_json::from_value(field("groups")?)
                .map_err(|e| bad(format!("groups: {e}")))?;
            let caps =
                serde_json::from_value(field("caps")?).map_err(|e| bad(format!("caps: {e}")))?;
            Ok(Feasibility::Partition { groups, caps })
        }
        "position" => {
            let alphas = match spec.get("alphas") {
                Some(v) => {
                    serde_json::from_value(v.clone()).map_err(|e| bad(format!("alphas: {e}")))?
                }
                None => top_alphas.ok_or_else(|| bad("missing field \"alphas\"".into()))?,
            };
            Ok(Feasibility::Position { alphas })
        }
        other => Err(bad(format!("unknown kind \"{other}\""))),
    }
}
