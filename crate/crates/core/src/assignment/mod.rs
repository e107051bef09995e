//! Channel assignments: which nodes share a channel on which transceiver.
//!
//! An [`Assignment`] is a list of [`Group`]s. Each group owns one orthogonal
//! channel and lists the nodes whose transceivers are tuned to it. Every node
//! has exactly one group per transceiver index `1..=T`.

mod build;
mod levels;
mod topology;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{ChannelId, Error, NodeId, Result};

pub use build::{build, build_grid, build_hint, build_log2, build_ring};
pub use levels::{cover_sets, k_min, level_index, wrap_mod, CoverSetIndex, LevelSetIndex};
pub use topology::{effective_topology, Edge, EffectiveTopology, Link};
pub use validate::{validate, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Hint,
    Log2,
    Ring,
    Grid,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Hint, Scheme::Log2, Scheme::Ring, Scheme::Grid];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Hint => "hint",
            Scheme::Log2 => "log2",
            Scheme::Ring => "ring",
            Scheme::Grid => "grid",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hint" => Ok(Scheme::Hint),
            "log2" | "log-2" => Ok(Scheme::Log2),
            "ring" => Ok(Scheme::Ring),
            "grid" => Ok(Scheme::Grid),
            other => Err(Error::invalid(format!("unknown scheme `{other}`"))),
        }
    }
}

/// How `HINT` handles a node count that is not a perfect `T`-th power.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Padding {
    /// Reject anything but `N = M^T`.
    #[default]
    Strict,
    /// Build for the next `M^T` and drop the virtual nodes `N+1..=M^T`.
    Virtual,
}

impl FromStr for Padding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(Padding::Strict),
            "virtual" => Ok(Padding::Virtual),
            other => Err(Error::invalid(format!("unknown padding mode `{other}`"))),
        }
    }
}

/// Network size, transceiver count and scheme parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub n_nodes: u32,
    pub n_transceivers: u32,
    pub scheme: Scheme,
    /// Group size parameter: `N^(1/T)` (rounded up when padded) for `HINT`,
    /// the number of `Tx-1` groups for `LOG-2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default)]
    pub padding: Padding,
}

impl NetworkSpec {
    /// True for a `HINT` assignment built from fewer than `M^T` real nodes.
    pub fn is_padded(&self) -> bool {
        match (self.scheme, self.m) {
            (Scheme::Hint, Some(m)) => u64::from(m).pow(self.n_transceivers) != u64::from(self.n_nodes),
            _ => false,
        }
    }
}

/// One channel and the nodes tuned to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub channel: ChannelId,
    /// The `k` of "Tx-k group".
    pub tx_index: u32,
    /// Group number within its transceiver index, starting at 1.
    pub number: u32,
    /// Ordered members; the position is the member's level.
    pub members: Vec<NodeId>,
    /// Per-member transceiver index when the members do not all use
    /// `tx_index` (a `GRID` link joins one node's east radio to its
    /// neighbour's west radio).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member_tx: Option<Vec<u32>>,
}

impl Group {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.members.contains(&node)
    }

    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.members.iter().position(|&m| m == node)
    }

    /// Transceiver index used by the member at `pos`.
    pub fn tx_at(&self, pos: usize) -> u32 {
        match &self.member_tx {
            Some(txs) => txs[pos],
            None => self.tx_index,
        }
    }

    /// Transceiver index `node` uses on this channel.
    pub fn tx_of(&self, node: NodeId) -> Option<u32> {
        self.position(node).map(|p| self.tx_at(p))
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentDoc {
    spec: NetworkSpec,
    groups: Vec<Group>,
}

/// A complete static channel assignment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "AssignmentDoc", into = "AssignmentDoc")]
pub struct Assignment {
    spec: NetworkSpec,
    groups: Vec<Group>,
    // (node - 1) * T + (k - 1) -> index into `groups`
    slots: Vec<Option<usize>>,
    by_channel: BTreeMap<ChannelId, usize>,
}

impl PartialEq for Assignment {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.groups == other.groups
    }
}

impl Eq for Assignment {}

impl TryFrom<AssignmentDoc> for Assignment {
    type Error = Error;

    fn try_from(doc: AssignmentDoc) -> Result<Self> {
        Assignment::from_parts(doc.spec, doc.groups)
    }
}

impl From<Assignment> for AssignmentDoc {
    fn from(a: Assignment) -> Self {
        AssignmentDoc {
            spec: a.spec,
            groups: a.groups,
        }
    }
}

impl Assignment {
    /// Assembles an assignment from raw groups.
    ///
    /// Only ids are range-checked here. Duplicate memberships and other
    /// structural problems are left for [`validate`] to report; for lookups
    /// the first group listing a `(node, transceiver)` wins.
    pub fn from_parts(spec: NetworkSpec, groups: Vec<Group>) -> Result<Self> {
        if spec.n_nodes < 1 || spec.n_transceivers < 1 {
            return Err(Error::invalid("need at least one node and one transceiver"));
        }
        let n = spec.n_nodes;
        let t = spec.n_transceivers;
        let mut slots = vec![None; (n as usize) * (t as usize)];
        let mut by_channel = BTreeMap::new();
        for (gi, g) in groups.iter().enumerate() {
            if let Some(txs) = &g.member_tx {
                if txs.len() != g.members.len() {
                    return Err(Error::invalid(format!(
                        "group on channel {} has {} members but {} transceiver entries",
                        g.channel,
                        g.members.len(),
                        txs.len()
                    )));
                }
            }
            by_channel.entry(g.channel).or_insert(gi);
            for (pos, &node) in g.members.iter().enumerate() {
                if node < 1 || node > n {
                    return Err(Error::OutOfRange(node, n));
                }
                let k = g.tx_at(pos);
                if k < 1 || k > t {
                    return Err(Error::invalid(format!(
                        "transceiver index {k} outside 1..={t} on channel {}",
                        g.channel
                    )));
                }
                let slot = &mut slots[((node - 1) * t + (k - 1)) as usize];
                if slot.is_none() {
                    *slot = Some(gi);
                }
            }
        }
        Ok(Assignment {
            spec,
            groups,
            slots,
            by_channel,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn scheme(&self) -> Scheme {
        self.spec.scheme
    }

    pub fn n_nodes(&self) -> u32 {
        self.spec.n_nodes
    }

    pub fn n_transceivers(&self) -> u32 {
        self.spec.n_transceivers
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Number of distinct channels in use.
    pub fn channel_count(&self) -> usize {
        self.by_channel.len()
    }

    /// The group `node` joins with its `k`-th transceiver.
    pub fn group_of(&self, node: NodeId, k: u32) -> Option<&Group> {
        self.group_index_of(node, k).map(|gi| &self.groups[gi])
    }

    pub(crate) fn group_index_of(&self, node: NodeId, k: u32) -> Option<usize> {
        if node < 1 || node > self.spec.n_nodes || k < 1 || k > self.spec.n_transceivers {
            return None;
        }
        self.slots[((node - 1) * self.spec.n_transceivers + (k - 1)) as usize]
    }

    pub fn group_by_channel(&self, channel: ChannelId) -> Option<&Group> {
        self.by_channel.get(&channel).map(|&gi| &self.groups[gi])
    }

    /// Groups of transceiver index `k`, in construction order.
    pub fn groups_for(&self, k: u32) -> impl Iterator<Item = &Group> {
        self.groups.iter().filter(move |g| g.tx_index == k)
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node < 1 || node > self.spec.n_nodes {
            Err(Error::OutOfRange(node, self.spec.n_nodes))
        } else {
            Ok(())
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("assignment serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("bad assignment document: {e}")))
    }

    /// Human-readable group table, one block per transceiver index.
    pub fn table(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let spec = &self.spec;
        let _ = write!(out, "{} N={} T={}", spec.scheme, spec.n_nodes, spec.n_transceivers);
        if let Some(m) = spec.m {
            let _ = write!(out, " M={m}");
        }
        let _ = writeln!(out, " channels={}", self.channel_count());
        let mut indices: Vec<u32> = self.groups.iter().map(|g| g.tx_index).collect();
        indices.sort_unstable();
        indices.dedup();
        for k in indices {
            let _ = writeln!(out, "Tx-{k} groups:");
            for g in self.groups_for(k) {
                let members: Vec<String> = g.members.iter().map(|m| m.to_string()).collect();
                let _ = writeln!(out, "  f{:<4} #{:<4} [{}]", g.channel, g.number, members.join(", "));
            }
        }
        out
    }
}

/// `Some(log2(m))` when `m` is a power of two `>= 2`.
pub fn exact_log2(m: u32) -> Option<u32> {
    (m >= 2 && m.is_power_of_two()).then(|| m.trailing_zeros())
}

/// Smallest `m` with `m^t >= n`, and whether the power is exact.
pub(crate) fn ceil_root(n: u32, t: u32) -> (u32, bool) {
    let n64 = u64::from(n);
    let mut m = (n64 as f64).powf(1.0 / f64::from(t)).round().max(1.0) as u64;
    while m > 1 && (m - 1).checked_pow(t).is_some_and(|p| p >= n64) {
        m -= 1;
    }
    while m.checked_pow(t).is_some_and(|p| p < n64) {
        m += 1;
    }
    (m as u32, m.pow(t) == n64)
}
