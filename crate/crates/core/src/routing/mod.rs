//! Hop-by-hop routing over an [`Assignment`].
//!
//! Routes are computed once at the source and never change in flight.

mod bfs;
mod hint;
mod log2;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, EffectiveTopology, Scheme};
use crate::{ChannelId, Error, NodeId, Rational, Result};

pub use bfs::route_bfs;
pub use hint::route_hint;
pub use log2::route_log2;

/// One transmission: `from` sends to `to` on `channel` using its radio `tx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hop {
    pub from: NodeId,
    pub to: NodeId,
    pub channel: ChannelId,
    pub tx: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Route {
    pub source: NodeId,
    pub destination: NodeId,
    pub hops: Vec<Hop>,
}

impl Route {
    pub(crate) fn empty(source: NodeId, destination: NodeId) -> Self {
        Route {
            source,
            destination,
            hops: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Visited nodes, source first.
    pub fn path(&self) -> Vec<NodeId> {
        std::iter::once(self.source)
            .chain(self.hops.iter().map(|h| h.to))
            .collect()
    }

    /// One line per hop: `from-to channel f<c> tx <k>`.
    pub fn annotations(&self) -> Vec<String> {
        self.hops
            .iter()
            .map(|h| format!("{}-{} channel f{} tx {}", h.from, h.to, h.channel, h.tx))
            .collect()
    }

    /// Checks that the hops chain from source to destination over channels
    /// both endpoints actually share.
    pub fn check(&self, a: &Assignment) -> std::result::Result<(), String> {
        let mut at = self.source;
        for h in &self.hops {
            if h.from != at {
                return Err(format!("hop {}-{} does not continue from {at}", h.from, h.to));
            }
            let g = a
                .group_by_channel(h.channel)
                .ok_or_else(|| format!("unknown channel {}", h.channel))?;
            if g.tx_of(h.from) != Some(h.tx) || !g.contains(h.to) || h.from == h.to {
                return Err(format!("{}-{} is not a link on channel {}", h.from, h.to, h.channel));
            }
            at = h.to;
        }
        if at != self.destination {
            return Err(format!("route ends at {at}, not {}", self.destination));
        }
        Ok(())
    }
}

impl fmt::Display for Route {
    /// `s-r1-...-d`; an empty route prints as the lone source.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path().iter().map(|n| n.to_string()).collect();
        f.write_str(&path.join("-"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouterKind {
    Hint,
    Log2,
    Bfs,
}

impl RouterKind {
    /// The router each scheme is designed for; `RING` and `GRID` have no
    /// dedicated rule and use shortest paths.
    pub fn native(scheme: Scheme) -> Self {
        match scheme {
            Scheme::Hint => RouterKind::Hint,
            Scheme::Log2 => RouterKind::Log2,
            Scheme::Ring | Scheme::Grid => RouterKind::Bfs,
        }
    }
}

impl FromStr for RouterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hint" => Ok(RouterKind::Hint),
            "log2" => Ok(RouterKind::Log2),
            "bfs" => Ok(RouterKind::Bfs),
            other => Err(Error::invalid(format!("unknown router `{other}`"))),
        }
    }
}

impl fmt::Display for RouterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RouterKind::Hint => "hint",
            RouterKind::Log2 => "log2",
            RouterKind::Bfs => "bfs",
        })
    }
}

/// A router bound to one assignment, caching the effective topology and
/// per-destination BFS distances.
pub struct Router<'a> {
    assignment: &'a Assignment,
    kind: RouterKind,
    topology: EffectiveTopology,
    dist_to: Vec<OnceLock<Vec<Option<u32>>>>,
}

impl<'a> Router<'a> {
    pub fn new(assignment: &'a Assignment, kind: RouterKind) -> Result<Self> {
        let scheme = assignment.scheme();
        let compatible = match kind {
            RouterKind::Hint => scheme == Scheme::Hint,
            RouterKind::Log2 => scheme == Scheme::Log2,
            RouterKind::Bfs => true,
        };
        if !compatible {
            return Err(Error::invalid(format!(
                "{kind} router cannot route a {scheme} assignment"
            )));
        }
        let n = assignment.n_nodes() as usize;
        Ok(Router {
            assignment,
            kind,
            topology: EffectiveTopology::new(assignment),
            dist_to: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Router of the scheme's own kind.
    pub fn native(assignment: &'a Assignment) -> Result<Self> {
        Router::new(assignment, RouterKind::native(assignment.scheme()))
    }

    pub fn kind(&self) -> RouterKind {
        self.kind
    }

    pub fn assignment(&self) -> &'a Assignment {
        self.assignment
    }

    pub fn topology(&self) -> &EffectiveTopology {
        &self.topology
    }

    fn distances_to(&self, d: NodeId) -> &[Option<u32>] {
        // undirected graph: distance to d equals distance from d
        self.dist_to[(d - 1) as usize].get_or_init(|| self.topology.distances_from(d))
    }

    pub fn route(&self, s: NodeId, d: NodeId) -> Result<Route> {
        self.assignment.check_node(s)?;
        self.assignment.check_node(d)?;
        if s == d {
            return Ok(Route::empty(s, d));
        }
        match self.kind {
            RouterKind::Hint => hint::route(self.assignment, s, d, Some(&|from| self.bfs(from, d))),
            RouterKind::Log2 => log2::route(self.assignment, s, d),
            RouterKind::Bfs => self.bfs(s, d),
        }
    }

    fn bfs(&self, s: NodeId, d: NodeId) -> Result<Route> {
        bfs::route_with(&self.topology, self.distances_to(d), s, d)
    }

    /// Hop count of the route from `s` to `d`.
    pub fn hop_count(&self, s: NodeId, d: NodeId) -> Result<u32> {
        match self.kind {
            RouterKind::Bfs => {
                self.assignment.check_node(s)?;
                self.assignment.check_node(d)?;
                self.distances_to(d)[(s - 1) as usize].ok_or(Error::Unreachable { from: s, to: d })
            }
            _ => Ok(self.route(s, d)?.len() as u32),
        }
    }
}

/// Exact mean hop count over all ordered pairs `s != d`.
pub fn avg_path_length(a: &Assignment, kind: RouterKind) -> Result<Rational> {
    let router = Router::new(a, kind)?;
    let n = a.n_nodes();
    if n < 2 {
        return Err(Error::invalid("average path length needs at least 2 nodes"));
    }
    let mut total: i128 = 0;
    for s in 1..=n {
        for d in 1..=n {
            if s != d {
                total += i128::from(router.hop_count(s, d)?);
            }
        }
    }
    Ok(Rational::new(total, i128::from(n) * i128::from(n - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{build_grid, build_hint, build_log2, build_ring, Padding};

    #[test]
    fn display_formats() {
        let a = build_log2(8).unwrap();
        let r = route_log2(&a, 3, 18).unwrap();
        assert_eq!(r.to_string(), "3-1-12-10-14-13-17-18");
        assert_eq!(r.annotations()[0], "3-1 channel f1 tx 1");
        assert_eq!(Route::empty(5, 5).to_string(), "5");
    }

    #[test]
    fn router_rejects_mismatched_scheme() {
        let a = build_ring(16).unwrap();
        assert!(Router::new(&a, RouterKind::Hint).is_err());
        assert!(Router::new(&a, RouterKind::Log2).is_err());
        assert!(Router::new(&a, RouterKind::Bfs).is_ok());
        assert!(route_hint(&a, 1, 2).is_err());
        assert!(route_log2(&a, 1, 2).is_err());
    }

    #[test]
    fn router_checks_ids() {
        let a = build_hint(16, 2, Padding::Strict).unwrap();
        let r = Router::native(&a).unwrap();
        assert!(matches!(r.route(0, 3), Err(Error::OutOfRange(0, 16))));
        assert!(matches!(r.route(3, 17), Err(Error::OutOfRange(17, 16))));
        assert!(r.route(7, 7).unwrap().is_empty());
    }

    #[test]
    fn hint2_four_average() {
        // 1 hop for the Tx-1 and Tx-2 neighbour, 2 hops for the opposite corner
        let a = build_hint(4, 2, Padding::Strict).unwrap();
        assert_eq!(avg_path_length(&a, RouterKind::Hint).unwrap(), Rational::new(4, 3));
        assert_eq!(avg_path_length(&a, RouterKind::Bfs).unwrap(), Rational::new(4, 3));
    }

    #[test]
    fn hint2_sixteen_average() {
        // per source: 3 Tx-1 neighbours + 3 Tx-2 neighbours at 1 hop, 9 others at 2
        let a = build_hint(16, 2, Padding::Strict).unwrap();
        assert_eq!(avg_path_length(&a, RouterKind::Hint).unwrap(), Rational::new(24, 15));
    }

    #[test]
    fn average_at_least_one() {
        for a in [build_ring(16).unwrap(), build_grid(16).unwrap(), build_log2(4).unwrap()] {
            let l = avg_path_length(&a, RouterKind::native(a.scheme())).unwrap();
            assert!(l >= Rational::from_integer(1));
        }
    }

    #[test]
    fn routes_validate_against_assignment() {
        let a = build_grid(25).unwrap();
        let r = Router::native(&a).unwrap();
        for s in 1..=25 {
            for d in 1..=25 {
                r.route(s, d).unwrap().check(&a).unwrap();
            }
        }
    }
}
