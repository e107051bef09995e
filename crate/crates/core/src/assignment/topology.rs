use std::collections::VecDeque;

use super::Assignment;
use crate::{ChannelId, NodeId};

/// Undirected edge `a < b` carried by `channel`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub channel: ChannelId,
}

/// One adjacency entry: reach `neighbor` on `channel` using local radio `tx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Link {
    pub neighbor: NodeId,
    pub channel: ChannelId,
    pub tx: u32,
}

/// Multigraph induced on the nodes by shared channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveTopology {
    n_nodes: u32,
    edges: Vec<Edge>,
    // adjacency[node - 1], sorted by (neighbor, channel)
    adjacency: Vec<Vec<Link>>,
}

impl EffectiveTopology {
    pub fn new(a: &Assignment) -> Self {
        let n = a.n_nodes();
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); n as usize];
        for g in a.groups() {
            for (p, &u) in g.members.iter().enumerate() {
                for (q, &v) in g.members.iter().enumerate() {
                    if u == v {
                        continue;
                    }
                    adjacency[(u - 1) as usize].push(Link {
                        neighbor: v,
                        channel: g.channel,
                        tx: g.tx_at(p),
                    });
                    if p < q {
                        edges.push(Edge {
                            a: u.min(v),
                            b: u.max(v),
                            channel: g.channel,
                        });
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        for links in &mut adjacency {
            links.sort_unstable();
            links.dedup();
        }
        EffectiveTopology {
            n_nodes: n,
            edges,
            adjacency,
        }
    }

    pub fn n_nodes(&self) -> u32 {
        self.n_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn links(&self, node: NodeId) -> &[Link] {
        &self.adjacency[(node - 1) as usize]
    }

    /// Distinct neighbours of `node`, ascending.
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let links = self.links(node);
        links
            .iter()
            .enumerate()
            .filter(move |(i, l)| *i == 0 || links[i - 1].neighbor != l.neighbor)
            .map(|(_, l)| l.neighbor)
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.neighbors(node).count()
    }

    /// Hop distances from `from`, indexed by `node - 1`.
    pub fn distances_from(&self, from: NodeId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n_nodes as usize];
        let mut queue = VecDeque::new();
        dist[(from - 1) as usize] = Some(0);
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            let du = dist[(u - 1) as usize].unwrap();
            for v in self.neighbors(u) {
                let slot = &mut dist[(v - 1) as usize];
                if slot.is_none() {
                    *slot = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n_nodes == 0 || self.distances_from(1).iter().all(Option::is_some)
    }

    /// Longest shortest path, or `None` when disconnected.
    pub fn diameter(&self) -> Option<u32> {
        let mut best = 0;
        for s in 1..=self.n_nodes {
            for d in self.distances_from(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }
}

/// Convenience wrapper for [`EffectiveTopology::new`].
pub fn effective_topology(a: &Assignment) -> EffectiveTopology {
    EffectiveTopology::new(a)
}
