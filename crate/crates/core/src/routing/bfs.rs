use super::{Hop, Route};
use crate::assignment::EffectiveTopology;
use crate::{Error, NodeId, Result};

/// Minimum-hop route; among equally short continuations the smallest next
/// node id wins, and the smallest channel between two nodes is used.
pub fn route_bfs(t: &EffectiveTopology, s: NodeId, d: NodeId) -> Result<Route> {
    for node in [s, d] {
        if node < 1 || node > t.n_nodes() {
            return Err(Error::OutOfRange(node, t.n_nodes()));
        }
    }
    if s == d {
        return Ok(Route::empty(s, d));
    }
    route_with(t, &t.distances_from(d), s, d)
}

/// Walks down a precomputed distance-to-`d` field.
pub(crate) fn route_with(t: &EffectiveTopology, dist: &[Option<u32>], s: NodeId, d: NodeId) -> Result<Route> {
    let at = |n: NodeId| dist[(n - 1) as usize];
    let mut remaining = at(s).ok_or(Error::Unreachable { from: s, to: d })?;
    let mut route = Route::empty(s, d);
    let mut cur = s;
    while cur != d {
        // links are sorted by (neighbor, channel)
        let link = t
            .links(cur)
            .iter()
            .find(|l| at(l.neighbor) == Some(remaining - 1))
            .expect("BFS field has a downhill neighbour");
        route.hops.push(Hop {
            from: cur,
            to: link.neighbor,
            channel: link.channel,
            tx: link.tx,
        });
        cur = link.neighbor;
        remaining -= 1;
    }
    Ok(route)
}
