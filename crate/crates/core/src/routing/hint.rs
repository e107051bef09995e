use super::{Hop, Route};
use crate::assignment::{Assignment, EffectiveTopology, LevelSetIndex, Scheme};
use crate::{Error, NodeId, Result};

/// Routes `s -> d` under `HINT-T`.
///
/// At node `u` with `k = k(u, d)`: deliver directly on radio `k` when `d`
/// shares `u`'s Tx-k group (always true for `k = 1`); otherwise relay to the
/// Tx-k neighbour `r` minimising `k(r, d)`, smallest id on ties. `k(u, d)`
/// strictly drops at every relay, so a route never exceeds `T` hops.
///
/// On a padded assignment the ideal relay may be a removed node; the rest of
/// the route then follows the shortest path from the stranded node.
pub fn route_hint(a: &Assignment, s: NodeId, d: NodeId) -> Result<Route> {
    a.check_node(s)?;
    a.check_node(d)?;
    if s == d {
        return Ok(Route::empty(s, d));
    }
    if a.spec().is_padded() {
        let topo = EffectiveTopology::new(a);
        route(a, s, d, Some(&|from| super::route_bfs(&topo, from, d)))
    } else {
        route(a, s, d, None)
    }
}

pub(crate) type Fallback<'f> = &'f dyn Fn(NodeId) -> Result<Route>;

pub(crate) fn route(a: &Assignment, s: NodeId, d: NodeId, fallback: Option<Fallback<'_>>) -> Result<Route> {
    let spec = a.spec();
    if spec.scheme != Scheme::Hint {
        return Err(Error::invalid(format!("HINT routing on a {} assignment", spec.scheme)));
    }
    let m = spec.m.ok_or_else(|| Error::invalid("HINT assignment without M"))?;
    let levels = LevelSetIndex::new(m, spec.n_transceivers)?;

    let mut route = Route::empty(s, d);
    let mut cur = s;
    while cur != d {
        let k = levels.k_min(cur, d);
        let group = a
            .group_of(cur, k)
            .ok_or_else(|| Error::invalid(format!("node {cur} has no Tx-{k} group")))?;
        let hop = |to| Hop {
            from: cur,
            to,
            channel: group.channel,
            tx: k,
        };
        if k == 1 || group.contains(d) {
            route.hops.push(hop(d));
            break;
        }
        let relay = group
            .members
            .iter()
            .copied()
            .filter(|&r| r != cur)
            .min_by_key(|&r| (levels.k_min(r, d), r))
            .filter(|&r| levels.k_min(r, d) < k);
        match (relay, fallback) {
            (Some(r), _) => {
                route.hops.push(hop(r));
                cur = r;
            }
            (None, Some(rest)) => {
                route.hops.extend(rest(cur)?.hops);
                break;
            }
            (None, None) => return Err(Error::Unreachable { from: s, to: d }),
        }
    }
    Ok(route)
}
