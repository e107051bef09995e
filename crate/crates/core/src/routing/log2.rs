use super::{Hop, Route};
use crate::assignment::{Assignment, CoverSetIndex, Scheme};
use crate::{Error, NodeId, Result};

/// Routes `s -> d` under `LOG-2`.
///
/// A node outside the destination's Tx-1 group hands the packet to the first
/// node of its own Tx-1 group (skipped when it already is that node). The
/// first node heads the Tx-2 group with the same number and either delivers
/// directly or passes the packet to the Tx-2 member whose cover set holds the
/// destination's Tx-1 group. Only first nodes ever transmit on Tx-2.
pub fn route_log2(a: &Assignment, s: NodeId, d: NodeId) -> Result<Route> {
    a.check_node(s)?;
    a.check_node(d)?;
    route(a, s, d)
}

pub(crate) fn route(a: &Assignment, s: NodeId, d: NodeId) -> Result<Route> {
    let spec = a.spec();
    if spec.scheme != Scheme::Log2 {
        return Err(Error::invalid(format!("LOG-2 routing on a {} assignment", spec.scheme)));
    }
    let m = spec.m.ok_or_else(|| Error::invalid("LOG-2 assignment without M"))?;
    let covers = CoverSetIndex::new(m)?;
    let l = covers.levels();
    let group_of = |n: NodeId| (n - 1) / l + 1;
    let first_of = |g: u32| (g - 1) * l + 1;
    let channel = |n: NodeId, k: u32| {
        a.group_of(n, k)
            .map(|g| g.channel)
            .ok_or_else(|| Error::invalid(format!("node {n} has no Tx-{k} group")))
    };

    let mut route = Route::empty(s, d);
    let mut cur = s;
    let target = group_of(d);
    // each Tx-2 relay at least halves the remaining group distance
    let max_hops = 2 * a.n_nodes() as usize + 2;
    while cur != d {
        if route.len() > max_hops {
            return Err(Error::Unreachable { from: s, to: d });
        }
        if group_of(cur) == target {
            route.hops.push(Hop {
                from: cur,
                to: d,
                channel: channel(cur, 1)?,
                tx: 1,
            });
            break;
        }
        let head = first_of(group_of(cur));
        if cur != head {
            route.hops.push(Hop {
                from: cur,
                to: head,
                channel: channel(cur, 1)?,
                tx: 1,
            });
            cur = head;
        }
        let tx2 = a
            .group_of(cur, 2)
            .ok_or_else(|| Error::invalid(format!("node {cur} has no Tx-2 group")))?;
        if tx2.members.first() != Some(&cur) {
            return Err(Error::invalid(format!("node {cur} does not head its Tx-2 group")));
        }
        let next = if tx2.contains(d) {
            d
        } else {
            let level = covers.covering_level(tx2.number, target);
            if level < 2 {
                return Err(Error::Unreachable { from: s, to: d });
            }
            tx2.members[(level - 1) as usize]
        };
        route.hops.push(Hop {
            from: cur,
            to: next,
            channel: tx2.channel,
            tx: 2,
        });
        cur = next;
    }
    Ok(route)
}
