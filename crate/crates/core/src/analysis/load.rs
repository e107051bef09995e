use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, Scheme};
use crate::routing::{Router, RouterKind};
use crate::{ChannelId, Error, NodeId, Rational, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransceiverLoad {
    pub node: NodeId,
    pub tx: u32,
    pub channel: ChannelId,
    /// Packets per slot this radio must send.
    pub offered: Rational,
    /// Fraction of its channel this radio is scheduled to own.
    pub capacity: Rational,
}

/// Exact offered load of every radio and channel under uniform all-pairs
/// traffic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub scheme: Scheme,
    pub lambda: Rational,
    pub entries: Vec<TransceiverLoad>,
    /// Total packets per slot on each channel.
    pub channel_loads: BTreeMap<ChannelId, Rational>,
    /// Every radio's offered load fits its scheduled share.
    pub feasible: bool,
}

impl LoadReport {
    pub fn entry(&self, node: NodeId, tx: u32) -> Option<&TransceiverLoad> {
        self.entries.iter().find(|e| e.node == node && e.tx == tx)
    }

    /// Every channel carries at most one packet per slot.
    pub fn channels_within_capacity(&self) -> bool {
        let one = Rational::from_integer(1);
        self.channel_loads.values().all(|l| *l <= one)
    }

    pub fn max_channel_load(&self) -> Rational {
        self.channel_loads.values().copied().max().unwrap_or_default()
    }
}

/// Share of its channel a radio owns under the scheme's TDMA schedule:
/// equal slices for every member, except that `LOG-2` Tx-2 channels belong
/// entirely to the group's first member.
pub fn capacity_share(a: &Assignment, node: NodeId, tx: u32) -> Option<Rational> {
    let g = a.group_of(node, tx)?;
    if a.scheme() == Scheme::Log2 && tx == 2 {
        let owner = g.members.first() == Some(&node);
        return Some(Rational::from_integer(i128::from(owner)));
    }
    Some(Rational::new(1, g.len() as i128))
}

/// Routes every ordered pair and charges `lambda / (N - 1)` per hop to the
/// sending radio and its channel.
pub fn brute_force_load(a: &Assignment, kind: RouterKind, lambda: Rational) -> Result<LoadReport> {
    let router = Router::new(a, kind)?;
    let n = a.n_nodes();
    let t = a.n_transceivers();
    if n < 2 {
        return Err(Error::invalid("load needs at least 2 nodes"));
    }
    let mut sends = vec![0u64; (n * t) as usize];
    let mut per_channel: BTreeMap<ChannelId, u64> = a.groups().iter().map(|g| (g.channel, 0)).collect();
    for s in 1..=n {
        for d in 1..=n {
            if s == d {
                continue;
            }
            for hop in router.route(s, d)?.hops {
                sends[((hop.from - 1) * t + (hop.tx - 1)) as usize] += 1;
                *per_channel.entry(hop.channel).or_default() += 1;
            }
        }
    }
    let per_pair = lambda / Rational::from_integer(i128::from(n - 1));
    let mut entries = Vec::with_capacity(sends.len());
    let mut feasible = true;
    for node in 1..=n {
        for tx in 1..=t {
            let Some(g) = a.group_of(node, tx) else { continue };
            let offered = per_pair * Rational::from_integer(i128::from(sends[((node - 1) * t + (tx - 1)) as usize]));
            let capacity = capacity_share(a, node, tx).unwrap_or_default();
            feasible &= offered <= capacity;
            entries.push(TransceiverLoad {
                node,
                tx,
                channel: g.channel,
                offered,
                capacity,
            });
        }
    }
    let channel_loads = per_channel
        .into_iter()
        .map(|(c, count)| (c, per_pair * Rational::from_integer(i128::from(count))))
        .collect();
    Ok(LoadReport {
        scheme: a.scheme(),
        lambda,
        entries,
        channel_loads,
        feasible,
    })
}

/// Group-level Tx-1 path length sum for flows leaving `LOG-2` Tx-1 group
/// `group`.
///
/// For every other destination group the flow's length is the largest
/// number of Tx-1 transmissions over all member-to-member routes between
/// the two groups.
pub fn log2_delta1(a: &Assignment, group: u32) -> Result<u64> {
    if a.scheme() != Scheme::Log2 {
        return Err(Error::invalid(format!(
            "group path lengths need LOG-2, got {}",
            a.scheme()
        )));
    }
    let m = a.spec().m.ok_or_else(|| Error::invalid("LOG-2 assignment without M"))?;
    if group < 1 || group > m {
        return Err(Error::invalid(format!("Tx-1 group {group} outside 1..={m}")));
    }
    let router = Router::new(a, RouterKind::Log2)?;
    let members = |g: u32| {
        a.groups_for(1)
            .find(|x| x.number == g)
            .map(|x| x.members.clone())
            .unwrap_or_default()
    };
    let sources = members(group);
    let mut total = 0u64;
    for g in (1..=m).filter(|&g| g != group) {
        let mut worst = 0;
        for &s in &sources {
            for d in members(g) {
                let tx1 = router.route(s, d)?.hops.iter().filter(|h| h.tx == 1).count() as u64;
                worst = worst.max(tx1);
            }
        }
        total += worst;
    }
    Ok(total)
}
