use super::{ceil_root, exact_log2, wrap_mod, Assignment, Group, NetworkSpec, Padding, Scheme};
use crate::{Error, NodeId, Result};

/// Builds the assignment described by `spec`.
///
/// `spec.m` is consulted only for `LOG-2`; when absent it is recovered from
/// `N = M log2 M`.
pub fn build(spec: &NetworkSpec) -> Result<Assignment> {
    match spec.scheme {
        Scheme::Hint => build_hint(spec.n_nodes, spec.n_transceivers, spec.padding),
        Scheme::Log2 => {
            let m = match spec.m {
                Some(m) => m,
                None => log2_groups_for(spec.n_nodes)?,
            };
            let a = build_log2(m)?;
            if a.n_nodes() != spec.n_nodes {
                return Err(Error::invalid(format!(
                    "LOG-2 with M={m} has {} nodes, not {}",
                    a.n_nodes(),
                    spec.n_nodes
                )));
            }
            Ok(a)
        }
        Scheme::Ring => {
            expect_four(spec)?;
            build_ring(spec.n_nodes)
        }
        Scheme::Grid => {
            expect_four(spec)?;
            build_grid(spec.n_nodes)
        }
    }
}

fn expect_four(spec: &NetworkSpec) -> Result<()> {
    if spec.n_transceivers != 4 {
        return Err(Error::invalid(format!(
            "{} needs T=4, got {}",
            spec.scheme, spec.n_transceivers
        )));
    }
    Ok(())
}

fn log2_groups_for(n: u32) -> Result<u32> {
    (1..=26)
        .map(|l: u32| (1u32 << l, l))
        .find(|&(m, l)| u64::from(m) * u64::from(l) == u64::from(n))
        .map(|(m, _)| m)
        .ok_or_else(|| Error::invalid(format!("N={n} is not of the form M log2 M")))
}

fn assemble(spec: NetworkSpec, mut groups: Vec<Group>) -> Result<Assignment> {
    groups.sort_by_key(|g| (g.tx_index, g.number));
    for (c, g) in groups.iter_mut().enumerate() {
        g.channel = c as u32 + 1;
    }
    Assignment::from_parts(spec, groups)
}

fn group(tx_index: u32, number: u32, members: Vec<NodeId>) -> Group {
    Group {
        channel: 0,
        tx_index,
        number,
        members,
        member_tx: None,
    }
}

/// Hierarchical interleaved assignment `HINT-T`.
///
/// With `M = N^(1/T)`, Tx-k group `(i-1)M^(k-1) + j` holds nodes
/// `(i-1)M^k + j + c M^(k-1)` for `c = 0..M-1`. Tx-1 groups are runs of `M`
/// consecutive nodes; each higher level interleaves one node from each of
/// `M` adjacent lower-level blocks.
pub fn build_hint(n_nodes: u32, t: u32, padding: Padding) -> Result<Assignment> {
    if t < 2 {
        return Err(Error::invalid(format!("HINT needs T >= 2, got {t}")));
    }
    if n_nodes < 2 {
        return Err(Error::invalid(format!("need N >= 2, got {n_nodes}")));
    }
    let (m, exact) = ceil_root(n_nodes, t);
    if !exact && padding == Padding::Strict {
        return Err(Error::Divisibility(format!(
            "N={n_nodes} is not a perfect {t}-th power"
        )));
    }
    let total = u64::from(m).pow(t);
    if total > u64::from(u32::MAX) {
        return Err(Error::invalid("padded HINT network too large"));
    }
    let m64 = u64::from(m);
    let mut groups = Vec::new();
    for k in 1..=t {
        let below = m64.pow(k - 1);
        let block = below * m64;
        for number in 1..=m64.pow(t - 1) {
            let i = (number - 1) / below + 1;
            let j = (number - 1) % below + 1;
            let members: Vec<NodeId> = (0..m64)
                .map(|c| (i - 1) * block + j + c * below)
                .filter(|&node| node <= u64::from(n_nodes))
                .map(|node| node as NodeId)
                .collect();
            if !members.is_empty() {
                groups.push(group(k, number as u32, members));
            }
        }
    }
    let spec = NetworkSpec {
        n_nodes,
        n_transceivers: t,
        scheme: Scheme::Hint,
        m: Some(m),
        padding,
    };
    assemble(spec, groups)
}

/// Logarithmic assignment `LOG-2` on `N = M log2 M` nodes with `T = 2`.
///
/// Tx-1 groups are runs of `log2 M` consecutive nodes. The `i`-th member of
/// Tx-2 group `j` is the `i`-th node of Tx-1 group `(j - 1 + 2^(i-1)) mod M`,
/// so a Tx-2 group reaches Tx-1 groups at distances `1, 2, 4, ...` around the
/// ring of groups.
pub fn build_log2(m: u32) -> Result<Assignment> {
    let l = exact_log2(m).ok_or_else(|| Error::invalid(format!("LOG-2 needs M a power of two >= 2, got {m}")))?;
    let n_nodes = m
        .checked_mul(l)
        .ok_or_else(|| Error::invalid("LOG-2 network too large"))?;
    let mut groups = Vec::with_capacity(2 * m as usize);
    for k in 1..=m {
        groups.push(group(1, k, ((k - 1) * l + 1..=k * l).collect()));
    }
    for j in 1..=m {
        let members = (1..=l)
            .map(|i| {
                let g = wrap_mod(u64::from(j - 1) + (1u64 << (i - 1)), m);
                (g - 1) * l + i
            })
            .collect();
        groups.push(group(2, j, members));
    }
    let spec = NetworkSpec {
        n_nodes,
        n_transceivers: 2,
        scheme: Scheme::Log2,
        m: Some(m),
        padding: Padding::Strict,
    };
    assemble(spec, groups)
}

/// `RING`: `N/4` Tx-1 groups of four consecutive nodes; Tx-r groups for
/// `r = 2, 3, 4` are the same windows slid `r` positions around the node
/// circle.
pub fn build_ring(n_nodes: u32) -> Result<Assignment> {
    if n_nodes == 0 || !n_nodes.is_multiple_of(4) {
        return Err(Error::Divisibility(format!(
            "RING needs N divisible by 4, got {n_nodes}"
        )));
    }
    let n = u64::from(n_nodes);
    let mut groups = Vec::with_capacity(n_nodes as usize);
    for r in 1..=4u32 {
        let shift = if r == 1 { 0 } else { u64::from(r) };
        for g in 1..=n_nodes / 4 {
            let start = 4 * u64::from(g - 1) + shift;
            let members = (0..4).map(|t| ((start + t) % n) as NodeId + 1).collect();
            groups.push(group(r, g, members));
        }
    }
    let spec = NetworkSpec {
        n_nodes,
        n_transceivers: 4,
        scheme: Scheme::Ring,
        m: None,
        padding: Padding::Strict,
    };
    assemble(spec, groups)
}

/// `GRID`: a `sqrt(N) x sqrt(N)` torus in row-major order with one channel
/// per link.
///
/// Transceivers 1..4 face east, west, south and north. A horizontal link is
/// a Tx-1 group numbered after its western node (members `[west, east]`
/// on radios 1 and 2); a vertical link is a Tx-3 group numbered after its
/// northern node (radios 3 and 4).
pub fn build_grid(n_nodes: u32) -> Result<Assignment> {
    let side = (f64::from(n_nodes)).sqrt().round() as u32;
    if side * side != n_nodes {
        return Err(Error::invalid(format!("GRID needs a perfect square N, got {n_nodes}")));
    }
    if side < 3 {
        return Err(Error::invalid(format!("GRID needs side >= 3, got {side}")));
    }
    let id = |r: u32, c: u32| r * side + c + 1;
    let mut groups = Vec::with_capacity(2 * n_nodes as usize);
    for r in 0..side {
        for c in 0..side {
            let here = id(r, c);
            let east = id(r, (c + 1) % side);
            let south = id((r + 1) % side, c);
            groups.push(Group {
                channel: 0,
                tx_index: 1,
                number: here,
                members: vec![here, east],
                member_tx: Some(vec![1, 2]),
            });
            groups.push(Group {
                channel: 0,
                tx_index: 3,
                number: here,
                members: vec![here, south],
                member_tx: Some(vec![3, 4]),
            });
        }
    }
    let spec = NetworkSpec {
        n_nodes,
        n_transceivers: 4,
        scheme: Scheme::Grid,
        m: None,
        padding: Padding::Strict,
    };
    assemble(spec, groups)
}
