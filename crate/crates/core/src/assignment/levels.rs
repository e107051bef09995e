//! Index structures used by the `HINT` and `LOG-2` routers.

use std::ops::RangeInclusive;

use super::exact_log2;
use crate::{Error, NodeId, Result};

/// Modular reduction onto `1..=m`: a multiple of `m` maps to `m`, anything
/// else to its positive remainder.
pub fn wrap_mod(a: u64, m: u32) -> u32 {
    let r = (a % u64::from(m)) as u32;
    if r == 0 {
        m
    } else {
        r
    }
}

/// Level sets of a `HINT-T` network on `M^T` nodes.
///
/// The level-`k` set `i` is the block of `M^k` consecutive nodes
/// `(i-1)M^k + 1 ..= iM^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelSetIndex {
    m: u32,
    t: u32,
}

impl LevelSetIndex {
    pub fn new(m: u32, t: u32) -> Result<Self> {
        if m < 2 || t < 1 {
            return Err(Error::invalid(format!(
                "level sets need M >= 2 and T >= 1, got M={m} T={t}"
            )));
        }
        u32::try_from(u64::from(m).pow(t)).map_err(|_| Error::invalid("level set network too large"))?;
        Ok(LevelSetIndex { m, t })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n_nodes(&self) -> u32 {
        self.m.pow(self.t)
    }

    /// Number of level-`k` sets, `M^(T-k)`.
    pub fn count(&self, k: u32) -> u32 {
        self.m.pow(self.t - k)
    }

    pub fn set(&self, i: u32, k: u32) -> RangeInclusive<NodeId> {
        let size = self.m.pow(k);
        (i - 1) * size + 1..=i * size
    }

    pub fn sets(&self, k: u32) -> impl Iterator<Item = RangeInclusive<NodeId>> + '_ {
        (1..=self.count(k)).map(move |i| self.set(i, k))
    }

    /// The `i` with `node` in level-`k` set `i`.
    pub fn index_of(&self, node: NodeId, k: u32) -> u32 {
        node.div_ceil(self.m.pow(k))
    }

    /// Smallest level whose sets put `a` and `b` together; 0 when `a == b`.
    pub fn k_min(&self, a: NodeId, b: NodeId) -> u32 {
        if a == b {
            return 0;
        }
        // ceil(x / M^k) agrees iff (x - 1) / M^k agrees
        let (mut x, mut y) = (a - 1, b - 1);
        let mut k = 0;
        while x != y {
            x /= self.m;
            y /= self.m;
            k += 1;
        }
        k
    }

    fn check(&self, node: NodeId) -> Result<()> {
        if node < 1 || node > self.n_nodes() {
            Err(Error::OutOfRange(node, self.n_nodes()))
        } else {
            Ok(())
        }
    }
}

/// Index of the level-`k` set containing `node`, i.e. `ceil(node / M^k)`.
pub fn level_index(node: NodeId, k: u32, m: u32, t: u32) -> Result<u32> {
    let idx = LevelSetIndex::new(m, t)?;
    idx.check(node)?;
    if k < 1 || k > t {
        return Err(Error::invalid(format!("level {k} outside 1..={t}")));
    }
    Ok(idx.index_of(node, k))
}

/// Smallest `k` such that one level-`k` set holds both `a` and `b`.
///
/// Always `<= t` because the single level-`T` set is the whole network.
/// Returns 0 for `a == b`.
pub fn k_min(a: NodeId, b: NodeId, m: u32, t: u32) -> Result<u32> {
    let idx = LevelSetIndex::new(m, t)?;
    idx.check(a)?;
    idx.check(b)?;
    Ok(idx.k_min(a, b))
}

/// Cover sets of a `LOG-2` network with `M` Tx-1 groups.
///
/// The `i`-th member of Tx-2 group `j` relays towards the Tx-1 groups in
/// `U(i, j)`: `2^(i-1)` consecutive group numbers (one more at the top
/// level) starting at `(j - 1 + 2^(i-1)) mod M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverSetIndex {
    m: u32,
    levels: u32,
}

impl CoverSetIndex {
    pub fn new(m: u32) -> Result<Self> {
        let levels =
            exact_log2(m).ok_or_else(|| Error::invalid(format!("cover sets need M a power of two >= 2, got {m}")))?;
        Ok(CoverSetIndex { m, levels })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `log2 M`, the number of members per Tx-2 group.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    fn start(&self, i: u32, j: u32) -> u64 {
        u64::from(j - 1) + (1u64 << (i - 1))
    }

    fn len(&self, i: u32) -> u64 {
        let base = 1u64 << (i - 1);
        if i == self.levels {
            base + 1
        } else {
            base
        }
    }

    pub fn cover_set(&self, i: u32, j: u32) -> Vec<u32> {
        let start = self.start(i, j);
        (0..self.len(i)).map(|c| wrap_mod(start + c, self.m)).collect()
    }

    pub fn cover_sets(&self, j: u32) -> Vec<Vec<u32>> {
        (1..=self.levels).map(|i| self.cover_set(i, j)).collect()
    }

    /// The level `i` with Tx-1 group `g` in `U(i, j)`.
    pub fn covering_level(&self, j: u32, g: u32) -> u32 {
        // U(i, j) covers forward offsets 2^(i-1) - 1 ..= 2^i - 2 from j; the
        // top level also takes the remaining offsets up to M - 1.
        let offset = (g + self.m - j) % self.m;
        ((offset + 1).ilog2() + 1).min(self.levels)
    }
}

/// `[U(1, j), ..., U(log2 M, j)]`.
pub fn cover_sets(j: u32, m: u32) -> Result<Vec<Vec<u32>>> {
    let idx = CoverSetIndex::new(m)?;
    if j < 1 || j > m {
        return Err(Error::invalid(format!("Tx-2 group {j} outside 1..={m}")));
    }
    Ok(idx.cover_sets(j))
}
