//! Static channel assignment for single-collision-domain multi-channel
//! multi-radio (MC-MR) wireless networks.
//!
//! Every node can hear every other node, so a channel can carry at most one
//! successful transmission per slot no matter who sends it. Capacity grows
//! only by spreading transceivers over orthogonal channels, which turns the
//! physically fully-connected network into a multi-hop effective topology.
//!
//! The crate provides:
//!
//! * [`assignment`]: the hierarchical interleaved (`HINT-T`), logarithmic
//!   (`LOG-2`), `RING` and `GRID` assignments plus their level-set and
//!   cover-set indices,
//! * [`routing`]: the scheme-specific hop-by-hop routers and a BFS
//!   shortest-path oracle,
//! * [`analysis`]: exact closed-form and brute-force load, rate and
//!   efficiency computations,
//! * [`sim`]: a deterministic slotted TDMA simulator with saturation search.

pub mod analysis;
pub mod assignment;
mod error;
pub mod routing;
pub mod sim;

pub use error::{Error, Result};

/// Exact rational used for every analytic quantity.
pub type Rational = num_rational::Ratio<i128>;

/// Node identifier. Nodes are numbered `1..=N`.
pub type NodeId = u32;

/// Channel identifier, `1..=C` within one assignment.
pub type ChannelId = u32;
