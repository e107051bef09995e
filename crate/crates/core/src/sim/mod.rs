//! Slotted simulation of a channel assignment under uniform random traffic.
//!
//! Every slot each node generates a packet with probability `lambda` for a
//! uniformly chosen other node. The packet's route is fixed at creation and it
//! waits in the FIFO queue of the radio its next hop uses. Each channel then
//! carries at most one packet, sent by the member its scheduler picks, and
//! the packets moved this slot are forwarded or delivered once every channel
//! has been served.

mod engine;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::tradeoff_check;
use crate::assignment::{Assignment, Scheme};
use crate::routing::RouterKind;
use crate::{Error, NodeId, Rational, Result};

pub use engine::{Simulator, Transmission};
pub use sweep::{dyadic, run_point, SearchBounds, SweepPoint, SweepRow};

/// Growth of the largest queue, in packets, that is never mistaken for noise.
pub const GROWTH_FLOOR: u64 = 32;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheduler {
    /// Members own the channel in turn whether or not they have traffic.
    #[default]
    StrictTdma,
    /// The next backlogged member after the last sender transmits.
    WorkConservingRr,
}

impl FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strict-tdma" | "tdma" => Ok(Scheduler::StrictTdma),
            "work-conserving-rr" | "rr" => Ok(Scheduler::WorkConservingRr),
            other => Err(Error::invalid(format!("unknown scheduler `{other}`"))),
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheduler::StrictTdma => "strict-tdma",
            Scheduler::WorkConservingRr => "work-conserving-rr",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub assignment: Assignment,
    pub router: RouterKind,
    /// Arrival probability per node per slot; values above 1 act as 1.
    pub lambda: f64,
    pub horizon: u64,
    /// Slots before statistics start.
    pub warmup: u64,
    pub seed: u64,
    pub scheduler: Scheduler,
    /// Packets per queue, `None` for unbounded.
    pub queue_capacity: Option<usize>,
}

impl SimConfig {
    /// Native router, strict TDMA, unbounded queues and a warmup of a tenth
    /// of the horizon.
    pub fn new(assignment: Assignment, lambda: f64, horizon: u64, seed: u64) -> Self {
        SimConfig {
            router: RouterKind::native(assignment.scheme()),
            assignment,
            lambda,
            horizon,
            warmup: horizon / 10,
            seed,
            scheduler: Scheduler::StrictTdma,
            queue_capacity: None,
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        SimConfig { lambda, ..self.clone() }
    }

    fn check(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "arrival rate {} must be finite and >= 0",
                self.lambda
            )));
        }
        if self.horizon < self.warmup + 3 {
            return Err(Error::invalid(format!(
                "horizon {} must exceed warmup {} by at least 3 slots",
                self.horizon, self.warmup
            )));
        }
        if self.assignment.n_nodes() < 2 {
            return Err(Error::invalid("simulation needs at least 2 nodes"));
        }
        if self.queue_capacity == Some(0) {
            return Err(Error::invalid("queue capacity must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueStats {
    pub node: NodeId,
    pub tx: u32,
    pub max: u64,
    /// Time-averaged length over the measured slots.
    pub mean: f64,
}

/// Queue-growth verdict.
///
/// The measured slots are split into thirds and the largest queue length
/// seen in each is recorded. A run is unstable when the last third's peak
/// exceeds the middle third's by more than `max(middle / 8, GROWTH_FLOOR)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stability {
    pub thirds_max: [u64; 3],
    pub stable: bool,
}

impl Stability {
    pub fn judge(thirds_max: [usize; 3]) -> Self {
        let t = thirds_max.map(|x| x as u64);
        let allowance = (t[1] / 8).max(GROWTH_FLOOR);
        Stability {
            thirds_max: t,
            stable: t[2] <= t[1] + allowance,
        }
    }
}

struct Counts {
    generated: u64,
    delivered: u64,
    dropped: u64,
    in_flight: u64,
    window_generated: u64,
    window_delivered: u64,
    window_hops: u64,
}

/// Outcome of one run together with the parameters that produced it.
///
/// Totals cover the whole run. Rates, path lengths and queue statistics
/// only count slots after warmup, and only packets born after warmup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub scheme: Scheme,
    pub n_nodes: u32,
    pub n_transceivers: u32,
    pub channels: u64,
    pub router: RouterKind,
    pub scheduler: Scheduler,
    pub lambda: f64,
    pub horizon: u64,
    pub warmup: u64,
    pub seed: u64,
    pub queue_capacity: Option<usize>,

    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,

    pub window_generated: u64,
    pub window_delivered: u64,
    pub window_hops: u64,
    /// Delivered packets per node per slot.
    pub throughput_per_node: f64,
    /// Delivered packets per slot, by source.
    pub delivered_rate: Vec<f64>,
    /// Mean hops of delivered packets; absent when nothing was delivered.
    pub avg_path_length: Option<Rational>,
    pub queues: Vec<QueueStats>,
    pub stability: Stability,
    pub stable: bool,
}

impl SimResult {
    fn assemble(
        cfg: &SimConfig,
        c: Counts,
        delivered_rate: Vec<f64>,
        queues: Vec<QueueStats>,
        stability: Stability,
        n: usize,
    ) -> Self {
        let a = &cfg.assignment;
        let window = cfg.horizon - cfg.warmup;
        SimResult {
            scheme: a.scheme(),
            n_nodes: a.n_nodes(),
            n_transceivers: a.n_transceivers(),
            channels: a.channel_count() as u64,
            router: cfg.router,
            scheduler: cfg.scheduler,
            lambda: cfg.lambda,
            horizon: cfg.horizon,
            warmup: cfg.warmup,
            seed: cfg.seed,
            queue_capacity: cfg.queue_capacity,
            generated: c.generated,
            delivered: c.delivered,
            dropped: c.dropped,
            in_flight: c.in_flight,
            window_generated: c.window_generated,
            window_delivered: c.window_delivered,
            window_hops: c.window_hops,
            throughput_per_node: c.window_delivered as f64 / (n as f64 * window as f64),
            delivered_rate,
            avg_path_length: (c.window_delivered > 0)
                .then(|| Rational::new(i128::from(c.window_hops), i128::from(c.window_delivered))),
            queues,
            stable: stability.stable,
            stability,
        }
    }

    /// Exact delivered packets per node per slot.
    pub fn delivered_rate_exact(&self) -> Rational {
        let window = i128::from(self.horizon - self.warmup);
        Rational::new(i128::from(self.window_delivered), i128::from(self.n_nodes) * window)
    }

    /// `generated = delivered + dropped + in flight`.
    pub fn conserves_packets(&self) -> bool {
        self.generated == self.delivered + self.dropped + self.in_flight
    }

    /// The measured rate and path length fit through the channels used.
    pub fn respects_tradeoff(&self) -> bool {
        let l_bar = self.avg_path_length.unwrap_or_default();
        tradeoff_check(self.n_nodes, self.delivered_rate_exact(), l_bar, self.channels)
    }

    pub fn max_queue(&self) -> u64 {
        self.queues.iter().map(|q| q.max).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

pub fn run(cfg: &SimConfig) -> Result<SimResult> {
    Ok(Simulator::new(cfg)?.finish(cfg))
}

/// Largest arrival rate in `[lo, hi]`, to within `tolerance`, whose run is
/// stable. Every probe reuses the base seed.
pub fn saturation_search(base: &SimConfig, lo: f64, hi: f64, tolerance: f64) -> Result<f64> {
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || lo < 0.0 {
        return Err(Error::invalid(format!(
            "search interval [{lo}, {hi}] is empty or negative"
        )));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::invalid("search tolerance must be positive"));
    }
    let stable = |lambda: f64| run(&base.with_lambda(lambda)).map(|r| r.stable);
    if !stable(lo)? {
        return Err(Error::NoStablePoint(lo));
    }
    if stable(hi)? {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tolerance {
        let mid = (lo + hi) / 2.0;
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
