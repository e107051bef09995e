use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{run, saturation_search, Scheduler, SimConfig};
use crate::analysis::efficiency;
use crate::assignment::{build, NetworkSpec, Scheme};
use crate::routing::RouterKind;
use crate::{Rational, Result};

/// Bisection bounds for saturation points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            lo: 1.0 / 256.0,
            hi: 0.5,
            tolerance: 1.0 / 512.0,
        }
    }
}

/// One sweep point: a fixed arrival rate, or a saturation search when
/// `lambda` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub spec: NetworkSpec,
    pub router: Option<RouterKind>,
    pub lambda: Option<f64>,
    pub seed: u64,
    pub horizon: u64,
    pub warmup: u64,
    pub scheduler: Scheduler,
    pub search: SearchBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub n_nodes: u32,
    pub n_transceivers: u32,
    pub m: Option<u32>,
    pub router: RouterKind,
    pub seed: u64,
    pub horizon: u64,
    pub warmup: u64,
    pub scheduler: Scheduler,
    pub channels: u64,
    /// The fixed arrival rate, if any.
    pub lambda: Option<f64>,
    /// Saturation point, exact since bisection only visits dyadic rationals.
    pub lambda_sat: Option<Rational>,
    /// Measured rate of the run at `lambda` or `lambda_sat`.
    pub delivered_rate: Rational,
    pub avg_path_length: Option<Rational>,
    /// `N * delivered_rate / C`.
    pub efficiency: Rational,
    pub stable: bool,
    pub tradeoff_ok: bool,
    pub conserved: bool,
}

/// Exact value of a float whose binary expansion fits in `i128`, such as
/// any bisection point inside `[2^-60, 2^60]`.
pub fn dyadic(x: f64) -> Rational {
    if x == 0.0 {
        return Rational::default();
    }
    let (mut mantissa, mut exponent, sign) = x.integer_decode();
    let shift = mantissa.trailing_zeros();
    mantissa >>= shift;
    exponent += shift as i16;
    let mut r = Rational::from_integer(i128::from(sign) * i128::from(mantissa));
    let two = Rational::from_integer(2);
    if exponent >= 0 {
        r *= two.pow(i32::from(exponent));
    } else {
        r /= two.pow(-i32::from(exponent));
    }
    r
}

pub fn run_point(p: &SweepPoint) -> Result<SweepRow> {
    let a = build(&p.spec)?;
    let mut cfg = SimConfig::new(a, 0.0, p.horizon, p.seed);
    cfg.warmup = p.warmup;
    cfg.scheduler = p.scheduler;
    if let Some(r) = p.router {
        cfg.router = r;
    }
    let (lambda, lambda_sat) = match p.lambda {
        Some(l) => (l, None),
        None => {
            let s = saturation_search(&cfg, p.search.lo, p.search.hi, p.search.tolerance)?;
            (s, Some(dyadic(s)))
        }
    };
    let r = run(&cfg.with_lambda(lambda))?;
    let delivered_rate = r.delivered_rate_exact();
    Ok(SweepRow {
        scheme: r.scheme,
        n_nodes: r.n_nodes,
        n_transceivers: r.n_transceivers,
        m: cfg.assignment.spec().m,
        router: r.router,
        seed: r.seed,
        horizon: r.horizon,
        warmup: r.warmup,
        scheduler: r.scheduler,
        channels: r.channels,
        lambda: p.lambda,
        lambda_sat,
        delivered_rate,
        avg_path_length: r.avg_path_length,
        efficiency: efficiency(r.n_nodes, delivered_rate, r.channels)?,
        stable: r.stable,
        tradeoff_ok: r.respects_tradeoff(),
        conserved: r.conserves_packets(),
    })
}
