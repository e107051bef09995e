//! Exact throughput, load and efficiency arithmetic.
//!
//! Everything here is a [`Rational`]; convert to `f64` only for display.
//! Rates are packets per slot per node, and one channel carries at most one
//! packet per slot.

mod load;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::assignment::{self, exact_log2, NetworkSpec, Scheme};
use crate::routing::{avg_path_length, RouterKind};
use crate::{Error, Rational, Result};

pub use load::{brute_force_load, capacity_share, log2_delta1, LoadReport, TransceiverLoad};

fn rat(n: u64) -> Rational {
    Rational::from_integer(i128::from(n))
}

fn need_m(m: u32) -> Result<u64> {
    if m < 2 {
        return Err(Error::invalid(format!("need M >= 2, got {m}")));
    }
    Ok(u64::from(m))
}

/// Load on either transceiver of a `HINT-2` node at input rate `lambda`:
/// `lambda M (M - 1) / (N - 1)` with `N = M^2`.
pub fn hint2_transceiver_load(lambda: Rational, m: u32) -> Result<Rational> {
    let m = need_m(m)?;
    Ok(lambda * rat(m * (m - 1)) / rat(m * m - 1))
}

/// Largest `HINT-2` input rate whose transceiver load fits the `1/M` share:
/// `(N - 1) / (M^2 (M - 1)) = 1/M + 1/M^2`.
pub fn hint2_max_rate(m: u32) -> Result<Rational> {
    let m = need_m(m)?;
    Ok(rat(m * m - 1) / rat(m * m * (m - 1)))
}

/// Sources whose packets leave node 1 on its `k`-th transceiver: `M^(T-k)`.
pub fn hint_source_count(m: u32, t: u32, k: u32) -> Result<u64> {
    let m = need_m(m)?;
    check_level(t, k)?;
    Ok(m.pow(t - k))
}

fn check_level(t: u32, k: u32) -> Result<()> {
    if k < 1 || k > t {
        return Err(Error::invalid(format!("transceiver {k} outside 1..={t}")));
    }
    Ok(())
}

/// Load on the `k`-th transceiver of a `HINT-T` node:
/// `M^(T-k)` sources times `(M - 1) M^(k-1)` destinations at
/// `lambda / (M^T - 1)` each, i.e. `lambda (M - 1) M^(T-1) / (M^T - 1)` for
/// every `k`.
pub fn hint_t_transceiver_load(lambda: Rational, m: u32, t: u32, k: u32) -> Result<Rational> {
    let sources = hint_source_count(m, t, k)?;
    let m = u64::from(m);
    let destinations = (m - 1) * m.pow(k - 1);
    Ok(lambda * rat(sources * destinations) / rat(m.pow(t) - 1))
}

/// `(M^T - 1) / (M^T (M - 1))`, the `HINT-T` feasibility limit.
pub fn hint_t_max_rate(m: u32, t: u32) -> Result<Rational> {
    let m = need_m(m)?;
    let n = m.pow(t);
    Ok(rat(n - 1) / rat(n * (m - 1)))
}

/// Upper bound on the load of one `LOG-2` Tx-1 group:
/// `M (log2 M + 1) (log2 M)^2 lambda / (M log2 M - 1)`.
///
/// The factor `(log2 M)^2 lambda / (M log2 M - 1)` is the rate of one
/// group-to-group flow. The bound is loose at small `M`; compare with
/// [`brute_force_load`].
pub fn log2_group_load_bound(lambda: Rational, m: u32) -> Result<Rational> {
    let l = u64::from(exact_log2(m).ok_or_else(|| Error::invalid(format!("M={m} is not a power of two >= 2")))?);
    let m = u64::from(m);
    let n = m * l;
    if n < 2 {
        return Err(Error::invalid("LOG-2 bound needs at least 2 nodes"));
    }
    Ok(rat(m * (l + 1) * l * l) * lambda / rat(n - 1))
}

/// `M (log2 M + 1)`, the bound on the group-level Tx-1 path length sum.
pub fn log2_delta1_bound(m: u32) -> Result<u64> {
    let l = exact_log2(m).ok_or_else(|| Error::invalid(format!("M={m} is not a power of two >= 2")))?;
    Ok(u64::from(m) * u64::from(l + 1))
}

/// Whether a per-node rate comes with a construction that achieves it, or
/// is only the `N lambda L <= C` ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Achievable,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticRate {
    pub rate: Rational,
    pub channels: u64,
    pub kind: RateKind,
}

/// Closed-form channel count of the scheme.
pub fn channels_used(spec: &NetworkSpec) -> Result<u64> {
    let n = u64::from(spec.n_nodes);
    let t = spec.n_transceivers;
    match spec.scheme {
        Scheme::Hint if !spec.is_padded() => {
            let m = u64::from(spec.m.ok_or_else(|| Error::invalid("HINT spec without M"))?);
            Ok(u64::from(t) * m.pow(t - 1))
        }
        Scheme::Hint => Ok(assignment::build(spec)?.channel_count() as u64),
        Scheme::Log2 => Ok(2 * u64::from(spec.m.ok_or_else(|| Error::invalid("LOG-2 spec without M"))?)),
        Scheme::Ring => Ok(n),
        Scheme::Grid => Ok(2 * n),
    }
}

/// Per-node rate and channel count the scheme is analysed to support.
///
/// `HINT-T` achieves `1/M` on `T M^(T-1)` channels and `LOG-2` achieves
/// `1/(log2 M)^2` on `2M`. `RING`, `GRID` and padded `HINT` only get the
/// ceiling `C / (N L)` with `L` their exact mean route length.
pub fn analytic_rate(spec: &NetworkSpec) -> Result<AnalyticRate> {
    match spec.scheme {
        Scheme::Hint if !spec.is_padded() => {
            let m = spec.m.ok_or_else(|| Error::invalid("HINT spec without M"))?;
            Ok(AnalyticRate {
                rate: Rational::new(1, i128::from(m)),
                channels: channels_used(spec)?,
                kind: RateKind::Achievable,
            })
        }
        Scheme::Log2 => {
            let m = spec.m.ok_or_else(|| Error::invalid("LOG-2 spec without M"))?;
            let l = exact_log2(m).ok_or_else(|| Error::invalid(format!("M={m} is not a power of two >= 2")))?;
            Ok(AnalyticRate {
                rate: Rational::new(1, i128::from(l * l)),
                channels: channels_used(spec)?,
                kind: RateKind::Achievable,
            })
        }
        _ => {
            let a = assignment::build(spec)?;
            let l_bar = avg_path_length(&a, RouterKind::native(spec.scheme))?;
            let c = a.channel_count() as u64;
            Ok(AnalyticRate {
                rate: rat(c) / (rat(u64::from(spec.n_nodes)) * l_bar),
                channels: c,
                kind: RateKind::UpperBound,
            })
        }
    }
}

/// `eta = N lambda / C`.
pub fn efficiency(n: u32, lambda: Rational, c: u64) -> Result<Rational> {
    if c < 1 {
        return Err(Error::invalid("efficiency needs at least one channel"));
    }
    Ok(rat(u64::from(n)) * lambda / rat(c))
}

/// `N lambda L <= C`: total transmissions per slot cannot exceed the
/// number of channels.
pub fn tradeoff_check(n: u32, lambda: Rational, l_bar: Rational, c: u64) -> bool {
    rat(u64::from(n)) * lambda * l_bar <= rat(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub n_nodes: u32,
    pub channels_used: u64,
    pub per_node_rate: Rational,
    pub rate_kind: RateKind,
    pub avg_path_length: Rational,
    pub efficiency: Rational,
}

impl EfficiencyReport {
    /// `N lambda L <= C` for the reported rate.
    pub fn respects_tradeoff(&self) -> bool {
        tradeoff_check(
            self.n_nodes,
            self.per_node_rate,
            self.avg_path_length,
            self.channels_used,
        )
    }
}

/// Analytic rate, exact mean path length under the native router, and the
/// resulting efficiency.
pub fn efficiency_report(spec: &NetworkSpec) -> Result<EfficiencyReport> {
    let a = assignment::build(spec)?;
    let rate = analytic_rate(a.spec())?;
    let l_bar = avg_path_length(&a, RouterKind::native(spec.scheme))?;
    Ok(EfficiencyReport {
        n_nodes: a.n_nodes(),
        channels_used: rate.channels,
        per_node_rate: rate.rate,
        rate_kind: rate.kind,
        avg_path_length: l_bar,
        efficiency: efficiency(a.n_nodes(), rate.rate, rate.channels)?,
    })
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Padding;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn hint(n: u32, t: u32) -> NetworkSpec {
        assignment::build_hint(n, t, Padding::Strict).unwrap().spec().to_owned()
    }

    #[test]
    fn hint2_load_examples() {
        assert_eq!(hint2_transceiver_load(r(1, 4), 4).unwrap(), r(1, 5));
        assert!(r(1, 5) <= r(1, 4));
        assert_eq!(hint2_transceiver_load(Rational::zero(), 7).unwrap(), Rational::zero());
        let boundary = r(1, 4) + r(1, 16);
        assert_eq!(hint2_max_rate(4).unwrap(), boundary);
        assert_eq!(hint2_transceiver_load(boundary, 4).unwrap(), r(1, 4));
    }

    #[test]
    fn hint_t_load_examples() {
        assert_eq!(hint_t_transceiver_load(r(1, 3), 3, 3, 2).unwrap(), r(3, 13));
        for k in 1..=3 {
            assert_eq!(hint_t_transceiver_load(r(1, 3), 3, 3, k).unwrap(), r(3, 13));
        }
        assert_eq!(hint_source_count(3, 3, 1).unwrap(), 9);
        let boundary = hint_t_max_rate(3, 3).unwrap();
        assert_eq!(boundary, r(26, 54));
        assert_eq!(hint_t_transceiver_load(boundary, 3, 3, 1).unwrap(), r(1, 3));
        assert!(hint_t_transceiver_load(r(1, 3), 3, 3, 4).is_err());
    }

    #[test]
    fn hint_t_reduces_to_hint2() {
        for m in 2..=9 {
            let lam = r(1, i128::from(m));
            assert_eq!(
                hint_t_transceiver_load(lam, m, 2, 1).unwrap(),
                hint2_transceiver_load(lam, m).unwrap()
            );
            assert_eq!(hint_t_max_rate(m, 2).unwrap(), hint2_max_rate(m).unwrap());
        }
    }

    #[test]
    fn source_count_matches_level_sum() {
        // 1 + sum_{i=1}^{T-k} M^(i-1) (M - 1)
        for m in 2..=5u32 {
            for t in 2..=4 {
                for k in 1..=t {
                    let sum: u64 = 1
                        + (1..=t - k)
                            .map(|i| u64::from(m).pow(i - 1) * u64::from(m - 1))
                            .sum::<u64>();
                    assert_eq!(hint_source_count(m, t, k).unwrap(), sum);
                }
            }
        }
    }

    #[test]
    fn log2_bound_examples() {
        assert_eq!(log2_group_load_bound(r(1, 9), 8).unwrap(), r(32, 23));
        assert_eq!(log2_group_load_bound(Rational::zero(), 16).unwrap(), Rational::zero());
        assert_eq!(log2_delta1_bound(8).unwrap(), 32);
        assert!(log2_group_load_bound(r(1, 9), 6).is_err());
    }

    #[test]
    fn analytic_rates() {
        let h2 = analytic_rate(&hint(16, 2)).unwrap();
        assert_eq!((h2.rate, h2.channels, h2.kind), (r(1, 4), 8, RateKind::Achievable));
        let h4 = analytic_rate(&hint(16, 4)).unwrap();
        assert_eq!((h4.rate, h4.channels), (r(1, 2), 32));
        let log = analytic_rate(assignment::build_log2(8).unwrap().spec()).unwrap();
        assert_eq!((log.rate, log.channels), (r(1, 9), 16));
        let ring = analytic_rate(assignment::build_ring(16).unwrap().spec()).unwrap();
        assert_eq!(ring.kind, RateKind::UpperBound);
        assert_eq!(ring.channels, 16);
    }

    #[test]
    fn efficiency_identities() {
        for m in 2..=5u32 {
            for t in 2..=4u32 {
                let eta = efficiency(m.pow(t), r(1, i128::from(m)), u64::from(t) * u64::from(m).pow(t - 1)).unwrap();
                assert_eq!(eta, r(1, i128::from(t)));
            }
        }
        for l in 1..=5u32 {
            let m = 1u32 << l;
            let eta = efficiency(m * l, r(1, i128::from(l * l)), 2 * u64::from(m)).unwrap();
            assert_eq!(eta, r(1, 2 * i128::from(l)));
        }
        assert!(efficiency(4, r(1, 2), 0).is_err());
    }

    #[test]
    fn tradeoff_examples() {
        assert!(tradeoff_check(16, r(1, 4), r(3, 2), 8));
        assert!(tradeoff_check(16, Rational::zero(), r(5, 1), 8));
        assert!(!tradeoff_check(16, Rational::one(), r(2, 1), 8));
        // HINT-2 N=16 with its exact mean path length 8/5
        let report = efficiency_report(&hint(16, 2)).unwrap();
        assert_eq!(report.avg_path_length, r(8, 5));
        assert!(report.respects_tradeoff());
        assert_eq!(report.efficiency, r(1, 2));
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&r(6, 4)), "3/2");
        assert_eq!(format_rational(&r(4, 2)), "2");
        assert_eq!(to_f64(&r(1, 4)), 0.25);
    }
}
