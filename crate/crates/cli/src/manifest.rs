use std::path::{Path, PathBuf};

use mcmr_core::assignment::{NetworkSpec, Padding, Scheme};
use mcmr_core::routing::RouterKind;
use mcmr_core::sim::{Scheduler, SearchBounds, SweepPoint};
use serde::{Deserialize, Serialize};

use crate::output::{CmdResult, Failure, FORMAT_VERSION};

/// A batch of experiments read from JSON.
///
/// ```json
/// {
///   "format_version": 1,
///   "horizon": 50000,
///   "entries": [{ "scheme": "grid", "n": 16, "seeds": [1, 2] }]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    #[serde(default = "current_version")]
    pub format_version: u32,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    /// Defaults to a tenth of the horizon.
    #[serde(default)]
    pub warmup: Option<u64>,
    #[serde(default)]
    pub scheduler: Scheduler,
    #[serde(default)]
    pub search: SearchBounds,
    #[serde(default)]
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub scheme: Scheme,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub t: Option<u32>,
    #[serde(default)]
    pub m: Option<u32>,
    #[serde(default)]
    pub padding: Padding,
    #[serde(default)]
    pub router: Option<RouterKind>,
    /// Fixed arrival rates; empty means one saturation search per seed.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

fn current_version() -> u32 {
    FORMAT_VERSION
}

fn default_horizon() -> u64 {
    50_000
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

impl ExperimentManifest {
    pub fn load(path: &Path) -> CmdResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read manifest {}: {e}", path.display())))?;
        let m: ExperimentManifest =
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("bad manifest {}: {e}", path.display())))?;
        if m.format_version != FORMAT_VERSION {
            return Err(Failure::input(format!(
                "manifest format version {} is not supported (expected {FORMAT_VERSION})",
                m.format_version
            )));
        }
        Ok(m)
    }

    pub fn warmup(&self) -> u64 {
        self.warmup.unwrap_or(self.horizon / 10)
    }

    /// Every `(entry, seed, rate)` combination, in manifest order.
    pub fn points(&self) -> Vec<(Entry, std::result::Result<SweepPoint, String>)> {
        let mut out = Vec::new();
        for e in &self.entries {
            let rates: Vec<Option<f64>> = if e.lambdas.is_empty() {
                vec![None]
            } else {
                e.lambdas.iter().copied().map(Some).collect()
            };
            for &seed in &e.seeds {
                for &lambda in &rates {
                    let point = network_spec(e.scheme, e.n, e.t, e.m, e.padding).map(|spec| SweepPoint {
                        spec,
                        router: e.router,
                        lambda,
                        seed,
                        horizon: self.horizon,
                        warmup: self.warmup(),
                        scheduler: self.scheduler,
                        search: self.search,
                    });
                    out.push((e.clone(), point.map_err(|f| f.message)));
                }
            }
        }
        out
    }
}

/// Default transceiver count: 2 for `HINT` and `LOG-2`, 4 for `RING` and
/// `GRID`.
pub fn default_t(scheme: Scheme) -> u32 {
    match scheme {
        Scheme::Hint | Scheme::Log2 => 2,
        Scheme::Ring | Scheme::Grid => 4,
    }
}

/// Fills in the defaults of a partially given network. `LOG-2` accepts
/// either `M` or `N = M log2 M`.
pub fn network_spec(
    scheme: Scheme,
    n: Option<u32>,
    t: Option<u32>,
    m: Option<u32>,
    padding: Padding,
) -> CmdResult<NetworkSpec> {
    let t = t.unwrap_or(default_t(scheme));
    let n = match (scheme, n, m) {
        (_, Some(n), _) => n,
        (Scheme::Log2, None, Some(m)) => {
            let l = mcmr_core::assignment::exact_log2(m)
                .ok_or_else(|| Failure::input(format!("M={m} is not a power of two >= 2")))?;
            m * l
        }
        _ => return Err(Failure::input(format!("{scheme} needs --n"))),
    };
    let m = if scheme == Scheme::Log2 { m } else { None };
    Ok(NetworkSpec {
        n_nodes: n,
        n_transceivers: t,
        scheme,
        m,
        padding,
    })
}
