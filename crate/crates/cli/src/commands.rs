use std::path::{Path, PathBuf};

use mcmr_core::analysis::{efficiency_report, format_rational, to_f64};
use mcmr_core::assignment::{build, validate as check, Assignment, NetworkSpec, Padding, Scheme};
use mcmr_core::routing::{Router, RouterKind};
use mcmr_core::sim::{run, run_point, Scheduler, SimConfig, SimResult, SweepRow};
use mcmr_core::Rational;
use rayon::prelude::*;
use serde::Serialize;

use crate::manifest::{network_spec, Entry, ExperimentManifest};
use crate::output::{csv_string, emit, CmdResult, Failure, FORMAT_VERSION};
use crate::NetArgs;

fn spec_of(net: &NetArgs) -> CmdResult<NetworkSpec> {
    network_spec(net.scheme, net.n, net.t, net.m, net.padding)
}

fn base_name(spec: &NetworkSpec) -> String {
    format!("{}-n{}-t{}", spec.scheme, spec.n_nodes, spec.n_transceivers)
}

pub fn assign(out: Option<&Path>, net: &NetArgs, json: bool) -> CmdResult {
    let spec = spec_of(net)?;
    let a = build(&spec)?;
    let doc = a.to_json() + "\n";
    let table = a.table();
    if json {
        print!("{doc}");
    } else {
        print!("{table}");
    }
    if let Some(dir) = out {
        let name = base_name(a.spec());
        for (file, body) in [
            (format!("assignment-{name}.json"), &doc),
            (format!("assignment-{name}.txt"), &table),
        ] {
            let path = crate::output::write_atomic(dir, &file, body.as_bytes())?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

pub fn route(net: &NetArgs, from: u32, to: u32, kind: Option<RouterKind>) -> CmdResult {
    let a = build(&spec_of(net)?)?;
    let router = match kind {
        Some(k) => Router::new(&a, k)?,
        None => Router::native(&a)?,
    };
    let r = router.route(from, to)?;
    println!("{r}");
    for line in r.annotations() {
        println!("  {line}");
    }
    Ok(())
}

fn exact(r: Option<Rational>) -> (String, String) {
    match r {
        Some(r) => (format_rational(&r), to_f64(&r).to_string()),
        None => (String::new(), String::new()),
    }
}

#[derive(Serialize)]
struct AnalyzeRow {
    format_version: u32,
    scheme: Scheme,
    n: Option<u32>,
    t: Option<u32>,
    m: Option<u32>,
    padding: Padding,
    channels_used: Option<u64>,
    per_node_rate: String,
    per_node_rate_f64: String,
    rate_kind: String,
    avg_path_length: String,
    avg_path_length_f64: String,
    efficiency: String,
    efficiency_f64: String,
    tradeoff_ok: Option<bool>,
    error: String,
}

const ANALYZE_HEADER: [&str; 16] = [
    "format_version",
    "scheme",
    "n",
    "t",
    "m",
    "padding",
    "channels_used",
    "per_node_rate",
    "per_node_rate_f64",
    "rate_kind",
    "avg_path_length",
    "avg_path_length_f64",
    "efficiency",
    "efficiency_f64",
    "tradeoff_ok",
    "error",
];

fn analyze_row(scheme: Scheme, n: Option<u32>, t: Option<u32>, m: Option<u32>, padding: Padding) -> AnalyzeRow {
    let mut row = AnalyzeRow {
        format_version: FORMAT_VERSION,
        scheme,
        n,
        t,
        m,
        padding,
        channels_used: None,
        per_node_rate: String::new(),
        per_node_rate_f64: String::new(),
        rate_kind: String::new(),
        avg_path_length: String::new(),
        avg_path_length_f64: String::new(),
        efficiency: String::new(),
        efficiency_f64: String::new(),
        tradeoff_ok: None,
        error: String::new(),
    };
    let report = network_spec(scheme, n, t, m, padding)
        .map_err(|f| f.message)
        .and_then(|spec| build(&spec).map_err(|e| e.to_string()))
        .and_then(|a| efficiency_report(a.spec()).map(|r| (a, r)).map_err(|e| e.to_string()));
    match report {
        Ok((a, r)) => {
            row.n = Some(a.n_nodes());
            row.t = Some(a.n_transceivers());
            row.m = a.spec().m;
            row.channels_used = Some(r.channels_used);
            (row.per_node_rate, row.per_node_rate_f64) = exact(Some(r.per_node_rate));
            row.rate_kind = serde_json::to_value(r.rate_kind)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            (row.avg_path_length, row.avg_path_length_f64) = exact(Some(r.avg_path_length));
            (row.efficiency, row.efficiency_f64) = exact(Some(r.efficiency));
            row.tradeoff_ok = Some(r.respects_tradeoff());
        }
        Err(e) => row.error = e,
    }
    row
}

/// Scheme, N, T, M and padding of one analysis row.
type Job = (Scheme, Option<u32>, Option<u32>, Option<u32>, Padding);

pub fn analyze(
    out: Option<&Path>,
    schemes: &[Scheme],
    ns: &[u32],
    t: Option<u32>,
    m: Option<u32>,
    padding: Padding,
    manifest: Option<&Path>,
) -> CmdResult {
    let jobs: Vec<Job> = match manifest {
        Some(path) => ExperimentManifest::load(path)?
            .entries
            .iter()
            .map(|e| (e.scheme, e.n, e.t, e.m, e.padding))
            .collect(),
        None if ns.is_empty() => schemes.iter().map(|&s| (s, None, t, m, padding)).collect(),
        None => schemes
            .iter()
            .flat_map(|&s| ns.iter().map(move |&n| (s, Some(n), t, m, padding)))
            .collect(),
    };
    let rows: Vec<AnalyzeRow> = jobs
        .par_iter()
        .map(|&(s, n, t, m, p)| analyze_row(s, n, t, m, p))
        .collect();
    emit(out, "analyze.csv", &csv_string(&ANALYZE_HEADER, &rows)?)?;
    finish_rows(rows.iter().map(|r| (r.error.is_empty(), r.tradeoff_ok != Some(false))))
}

/// Exit status for a batch: row errors are input failures, tradeoff
/// violations are invariant failures.
fn finish_rows(rows: impl Iterator<Item = (bool, bool)>) -> CmdResult {
    let (mut failed, mut violated) = (0, 0);
    for (ok, physical) in rows {
        failed += usize::from(!ok);
        violated += usize::from(!physical);
    }
    if violated > 0 {
        return Err(Failure::invariant(format!("{violated} row(s) violate N*lambda*L <= C")));
    }
    if failed > 0 {
        return Err(Failure::input(format!("{failed} row(s) failed; see the error column")));
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    format_version: u32,
    padding: Padding,
    #[serde(flatten)]
    result: &'a SimResult,
    tradeoff_ok: bool,
    conserved: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    out: Option<&Path>,
    net: &NetArgs,
    lambda: f64,
    slots: u64,
    warmup: Option<u64>,
    seed: u64,
    scheduler: Scheduler,
    router: Option<RouterKind>,
    queue_capacity: Option<usize>,
) -> CmdResult {
    let spec = spec_of(net)?;
    let mut cfg = SimConfig::new(build(&spec)?, lambda, slots, seed);
    cfg.warmup = warmup.unwrap_or(slots / 10);
    cfg.scheduler = scheduler;
    cfg.queue_capacity = queue_capacity;
    if let Some(r) = router {
        cfg.router = r;
    }
    let r = run(&cfg)?;
    let doc = SimulateOutput {
        format_version: FORMAT_VERSION,
        padding: spec.padding,
        result: &r,
        tradeoff_ok: r.respects_tradeoff(),
        conserved: r.conserves_packets(),
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::invariant(e.to_string()))? + "\n";
    emit(out, &format!("simulate-{}-seed{seed}.json", base_name(&spec)), &text)?;
    if !doc.tradeoff_ok || !doc.conserved {
        return Err(Failure::invariant(
            "simulation result violates conservation or N*lambda*L <= C",
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn manifest_from_flags(
    schemes: &[Scheme],
    ns: &[u32],
    t: Option<u32>,
    padding: Padding,
    lambdas: &[f64],
    seeds: &[u64],
    slots: u64,
    warmup: Option<u64>,
    scheduler: Scheduler,
) -> ExperimentManifest {
    let entries = schemes
        .iter()
        .flat_map(|&scheme| {
            let ns: Vec<Option<u32>> = if ns.is_empty() {
                vec![None]
            } else {
                ns.iter().copied().map(Some).collect()
            };
            ns.into_iter().map(move |n| Entry {
                scheme,
                n,
                t,
                m: None,
                padding,
                router: None,
                lambdas: lambdas.to_vec(),
                seeds: seeds.to_vec(),
            })
        })
        .collect();
    ExperimentManifest {
        format_version: FORMAT_VERSION,
        output_dir: None,
        horizon: slots,
        warmup,
        scheduler,
        search: Default::default(),
        entries,
    }
}

#[derive(Serialize)]
struct SweepCsvRow {
    format_version: u32,
    scheme: Scheme,
    n: Option<u32>,
    t: Option<u32>,
    m: Option<u32>,
    padding: Padding,
    router: Option<RouterKind>,
    scheduler: Scheduler,
    seed: u64,
    horizon: u64,
    warmup: u64,
    search_lo: f64,
    search_hi: f64,
    search_tolerance: f64,
    lambda: Option<f64>,
    channels: Option<u64>,
    lambda_sat: String,
    lambda_sat_f64: String,
    delivered_rate: String,
    delivered_rate_f64: String,
    l_bar: String,
    l_bar_f64: String,
    efficiency: String,
    efficiency_f64: String,
    stable: Option<bool>,
    tradeoff_ok: Option<bool>,
    conserved: Option<bool>,
    error: String,
}

const SWEEP_HEADER: [&str; 28] = [
    "format_version",
    "scheme",
    "n",
    "t",
    "m",
    "padding",
    "router",
    "scheduler",
    "seed",
    "horizon",
    "warmup",
    "search_lo",
    "search_hi",
    "search_tolerance",
    "lambda",
    "channels",
    "lambda_sat",
    "lambda_sat_f64",
    "delivered_rate",
    "delivered_rate_f64",
    "l_bar",
    "l_bar_f64",
    "efficiency",
    "efficiency_f64",
    "stable",
    "tradeoff_ok",
    "conserved",
    "error",
];

fn sweep_row(
    m: &ExperimentManifest,
    entry: &Entry,
    seed: u64,
    lambda: Option<f64>,
    outcome: Result<SweepRow, String>,
) -> SweepCsvRow {
    let mut row = SweepCsvRow {
        format_version: FORMAT_VERSION,
        scheme: entry.scheme,
        n: entry.n,
        t: entry.t,
        m: entry.m,
        padding: entry.padding,
        router: entry.router,
        scheduler: m.scheduler,
        seed,
        horizon: m.horizon,
        warmup: m.warmup(),
        search_lo: m.search.lo,
        search_hi: m.search.hi,
        search_tolerance: m.search.tolerance,
        lambda,
        channels: None,
        lambda_sat: String::new(),
        lambda_sat_f64: String::new(),
        delivered_rate: String::new(),
        delivered_rate_f64: String::new(),
        l_bar: String::new(),
        l_bar_f64: String::new(),
        efficiency: String::new(),
        efficiency_f64: String::new(),
        stable: None,
        tradeoff_ok: None,
        conserved: None,
        error: String::new(),
    };
    match outcome {
        Ok(r) => {
            row.n = Some(r.n_nodes);
            row.t = Some(r.n_transceivers);
            row.m = r.m;
            row.router = Some(r.router);
            row.channels = Some(r.channels);
            (row.lambda_sat, row.lambda_sat_f64) = exact(r.lambda_sat);
            (row.delivered_rate, row.delivered_rate_f64) = exact(Some(r.delivered_rate));
            (row.l_bar, row.l_bar_f64) = exact(r.avg_path_length);
            (row.efficiency, row.efficiency_f64) = exact(Some(r.efficiency));
            row.stable = Some(r.stable);
            row.tradeoff_ok = Some(r.tradeoff_ok);
            row.conserved = Some(r.conserved);
        }
        Err(e) => row.error = e,
    }
    row
}

pub fn sweep(out: Option<&Path>, m: &ExperimentManifest) -> CmdResult {
    let points = m.points();
    let rows: Vec<SweepCsvRow> = points
        .par_iter()
        .map(|(entry, point)| {
            let (seed, lambda) = match point {
                Ok(p) => (p.seed, p.lambda),
                Err(_) => (entry.seeds.first().copied().unwrap_or_default(), None),
            };
            let outcome = point.clone().and_then(|p| run_point(&p).map_err(|e| e.to_string()));
            sweep_row(m, entry, seed, lambda, outcome)
        })
        .collect();
    let dir: Option<PathBuf> = out.map(Path::to_path_buf).or_else(|| m.output_dir.clone());
    emit(dir.as_deref(), "sweep.csv", &csv_string(&SWEEP_HEADER, &rows)?)?;
    finish_rows(rows.iter().map(|r| {
        (
            r.error.is_empty(),
            r.tradeoff_ok != Some(false) && r.conserved != Some(false),
        )
    }))
}

pub fn validate(
    file: Option<&Path>,
    scheme: Option<Scheme>,
    n: Option<u32>,
    t: Option<u32>,
    m: Option<u32>,
    padding: Padding,
) -> CmdResult {
    let a = match (file, scheme) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            Assignment::from_json(&text)?
        }
        (None, Some(s)) => build(&network_spec(s, n, t, m, padding)?)?,
        (None, None) => return Err(Failure::input("give --file or --scheme")),
    };
    let report = check(&a);
    match report.violation {
        None => {
            println!(
                "ok: {} N={} T={} channels={}",
                a.scheme(),
                a.n_nodes(),
                a.n_transceivers(),
                a.channel_count()
            );
            Ok(())
        }
        Some(v) => {
            println!("violation: {v}");
            Err(Failure::invariant(v))
        }
    }
}
