//! `mcmr`: build channel assignments, print routes, tabulate analytic rates
//! and run simulations.
//!
//! Primary output always goes to stdout. When an output directory is set
//! with `--out-dir` or `MCMR_OUT_DIR`, the same bytes are also written there
//! atomically. Exit status is 0 on success, 1 for bad input or unmet
//! preconditions, and 2 when a result breaks an invariant.

mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcmr_core::assignment::{Padding, Scheme};
use mcmr_core::routing::RouterKind;
use mcmr_core::sim::Scheduler;

#[derive(Parser)]
#[command(
    name = "mcmr",
    version,
    about = "Static channel assignment for multi-channel multi-radio networks"
)]
struct Cli {
    /// Also write outputs into this directory.
    #[arg(long, global = true, env = "MCMR_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct NetArgs {
    #[arg(long, value_parser = parse::<Scheme>)]
    scheme: Scheme,
    /// Number of nodes.
    #[arg(long)]
    n: Option<u32>,
    /// Transceivers per node (2 for hint and log2, 4 for ring and grid).
    #[arg(long)]
    t: Option<u32>,
    /// Number of Tx-1 groups for log2.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value = "strict", value_parser = parse::<Padding>)]
    padding: Padding,
}

#[derive(Subcommand)]
enum Command {
    /// Build an assignment and print its group table.
    Assign {
        #[command(flatten)]
        net: NetArgs,
        /// Print the JSON document instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Print the route between two nodes.
    Route {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        /// Defaults to the scheme's own router.
        #[arg(long, value_parser = parse::<RouterKind>)]
        router: Option<RouterKind>,
    },
    /// Tabulate analytic rate, channel count, path length and efficiency.
    Analyze {
        #[arg(long, value_delimiter = ',', value_parser = parse::<Scheme>, required_unless_present = "manifest")]
        scheme: Vec<Scheme>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value = "strict", value_parser = parse::<Padding>)]
        padding: Padding,
        #[arg(long, conflicts_with = "scheme")]
        manifest: Option<PathBuf>,
    },
    /// Run one simulation and print the result as JSON.
    Simulate {
        #[command(flatten)]
        net: NetArgs,
        /// Arrival probability per node per slot.
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 100_000)]
        slots: u64,
        /// Defaults to a tenth of the slots.
        #[arg(long)]
        warmup: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "strict-tdma", value_parser = parse::<Scheduler>)]
        scheduler: Scheduler,
        #[arg(long, value_parser = parse::<RouterKind>)]
        router: Option<RouterKind>,
        /// Packets per queue; unbounded when absent.
        #[arg(long)]
        queue_capacity: Option<usize>,
    },
    /// Run saturation searches or fixed-rate runs over many networks and
    /// print one CSV row per run.
    Sweep {
        #[arg(long, value_delimiter = ',', value_parser = parse::<Scheme>, required_unless_present = "manifest")]
        scheme: Vec<Scheme>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, default_value = "strict", value_parser = parse::<Padding>)]
        padding: Padding,
        /// Fixed rates; a saturation search runs when none are given.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seed: Vec<u64>,
        #[arg(long, default_value_t = 50_000)]
        slots: u64,
        #[arg(long)]
        warmup: Option<u64>,
        #[arg(long, default_value = "strict-tdma", value_parser = parse::<Scheduler>)]
        scheduler: Scheduler,
        #[arg(long, conflicts_with = "scheme")]
        manifest: Option<PathBuf>,
    },
    /// Check an assignment's structural invariants.
    Validate {
        /// Assignment JSON written by `assign --json`.
        #[arg(long, conflicts_with = "scheme")]
        file: Option<PathBuf>,
        #[arg(long, value_parser = parse::<Scheme>, required_unless_present = "file")]
        scheme: Option<Scheme>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value = "strict", value_parser = parse::<Padding>)]
        padding: Padding,
    },
}

fn parse<T: std::str::FromStr<Err = mcmr_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: mcmr_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out_dir.as_deref();
    let result = match cli.command {
        Command::Assign { net, json } => commands::assign(out, &net, json),
        Command::Route { net, from, to, router } => commands::route(&net, from, to, router),
        Command::Analyze {
            scheme,
            n,
            t,
            m,
            padding,
            manifest,
        } => commands::analyze(out, &scheme, &n, t, m, padding, manifest.as_deref()),
        Command::Simulate {
            net,
            lambda,
            slots,
            warmup,
            seed,
            scheduler,
            router,
            queue_capacity,
        } => commands::simulate(
            out,
            &net,
            lambda,
            slots,
            warmup,
            seed,
            scheduler,
            router,
            queue_capacity,
        ),
        Command::Sweep {
            scheme,
            n,
            t,
            padding,
            lambda,
            seed,
            slots,
            warmup,
            scheduler,
            manifest,
        } => {
            let m = match manifest {
                Some(path) => manifest::ExperimentManifest::load(&path),
                None => Ok(commands::manifest_from_flags(
                    &scheme, &n, t, padding, &lambda, &seed, slots, warmup, scheduler,
                )),
            };
            m.and_then(|m| commands::sweep(out, &m))
        }
        Command::Validate {
            file,
            scheme,
            n,
            t,
            m,
            padding,
        } => commands::validate(file.as_deref(), scheme, n, t, m, padding),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
