//! The `coopsearch` command line.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid scenario, 4 runtime failure,
//! 5 file-system failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use coopsearch_core::{
    compare_strategies, Scenario, ScenarioError, SimOutput, Simulation, Strategy,
};
use thiserror::Error;

use crate::bench::{ga_bench, StdClock};
use crate::config::{self, LoadError};
use crate::output::{self, OutputError, RunSummary, Scene, Snapshot};
use crate::stats::{sign_test_less, spearman};

#[derive(Debug, Parser)]
#[command(name = "coopsearch", version, about = "Cooperative multi-UAV search simulator")]
pub struct Cli {
    /// Also report each seed as it starts.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Only errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Simulate one or more seeds and write every log.
    Run(RunArgs),
    /// Run several strategies over the same seeds and compare search states.
    Compare(CompareArgs),
    /// Time the planner over fixed jump values and horizons.
    GaBench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Seed to run; repeat for several. Defaults to the scenario's seed.
    #[arg(long = "seed")]
    pub seeds: Vec<u64>,
    /// Output root.
    #[arg(long, env = "COOPSEARCH_OUT", default_value = "coopsearch-out")]
    pub out: PathBuf,
    /// Override the scenario length in seconds.
    #[arg(long)]
    pub duration: Option<u32>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    /// Communication strategy 1, 2 or 3.
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<Strategy>,
    /// Write map snapshots every this many epochs (0 for none).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: u32,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Strategies to compare.
    #[arg(long = "strategy", value_parser = parse_strategy, default_values = ["1", "2", "3"])]
    pub strategies: Vec<Strategy>,
    /// Also write the full per-run logs under `strategy-<s>/seed-<n>/`.
    #[arg(long)]
    pub logs: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Scenario to fly; the built-in paper layout when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long = "m", value_delimiter = ',', default_value = "6,8,10")]
    pub ms: Vec<usize>,
    #[arg(long = "j", value_delimiter = ',', default_value = "2,4,6")]
    pub js: Vec<u32>,
    /// Epochs flown per cell; the scenario's duration when omitted.
    #[arg(long)]
    pub duration: Option<u32>,
    /// Repeat the sweep this many times and pool the timings.
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    /// Directory for `ga_bench.csv`; printed only when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "1" => Ok(Strategy::Unconstrained),
        "2" => Ok(Strategy::Constrained),
        "3" => Ok(Strategy::Relay),
        _ => Err(format!("unknown strategy {s:?}, expected 1, 2 or 3")),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("invalid scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(LoadError::Io { .. }) | CliError::Output(_) => 5,
            CliError::Load(_) | CliError::Scenario(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let level = if cli.quiet { 0 } else { 1 + cli.verbose };
    let mut ui = Ui { out, level };
    match dispatch(&cli.command, &mut ui) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

struct Ui<'a> {
    out: &'a mut dyn Write,
    level: u8,
}

impl Ui<'_> {
    fn say(&mut self, level: u8, msg: impl AsRef<str>) {
        if self.level >= level {
            let _ = writeln!(self.out, "{}", msg.as_ref());
        }
    }
}

fn dispatch(cmd: &Command, ui: &mut Ui) -> Result<(), CliError> {
    match cmd {
        Command::Validate { scenario } => validate(scenario, ui),
        Command::Run(args) => run(args, ui),
        Command::Compare(args) => compare(args, ui),
        Command::GaBench(args) => bench(args, ui),
    }
}

fn validate(path: &Path, ui: &mut Ui) -> Result<(), CliError> {
    let sc = config::load(path)?;
    let roster = sc.roster();
    ui.say(
        1,
        format!(
            "{}: ok ({} UAVs, {} targets, {} denied areas, {} s, strategy {})",
            path.display(),
            roster.len(),
            sc.targets.len(),
            sc.denied_areas.len(),
            sc.duration,
            sc.strategy.number()
        ),
    );
    Ok(())
}

fn load_common(c: &Common) -> Result<(Scenario, Vec<u64>), CliError> {
    let mut sc = config::load(&c.scenario)?;
    if let Some(d) = c.duration {
        sc.duration = d;
    }
    let seeds = if c.seeds.is_empty() {
        vec![sc.seed]
    } else {
        c.seeds.clone()
    };
    Ok((sc, seeds))
}

/// One seed stepped to the end, keeping snapshots and scene geometry.
pub struct SeedRun {
    pub output: SimOutput,
    pub snapshots: Vec<Snapshot>,
    pub scene: Scene,
}

pub fn run_seed(sc: &Scenario, snapshot_every: u32) -> Result<SeedRun, ScenarioError> {
    let mut sim = Simulation::with_clock(sc, Box::new(StdClock::new()))?;
    let denied_start = sim.denied_areas().to_vec();
    let mut snapshots = Vec::new();
    if snapshot_every > 0 {
        snapshots.push(Snapshot::of(0, sim.global_map()));
    }
    while !sim.is_finished() {
        sim.step();
        let t = sim.time();
        if snapshot_every > 0 && (t % snapshot_every == 0 || sim.is_finished()) {
            snapshots.push(Snapshot::of(t, sim.global_map()));
        }
    }
    let scene = Scene {
        targets: sim.targets().to_vec(),
        denied_start,
        denied_end: sim.denied_areas().to_vec(),
    };
    Ok(SeedRun {
        output: sim.finish(),
        snapshots,
        scene,
    })
}

fn describe(s: &RunSummary, n_targets: usize) -> String {
    format!(
        "seed {}: {}/{} targets found{}, final chi {:.2}, final p {:.3}, mean GA time {:.4} s (max {:.4} s)",
        s.seed,
        s.targets_found,
        n_targets,
        s.all_found_at.map_or(String::new(), |t| format!(" (all by t={t})")),
        s.final_chi,
        s.final_p,
        s.mean_ga_seconds,
        s.max_ga_seconds
    )
}

fn run(args: &RunArgs, ui: &mut Ui) -> Result<(), CliError> {
    let (mut sc, seeds) = load_common(&args.common)?;
    if let Some(s) = args.strategy {
        sc = sc.with_strategy(s);
    }
    let n_targets = sc.targets.len();
    let mut summaries = Vec::new();
    for &seed in &seeds {
        let sc = sc.with_seed(seed);
        ui.say(2, format!("running seed {seed} for {} s", sc.duration));
        let r = run_seed(&sc, args.snapshot_every)?;
        let dir = args.common.out.join(format!("seed-{seed}"));
        output::write_run(&dir, &sc, &r.output, &r.snapshots, &r.scene)?;
        let summary = RunSummary::of(&r.output, n_targets);
        ui.say(1, describe(&summary, n_targets));
        summaries.push(summary);
    }
    if seeds.len() > 1 {
        output::write_rows(&args.common.out.join("aggregate.csv"), &summaries)?;
    }
    ui.say(1, format!("logs written to {}", args.common.out.display()));
    Ok(())
}

#[derive(serde::Serialize)]
struct FinalRow {
    strategy: u8,
    seed: u64,
    final_chi: f64,
    final_p: f64,
    targets_found: usize,
}

fn compare(args: &CompareArgs, ui: &mut Ui) -> Result<(), CliError> {
    let (sc, seeds) = load_common(&args.common)?;
    let root = &args.common.out;
    output::create_dir(root)?;
    let mut write_err: Option<OutputError> = None;
    let summaries = compare_strategies(
        &sc,
        &args.strategies,
        &seeds,
        || Box::new(StdClock::new()),
        |strategy, seed, run| {
            let line = format!(
                "strategy {} seed {seed}: chi {:.2}, p {:.3}",
                strategy.number(),
                run.final_frame().map_or(f64::NAN, |f| f.global_chi),
                run.final_frame().map_or(f64::NAN, |f| f.global_p)
            );
            ui.say(2, line);
            if args.logs && write_err.is_none() {
                let dir = root.join(format!("strategy-{}/seed-{seed}", strategy.number()));
                let run_sc = sc.with_strategy(strategy).with_seed(seed);
                if let Err(e) = output::write_run(&dir, &run_sc, run, &[], &Scene::default()) {
                    write_err = Some(e);
                }
            }
        },
    )?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    output::write_curves(&root.join("curves.csv"), &summaries)?;
    let rows: Vec<FinalRow> = summaries
        .iter()
        .flat_map(|s| {
            s.seeds.iter().enumerate().map(move |(k, &seed)| FinalRow {
                strategy: s.strategy.number(),
                seed,
                final_chi: s.final_chi[k],
                final_p: s.final_p[k],
                targets_found: s.final_found[k],
            })
        })
        .collect();
    output::write_rows(&root.join("final.csv"), &rows)?;

    for s in &summaries {
        ui.say(
            1,
            format!(
                "strategy {}: mean final chi {:.2}, mean final p {:.3}, mean targets found {:.2}",
                s.strategy.number(),
                coopsearch_core::sim::mean(&s.final_chi),
                coopsearch_core::sim::mean(&s.final_p),
                s.final_found.iter().sum::<usize>() as f64 / s.final_found.len().max(1) as f64
            ),
        );
    }
    for a in &summaries {
        for b in &summaries {
            if a.strategy.number() < b.strategy.number() {
                for (label, x, y) in [("chi", &b.final_chi, &a.final_chi), ("p", &b.final_p, &a.final_p)] {
                    let t = sign_test_less(x, y);
                    let u = sign_test_less(y, x);
                    ui.say(
                        1,
                        format!(
                            "sign test {label}: strategy {} below {} on {}/{} seeds (p={:.4}), above on {} (p={:.4})",
                            b.strategy.number(),
                            a.strategy.number(),
                            t.wins,
                            x.len(),
                            t.p_value,
                            t.losses,
                            u.p_value
                        ),
                    );
                }
            }
        }
    }
    ui.say(1, format!("comparison written to {}", root.display()));
    Ok(())
}

fn bench(args: &BenchArgs, ui: &mut Ui) -> Result<(), CliError> {
    let sc = match &args.scenario {
        Some(p) => config::load(p)?,
        None => Scenario::paper(),
    };
    if args.ms.is_empty() || args.js.is_empty() {
        return Err(CliError::Runtime("need at least one m and one j".into()));
    }
    let cells = ga_bench(&sc, &args.js, &args.ms, args.duration, args.rounds)?;
    ui.say(1, "m\tj\tcalls\tmean_s\tmax_s");
    for c in &cells {
        ui.say(
            1,
            format!("{}\t{}\t{}\t{:.5}\t{:.5}", c.m, c.j, c.calls, c.mean_seconds, c.max_seconds),
        );
    }
    if cells.len() > 1 {
        let mean: Vec<f64> = cells.iter().map(|c| c.mean_seconds).collect();
        let m: Vec<f64> = cells.iter().map(|c| c.m as f64).collect();
        let j: Vec<f64> = cells.iter().map(|c| c.j as f64).collect();
        ui.say(
            1,
            format!(
                "spearman vs m {:.3}, vs j {:.3}",
                spearman(&m, &mean),
                spearman(&j, &mean)
            ),
        );
    }
    if let Some(dir) = &args.out {
        output::create_dir(dir)?;
        output::write_rows(&dir.join("ga_bench.csv"), &cells)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = main_with(
            std::iter::once("coopsearch").chain(args.iter().copied()),
            &mut o,
            &mut e,
        );
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["run", "--scenario", "x.toml", "--strategy", "7"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("ga-bench"));
    }

    #[test]
    fn missing_file_is_io() {
        let (code, _, err) = call(&["validate", "--scenario", "/nonexistent.toml"]);
        assert_eq!(code, 5);
        assert!(err.contains("/nonexistent.toml"));
    }
}
