//! `seanav` command-line front end.
//!
//! Every subcommand writes a human-readable table to stdout (stderr for
//! `rollout --policy extern`, whose stdout carries the protocol) and an
//! optional JSON-lines report whose first line carries `schema_version`.
//! Failures exit nonzero with `error[<category>]: <message>` on stderr.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use seanav::dynamics::Integrator;
use seanav::env::{
    evaluate_with, run_benchmark, Baseline, BatchEnv, BenchConfig, EnvError, EnvOptions, ExternFrame,
    LogRecord, Policy, RolloutLogger, Scenario, Strategy, LOG_SCHEMA_VERSION,
};
use seanav::mask::audit_mask;

/// Version of the report files written with `--report`.
const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
struct CliError {
    category: &'static str,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { category: "usage", message: message.into() }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Self { category: "io", message: format!("{}: {e}", path.display()) }
    }

    fn exit_code(&self) -> u8 {
        match self.category {
            "usage" => 2,
            "input" => 3,
            "scenario" => 4,
            "policy" => 5,
            "simulation" => 6,
            "io" => 7,
            _ => 1,
        }
    }
}

impl From<EnvError> for CliError {
    fn from(e: EnvError) -> Self {
        Self { category: e.category(), message: e.to_string() }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "seanav", version, about = "Batch-parallel vessel navigation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Full,
    PerEnv,
    PerAgent,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Rk4,
    Euler,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Vo,
    Greedy,
    Extern,
}

#[derive(Subcommand)]
enum Command {
    /// Time the three dispatch strategies on an identical workload.
    Bench {
        #[arg(long, default_value_t = 1024)]
        envs: usize,
        #[arg(long, default_value_t = 64)]
        agents: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::All)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Control commands per trial.
        #[arg(long, default_value_t = 50)]
        commands: u32,
        #[arg(long, default_value_t = 10)]
        substeps: u32,
        #[arg(long, value_enum, default_value_t = IntegratorArg::Rk4)]
        integrator: IntegratorArg,
        #[arg(long, default_value = "cpu")]
        device: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run seeded episodes and report success rate, length and unsafe actions.
    Rollout {
        /// Bundled scenario name or path to a scenario file.
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::Vo)]
        policy: PolicyArg,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON-lines step log.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Directory for per-step PGM rasters of the first episode.
        #[arg(long)]
        bev_dump: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare mask verdicts with a dense constant-velocity rollout.
    AuditMask {
        /// Scenario to draw poses from; random synthetic scenes if absent.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Lint a scenario: geometry, spawn feasibility and step budget.
    Validate {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Obstacle layouts sampled for the spawn check.
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// JSON-lines report: a header with the schema version, then one line per
/// record.
fn write_report<T: Serialize>(path: &Path, command: &str, args: serde_json::Value, records: &[T]) -> CliResult {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let header = json!({ "kind": "header", "schema_version": REPORT_SCHEMA_VERSION, "command": command, "args": args });
    let mut emit = |v: &serde_json::Value| writeln!(out, "{v}").map_err(|e| CliError::io(path, e));
    emit(&header)?;
    for r in records {
        let v = serde_json::to_value(r).map_err(|e| CliError::usage(e.to_string()))?;
        emit(&v)?;
    }
    out.flush().map_err(|e| CliError::io(path, e))
}

fn cmd_bench(cfg: BenchConfig, device: &str, report: Option<&Path>) -> CliResult {
    if device != "cpu" {
        return Err(CliError::usage(format!("device `{device}` is not available; only `cpu` is supported")));
    }
    let rep = run_benchmark(&cfg)?;
    println!(
        "{} envs x {} agents, {} commands x {} substeps, {} {}, {} trials, {} threads",
        cfg.n_envs, cfg.m_agents, cfg.n_commands, cfg.substeps, cfg.model, format!("{:?}", cfg.integrator).to_lowercase(), cfg.trials, rep.threads
    );
    println!("{:<10} {:>10} {:>10} {:>18} {:>12}", "strategy", "mean_s", "std_s", "state_hash", "max_dev");
    for r in &rep.rows {
        println!(
            "{:<10} {:>10.4} {:>10.4} {:>18} {:>12.3e}",
            r.strategy.as_str(),
            r.mean,
            r.std,
            r.state_hash,
            r.max_deviation
        );
    }
    if let Some(path) = report {
        let args = serde_json::to_value(&rep.config).expect("config serializes");
        let rows: Vec<_> = rep
            .rows
            .iter()
            .map(|r| json!({ "kind": "row", "threads": rep.threads, "row": r }))
            .collect();
        write_report(path, "bench", args, &rows)?;
    }
    Ok(())
}

/// Drives the environment through the line protocol on stdin/stdout.
struct ExternPolicy<R: BufRead, W: Write> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> ExternPolicy<R, W> {
    fn send(&mut self, env: &BatchEnv) -> Result<(), EnvError> {
        writeln!(self.output, "{}", ExternFrame::capture(env).to_line())
            .and_then(|_| self.output.flush())
            .map_err(|e| EnvError::Policy(format!("cannot write frame: {e}")))
    }
}

impl<R: BufRead, W: Write> Policy for ExternPolicy<R, W> {
    fn name(&self) -> &str {
        "extern"
    }

    fn act(&mut self, env: &BatchEnv) -> Result<Vec<usize>, EnvError> {
        self.send(env)?;
        let mut line = String::new();
        let n = self
            .input
            .read_line(&mut line)
            .map_err(|e| EnvError::Policy(format!("cannot read actions: {e}")))?;
        if n == 0 {
            return Err(EnvError::Policy("action stream closed before the episode ended".into()));
        }
        seanav::env::parse_actions(&line, env.n_agents())
    }
}

struct RolloutArgs<'a> {
    scenario: &'a str,
    policy: PolicyArg,
    episodes: usize,
    seed: u64,
    log: Option<&'a Path>,
    bev_dump: Option<&'a Path>,
    report: Option<&'a Path>,
}

fn cmd_rollout(a: RolloutArgs) -> CliResult {
    if a.episodes == 0 {
        return Err(CliError::usage("--episodes must be positive"));
    }
    let scenario = Scenario::resolve(a.scenario)?;
    let options = if a.bev_dump.is_some() { EnvOptions::default() } else { EnvOptions::without_bev() };
    let stdin = io::stdin();
    let mut policy: Box<dyn Policy> = match a.policy {
        PolicyArg::Vo => Box::new(Baseline::Vo),
        PolicyArg::Greedy => Box::new(Baseline::Greedy),
        PolicyArg::Extern => Box::new(ExternPolicy { input: stdin.lock(), output: io::stdout() }),
    };
    let is_extern = a.policy == PolicyArg::Extern;

    let mut logger = match a.log {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut l = RolloutLogger::new(BufWriter::new(file));
            l.write(&LogRecord::Header {
                schema_version: LOG_SCHEMA_VERSION,
                scenario: scenario.name.clone(),
                policy: policy.name().to_string(),
                seed: a.seed,
                episodes: a.episodes,
                n_actions: scenario.mask.n_actions,
                step_budget: scenario.step_budget,
            })?;
            Some(l)
        }
        None => None,
    };
    if let Some(dir) = a.bev_dump {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }

    let mut final_frame = None;
    let mut observe = |env: &BatchEnv, masks: &[String]| -> Result<(), EnvError> {
        if let Some(l) = logger.as_mut() {
            l.write_step(env, masks)?;
        }
        if let (Some(dir), Some(img)) = (a.bev_dump, env.agent(0).bev()) {
            if env.agent(0).last().action.is_some() {
                img.write_pgm(dir, &format!("ep000_step{:04}", env.agent(0).steps()))
                    .map_err(|e| EnvError::Io { path: dir.display().to_string(), message: e.to_string() })?;
            }
        }
        if is_extern && env.all_done() {
            final_frame = Some(ExternFrame::capture(env).to_line());
        }
        Ok(())
    };
    let (metrics, episodes) = evaluate_with(&scenario, a.episodes, a.seed, options, policy.as_mut(), &mut observe)?;
    drop(policy);

    if let Some(line) = final_frame {
        let mut out = io::stdout();
        writeln!(out, "{line}").and_then(|_| out.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    }
    if let Some(mut l) = logger {
        for e in &episodes {
            l.write(&LogRecord::Episode(e.clone()))?;
        }
        l.write(&LogRecord::Summary(metrics.clone()))?;
        l.flush()?;
    }

    let table = format!(
        "scenario {} policy {} episodes {} seed {}\n\
         {:<8} {:>16} {:>14} {:>10}\n\
         {:<8.1} {:>9.1} ± {:<5.1} {:>6.2} ± {:<5.2} {:>10.2}\n\
         goal {} collision {} boundary {} timeout {}",
        scenario.name,
        if is_extern { "extern" } else { a_policy_name(a.policy) },
        metrics.episodes,
        a.seed,
        "SR%",
        "Length",
        "UA",
        "return",
        metrics.success_rate,
        metrics.length_mean,
        metrics.length_std,
        metrics.unsafe_mean,
        metrics.unsafe_std,
        metrics.return_mean,
        metrics.goal,
        metrics.collision,
        metrics.boundary,
        metrics.timeout,
    );
    if is_extern {
        eprintln!("{table}");
    } else {
        println!("{table}");
    }
    if let Some(path) = a.report {
        let args = json!({
            "scenario": a.scenario, "policy": a_policy_name(a.policy), "episodes": a.episodes, "seed": a.seed,
        });
        let mut rows: Vec<serde_json::Value> =
            episodes.iter().map(|e| json!({ "kind": "episode", "episode": e })).collect();
        rows.push(json!({ "kind": "metrics", "metrics": metrics }));
        write_report(path, "rollout", args, &rows)?;
    }
    Ok(())
}

fn a_policy_name(p: PolicyArg) -> &'static str {
    match p {
        PolicyArg::Vo => "vo",
        PolicyArg::Greedy => "greedy",
        PolicyArg::Extern => "extern",
    }
}

fn cmd_audit(scenario: Option<&str>, samples: usize, seed: u64, report: Option<&Path>) -> CliResult {
    let (label, rep) = match scenario {
        Some(s) => {
            let sc = Scenario::resolve(s)?;
            (sc.name.clone(), sc.audit_mask(seed, samples)?)
        }
        None => ("synthetic".to_string(), audit_mask(seed, samples)),
    };
    println!("mask audit on {label}: {} pairs, seed {seed}", rep.pairs);
    println!(
        "agree {} ({:.4}%)  disagree {}  off-boundary {}  masked {}",
        rep.agree,
        100.0 * rep.agreement(),
        rep.disagree,
        rep.disagree_off_boundary,
        rep.masked
    );
    if let Some(path) = report {
        let args = json!({ "scenario": scenario, "samples": samples, "seed": seed });
        write_report(path, "audit-mask", args, &[json!({ "kind": "audit", "report": rep, "agreement": rep.agreement() })])?;
    }
    if rep.disagree_off_boundary > 0 {
        return Err(CliError {
            category: "simulation",
            message: format!("{} disagreements away from the boundary", rep.disagree_off_boundary),
        });
    }
    Ok(())
}

fn cmd_validate(scenario: &str, seed: u64, trials: usize, report: Option<&Path>) -> CliResult {
    let sc = Scenario::resolve(scenario)?;
    let lint = sc.lint(seed, trials)?;
    println!("scenario {}", lint.scenario);
    for c in &lint.checks {
        println!("{:<4} {:<20} {}", if c.ok { "ok" } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(path) = report {
        let args = json!({ "scenario": scenario, "seed": seed, "trials": trials });
        write_report(path, "validate", args, &[json!({ "kind": "lint", "report": lint })])?;
    }
    if !lint.ok {
        return Err(CliError { category: "scenario", message: "lint checks failed".into() });
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Bench { envs, agents, strategy, trials, commands, substeps, integrator, device, seed, report } => {
            let strategies = match strategy {
                StrategyArg::Full => vec![Strategy::Full],
                StrategyArg::PerEnv => vec![Strategy::PerEnvironment],
                StrategyArg::PerAgent => vec![Strategy::PerAgent],
                StrategyArg::All => Strategy::ALL.to_vec(),
            };
            let cfg = BenchConfig {
                n_envs: envs,
                m_agents: agents,
                n_commands: commands,
                substeps,
                trials,
                seed,
                integrator: match integrator {
                    IntegratorArg::Rk4 => Integrator::Rk4,
                    IntegratorArg::Euler => Integrator::SemiImplicitEuler,
                },
                strategies,
                ..BenchConfig::default()
            };
            cmd_bench(cfg, &device, report.as_deref())
        }
        Command::Rollout { scenario, policy, episodes, seed, log, bev_dump, report } => cmd_rollout(RolloutArgs {
            scenario: &scenario,
            policy,
            episodes,
            seed,
            log: log.as_deref(),
            bev_dump: bev_dump.as_deref(),
            report: report.as_deref(),
        }),
        Command::AuditMask { scenario, samples, seed, report } => {
            cmd_audit(scenario.as_deref(), samples, seed, report.as_deref())
        }
        Command::Validate { scenario, seed, trials, report } => cmd_validate(&scenario, seed, trials, report.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category, e.message);
            ExitCode::from(e.exit_code())
        }
    }
}
