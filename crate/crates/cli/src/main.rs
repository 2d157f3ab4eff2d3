#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use commands::{run_check, Ctx};
use config::{Command, Config, ConfigError, Scenario};
use report::{gnuplot_script, write_json, OutDir, RunReport, ScenarioReport, Series};

const EXIT_ASSERTION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "wavepos", version, about = "Positivity criteria and exact solvers for radial wave equations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Restrict to one scenario of the config.
    #[arg(long, global = true)]
    scenario: Option<String>,
    #[arg(long, global = true, default_value = "wavepos-out")]
    out_dir: PathBuf,
    /// Worker threads for scenario batches and lattice sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Multiplies every numerical tolerance in assertions.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Endpoint classification and criterion verdicts.
    Classify,
    /// Exact null-form solution, energy series and final field.
    Solve,
    /// Blow-up localization and log-rate fit.
    Blowup,
    /// Monotone iteration of the focusing power equation.
    Iterate,
    /// Finite-difference reference run.
    Oracle,
    /// Dispersion/blow-up probe around the ground state.
    Window,
    /// Re-run a scenario's checks over a list of parameter values.
    Sweep {
        /// Dotted path into the scenario, e.g. `data.epsilon`.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
    /// Run every check of every scenario (all bundled scenarios by default).
    VerifyAll,
}

enum Failure {
    Config(ConfigError),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ASSERTION)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let c = &cli.common;
    if !(c.tolerance_scale > 0.0 && c.tolerance_scale.is_finite()) {
        return Err(ConfigError(format!("--tolerance-scale must be positive, got {}", c.tolerance_scale)).into());
    }
    if c.workers == 0 {
        return Err(ConfigError("--workers must be at least 1".into()).into());
    }
    let cfg = match (&c.config, &cli.command) {
        (Some(spec), _) => Config::load(spec)?,
        (None, Cmd::VerifyAll) => Config::bundled()?,
        (None, _) => return Err(ConfigError("--config is required".into()).into()),
    };
    let cfg = cfg.select(c.scenario.as_deref())?;
    let ctx = Ctx {
        tolerance_scale: c.tolerance_scale,
        workers: c.workers,
    };
    let (label, plan) = match &cli.command {
        Cmd::Sweep { param, values } => {
            let (report, series) = sweep::run(&cfg, param, values, &ctx, &c.out_dir)?;
            return finish(report, series, &c.out_dir);
        }
        Cmd::VerifyAll => ("verify-all", plan_checks(&cfg, None)?),
        Cmd::Classify => ("classify", plan_checks(&cfg, Some(Command::Classify))?),
        Cmd::Solve => ("solve", plan_checks(&cfg, Some(Command::Solve))?),
        Cmd::Blowup => ("blowup", plan_checks(&cfg, Some(Command::Blowup))?),
        Cmd::Iterate => ("iterate", plan_checks(&cfg, Some(Command::Iterate))?),
        Cmd::Oracle => ("oracle", plan_checks(&cfg, Some(Command::Oracle))?),
        Cmd::Window => ("window", plan_checks(&cfg, Some(Command::Window))?),
    };
    let (scenarios, series) = execute(&cfg.base, plan, &ctx, &c.out_dir)?;
    finish(run_report(label, &ctx, scenarios), series, &c.out_dir)
}

/// Scenarios paired with the commands to run on them.
fn plan_checks(cfg: &Config, only: Option<Command>) -> Result<Vec<(Scenario, Vec<Command>)>, ConfigError> {
    let Some(cmd) = only else {
        return Ok(cfg.scenarios.iter().map(|s| (s.clone(), s.checks())).collect());
    };
    let mut plan = Vec::new();
    for s in &cfg.scenarios {
        match s.supports(cmd) {
            Ok(()) => plan.push((s.clone(), vec![cmd])),
            Err(e) if cfg.scenarios.len() == 1 => {
                return Err(ConfigError(format!("scenario {:?}: {e}", s.name)));
            }
            Err(_) => {}
        }
    }
    if plan.is_empty() {
        return Err(ConfigError(format!("no scenario supports {}", cmd.name())));
    }
    Ok(plan)
}

pub(crate) fn run_report(label: &str, ctx: &Ctx, scenarios: Vec<ScenarioReport>) -> RunReport {
    RunReport {
        schema_version: config::SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        command: label.into(),
        tolerance_scale: ctx.tolerance_scale,
        workers: ctx.workers,
        passed: scenarios.iter().all(|s| s.passed),
        scenarios,
    }
}

/// Builds every scenario first (build errors are configuration errors), then
/// runs them on up to `ctx.workers` threads. Results keep the plan's order.
pub(crate) fn execute(
    base: &Path,
    plan: Vec<(Scenario, Vec<Command>)>,
    ctx: &Ctx,
    out_dir: &Path,
) -> Result<(Vec<ScenarioReport>, Vec<Series>), Failure> {
    let mut built = Vec::with_capacity(plan.len());
    for (s, cmds) in plan {
        let b = s.build(base)?;
        built.push((s, cmds, b));
    }
    let inner = Ctx {
        workers: if built.len() > 1 { 1 } else { ctx.workers },
        ..*ctx
    };
    let outs = built
        .iter()
        .map(|(s, _, _)| OutDir::new(out_dir, &s.name).map_err(|e| Failure::Io(format!("{}: {e}", out_dir.display()))))
        .collect::<Result<Vec<_>, _>>()?;

    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<ScenarioReport>>> = built.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..ctx.workers.min(built.len()).max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((s, cmds, b)) = built.get(i) else { break };
                let checks: Vec<_> = cmds.iter().map(|&c| run_check(s, b, c, &inner, &outs[i])).collect();
                *slots[i].lock().unwrap() = Some(ScenarioReport {
                    name: s.name.clone(),
                    passed: checks.iter().all(|c| c.passed),
                    scenario: s.clone(),
                    checks,
                });
            });
        }
    });
    let reports: Vec<ScenarioReport> = slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect();
    let series = reports
        .iter()
        .flat_map(|r| r.checks.iter().flat_map(|c| c.series.iter().cloned()))
        .collect();
    Ok((reports, series))
}

fn finish(report: RunReport, series: Vec<Series>, out_dir: &Path) -> Result<bool, Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", out_dir.display()));
    std::fs::create_dir_all(out_dir).map_err(io)?;
    write_json(&out_dir.join("report.json"), &report).map_err(io)?;
    std::fs::write(out_dir.join("plot.gp"), gnuplot_script(&series)).map_err(io)?;
    for s in &report.scenarios {
        for c in &s.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            println!("{mark} {} {}", s.name, c.command.name());
            for a in c.assertions.iter().filter(|a| !a.passed) {
                println!("     {}: {}", a.name, a.detail);
            }
        }
    }
    println!("report: {}", out_dir.join("report.json").display());
    Ok(report.passed)
}
