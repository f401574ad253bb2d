//! `transmission-lab` command dispatch.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use transmission_core::config::{RunConfig, Study};
use transmission_core::lab::{self, Direction};
use transmission_core::output;
use transmission_core::stepper::{self, Trajectory};
use transmission_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "transmission-lab",
    version,
    about = "Two-subdomain Robin transmission solver and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate with the configured permeability schedule.
    Solve(Io),
    /// Decoupled limit (no interface exchange).
    Split(Io),
    /// Merged limit (continuity imposed on the interface).
    Merged(Io),
    /// Blow-up schedule with hand-off to the merged problem.
    Blowup(Io),
    /// Convergence study as alpha goes to zero.
    RateZero(Io),
    /// Convergence study as alpha goes to infinity.
    RateInf(Io),
    /// Liminf / recovery audit of the energies.
    Mosco(Io),
    /// Uniformity audit of the a-priori quantities.
    Audit(Io),
}

#[derive(Args, Debug)]
struct Io {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Split(_) => "split",
            Command::Merged(_) => "merged",
            Command::Blowup(_) => "blowup",
            Command::RateZero(_) => "rate-zero",
            Command::RateInf(_) => "rate-inf",
            Command::Mosco(_) => "mosco",
            Command::Audit(_) => "audit",
        }
    }

    fn io(&self) -> &Io {
        match self {
            Command::Solve(io)
            | Command::Split(io)
            | Command::Merged(io)
            | Command::Blowup(io)
            | Command::RateZero(io)
            | Command::RateInf(io)
            | Command::Mosco(io)
            | Command::Audit(io) => io,
        }
    }
}

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Precondition(_) => 2,
        Error::StepFailure { .. } | Error::NumericalFailure { .. } | Error::UnsupportedRegime(_) => 3,
        Error::Io(_) => 4,
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: &Command) -> Result<String, Error> {
    let io = command.io();
    let started = Instant::now();
    let config = RunConfig::from_path(&io.config)?;
    fs::create_dir_all(&io.out)?;
    let out = io.out.as_path();
    let (summary, line) = match command {
        Command::Solve(_) => {
            let traj = stepper::solve_finite_alpha(&config.problem(), &config.alpha, &config.solver())?;
            trajectory_artifacts(&config, &traj, out)?
        }
        Command::Split(_) => {
            let traj = stepper::solve_split(&config.problem(), &config.solver())?;
            trajectory_artifacts(&config, &traj, out)?
        }
        Command::Merged(_) => {
            let traj = stepper::solve_merged(&config.problem(), &config.solver())?;
            trajectory_artifacts(&config, &traj, out)?
        }
        Command::Blowup(_) => {
            let traj = stepper::solve_blowup_and_extend(&config.problem(), &config.alpha, &config.solver())?;
            trajectory_artifacts(&config, &traj, out)?
        }
        Command::RateZero(_) => rate_study(&config, Direction::ToZero, out)?,
        Command::RateInf(_) => rate_study(&config, Direction::ToInfinity, out)?,
        Command::Mosco(_) => mosco(&config, out)?,
        Command::Audit(_) => audit(&config, out)?,
    };
    output::write_json(&out.join("summary.json"), &summary)?;
    let run = json!({
        "tool": "transmission-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "config_path": io.config.display().to_string(),
        "config": config,
        "duration_seconds": started.elapsed().as_secs_f64(),
    });
    output::write_json(&out.join("run.json"), &run)?;
    Ok(format!("{}: {line}", command.name()))
}

fn to_value<T: Serialize>(value: &T) -> Result<Value, Error> {
    serde_json::to_value(value).map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn trajectory_artifacts(config: &RunConfig, traj: &Trajectory, out: &Path) -> Result<(Value, String), Error> {
    let mesh = config.problem().mesh()?;
    output::write_fields(&out.join("fields.csv"), &mesh, traj, config.output.field_stride)?;
    output::write_diag(&out.join("diag.csv"), traj)?;
    let first = &traj.diagnostics[0];
    let last = traj.diagnostics.last().unwrap();
    let summary = json!({
        "steps": traj.len() - 1,
        "final": to_value(last)?,
        "mass_drift": (last.mass - first.mass).abs(),
        "total_newton_iterations": traj.total_newton_iterations(),
        "handoff": to_value(&traj.handoff)?,
    });
    let mut line = format!(
        "t={} energy={:.6e} jump={:.3e} mass={:.12} newton={}",
        last.t,
        last.energy,
        last.jump,
        last.mass,
        traj.total_newton_iterations()
    );
    if let Some(h) = &traj.handoff {
        line.push_str(&format!(" handoff_t={} discrepancy={:.3e}", h.time, h.discrepancy));
    }
    Ok((summary, line))
}

fn rate_study(config: &RunConfig, direction: Direction, out: &Path) -> Result<(Value, String), Error> {
    let (study, runner): (_, fn(_, _, _, _) -> _) = match direction {
        Direction::ToZero => (Study::RateToZero, lab::rate_to_zero),
        Direction::ToInfinity => (Study::RateToInfinity, lab::rate_to_infinity),
    };
    let grid = config.alpha_grid(study);
    let report = runner(&config.problem(), &grid, &config.solver(), config.experiment.jobs)?;
    output::write_rates(&out.join("rates.csv"), &report)?;
    let slope = |f: &Option<lab::LogLogFit>| f.map_or("n/a".to_string(), |f| format!("{:.4}", f.slope));
    let line = format!(
        "slope={} energy_slope={} points={} degenerate={} jump_spread={:.3}",
        slope(&report.fit),
        slope(&report.fit_energy),
        report.points.len(),
        report.degenerate,
        report.jump_spread
    );
    let summary = json!({
        "direction": direction,
        "fit": report.fit,
        "fit_energy": report.fit_energy,
        "degenerate": report.degenerate,
        "jump_spread": report.jump_spread,
        "jump_flag": report.jump_flag,
    });
    Ok((summary, line))
}

fn mosco(config: &RunConfig, out: &Path) -> Result<(Value, String), Error> {
    let direction = config.experiment.direction.unwrap_or(Direction::ToZero);
    let problem = config.problem();
    let mesh = problem.mesh()?;
    let probes = lab::standard_probes(&mesh, config.experiment.seed)?;
    let alphas = config.alpha_grid(Study::Mosco(direction));
    let report = lab::mosco_audit(&mesh, problem.kappa, direction, &alphas, &probes, config.experiment.tau)?;
    output::write_mosco(&out.join("mosco.csv"), &report)?;
    let line = format!(
        "m1={} m2={} liminf_margin={:.3e} prox_final_relative={:.3e}",
        report.m1, report.m2, report.liminf_margin, report.prox_final_relative
    );
    let summary = json!({
        "direction": direction,
        "m1": report.m1,
        "m2": report.m2,
        "liminf_margin": report.liminf_margin,
        "recovery_identity_error": report.recovery_identity_error,
        "prox_monotone": report.prox_monotone,
        "prox_final_relative": report.prox_final_relative,
    });
    Ok((summary, line))
}

fn audit(config: &RunConfig, out: &Path) -> Result<(Value, String), Error> {
    let report = lab::apriori_audit(
        &config.problem(),
        &config.lambda_grid(),
        &config.alpha_grid(Study::Audit),
        &config.solver(),
        config.experiment.jobs,
    )?;
    output::write_audit(&out.join("audit.csv"), &report)?;
    let worst = report
        .spreads
        .iter()
        .max_by(|a, b| a.spread.total_cmp(&b.spread))
        .expect("audit reports every quantity");
    let unbounded = report.spreads.iter().filter(|s| !s.bounded).count();
    let line = format!(
        "entries={} worst={} spread={:.3} unbounded={}",
        report.entries.len(),
        worst.quantity.id(),
        worst.spread,
        unbounded
    );
    let summary = json!({ "factor": report.factor, "spreads": report.spreads });
    Ok((summary, line))
}
