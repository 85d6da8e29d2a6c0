//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_override, parse_with_overrides, RunDocument};
use crate::error::{Error, Result};
use crate::geometry::AzimuthalMetric;
use crate::gradcheck::check_gradients;
use crate::pointdyn::{integrate_particle, ParticleState};
use crate::solver::{simulate, solve_equilibrium, RadialGrid, RadialState};

/// Tolerance for `check-gradients`.
pub const GRADIENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "noneuclid", version, about = "Elastodynamics of an annulus on a curved surface")]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Override a configuration key; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Run once per value, concurrently, writing to `DIR/KEY=VALUE`.
    #[arg(long, global = true, value_name = "KEY=V1,V2,...")]
    pub sweep: Option<String>,

    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve for the static configuration and write `equilibrium.csv`.
    Equilibrium,
    /// Perturb the equilibrium and integrate the wave equation.
    Simulate,
    /// Integrate a force-free particle on the space surface.
    Geodesic,
    /// Compare closed-form stress densities with finite differences.
    CheckGradients,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub overrides: Vec<(String, String)>,
    pub quiet: bool,
}

impl RunConfig {
    pub fn load(&self) -> Result<RunDocument> {
        let text = match &self.config_path {
            Some(path) => fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?,
            None => String::new(),
        };
        parse_with_overrides(&text, &self.overrides)
    }
}

/// Writes `equilibrium.csv`-style rows `R,f,ft`.
pub fn state_csv(grid: &RadialGrid, state: &RadialState) -> String {
    let mut out = String::from("R,f,ft\n");
    for ((r, f), ft) in grid.nodes().iter().zip(&state.f).zip(&state.f_t) {
        let _ = writeln!(out, "{r:.16e},{f:.16e},{ft:.16e}");
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io { path, source })
}

/// Executes one run and returns the human-readable report.
pub fn run(config: &RunConfig) -> Result<String> {
    let doc = config.load()?;
    fs::create_dir_all(&config.out_dir).map_err(|source| Error::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let dir = config.out_dir.as_path();
    let problem = &doc.problem;
    let mut report = String::new();

    match config.command {
        Command::Equilibrium => {
            let sol = solve_equilibrium(problem)?;
            write(dir, "equilibrium.csv", &state_csv(&problem.grid, &sol.state))?;
            let _ = writeln!(report, "distance = {:.16e}", sol.distance());
            let _ = writeln!(report, "residual = {:.16e}", sol.residual);
            let _ = writeln!(report, "iterations = {}", sol.iterations);
            write(dir, "equilibrium_report.txt", &report)?;
        }
        Command::Simulate => {
            let out = simulate(problem)?;
            let mut csv = String::from("t,distance,kinetic,potential,total\n");
            for p in &out.series {
                let e = p.energy;
                let _ = writeln!(
                    csv,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    p.t, p.distance, e.kinetic, e.potential, e.total
                );
            }
            write(dir, "series.csv", &csv)?;
            for (k, snap) in out.snapshots.iter().enumerate() {
                write(dir, &format!("snapshot_{k:05}.csv"), &state_csv(&problem.grid, snap))?;
            }
            let (e0, e1) = (out.series[0].energy.total, out.series[out.series.len() - 1].energy.total);
            let _ = writeln!(report, "equilibrium_distance = {:.16e}", out.equilibrium_distance);
            let _ = writeln!(report, "steps = {}", out.steps);
            let _ = writeln!(report, "dt = {:.16e}", out.dt);
            let _ = writeln!(report, "relative_energy_change = {:.16e}", (e1 - e0) / e0.abs().max(f64::MIN_POSITIVE));
            let _ = writeln!(report, "snapshots = {}", out.snapshots.len());
        }
        Command::Geodesic => {
            let g = doc.geodesic;
            let metric = AzimuthalMetric::new(problem.space);
            let initial = ParticleState::new([g.r0, g.theta0], [g.vr0, g.vtheta0], g.mass)?;
            let traj = integrate_particle(&initial, &metric, None, g.dt, g.steps)?;
            let mut csv = String::from("t,r,theta,vr,vtheta,speed2\n");
            for (t, s) in traj.times().zip(&traj.states) {
                let speed2 = s.speed_squared(&metric)?;
                let _ = writeln!(
                    csv,
                    "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{speed2:.16e}",
                    s.position[0], s.position[1], s.velocity[0], s.velocity[1]
                );
            }
            write(dir, "trajectory.csv", &csv)?;
            let _ = writeln!(report, "states = {}", traj.states.len());
            if traj.failure.is_some() {
                // the CSV keeps the valid prefix; the run still fails
                let last = traj.states.last().map_or(g.r0, |s| s.position[0]);
                return Err(Error::Domain {
                    value: last,
                    limit: problem.space.max_radius().unwrap_or(f64::INFINITY),
                });
            }
        }
        Command::CheckGradients => {
            let r = check_gradients(doc.check.samples, doc.check.seed)?;
            let _ = writeln!(report, "samples = {}", r.samples);
            let _ = writeln!(report, "max_relative_error = {:.6e}", r.max_relative_error);
            if !r.passes(GRADIENT_TOLERANCE) {
                return Err(Error::Verification(format!(
                    "max_relative_error {:.3e} >= {GRADIENT_TOLERANCE:e}",
                    r.max_relative_error
                )));
            }
        }
    }
    Ok(report)
}

/// Expands `--sweep key=v1,v2` into one run per value.
pub fn expand_sweep(base: &RunConfig, sweep: &str) -> Result<Vec<RunConfig>> {
    let (key, values) = parse_override(sweep)?;
    let runs: Vec<RunConfig> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            let mut run = base.clone();
            run.overrides.push((key.clone(), v.to_string()));
            run.out_dir = base.out_dir.join(format!("{key}={v}"));
            run
        })
        .collect();
    if runs.is_empty() {
        return Err(Error::Config {
            location: format!("--sweep {key}"),
            message: "no values given".into(),
        });
    }
    Ok(runs)
}

fn error_line(e: &Error) -> String {
    let message = e.to_string().replace('\n', " ");
    format!("error kind={} code={} message={message}", e.kind(), e.exit_code())
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let overrides = match cli.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>>>() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            return e.exit_code();
        }
    };
    let base = RunConfig {
        command: cli.command,
        config_path: cli.config,
        out_dir: cli.out,
        overrides,
        quiet: cli.quiet,
    };
    let runs = match &cli.sweep {
        Some(s) => match expand_sweep(&base, s) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{}", error_line(&e));
                return e.exit_code();
            }
        },
        None => vec![base],
    };

    let results: Vec<Result<String>> = if runs.len() == 1 {
        vec![run(&runs[0])]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = runs.iter().map(|r| s.spawn(move || run(r))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(Error::invalid("run panicked"))))
                .collect()
        })
    };

    let mut status = 0;
    for (cfg, result) in runs.iter().zip(results) {
        match result {
            Ok(report) => {
                if !cfg.quiet {
                    if runs.len() > 1 {
                        println!("[{}]", cfg.out_dir.display());
                    }
                    print!("{report}");
                }
            }
            Err(e) => {
                eprintln!("{}", error_line(&e));
                if status == 0 {
                    status = e.exit_code();
                }
            }
        }
    }
    status
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_expansion() {
        let base = RunConfig {
            command: Command::Equilibrium,
            config_path: None,
            out_dir: "out".into(),
            overrides: vec![],
            quiet: true,
        };
        let runs = expand_sweep(&base, "grid.n=51,101").unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[1].out_dir, PathBuf::from("out/grid.n=101"));
        assert_eq!(runs[1].overrides, vec![("grid.n".to_string(), "101".to_string())]);
        assert!(expand_sweep(&base, "grid.n=").is_err());
        assert!(expand_sweep(&base, "grid.n").is_err());
    }

    #[test]
    fn error_line_is_single_line() {
        let e = Error::Config {
            location: "line 3".into(),
            message: "grid.n: must be >= 3".into(),
        };
        assert_eq!(
            error_line(&e),
            "error kind=config code=2 message=line 3: grid.n: must be >= 3"
        );
    }
}
