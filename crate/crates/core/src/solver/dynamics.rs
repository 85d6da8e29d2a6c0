use crate::error::{Error, Result};

use super::equilibrium::solve_equilibrium;
use super::model::RadialModel;
use super::{EnergyReport, ProblemConfig, RadialState, TimeStep};

/// Number of steps between time-step re-estimates in [`TimeStep::Auto`] mode.
const DT_REFRESH_STEPS: usize = 100;

/// Velocity blow-up threshold relative to the problem's velocity scale.
const BLOW_UP_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub t: f64,
    pub distance: f64,
    pub energy: EnergyReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub equilibrium_distance: f64,
    pub series: Vec<SeriesPoint>,
    pub snapshots: Vec<RadialState>,
    /// Time step in use at the end of the run.
    pub dt: f64,
    pub steps: usize,
}

/// Kick-drift-kick integrator bound to a model, caching the acceleration
/// between steps.
struct Verlet<'a> {
    model: &'a RadialModel,
    acc: Vec<f64>,
}

impl<'a> Verlet<'a> {
    fn new(model: &'a RadialModel, f: &[f64]) -> Self {
        let mut acc = vec![0.0; f.len()];
        model.elastic_acceleration(f, &mut acc);
        Self { model, acc }
    }

    /// The damping term `−γ f_t` is split between the two half kicks, the
    /// second one implicitly, so the scheme stays second order.
    fn step(&mut self, state: &mut RadialState, dt: f64) -> Result<()> {
        let gamma = self.model.damping();
        let half = 0.5 * dt;
        for ((v, a), x) in state.f_t.iter_mut().zip(&self.acc).zip(state.f.iter_mut()) {
            *v += half * (a - gamma * *v);
            *x += dt * *v;
        }
        self.model.check_field(&state.f)?;
        self.model.elastic_acceleration(&state.f, &mut self.acc);
        let denom = 1.0 + half * gamma;
        for (v, a) in state.f_t.iter_mut().zip(&self.acc) {
            *v = (*v + half * a) / denom;
        }
        state.time += dt;
        if state.f_t.iter().chain(&state.f).any(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                time: state.time,
                reason: "non-finite state".into(),
            });
        }
        Ok(())
    }
}

/// One velocity-Verlet step of the radial equation.
pub fn step_dynamics(state: &RadialState, config: &ProblemConfig, dt: f64) -> Result<RadialState> {
    if !dt.is_finite() || dt == 0.0 {
        return Err(Error::invalid(format!("time step must be finite and nonzero, got {dt}")));
    }
    let model = RadialModel::new(config)?;
    model.check_field(&state.f)?;
    if state.f_t.len() != state.f.len() {
        return Err(Error::invalid("velocity and field lengths differ"));
    }
    let mut next = state.clone();
    Verlet::new(&model, &state.f).step(&mut next, dt)?;
    Ok(next)
}

fn steps_per_output(interval: f64, target_dt: f64) -> usize {
    ((interval / target_dt) - 1e-9).ceil().max(1.0) as usize
}

/// Runs the dynamics from the perturbed equilibrium until `t_end`.
///
/// The step is chosen so that an integer number of steps fits each output
/// interval; in auto mode it is recomputed from the stability bound at the
/// first output boundary after every [`DT_REFRESH_STEPS`] steps.
pub fn simulate(config: &ProblemConfig) -> Result<SimulationOutput> {
    config.validate()?;
    let equilibrium = solve_equilibrium(config)?;
    let equilibrium_distance = equilibrium.distance();

    let mut state = equilibrium.state;
    for (f, p) in state.f.iter_mut().zip(config.perturbation.shape(&config.grid)) {
        *f += p;
    }
    simulate_from(config, state, equilibrium_distance)
}

/// Runs the dynamics from an explicit initial state.
pub(crate) fn simulate_from(
    config: &ProblemConfig,
    mut state: RadialState,
    equilibrium_distance: f64,
) -> Result<SimulationOutput> {
    let model = RadialModel::new(config)?;
    model.check_field(&state.f)?;

    let interval = config.output_interval;
    let n_outputs = ((config.t_end / interval) - 1e-9).ceil().max(1.0) as usize;
    let target = |f: &[f64]| match config.dt {
        TimeStep::Auto => model.stable_dt(f),
        TimeStep::Fixed(dt) => dt,
    };
    let mut per_output = steps_per_output(interval, target(&state.f));
    let mut dt = interval / per_output as f64;

    let velocity_scale = state
        .f_t
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(model.max_wave_speed(&state.f) * config.grid.length());

    let record = |state: &RadialState| -> Result<SeriesPoint> {
        Ok(SeriesPoint {
            t: state.time,
            distance: state.boundary_distance(),
            energy: model.energy(&state.f, &state.f_t)?,
        })
    };

    let mut series = Vec::with_capacity(n_outputs + 1);
    let mut snapshots = Vec::new();
    series.push(record(&state)?);
    if config.snapshot_every > 0 {
        snapshots.push(state.clone());
    }

    let mut verlet = Verlet::new(&model, &state.f);
    let mut steps = 0;
    let mut since_refresh = 0;
    for k in 1..=n_outputs {
        for _ in 0..per_output {
            verlet.step(&mut state, dt)?;
            steps += 1;
            since_refresh += 1;
        }
        // land exactly on the output time
        state.time = k as f64 * interval;
        if let Some(v) = state.f_t.iter().find(|v| v.abs() > BLOW_UP_FACTOR * velocity_scale) {
            return Err(Error::BlowUp {
                time: state.time,
                reason: format!("velocity {v:.3e} exceeds {BLOW_UP_FACTOR:e} x scale {velocity_scale:.3e}"),
            });
        }
        if !state.is_monotone() {
            return Err(Error::BlowUp {
                time: state.time,
                reason: "embedding lost: f is no longer increasing".into(),
            });
        }
        series.push(record(&state)?);
        if config.snapshot_every > 0 && k % config.snapshot_every == 0 {
            snapshots.push(state.clone());
        }
        if matches!(config.dt, TimeStep::Auto) && since_refresh >= DT_REFRESH_STEPS {
            per_output = steps_per_output(interval, target(&state.f));
            dt = interval / per_output as f64;
            since_refresh = 0;
        }
    }

    Ok(SimulationOutput {
        equilibrium_distance,
        series,
        snapshots,
        dt,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurvatureProfile;
    use crate::solver::{total_energy, Perturbation, RadialGrid};

    fn small(n: usize) -> ProblemConfig {
        ProblemConfig {
            grid: RadialGrid::new(0.2, 1.0, n).unwrap(),
            ..ProblemConfig::default()
        }
    }

    #[test]
    fn compatible_rest_state_is_fixed_point() {
        let cfg = ProblemConfig {
            space: CurvatureProfile::spherical(2.0).unwrap(),
            ..small(41)
        };
        let state = RadialState::at_rest(cfg.grid.nodes());
        let next = step_dynamics(&state, &cfg, 1e-3).unwrap();
        for (a, b) in next.f.iter().zip(&state.f) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(next.f_t.iter().all(|v| v.abs() < 1e-14));
        assert_eq!(next.time, 1e-3);
    }

    #[test]
    fn equilibrium_persists() {
        let cfg = small(41);
        let eq = solve_equilibrium(&cfg).unwrap();
        let model = RadialModel::new(&cfg).unwrap();
        let dt = model.stable_dt(&eq.state.f);
        let mut state = eq.state.clone();
        let mut v = Verlet::new(&model, &state.f);
        for _ in 0..1000 {
            v.step(&mut state, dt).unwrap();
        }
        let drift = state
            .f
            .iter()
            .zip(&eq.state.f)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(drift < 1e-10, "drift {drift}");
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let cfg = small(41);
        let eq = solve_equilibrium(&cfg).unwrap();
        let mut start = eq.state.clone();
        for (f, p) in start.f.iter_mut().zip(cfg.perturbation.shape(&cfg.grid)) {
            *f += p;
        }
        start.f_t = (0..41).map(|j| 0.01 * (j as f64 * 0.3).cos()).collect();
        let dt = 1e-3;
        let fwd = step_dynamics(&start, &cfg, dt).unwrap();
        let back = step_dynamics(&fwd, &cfg, -dt).unwrap();
        for (a, b) in back.f.iter().zip(&start.f) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in back.f_t.iter().zip(&start.f_t) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn step_rejects_bad_input() {
        let cfg = small(11);
        let state = RadialState::at_rest(cfg.grid.nodes());
        assert!(step_dynamics(&state, &cfg, f64::NAN).is_err());
        let mut bad = state.clone();
        bad.f[5] = bad.f[4];
        assert!(step_dynamics(&bad, &cfg, 1e-3).is_err());
    }

    #[test]
    fn zero_perturbation_gives_constant_distance() {
        let cfg = ProblemConfig {
            t_end: 0.5,
            output_interval: 0.05,
            perturbation: Perturbation { amplitude: 0.0, mode: 1 },
            ..small(41)
        };
        let out = simulate(&cfg).unwrap();
        assert_eq!(out.series.len(), 11);
        for p in &out.series {
            assert!((p.distance - out.equilibrium_distance).abs() < 1e-12);
        }
        assert!((out.series.last().unwrap().t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn energy_is_conserved_without_damping() {
        let cfg = ProblemConfig {
            t_end: 2.0,
            output_interval: 0.02,
            ..small(51)
        };
        let out = simulate(&cfg).unwrap();
        let e0 = out.series[0].energy.total;
        let drift = out
            .series
            .iter()
            .fold(0.0f64, |m, p| m.max((p.energy.total - e0).abs()))
            / e0;
        assert!(drift < 1e-3, "relative drift {drift}");
        assert!(out.series.iter().all(|p| p.energy.kinetic >= 0.0 && p.energy.potential >= 0.0));
    }

    #[test]
    fn damping_dissipates() {
        let cfg = ProblemConfig {
            t_end: 2.0,
            output_interval: 0.02,
            mass_growth_rate: 0.5,
            perturbation: Perturbation { amplitude: 0.02, mode: 1 },
            ..small(51)
        };
        let out = simulate(&cfg).unwrap();
        for w in out.series.windows(2) {
            assert!(w[1].energy.total <= w[0].energy.total);
        }
        let eq = solve_equilibrium(&cfg).unwrap();
        let floor = total_energy(&eq.state, &cfg).unwrap().total;
        assert!(out.series.last().unwrap().energy.total >= floor - 1e-12);
    }

    #[test]
    fn fixed_dt_is_aligned_to_output() {
        assert_eq!(steps_per_output(0.01, 1e-3), 10);
        assert_eq!(steps_per_output(0.01, 3e-3), 4);
        assert_eq!(steps_per_output(0.01, 0.5), 1);
    }

    #[test]
    fn snapshots_follow_cadence() {
        let cfg = ProblemConfig {
            t_end: 0.1,
            output_interval: 0.01,
            snapshot_every: 5,
            ..small(21)
        };
        let out = simulate(&cfg).unwrap();
        assert_eq!(out.snapshots.len(), 3);
        assert!((out.snapshots[2].time - 0.1).abs() < 1e-12);
    }
}
