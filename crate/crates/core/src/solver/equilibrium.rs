use crate::error::{Error, Result};

use super::model::{solve_spd_tridiagonal, RadialModel};
use super::{ProblemConfig, RadialState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions {
    /// Target for the max-norm of the elastic acceleration.
    pub tolerance: f64,
    pub max_newton_iterations: usize,
    /// Damped-dynamics rescue phases tried when Newton stalls.
    pub max_relaxation_rounds: usize,
    pub relaxation_steps: usize,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_newton_iterations: 100,
            max_relaxation_rounds: 4,
            relaxation_steps: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    pub state: RadialState,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
}

impl EquilibriumSolution {
    pub fn distance(&self) -> f64 {
        self.state.boundary_distance()
    }
}

pub fn solve_equilibrium(config: &ProblemConfig) -> Result<EquilibriumSolution> {
    solve_equilibrium_with(config, &EquilibriumOptions::default())
}

/// Damped Newton on the discrete energy `U_h`, with an Armijo backtracking
/// line search. Indefinite Hessians get a diagonal shift. If Newton stalls,
/// a burst of heavily damped dynamics moves the field before Newton resumes.
///
/// Converges when the max-norm of the acceleration drops below
/// `options.tolerance`, or when the Newton correction shrinks to a few ulps
/// of `f`. On fine grids the second test is what stops the iteration: one ulp
/// of `f` moves the acceleration by about `c² ε / ΔR²`, which is already
/// `~1e-10` at 400 nodes. `residual` always reports the attained value.
pub fn solve_equilibrium_with(
    config: &ProblemConfig,
    options: &EquilibriumOptions,
) -> Result<EquilibriumSolution> {
    config.validate()?;
    let model = RadialModel::new(config)?;
    let mut f = config.initial_guess();
    model.check_field(&f)?;

    let n = f.len();
    let mut grad = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut rounds = 0;

    loop {
        let mut residual = model.residual_norm(&f);
        history.push(residual);
        let mut stalled = false;
        while residual >= options.tolerance && iterations < options.max_newton_iterations {
            iterations += 1;
            let (next, correction) = newton_step(&model, &f, &mut grad);
            if at_roundoff(correction, &f) {
                // the Newton correction is a few ulps of f: the residual is
                // as small as the representation of f allows
                return Ok(EquilibriumSolution {
                    state: RadialState::at_rest(f),
                    iterations,
                    residual,
                    residual_history: history,
                });
            }
            match next {
                Some(next) => {
                    f = next;
                    residual = model.residual_norm(&f);
                    history.push(residual);
                }
                None => {
                    stalled = true;
                    break;
                }
            }
        }
        if residual < options.tolerance {
            return Ok(EquilibriumSolution {
                state: RadialState::at_rest(f),
                iterations,
                residual,
                residual_history: history,
            });
        }
        if !stalled || rounds >= options.max_relaxation_rounds {
            return Err(Error::NonConvergence {
                iterations,
                residual,
                history,
            });
        }
        rounds += 1;
        f = relax(&model, f, options.relaxation_steps)?;
    }
}

/// Relative size of a Newton correction treated as rounding noise.
const ROUNDOFF_STEPS: f64 = 8.0 * f64::EPSILON;

fn at_roundoff(correction: f64, f: &[f64]) -> bool {
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    correction <= ROUNDOFF_STEPS * scale
}

/// One line-searched Newton step. Returns the accepted iterate, if any, and
/// the max-norm of the full Newton correction.
fn newton_step(model: &RadialModel, f: &[f64], grad: &mut [f64]) -> (Option<Vec<f64>>, f64) {
    let n = f.len();
    model.gradient(f, grad);
    let Ok(energy) = model.potential(f) else {
        return (None, f64::INFINITY);
    };
    let residual = model.residual_norm(f);
    let (diag, off) = model.hessian(f);
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();

    let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-12);
    let mut shift = 0.0;
    let direction = loop {
        let shifted: Vec<f64> = diag.iter().map(|d| d + shift).collect();
        if let Some(d) = solve_spd_tridiagonal(&shifted, &off, &rhs) {
            break d;
        }
        shift = if shift == 0.0 { 1e-8 * scale } else { 10.0 * shift };
        if shift > 1e8 * scale {
            return (None, f64::INFINITY);
        }
    };
    // a shifted solve is not a Newton correction
    let correction = if shift == 0.0 {
        direction.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    } else {
        f64::INFINITY
    };

    let slope: f64 = grad.iter().zip(&direction).map(|(g, d)| g * d).sum();
    let mut alpha = 1.0;
    let mut trial = vec![0.0; n];
    while alpha > 1e-10 {
        for ((t, x), d) in trial.iter_mut().zip(f).zip(&direction) {
            *t = x + alpha * d;
        }
        if let Ok(e) = model.potential(&trial) {
            if e <= energy + 1e-4 * alpha * slope {
                return (Some(trial), correction);
            }
            // near the minimum the energy test drowns in rounding; fall back
            // on the residual
            let noise = 1e-13 * energy.abs().max(1e-300);
            if e <= energy + noise && model.residual_norm(&trial) < residual {
                return (Some(trial), correction);
            }
        }
        alpha *= 0.5;
    }
    (None, correction)
}

/// Heavily damped dynamics used as a rescue when Newton stalls.
fn relax(model: &RadialModel, mut f: Vec<f64>, steps: usize) -> Result<Vec<f64>> {
    let damped = model.clone().with_damping(10.0);
    let n = f.len();
    let mut v = vec![0.0; n];
    let mut a = vec![0.0; n];
    let dt = damped.stable_dt(&f);
    damped.acceleration(&f, &v, &mut a)?;
    for _ in 0..steps {
        for j in 0..n {
            v[j] += 0.5 * dt * a[j];
            f[j] += dt * v[j];
        }
        damped.acceleration(&f, &v, &mut a)?;
        for j in 0..n {
            v[j] += 0.5 * dt * a[j];
        }
    }
    Ok(f)
}
