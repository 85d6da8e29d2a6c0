//! Radial reduction of the elastodynamic equations for an azimuthally
//! symmetric annulus: `f_tt = (1/Φ) ∂_R(Φ ∂W/∂x^r_{,R}) − ∂W/∂x^r − (ρ̇/ρ) f_t`
//! with free ends, `f'(R_min) = f'(R_max) = 1`.

mod dynamics;
mod equilibrium;
mod grid;
mod model;

pub use dynamics::{simulate, step_dynamics, SeriesPoint, SimulationOutput};
pub use equilibrium::{solve_equilibrium, solve_equilibrium_with, EquilibriumOptions, EquilibriumSolution};
pub use grid::{apply_boundary, nodal_slope, GhostValues, RadialGrid};
pub use model::RadialModel;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::CurvatureProfile;

/// Discretised radial field and its velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    pub f: Vec<f64>,
    pub f_t: Vec<f64>,
    pub time: f64,
}

impl RadialState {
    pub fn at_rest(f: Vec<f64>) -> Self {
        let n = f.len();
        Self {
            f,
            f_t: vec![0.0; n],
            time: 0.0,
        }
    }

    /// `f(R_max) − f(R_min)`.
    pub fn boundary_distance(&self) -> f64 {
        self.f[self.f.len() - 1] - self.f[0]
    }

    pub fn is_monotone(&self) -> bool {
        self.f.windows(2).all(|w| w[1] > w[0])
    }
}

/// Energies per radian (the azimuthal factor 2π is dropped throughout).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `0.25 ΔR / max c`, re-estimated as the run proceeds.
    Auto,
    Fixed(f64),
}

/// Initial displacement `amplitude · sin(mode π (R − R_min)/(R_max − R_min))`
/// added to the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub mode: u32,
}

impl Perturbation {
    pub fn shape(&self, grid: &RadialGrid) -> Vec<f64> {
        let l = grid.length();
        grid.nodes()
            .iter()
            .map(|r| {
                self.amplitude * (self.mode as f64 * PI * (r - grid.r_min()) / l).sin()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConfig {
    pub body: CurvatureProfile,
    pub space: CurvatureProfile,
    pub grid: RadialGrid,
    pub dt: TimeStep,
    pub t_end: f64,
    /// `ρ̇/ρ`; positive values dissipate energy.
    pub mass_growth_rate: f64,
    pub perturbation: Perturbation,
    pub output_interval: f64,
    /// Write a snapshot every this many output intervals (0 = none).
    pub snapshot_every: usize,
}

impl Default for ProblemConfig {
    /// Spherical annulus `K = 2`, `R ∈ [0.2, 1.0]` on a sphere with `k = 0.5`.
    fn default() -> Self {
        Self {
            body: CurvatureProfile::spherical(2.0).expect("positive curvature"),
            space: CurvatureProfile::spherical(0.5).expect("positive curvature"),
            grid: RadialGrid::new(0.2, 1.0, 401).expect("valid grid"),
            dt: TimeStep::Auto,
            t_end: 10.0,
            mass_growth_rate: 0.0,
            perturbation: Perturbation {
                amplitude: 0.01,
                mode: 1,
            },
            output_interval: 0.01,
            snapshot_every: 100,
        }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::invalid(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.mass_growth_rate.is_finite() && self.mass_growth_rate >= 0.0) {
            return Err(Error::invalid(format!(
                "mass_growth_rate must be >= 0, got {}",
                self.mass_growth_rate
            )));
        }
        if !(self.output_interval.is_finite() && self.output_interval > 0.0) {
            return Err(Error::invalid(format!(
                "output interval must be positive, got {}",
                self.output_interval
            )));
        }
        if !self.perturbation.amplitude.is_finite() {
            return Err(Error::invalid("perturbation amplitude must be finite"));
        }
        if self.grid.r_min() <= 0.0 {
            return Err(Error::invalid("R_min must be positive (polar coordinates are singular at 0)"));
        }
        self.body.check_domain(self.grid.r_max())?;
        Ok(())
    }

    /// The isometric seed `f = R`. In a spherical space whose pole lies inside
    /// `R_max`, the seed is scaled so the outer node sits at 0.99 of the pole
    /// distance and stays strictly increasing.
    pub fn initial_guess(&self) -> Vec<f64> {
        let nodes = self.grid.nodes();
        match self.space.max_radius().map(|m| 0.99 * m) {
            Some(cap) if self.grid.r_max() > cap => {
                let s = cap / self.grid.r_max();
                nodes.into_iter().map(|r| s * r).collect()
            }
            _ => nodes,
        }
    }
}

/// Acceleration `f_tt` at every node.
pub fn radial_rhs(state: &RadialState, config: &ProblemConfig) -> Result<Vec<f64>> {
    let model = RadialModel::new(config)?;
    let mut out = vec![0.0; state.f.len()];
    model.acceleration(&state.f, &state.f_t, &mut out)?;
    Ok(out)
}

pub fn total_energy(state: &RadialState, config: &ProblemConfig) -> Result<EnergyReport> {
    RadialModel::new(config)?.energy(&state.f, &state.f_t)
}
