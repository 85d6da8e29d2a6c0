//! Point-mass mechanics on an azimuthal surface.
//!
//! Newton's law in coordinates reads `m g_{li}(ẍ^i + Γ^i_{jk} ẋ^j ẋ^k) = F_l`,
//! so the coordinate acceleration is `(1/m) g^{il} F_l − Γ^i_{jk} v^j v^k`.
//! With `F = 0` trajectories are geodesics.

use crate::error::{Error, Result};
use crate::geometry::AzimuthalMetric;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    /// `(r, θ)`
    pub position: [f64; 2],
    /// `(v^r, v^θ)`
    pub velocity: [f64; 2],
    pub mass: f64,
}

impl ParticleState {
    pub fn new(position: [f64; 2], velocity: [f64; 2], mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid(format!("mass must be positive, got {mass}")));
        }
        Ok(Self {
            position,
            velocity,
            mass,
        })
    }

    /// `g(v, v)`.
    pub fn speed_squared(&self, metric: &AzimuthalMetric) -> Result<f64> {
        metric.inner(self.position[0], self.velocity, self.velocity)
    }

    /// Momentum covector `p_i = m g_{ij} v^j`.
    pub fn momentum(&self, metric: &AzimuthalMetric) -> Result<[f64; 2]> {
        let (grr, gtt) = metric.components(self.position[0])?;
        Ok([
            self.mass * grr * self.velocity[0],
            self.mass * gtt * self.velocity[1],
        ])
    }
}

/// A covector field `(r, θ) ↦ (F_r, F_θ)`.
pub trait ForceField {
    fn force(&self, position: [f64; 2]) -> [f64; 2];
}

impl<F> ForceField for F
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    fn force(&self, position: [f64; 2]) -> [f64; 2] {
        self(position)
    }
}

/// Coordinate acceleration `(a^r, a^θ)`.
pub fn covariant_rhs(
    state: &ParticleState,
    metric: &AzimuthalMetric,
    force: Option<&dyn ForceField>,
) -> Result<[f64; 2]> {
    let r = state.position[0];
    let gamma = metric.christoffel(r)?;
    let ginv = metric.inverse(r)?;
    let [vr, vt] = state.velocity;
    let mut a = [
        -gamma.r_theta_theta * vt * vt,
        -2.0 * gamma.theta_r_theta * vr * vt,
    ];
    if let Some(field) = force {
        let f = field.force(state.position);
        if !(f[0].is_finite() && f[1].is_finite()) {
            return Err(Error::invalid(format!("non-finite force at {:?}", state.position)));
        }
        a[0] += ginv[(0, 0)] * f[0] / state.mass;
        a[1] += ginv[(1, 1)] * f[1] / state.mass;
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<ParticleState>,
    /// Set when integration stopped early because the particle left the
    /// metric's domain; holds the offending error message.
    pub failure: Option<String>,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(move |k| k as f64 * self.dt)
    }
}

type Phase = [f64; 4];

fn phase_rhs(
    y: &Phase,
    mass: f64,
    metric: &AzimuthalMetric,
    force: Option<&dyn ForceField>,
) -> Result<Phase> {
    let s = ParticleState {
        position: [y[0], y[1]],
        velocity: [y[2], y[3]],
        mass,
    };
    let a = covariant_rhs(&s, metric, force)?;
    Ok([y[2], y[3], a[0], a[1]])
}

fn axpy(y: &Phase, h: f64, k: &Phase) -> Phase {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// Classical fourth-order Runge-Kutta integration of [`covariant_rhs`].
///
/// Returns `steps + 1` states on success. If the particle leaves the domain,
/// the trajectory is truncated at the last valid state and `failure` is set.
pub fn integrate_particle(
    initial: &ParticleState,
    metric: &AzimuthalMetric,
    force: Option<&dyn ForceField>,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    ParticleState::new(initial.position, initial.velocity, initial.mass)?;
    metric.christoffel(initial.position[0])?;

    let mass = initial.mass;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(*initial);
    let mut y: Phase = [
        initial.position[0],
        initial.position[1],
        initial.velocity[0],
        initial.velocity[1],
    ];
    let rk4 = |y: &Phase| -> Result<Phase> {
        let k1 = phase_rhs(y, mass, metric, force)?;
        let k2 = phase_rhs(&axpy(y, 0.5 * dt, &k1), mass, metric, force)?;
        let k3 = phase_rhs(&axpy(y, 0.5 * dt, &k2), mass, metric, force)?;
        let k4 = phase_rhs(&axpy(y, dt, &k3), mass, metric, force)?;
        let next: Phase = std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        metric.christoffel(next[0])?;
        Ok(next)
    };
    for _ in 0..steps {
        match rk4(&y) {
            Ok(next) => {
                y = next;
                states.push(ParticleState {
                    position: [y[0], y[1]],
                    velocity: [y[2], y[3]],
                    mass,
                });
            }
            Err(e) => {
                return Ok(Trajectory {
                    dt,
                    states,
                    failure: Some(e.to_string()),
                })
            }
        }
    }
    Ok(Trajectory {
        dt,
        states,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurvatureProfile;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_sphere() -> AzimuthalMetric {
        AzimuthalMetric::new(CurvatureProfile::spherical(1.0).unwrap())
    }

    #[test]
    fn rhs_examples() {
        let s = ParticleState::new([PI / 2.0, 0.3], [0.0, 1.7], 1.0).unwrap();
        let a = covariant_rhs(&s, &unit_sphere(), None).unwrap();
        assert!(a[0].abs() < 1e-15 && a[1].abs() < 1e-15);

        let flat = AzimuthalMetric::new(CurvatureProfile::flat());
        let s = ParticleState::new([2.0, 0.0], [0.0, 1.0], 1.0).unwrap();
        let a = covariant_rhs(&s, &flat, None).unwrap();
        assert_eq!(a, [2.0, 0.0]);

        let s = ParticleState::new([0.7, 1.0], [0.0, 0.0], 3.0).unwrap();
        let a = covariant_rhs(&s, &AzimuthalMetric::new(CurvatureProfile::hyperbolic(0.4).unwrap()), None).unwrap();
        assert_eq!(a, [0.0, 0.0]);
    }

    #[test]
    fn rhs_singular_at_origin() {
        let s = ParticleState::new([0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        assert!(covariant_rhs(&s, &unit_sphere(), None).is_err());
        assert!(ParticleState::new([0.5, 0.0], [1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn force_is_raised_with_inverse_metric() {
        let m = unit_sphere();
        let r = 1.0;
        let s = ParticleState::new([r, 0.0], [0.0, 0.0], 2.0).unwrap();
        let field = |_: [f64; 2]| [0.4, 0.3];
        let a = covariant_rhs(&s, &m, Some(&field)).unwrap();
        assert_relative_eq!(a[0], 0.2, epsilon = 1e-15);
        assert_relative_eq!(a[1], 0.15 / r.sin().powi(2), epsilon = 1e-14);
    }

    #[test]
    fn mass_in_metric_convention_agrees() {
        // folding m into the metric, g̃ = m g, leaves Γ unchanged and gives
        // a = g̃^{-1} F − Γ v v
        let m = unit_sphere();
        let mass = 2.5;
        let pos = [1.1, 0.2];
        let vel = [0.3, -0.4];
        let field = |p: [f64; 2]| [p[0].cos(), 0.2 * p[1]];
        let s = ParticleState::new(pos, vel, mass).unwrap();
        let a = covariant_rhs(&s, &m, Some(&field)).unwrap();

        let h = 1e-5;
        let gt = |r: f64| {
            let (a, b) = m.components(r).unwrap();
            (mass * a, mass * b)
        };
        let dgtt = (gt(pos[0] + h).1 - gt(pos[0] - h).1) / (2.0 * h);
        let (grr, gtt) = gt(pos[0]);
        let gamma_r_tt = -0.5 * dgtt / grr;
        let gamma_t_rt = 0.5 * dgtt / gtt;
        let f = field(pos);
        let expected = [
            f[0] / grr - gamma_r_tt * vel[1] * vel[1],
            f[1] / gtt - 2.0 * gamma_t_rt * vel[0] * vel[1],
        ];
        assert_relative_eq!(a[0], expected[0], epsilon = 1e-9);
        assert_relative_eq!(a[1], expected[1], epsilon = 1e-9);
    }

    #[test]
    fn meridian_is_straight() {
        let m = unit_sphere();
        let s = ParticleState::new([0.4, 1.0], [0.5, 0.0], 1.0).unwrap();
        let traj = integrate_particle(&s, &m, None, 1e-3, 2000).unwrap();
        assert_eq!(traj.states.len(), 2001);
        assert_eq!(traj.states[0], s);
        let last = traj.states.last().unwrap();
        assert_relative_eq!(last.position[0], 0.4 + 0.5 * 2.0, epsilon = 1e-12);
        assert_relative_eq!(last.position[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn equator_stays_on_equator() {
        let m = unit_sphere();
        let omega = 0.8;
        let s = ParticleState::new([PI / 2.0, 0.0], [0.0, omega], 1.0).unwrap();
        let traj = integrate_particle(&s, &m, None, 1e-3, 3000).unwrap();
        for (t, st) in traj.times().zip(&traj.states) {
            assert!((st.position[0] - PI / 2.0).abs() < 1e-12);
            assert!((st.position[1] - omega * t).abs() < 1e-10);
        }
    }

    #[test]
    fn leaving_domain_truncates() {
        // a meridian on the sphere reaches the pole at r = π
        let m = unit_sphere();
        let s = ParticleState::new([2.5, 0.0], [1.0, 0.0], 1.0).unwrap();
        let traj = integrate_particle(&s, &m, None, 1e-2, 200).unwrap();
        assert!(!traj.completed());
        assert!(traj.states.len() < 201);
        assert!(traj.states.iter().all(|s| s.position[0] < PI));
    }

    /// With `F = −dV` the pairing `F(v)` is the power, so `½ m g(v,v) + V`
    /// is conserved along the trajectory.
    #[test]
    fn force_pairs_with_velocity_as_power() {
        let m = AzimuthalMetric::new(CurvatureProfile::spherical(0.5).unwrap());
        let potential = |p: [f64; 2]| 0.7 * (p[0] - 1.0).powi(2) + 0.1 * p[1].sin();
        let field = |p: [f64; 2]| [-1.4 * (p[0] - 1.0), -0.1 * p[1].cos()];
        let s = ParticleState::new([1.2, 0.3], [0.2, 0.4], 1.5).unwrap();
        let traj = integrate_particle(&s, &m, Some(&field), 1e-3, 5000).unwrap();
        assert!(traj.completed());
        let energy = |s: &ParticleState| 0.5 * s.mass * s.speed_squared(&m).unwrap() + potential(s.position);
        let e0 = energy(&s);
        for st in &traj.states {
            assert!((energy(st) - e0).abs() < 1e-11 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn momentum_pairing() {
        let m = unit_sphere();
        let s = ParticleState::new([1.0, 0.0], [0.1, 0.5], 2.0).unwrap();
        let p = s.momentum(&m).unwrap();
        assert_relative_eq!(p[0], 0.2, epsilon = 1e-15);
        assert_relative_eq!(p[1], 2.0 * 1f64.sin().powi(2) * 0.5, epsilon = 1e-15);
    }
}
