//! Semi-discrete radial system.
//!
//! The discrete potential is
//!
//! ```text
//! U_h(f) = Σ_cells ΔR Φ(R_{j+½}) (f'_{j+½}² − 1)²  +  Σ_nodes w_j Φ(R_j) (φ(f_j)²/Φ(R_j)² − 1)²
//! ```
//!
//! with `f'_{j+½} = (f_{j+1} − f_j)/ΔR` and trapezoid weights `w_j`, and the
//! kinetic energy is `½ Σ w_j Φ(R_j) f_t,j²`. The accelerations are
//! `−(∂U_h/∂f_j)/(w_j Φ_j)`, so the interior update is the centred flux
//! difference `(1/Φ) ∂_R(Φ ∂W/∂x^r_{,R}) − ∂W/∂x^r`, and the half-weight end
//! nodes are the same formula with a mirrored ghost flux (zero traction).

use crate::elasticity::{hoop_energy, stretch_stiffness};
use crate::error::{Error, Result};
use crate::geometry::CurvatureProfile;

use super::{EnergyReport, ProblemConfig, RadialGrid};

#[derive(Debug, Clone)]
pub struct RadialModel {
    body: CurvatureProfile,
    space: CurvatureProfile,
    grid: RadialGrid,
    dr: f64,
    nodes: Vec<f64>,
    phi_node: Vec<f64>,
    phi_mid: Vec<f64>,
    /// Lumped mass `w_j Φ(R_j)`.
    mass: Vec<f64>,
    damping: f64,
}

impl RadialModel {
    pub fn new(config: &ProblemConfig) -> Result<Self> {
        let grid = config.grid;
        let body = config.body;
        let phi_node = grid
            .nodes()
            .iter()
            .map(|&r| body.warp(r))
            .collect::<Result<Vec<_>>>()?;
        if phi_node.iter().any(|p| *p <= 0.0) {
            return Err(Error::invalid("body warp must be positive on the grid (R_min > 0)"));
        }
        let phi_mid = (0..grid.n() - 1)
            .map(|j| body.warp(grid.midpoint(j)))
            .collect::<Result<Vec<_>>>()?;
        let mass = grid
            .trapezoid_weights()
            .iter()
            .zip(&phi_node)
            .map(|(w, p)| w * p)
            .collect();
        Ok(Self {
            body,
            space: config.space,
            grid,
            dr: grid.spacing(),
            nodes: grid.nodes(),
            phi_node,
            phi_mid,
            mass,
            damping: config.mass_growth_rate,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn body(&self) -> &CurvatureProfile {
        &self.body
    }

    pub fn space(&self) -> &CurvatureProfile {
        &self.space
    }

    pub fn lumped_mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub(crate) fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }

    /// Checks that `f` lies in the space domain and is strictly increasing.
    pub fn check_field(&self, f: &[f64]) -> Result<()> {
        let n = self.grid.n();
        if f.len() != n {
            return Err(Error::invalid(format!("field has {} values for {n} nodes", f.len())));
        }
        for (j, &v) in f.iter().enumerate() {
            if self.space.check_domain(v).is_err() {
                return Err(Error::NodeDomain {
                    node: j,
                    reason: format!("f = {v} outside the space domain"),
                });
            }
            if j > 0 && v <= f[j - 1] {
                return Err(Error::NodeDomain {
                    node: j,
                    reason: "f is not strictly increasing".into(),
                });
            }
        }
        Ok(())
    }

    /// `f'_{c+½} − 1`, formed from displacements `f − R` so that the
    /// identity map has exactly zero stretch.
    #[inline]
    fn slope_excess(&self, f: &[f64], c: usize) -> f64 {
        ((f[c + 1] - self.nodes[c + 1]) - (f[c] - self.nodes[c])) / self.dr
    }

    pub fn potential(&self, f: &[f64]) -> Result<f64> {
        self.check_field(f)?;
        Ok(self.potential_unchecked(f))
    }

    fn potential_unchecked(&self, f: &[f64]) -> f64 {
        let w = self.grid.trapezoid_weights();
        let stretch: f64 = self
            .phi_mid
            .iter()
            .enumerate()
            .map(|(c, p)| {
                let d = self.slope_excess(f, c);
                let e = d * (2.0 + d);
                self.dr * p * e * e
            })
            .sum();
        let hoop: f64 = f
            .iter()
            .zip(&self.phi_node)
            .zip(&w)
            .map(|((&fj, &pj), &wj)| wj * pj * hoop_energy(self.space.warp_unchecked(fj), pj))
            .sum();
        stretch + hoop
    }

    pub fn kinetic(&self, ft: &[f64]) -> f64 {
        0.5 * ft.iter().zip(&self.mass).map(|(v, m)| m * v * v).sum::<f64>()
    }

    pub fn energy(&self, f: &[f64], ft: &[f64]) -> Result<EnergyReport> {
        let potential = self.potential(f)?;
        let kinetic = self.kinetic(ft);
        Ok(EnergyReport {
            kinetic,
            potential,
            total: kinetic + potential,
        })
    }

    /// `∂W/∂x^r` and its derivative in `f` at node `j`.
    fn hoop_terms(&self, j: usize, f: f64) -> (f64, f64) {
        let big_phi = self.phi_node[j];
        let inv2 = 1.0 / (big_phi * big_phi);
        let phi = self.space.warp_unchecked(f);
        let dphi = self.space.warp_derivative_unchecked(f);
        let ddphi = self.space.warp_second_derivative_unchecked(f);
        let q = phi * phi * inv2;
        let dq = 2.0 * phi * dphi * inv2;
        let ddq = 2.0 * (dphi * dphi + phi * ddphi) * inv2;
        (2.0 * (q - 1.0) * dq, 2.0 * dq * dq + 2.0 * (q - 1.0) * ddq)
    }

    /// `∂U_h/∂f`.
    pub fn gradient(&self, f: &[f64], out: &mut [f64]) {
        let n = self.grid.n();
        let w = self.grid.trapezoid_weights();
        for j in 0..n {
            out[j] = w[j] * self.phi_node[j] * self.hoop_terms(j, f[j]).0;
        }
        for c in 0..n - 1 {
            let d = self.slope_excess(f, c);
            let flux = self.phi_mid[c] * 4.0 * (1.0 + d) * d * (2.0 + d);
            out[c] -= flux;
            out[c + 1] += flux;
        }
    }

    /// Tridiagonal Hessian of `U_h`: `(diagonal, off-diagonal)`.
    pub fn hessian(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.n();
        let w = self.grid.trapezoid_weights();
        let mut diag: Vec<f64> = (0..n)
            .map(|j| w[j] * self.phi_node[j] * self.hoop_terms(j, f[j]).1)
            .collect();
        let mut off = vec![0.0; n - 1];
        for c in 0..n - 1 {
            let k = self.phi_mid[c] * stretch_stiffness(1.0 + self.slope_excess(f, c)) / self.dr;
            diag[c] += k;
            diag[c + 1] += k;
            off[c] = -k;
        }
        (diag, off)
    }

    /// Elastic acceleration `−M⁻¹ ∂U_h/∂f`, without damping.
    pub fn elastic_acceleration(&self, f: &[f64], out: &mut [f64]) {
        self.gradient(f, out);
        for (a, m) in out.iter_mut().zip(&self.mass) {
            *a = -*a / m;
        }
    }

    /// Full right-hand side including the `−(ρ̇/ρ) f_t` term.
    pub fn acceleration(&self, f: &[f64], ft: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_field(f)?;
        self.elastic_acceleration(f, out);
        if self.damping != 0.0 {
            for (a, v) in out.iter_mut().zip(ft) {
                *a -= self.damping * v;
            }
        }
        Ok(())
    }

    /// Max-norm of the elastic acceleration.
    pub fn residual_norm(&self, f: &[f64]) -> f64 {
        let mut a = vec![0.0; f.len()];
        self.elastic_acceleration(f, &mut a);
        a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest linearised wave speed `√|12f'² − 4|` over the cells.
    pub fn max_wave_speed(&self, f: &[f64]) -> f64 {
        let c2 = f
            .windows(2)
            .map(|c| stretch_stiffness((c[1] - c[0]) / self.dr).abs())
            .fold(0.0, f64::max);
        if c2 > 1e-12 {
            c2.sqrt()
        } else {
            1.0
        }
    }

    /// `0.25 ΔR / max c`.
    pub fn stable_dt(&self, f: &[f64]) -> f64 {
        0.25 * self.dr / self.max_wave_speed(f)
    }
}

/// Solves the symmetric tridiagonal system `(diag, off) x = rhs` by LDLᵀ.
/// Returns `None` when a pivot is not positive.
pub(crate) fn solve_spd_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n.saturating_sub(1)];
    d[0] = diag[0];
    if !(d[0] > 0.0) {
        return None;
    }
    for i in 1..n {
        l[i - 1] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - l[i - 1] * off[i - 1];
        if !(d[i] > 0.0) || !d[i].is_finite() {
            return None;
        }
    }
    let mut x = rhs.to_vec();
    for i in 1..n {
        x[i] -= l[i - 1] * x[i - 1];
    }
    for i in 0..n {
        x[i] /= d[i];
    }
    for i in (0..n - 1).rev() {
        x[i] -= l[i] * x[i + 1];
    }
    Some(x)
}
