//! Quadratic hyperelasticity for a body with intrinsic metric `G` embedded in
//! a space with metric `g`.
//!
//! The energy density is evaluated on a first jet `(X, x, ∂x/∂X)`:
//! the pullback `(κ*g)_{αβ} = g_{ij}(x) x^i_{,α} x^j_{,β}` is compared with
//! `G` through the strain `ε = κ*g − G`, and
//! `W = λ (G^{αβ}ε_{αβ})² + μ G^{αγ}G^{βδ}ε_{αβ}ε_{γδ}`.
//! Because `g` depends on position, `W` depends on `x` as well as on the
//! derivative, so the variational stress density has a self-force part `R_i`
//! next to the usual `S_i^α`.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{AzimuthalMetric, CurvatureProfile};
use crate::solver::RadialGrid;

/// Default step for the finite-difference fiber derivative.
pub const FD_STEP: f64 = 1e-5;

/// First jet of a configuration at a body point.
///
/// `deriv[(i, α)] = ∂x^i/∂X^α` with `i ∈ {r, θ}` and `α ∈ {R, Θ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub body_point: Vector2<f64>,
    pub space_point: Vector2<f64>,
    pub deriv: Matrix2<f64>,
}

impl Jet1 {
    pub fn new(body_point: [f64; 2], space_point: [f64; 2], deriv: Matrix2<f64>) -> Self {
        Self {
            body_point: Vector2::from(body_point),
            space_point: Vector2::from(space_point),
            deriv,
        }
    }

    /// Jet of the azimuthal ansatz `x^r = f(R)`, `x^θ = Θ` at radius `r_body`.
    pub fn radial(r_body: f64, f: f64, fprime: f64) -> Self {
        Self::new(
            [r_body, 0.0],
            [f, 0.0],
            Matrix2::new(fprime, 0.0, 0.0, 1.0),
        )
    }

    pub fn is_embedding(&self) -> bool {
        self.deriv.determinant().abs() > f64::EPSILON
    }
}

/// Isotropic Lamé-type parameters. Mass density is fixed to `ρ = √det G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialLaw {
    pub lambda: f64,
    pub mu: f64,
}

impl Default for MaterialLaw {
    /// `λ = 0`, `μ = 1`: `W = ‖κ*g − G‖²_G`.
    fn default() -> Self {
        Self {
            lambda: 0.0,
            mu: 1.0,
        }
    }
}

impl MaterialLaw {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid(format!("mu must be > 0, got {mu}")));
        }
        Ok(Self { lambda, mu })
    }

    /// Whether the closed-form stress derivatives apply.
    pub fn is_reference(&self) -> bool {
        self.lambda == 0.0 && self.mu == 1.0
    }

    /// `C^{αβγδ} = λG^{αβ}G^{γδ} + (μ/2)(G^{αγ}G^{βδ} + G^{αδ}G^{βγ})`.
    pub fn elasticity_tensor(&self, g_inv: &Matrix2<f64>) -> [[[[f64; 2]; 2]; 2]; 2] {
        let mut c = [[[[0.0; 2]; 2]; 2]; 2];
        for (a, ca) in c.iter_mut().enumerate() {
            for (b, cb) in ca.iter_mut().enumerate() {
                for (g, cg) in cb.iter_mut().enumerate() {
                    for (d, cd) in cg.iter_mut().enumerate() {
                        *cd = self.lambda * g_inv[(a, b)] * g_inv[(g, d)]
                            + 0.5
                                * self.mu
                                * (g_inv[(a, g)] * g_inv[(b, d)] + g_inv[(a, d)] * g_inv[(b, g)]);
                    }
                }
            }
        }
        c
    }
}

/// Green-St Venant strain (without the conventional factor ½).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainValue {
    pub epsilon: Matrix2<f64>,
}

impl StrainValue {
    pub fn is_zero(&self, tol: f64) -> bool {
        self.epsilon.iter().all(|e| e.abs() <= tol)
    }
}

/// Variational stress density `(R_i, S_i^α)` at a point.
///
/// `s[(i, α)] = S_i^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressDensityValue {
    pub r: Vector2<f64>,
    pub s: Matrix2<f64>,
}

impl StressDensityValue {
    pub fn zero() -> Self {
        Self {
            r: Vector2::zeros(),
            s: Matrix2::zeros(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            r: self.r * factor,
            s: self.s * factor,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(self.s.iter()).all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().chain(self.s.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `(κ*g)_{αβ} = g_{ij}(x) x^i_{,α} x^j_{,β}`.
pub fn pullback_metric(jet: &Jet1, space: &AzimuthalMetric) -> Result<Matrix2<f64>> {
    let g = space.matrix(jet.space_point[0])?;
    Ok(jet.deriv.transpose() * g * jet.deriv)
}

pub fn strain(pullback: &Matrix2<f64>, body_metric: &Matrix2<f64>) -> StrainValue {
    StrainValue {
        epsilon: pullback - body_metric,
    }
}

pub fn energy_density(
    strain: &StrainValue,
    body_metric: &Matrix2<f64>,
    material: &MaterialLaw,
) -> Result<f64> {
    let g_inv = body_metric
        .try_inverse()
        .ok_or_else(|| Error::invalid("body metric is not invertible"))?;
    // mixed strain G^{-1}ε; the tensor contraction reduces to traces
    let mixed = g_inv * strain.epsilon;
    let trace = mixed.trace();
    Ok(material.lambda * trace * trace + material.mu * (mixed * mixed).trace())
}

/// `W(j¹κ)` composed from pullback, strain and the quadratic law.
pub fn jet_energy(
    jet: &Jet1,
    body: &AzimuthalMetric,
    space: &AzimuthalMetric,
    material: &MaterialLaw,
) -> Result<f64> {
    let big_g = body.matrix(jet.body_point[0])?;
    let pb = pullback_metric(jet, space)?;
    energy_density(&strain(&pb, &big_g), &big_g, material)
}

/// `(R_i, S_i^α) = ρ (∂W/∂x^i, ∂W/∂x^i_{,α})` with `ρ = √det G`.
///
/// For the reference law (`λ = 0`, `μ = 1`) the derivatives are evaluated in
/// closed form; any other law goes through [`fd_fiber_derivative`].
pub fn stress_density(
    jet: &Jet1,
    body: &AzimuthalMetric,
    space: &AzimuthalMetric,
    material: &MaterialLaw,
) -> Result<StressDensityValue> {
    let rho = body.sqrt_det(jet.body_point[0])?;
    let raw = if material.is_reference() {
        reference_fiber_derivative(jet, body, space)?
    } else {
        fd_fiber_derivative(jet, body, space, material, FD_STEP)?
    };
    Ok(raw.scaled(rho))
}

/// Closed-form `∂W/∂x^i` and `∂W/∂x^i_{,α}` for `W = ‖κ*g − G‖²_G`:
///
/// `∂W/∂x^i_{,α} = 4 (g F G⁻¹ ε G⁻¹)_{iα}` and
/// `∂W/∂x^m = 2 tr(G⁻¹ Fᵀ(∂_m g)F G⁻¹ ε)`.
pub fn reference_fiber_derivative(
    jet: &Jet1,
    body: &AzimuthalMetric,
    space: &AzimuthalMetric,
) -> Result<StressDensityValue> {
    let r_body = jet.body_point[0];
    let r_space = jet.space_point[0];
    let big_g = body.matrix(r_body)?;
    let g_inv = body.inverse(r_body)?;
    let g = space.matrix(r_space)?;
    let f = jet.deriv;
    let eps = f.transpose() * g * f - big_g;

    let s = 4.0 * g * f * g_inv * eps * g_inv;
    let dg_r = space.radial_derivative(r_space)?;
    let r_comp = 2.0 * (g_inv * f.transpose() * dg_r * f * g_inv * eps).trace();
    Ok(StressDensityValue {
        // g does not depend on θ
        r: Vector2::new(r_comp, 0.0),
        s,
    })
}

/// Central-difference fiber derivative of `W` (no `ρ` factor).
///
/// Perturbs the space point and each derivative entry by `±h`, keeping the
/// body point fixed.
pub fn fd_fiber_derivative(
    jet: &Jet1,
    body: &AzimuthalMetric,
    space: &AzimuthalMetric,
    material: &MaterialLaw,
    h: f64,
) -> Result<StressDensityValue> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(format!("finite-difference step must be positive, got {h}")));
    }
    if jet.space_point[0] + h <= jet.space_point[0] {
        return Err(Error::invalid("finite-difference step underflows at this point"));
    }
    let w = |j: &Jet1| jet_energy(j, body, space, material);
    let mut out = StressDensityValue::zero();
    for i in 0..2 {
        let mut plus = *jet;
        let mut minus = *jet;
        plus.space_point[i] += h;
        minus.space_point[i] -= h;
        out.r[i] = (w(&plus)? - w(&minus)?) / (2.0 * h);
    }
    for i in 0..2 {
        for a in 0..2 {
            let mut plus = *jet;
            let mut minus = *jet;
            plus.deriv[(i, a)] += h;
            minus.deriv[(i, a)] -= h;
            out.s[(i, a)] = (w(&plus)? - w(&minus)?) / (2.0 * h);
        }
    }
    Ok(out)
}

/// Nonzero energy derivatives under `x^r = f(R)`, `x^θ = Θ` (reference law).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDerivatives {
    /// `∂W/∂x^r_{,R} = 4f'(f'² − 1)`
    pub dw_dfprime: f64,
    /// `∂W/∂x^θ_{,Θ} = 4q(q − 1)` with `q = φ(f)²/Φ(R)²`
    pub dw_dtheta_theta: f64,
    /// `∂W/∂x^r = 4φ(f)φ'(f)/Φ(R)² (q − 1)`
    pub dw_df: f64,
}

pub fn radial_energy_derivatives(
    f: f64,
    fprime: f64,
    r_body: f64,
    body: &CurvatureProfile,
    space: &CurvatureProfile,
) -> Result<RadialDerivatives> {
    let big_phi = body.warp(r_body)?;
    if big_phi.abs() < f64::EPSILON {
        return Err(Error::SingularCoordinate(r_body));
    }
    let phi = space.warp(f)?;
    let dphi = space.warp_derivative_unchecked(f);
    let q = phi * phi / (big_phi * big_phi);
    Ok(RadialDerivatives {
        dw_dfprime: stretch_stress(fprime),
        dw_dtheta_theta: 4.0 * q * (q - 1.0),
        dw_df: 4.0 * phi * dphi / (big_phi * big_phi) * (q - 1.0),
    })
}

/// `W` under the radial ansatz: `(f'² − 1)² + (φ(f)²/Φ(R)² − 1)²`.
pub fn radial_energy_density(
    f: f64,
    fprime: f64,
    r_body: f64,
    body: &CurvatureProfile,
    space: &CurvatureProfile,
) -> Result<f64> {
    let big_phi = body.warp(r_body)?;
    let phi = space.warp(f)?;
    Ok(stretch_energy(fprime) + hoop_energy(phi, big_phi))
}

#[inline]
pub(crate) fn stretch_energy(fprime: f64) -> f64 {
    let e = fprime * fprime - 1.0;
    e * e
}

#[inline]
pub(crate) fn stretch_stress(fprime: f64) -> f64 {
    4.0 * fprime * (fprime * fprime - 1.0)
}

#[inline]
pub(crate) fn stretch_stiffness(fprime: f64) -> f64 {
    12.0 * fprime * fprime - 4.0
}

#[inline]
pub(crate) fn hoop_energy(phi: f64, big_phi: f64) -> f64 {
    let e = phi * phi / (big_phi * big_phi) - 1.0;
    e * e
}

/// Discrete radial divergence and boundary traction.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDivergence {
    /// `(div S)_r` at each node.
    pub div_r: Vec<f64>,
    /// `∂W/∂x^θ_{,Θ}` at each node; its Θ-derivative, `(div S)_θ`, vanishes.
    pub hoop_stress: Vec<f64>,
    /// `(p_σ S)_r` at `R_min` and `R_max`.
    pub traction: (f64, f64),
}

/// `(div S)_r = ∂_R(Φ ∂W/∂x^r_{,R}) − Φ ∂W/∂x^r` on a uniform grid.
///
/// The flux `Φ ∂W/∂x^r_{,R}` is evaluated at cell midpoints and differenced
/// across each node. At the two boundary nodes the ghost flux is the mirror
/// of the first interior flux, so the centred boundary flux vanishes. The
/// traction uses the nodal derivative from [`crate::solver::apply_boundary`].
pub fn divergence_and_traction_radial(
    grid: &RadialGrid,
    f: &[f64],
    body: &CurvatureProfile,
    space: &CurvatureProfile,
) -> Result<RadialDivergence> {
    let n = grid.n();
    if n < 3 {
        return Err(Error::invalid(format!("grid needs at least 3 nodes, got {n}")));
    }
    if f.len() != n {
        return Err(Error::invalid(format!("field has {} values for {n} nodes", f.len())));
    }
    let dr = grid.spacing();
    let flux: Vec<f64> = (0..n - 1)
        .map(|j| {
            let fprime = (f[j + 1] - f[j]) / dr;
            Ok(body.warp(grid.midpoint(j))? * stretch_stress(fprime))
        })
        .collect::<Result<_>>()?;

    let mut div_r = Vec::with_capacity(n);
    let mut hoop_stress = Vec::with_capacity(n);
    for j in 0..n {
        let (lo, hi) = match j {
            0 => (-flux[0], flux[0]),
            _ if j == n - 1 => (flux[n - 2], -flux[n - 2]),
            _ => (flux[j - 1], flux[j]),
        };
        let r = grid.node(j);
        let d = radial_energy_derivatives(f[j], 1.0, r, body, space)?;
        let big_phi = body.warp(r)?;
        div_r.push((hi - lo) / dr - big_phi * d.dw_df);
        hoop_stress.push(d.dw_dtheta_theta);
    }

    let ghost = crate::solver::apply_boundary(f, grid)?;
    let lo_slope = (f[1] - ghost.lower) / (2.0 * dr);
    let hi_slope = (ghost.upper - f[n - 2]) / (2.0 * dr);
    Ok(RadialDivergence {
        div_r,
        hoop_stress,
        traction: (stretch_stress(lo_slope), stretch_stress(hi_slope)),
    })
}
