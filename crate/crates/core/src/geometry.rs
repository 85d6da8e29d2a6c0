//! Azimuthally symmetric metrics on two-dimensional caps and annuli.
//!
//! In semi-geodesic polar coordinates `(r, θ)` such a metric reads
//! `diag(1, φ(r)²)`, where the warp `φ` fixes the Gaussian curvature:
//! `sin(√K r)/√K` on a sphere, `sinh(√K r)/√K` on a hyperbolic cap and the
//! identity in the flat plane. The same type serves for the body metric `G`
//! (warp `Φ(R)`) and the space metric `g` (warp `φ(r)`).

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvatureKind {
    Spherical,
    Hyperbolic,
    Flat,
}

impl CurvatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurvatureKind::Spherical => "spherical",
            CurvatureKind::Hyperbolic => "hyperbolic",
            CurvatureKind::Flat => "flat",
        }
    }
}

impl std::str::FromStr for CurvatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spherical" | "sphere" => Ok(CurvatureKind::Spherical),
            "hyperbolic" => Ok(CurvatureKind::Hyperbolic),
            "flat" | "euclidean" => Ok(CurvatureKind::Flat),
            other => Err(Error::invalid(format!("unknown curvature kind `{other}`"))),
        }
    }
}

/// Warp profile of a constant-curvature azimuthal metric.
///
/// `curvature` is the magnitude of the Gaussian curvature; the sign comes
/// from `kind`. For [`CurvatureKind::Flat`] the curvature is ignored and
/// stored as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureProfile {
    kind: CurvatureKind,
    curvature: f64,
}

impl CurvatureProfile {
    pub fn new(kind: CurvatureKind, curvature: f64) -> Result<Self> {
        match kind {
            CurvatureKind::Flat => Ok(Self::flat()),
            _ if !(curvature.is_finite() && curvature > 0.0) => Err(Error::invalid(format!(
                "{} profile needs a positive finite curvature, got {curvature}",
                kind.as_str()
            ))),
            _ => Ok(Self { kind, curvature }),
        }
    }

    pub fn spherical(curvature: f64) -> Result<Self> {
        Self::new(CurvatureKind::Spherical, curvature)
    }

    pub fn hyperbolic(curvature: f64) -> Result<Self> {
        Self::new(CurvatureKind::Hyperbolic, curvature)
    }

    pub fn flat() -> Self {
        Self {
            kind: CurvatureKind::Flat,
            curvature: 0.0,
        }
    }

    pub fn kind(&self) -> CurvatureKind {
        self.kind
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    /// Signed Gaussian curvature.
    pub fn gaussian_curvature(&self) -> f64 {
        match self.kind {
            CurvatureKind::Spherical => self.curvature,
            CurvatureKind::Hyperbolic => -self.curvature,
            CurvatureKind::Flat => 0.0,
        }
    }

    /// Upper end of the radial coordinate range (exclusive), if bounded.
    pub fn max_radius(&self) -> Option<f64> {
        match self.kind {
            CurvatureKind::Spherical => Some(PI / self.curvature.sqrt()),
            _ => None,
        }
    }

    pub fn check_domain(&self, r: f64) -> Result<()> {
        let limit = self.max_radius().unwrap_or(f64::INFINITY);
        if r.is_finite() && r >= 0.0 && r < limit {
            Ok(())
        } else {
            Err(Error::Domain { value: r, limit })
        }
    }

    /// `Φ(R)`.
    pub fn warp(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.warp_unchecked(r))
    }

    /// `Φ'(R)`.
    pub fn warp_derivative(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.warp_derivative_unchecked(r))
    }

    /// `Φ''(R) = -K_signed Φ(R)`.
    pub fn warp_second_derivative(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.warp_second_derivative_unchecked(r))
    }

    // The unchecked variants are used in inner loops where the caller has
    // already validated the whole field.
    pub(crate) fn warp_unchecked(&self, r: f64) -> f64 {
        match self.kind {
            CurvatureKind::Spherical => {
                let s = self.curvature.sqrt();
                (s * r).sin() / s
            }
            CurvatureKind::Hyperbolic => {
                let s = self.curvature.sqrt();
                (s * r).sinh() / s
            }
            CurvatureKind::Flat => r,
        }
    }

    pub(crate) fn warp_derivative_unchecked(&self, r: f64) -> f64 {
        match self.kind {
            CurvatureKind::Spherical => (self.curvature.sqrt() * r).cos(),
            CurvatureKind::Hyperbolic => (self.curvature.sqrt() * r).cosh(),
            CurvatureKind::Flat => 1.0,
        }
    }

    pub(crate) fn warp_second_derivative_unchecked(&self, r: f64) -> f64 {
        -self.gaussian_curvature() * self.warp_unchecked(r)
    }
}

/// The metric `diag(1, warp²)` in semi-geodesic polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzimuthalMetric {
    pub profile: CurvatureProfile,
}

/// The two non-vanishing Christoffel symbols of an azimuthal metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    /// `Γ^r_{θθ} = -φ φ'`
    pub r_theta_theta: f64,
    /// `Γ^θ_{rθ} = Γ^θ_{θr} = φ'/φ`
    pub theta_r_theta: f64,
}

impl Christoffel {
    /// `Γ^k_{ij}` with indices 0 = r, 1 = θ.
    pub fn component(&self, k: usize, i: usize, j: usize) -> f64 {
        match (k, i, j) {
            (0, 1, 1) => self.r_theta_theta,
            (1, 0, 1) | (1, 1, 0) => self.theta_r_theta,
            _ => 0.0,
        }
    }
}

impl AzimuthalMetric {
    pub fn new(profile: CurvatureProfile) -> Self {
        Self { profile }
    }

    /// Metric components `(g_rr, g_θθ)`.
    pub fn components(&self, r: f64) -> Result<(f64, f64)> {
        let w = self.profile.warp(r)?;
        Ok((1.0, w * w))
    }

    pub fn matrix(&self, r: f64) -> Result<Matrix2<f64>> {
        let (grr, gtt) = self.components(r)?;
        Ok(Matrix2::new(grr, 0.0, 0.0, gtt))
    }

    /// Inverse metric; fails where the warp vanishes.
    pub fn inverse(&self, r: f64) -> Result<Matrix2<f64>> {
        let w = self.nonsingular_warp(r)?;
        Ok(Matrix2::new(1.0, 0.0, 0.0, 1.0 / (w * w)))
    }

    /// `∂g/∂r`; the metric does not depend on θ.
    pub fn radial_derivative(&self, r: f64) -> Result<Matrix2<f64>> {
        let w = self.profile.warp(r)?;
        let dw = self.profile.warp_derivative_unchecked(r);
        Ok(Matrix2::new(0.0, 0.0, 0.0, 2.0 * w * dw))
    }

    pub fn determinant(&self, r: f64) -> Result<f64> {
        let w = self.profile.warp(r)?;
        Ok(w * w)
    }

    /// `√det g`, which for this family is the warp itself.
    pub fn sqrt_det(&self, r: f64) -> Result<f64> {
        self.profile.warp(r)
    }

    pub fn christoffel(&self, r: f64) -> Result<Christoffel> {
        let w = self.nonsingular_warp(r)?;
        let dw = self.profile.warp_derivative_unchecked(r);
        Ok(Christoffel {
            r_theta_theta: -w * dw,
            theta_r_theta: dw / w,
        })
    }

    /// `g(u, v)` at radius `r`.
    pub fn inner(&self, r: f64, u: [f64; 2], v: [f64; 2]) -> Result<f64> {
        let (grr, gtt) = self.components(r)?;
        Ok(grr * u[0] * v[0] + gtt * u[1] * v[1])
    }

    fn nonsingular_warp(&self, r: f64) -> Result<f64> {
        let w = self.profile.warp(r)?;
        if w.abs() < f64::EPSILON {
            Err(Error::SingularCoordinate(r))
        } else {
            Ok(w)
        }
    }
}

impl From<CurvatureProfile> for AzimuthalMetric {
    fn from(profile: CurvatureProfile) -> Self {
        Self::new(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Generic `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`
    /// with the metric derivatives taken by central differences.
    fn christoffel_fd(metric: &AzimuthalMetric, r: f64, h: f64) -> [[[f64; 2]; 2]; 2] {
        let g = |r: f64| metric.matrix(r).unwrap();
        // ∂_θ g = 0, ∂_r g by central difference
        let dg_r = (g(r + h) - g(r - h)) / (2.0 * h);
        let dg = [dg_r, Matrix2::zeros()];
        let ginv = g(r).try_inverse().unwrap();
        let mut out = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += 0.5 * ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    out[k][i][j] = s;
                }
            }
        }
        out
    }

    #[test]
    fn warp_values() {
        let sph = CurvatureProfile::spherical(2.0).unwrap();
        assert_relative_eq!(sph.warp(1.0).unwrap(), 0.698_456_0, epsilon = 1e-6);
        assert_eq!(CurvatureProfile::flat().warp(0.7).unwrap(), 0.7);
        let hyp = CurvatureProfile::hyperbolic(2.0).unwrap();
        assert_relative_eq!(hyp.warp(1.0).unwrap(), 1.368_298_9, epsilon = 1e-6);
    }

    #[test]
    fn warp_derivative_values() {
        let sph = CurvatureProfile::spherical(2.0).unwrap();
        assert_relative_eq!(sph.warp_derivative(1.0).unwrap(), 2f64.sqrt().cos(), epsilon = 1e-15);
        assert_relative_eq!(sph.warp_derivative(1.0).unwrap(), 0.155_944, epsilon = 1e-6);
        assert_eq!(CurvatureProfile::flat().warp_derivative(0.3).unwrap(), 1.0);
        let unit = CurvatureProfile::spherical(1.0).unwrap();
        assert_eq!(unit.warp_derivative(0.0).unwrap(), 1.0);
        assert_eq!(unit.warp(0.0).unwrap(), 0.0);
    }

    #[test]
    fn spherical_domain_is_enforced() {
        let sph = CurvatureProfile::spherical(2.0).unwrap();
        let limit = PI / 2f64.sqrt();
        assert!(sph.warp(limit * 0.999).is_ok());
        assert!(matches!(sph.warp(limit), Err(Error::Domain { .. })));
        assert!(matches!(sph.warp_derivative(limit + 1.0), Err(Error::Domain { .. })));
        assert!(sph.warp(-0.1).is_err());
        assert!(CurvatureProfile::hyperbolic(2.0).unwrap().warp(50.0).is_ok());
    }

    #[test]
    fn nonpositive_curvature_rejected() {
        assert!(CurvatureProfile::spherical(0.0).is_err());
        assert!(CurvatureProfile::hyperbolic(-1.0).is_err());
        assert!(CurvatureProfile::spherical(f64::NAN).is_err());
        assert_eq!(
            CurvatureProfile::new(CurvatureKind::Flat, 3.0).unwrap(),
            CurvatureProfile::flat()
        );
    }

    #[test]
    fn christoffel_examples() {
        let unit = AzimuthalMetric::new(CurvatureProfile::spherical(1.0).unwrap());
        let c = unit.christoffel(PI / 2.0).unwrap();
        assert!(c.r_theta_theta.abs() < 1e-15);
        assert!(c.theta_r_theta.abs() < 1e-15);

        let flat = AzimuthalMetric::new(CurvatureProfile::flat());
        let c = flat.christoffel(2.0).unwrap();
        assert_eq!(c.r_theta_theta, -2.0);
        assert_eq!(c.theta_r_theta, 0.5);

        // values frozen from `christoffel_fd` at h = 1e-5
        let half = AzimuthalMetric::new(CurvatureProfile::spherical(0.5).unwrap());
        let c = half.christoffel(1.0).unwrap();
        let fd = christoffel_fd(&half, 1.0, 1e-5);
        assert_relative_eq!(fd[0][1][1], -0.698_456_0, epsilon = 1e-6);
        assert_relative_eq!(fd[1][0][1], 0.827_499_3, epsilon = 1e-6);
        assert_relative_eq!(c.r_theta_theta, -0.698_456_0, epsilon = 1e-6);
        assert_relative_eq!(c.theta_r_theta, 0.827_499_3, epsilon = 1e-6);
    }

    #[test]
    fn christoffel_singular_at_pole() {
        let flat = AzimuthalMetric::new(CurvatureProfile::flat());
        assert!(matches!(flat.christoffel(0.0), Err(Error::SingularCoordinate(_))));
        assert!(flat.inverse(0.0).is_err());
    }

    #[test]
    fn flat_is_small_curvature_limit() {
        let k = 1e-4;
        let sph = CurvatureProfile::spherical(k).unwrap();
        let hyp = CurvatureProfile::hyperbolic(k).unwrap();
        for &r in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let flat = CurvatureProfile::flat().warp(r).unwrap();
            assert!((sph.warp(r).unwrap() - flat).abs() < k * r.powi(3));
            assert!((hyp.warp(r).unwrap() - flat).abs() < k * r.powi(3));
        }
    }

    fn profile_strategy() -> impl Strategy<Value = CurvatureProfile> {
        prop_oneof![
            (0.05f64..4.0).prop_map(|k| CurvatureProfile::spherical(k).unwrap()),
            (0.05f64..4.0).prop_map(|k| CurvatureProfile::hyperbolic(k).unwrap()),
            Just(CurvatureProfile::flat()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn christoffel_matches_generic_formula(profile in profile_strategy(), frac in 0.05f64..0.9) {
            let rmax = profile.max_radius().unwrap_or(3.0);
            let r = frac * rmax;
            let metric = AzimuthalMetric::new(profile);
            let c = metric.christoffel(r).unwrap();
            let fd = christoffel_fd(&metric, r, 1e-5);
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let exact = c.component(k, i, j);
                        let err = (fd[k][i][j] - exact).abs();
                        prop_assert!(err <= 1e-6 * exact.abs().max(1e-3), "Γ^{}_{}{}: {} vs {}", k, i, j, fd[k][i][j], exact);
                    }
                }
            }
        }

        #[test]
        fn constant_curvature_ode(profile in profile_strategy(), frac in 0.0f64..0.95) {
            let r = frac * profile.max_radius().unwrap_or(3.0);
            let w = profile.warp(r).unwrap();
            let w2 = profile.warp_second_derivative(r).unwrap();
            let residual = w2 + profile.gaussian_curvature() * w;
            prop_assert!(residual.abs() < 1e-10);
        }

        #[test]
        fn derivative_matches_central_difference(profile in profile_strategy(), frac in 0.05f64..0.9) {
            let r = frac * profile.max_radius().unwrap_or(3.0);
            let h = 1e-4;
            let fd = (profile.warp(r + h).unwrap() - profile.warp(r - h).unwrap()) / (2.0 * h);
            prop_assert!((fd - profile.warp_derivative(r).unwrap()).abs() < 1e-6);
        }

        #[test]
        fn metric_invariants(profile in profile_strategy(), frac in 0.01f64..0.99) {
            let r = frac * profile.max_radius().unwrap_or(3.0);
            let metric = AzimuthalMetric::new(profile);
            let (grr, gtt) = metric.components(r).unwrap();
            prop_assert_eq!(grr, 1.0);
            prop_assert!(metric.determinant(r).unwrap() > 0.0);
            prop_assert!((gtt - metric.determinant(r).unwrap()).abs() < 1e-15);
        }
    }
}
