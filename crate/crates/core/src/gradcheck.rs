//! Random-jet comparison of the closed-form stress densities against central
//! differences of the energy density.

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elasticity::{fd_fiber_derivative, reference_fiber_derivative, Jet1, MaterialLaw, FD_STEP};
use crate::error::Result;
use crate::geometry::{AzimuthalMetric, CurvatureProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientReport {
    pub samples: usize,
    /// Largest `‖closed − fd‖_∞ / ‖closed‖_∞` over all samples.
    pub max_relative_error: f64,
}

impl GradientReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_relative_error < tolerance
    }
}

/// Draws a jet near the radial embedding of an annulus: body radius in
/// `[0.2, 1]`, image radius in `[0.2, 2]` and a perturbed derivative matrix.
pub fn random_jet(rng: &mut impl Rng) -> Jet1 {
    let r = rng.random_range(0.2..1.0);
    let x = rng.random_range(0.2..2.0);
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let deriv = Matrix2::new(
        rng.random_range(0.5..1.5),
        rng.random_range(-0.3..0.3),
        rng.random_range(-0.3..0.3),
        rng.random_range(0.5..1.5),
    );
    Jet1::new([r, rng.random_range(0.0..std::f64::consts::TAU)], [x, theta], deriv)
}

/// Compares [`reference_fiber_derivative`] with [`fd_fiber_derivative`] at
/// `samples` seeded random jets, for a `K = 2` sphere body in a `k = 0.5`
/// sphere.
pub fn check_gradients(samples: usize, seed: u64) -> Result<GradientReport> {
    let body = AzimuthalMetric::new(CurvatureProfile::spherical(2.0)?);
    let space = AzimuthalMetric::new(CurvatureProfile::spherical(0.5)?);
    let material = MaterialLaw::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let jet = random_jet(&mut rng);
        let exact = reference_fiber_derivative(&jet, &body, &space)?;
        let fd = fd_fiber_derivative(&jet, &body, &space, &material, FD_STEP)?;
        let diff = (exact.r - fd.r).amax().max((exact.s - fd.s).amax());
        let scale = exact.max_abs().max(f64::MIN_POSITIVE);
        worst = worst.max(diff / scale);
    }
    Ok(GradientReport {
        samples,
        max_relative_error: worst,
    })
}
