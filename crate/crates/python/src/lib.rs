//! Python bindings. Built as a `noneuclid` extension module.

use nalgebra::Matrix2;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use noneuclid::elasticity::{self, Jet1, MaterialLaw};
use noneuclid::error::Error;
use noneuclid::geometry::{self, AzimuthalMetric};
use noneuclid::{config, gradcheck, pointdyn, solver};

create_exception!(noneuclid, SolverError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::NonConvergence { .. } | Error::BlowUp { .. } | Error::Verification(_) => {
            SolverError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Warp profile of a constant-curvature surface in polar coordinates.
#[pyclass(name = "CurvatureProfile", frozen, from_py_object)]
#[derive(Clone)]
struct PyCurvatureProfile {
    inner: geometry::CurvatureProfile,
}

#[pymethods]
impl PyCurvatureProfile {
    #[new]
    #[pyo3(signature = (kind, curvature = 0.0))]
    fn new(kind: &str, curvature: f64) -> PyResult<Self> {
        let kind = kind.parse().map_err(to_py)?;
        let inner = geometry::CurvatureProfile::new(kind, curvature).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    #[getter]
    fn curvature(&self) -> f64 {
        self.inner.curvature()
    }

    #[getter]
    fn max_radius(&self) -> Option<f64> {
        self.inner.max_radius()
    }

    fn warp(&self, r: f64) -> PyResult<f64> {
        self.inner.warp(r).map_err(to_py)
    }

    fn warp_derivative(&self, r: f64) -> PyResult<f64> {
        self.inner.warp_derivative(r).map_err(to_py)
    }

    /// `(Γ^r_θθ, Γ^θ_rθ)` at radius `r`.
    fn christoffel(&self, r: f64) -> PyResult<(f64, f64)> {
        let c = AzimuthalMetric::new(self.inner).christoffel(r).map_err(to_py)?;
        Ok((c.r_theta_theta, c.theta_r_theta))
    }

    fn __repr__(&self) -> String {
        format!("CurvatureProfile({:?}, {})", self.kind(), self.curvature())
    }
}

fn jet(body_point: [f64; 2], space_point: [f64; 2], deriv: [[f64; 2]; 2]) -> Jet1 {
    let m = Matrix2::new(deriv[0][0], deriv[0][1], deriv[1][0], deriv[1][1]);
    Jet1::new(body_point, space_point, m)
}

fn rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// Energy density `W` of a jet for the law `(λ, μ)`.
#[pyfunction]
#[pyo3(signature = (body, space, body_point, space_point, deriv, lam = 0.0, mu = 1.0))]
fn energy_density(
    body: &PyCurvatureProfile,
    space: &PyCurvatureProfile,
    body_point: [f64; 2],
    space_point: [f64; 2],
    deriv: [[f64; 2]; 2],
    lam: f64,
    mu: f64,
) -> PyResult<f64> {
    let law = MaterialLaw::new(lam, mu).map_err(to_py)?;
    elasticity::jet_energy(
        &jet(body_point, space_point, deriv),
        &body.inner.into(),
        &space.inner.into(),
        &law,
    )
    .map_err(to_py)
}

/// Stress densities `(R_i, S_i^α)` of a jet, returned as `(R, S)`.
#[pyfunction]
#[pyo3(signature = (body, space, body_point, space_point, deriv, lam = 0.0, mu = 1.0))]
fn stress_density(
    body: &PyCurvatureProfile,
    space: &PyCurvatureProfile,
    body_point: [f64; 2],
    space_point: [f64; 2],
    deriv: [[f64; 2]; 2],
    lam: f64,
    mu: f64,
) -> PyResult<([f64; 2], [[f64; 2]; 2])> {
    let law = MaterialLaw::new(lam, mu).map_err(to_py)?;
    let v = elasticity::stress_density(
        &jet(body_point, space_point, deriv),
        &body.inner.into(),
        &space.inner.into(),
        &law,
    )
    .map_err(to_py)?;
    Ok(([v.r[0], v.r[1]], rows(&v.s)))
}

/// Radial problem settings, parsed from `key = value` text.
#[pyclass(name = "ProblemConfig", frozen, from_py_object)]
#[derive(Clone)]
struct PyProblemConfig {
    doc: config::RunDocument,
}

#[pymethods]
impl PyProblemConfig {
    #[new]
    #[pyo3(signature = (text = "", **overrides))]
    fn new(text: &str, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut pairs = Vec::new();
        if let Some(d) = overrides {
            for (k, v) in d.iter() {
                // `grid__n=51` stands for `grid.n = 51`
                let key = k.extract::<String>()?.replace("__", ".");
                pairs.push((key, v.str()?.to_string()));
            }
        }
        let doc = config::parse_with_overrides(text, &pairs).map_err(to_py)?;
        Ok(Self { doc })
    }

    fn to_text(&self) -> String {
        config::serialize(&self.doc)
    }

    #[getter]
    fn grid_nodes(&self) -> Vec<f64> {
        self.doc.problem.grid.nodes()
    }

    #[getter]
    fn body(&self) -> PyCurvatureProfile {
        PyCurvatureProfile {
            inner: self.doc.problem.body,
        }
    }

    #[getter]
    fn space(&self) -> PyCurvatureProfile {
        PyCurvatureProfile {
            inner: self.doc.problem.space,
        }
    }

    fn __repr__(&self) -> String {
        let p = &self.doc.problem;
        format!(
            "ProblemConfig(body={}, space={}, n={})",
            self.body().__repr__(),
            self.space().__repr__(),
            p.grid.n()
        )
    }
}

fn problem(cfg: Option<&PyProblemConfig>) -> solver::ProblemConfig {
    cfg.map_or_else(solver::ProblemConfig::default, |c| c.doc.problem)
}

/// Static configuration. Returns a dict with `R`, `f`, `distance`,
/// `residual` and `iterations`.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn solve_equilibrium<'py>(py: Python<'py>, config: Option<&PyProblemConfig>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = problem(config);
    let sol = py.detach(|| solver::solve_equilibrium(&cfg)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("R", cfg.grid.nodes())?;
    out.set_item("f", sol.state.f.clone())?;
    out.set_item("distance", sol.distance())?;
    out.set_item("residual", sol.residual)?;
    out.set_item("iterations", sol.iterations)?;
    Ok(out)
}

/// Perturbed dynamics. Returns the time series as a dict of lists.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn simulate<'py>(py: Python<'py>, config: Option<&PyProblemConfig>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = problem(config);
    let run = py.detach(|| solver::simulate(&cfg)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("equilibrium_distance", run.equilibrium_distance)?;
    out.set_item("t", run.series.iter().map(|p| p.t).collect::<Vec<_>>())?;
    out.set_item("distance", run.series.iter().map(|p| p.distance).collect::<Vec<_>>())?;
    out.set_item("kinetic", run.series.iter().map(|p| p.energy.kinetic).collect::<Vec<_>>())?;
    out.set_item("potential", run.series.iter().map(|p| p.energy.potential).collect::<Vec<_>>())?;
    out.set_item("total", run.series.iter().map(|p| p.energy.total).collect::<Vec<_>>())?;
    out.set_item("dt", run.dt)?;
    Ok(out)
}

/// Force-free RK4 trajectory on `surface`. Returns `(states, failure)` where
/// each state is `(r, θ, v^r, v^θ)`.
#[pyfunction]
#[pyo3(signature = (surface, position, velocity, dt, steps, mass = 1.0))]
fn integrate_particle(
    surface: &PyCurvatureProfile,
    position: [f64; 2],
    velocity: [f64; 2],
    dt: f64,
    steps: usize,
    mass: f64,
) -> PyResult<(Vec<[f64; 4]>, Option<String>)> {
    let initial = pointdyn::ParticleState::new(position, velocity, mass).map_err(to_py)?;
    let traj = pointdyn::integrate_particle(&initial, &surface.inner.into(), None, dt, steps).map_err(to_py)?;
    let states = traj
        .states
        .iter()
        .map(|s| [s.position[0], s.position[1], s.velocity[0], s.velocity[1]])
        .collect();
    Ok((states, traj.failure))
}

/// Largest relative error of the closed-form stress against finite differences.
#[pyfunction]
#[pyo3(signature = (samples = 100, seed = 0))]
fn check_gradients(samples: usize, seed: u64) -> PyResult<f64> {
    Ok(gradcheck::check_gradients(samples, seed).map_err(to_py)?.max_relative_error)
}

#[pymodule]
#[pyo3(name = "noneuclid")]
fn noneuclid_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurvatureProfile>()?;
    m.add_class::<PyProblemConfig>()?;
    m.add_function(wrap_pyfunction!(energy_density, m)?)?;
    m.add_function(wrap_pyfunction!(stress_density, m)?)?;
    m.add_function(wrap_pyfunction!(solve_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_particle, m)?)?;
    m.add_function(wrap_pyfunction!(check_gradients, m)?)?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    Ok(())
}
