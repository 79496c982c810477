//! Python bindings for the transport solver.

use acqudit_core::{self as core, BathSpec, GridSpec, RunConfig, SolverSettings, TrapSpec, VelocityBc, C_SOUND};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: core::Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[pyclass(name = "Trajectory", frozen)]
pub struct PyTrajectory {
    inner: core::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    /// Trajectory from velocity samples on the uniform grid over [0, t_f].
    #[new]
    fn new(t_f: f64, v: Vec<f64>) -> PyResult<Self> {
        let grid = GridSpec::new(t_f, v.len()).map_err(to_py)?;
        let inner = core::Trajectory::from_velocity(&grid, v).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }
    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }
    #[getter]
    fn v(&self) -> Vec<f64> {
        self.inner.v.clone()
    }
    #[getter]
    fn a(&self) -> Vec<f64> {
        self.inner.a.clone()
    }
    #[getter]
    fn x_final(&self) -> f64 {
        self.inner.x_final()
    }
    fn __len__(&self) -> usize {
        self.inner.n_t()
    }
}

#[pyclass(name = "TransportResult", frozen, get_all)]
pub struct PyTransportResult {
    survival: f64,
    j_nonadiabatic: f64,
    j_bath: f64,
    speed_margin: f64,
    kinetic_integral: f64,
}

impl From<core::TransportResult> for PyTransportResult {
    fn from(r: core::TransportResult) -> Self {
        Self {
            survival: r.survival,
            j_nonadiabatic: r.j_nonadiabatic,
            j_bath: r.j_bath,
            speed_margin: r.speed_margin,
            kinetic_integral: r.kinetic_integral,
        }
    }
}

#[pyclass(name = "Model", frozen)]
pub struct PyModel {
    inner: core::Model,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (depth_d, width_a, mass_m, g_tilde, n_eps = 200, n_k = 200))]
    fn new(depth_d: f64, width_a: f64, mass_m: f64, g_tilde: f64, n_eps: usize, n_k: usize) -> PyResult<Self> {
        let bath = BathSpec::new(g_tilde).with_nodes(n_eps, n_k);
        let inner = core::Model::new(TrapSpec::new(depth_d, width_a, mass_m), bath).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_param(&self) -> f64 {
        self.inner.structure.n_param
    }

    /// protocol: "linear", "picard" or "dissipationless"; speeds in units of c.
    #[pyo3(signature = (t_f, vf_c, v0_c = 0.0, protocol = "linear", n_t = 200, lambda_ = 1.0, lambda1 = 1.0, tol = 1e-8))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        t_f: f64,
        vf_c: f64,
        v0_c: f64,
        protocol: &str,
        n_t: usize,
        lambda_: f64,
        lambda1: f64,
        tol: f64,
    ) -> PyResult<PyTrajectory> {
        let grid = GridSpec::new(t_f, n_t).map_err(to_py)?;
        let s = SolverSettings { lambda: lambda_, lambda1, tol, ..Default::default() };
        let bc = VelocityBc::new(v0_c * C_SOUND, vf_c * C_SOUND);
        let m = &self.inner;
        let sol = py.detach(|| match protocol {
            "linear" => Ok(m.solve_linear(grid, &s, bc)),
            "picard" => Ok(m.solve_picard(grid, &s, bc)),
            "dissipationless" => Ok(m.solve_dissipationless(grid, &s, bc)),
            other => Err(other.to_string()),
        });
        let sol = sol
            .map_err(|p| PyValueError::new_err(format!("unknown protocol {p:?}")))?
            .map_err(to_py)?;
        Ok(PyTrajectory { inner: sol.trajectory })
    }

    #[pyo3(signature = (t_f, x_f, n_t = 200, lambda_ = 1.0, tol = 1e-8))]
    fn solve_position(&self, t_f: f64, x_f: f64, n_t: usize, lambda_: f64, tol: f64) -> PyResult<PyTrajectory> {
        let grid = GridSpec::new(t_f, n_t).map_err(to_py)?;
        let s = SolverSettings { lambda: lambda_, tol, ..Default::default() };
        let sol = self.inner.solve_position_bc(grid, &s, x_f).map_err(to_py)?;
        Ok(PyTrajectory { inner: sol.trajectory })
    }

    fn survival(&self, traj: &PyTrajectory) -> PyResult<PyTransportResult> {
        Ok(self.inner.survival(&traj.inner).map_err(to_py)?.into())
    }

    fn survival_cdf(&self, traj: &PyTrajectory) -> PyResult<PyTransportResult> {
        Ok(self.inner.survival_cdf(&traj.inner).map_err(to_py)?.into())
    }

    #[pyo3(signature = (t_f, v_c, n_t = 200))]
    fn constant_speed(&self, t_f: f64, v_c: f64, n_t: usize) -> PyResult<PyTrajectory> {
        let grid = GridSpec::new(t_f, n_t).map_err(to_py)?;
        Ok(PyTrajectory { inner: core::fidelity::constant_speed(v_c * C_SOUND, &grid) })
    }
}

#[pyfunction]
fn complex_gamma(z: Complex64) -> PyResult<Complex64> {
    core::specfun::complex_gamma(z).map_err(to_py)
}

#[pyfunction]
fn abs_gamma_sq(z: Complex64) -> PyResult<f64> {
    core::specfun::abs_gamma_sq(z).map_err(to_py)
}

/// Runs a JSON config and writes its outputs into `out_dir`; returns the config hash.
#[pyfunction]
fn run_config(config_json: &str, out_dir: &str) -> PyResult<String> {
    let cfg = RunConfig::from_json(config_json).map_err(to_py)?;
    core::run::run_to_dir("python", &cfg, std::path::Path::new(out_dir)).map_err(to_py)?;
    Ok(cfg.content_hash())
}

#[pymodule]
fn acqudit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyTransportResult>()?;
    m.add_function(wrap_pyfunction!(complex_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(abs_gamma_sq, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add("C_SOUND", C_SOUND)?;
    Ok(())
}
