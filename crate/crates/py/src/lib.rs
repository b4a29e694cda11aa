//! Python bindings. Scenario-driven runs take the INI text and return plain
//! dicts of lists.

use kipq_core::entropy::{catalog_table, DriftChoice};
use kipq_core::gauge::gauge_check as core_gauge_check;
use kipq_core::nfpe::{equilibrium_density, evolve_nfpe};
use kipq_core::nse::evolve_with;
use kipq_core::scenario::{parse_scenario, Scenario};
use kipq_core::verify::{run_criterion, VerifyOptions, CRITERIA};
use kipq_core::{Error, Grid1D};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    match e {
        Error::Integration { .. } | Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn scenario(text: &str) -> PyResult<Scenario> {
    parse_scenario(text).map_err(err)
}

#[pyclass(name = "EntropyModel", frozen, skip_from_py_object, module = "kipq")]
pub struct PyEntropyModel {
    inner: kipq_core::EntropyModel,
}

fn wrap(m: kipq_core::Result<kipq_core::EntropyModel>) -> PyResult<PyEntropyModel> {
    m.map(|inner| PyEntropyModel { inner }).map_err(err)
}

#[pymethods]
impl PyEntropyModel {
    #[staticmethod]
    fn bg() -> Self {
        Self {
            inner: kipq_core::EntropyModel::bg(),
        }
    }

    #[staticmethod]
    fn two_param(kappa: f64, r: f64) -> PyResult<Self> {
        wrap(kipq_core::EntropyModel::two_param(kappa, r))
    }

    #[staticmethod]
    fn tsallis(q: f64) -> PyResult<Self> {
        wrap(kipq_core::EntropyModel::tsallis(q))
    }

    #[staticmethod]
    fn kaniadakis(kappa: f64) -> PyResult<Self> {
        wrap(kipq_core::EntropyModel::kaniadakis(kappa))
    }

    /// `drift` is "linear" or "nonlinear".
    #[staticmethod]
    #[pyo3(signature = (kappa, drift = "linear"))]
    fn eip(kappa: f64, drift: &str) -> PyResult<Self> {
        let d = match drift {
            "linear" => DriftChoice::Linear,
            "nonlinear" => DriftChoice::Nonlinear,
            other => return Err(PyValueError::new_err(format!("unknown drift {other:?}"))),
        };
        wrap(kipq_core::EntropyModel::eip(kappa, d))
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.kind().name()
    }

    fn admissible_interval(&self) -> (f64, f64) {
        self.inner.admissible_interval()
    }

    fn ln_kappa(&self, rho: f64) -> PyResult<f64> {
        self.inner.try_ln_kappa(rho).map_err(err)
    }

    fn ln_kappa_inverse(&self, y: f64) -> PyResult<f64> {
        self.inner.ln_kappa_inverse(y).map_err(err)
    }

    fn d_ln_kappa(&self, rho: f64) -> f64 {
        self.inner.d_ln_kappa(rho)
    }

    fn gamma(&self, rho: f64) -> f64 {
        self.inner.gamma(rho)
    }

    fn entropy_density(&self, rho: f64) -> f64 {
        self.inner.entropy_density(rho)
    }

    fn f(&self, rho: f64) -> f64 {
        self.inner.functionals().f(rho)
    }

    fn f_tilde(&self, rho: f64) -> f64 {
        self.inner.functionals().f_tilde(rho)
    }

    fn f1(&self, rho: f64) -> f64 {
        self.inner.functionals().f1(rho)
    }

    fn f2(&self, rho: f64) -> f64 {
        self.inner.functionals().f2(rho)
    }

    /// One dict per density with every tabulated functional.
    fn catalog<'py>(&self, py: Python<'py>, rhos: Vec<f64>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        catalog_table(&self.inner, &rhos)
            .into_iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("rho", r.rho)?;
                d.set_item("ln_kappa", r.ln_kappa)?;
                d.set_item("d_ln_kappa", r.d_ln_kappa)?;
                d.set_item("gamma", r.gamma)?;
                d.set_item("f", r.f)?;
                d.set_item("f_tilde", r.f_tilde)?;
                d.set_item("f1", r.f1)?;
                d.set_item("f2", r.f2)?;
                d.set_item("f1_tilde", r.f1_tilde)?;
                d.set_item("f2_tilde", r.f2_tilde)?;
                d.set_item("F", r.big_f)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("EntropyModel({:?})", self.inner.kind())
    }
}

/// Equilibrium density on a periodic grid for sampled potential values.
#[pyfunction]
#[pyo3(signature = (model, potential, length, beta = 1.0))]
fn equilibrium(model: &PyEntropyModel, potential: Vec<f64>, length: f64, beta: f64) -> PyResult<Vec<f64>> {
    let grid = Grid1D::new(potential.len(), length).map_err(err)?;
    equilibrium_density(&model.inner, &potential, beta, &grid).map(|r| r.0).map_err(err)
}

/// Validates a scenario and returns its normalized text.
#[pyfunction]
fn normalize_scenario(text: &str) -> PyResult<String> {
    Ok(scenario(text)?.serialize())
}

#[pyfunction]
fn nfpe_relax<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = scenario(text)?;
    let (scn, eq) = s.nfpe().map_err(err)?;
    let traj = py.detach(|| evolve_nfpe(&scn)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("x", scn.grid.coords())?;
    d.set_item("t", traj.samples.iter().map(|s| s.t).collect::<Vec<_>>())?;
    d.set_item("free_energy", traj.samples.iter().map(|s| s.free_energy).collect::<Vec<_>>())?;
    d.set_item("norm", traj.samples.iter().map(|s| s.norm).collect::<Vec<_>>())?;
    d.set_item("rho", traj.last().rho.clone())?;
    d.set_item("rho_eq", eq)?;
    d.set_item("max_free_energy_increase", traj.max_free_energy_increase)?;
    Ok(d)
}

#[pyfunction]
fn nse_evolve<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = scenario(text)?;
    let scn = s.nse().map_err(err)?;
    let traj = py.detach(|| evolve_with(&scn, s.integrator.dynamics, 0)).map_err(err)?;
    let col = |f: fn(&kipq_core::diagnostics::DiagnosticsRecord) -> f64| traj.records.iter().map(f).collect::<Vec<_>>();
    let d = PyDict::new(py);
    d.set_item("x", scn.grid.coords())?;
    d.set_item("t", col(|r| r.t))?;
    d.set_item("norm", col(|r| r.norm))?;
    d.set_item("energy", col(|r| r.energy))?;
    d.set_item("x_mean", col(|r| r.x_mean))?;
    d.set_item("p_mean", col(|r| r.p_mean))?;
    d.set_item("rho", traj.final_state.density())?;
    d.set_item("re", traj.final_state.values.iter().map(|z| z.re).collect::<Vec<_>>())?;
    d.set_item("im", traj.final_state.values.iter().map(|z| z.im).collect::<Vec<_>>())?;
    Ok(d)
}

#[pyfunction]
fn gauge_check<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = scenario(text)?;
    let scn = s.nse().map_err(err)?;
    let every = s.integrator.cadence;
    let rep = py.detach(|| core_gauge_check(&scn, every)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", rep.rows.iter().map(|r| r.0).collect::<Vec<_>>())?;
    d.set_item("linf", rep.rows.iter().map(|r| r.1).collect::<Vec<_>>())?;
    d.set_item("max_linf", rep.max_linf)?;
    Ok(d)
}

/// Runs acceptance criteria; returns (id, title, passed, line) tuples.
#[pyfunction]
#[pyo3(signature = (criteria = None, tolerance_scale = 1.0, seed = None))]
fn verify(
    py: Python<'_>,
    criteria: Option<Vec<u8>>,
    tolerance_scale: f64,
    seed: Option<u64>,
) -> PyResult<Vec<(u8, &'static str, bool, String)>> {
    let ids = criteria.unwrap_or_else(|| CRITERIA.iter().map(|c| c.0).collect());
    let opts = VerifyOptions {
        tolerance_scale,
        seed: seed.unwrap_or(VerifyOptions::default().seed),
    };
    Ok(py.detach(|| {
        ids.iter()
            .map(|&id| {
                let r = run_criterion(id, &opts);
                (r.id, r.title, r.passed(), r.line())
            })
            .collect()
    }))
}

#[pymodule]
fn kipq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEntropyModel>()?;
    m.add_function(wrap_pyfunction!(equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(nfpe_relax, m)?)?;
    m.add_function(wrap_pyfunction!(nse_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(gauge_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
