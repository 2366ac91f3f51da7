//! Python module `pylevymap`.

use levymap::error::LevyError;
use levymap::{catalog, cli, mapping, simulate, verify};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: LevyError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A Lévy–Khintchine triplet [a, R, M].
#[pyclass(name = "Triplet", module = "pylevymap", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTriplet {
    inner: levymap::triplet::LevyTriplet,
}

#[pymethods]
impl PyTriplet {
    /// Parses a JSON triplet document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: cli::parse_triplet(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn exponential(lam: f64) -> PyResult<Self> {
        Ok(Self {
            inner: catalog::exponential_triplet(lam).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn gaussian(shift: f64, variance: f64) -> PyResult<Self> {
        Ok(Self {
            inner: catalog::gaussian_triplet(shift, variance).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (p, gamma_plus, gamma_minus, shift = 0.0))]
    fn stable(p: f64, gamma_plus: f64, gamma_minus: f64, shift: f64) -> PyResult<Self> {
        let spec = catalog::StableSpec::new(p, gamma_plus, gamma_minus, shift).map_err(py_err)?;
        Ok(Self {
            inner: catalog::stable_triplet(&spec).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        cli::serialize_triplet(&self.inner)
    }

    #[getter]
    fn shift(&self) -> f64 {
        self.inner.shift()
    }

    #[getter]
    fn gaussian_variance(&self) -> f64 {
        self.inner.gaussian_variance()
    }

    /// Lévy density at `x` (atoms excluded).
    fn density(&self, x: f64) -> f64 {
        self.inner.measure().density(x)
    }

    /// Φ at each point of `ys`.
    fn exponent(&self, ys: Vec<f64>) -> PyResult<Vec<Complex64>> {
        let phi = self.inner.exponent();
        ys.into_iter()
            .map(|y| phi.eval(y).map_err(py_err))
            .collect()
    }

    fn apply_j(&self, beta: f64) -> PyResult<Self> {
        Ok(Self {
            inner: mapping::apply_j_triplet(beta, &self.inner).map_err(py_err)?,
        })
    }

    fn compose_j(&self, alpha: f64, beta: f64) -> PyResult<Self> {
        Ok(Self {
            inner: mapping::compose_j_triplet(alpha, beta, &self.inner).map_err(py_err)?,
        })
    }

    /// Samples of ∫ h dY(r(t)) for J^β, or J^α∘J^β when `alpha` is given.
    #[pyo3(signature = (beta, alpha = None, n_samples = 20_000, n_steps = 512, seed = simulate::DEFAULT_SEED))]
    fn simulate(
        &self,
        py: Python<'_>,
        beta: f64,
        alpha: Option<f64>,
        n_samples: usize,
        n_steps: usize,
        seed: u64,
    ) -> PyResult<Vec<f64>> {
        let spec = match alpha {
            Some(a) => mapping::RandomIntegralSpec::composition(a, beta, self.inner.clone()),
            None => mapping::RandomIntegralSpec::j_beta(beta, self.inner.clone()),
        }
        .map_err(py_err)?;
        let cfg = simulate::SimConfig {
            n_samples,
            n_steps,
            seed,
            ..Default::default()
        };
        py.detach(|| simulate::sample_random_integral(&spec, &cfg))
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Triplet(shift={}, gaussian_variance={}, atoms={}, grids={}, named={})",
            self.inner.shift(),
            self.inner.gaussian_variance(),
            self.inner.measure().atoms().len(),
            self.inner.measure().grids().len(),
            self.inner.measure().named().len()
        )
    }
}

#[pyfunction]
fn exp_pushforward_density(beta: f64, lam: f64, x: f64) -> PyResult<f64> {
    catalog::exp_pushforward_density(beta, lam, x).map_err(py_err)
}

#[pyfunction]
fn exp_composed_density(alpha: f64, beta: f64, lam: f64, x: f64) -> PyResult<f64> {
    catalog::exp_composed_density(alpha, beta, lam, x).map_err(py_err)
}

/// (c, x0) with J^α∘J^β(σ) = σ^{*c} * δ_{x0}.
#[pyfunction]
#[pyo3(signature = (alpha, beta, p, gamma_plus, gamma_minus, shift = 0.0))]
fn stable_compose(
    alpha: f64,
    beta: f64,
    p: f64,
    gamma_plus: f64,
    gamma_minus: f64,
    shift: f64,
) -> PyResult<(f64, f64)> {
    let spec = catalog::StableSpec::new(p, gamma_plus, gamma_minus, shift).map_err(py_err)?;
    let r = catalog::stable_compose_closed_form(alpha, beta, &spec).map_err(py_err)?;
    Ok((r.power_c, r.x0))
}

#[pyfunction]
fn time_change(alpha: f64, beta: f64, u: Vec<f64>) -> PyResult<Vec<f64>> {
    let r = mapping::time_change_r(alpha, beta).map_err(py_err)?;
    Ok(u.into_iter().map(|v| r.eval(v)).collect())
}

#[pyfunction]
fn incomplete_gamma_upper(c: f64, x: f64) -> PyResult<f64> {
    levymap::numerics::incomplete_gamma_upper(c, x).map_err(py_err)
}

/// (suite, check, residual, tolerance, passed)
type CheckRow = (String, String, f64, f64, bool);

/// Runs verify suites, one row per check.
#[pyfunction]
#[pyo3(signature = (suite = "all"))]
fn run_verify(py: Python<'_>, suite: &str) -> PyResult<Vec<CheckRow>> {
    let suites = verify::Suite::parse_selection(suite).map_err(py_err)?;
    let opts = verify::VerifyOptions::default();
    Ok(py.detach(|| {
        suites
            .into_iter()
            .flat_map(|s| {
                verify::run_suite(s, &opts)
                    .checks
                    .into_iter()
                    .map(move |c| {
                        (
                            s.as_str().to_string(),
                            c.name,
                            c.residual,
                            c.tolerance,
                            c.passed,
                        )
                    })
            })
            .collect()
    }))
}

#[pymodule]
fn pylevymap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTriplet>()?;
    m.add_function(wrap_pyfunction!(exp_pushforward_density, m)?)?;
    m.add_function(wrap_pyfunction!(exp_composed_density, m)?)?;
    m.add_function(wrap_pyfunction!(stable_compose, m)?)?;
    m.add_function(wrap_pyfunction!(time_change, m)?)?;
    m.add_function(wrap_pyfunction!(incomplete_gamma_upper, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("DEFAULT_SEED", simulate::DEFAULT_SEED)?;
    Ok(())
}
