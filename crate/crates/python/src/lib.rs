//! Python bindings. Matrices cross the boundary as nested lists of `complex`
//! (row-major); reports are wrapped in [`Report`] and can be dumped to JSON.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use revcs_core::bounds::{self, BoundReport, ScalarWindow, Side, WeightedSequences};
use revcs_core::compare::constant_comparison_study;
use revcs_core::forms::{FormInstance, OmegaPair, PositiveFunctional, Vector};
use revcs_core::harness::{self, GeneratorConfig, WindowRanges};
use revcs_core::instance::{resolve_tolerance, InstanceFile, ToleranceOverride};
use revcs_core::matalg::{self, AlgebraElement, Tolerance};

type Matrix = Vec<Vec<Complex64>>;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn element(m: Matrix) -> PyResult<AlgebraElement> {
    AlgebraElement::from_rows(m).map_err(err)
}

fn tolerance(rtol: Option<f64>, atol: Option<f64>) -> PyResult<Tolerance> {
    resolve_tolerance(ToleranceOverride { rtol, atol }, None).map_err(err)
}

fn side_scalar(s: &Side) -> Option<f64> {
    match s {
        Side::Scalar(x) => Some(*x),
        Side::Matrix(_) => None,
    }
}

fn side_matrix(s: &Side) -> Option<Matrix> {
    s.as_matrix().map(AlgebraElement::rows)
}

/// Outcome of one inequality evaluation.
#[pyclass(frozen, module = "revcs")]
struct Report {
    inner: BoundReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn inequality_id(&self) -> &'static str {
        self.inner.inequality_id.as_str()
    }

    /// `"HOLDS"`, `"VIOLATED"` or `"PRECONDITION_FAILED"`.
    #[getter]
    fn verdict(&self) -> String {
        self.inner.verdict.to_string()
    }

    #[getter]
    fn holds(&self) -> bool {
        self.inner.verdict == bounds::Verdict::Holds
    }

    #[getter]
    fn margin(&self) -> Option<f64> {
        self.inner.margin
    }

    #[getter]
    fn relative_margin(&self) -> Option<f64> {
        self.inner.relative_margin()
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.inner.scale
    }

    #[getter]
    fn lhs(&self) -> Option<f64> {
        side_scalar(&self.inner.lhs)
    }

    #[getter]
    fn rhs(&self) -> Option<f64> {
        side_scalar(&self.inner.rhs)
    }

    #[getter]
    fn lhs_matrix(&self) -> Option<Matrix> {
        side_matrix(&self.inner.lhs)
    }

    #[getter]
    fn rhs_matrix(&self) -> Option<Matrix> {
        side_matrix(&self.inner.rhs)
    }

    /// `(name, holds, margin)` for each hypothesis.
    #[getter]
    fn preconditions(&self) -> Vec<(String, bool, f64)> {
        self.inner.preconditions.iter().map(|c| (c.name.clone(), c.holds, c.margin)).collect()
    }

    #[getter]
    fn cross_checks(&self) -> Vec<(String, bool, f64)> {
        self.inner.cross_checks.iter().map(|c| (c.name.clone(), c.holds, c.margin)).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("report serializes")
    }

    fn __repr__(&self) -> String {
        format!("Report({}, {}, margin={:?})", self.inner.inequality_id, self.inner.verdict, self.inner.margin)
    }
}

fn report(inner: BoundReport) -> Report {
    Report { inner }
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
#[pyfunction]
#[pyo3(signature = (a, rtol=None, atol=None))]
fn eig_hermitian(a: Matrix, rtol: Option<f64>, atol: Option<f64>) -> PyResult<(Vec<f64>, Matrix)> {
    let s = matalg::eig_hermitian(&element(a)?, tolerance(rtol, atol)?).map_err(err)?;
    Ok((s.eigenvalues, s.eigenvectors.rows()))
}

#[pyfunction]
#[pyo3(signature = (a, rtol=None, atol=None))]
fn sqrt_psd(a: Matrix, rtol: Option<f64>, atol: Option<f64>) -> PyResult<Matrix> {
    Ok(matalg::sqrt_psd(&element(a)?, tolerance(rtol, atol)?).map_err(err)?.rows())
}

/// `(a <= b in the Loewner order, smallest eigenvalue of b - a)`.
#[pyfunction]
#[pyo3(signature = (a, b, rtol=None, atol=None))]
fn loewner_leq(a: Matrix, b: Matrix, rtol: Option<f64>, atol: Option<f64>) -> PyResult<(bool, f64)> {
    let c = matalg::loewner_leq(&element(a)?, &element(b)?, tolerance(rtol, atol)?).map_err(err)?;
    Ok((c.holds, c.value))
}

/// Evaluates an instance file given as a JSON string.
#[pyfunction]
#[pyo3(signature = (text, rtol=None, atol=None))]
fn verify(text: &str, rtol: Option<f64>, atol: Option<f64>) -> PyResult<Report> {
    let file = InstanceFile::parse(text).map_err(err)?;
    let tol = resolve_tolerance(ToleranceOverride { rtol, atol }, file.tolerance).map_err(err)?;
    file.evaluate(tol).map(report).map_err(err)
}

/// Additive matrix bound for the module form `<x, y> = y* x` on `M_d`.
#[pyfunction]
#[pyo3(signature = (x, y, omega, big_omega, rtol=None, atol=None))]
fn module_additive_bound(x: Matrix, y: Matrix, omega: Complex64, big_omega: Complex64, rtol: Option<f64>, atol: Option<f64>) -> PyResult<Report> {
    let (x, y) = (element(x)?, element(y)?);
    let form = FormInstance::module(x.dim());
    let pair = OmegaPair::new(omega, big_omega);
    bounds::additive_matrix_bound(&form, &Vector::Element(x), &Vector::Element(y), pair, tolerance(rtol, atol)?)
        .map(report)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, omega, big_omega, rtol=None, atol=None))]
fn module_multiplicative_bound(x: Matrix, y: Matrix, omega: Complex64, big_omega: Complex64, rtol: Option<f64>, atol: Option<f64>) -> PyResult<Report> {
    let (x, y) = (element(x)?, element(y)?);
    let form = FormInstance::module(x.dim());
    let pair = OmegaPair::new(omega, big_omega);
    bounds::multiplicative_matrix_bound(&form, &Vector::Element(x), &Vector::Element(y), pair, tolerance(rtol, atol)?)
        .map(report)
        .map_err(err)
}

/// Additive and multiplicative bounds for commuting positive `T`, `S` and a vector `v`.
#[pyfunction]
#[pyo3(signature = (t, s, v, rtol=None, atol=None))]
fn operator_pair_bounds(t: Matrix, s: Matrix, v: Vec<Complex64>, rtol: Option<f64>, atol: Option<f64>) -> PyResult<(Report, Report)> {
    let r = bounds::operator_pair_bounds(&element(t)?, &element(s)?, &v, tolerance(rtol, atol)?).map_err(err)?;
    Ok((report(r.additive), report(r.multiplicative)))
}

/// Witness for the vector state at `vector`: returns `(x, ratio, report)`.
#[pyfunction]
#[pyo3(signature = (vector, y, omega, big_omega, rtol=None, atol=None))]
fn sharpness_witness(
    vector: Vec<Complex64>,
    y: Matrix,
    omega: Complex64,
    big_omega: Complex64,
    rtol: Option<f64>,
    atol: Option<f64>,
) -> PyResult<(Matrix, Option<f64>, Report)> {
    let phi = PositiveFunctional::vector_state(vector).map_err(err)?;
    let w = bounds::sharpness_witness(&phi, &element(y)?, OmegaPair::new(omega, big_omega), tolerance(rtol, atol)?).map_err(err)?;
    Ok((w.x.rows(), w.ratio, report(w.report)))
}

fn sequences(a: Vec<f64>, b: Vec<f64>, w: Option<Vec<f64>>, window: (f64, f64, f64, f64)) -> PyResult<WeightedSequences> {
    let win = ScalarWindow::new(window.0, window.1, window.2, window.3).map_err(err)?;
    match w {
        Some(w) => WeightedSequences::weighted(a, b, w, win),
        None => WeightedSequences::unweighted(a, b, win),
    }
    .map_err(err)
}

/// `window` is `(a, A, b, B)`.
#[pyfunction]
#[pyo3(signature = (a, b, window, w=None, rtol=None, atol=None))]
fn greub_rheinboldt(a: Vec<f64>, b: Vec<f64>, window: (f64, f64, f64, f64), w: Option<Vec<f64>>, rtol: Option<f64>, atol: Option<f64>) -> PyResult<Report> {
    bounds::greub_rheinboldt(&sequences(a, b, w, window)?, tolerance(rtol, atol)?).map(report).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, b, window, w=None, rtol=None, atol=None))]
fn weighted_additive(a: Vec<f64>, b: Vec<f64>, window: (f64, f64, f64, f64), w: Option<Vec<f64>>, rtol: Option<f64>, atol: Option<f64>) -> PyResult<Report> {
    bounds::weighted_additive(&sequences(a, b, w, window)?, tolerance(rtol, atol)?).map(report).map_err(err)
}

/// `(report, (C1, C2, C3), argmin)` with `argmin` one of `"C1"`, `"C2"`, `"C3"`.
#[pyfunction]
#[pyo3(signature = (a, b, window, rtol=None, atol=None))]
fn polya_szego_improved(a: Vec<f64>, b: Vec<f64>, window: (f64, f64, f64, f64), rtol: Option<f64>, atol: Option<f64>) -> PyResult<(Report, (f64, f64, f64), String)> {
    let r = bounds::polya_szego_improved(&sequences(a, b, None, window)?, tolerance(rtol, atol)?).map_err(err)?;
    let [c1, c2, c3] = r.constants;
    Ok((report(r.report), (c1, c2, c3), r.argmin.to_string()))
}

/// Runs a fuzz campaign and returns the summary as a JSON string.
#[pyfunction]
#[pyo3(signature = (inequality_id, trials=1000, seed=42, parallel=false))]
fn fuzz(py: Python<'_>, inequality_id: &str, trials: usize, seed: u64, parallel: bool) -> PyResult<String> {
    let id = inequality_id.parse().map_err(err)?;
    let config = GeneratorConfig::new(seed, trials);
    let summary = py
        .detach(|| if parallel { harness::fuzz_run_parallel(&config, id) } else { harness::fuzz_run(&config, id) })
        .map_err(err)?;
    Ok(serde_json::to_string(&summary).expect("summary serializes"))
}

/// Argmin counts `(C1, C2, C3)` of the constant-comparison study.
#[pyfunction]
#[pyo3(signature = (n=2, samples=10_000, seed=42))]
fn compare(py: Python<'_>, n: usize, samples: usize, seed: u64) -> PyResult<(usize, usize, usize)> {
    let study = py
        .detach(|| constant_comparison_study(n, samples, seed, WindowRanges::default(), Tolerance::default()))
        .map_err(err)?;
    let [c1, c2, c3] = study.argmin_counts;
    Ok((c1, c2, c3))
}

#[pymodule]
fn revcs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(eig_hermitian, m)?)?;
    m.add_function(wrap_pyfunction!(sqrt_psd, m)?)?;
    m.add_function(wrap_pyfunction!(loewner_leq, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(module_additive_bound, m)?)?;
    m.add_function(wrap_pyfunction!(module_multiplicative_bound, m)?)?;
    m.add_function(wrap_pyfunction!(operator_pair_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(sharpness_witness, m)?)?;
    m.add_function(wrap_pyfunction!(greub_rheinboldt, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_additive, m)?)?;
    m.add_function(wrap_pyfunction!(polya_szego_improved, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
