//! Python bindings. Structured results come back as plain dicts and lists.

use lefschetz_core::braid::{braid_equal as braid_eq, BraidWord};
use lefschetz_core::coxeter::psi_factorization;
use lefschetz_core::invariants::{self, CoverType};
use lefschetz_core::report::{self, AurouxOptions};
use lefschetz_core::surface::{reference_model, SignMode};
use lefschetz_core::twist::{psi_reference, word_matrix};
use lefschetz_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn sign_mode(s: &str) -> PyResult<SignMode> {
    s.parse().map_err(err)
}

/// Verification report comparing the Coxeter product with ψ on homology.
#[pyfunction]
#[pyo3(signature = (b, sign_mode="auto"))]
fn verify_psi<'py>(py: Python<'py>, b: u32, sign_mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = report::cmd_verify_psi(b, self::sign_mode(sign_mode)?).map_err(err)?;
    to_py(py, &r)
}

/// `(psi, product)` as row lists over the homology basis of the model.
#[pyfunction]
#[pyo3(signature = (b, sign_mode="auto"))]
fn psi_matrices(b: u32, sign_mode: &str) -> PyResult<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    report::check_b(b).map_err(err)?;
    let (_, _, model) = reference_model(b, self::sign_mode(sign_mode)?).map_err(err)?;
    let psi = psi_reference(&model).map_err(err)?;
    let product = word_matrix(&model, &psi_factorization(b).map_err(err)?).map_err(err)?;
    Ok((psi.matrix.to_rows(), product.matrix.to_rows()))
}

/// Report and certificate (None on failure) of the Auroux pipeline.
#[pyfunction]
#[pyo3(signature = (b=2, composition="XXYY", without_sigma=false))]
fn auroux<'py>(py: Python<'py>, b: u32, composition: &str, without_sigma: bool) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let opts = AurouxOptions { b, mode: SignMode::Auto, composition: composition.into(), without_sigma };
    let run = report::cmd_auroux(&opts).map_err(err)?;
    Ok((to_py(py, &run.report)?, to_py(py, &run.certificate)?))
}

#[pyfunction]
#[pyo3(signature = (a, b, c, d=None))]
fn surface_invariants<'py>(py: Python<'py>, a: i64, b: i64, c: i64, d: Option<i64>) -> PyResult<Bound<'py, PyAny>> {
    let t = CoverType::new(a, b, c, d.unwrap_or(b)).map_err(err)?;
    to_py(py, &invariants::invariants(&t))
}

#[pyfunction]
fn theorem_hypotheses<'py>(py: Python<'py>, a: i64, b: i64, c: i64, k: i64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &invariants::theorem_hypotheses(a, b, c, k))
}

#[pyfunction]
#[pyo3(signature = (a, b, c, k, force=false))]
fn family_enumerate<'py>(py: Python<'py>, a: i64, b: i64, c: i64, k: i64, force: bool) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &invariants::family_enumerate(a, b, c, k, force).map_err(err)?)
}

#[pyfunction]
fn deformation_dimension(a: i64, b: i64, c: i64) -> i64 {
    invariants::deformation_dimension(a, b, c)
}

/// Equality in the braid group on `strands` strands; words are signed generator indices.
#[pyfunction]
fn braid_equal(strands: usize, left: Vec<i32>, right: Vec<i32>) -> PyResult<bool> {
    let l = BraidWord::new(strands, left).map_err(err)?;
    let r = BraidWord::new(strands, right).map_err(err)?;
    braid_eq(&l, &r).map_err(err)
}

#[pyfunction]
fn manfredini<'py>(py: Python<'py>, n: usize, k: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &report::cmd_manfredini(n, k).map_err(err)?)
}

/// Text of an export target (`config`, `ribbon`, `model`, `monodromy`, `psi-word`).
#[pyfunction]
#[pyo3(signature = (what, b=2, format="json", sign_mode="auto"))]
fn export(what: &str, b: u32, format: &str, sign_mode: &str) -> PyResult<String> {
    report::cmd_export(what.parse().map_err(err)?, b, self::sign_mode(sign_mode)?, format.parse().map_err(err)?).map_err(err)
}

#[pymodule]
fn lefschetz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(verify_psi, m)?)?;
    m.add_function(wrap_pyfunction!(psi_matrices, m)?)?;
    m.add_function(wrap_pyfunction!(auroux, m)?)?;
    m.add_function(wrap_pyfunction!(surface_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_hypotheses, m)?)?;
    m.add_function(wrap_pyfunction!(family_enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(deformation_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(braid_equal, m)?)?;
    m.add_function(wrap_pyfunction!(manfredini, m)?)?;
    m.add_function(wrap_pyfunction!(export, m)?)?;
    Ok(())
}
