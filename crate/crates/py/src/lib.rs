//! Python extension module `spdc_spiral`: the main types and operations of
//! the SPDC spatial-mode toolkit.
//!
//! Build with `cargo build -p spdc-py --release` and expose the produced
//! `libspdc_spiral.so` as `spdc_spiral.so` on the Python path (the
//! `python/smoke_test.py` script does this automatically).

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use spdc_core as core;
use spdc_core::SpdcError;

fn to_py_err(e: SpdcError) -> PyErr {
    match e {
        SpdcError::Convergence { .. } | SpdcError::Truncation { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn quad_config(tol: f64) -> PyResult<core::QuadratureConfig> {
    let cfg = core::QuadratureConfig {
        rel_tolerance: tol,
        ..core::QuadratureConfig::default()
    };
    cfg.validate().map_err(to_py_err)?;
    Ok(cfg)
}

fn pump_from_list(components: Vec<(i32, Complex64)>) -> PyResult<core::PumpSpec> {
    core::PumpSpec::superposition(components).map_err(to_py_err)
}

/// Dimensionless parameters of a down-conversion setup.
#[pyclass(frozen, from_py_object, module = "spdc_spiral")]
#[derive(Clone)]
struct Params {
    inner: core::NormalizedParams,
}

#[pymethods]
impl Params {
    /// From the normalized widths `wbar = w / sqrt(lambda_p L)`.
    #[staticmethod]
    #[pyo3(signature = (wbar_p, wbar_0, n_p = 1.0))]
    fn from_widths(wbar_p: f64, wbar_0: f64, n_p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::NormalizedParams::from_widths_with_index(wbar_p, wbar_0, n_p)
                .map_err(to_py_err)?,
        })
    }

    /// From a physical setup (lengths in any one consistent unit).
    #[staticmethod]
    #[pyo3(signature = (crystal_length, pump_wavelength, refractive_index, pump_width, analysis_width))]
    fn from_physical(
        crystal_length: f64,
        pump_wavelength: f64,
        refractive_index: f64,
        pump_width: f64,
        analysis_width: f64,
    ) -> PyResult<Self> {
        let setup = core::PhysicalSetup::new(
            crystal_length,
            pump_wavelength,
            refractive_index,
            core::PumpSpec::gaussian(),
            pump_width,
            analysis_width,
        )
        .map_err(to_py_err)?;
        Ok(Self {
            inner: core::NormalizedParams::from_physical(&setup),
        })
    }

    #[getter]
    fn wbar_p(&self) -> f64 {
        self.inner.wbar_p
    }

    #[getter]
    fn wbar_0(&self) -> f64 {
        self.inner.wbar_0
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(wbar_p={}, wbar_0={}, a={}, b={})",
            self.inner.wbar_p, self.inner.wbar_0, self.inner.a, self.inner.b
        )
    }
}

/// Associated Laguerre polynomial `L_p^alpha(x)`.
#[pyfunction]
fn laguerre(p: u32, alpha: u32, x: f64) -> PyResult<f64> {
    core::laguerre(p, alpha, x).map_err(to_py_err)
}

/// LG mode function at a polar point of the transverse frequency plane.
#[pyfunction]
fn lg_mode(l: i32, p: u32, width: f64, rho: f64, phi: f64) -> PyResult<Complex64> {
    core::lg_mode(
        core::ModeIndex::new(l, p),
        width,
        core::TransversePoint::new(rho, phi),
    )
    .map_err(to_py_err)
}

/// Analytic amplitude `C^{l1,l2}_{0,0}` (pump winding `l0` defaults to
/// `l1 + l2`; any other value gives exactly zero).
#[pyfunction]
#[pyo3(signature = (params, l1, l2, l0 = None))]
fn closed_amplitude(params: &Params, l1: i32, l2: i32, l0: Option<i32>) -> PyResult<Complex64> {
    let l0 = l0.unwrap_or(l1 + l2);
    if l1 + l2 != l0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let inputs = core::ClosedFormInputs::new(l1, l2, l0, params.inner).map_err(to_py_err)?;
    Ok(core::closed_amplitude(&inputs).map_err(to_py_err)?.value)
}

/// Overlap amplitude by the reduced 3D quadrature. Returns
/// `(value, error_estimate)`.
#[pyfunction]
#[pyo3(signature = (params, l1, p1, l2, p2, pump_l0, tol = 1e-6))]
fn reduced_amplitude(
    params: &Params,
    l1: i32,
    p1: u32,
    l2: i32,
    p2: u32,
    pump_l0: i32,
    tol: f64,
) -> PyResult<(Complex64, f64)> {
    let amp = core::amplitude_reduced(
        core::ModePair::from_indices(l1, p1, l2, p2),
        &params.inner,
        pump_l0,
        &quad_config(tol)?,
    )
    .map_err(to_py_err)?;
    Ok((amp.value, amp.error_estimate))
}

/// Overlap amplitude by the brute-force 4D oracle. Returns
/// `(value, error_estimate)`.
#[pyfunction]
#[pyo3(signature = (params, l1, p1, l2, p2, pump_l0))]
fn brute_amplitude(
    params: &Params,
    l1: i32,
    p1: u32,
    l2: i32,
    p2: u32,
    pump_l0: i32,
) -> PyResult<(Complex64, f64)> {
    let amp = core::amplitude_brute(
        core::ModePair::from_indices(l1, p1, l2, p2),
        &params.inner,
        pump_l0,
        &core::QuadratureConfig::brute_oracle(),
    )
    .map_err(to_py_err)?;
    Ok((amp.value, amp.error_estimate))
}

/// Spiral spectrum as a list of `(l1, l2, P)` tuples sorted by `l1`.
#[pyfunction]
#[pyo3(signature = (params, l0, l_max, p_max, tol = 1e-6))]
fn spiral_spectrum(
    params: &Params,
    l0: i32,
    l_max: u32,
    p_max: u32,
    tol: f64,
) -> PyResult<Vec<(i32, i32, f64)>> {
    let spectrum = core::spiral_spectrum(&params.inner, l0, l_max, p_max, &quad_config(tol)?)
        .map_err(to_py_err)?;
    Ok(spectrum.entries().collect())
}

/// Truncated modal norm `sum |C|^2` over `|l1| <= l_max`, `p <= p_max`.
#[pyfunction]
#[pyo3(signature = (params, l0, l_max, p_max, tol = 1e-6))]
fn state_norm(params: &Params, l0: i32, l_max: u32, p_max: u32, tol: f64) -> PyResult<f64> {
    core::state_norm(&params.inner, l0, &quad_config(tol)?, l_max, p_max).map_err(to_py_err)
}

/// Coefficients of the `p1 = p2 = 0` subspace as `(l1, l2, C)` tuples.
#[pyfunction]
#[pyo3(signature = (params, l0, l_max, renormalize = true))]
fn restricted_coefficients(
    params: &Params,
    l0: i32,
    l_max: u32,
    renormalize: bool,
) -> PyResult<Vec<(i32, i32, Complex64)>> {
    let state = core::restricted_state(
        &params.inner,
        l0,
        l_max,
        renormalize,
        core::CoefficientSource::ClosedForm,
        &core::QuadratureConfig::default(),
    )
    .map_err(to_py_err)?;
    Ok(state.coefficients().collect())
}

/// Entropy of entanglement, Schmidt number, 99% coverage window and
/// subspace fraction of the restricted state, as a dict.
#[pyfunction]
#[pyo3(signature = (params, l0, l_max))]
fn entropy_metrics<'py>(
    py: Python<'py>,
    params: &Params,
    l0: i32,
    l_max: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let state = core::restricted_state(
        &params.inner,
        l0,
        l_max,
        true,
        core::CoefficientSource::ClosedForm,
        &core::QuadratureConfig::default(),
    )
    .map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item(
        "entropy_bits",
        core::entanglement_entropy(&state).map_err(to_py_err)?,
    )?;
    dict.set_item(
        "schmidt_number",
        core::schmidt_number(&state).map_err(to_py_err)?,
    )?;
    dict.set_item(
        "bandwidth_99",
        state.spiral_bandwidth(0.99).map_err(to_py_err)?,
    )?;
    dict.set_item("subspace_fraction", state.subspace_fraction)?;
    Ok(dict)
}

/// Ladder coefficient `gamma_n` for an even-winding pump superposition
/// given as `[(m, coeff), ...]`.
#[pyfunction]
#[pyo3(signature = (pump, n, params))]
fn gamma_ladder(pump: Vec<(i32, Complex64)>, n: u32, params: &Params) -> PyResult<Complex64> {
    core::gamma_superposition(&pump_from_list(pump)?, n, &params.inner).map_err(to_py_err)
}

/// Plane integral of `|W|^2` (equals 4 in every unit system).
#[pyfunction]
fn w_plane_norm() -> f64 {
    core::w_plane_norm()
}

/// Norm of the two-photon mode function by 4D quadrature (equals 1).
#[pyfunction]
#[pyo3(signature = (params, l0 = 0))]
fn phi_norm(params: &Params, l0: i32) -> f64 {
    core::phi_norm(&params.inner, l0)
}

#[pymodule]
fn spdc_spiral(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_function(wrap_pyfunction!(laguerre, m)?)?;
    m.add_function(wrap_pyfunction!(lg_mode, m)?)?;
    m.add_function(wrap_pyfunction!(closed_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(brute_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(spiral_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(state_norm, m)?)?;
    m.add_function(wrap_pyfunction!(restricted_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(w_plane_norm, m)?)?;
    m.add_function(wrap_pyfunction!(phi_norm, m)?)?;
    Ok(())
}
