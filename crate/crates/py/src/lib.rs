//! Python bindings: media, transit vectors, amplitudes, pulse trains and the
//! two independent checks.

use engine::{Kind, TransitVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: engine::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind_of(name: &str) -> PyResult<Kind> {
    match name {
        "reflection" => Ok(Kind::Reflection),
        "transmission" => Ok(Kind::Transmission),
        _ => Err(PyValueError::new_err(format!(
            "kind must be 'reflection' or 'transmission', got '{name}'"
        ))),
    }
}

fn vector(kind: &str, counts: Vec<u32>) -> PyResult<TransitVector> {
    TransitVector::new(kind_of(kind)?, counts).map_err(err)
}

#[pyclass(name = "Medium", module = "layered_echo", frozen)]
struct PyMedium(engine::Medium);

#[pymethods]
impl PyMedium {
    #[new]
    #[pyo3(signature = (layer_taus, reflections, tail_tau = 0.0))]
    fn new(layer_taus: Vec<f64>, reflections: Vec<f64>, tail_tau: f64) -> PyResult<Self> {
        engine::Medium::new(layer_taus, tail_tau, reflections)
            .map(Self)
            .map_err(err)
    }

    /// Reads a `taur` or `phys` medium file.
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        engine::medium::read_medium(path)
            .map(Self)
            .map_err(|e| PyValueError::new_err(format!("{path}: {e}")))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        engine::medium::read_medium_str(text).map(Self).map_err(err)
    }

    /// Converts depths, densities and bulk moduli (half-spaces included).
    #[staticmethod]
    fn from_physical(depths: Vec<f64>, densities: Vec<f64>, bulk_moduli: Vec<f64>) -> PyResult<Self> {
        let profile = engine::PhysicalProfile {
            depths,
            densities,
            bulk_moduli,
        };
        engine::Medium::from_physical(&profile).map(Self).map_err(err)
    }

    #[getter]
    fn layer_taus(&self) -> Vec<f64> {
        self.0.layer_taus().to_vec()
    }

    #[getter]
    fn tail_tau(&self) -> f64 {
        self.0.tail_tau()
    }

    #[getter]
    fn reflections(&self) -> Vec<f64> {
        self.0.reflections().to_vec()
    }

    #[getter]
    fn transmissions(&self) -> Vec<f64> {
        self.0.transmissions().values().to_vec()
    }

    fn direct_transmission_time(&self) -> f64 {
        self.0.direct_transmission_time()
    }

    fn to_text(&self) -> String {
        engine::medium::write_medium(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.interfaces()
    }

    fn __repr__(&self) -> String {
        format!("Medium(M={}, tail_tau={})", self.0.layers(), self.0.tail_tau())
    }
}

#[pyclass(name = "PulseTrain", module = "layered_echo", frozen)]
struct PyPulseTrain(engine::PulseTrain);

#[pymethods]
impl PyPulseTrain {
    #[getter]
    fn kind(&self) -> String {
        self.0.kind.to_string()
    }

    #[getter]
    fn cutoff(&self) -> f64 {
        self.0.cutoff
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.terms.iter().map(|t| t.time).collect()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<f64> {
        self.0.terms.iter().map(|t| t.amplitude).collect()
    }

    /// Transit vector of every term.
    #[getter]
    fn transits(&self) -> Vec<Vec<u32>> {
        self.0.terms.iter().map(|t| t.k.counts().to_vec()).collect()
    }

    #[pyo3(signature = (tol_rel = engine::greens::DEFAULT_MERGE_TOL))]
    fn merge_ties(&self, tol_rel: f64) -> Self {
        Self(self.0.merge_ties(tol_rel))
    }

    fn to_csv(&self, with_k: bool) -> PyResult<String> {
        let mut buf = Vec::new();
        self.0
            .write_csv(&mut buf, with_k)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(String::from_utf8(buf).expect("ascii output"))
    }

    /// Samples the train on `t0 + i * dt` with `"spike"` or `"ricker:FREQ"`.
    #[pyo3(signature = (dt, n, wavelet = "spike", t0 = 0.0))]
    fn render(&self, dt: f64, n: usize, wavelet: &str, t0: f64) -> PyResult<Vec<f64>> {
        let wavelet: engine::Wavelet = wavelet.parse().map_err(PyValueError::new_err)?;
        let arrivals = engine::greens::Arrivals::from_train(&self.0);
        engine::convolve(&arrivals.0, wavelet, t0, dt, n)
            .map(|s| s.samples)
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PulseTrain({}, {} terms up to {})",
            self.0.kind,
            self.0.len(),
            self.0.cutoff
        )
    }
}

/// Reflection Green's function up to `cutoff`, one term per transit vector.
#[pyfunction]
#[pyo3(signature = (medium, cutoff, floor = 0.0))]
fn reflection_green(py: Python<'_>, medium: &PyMedium, cutoff: f64, floor: f64) -> PyResult<PyPulseTrain> {
    let opts = engine::greens::TrainOptions { floor };
    py.detach(|| engine::greens::reflection_green_with(&medium.0, cutoff, &opts))
        .map(PyPulseTrain)
        .map_err(err)
}

/// Transmission Green's function up to `cutoff`, one term per transit vector.
#[pyfunction]
#[pyo3(signature = (medium, cutoff, floor = 0.0))]
fn transmission_green(py: Python<'_>, medium: &PyMedium, cutoff: f64, floor: f64) -> PyResult<PyPulseTrain> {
    let opts = engine::greens::TrainOptions { floor };
    py.detach(|| engine::greens::transmission_green_with(&medium.0, cutoff, &opts))
        .map(PyPulseTrain)
        .map_err(err)
}

#[pyfunction]
fn reflection_amplitude(reflections: Vec<f64>, k: Vec<u32>) -> PyResult<f64> {
    engine::reflection_amplitude(&reflections, &vector("reflection", k)?).map_err(err)
}

#[pyfunction]
fn transmission_amplitude(reflections: Vec<f64>, k: Vec<u32>) -> PyResult<f64> {
    engine::transmission_amplitude(&reflections, &vector("transmission", k)?).map_err(err)
}

#[pyfunction]
fn kunetz_primary(reflections: Vec<f64>, n: usize) -> PyResult<f64> {
    engine::kunetz_primary(&reflections, n).map_err(err)
}

/// Admissible branch vectors of `k`, in lexicographic order.
#[pyfunction]
#[pyo3(signature = (k, kind = "reflection"))]
fn branch_set(k: Vec<u32>, kind: &str) -> PyResult<Vec<Vec<u32>>> {
    Ok(engine::branch_set(&vector(kind, k)?)
        .into_iter()
        .map(|b| b.0)
        .collect())
}

/// `(k, arrival)` pairs up to `cutoff`, in enumeration order.
#[pyfunction]
#[pyo3(signature = (medium, cutoff, kind = "reflection"))]
fn transit_vectors(medium: &PyMedium, cutoff: f64, kind: &str) -> PyResult<Vec<(Vec<u32>, f64)>> {
    let kind = kind_of(kind)?;
    Ok(engine::transit::TransitEnumerator::new(&medium.0, kind, cutoff)
        .map(|(k, t)| (k.counts().to_vec(), t))
        .collect())
}

/// Equal-travel-time lattice: `(reflection samples, transmission start,
/// transmission samples)`.
#[pyfunction]
fn lattice(medium: &PyMedium, steps: usize) -> PyResult<(Vec<f64>, f64, Vec<f64>)> {
    let r = engine::goupillaud::simulate(&medium.0, steps).map_err(err)?;
    Ok((r.reflection, r.transmission_start, r.transmission))
}

/// `(classes, sequences, max relative deviation, merged max relative
/// deviation, unmatched vectors)`.
type OracleReport = (usize, u64, f64, f64, Vec<Vec<u32>>);

/// Closed form against path enumeration.
#[pyfunction]
#[pyo3(signature = (medium, cutoff, kind = "reflection", limit = engine::oracle::DEFAULT_SEQUENCE_LIMIT))]
fn oracle_compare(
    py: Python<'_>,
    medium: &PyMedium,
    cutoff: f64,
    kind: &str,
    limit: usize,
) -> PyResult<OracleReport> {
    let kind = kind_of(kind)?;
    let m = &medium.0;
    let cmp = py
        .detach(|| {
            engine::oracle::compare(m, kind, cutoff, limit, |k| {
                engine::amplitudes::amplitude(m.reflections(), k)
            })
        })
        .map_err(err)?;
    Ok((
        cmp.classes,
        cmp.sequences,
        cmp.max_deviation,
        cmp.merged_max_deviation,
        cmp.unmatched.into_iter().map(|k| k.counts().to_vec()).collect(),
    ))
}

#[pymodule(name = "layered_echo")]
fn layered_echo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMedium>()?;
    m.add_class::<PyPulseTrain>()?;
    m.add_function(wrap_pyfunction!(reflection_green, m)?)?;
    m.add_function(wrap_pyfunction!(transmission_green, m)?)?;
    m.add_function(wrap_pyfunction!(reflection_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(transmission_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(kunetz_primary, m)?)?;
    m.add_function(wrap_pyfunction!(branch_set, m)?)?;
    m.add_function(wrap_pyfunction!(transit_vectors, m)?)?;
    m.add_function(wrap_pyfunction!(lattice, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_compare, m)?)?;
    Ok(())
}
