use std::path::PathBuf;

use grnpdmp::bounds;
use grnpdmp::commands;
use grnpdmp::companion::{self, BandOrder, CompanionParams};
use grnpdmp::config::{self, RunConfig, TimeGrid};
use grnpdmp::coupling::{domination_gap, simulate_coupled_mp, simulate_coupled_p, CoupledOptions};
use grnpdmp::driver::{run_indexed, Job};
use grnpdmp::metrics::{self, SampleCloud};
use grnpdmp::model::{DerivedConstants, NetworkSpec};
use grnpdmp::rng::stream;
use grnpdmp::simulate::{simulate_mp, simulate_p, SimOptions, StateMP, StateP};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: grnpdmp::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Validated gene network.
#[pyclass(name = "Network", module = "pygrnpdmp", frozen)]
struct PyNetwork {
    inner: NetworkSpec,
}

#[pymethods]
impl PyNetwork {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyNetwork {
            inner: config::parse_network_str(text, "<string>").map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyNetwork {
            inner: config::parse_network_config(&path).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn constants(&self) -> PyResult<PyConstants> {
        Ok(PyConstants {
            inner: self.inner.derived_constants().map_err(err)?,
        })
    }

    fn kon(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        if x.len() != self.inner.n() {
            return Err(PyValueError::new_err(format!("expected {} values", self.inner.n())));
        }
        Ok(self.inner.kon(&x))
    }

    fn to_json(&self) -> String {
        config::network_to_json(&self.inner).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Network(n={})", self.inner.n())
    }
}

#[pyclass(name = "Constants", module = "pygrnpdmp", frozen)]
struct PyConstants {
    inner: DerivedConstants,
}

#[pymethods]
impl PyConstants {
    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }
    #[getter]
    fn lambda_cap(&self) -> f64 {
        self.inner.lambda_cap
    }
    #[getter]
    fn d1_min(&self) -> f64 {
        self.inner.d1_min
    }
    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }
    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }
    #[getter]
    fn eps(&self) -> Vec<f64> {
        self.inner.eps.clone()
    }
    fn is_dissipative(&self) -> bool {
        bounds::is_dissipative(&self.inner)
    }
    fn chen_exponent(&self) -> f64 {
        bounds::chen_exponent(&self.inner)
    }
    fn bound_p(&self, t: f64, w0: f64) -> f64 {
        bounds::bound_p(t, w0, &self.inner)
    }
    fn bound_mp(&self, t: f64, w0: f64) -> f64 {
        bounds::bound_mp(t, w0, &self.inner)
    }
    fn chen_bound(&self, t: f64, w0: f64) -> f64 {
        bounds::chen_bound(t, w0, &self.inner)
    }
    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("Constants(r={}, lambda_cap={}, d1_min={}, rho={}, tau={})", c.r, c.lambda_cap, c.d1_min, c.rho, c.tau)
    }
}

/// One simulated path: terminal state, states at the sample times, burst count.
#[pyclass(name = "Trajectory", module = "pygrnpdmp", frozen, get_all)]
struct PyTrajectory {
    terminal: Vec<f64>,
    sample_times: Vec<f64>,
    samples: Vec<Vec<f64>>,
    bursts: u64,
}

fn split_mp(v: &[f64], n: usize) -> PyResult<StateMP> {
    match v.len() {
        l if l == n => Ok(StateMP::new(vec![0.0; n], v.to_vec())),
        l if l == 2 * n => Ok(StateMP::new(v[..n].to_vec(), v[n..].to_vec())),
        l => Err(PyValueError::new_err(format!("expected {n} or {} values, got {l}", 2 * n))),
    }
}

fn join_mp(s: &StateMP) -> Vec<f64> {
    s.y.iter().chain(&s.z).copied().collect()
}

/// Simulates the protein-only model from `x0` with stream `(seed, index)`.
#[pyfunction]
#[pyo3(signature = (net, x0, horizon, seed, index=0, sample_times=vec![]))]
fn simulate_protein(net: &PyNetwork, x0: Vec<f64>, horizon: f64, seed: u64, index: u64, sample_times: Vec<f64>) -> PyResult<PyTrajectory> {
    let tr = simulate_p(&net.inner, &StateP::new(x0), horizon, &SimOptions::sampled(&sample_times), &mut stream(seed, index)).map_err(err)?;
    Ok(PyTrajectory {
        terminal: tr.terminal.x,
        sample_times: tr.sample_times,
        samples: tr.samples.into_iter().map(|s| s.x).collect(),
        bursts: tr.bursts,
    })
}

/// Simulates the mRNA-protein model; states are `y` followed by `z`.
#[pyfunction]
#[pyo3(signature = (net, s0, horizon, seed, index=0, sample_times=vec![]))]
fn simulate_mrna_protein(net: &PyNetwork, s0: Vec<f64>, horizon: f64, seed: u64, index: u64, sample_times: Vec<f64>) -> PyResult<PyTrajectory> {
    let s0 = split_mp(&s0, net.inner.n())?;
    let tr = simulate_mp(&net.inner, &s0, horizon, &SimOptions::sampled(&sample_times), &mut stream(seed, index)).map_err(err)?;
    Ok(PyTrajectory {
        terminal: join_mp(&tr.terminal),
        sample_times: tr.sample_times,
        samples: tr.samples.iter().map(join_mp).collect(),
        bursts: tr.bursts,
    })
}

/// Summary of one coupled run.
#[pyclass(name = "CoupledRun", module = "pygrnpdmp", frozen, get_all)]
struct PyCoupledRun {
    first: Vec<f64>,
    second: Vec<f64>,
    u: f64,
    min_gap: f64,
    violations: u64,
    clamp_count: u64,
    accepted: u64,
}

/// Runs the synchronizing coupling; `model` is `"p"` or `"mp"`.
#[pyfunction]
#[pyo3(signature = (net, init1, init2, horizon, seed, index=0, model="p"))]
fn couple(net: &PyNetwork, init1: Vec<f64>, init2: Vec<f64>, horizon: f64, seed: u64, index: u64, model: &str) -> PyResult<PyCoupledRun> {
    let mut rng = stream(seed, index);
    let opts = CoupledOptions::default();
    match model.to_ascii_lowercase().as_str() {
        "p" => {
            let tr = simulate_coupled_p(&net.inner, &StateP::new(init1), &StateP::new(init2), horizon, &opts, &mut rng).map_err(err)?;
            let g = domination_gap(&tr);
            Ok(PyCoupledRun {
                first: tr.terminal.first.x.clone(),
                second: tr.terminal.second.x.clone(),
                u: tr.terminal.u,
                min_gap: g.min_gap,
                violations: g.violations,
                clamp_count: tr.clamp_count,
                accepted: tr.counts.accepted(),
            })
        }
        "mp" => {
            let n = net.inner.n();
            let tr = simulate_coupled_mp(&net.inner, &split_mp(&init1, n)?, &split_mp(&init2, n)?, horizon, &opts, &mut rng).map_err(err)?;
            let g = domination_gap(&tr);
            Ok(PyCoupledRun {
                first: join_mp(&tr.terminal.first),
                second: join_mp(&tr.terminal.second),
                u: tr.terminal.u,
                min_gap: g.min_gap,
                violations: g.violations,
                clamp_count: tr.clamp_count,
                accepted: tr.counts.accepted(),
            })
        }
        other => Err(PyValueError::new_err(format!("model must be 'p' or 'mp', got '{other}'"))),
    }
}

fn params(r: f64, lambda_cap: f64, d1_min: f64) -> PyResult<CompanionParams> {
    CompanionParams::new(r, lambda_cap, d1_min).map_err(err)
}

#[pyfunction]
fn p_star(r: f64, lambda_cap: f64, d1_min: f64, u: f64) -> PyResult<f64> {
    Ok(companion::p_star(&params(r, lambda_cap, d1_min)?, u))
}

#[pyfunction]
fn p_infinite(r: f64, lambda_cap: f64, d1_min: f64, u: f64) -> PyResult<f64> {
    Ok(companion::p_infinite(&params(r, lambda_cap, d1_min)?, u))
}

#[pyfunction]
fn waiting_survival(r: f64, lambda_cap: f64, d1_min: f64, t: f64, u0: f64) -> PyResult<f64> {
    companion::waiting_survival(&params(r, lambda_cap, d1_min)?, t, u0).map_err(err)
}

#[pyfunction]
fn waiting_cdf_finite(r: f64, lambda_cap: f64, d1_min: f64, t: f64, u0: f64) -> PyResult<f64> {
    companion::waiting_cdf_finite(&params(r, lambda_cap, d1_min)?, t, u0).map_err(err)
}

#[pyfunction]
fn invert_waiting_cdf(r: f64, lambda_cap: f64, d1_min: f64, s: f64, u0: f64) -> PyResult<f64> {
    companion::invert_waiting_cdf(&params(r, lambda_cap, d1_min)?, s, u0).map_err(err)
}

#[pyfunction]
fn gamma(p_star: f64, tau: f64, d1_min: f64) -> f64 {
    bounds::gamma(p_star, tau, d1_min)
}

/// `runs` terminal values `U(t)` from the decide-ahead sampler or from thinning.
#[pyfunction]
#[pyo3(signature = (r, lambda_cap, d1_min, u0, t, runs, seed, method="alg1", workers=0))]
#[allow(clippy::too_many_arguments)]
fn companion_samples(py: Python<'_>, r: f64, lambda_cap: f64, d1_min: f64, u0: f64, t: f64, runs: usize, seed: u64, method: &str, workers: usize) -> PyResult<Vec<f64>> {
    let p = params(r, lambda_cap, d1_min)?;
    let job = Job::new(runs, seed, workers);
    let out = match method {
        "alg1" => py.detach(|| {
            run_indexed(&job, |_, rng| Ok(companion::simulate_companion_alg1(&p, u0, t, None, BandOrder::LawPreserving, rng)?.terminal))
        }),
        "thinning" => py.detach(|| run_indexed(&job, |_, rng| companion::simulate_companion_thinning(&p, u0, t, rng))),
        other => return Err(PyValueError::new_err(format!("method must be 'alg1' or 'thinning', got '{other}'"))),
    };
    out.map_err(err)
}

fn cloud(points: Vec<Vec<f64>>) -> PyResult<SampleCloud> {
    SampleCloud::new(points).map_err(err)
}

/// Exact empirical W1 (L1 ground cost) between two equal-size clouds.
#[pyfunction]
fn empirical_w1_exact(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<f64> {
    metrics::empirical_w1_exact(&cloud(a)?, &cloud(b)?).map_err(err)
}

#[pyfunction]
fn w1_lower_marginals(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<f64> {
    metrics::w1_lower_marginals(&cloud(a)?, &cloud(b)?).map_err(err)
}

/// Two-sample KS test; returns `(statistic, critical value, passes)`.
#[pyfunction]
#[pyo3(signature = (a, b, alpha=0.01))]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>, alpha: f64) -> PyResult<(f64, f64, bool)> {
    let k = metrics::ks_two_sample(&a, &b, alpha).map_err(err)?;
    Ok((k.statistic, k.critical, k.pass))
}

/// Runs a CLI command and writes its outputs; returns the manifest as JSON.
#[pyfunction]
#[pyo3(signature = (command, out, seed, config=None, runs=1, workers=0, grid=None, model="p"))]
#[allow(clippy::too_many_arguments)]
fn run_command(
    py: Python<'_>,
    command: &str,
    out: PathBuf,
    seed: u64,
    config: Option<PathBuf>,
    runs: usize,
    workers: usize,
    grid: Option<&str>,
    model: &str,
) -> PyResult<String> {
    let mut cfg = RunConfig::new(command, seed, out);
    cfg.network = config;
    cfg.runs = runs;
    cfg.workers = workers;
    cfg.model = model.parse().map_err(err)?;
    cfg.grid = grid.map(TimeGrid::parse).transpose().map_err(err)?;
    let report = py.detach(|| commands::execute(&cfg)).map_err(err)?;
    serde_json::to_string(&report.manifest).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn pygrnpdmp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyConstants>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyCoupledRun>()?;
    m.add_function(wrap_pyfunction!(simulate_protein, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_mrna_protein, m)?)?;
    m.add_function(wrap_pyfunction!(couple, m)?)?;
    m.add_function(wrap_pyfunction!(p_star, m)?)?;
    m.add_function(wrap_pyfunction!(p_infinite, m)?)?;
    m.add_function(wrap_pyfunction!(waiting_survival, m)?)?;
    m.add_function(wrap_pyfunction!(waiting_cdf_finite, m)?)?;
    m.add_function(wrap_pyfunction!(invert_waiting_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(companion_samples, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_w1_exact, m)?)?;
    m.add_function(wrap_pyfunction!(w1_lower_marginals, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
