//! Network files and run configuration.
//!
//! Network JSON schema:
//!
//! ```json
//! {
//!   "name": "optional label",
//!   "genes": [{"d0": 2.0, "d1": 1.0, "k0": 0.0, "k1": 1.0, "b": 1.0, "s1": 1.0}],
//!   "theta": [[0.0]],
//!   "beta": [0.0]
//! }
//! ```
//!
//! `ell` is never read from the file; it is derived from `theta`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GeneParams, NetworkSpec, RegulationSpec};
use crate::simulate::ModelKind;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGene {
    d0: f64,
    d1: f64,
    k0: f64,
    k1: f64,
    b: f64,
    s1: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    #[serde(default)]
    #[allow(dead_code)]
    name: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    genes: Vec<RawGene>,
    theta: Vec<Vec<f64>>,
    beta: Vec<f64>,
}

/// Parses a network from JSON text; `origin` labels error messages.
pub fn parse_network_str(text: &str, origin: &str) -> Result<NetworkSpec> {
    let cfg = |reason: String| Error::Config {
        path: origin.to_string(),
        reason,
    };
    let raw: RawNetwork = serde_json::from_str(text).map_err(|e| cfg(e.to_string()))?;
    let n = raw.genes.len();
    if n == 0 {
        return Err(cfg("`genes` must list at least one gene".into()));
    }
    if raw.beta.len() != n {
        return Err(cfg(format!("`beta` has {} entries, expected {n} (one per gene)", raw.beta.len())));
    }
    if raw.theta.len() != n {
        return Err(cfg(format!("`theta` has {} rows, expected {n}", raw.theta.len())));
    }
    if let Some(i) = raw.theta.iter().position(|row| row.len() != n) {
        return Err(cfg(format!("`theta[{i}]` has {} entries, expected {n}", raw.theta[i].len())));
    }
    let genes = raw
        .genes
        .iter()
        .map(|g| GeneParams {
            d0: g.d0,
            d1: g.d1,
            k0: g.k0,
            k1: g.k1,
            b: g.b,
            s1: g.s1,
            ell: 0.0,
        })
        .collect();
    let net = NetworkSpec::new(
        genes,
        RegulationSpec {
            theta: raw.theta,
            beta: raw.beta,
        },
    )
    .map_err(|e| cfg(e.to_string()))?;
    let report = net.validate();
    if !report.is_ok() {
        let msg = report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(cfg(msg));
    }
    Ok(net)
}

/// Reads and validates a network JSON file.
pub fn parse_network_config(path: &Path) -> Result<NetworkSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_network_str(&text, &path.display().to_string())
}

/// Serializes a network in the file schema (without the derived `ell`).
pub fn network_to_json(net: &NetworkSpec) -> serde_json::Value {
    serde_json::json!({
        "genes": net.genes.iter().map(|g| serde_json::json!({
            "d0": g.d0, "d1": g.d1, "k0": g.k0, "k1": g.k1, "b": g.b, "s1": g.s1,
        })).collect::<Vec<_>>(),
        "theta": net.regulation.theta,
        "beta": net.regulation.beta,
    })
}

/// Time grid written as `t0:t1:steps` (evenly spaced, both ends included) or
/// `t0:t1:steps:log` (log-spaced, `t0 > 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub spec: String,
    pub times: Vec<f64>,
}

impl TimeGrid {
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::arg("grid", format!("`{spec}`: {reason}"));
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(bad("expected t0:t1:steps or t0:t1:steps:log"));
        }
        let t0: f64 = parts[0].trim().parse().map_err(|_| bad("t0 is not a number"))?;
        let t1: f64 = parts[1].trim().parse().map_err(|_| bad("t1 is not a number"))?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad("steps is not a positive integer"))?;
        let log = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(_) => return Err(bad("spacing must be `lin` or `log`")),
        };
        if !t0.is_finite() || !t1.is_finite() || t0 < 0.0 {
            return Err(bad("times must be finite and nonnegative"));
        }
        if steps == 0 {
            return Err(bad("steps must be at least 1"));
        }
        if steps == 1 && t0 != t1 {
            return Err(bad("a single step needs t0 = t1"));
        }
        if steps > 1 && !(t1 > t0) {
            return Err(bad("grid must be strictly increasing (t1 > t0)"));
        }
        if log && t0 <= 0.0 {
            return Err(bad("log spacing needs t0 > 0"));
        }
        let times = if steps == 1 {
            vec![t0]
        } else {
            (0..steps)
                .map(|k| {
                    let f = k as f64 / (steps - 1) as f64;
                    if k == steps - 1 {
                        t1
                    } else if log {
                        (t0.ln() + f * (t1.ln() - t0.ln())).exp()
                    } else {
                        t0 + f * (t1 - t0)
                    }
                })
                .collect()
        };
        Ok(TimeGrid {
            spec: spec.to_string(),
            times,
        })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 {
            return Err(Error::arg("grid", "times must be nonnegative and strictly increasing"));
        }
        let spec = times.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
        Ok(TimeGrid { spec, times })
    }
}

/// Everything a command needs besides the network itself. Stored verbatim in
/// the manifest; rerunning with it reproduces the CSV bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub network: Option<PathBuf>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub runs: usize,
    pub workers: usize,
    pub grid: Option<TimeGrid>,
    pub model: ModelKind,
    pub horizon: Option<f64>,
    /// First initial condition: `x` for P, `y` followed by `z` for MP.
    pub init1: Option<Vec<f64>>,
    pub init2: Option<Vec<f64>>,
    /// Companion start value.
    pub u0: Option<f64>,
    /// Initial Wasserstein distance for `bounds` (defaults to the distance
    /// between the two initial conditions).
    pub w0: Option<f64>,
    /// Companion parameters overriding those derived from the network.
    pub companion: Option<CompanionOverride>,
    /// Interaction strengths and `rho` values swept by `pstar`.
    pub lambdas: Vec<f64>,
    pub rhos: Vec<f64>,
    /// Also log rejected proposals.
    pub log_rejected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompanionOverride {
    pub r: f64,
    pub lambda_cap: f64,
    pub d1_min: f64,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            command: command.to_string(),
            network: None,
            seed,
            out_dir: out_dir.into(),
            runs: 1,
            workers: 1,
            grid: None,
            model: ModelKind::P,
            horizon: None,
            init1: None,
            init2: None,
            u0: None,
            w0: None,
            companion: None,
            lambdas: vec![0.5, 1.0, 2.0],
            rhos: vec![0.5, 1.0, 2.0],
            log_rejected: false,
        }
    }
}
