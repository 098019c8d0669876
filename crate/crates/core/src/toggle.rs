//! Two-gene toggle switch in a strong (bistable) and a weak (unimodal)
//! interaction regime, both driven through the mRNA-protein model.

use serde::{Deserialize, Serialize};

use crate::bounds::{chen_exponent, is_dissipative};
use crate::config::parse_network_str;
use crate::driver::{run_indexed, Job};
use crate::error::Result;
use crate::metrics::{dip_test, DipTest};
use crate::model::NetworkSpec;
use crate::rng::{stream, subseed};
use crate::simulate::{simulate, MrnaProteinModel, SimOptions, StateMP};

pub const STRONG_JSON: &str = include_str!("../configs/toggle_strong.json");
pub const WEAK_JSON: &str = include_str!("../configs/toggle_weak.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Strong,
    Weak,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Strong => "strong",
            Regime::Weak => "weak",
        }
    }

    pub fn network(&self) -> NetworkSpec {
        let (text, origin) = match self {
            Regime::Strong => (STRONG_JSON, "configs/toggle_strong.json"),
            Regime::Weak => (WEAK_JSON, "configs/toggle_weak.json"),
        };
        parse_network_str(text, origin).expect("shipped toggle config is valid")
    }
}

/// Sampled protein paths of one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToggleEnsemble {
    pub times: Vec<f64>,
    /// `paths[run][k]` is the state at `times[k]`.
    pub paths: Vec<Vec<StateMP>>,
    pub bursts: u64,
}

/// Runs `job.runs` independent copies from zero mRNA and protein.
pub fn toggle_ensemble(net: &NetworkSpec, times: &[f64], job: &Job) -> Result<ToggleEnsemble> {
    let n = net.n();
    let horizon = *times.last().unwrap_or(&0.0);
    let model = MrnaProteinModel::new(net);
    let opts = SimOptions::sampled(times);
    let runs = run_indexed(job, |_, rng| {
        let s0 = StateMP::new(vec![0.0; n], vec![0.0; n]);
        let traj = simulate(&model, &s0, horizon, &opts, rng)?;
        Ok((traj.samples, traj.bursts))
    })?;
    let bursts = runs.iter().map(|r| r.1).sum();
    Ok(ToggleEnsemble {
        times: times.to_vec(),
        paths: runs.into_iter().map(|r| r.0).collect(),
        bursts,
    })
}

/// Fractions of samples with `z1 > z2` and with `z1 < z2`.
pub fn occupancy(path: &[StateMP]) -> [f64; 2] {
    let n = path.len().max(1) as f64;
    let above = path.iter().filter(|s| s.z[0] > s.z[1]).count() as f64;
    let below = path.iter().filter(|s| s.z[0] < s.z[1]).count() as f64;
    [above / n, below / n]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToggleSummary {
    pub regime: Regime,
    pub lambda_cap: f64,
    pub rho_inv: f64,
    pub dissipative: bool,
    pub chen_exponent: f64,
    /// Worst run's half-plane occupancy, `min_run min(occ_above, occ_below)`.
    pub min_occupancy: f64,
    /// Half-plane occupancies pooled over runs.
    pub occupancy: [f64; 2],
    /// Dip test on `z1 - z2` across runs at the horizon.
    pub dip: DipTest,
}

pub const DIP_ALPHA: f64 = 0.05;

impl ToggleSummary {
    pub fn rejects_unimodality(&self) -> bool {
        self.dip.rejects_unimodality(DIP_ALPHA)
    }
}

/// Bimodality summary of one regime. `paths` measures occupancy along single
/// trajectories; `terminal` supplies i.i.d. horizon values for the dip test.
pub fn summarize(
    regime: Regime,
    net: &NetworkSpec,
    paths: &ToggleEnsemble,
    terminal: &ToggleEnsemble,
    dip_reps: usize,
    seed: u64,
) -> Result<ToggleSummary> {
    let c = net.derived_constants()?;
    let occ: Vec<[f64; 2]> = paths.paths.iter().map(|p| occupancy(p)).collect();
    let min_occupancy = occ.iter().map(|o| o[0].min(o[1])).fold(f64::INFINITY, f64::min);
    let k = occ.len().max(1) as f64;
    let pooled = [occ.iter().map(|o| o[0]).sum::<f64>() / k, occ.iter().map(|o| o[1]).sum::<f64>() / k];
    let diffs: Vec<f64> = terminal
        .paths
        .iter()
        .filter_map(|p| p.last())
        .map(|s| s.z[0] - s.z[1])
        .collect();
    let dip = dip_test(&diffs, dip_reps, &mut stream(subseed(seed, 0xD1B), 0));
    Ok(ToggleSummary {
        regime,
        lambda_cap: c.lambda_cap,
        rho_inv: 1.0 / c.rho,
        dissipative: is_dissipative(&c),
        chen_exponent: chen_exponent(&c),
        min_occupancy,
        occupancy: pooled,
        dip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_configs_land_near_caption_values() {
        let s = Regime::Strong.network().derived_constants().unwrap();
        assert!((s.lambda_cap - 0.6).abs() < 0.06 && s.lambda_cap < 0.66);
        assert!((1.0 / s.rho - 0.024).abs() < 1e-4);
        assert!(!is_dissipative(&s));
        let w = Regime::Weak.network().derived_constants().unwrap();
        assert!(w.lambda_cap < 4.1e-3 && w.lambda_cap > 3e-3);
        assert!((1.0 / w.rho - 0.046).abs() < 1e-3);
        assert!(is_dissipative(&w));
    }

    #[test]
    fn occupancy_counts_half_planes() {
        let p = vec![
            StateMP::new(vec![0.0; 2], vec![2.0, 1.0]),
            StateMP::new(vec![0.0; 2], vec![1.0, 2.0]),
            StateMP::new(vec![0.0; 2], vec![1.0, 1.0]),
            StateMP::new(vec![0.0; 2], vec![3.0, 1.0]),
        ];
        assert_eq!(occupancy(&p), [0.5, 0.25]);
    }
}
