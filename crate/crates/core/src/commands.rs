//! The command implementations behind the CLI. Each command builds its tables
//! and manifest in memory; [`Report::write`] puts them on disk.
//!
//! CSV headers (schema version [`SCHEMA_VERSION`]):
//!
//! | file | columns |
//! |------|---------|
//! | `constants.csv` | `name,value` |
//! | `trajectory.csv` | `run,time,kind,gene,jump,<state>` |
//! | `samples.csv` | `run,time,<state>` |
//! | `coupled.csv` | `run,time,kind,gene,draw,a_<state>,b_<state>,u,distance,gap` |
//! | `coupled_samples.csv` | `run,time,a_<state>,b_<state>,u,distance,gap` |
//! | `companion_runs.csv` | `run,t,u_alg1,u_thinning,n,n_before_t,n_prime,h,inverted_bands` |
//! | `companion_summary.csv` | `t,u0,p_star,mean_alg1,se_alg1,mean_thinning,se_thinning,mean_bound,ks_statistic,ks_critical,ks_pass` |
//! | `bounds.csv` | `t,w0,bound,chen_bound,dissipative` |
//! | `convergence.csv` | `t,lower,exact,exact_se,upper,upper_se,bound` |
//! | `pstar.csv` | `lambda,rho,u,p_star` |
//! | `toggle_<regime>.csv` | `run,time,y0,y1,z0,z1` |
//! | `toggle_summary.csv` | `regime,lambda,rho_inv,dissipative,chen_exponent,occupancy_above,occupancy_below,min_occupancy,dip,dip_p_value,rejects_unimodality` |
//!
//! `<state>` is `x0..x{n-1}` for the protein-only model and
//! `y0..y{n-1},z0..z{n-1}` for the mRNA-protein model. Integers are written
//! in decimal, floats with [`fmt_f64`], flags as `0`/`1`.

use std::path::Path;

use serde_json::json;

use crate::bounds::{bound_mp, bound_p, chen_bound, chen_exponent, is_dissipative, BoundInputs};
use crate::companion::{p_star, simulate_companion_alg1, simulate_companion_thinning, BandOrder, CompanionParams};
use crate::config::{network_to_json, parse_network_config, RunConfig, TimeGrid};
use crate::coupling::{simulate_coupled, CoupledLog, CoupledOptions, CoupledTrajectory, CouplingDistance, Coupled};
use crate::driver::{mean_se, run_indexed, Job};
use crate::error::{Error, Result};
use crate::metrics::{coupled_clouds_mp, coupled_clouds_p, empirical_w1_exact_se, ks_two_sample, w1_lower_marginals, MatchedClouds, MAX_EXACT_SAMPLES};
use crate::model::{DerivedConstants, NetworkSpec};
use crate::output::{fmt_f64, CsvTable, RunManifest};
pub use crate::output::SCHEMA_VERSION;
use crate::rng::subseed;
use crate::simulate::{simulate, BurstModel, EventLog, ModelKind, MrnaProteinModel, ProteinModel, SimOptions, StateMP, StateP};
use crate::toggle::{summarize, toggle_ensemble, Regime};

pub const COMMANDS: [&str; 8] = ["validate", "simulate", "couple", "companion", "bounds", "convergence", "pstar", "toggle-demo"];

/// Terminal ensemble size behind the toggle dip test.
pub const TOGGLE_DIP_SAMPLES: usize = 500;
pub const TOGGLE_DIP_REPS: usize = 200;
pub const KS_ALPHA: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct Report {
    pub tables: Vec<CsvTable>,
    pub manifest: RunManifest,
}

impl Report {
    fn new(cfg: &RunConfig) -> Self {
        Report {
            tables: Vec::new(),
            manifest: RunManifest::new(cfg),
        }
    }

    pub fn table(&self, name: &str) -> Option<&CsvTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes every table, then the manifest (atomically, last).
    pub fn write(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.manifest.outputs.clear();
        for t in &self.tables {
            self.manifest.outputs.push(t.write(dir)?);
        }
        self.manifest.write_atomic(dir)?;
        Ok(())
    }
}

/// Dispatches on `cfg.command`.
pub fn run_command(cfg: &RunConfig) -> Result<Report> {
    match cfg.command.as_str() {
        "validate" => cmd_validate(cfg),
        "simulate" => cmd_simulate(cfg),
        "couple" => cmd_couple(cfg),
        "companion" => cmd_companion(cfg),
        "bounds" => cmd_bounds(cfg),
        "convergence" => cmd_convergence(cfg),
        "pstar" => cmd_pstar(cfg),
        "toggle-demo" => cmd_toggle_demo(cfg),
        other => Err(Error::arg("command", format!("unknown command `{other}`; expected one of {}", COMMANDS.join(", ")))),
    }
}

/// Runs the command and writes its outputs to `cfg.out_dir`.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let mut report = run_command(cfg)?;
    report.write(&cfg.out_dir)?;
    Ok(report)
}

fn load_network(cfg: &RunConfig) -> Result<NetworkSpec> {
    match &cfg.network {
        Some(p) => parse_network_config(p),
        None => Err(Error::arg("config", format!("`{}` needs a network file (--config)", cfg.command))),
    }
}

fn attach_network(report: &mut Report, net: &NetworkSpec) -> Result<DerivedConstants> {
    let c = net.derived_constants()?;
    report.manifest.network = Some(network_to_json(net));
    report.manifest.constants = Some(c.clone());
    Ok(c)
}

fn job(cfg: &RunConfig, seed: u64) -> Job {
    Job::new(cfg.runs, seed, cfg.workers)
}

fn horizon_or(cfg: &RunConfig, default: f64) -> Result<f64> {
    let h = cfg
        .horizon
        .or_else(|| cfg.grid.as_ref().and_then(|g| g.times.last().copied()))
        .unwrap_or(default);
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::arg("horizon", format!("must be finite and >= 0, got {h}")));
    }
    if let Some(g) = &cfg.grid {
        if g.times.last().copied().unwrap_or(0.0) > h {
            return Err(Error::arg("grid", format!("grid `{}` runs past the horizon {h}", g.spec)));
        }
    }
    Ok(h)
}

fn grid_or(cfg: &RunConfig, default: &str) -> Result<TimeGrid> {
    match &cfg.grid {
        Some(g) => Ok(g.clone()),
        None => TimeGrid::parse(default),
    }
}

fn state_names(model: ModelKind, n: usize, prefix: &str) -> Vec<String> {
    match model {
        ModelKind::P => (0..n).map(|i| format!("{prefix}x{i}")).collect(),
        ModelKind::MP => (0..n)
            .map(|i| format!("{prefix}y{i}"))
            .chain((0..n).map(|i| format!("{prefix}z{i}")))
            .collect(),
    }
}

fn header(fixed: &[&str], parts: Vec<Vec<String>>) -> Vec<String> {
    fixed.iter().map(|s| s.to_string()).chain(parts.into_iter().flatten()).collect()
}

trait Coords {
    fn coords(&self) -> Vec<f64>;
}

impl Coords for StateP {
    fn coords(&self) -> Vec<f64> {
        self.x.clone()
    }
}

impl Coords for StateMP {
    fn coords(&self) -> Vec<f64> {
        self.y.iter().chain(&self.z).copied().collect()
    }
}

fn fmt_all(v: &[f64]) -> Vec<String> {
    v.iter().map(|&a| fmt_f64(a)).collect()
}

/// Unit mass on the first gene versus unit mass on the last gene (or zero
/// when there is a single gene).
fn default_inits(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    a[0] = 1.0;
    if n > 1 {
        b[n - 1] = 1.0;
    }
    (a, b)
}

fn state_p(v: &[f64], n: usize, field: &str) -> Result<StateP> {
    if v.len() != n {
        return Err(Error::arg(field, format!("expected {n} protein values, got {}", v.len())));
    }
    Ok(StateP::new(v.to_vec()))
}

/// `v` lists `y` then `z`; a vector of length `n` is read as `z` with `y = 0`.
fn state_mp(v: &[f64], n: usize, field: &str) -> Result<StateMP> {
    if v.len() == n {
        return Ok(StateMP::new(vec![0.0; n], v.to_vec()));
    }
    if v.len() != 2 * n {
        return Err(Error::arg(field, format!("expected {n} (z) or {} (y then z) values, got {}", 2 * n, v.len())));
    }
    Ok(StateMP::new(v[..n].to_vec(), v[n..].to_vec()))
}

fn inits(cfg: &RunConfig, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = default_inits(n);
    (cfg.init1.clone().unwrap_or(a), cfg.init2.clone().unwrap_or(b))
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Report> {
    let net = load_network(cfg)?;
    let mut report = Report::new(cfg);
    let c = attach_network(&mut report, &net)?;
    let mut t = CsvTable::new("constants.csv", "derived constants of the network", &["name", "value"]);
    for (k, v) in [
        ("r", c.r),
        ("lambda", c.lambda_cap),
        ("lambda_unweighted", c.lambda_unweighted),
        ("d1_min", c.d1_min),
        ("rho", c.rho),
        ("tau", c.tau),
        ("kon_lipschitz", c.kon_lipschitz()),
        ("chen_exponent", chen_exponent(&c)),
    ] {
        t.push(vec![k.to_string(), fmt_f64(v)]);
    }
    for (i, e) in c.eps.iter().enumerate() {
        t.push(vec![format!("eps{i}"), fmt_f64(*e)]);
    }
    report.tables.push(t);
    report.manifest.summary = json!({"valid": true, "genes": net.n(), "dissipative": is_dissipative(&c)});
    Ok(report)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report> {
    let net = load_network(cfg)?;
    let mut report = Report::new(cfg);
    let c = attach_network(&mut report, &net)?;
    let n = net.n();
    let horizon = horizon_or(cfg, 10.0 / c.d1_min)?;
    let init = cfg.init1.clone().unwrap_or_else(|| vec![0.0; n]);
    match cfg.model {
        ModelKind::P => {
            let s0 = state_p(&init, n, "init1")?;
            simulate_ensemble(cfg, &ProteinModel::new(&net), &s0, horizon, &mut report)?;
        }
        ModelKind::MP => {
            let s0 = state_mp(&init, n, "init1")?;
            simulate_ensemble(cfg, &MrnaProteinModel::new(&net), &s0, horizon, &mut report)?;
        }
    }
    Ok(report)
}

fn simulate_ensemble<M>(cfg: &RunConfig, model: &M, s0: &M::State, horizon: f64, report: &mut Report) -> Result<()>
where
    M: BurstModel + Sync,
    M::State: Coords + Send + Sync,
{
    let n = model.net().n();
    let names = state_names(M::KIND, n, "");
    let times = cfg.grid.as_ref().map(|g| g.times.clone()).unwrap_or_default();
    let opts = SimOptions {
        log: if cfg.log_rejected { EventLog::All } else { EventLog::Accepted },
        sample_times: times.clone(),
    };
    let runs = run_indexed(&job(cfg, cfg.seed), |_, rng| simulate(model, s0, horizon, &opts, rng))?;

    let mut traj = CsvTable::with_header(
        "trajectory.csv",
        "initial state and every logged event of each run",
        header(&["run", "time", "kind", "gene", "jump"], vec![names.clone()]),
    );
    let mut samples = CsvTable::with_header("samples.csv", "states on the time grid", header(&["run", "time"], vec![names]));
    let (mut bursts, mut proposals) = (0, 0);
    for (i, tr) in runs.iter().enumerate() {
        bursts += tr.bursts;
        proposals += tr.proposals;
        let mut row = vec![i.to_string(), fmt_f64(0.0), "initial".into(), String::new(), fmt_f64(0.0)];
        row.extend(fmt_all(&tr.initial.coords()));
        traj.push(row);
        for e in &tr.events {
            let mut row = vec![
                i.to_string(),
                fmt_f64(e.time),
                e.kind.label().into(),
                e.kind.gene().map(|g| g.to_string()).unwrap_or_default(),
                fmt_f64(e.jump),
            ];
            row.extend(fmt_all(&e.state_after.coords()));
            traj.push(row);
        }
        for (t, s) in tr.sample_times.iter().zip(&tr.samples) {
            let mut row = vec![i.to_string(), fmt_f64(*t)];
            row.extend(fmt_all(&s.coords()));
            samples.push(row);
        }
    }
    report.tables.push(traj);
    if !times.is_empty() {
        report.tables.push(samples);
    }
    report.manifest.count("bursts", bursts);
    report.manifest.count("proposals", proposals);
    report.manifest.summary = json!({"runs": cfg.runs, "horizon": horizon, "model": M::KIND});
    Ok(())
}

pub fn cmd_couple(cfg: &RunConfig) -> Result<Report> {
    let net = load_network(cfg)?;
    let mut report = Report::new(cfg);
    let c = attach_network(&mut report, &net)?;
    let n = net.n();
    let horizon = horizon_or(cfg, 10.0 / c.d1_min)?;
    let (a, b) = inits(cfg, n);
    match cfg.model {
        ModelKind::P => {
            let (s1, s2) = (state_p(&a, n, "init1")?, state_p(&b, n, "init2")?);
            couple_ensemble(cfg, &ProteinModel::new(&net), &c, &s1, &s2, horizon, &mut report)?;
        }
        ModelKind::MP => {
            let (s1, s2) = (state_mp(&a, n, "init1")?, state_mp(&b, n, "init2")?);
            couple_ensemble(cfg, &MrnaProteinModel::new(&net), &c, &s1, &s2, horizon, &mut report)?;
        }
    }
    Ok(report)
}

fn coupled_row<S: Coords>(s: &Coupled<S>, eps: &[f64]) -> Vec<String>
where
    Coupled<S>: CouplingDistance,
{
    let d = s.coupling_distance(eps);
    let mut row = fmt_all(&s.first.coords());
    row.extend(fmt_all(&s.second.coords()));
    row.extend([fmt_f64(s.u), fmt_f64(d), fmt_f64(s.u - d)]);
    row
}

fn couple_ensemble<M>(
    cfg: &RunConfig,
    model: &M,
    c: &DerivedConstants,
    s1: &M::State,
    s2: &M::State,
    horizon: f64,
    report: &mut Report,
) -> Result<()>
where
    M: BurstModel + Sync,
    M::State: Coords + Send + Sync,
    Coupled<M::State>: CouplingDistance,
{
    let n = model.net().n();
    let times = cfg.grid.as_ref().map(|g| g.times.clone()).unwrap_or_default();
    let opts = CoupledOptions {
        log: if cfg.log_rejected { CoupledLog::All } else { CoupledLog::Accepted },
        sample_times: times.clone(),
        ..CoupledOptions::default()
    };
    let runs: Vec<CoupledTrajectory<M::State>> =
        run_indexed(&job(cfg, cfg.seed), |_, rng| simulate_coupled(model, c, s1, s2, horizon, &opts, rng))?;

    let tail = vec!["u".to_string(), "distance".into(), "gap".into()];
    let pair = vec![state_names(M::KIND, n, "a_"), state_names(M::KIND, n, "b_"), tail];
    let mut events = CsvTable::with_header(
        "coupled.csv",
        "initial state, logged events and flow checkpoints of each coupled run",
        header(&["run", "time", "kind", "gene", "draw"], pair.clone()),
    );
    let mut samples = CsvTable::with_header(
        "coupled_samples.csv",
        "coupled states on the time grid",
        header(&["run", "time"], pair),
    );
    let mut gap = crate::coupling::GapSummary::default();
    let mut clamp = 0;
    for (i, tr) in runs.iter().enumerate() {
        let eps = &tr.eps;
        let mut rows: Vec<(f64, Vec<String>)> = Vec::new();
        let mut row = vec![i.to_string(), fmt_f64(0.0), "initial".into(), String::new(), fmt_f64(0.0)];
        row.extend(coupled_row(&tr.initial, eps));
        rows.push((0.0, row));
        for e in &tr.events {
            let mut row = vec![
                i.to_string(),
                fmt_f64(e.time),
                e.kind.label().into(),
                e.kind.gene().map(|g| g.to_string()).unwrap_or_default(),
                fmt_f64(e.draw),
            ];
            row.extend(coupled_row(&e.state_after, eps));
            rows.push((e.time, row));
        }
        for (t, s) in &tr.checkpoints {
            let mut row = vec![i.to_string(), fmt_f64(*t), "checkpoint".into(), String::new(), fmt_f64(0.0)];
            row.extend(coupled_row(s, eps));
            rows.push((*t, row));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, r) in rows {
            events.push(r);
        }
        for (t, s) in tr.sample_times.iter().zip(&tr.samples) {
            let mut row = vec![i.to_string(), fmt_f64(*t)];
            row.extend(coupled_row(s, eps));
            samples.push(row);
        }
        gap.merge(&crate::coupling::domination_gap(tr));
        clamp += tr.clamp_count;
        report.manifest.count("proposals", tr.counts.proposals);
        report.manifest.count("common", tr.counts.common);
        report.manifest.count("unilateral", tr.counts.unilateral);
        report.manifest.count("companion_only", tr.counts.companion_only);
    }
    report.tables.push(events);
    if !times.is_empty() {
        report.tables.push(samples);
    }
    report.manifest.clamp_count = clamp;
    report.manifest.anomaly("domination_violations", gap.violations);
    report.manifest.summary = json!({
        "runs": cfg.runs,
        "horizon": horizon,
        "model": M::KIND,
        "min_gap": gap.min_gap,
        "min_scaled_gap": gap.min_scaled_gap,
        "gap_checks": gap.checks,
    });
    Ok(())
}

fn companion_params(cfg: &RunConfig, report: &mut Report) -> Result<CompanionParams> {
    if let Some(o) = cfg.companion {
        return CompanionParams::new(o.r, o.lambda_cap, o.d1_min);
    }
    let net = load_network(cfg)?;
    let c = attach_network(report, &net)?;
    Ok(CompanionParams::from_constants(&c))
}

pub fn cmd_companion(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new(cfg);
    let p = companion_params(cfg, &mut report)?;
    let u0 = cfg.u0.unwrap_or(1.0);
    let times = match &cfg.grid {
        Some(g) => g.times.clone(),
        None => vec![horizon_or(cfg, 1.0)?],
    };
    let thin_seed = subseed(cfg.seed, 1);
    let alg1 = run_indexed(&job(cfg, cfg.seed), |_, rng| {
        times
            .iter()
            .map(|&t| simulate_companion_alg1(&p, u0, t, None, BandOrder::LawPreserving, rng))
            .collect::<Result<Vec<_>>>()
    })?;
    let thin = run_indexed(&job(cfg, thin_seed), |_, rng| {
        times.iter().map(|&t| simulate_companion_thinning(&p, u0, t, rng)).collect::<Result<Vec<_>>>()
    })?;

    let mut runs = CsvTable::new(
        "companion_runs.csv",
        "terminal values of both samplers with the decide-ahead bookkeeping",
        &["run", "t", "u_alg1", "u_thinning", "n", "n_before_t", "n_prime", "h", "inverted_bands"],
    );
    for (i, (a, b)) in alg1.iter().zip(&thin).enumerate() {
        for (k, &t) in times.iter().enumerate() {
            let r = &a[k];
            runs.push(vec![
                i.to_string(),
                fmt_f64(t),
                fmt_f64(r.terminal),
                fmt_f64(b[k]),
                r.n.to_string(),
                r.n_before_t.to_string(),
                r.n_prime.to_string(),
                fmt_f64(r.h),
                r.inverted_bands.to_string(),
            ]);
        }
    }
    let mut summary = CsvTable::new(
        "companion_summary.csv",
        "means, mean bound and two-sample KS comparison per time",
        &["t", "u0", "p_star", "mean_alg1", "se_alg1", "mean_thinning", "se_thinning", "mean_bound", "ks_statistic", "ks_critical", "ks_pass"],
    );
    let ps = p_star(&p, u0);
    for (k, &t) in times.iter().enumerate() {
        let ua: Vec<f64> = alg1.iter().map(|r| r[k].terminal).collect();
        let ub: Vec<f64> = thin.iter().map(|r| r[k]).collect();
        let (ma, sa) = mean_se(&ua);
        let (mb, sb) = mean_se(&ub);
        let ks = ks_two_sample(&ua, &ub, KS_ALPHA)?;
        summary.push(vec![
            fmt_f64(t),
            fmt_f64(u0),
            fmt_f64(ps),
            fmt_f64(ma),
            fmt_f64(sa),
            fmt_f64(mb),
            fmt_f64(sb),
            fmt_f64(u0.max(p.rho)),
            fmt_f64(ks.statistic),
            fmt_f64(ks.critical),
            (ks.pass as u8).to_string(),
        ]);
    }
    report.tables.push(runs);
    report.tables.push(summary);
    report.manifest.count("alg1_jumps", alg1.iter().flatten().map(|r| r.n_before_t).sum());
    report.manifest.summary = json!({"r": p.r, "lambda": p.lambda_cap, "d1_min": p.d1_min, "rho": p.rho, "tau": p.tau, "u0": u0, "p_star": ps});
    Ok(report)
}

fn initial_distance(cfg: &RunConfig, net: &NetworkSpec) -> Result<f64> {
    let n = net.n();
    let (a, b) = inits(cfg, n);
    Ok(match cfg.model {
        ModelKind::P => {
            let m = ProteinModel::new(net);
            m.coupling_distance(&state_p(&a, n, "init1")?, &state_p(&b, n, "init2")?)
        }
        ModelKind::MP => {
            let m = MrnaProteinModel::new(net);
            m.coupling_distance(&state_mp(&a, n, "init1")?, &state_mp(&b, n, "init2")?)
        }
    })
}

pub fn cmd_bounds(cfg: &RunConfig) -> Result<Report> {
    let net = load_network(cfg)?;
    let mut report = Report::new(cfg);
    let c = attach_network(&mut report, &net)?;
    let w0 = match cfg.w0 {
        Some(w) if w >= 0.0 && w.is_finite() => w,
        Some(w) => return Err(Error::arg("w0", format!("must be finite and >= 0, got {w}"))),
        None => initial_distance(cfg, &net)?,
    };
    let grid = grid_or(cfg, &format!("0:{}:101", 10.0 / c.d1_min))?;
    let dissipative = is_dissipative(&c);
    let mut t = CsvTable::new("bounds.csv", "Wasserstein bound and Gronwall comparison curve", &["t", "w0", "bound", "chen_bound", "dissipative"]);
    for &s in &grid.times {
        let b = match cfg.model {
            ModelKind::P => bound_p(s, w0, &c),
            ModelKind::MP => bound_mp(s, w0, &c),
        };
        t.push(vec![fmt_f64(s), fmt_f64(w0), fmt_f64(b), fmt_f64(chen_bound(s, w0, &c)), (dissipative as u8).to_string()]);
    }
    report.tables.push(t);
    let inputs = BoundInputs::new(w0, &c);
    report.manifest.summary = json!({
        "w0": w0,
        "p_star": inputs.p_star,
        "gamma": inputs.gamma,
        "chen_exponent": chen_exponent(&c),
        "dissipative": dissipative,
    });
    Ok(report)
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<Report> {
    let net = load_network(cfg)?;
    let mut report = Report::new(cfg);
    let c = attach_network(&mut report, &net)?;
    if cfg.runs < 2 || cfg.runs > MAX_EXACT_SAMPLES {
        return Err(Error::arg("runs", format!("convergence needs 2..={MAX_EXACT_SAMPLES} runs, got {}", cfg.runs)));
    }
    let n = net.n();
    let (a, b) = inits(cfg, n);
    let grid = grid_or(cfg, &format!("{}:{}:8:log", 0.1 / c.d1_min, 10.0 / c.d1_min))?;
    let jb = job(cfg, cfg.seed);
    let clouds = match cfg.model {
        ModelKind::P => coupled_clouds_p(&net, &state_p(&a, n, "init1")?, &state_p(&b, n, "init2")?, &grid.times, &jb)?,
        ModelKind::MP => coupled_clouds_mp(&net, &state_mp(&a, n, "init1")?, &state_mp(&b, n, "init2")?, &grid.times, &jb)?,
    };
    let w0 = initial_distance(cfg, &net)?;
    let rows = convergence_rows(&clouds, cfg.model, w0, &c)?;
    let mut t = CsvTable::new(
        "convergence.csv",
        "marginal lower bound, exact empirical W1, coupling upper bound and the closed-form bound",
        &["t", "lower", "exact", "exact_se", "upper", "upper_se", "bound"],
    );
    for r in &rows {
        t.push(vec![fmt_f64(r.t), fmt_f64(r.lower), fmt_f64(r.exact), fmt_f64(r.exact_se), fmt_f64(r.upper), fmt_f64(r.upper_se), fmt_f64(r.bound)]);
    }
    report.tables.push(t);
    report.manifest.count("coupled_events", clouds.events);
    report.manifest.clamp_count = clouds.clamp_count;
    report.manifest.anomaly("domination_violations", clouds.gap.violations);
    report.manifest.summary = json!({"w0": w0, "model": cfg.model, "runs": cfg.runs});
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub t: f64,
    pub lower: f64,
    pub exact: f64,
    pub exact_se: f64,
    pub upper: f64,
    pub upper_se: f64,
    pub bound: f64,
}

/// The sandwich `lower <= exact <= upper` and the closed-form bound at every
/// time of `clouds`.
pub fn convergence_rows(clouds: &MatchedClouds, model: ModelKind, w0: f64, c: &DerivedConstants) -> Result<Vec<ConvergenceRow>> {
    clouds
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let exact = empirical_w1_exact_se(&clouds.first[k], &clouds.second[k])?;
            let upper = clouds.upper(k)?;
            Ok(ConvergenceRow {
                t,
                lower: w1_lower_marginals(&clouds.first[k], &clouds.second[k])?,
                exact: exact.value,
                exact_se: exact.se,
                upper: upper.value,
                upper_se: upper.se,
                bound: match model {
                    ModelKind::P => bound_p(t, w0, c),
                    ModelKind::MP => bound_mp(t, w0, c),
                },
            })
        })
        .collect()
}

pub fn cmd_pstar(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new(cfg);
    let grid = grid_or(cfg, "0:5:101")?;
    let d1 = cfg.companion.map(|o| o.d1_min).unwrap_or(1.0);
    let mut t = CsvTable::new("pstar.csv", "p*(u) over the (lambda, rho) grid", &["lambda", "rho", "u", "p_star"]);
    for &lambda in &cfg.lambdas {
        for &rho in &cfg.rhos {
            let p = CompanionParams::new(rho * d1, lambda, d1)?;
            for &u in &grid.times {
                t.push(vec![fmt_f64(lambda), fmt_f64(rho), fmt_f64(u), fmt_f64(p_star(&p, u))]);
            }
        }
    }
    report.tables.push(t);
    report.manifest.summary = json!({"d1_min": d1});
    Ok(report)
}

pub fn cmd_toggle_demo(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new(cfg);
    let grid = grid_or(cfg, "0:200:2001")?;
    let horizon = *grid.times.last().unwrap();
    let mut summary = CsvTable::new(
        "toggle_summary.csv",
        "dissipativity predicate and bimodality summary per regime",
        &["regime", "lambda", "rho_inv", "dissipative", "chen_exponent", "occupancy_above", "occupancy_below", "min_occupancy", "dip", "dip_p_value", "rejects_unimodality"],
    );
    let mut json_summary = serde_json::Map::new();
    for (tag, regime) in [Regime::Strong, Regime::Weak].into_iter().enumerate() {
        let net = regime.network();
        let seed = subseed(cfg.seed, 10 + tag as u64);
        let paths = toggle_ensemble(&net, &grid.times, &job(cfg, seed))?;
        let terminal = toggle_ensemble(&net, &[horizon], &Job::new(TOGGLE_DIP_SAMPLES, subseed(seed, 1), cfg.workers))?;
        let s = summarize(regime, &net, &paths, &terminal, TOGGLE_DIP_REPS, seed)?;
        let mut t = CsvTable::new(
            &format!("toggle_{}.csv", regime.label()),
            "mRNA and protein paths on the time grid",
            &["run", "time", "y0", "y1", "z0", "z1"],
        );
        for (i, p) in paths.paths.iter().enumerate() {
            for (time, st) in paths.times.iter().zip(p) {
                t.push(vec![i.to_string(), fmt_f64(*time), fmt_f64(st.y[0]), fmt_f64(st.y[1]), fmt_f64(st.z[0]), fmt_f64(st.z[1])]);
            }
        }
        report.tables.push(t);
        summary.push(vec![
            regime.label().into(),
            fmt_f64(s.lambda_cap),
            fmt_f64(s.rho_inv),
            (s.dissipative as u8).to_string(),
            fmt_f64(s.chen_exponent),
            fmt_f64(s.occupancy[0]),
            fmt_f64(s.occupancy[1]),
            fmt_f64(s.min_occupancy),
            fmt_f64(s.dip.dip),
            fmt_f64(s.dip.p_value),
            (s.rejects_unimodality() as u8).to_string(),
        ]);
        report.manifest.count("bursts", paths.bursts + terminal.bursts);
        json_summary.insert(regime.label().into(), serde_json::to_value(&s)?);
        json_summary.insert(format!("{}_network", regime.label()), network_to_json(&net));
    }
    report.tables.push(summary);
    report.manifest.summary = serde_json::Value::Object(json_summary);
    Ok(report)
}
