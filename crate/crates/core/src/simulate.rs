//! Exact event-driven simulation of the protein-only model (P) and the
//! mRNA-protein model (MP).
//!
//! Both use thinning against the constant majorant `sum_i k1_i`. The state is
//! kept as an anchor (the post-jump state of the last accepted burst) and the
//! analytic flow is always evaluated from that anchor, so replaying a logged
//! trajectory reproduces every recorded state bit for bit.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NetworkSpec;
use crate::rng::StreamId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Protein-only model.
    P,
    /// mRNA-protein model.
    MP,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" => Ok(ModelKind::P),
            "mp" => Ok(ModelKind::MP),
            other => Err(Error::arg("model", format!("expected `p` or `mp`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateP {
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMP {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl StateP {
    pub fn new(x: Vec<f64>) -> Self {
        StateP { x }
    }
}

impl StateMP {
    pub fn new(y: Vec<f64>, z: Vec<f64>) -> Self {
        StateMP { y, z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Burst(usize),
    Rejected,
    Horizon,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::Burst(_) => "burst",
            EventKind::Rejected => "rejected",
            EventKind::Horizon => "horizon",
        }
    }

    pub fn gene(&self) -> Option<usize> {
        match *self {
            EventKind::Burst(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord<S> {
    pub time: f64,
    pub kind: EventKind,
    /// Amount added to the bursting coordinate (0 for non-burst records).
    pub jump: f64,
    pub state_after: S,
}

/// What a trajectory keeps besides its terminal state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EventLog {
    /// Terminal state and requested samples only.
    Off,
    /// Accepted bursts plus the horizon record.
    #[default]
    Accepted,
    /// Also rejected thinning proposals (debug).
    All,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub log: EventLog,
    /// Sorted times in `[0, horizon]` at which the state is sampled.
    pub sample_times: Vec<f64>,
}

impl SimOptions {
    pub fn quiet() -> Self {
        SimOptions {
            log: EventLog::Off,
            sample_times: Vec::new(),
        }
    }

    pub fn sampled(times: &[f64]) -> Self {
        SimOptions {
            log: EventLog::Off,
            sample_times: times.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub model: ModelKind,
    pub initial: S,
    pub events: Vec<EventRecord<S>>,
    pub terminal: S,
    pub horizon: f64,
    pub sample_times: Vec<f64>,
    pub samples: Vec<S>,
    pub bursts: u64,
    pub proposals: u64,
    pub stream: Option<StreamId>,
}

/// One copy of a bursty PDMP, seen through the operations the thinning loop needs.
pub trait BurstModel {
    type State: Clone;
    const KIND: ModelKind;

    fn net(&self) -> &NetworkSpec;
    fn flow_into(&self, s: &Self::State, dt: f64, out: &mut Self::State);
    /// Protein vector that drives `kon`.
    fn drive<'s>(&self, s: &'s Self::State) -> &'s [f64];
    /// Adds a burst built from a standard exponential draw; returns the amount added.
    fn burst(&self, s: &mut Self::State, gene: usize, e: f64) -> f64;
    fn check_state(&self, s: &Self::State) -> Result<()>;
    /// Distance the companion value must dominate in a synchronizing coupling.
    fn coupling_distance(&self, a: &Self::State, b: &Self::State) -> f64;

    fn flow(&self, s: &Self::State, dt: f64) -> Self::State {
        let mut out = s.clone();
        self.flow_into(s, dt, &mut out);
        out
    }
}

pub struct ProteinModel<'a> {
    net: &'a NetworkSpec,
}

pub struct MrnaProteinModel<'a> {
    net: &'a NetworkSpec,
    eps: Vec<f64>,
}

impl<'a> ProteinModel<'a> {
    pub fn new(net: &'a NetworkSpec) -> Self {
        ProteinModel { net }
    }
}

impl<'a> MrnaProteinModel<'a> {
    pub fn new(net: &'a NetworkSpec) -> Self {
        MrnaProteinModel {
            net,
            eps: net.eps(),
        }
    }
}

fn check_nonneg(name: &str, v: &[f64]) -> Result<()> {
    if let Some(i) = v.iter().position(|a| !(*a >= 0.0) || !a.is_finite()) {
        return Err(Error::arg(name, format!("coordinate {i} = {} must be finite and >= 0", v[i])));
    }
    Ok(())
}

impl BurstModel for ProteinModel<'_> {
    type State = StateP;
    const KIND: ModelKind = ModelKind::P;

    fn net(&self) -> &NetworkSpec {
        self.net
    }

    fn flow_into(&self, s: &StateP, dt: f64, out: &mut StateP) {
        for ((o, x), g) in out.x.iter_mut().zip(&s.x).zip(&self.net.genes) {
            *o = x * (-g.d1 * dt).exp();
        }
    }

    fn drive<'s>(&self, s: &'s StateP) -> &'s [f64] {
        &s.x
    }

    fn burst(&self, s: &mut StateP, gene: usize, e: f64) -> f64 {
        s.x[gene] += e;
        e
    }

    fn check_state(&self, s: &StateP) -> Result<()> {
        self.net.check_len(s.x.len())?;
        check_nonneg("x", &s.x)
    }

    fn coupling_distance(&self, a: &StateP, b: &StateP) -> f64 {
        l1(&a.x, &b.x)
    }
}

impl BurstModel for MrnaProteinModel<'_> {
    type State = StateMP;
    const KIND: ModelKind = ModelKind::MP;

    fn net(&self) -> &NetworkSpec {
        self.net
    }

    fn flow_into(&self, s: &StateMP, dt: f64, out: &mut StateMP) {
        for (i, g) in self.net.genes.iter().enumerate() {
            let e0 = (-g.d0 * dt).exp();
            let e1 = (-g.d1 * dt).exp();
            out.y[i] = s.y[i] * e0;
            out.z[i] = s.z[i] * e1 + self.eps[i] * s.y[i] * (e1 - e0);
        }
    }

    fn drive<'s>(&self, s: &'s StateMP) -> &'s [f64] {
        &s.z
    }

    fn burst(&self, s: &mut StateMP, gene: usize, e: f64) -> f64 {
        let jump = e / self.eps[gene];
        s.y[gene] += jump;
        jump
    }

    fn check_state(&self, s: &StateMP) -> Result<()> {
        self.net.check_len(s.y.len())?;
        self.net.check_len(s.z.len())?;
        check_nonneg("y", &s.y)?;
        check_nonneg("z", &s.z)
    }

    /// `||z1 - z2||_1 + sum_i eps_i |y1_i - y2_i|`.
    fn coupling_distance(&self, a: &StateMP, b: &StateMP) -> f64 {
        let weighted: f64 = a
            .y
            .iter()
            .zip(&b.y)
            .zip(&self.eps)
            .map(|((p, q), e)| e * (p - q).abs())
            .sum();
        l1(&a.z, &b.z) + weighted
    }
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum()
}

/// `x_i exp(-d1_i dt)` componentwise.
pub fn flow_p(x: &StateP, dt: f64, net: &NetworkSpec) -> StateP {
    ProteinModel::new(net).flow(x, dt)
}

/// Analytic solution of `y' = -d0 y`, `z' = d1 (y - z)`.
pub fn flow_mp(s: &StateMP, dt: f64, net: &NetworkSpec) -> StateMP {
    MrnaProteinModel::new(net).flow(s, dt)
}

/// `scale` times a standard exponential draw.
pub fn sample_burst<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    debug_assert!(scale > 0.0);
    let e: f64 = rng.sample(Exp1);
    scale * e
}

pub(crate) fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::NegativeHorizon(horizon));
    }
    Ok(())
}

pub(crate) fn check_sample_times(times: &[f64], horizon: f64) -> Result<()> {
    for w in times.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::arg("sample_times", "must be sorted"));
        }
    }
    if let (Some(first), Some(last)) = (times.first(), times.last()) {
        if *first < 0.0 || *last > horizon {
            return Err(Error::arg("sample_times", format!("must lie in [0, {horizon}]")));
        }
    }
    Ok(())
}

/// Runs the thinning loop for one copy of `model`.
pub fn simulate<M: BurstModel, R: Rng + ?Sized>(
    model: &M,
    s0: &M::State,
    horizon: f64,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<Trajectory<M::State>> {
    check_horizon(horizon)?;
    check_sample_times(&opts.sample_times, horizon)?;
    model.check_state(s0)?;
    let net = model.net();
    let majorant = net.max_total_rate();
    let mut kon = vec![0.0; net.n()];

    let mut anchor = s0.clone();
    let mut t_anchor = 0.0;
    let mut cur = s0.clone();
    let mut t = 0.0;
    let mut events = Vec::new();
    let mut samples = Vec::with_capacity(opts.sample_times.len());
    let mut next_sample = 0;
    let mut bursts = 0;
    let mut proposals = 0;

    loop {
        let t_next = if majorant > 0.0 {
            let e: f64 = rng.sample(Exp1);
            t + e / majorant
        } else {
            f64::INFINITY
        };
        while next_sample < opts.sample_times.len() && opts.sample_times[next_sample] < t_next {
            let ts = opts.sample_times[next_sample];
            samples.push(model.flow(&anchor, ts - t_anchor));
            next_sample += 1;
        }
        if t_next > horizon {
            break;
        }
        t = t_next;
        proposals += 1;
        model.flow_into(&anchor, t - t_anchor, &mut cur);
        net.kon_into(model.drive(&cur), &mut kon);

        let v = rng.random::<f64>() * majorant;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, k) in kon.iter().enumerate() {
            acc += k;
            if v < acc {
                chosen = Some(i);
                break;
            }
        }
        match chosen {
            Some(i) => {
                let jump = model.burst(&mut cur, i, rng.sample(Exp1));
                bursts += 1;
                anchor.clone_from(&cur);
                t_anchor = t;
                if opts.log != EventLog::Off {
                    events.push(EventRecord {
                        time: t,
                        kind: EventKind::Burst(i),
                        jump,
                        state_after: cur.clone(),
                    });
                }
            }
            None => {
                if opts.log == EventLog::All {
                    events.push(EventRecord {
                        time: t,
                        kind: EventKind::Rejected,
                        jump: 0.0,
                        state_after: cur.clone(),
                    });
                }
            }
        }
    }

    let terminal = model.flow(&anchor, horizon - t_anchor);
    if opts.log != EventLog::Off {
        events.push(EventRecord {
            time: horizon,
            kind: EventKind::Horizon,
            jump: 0.0,
            state_after: terminal.clone(),
        });
    }
    Ok(Trajectory {
        model: M::KIND,
        initial: s0.clone(),
        events,
        terminal,
        horizon,
        sample_times: opts.sample_times.clone(),
        samples,
        bursts,
        proposals,
        stream: None,
    })
}

/// Exact path of the protein-only model up to `horizon`.
pub fn simulate_p<R: Rng + ?Sized>(
    net: &NetworkSpec,
    x0: &StateP,
    horizon: f64,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<Trajectory<StateP>> {
    net.validate().into_result()?;
    simulate(&ProteinModel::new(net), x0, horizon, opts, rng)
}

/// Exact path of the mRNA-protein model up to `horizon`.
pub fn simulate_mp<R: Rng + ?Sized>(
    net: &NetworkSpec,
    s0: &StateMP,
    horizon: f64,
    opts: &SimOptions,
    rng: &mut R,
) -> Result<Trajectory<StateMP>> {
    net.validate().into_result()?;
    simulate(&MrnaProteinModel::new(net), s0, horizon, opts, rng)
}

/// Largest absolute discrepancy between the recorded states and a replay of
/// flows and jumps from the initial state.
pub fn replay_error<M: BurstModel>(model: &M, traj: &Trajectory<M::State>) -> f64
where
    M::State: AsCoords,
{
    let mut anchor = traj.initial.clone();
    let mut t_anchor = 0.0;
    let mut worst: f64 = 0.0;
    for ev in &traj.events {
        let mut s = model.flow(&anchor, ev.time - t_anchor);
        if let EventKind::Burst(i) = ev.kind {
            s.add_to_burst_coord(i, ev.jump);
            anchor = s.clone();
            t_anchor = ev.time;
        }
        worst = worst.max(s.max_abs_diff(&ev.state_after));
    }
    worst
}

/// Coordinate access used by replay checks and CSV emission.
pub trait AsCoords {
    fn coords(&self) -> Vec<f64>;
    fn add_to_burst_coord(&mut self, gene: usize, amount: f64);
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl AsCoords for StateP {
    fn coords(&self) -> Vec<f64> {
        self.x.clone()
    }

    fn add_to_burst_coord(&mut self, gene: usize, amount: f64) {
        self.x[gene] += amount;
    }
}

impl AsCoords for StateMP {
    fn coords(&self) -> Vec<f64> {
        self.y.iter().chain(&self.z).copied().collect()
    }

    fn add_to_burst_coord(&mut self, gene: usize, amount: f64) {
        self.y[gene] += amount;
    }
}
