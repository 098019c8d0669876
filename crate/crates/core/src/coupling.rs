//! Synchronizing couplings of two copies of the same model, carrying the
//! scalar companion value `u`.
//!
//! Gene `i` bursts in both copies at rate `kon_i(a) ^ kon_i(b)` with a shared
//! burst size, in one copy only at the positive/negative part of the rate
//! difference (the companion receives the same draw), and the companion also
//! bursts alone at rate `r (1 ^ Lambda u) - ||kon(a) - kon(b)||_1`. Between
//! events `u` decays at rate `d1_min`.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{DerivedConstants, NetworkSpec};
use crate::rng::StreamId;
use crate::simulate::{
    check_horizon, check_sample_times, BurstModel, ModelKind, MrnaProteinModel, ProteinModel,
    StateMP, StateP,
};

/// Two copies plus the companion value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupled<S> {
    pub first: S,
    pub second: S,
    pub u: f64,
}

pub type CoupledStateP = Coupled<StateP>;
pub type CoupledStateMP = Coupled<StateMP>;

impl<S: Clone> Coupled<S> {
    /// Starts the companion at the coupling distance, which is what the
    /// domination property needs at time zero.
    pub fn sanctioned<M: BurstModel<State = S>>(model: &M, first: S, second: S) -> Self {
        let u = model.coupling_distance(&first, &second);
        Coupled { first, second, u }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoupledEventKind {
    Common(usize),
    Unilateral1(usize),
    Unilateral2(usize),
    CompanionOnly,
    Rejected,
    Horizon,
}

impl CoupledEventKind {
    pub fn label(&self) -> &'static str {
        match self {
            CoupledEventKind::Common(_) => "common",
            CoupledEventKind::Unilateral1(_) => "unilateral1",
            CoupledEventKind::Unilateral2(_) => "unilateral2",
            CoupledEventKind::CompanionOnly => "companion",
            CoupledEventKind::Rejected => "rejected",
            CoupledEventKind::Horizon => "horizon",
        }
    }

    pub fn gene(&self) -> Option<usize> {
        match *self {
            CoupledEventKind::Common(i)
            | CoupledEventKind::Unilateral1(i)
            | CoupledEventKind::Unilateral2(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneRates {
    pub common: f64,
    pub uni1: f64,
    pub uni2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledRates {
    pub genes: Vec<GeneRates>,
    /// Companion-only rate after clamping at zero.
    pub companion_only: f64,
    /// `r (1 ^ Lambda u) - ||kon(a) - kon(b)||_1` before clamping.
    pub raw_companion_only: f64,
}

impl CoupledRates {
    pub fn clamped(&self) -> bool {
        self.raw_companion_only < 0.0
    }

    pub fn total(&self) -> f64 {
        self.genes
            .iter()
            .map(|g| g.common + g.uni1 + g.uni2)
            .sum::<f64>()
            + self.companion_only
    }

    /// Everything that moves `u`: unilateral rates plus the companion-only rate.
    pub fn companion_intensity(&self) -> f64 {
        self.genes.iter().map(|g| g.uni1 + g.uni2).sum::<f64>() + self.companion_only
    }
}

/// `r min(1, Lambda u)`.
pub fn companion_rate(constants: &DerivedConstants, u: f64) -> f64 {
    constants.r * (constants.lambda_cap * u).min(1.0)
}

/// Category rates given the two `kon` vectors.
pub fn coupled_rates_from_kon(
    constants: &DerivedConstants,
    kon1: &[f64],
    kon2: &[f64],
    u: f64,
) -> CoupledRates {
    let mut diff = 0.0;
    let genes = kon1
        .iter()
        .zip(kon2)
        .map(|(&a, &b)| {
            diff += (a - b).abs();
            GeneRates {
                common: a.min(b),
                uni1: (a - b).max(0.0),
                uni2: (b - a).max(0.0),
            }
        })
        .collect();
    let raw = companion_rate(constants, u) - diff;
    CoupledRates {
        genes,
        companion_only: raw.max(0.0),
        raw_companion_only: raw,
    }
}

/// Rates of the protein-only coupling at `(x1, x2, u)`.
pub fn coupled_rates_p(
    net: &NetworkSpec,
    constants: &DerivedConstants,
    x1: &StateP,
    x2: &StateP,
    u: f64,
) -> CoupledRates {
    coupled_rates_from_kon(constants, &net.kon(&x1.x), &net.kon(&x2.x), u)
}

/// Rates of the mRNA-protein coupling; `kon` is driven by the protein layer.
pub fn coupled_rates_mp(
    net: &NetworkSpec,
    constants: &DerivedConstants,
    s1: &StateMP,
    s2: &StateMP,
    u: f64,
) -> CoupledRates {
    coupled_rates_from_kon(constants, &net.kon(&s1.z), &net.kon(&s2.z), u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledEvent<S> {
    pub time: f64,
    pub kind: CoupledEventKind,
    /// The standard exponential draw shared by the affected coordinates.
    pub draw: f64,
    pub state_after: Coupled<S>,
}

/// Slack of the domination inequality `u - distance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    /// Minimum of `u - distance` over the checked instants.
    pub min_gap: f64,
    /// Minimum of `(u - distance) / (1 + u)`.
    pub min_scaled_gap: f64,
    pub checks: u64,
    /// Instants where `u - distance < -1e-9 (1 + u)`.
    pub violations: u64,
}

pub const DOMINATION_TOL: f64 = 1e-9;

impl Default for GapSummary {
    fn default() -> Self {
        GapSummary {
            min_gap: f64::INFINITY,
            min_scaled_gap: f64::INFINITY,
            checks: 0,
            violations: 0,
        }
    }
}

impl GapSummary {
    pub fn observe(&mut self, u: f64, distance: f64) {
        let gap = u - distance;
        self.min_gap = self.min_gap.min(gap);
        self.min_scaled_gap = self.min_scaled_gap.min(gap / (1.0 + u));
        self.checks += 1;
        if gap < -DOMINATION_TOL * (1.0 + u) {
            self.violations += 1;
        }
    }

    pub fn merge(&mut self, other: &GapSummary) {
        self.min_gap = self.min_gap.min(other.min_gap);
        self.min_scaled_gap = self.min_scaled_gap.min(other.min_scaled_gap);
        self.checks += other.checks;
        self.violations += other.violations;
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CoupledLog {
    /// Keep no per-event records (the online gap summary is still computed).
    Off,
    #[default]
    Accepted,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledOptions {
    pub log: CoupledLog,
    pub sample_times: Vec<f64>,
    /// Evenly spaced flow checkpoints in `(0, horizon]`.
    pub checkpoints: usize,
}

impl Default for CoupledOptions {
    fn default() -> Self {
        CoupledOptions {
            log: CoupledLog::Accepted,
            sample_times: Vec::new(),
            checkpoints: 32,
        }
    }
}

impl CoupledOptions {
    pub fn sampled(times: &[f64]) -> Self {
        CoupledOptions {
            log: CoupledLog::Off,
            sample_times: times.to_vec(),
            checkpoints: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledTrajectory<S> {
    pub model: ModelKind,
    pub initial: Coupled<S>,
    pub events: Vec<CoupledEvent<S>>,
    pub checkpoints: Vec<(f64, Coupled<S>)>,
    pub terminal: Coupled<S>,
    pub horizon: f64,
    pub sample_times: Vec<f64>,
    pub samples: Vec<Coupled<S>>,
    /// Domination slack at every accepted event, checkpoint and the horizon.
    pub online_gap: GapSummary,
    /// Proposals where the raw companion-only rate was negative.
    pub clamp_count: u64,
    pub counts: EventCounts,
    pub stream: Option<StreamId>,
    /// Weights of the mRNA layer in the coupling distance (empty for P).
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventCounts {
    pub proposals: u64,
    pub common: u64,
    pub unilateral: u64,
    pub companion_only: u64,
}

impl EventCounts {
    pub fn accepted(&self) -> u64 {
        self.common + self.unilateral + self.companion_only
    }
}

/// Runs the coupling from a sanctioned start.
pub fn simulate_coupled<M: BurstModel, R: Rng + ?Sized>(
    model: &M,
    constants: &DerivedConstants,
    first: &M::State,
    second: &M::State,
    horizon: f64,
    opts: &CoupledOptions,
    rng: &mut R,
) -> Result<CoupledTrajectory<M::State>> {
    check_horizon(horizon)?;
    check_sample_times(&opts.sample_times, horizon)?;
    model.check_state(first)?;
    model.check_state(second)?;
    let net = model.net();
    let n = net.n();
    let d1_min = constants.d1_min;
    let majorant = net.max_total_rate() + constants.r;
    let init = Coupled::sanctioned(model, first.clone(), second.clone());

    let checkpoint_times: Vec<f64> = (1..=opts.checkpoints)
        .map(|k| horizon * k as f64 / opts.checkpoints as f64)
        .collect();

    let mut anchor = init.clone();
    let mut t_anchor = 0.0;
    let mut cur = init.clone();
    let mut kon1 = vec![0.0; n];
    let mut kon2 = vec![0.0; n];
    let mut t = 0.0;

    let mut gap = GapSummary::default();
    gap.observe(init.u, model.coupling_distance(&init.first, &init.second));
    let mut events = Vec::new();
    let mut checkpoints = Vec::new();
    let mut samples = Vec::with_capacity(opts.sample_times.len());
    let (mut next_sample, mut next_check) = (0, 0);
    let mut counts = EventCounts::default();
    let mut clamp_count = 0;

    let flow_to = |anchor: &Coupled<M::State>, dt: f64, out: &mut Coupled<M::State>| {
        model.flow_into(&anchor.first, dt, &mut out.first);
        model.flow_into(&anchor.second, dt, &mut out.second);
        out.u = anchor.u * (-d1_min * dt).exp();
    };

    loop {
        let t_next = if majorant > 0.0 {
            let e: f64 = rng.sample(Exp1);
            t + e / majorant
        } else {
            f64::INFINITY
        };
        while next_sample < opts.sample_times.len() && opts.sample_times[next_sample] < t_next {
            let ts = opts.sample_times[next_sample];
            let mut s = anchor.clone();
            flow_to(&anchor, ts - t_anchor, &mut s);
            samples.push(s);
            next_sample += 1;
        }
        while next_check < checkpoint_times.len() && checkpoint_times[next_check] < t_next {
            let tc = checkpoint_times[next_check];
            let mut s = anchor.clone();
            flow_to(&anchor, tc - t_anchor, &mut s);
            gap.observe(s.u, model.coupling_distance(&s.first, &s.second));
            if opts.log != CoupledLog::Off {
                checkpoints.push((tc, s));
            }
            next_check += 1;
        }
        if t_next > horizon {
            break;
        }
        t = t_next;
        counts.proposals += 1;
        flow_to(&anchor, t - t_anchor, &mut cur);
        net.kon_into(model.drive(&cur.first), &mut kon1);
        net.kon_into(model.drive(&cur.second), &mut kon2);
        let rates = coupled_rates_from_kon(constants, &kon1, &kon2, cur.u);
        if rates.clamped() {
            clamp_count += 1;
        }

        let v = rng.random::<f64>() * majorant;
        let kind = select(&rates, v);
        if kind == CoupledEventKind::Rejected {
            if opts.log == CoupledLog::All {
                events.push(CoupledEvent {
                    time: t,
                    kind,
                    draw: 0.0,
                    state_after: cur.clone(),
                });
            }
            continue;
        }
        let e: f64 = rng.sample(Exp1);
        match kind {
            CoupledEventKind::Common(i) => {
                model.burst(&mut cur.first, i, e);
                model.burst(&mut cur.second, i, e);
                counts.common += 1;
            }
            CoupledEventKind::Unilateral1(i) => {
                model.burst(&mut cur.first, i, e);
                cur.u += e;
                counts.unilateral += 1;
            }
            CoupledEventKind::Unilateral2(i) => {
                model.burst(&mut cur.second, i, e);
                cur.u += e;
                counts.unilateral += 1;
            }
            CoupledEventKind::CompanionOnly => {
                cur.u += e;
                counts.companion_only += 1;
            }
            CoupledEventKind::Rejected | CoupledEventKind::Horizon => unreachable!(),
        }
        anchor.clone_from(&cur);
        t_anchor = t;
        gap.observe(cur.u, model.coupling_distance(&cur.first, &cur.second));
        if opts.log != CoupledLog::Off {
            events.push(CoupledEvent {
                time: t,
                kind,
                draw: e,
                state_after: cur.clone(),
            });
        }
    }

    let mut terminal = anchor.clone();
    flow_to(&anchor, horizon - t_anchor, &mut terminal);
    gap.observe(terminal.u, model.coupling_distance(&terminal.first, &terminal.second));
    if opts.log != CoupledLog::Off {
        events.push(CoupledEvent {
            time: horizon,
            kind: CoupledEventKind::Horizon,
            draw: 0.0,
            state_after: terminal.clone(),
        });
    }

    Ok(CoupledTrajectory {
        model: M::KIND,
        initial: init,
        events,
        checkpoints,
        terminal,
        horizon,
        sample_times: opts.sample_times.clone(),
        samples,
        online_gap: gap,
        clamp_count,
        counts,
        stream: None,
        eps: if M::KIND == ModelKind::MP { net.eps() } else { Vec::new() },
    })
}

fn select(rates: &CoupledRates, v: f64) -> CoupledEventKind {
    let mut acc = 0.0;
    for (i, g) in rates.genes.iter().enumerate() {
        acc += g.common;
        if v < acc {
            return CoupledEventKind::Common(i);
        }
        acc += g.uni1;
        if v < acc {
            return CoupledEventKind::Unilateral1(i);
        }
        acc += g.uni2;
        if v < acc {
            return CoupledEventKind::Unilateral2(i);
        }
    }
    acc += rates.companion_only;
    if v < acc {
        return CoupledEventKind::CompanionOnly;
    }
    CoupledEventKind::Rejected
}

/// Protein-only coupling started at `u = ||x1 - x2||_1`.
pub fn simulate_coupled_p<R: Rng + ?Sized>(
    net: &NetworkSpec,
    x1: &StateP,
    x2: &StateP,
    horizon: f64,
    opts: &CoupledOptions,
    rng: &mut R,
) -> Result<CoupledTrajectory<StateP>> {
    let constants = net.derived_constants()?;
    simulate_coupled(&ProteinModel::new(net), &constants, x1, x2, horizon, opts, rng)
}

/// mRNA-protein coupling started at `u = ||z1 - z2||_1 + ||y1 - y2||_eps`.
pub fn simulate_coupled_mp<R: Rng + ?Sized>(
    net: &NetworkSpec,
    s1: &StateMP,
    s2: &StateMP,
    horizon: f64,
    opts: &CoupledOptions,
    rng: &mut R,
) -> Result<CoupledTrajectory<StateMP>> {
    let constants = net.derived_constants()?;
    simulate_coupled(&MrnaProteinModel::new(net), &constants, s1, s2, horizon, opts, rng)
}

/// Distance the companion dominates, for a coupled state of either model.
pub trait CouplingDistance {
    fn coupling_distance(&self, eps: &[f64]) -> f64;
}

impl CouplingDistance for Coupled<StateP> {
    fn coupling_distance(&self, _eps: &[f64]) -> f64 {
        crate::simulate::l1(&self.first.x, &self.second.x)
    }
}

impl CouplingDistance for Coupled<StateMP> {
    fn coupling_distance(&self, eps: &[f64]) -> f64 {
        let weighted: f64 = self
            .first
            .y
            .iter()
            .zip(&self.second.y)
            .zip(eps)
            .map(|((a, b), e)| e * (a - b).abs())
            .sum();
        crate::simulate::l1(&self.first.z, &self.second.z) + weighted
    }
}

/// Domination slack recomputed from the recorded snapshots (initial state,
/// events, checkpoints, terminal), merged with the online summary.
pub fn domination_gap<S>(traj: &CoupledTrajectory<S>) -> GapSummary
where
    Coupled<S>: CouplingDistance,
{
    let mut g = GapSummary::default();
    let mut look = |s: &Coupled<S>| g.observe(s.u, s.coupling_distance(&traj.eps));
    look(&traj.initial);
    for e in &traj.events {
        look(&e.state_after);
    }
    for (_, s) in &traj.checkpoints {
        look(s);
    }
    look(&traj.terminal);
    g.merge(&traj.online_gap);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GeneParams, RegulationSpec};
    use crate::rng::stream;
    use crate::simulate::{simulate_mp, simulate_p, SimOptions};

    fn toggle(a: f64) -> NetworkSpec {
        let g = GeneParams {
            d0: 4.0,
            d1: 1.0,
            k0: 0.2,
            k1: 3.0,
            b: 1.0,
            s1: 1.0,
            ell: 0.0,
        };
        let mut g2 = g;
        g2.d1 = 1.5;
        g2.d0 = 3.0;
        NetworkSpec::new(
            vec![g, g2],
            RegulationSpec {
                theta: vec![vec![0.0, -a], vec![-a, 0.0]],
                beta: vec![2.0, 2.0],
            },
        )
        .unwrap()
    }

    #[test]
    fn rates_examples() {
        let net = toggle(1.0);
        let c = net.derived_constants().unwrap();
        let x = StateP::new(vec![1.0, 2.0]);
        let rates = coupled_rates_p(&net, &c, &x, &x, 0.4);
        assert!(rates.genes.iter().all(|g| g.uni1 == 0.0 && g.uni2 == 0.0));
        assert_eq!(rates.companion_only, companion_rate(&c, 0.4));

        let r = coupled_rates_from_kon(&c, &[0.7], &[0.3], 10.0);
        assert!((r.genes[0].common - 0.3).abs() < 1e-15);
        assert!((r.genes[0].uni1 - 0.4).abs() < 1e-15);
        assert_eq!(r.genes[0].uni2, 0.0);
    }

    proptest::proptest! {
        #[test]
        fn rate_bookkeeping(x in proptest::collection::vec(0.0..20.0f64, 4), extra in 0.0..5.0f64) {
            let net = toggle(1.3);
            let c = net.derived_constants().unwrap();
            let x1 = StateP::new(x[..2].to_vec());
            let x2 = StateP::new(x[2..].to_vec());
            let u = crate::simulate::l1(&x1.x, &x2.x) + extra;
            let rates = coupled_rates_p(&net, &c, &x1, &x2, u);
            // dominated start: no clamp
            proptest::prop_assert!(rates.raw_companion_only >= -1e-12);
            let k1 = net.kon(&x1.x);
            let k2 = net.kon(&x2.x);
            let mut max_sum = 0.0;
            for (i, g) in rates.genes.iter().enumerate() {
                proptest::prop_assert!(g.common >= 0.0 && g.uni1 >= 0.0 && g.uni2 >= 0.0);
                proptest::prop_assert!((g.common + g.uni1 + g.uni2 - k1[i].max(k2[i])).abs() < 1e-12);
                proptest::prop_assert!((g.common + g.uni1 - k1[i]).abs() < 1e-12);
                proptest::prop_assert!((g.common + g.uni2 - k2[i]).abs() < 1e-12);
                max_sum += k1[i].max(k2[i]);
            }
            proptest::prop_assert!((rates.total() - max_sum - rates.companion_only).abs() < 1e-12);
            proptest::prop_assert!((rates.companion_intensity() - companion_rate(&c, u)).abs() < 1e-12);
            proptest::prop_assert!(rates.total() <= net.max_total_rate() + c.r + 1e-12);
        }
    }

    #[test]
    fn identical_starts_stay_identical() {
        let net = toggle(2.0);
        let x = StateP::new(vec![3.0, 0.5]);
        let tr = simulate_coupled_p(&net, &x, &x, 20.0, &CoupledOptions::default(), &mut stream(1, 1)).unwrap();
        assert!(tr.counts.common > 0);
        assert_eq!(tr.counts.unilateral, 0);
        for e in &tr.events {
            assert_eq!(e.state_after.first, e.state_after.second);
        }
        let g = domination_gap(&tr);
        assert!(g.holds() && g.min_gap >= 0.0);

        let s = StateMP::new(vec![1.0, 0.0], vec![2.0, 0.1]);
        let tr = simulate_coupled_mp(&net, &s, &s, 20.0, &CoupledOptions::default(), &mut stream(1, 2)).unwrap();
        assert_eq!(tr.terminal.first, tr.terminal.second);
        assert_eq!(tr.counts.unilateral, 0);
    }

    #[test]
    fn domination_holds_along_paths() {
        let net = toggle(2.5);
        for i in 0..200 {
            let x1 = StateP::new(vec![5.0, 0.0]);
            let x2 = StateP::new(vec![0.0, 4.0]);
            let tr = simulate_coupled_p(&net, &x1, &x2, 10.0, &CoupledOptions::default(), &mut stream(5, i)).unwrap();
            let g = domination_gap(&tr);
            assert!(g.holds(), "run {i}: {g:?}");
            assert_eq!(tr.clamp_count, 0);
            // the horizon record duplicates the terminal state
            assert_eq!(g.checks, tr.online_gap.checks * 2 + 1);

            let s1 = StateMP::new(vec![2.0, 0.0], vec![5.0, 0.0]);
            let s2 = StateMP::new(vec![0.0, 3.0], vec![0.0, 4.0]);
            let tr = simulate_coupled_mp(&net, &s1, &s2, 10.0, &CoupledOptions::default(), &mut stream(6, i)).unwrap();
            assert!(domination_gap(&tr).holds());
            assert_eq!(tr.clamp_count, 0);
        }
    }

    #[test]
    fn distance_contracts_between_bursts() {
        let net = toggle(1.0);
        let m = ProteinModel::new(&net);
        let a = StateP::new(vec![4.0, 1.0]);
        let b = StateP::new(vec![1.0, 3.0]);
        let mut last = m.coupling_distance(&a, &b);
        for k in 1..50 {
            let dt = k as f64 * 0.1;
            let d = m.coupling_distance(&m.flow(&a, dt), &m.flow(&b, dt));
            assert!(d <= last + 1e-15);
            last = d;
        }
        let m = MrnaProteinModel::new(&net);
        let a = StateMP::new(vec![4.0, 0.0], vec![0.0, 1.0]);
        let b = StateMP::new(vec![0.0, 2.0], vec![3.0, 0.0]);
        let d0 = m.coupling_distance(&a, &b);
        for k in 1..50 {
            let dt = k as f64 * 0.1;
            let d = m.coupling_distance(&m.flow(&a, dt), &m.flow(&b, dt));
            assert!(d <= d0 * (-net.derived_constants().unwrap().d1_min * dt).exp() + 1e-12);
        }
    }

    #[test]
    fn coupled_marginal_matches_standalone() {
        let net = toggle(1.5);
        let times = [0.5, 1.0, 2.0];
        let runs = 4000;
        let x1 = StateP::new(vec![2.0, 0.0]);
        let x2 = StateP::new(vec![0.0, 2.0]);
        let mut coupled = vec![vec![0.0; runs]; 3];
        let mut alone = vec![vec![0.0; runs]; 3];
        for i in 0..runs {
            let tr = simulate_coupled_p(&net, &x1, &x2, 2.0, &CoupledOptions::sampled(&times), &mut stream(8, i as u64)).unwrap();
            let s = simulate_p(&net, &x1, 2.0, &SimOptions::sampled(&times), &mut stream(9, i as u64)).unwrap();
            for k in 0..3 {
                coupled[k][i] = tr.samples[k].first.x[0];
                alone[k][i] = s.samples[k].x[0];
            }
        }
        for k in 0..3 {
            let (m1, v1) = mean_var(&coupled[k]);
            let (m2, v2) = mean_var(&alone[k]);
            let se = ((v1 + v2) / runs as f64).sqrt();
            assert!((m1 - m2).abs() < 3.0 * se, "t = {}: {m1} vs {m2}", times[k]);
        }

        let s1 = StateMP::new(vec![1.0, 0.0], vec![2.0, 0.0]);
        let s2 = StateMP::new(vec![0.0, 1.0], vec![0.0, 2.0]);
        for i in 0..runs {
            let tr = simulate_coupled_mp(&net, &s1, &s2, 2.0, &CoupledOptions::sampled(&times), &mut stream(18, i as u64)).unwrap();
            let s = simulate_mp(&net, &s1, 2.0, &SimOptions::sampled(&times), &mut stream(19, i as u64)).unwrap();
            for k in 0..3 {
                coupled[k][i] = tr.samples[k].first.z[0];
                alone[k][i] = s.samples[k].z[0];
            }
        }
        for k in 0..3 {
            let (m1, v1) = mean_var(&coupled[k]);
            let (m2, v2) = mean_var(&alone[k]);
            let se = ((v1 + v2) / runs as f64).sqrt();
            assert!((m1 - m2).abs() < 3.0 * se, "MP t = {}: {m1} vs {m2}", times[k]);
        }
    }

    fn mean_var(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (m, v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0))
    }
}
