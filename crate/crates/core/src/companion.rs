//! The one-dimensional companion process `U`: it decays at rate `d1_min` and
//! jumps by `Exp(1)` at rate `r min(1, Lambda u)`.
//!
//! Two samplers are provided. [`simulate_companion_thinning`] is the fast,
//! standard one. [`simulate_companion_alg1`] decides before every jump whether
//! the next waiting time is infinite and draws finite waiting times by inverse
//! transform, which lets it build the dominating variables `N'` and `V_k`
//! alongside the path.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DerivedConstants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompanionParams {
    pub r: f64,
    pub lambda_cap: f64,
    pub d1_min: f64,
    pub rho: f64,
    pub tau: f64,
}

impl CompanionParams {
    pub fn new(r: f64, lambda_cap: f64, d1_min: f64) -> Result<Self> {
        for (name, v) in [("r", r), ("lambda_cap", lambda_cap)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::arg(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(d1_min > 0.0) || !d1_min.is_finite() {
            return Err(Error::arg("d1_min", format!("must be finite and > 0, got {d1_min}")));
        }
        Ok(CompanionParams {
            r,
            lambda_cap,
            d1_min,
            rho: r / d1_min,
            tau: r.min(d1_min),
        })
    }

    pub fn from_constants(c: &DerivedConstants) -> Self {
        CompanionParams {
            r: c.r,
            lambda_cap: c.lambda_cap,
            d1_min: c.d1_min,
            rho: c.rho,
            tau: c.tau,
        }
    }

    /// True when the process can never jump.
    fn frozen(&self) -> bool {
        self.r == 0.0 || self.lambda_cap == 0.0
    }
}

fn check_value(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::arg(name, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

/// Jump rate `r min(1, Lambda u)`.
pub fn lambda_u(p: &CompanionParams, u: f64) -> f64 {
    p.r * (p.lambda_cap * u).min(1.0)
}

/// `ln(Lambda u0) / d1_min`, the time at which the jump rate leaves its cap.
pub fn t_star(p: &CompanionParams, u0: f64) -> f64 {
    (p.lambda_cap * u0).ln() / p.d1_min
}

/// Probability that the next waiting time is infinite when starting from `u0`.
pub fn p_infinite(p: &CompanionParams, u0: f64) -> f64 {
    if p.frozen() {
        return 1.0;
    }
    let a = p.lambda_cap * u0;
    if a <= 1.0 {
        (-p.rho * a).exp()
    } else {
        (-p.rho * (a.ln() + 1.0)).exp()
    }
}

/// Uniform lower bound on the stopping probability, `p_infinite(max(u, rho))`.
pub fn p_star(p: &CompanionParams, u: f64) -> f64 {
    p_infinite(p, u.max(p.rho))
}

/// `P(T > t | U(0) = u0)`.
pub fn waiting_survival(p: &CompanionParams, t: f64, u0: f64) -> Result<f64> {
    check_value("t", t)?;
    check_value("u0", u0)?;
    if p.frozen() || u0 == 0.0 {
        return Ok(1.0);
    }
    let a = p.lambda_cap * u0;
    let d = p.d1_min;
    if a <= 1.0 {
        return Ok((p.rho * a * (-d * t).exp_m1()).exp());
    }
    let ts = a.ln() / d;
    if t <= ts {
        Ok((-p.r * t).exp())
    } else {
        Ok((-p.r * ts + p.rho * (-d * (t - ts)).exp_m1()).exp())
    }
}

fn check_conditioning(p: &CompanionParams, u0: f64) -> Result<()> {
    check_value("u0", u0)?;
    if u0 == 0.0 || p.frozen() {
        return Err(Error::Domain(
            "finite waiting time has probability 0 (u0 = 0, r = 0 or Lambda = 0)".into(),
        ));
    }
    Ok(())
}

/// `P(T <= t | T < inf, U(0) = u0)` in closed form.
pub fn waiting_cdf_finite(p: &CompanionParams, t: f64, u0: f64) -> Result<f64> {
    check_conditioning(p, u0)?;
    check_value("t", t)?;
    if t == f64::INFINITY {
        return Ok(1.0);
    }
    let a = p.lambda_cap * u0;
    let d = p.d1_min;
    let r = p.r;
    if a <= 1.0 {
        let c = p.rho * a;
        return Ok((c * (-d * t).exp_m1()).exp_m1() / (-c).exp_m1());
    }
    let ts = a.ln() / d;
    let denom = -(-r * ts - p.rho).exp_m1();
    let num = if t <= ts {
        -(-r * t).exp_m1()
    } else {
        -(-r * ts + p.rho * (-d * (t - ts)).exp_m1()).exp_m1()
    };
    Ok(num / denom)
}

/// Generalized inverse of [`waiting_cdf_finite`].
pub fn invert_waiting_cdf(p: &CompanionParams, s: f64, u0: f64) -> Result<f64> {
    check_conditioning(p, u0)?;
    if !(0.0..1.0).contains(&s) {
        return Err(Error::arg("s", format!("must lie in [0, 1), got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let a = p.lambda_cap * u0;
    let d = p.d1_min;
    let r = p.r;
    if a <= 1.0 {
        let c = p.rho * a;
        // 1 - e^{-d t} = -ln(1 - s (1 - e^{-c})) / c
        let q = -(s * (-c).exp_m1()).ln_1p() / c;
        return Ok(clean(-(-q).ln_1p() / d));
    }
    let ts = a.ln() / d;
    let denom = -(-r * ts - p.rho).exp_m1();
    let s_break = -(-r * ts).exp_m1() / denom;
    if (s - s_break).abs() <= 1e-12 {
        return bisect_cdf(p, s, u0, ts);
    }
    if s < s_break {
        return Ok(clean(-(-s * denom).ln_1p() / r));
    }
    // e^{-rho (1 - w)} = (1 - s D) e^{r t*},  w = e^{-d (t - t*)}
    let w = 1.0 + ((-s * denom).ln_1p() + r * ts) / p.rho;
    if !(w > 0.0) {
        return bisect_cdf(p, s, u0, ts);
    }
    Ok(clean(ts - w.ln() / d))
}

fn clean(t: f64) -> f64 {
    if t.is_finite() { t.max(0.0) } else { t }
}

fn bisect_cdf(p: &CompanionParams, s: f64, u0: f64, ts: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = ts.max(0.0) + 50.0 / p.d1_min;
    while waiting_cdf_finite(p, hi, u0)? < s {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Domain(format!("cannot bracket the inverse at s = {s}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if waiting_cdf_finite(p, mid, u0)? < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Mixture CDF `G(t) = 1 - C e^{-d1 t} / A` that sits between the conditional
/// waiting-time CDF and `1 - e^{-tau t}`; valid for `Lambda u0 > 1`, `t >= t*`.
pub fn mixture_dominance_oracle(p: &CompanionParams, u0: f64, t: f64) -> Result<f64> {
    check_value("u0", u0)?;
    check_value("t", t)?;
    if p.frozen() || p.lambda_cap * u0 <= 1.0 {
        return Err(Error::Domain(format!(
            "mixture bound needs Lambda u0 > 1 and r > 0, got Lambda u0 = {}",
            p.lambda_cap * u0
        )));
    }
    let ts = t_star(p, u0);
    if t < ts {
        return Err(Error::Domain(format!("mixture bound needs t >= t* = {ts}, got {t}")));
    }
    let c = p.rho * (ts * (p.d1_min - p.r)).exp();
    let a = 1.0 - (-p.r * ts).exp() * (1.0 - p.rho);
    Ok(1.0 - c * (-p.d1_min * t).exp() / a)
}

/// Which `W` band stops the jump loop in [`simulate_companion_alg1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BandOrder {
    /// `W <= p*` stops with `N' = N`, `p* < W <= p_U` stops with a geometric
    /// extension, `W > p_U` jumps. When `p_U < p*` this stops with probability
    /// `p*` instead of `p_U`.
    Literal,
    /// `W <= p_U` stops and `W > p_U` jumps, so the path has the law of the
    /// companion process. Inside the stopping band, `W <= min(p*, p_U)` gives
    /// `N' = N` and the rest gives the geometric extension.
    #[default]
    LawPreserving,
}

/// One run of the inverse-transform sampler with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanionRun {
    /// `U(t)`.
    pub terminal: f64,
    /// Number of jumps over the whole (almost surely finite) path.
    pub n: u64,
    /// Number of jumps before `t`.
    pub n_before_t: u64,
    pub n_prime: u64,
    /// Finite waiting times `T_1..T_N`.
    pub waits: Vec<f64>,
    /// Dominating times `V_1..V_N'`, with `V_k >= T_k` for `k <= N`.
    pub v: Vec<f64>,
    /// Instant of the last jump, `sum T_k`.
    pub h: f64,
    /// `p*` used by the stopping test.
    pub p_star: f64,
    /// Jump decisions taken while `p_U < p*`.
    pub inverted_bands: u64,
}

/// Refuses to pad `V` with more than this many expected draws.
pub const MAX_EXPECTED_PADDING: f64 = 1e7;

/// Simulates `U` up to time `t` with the decide-ahead sampler. The jump loop is
/// run to its end so `N`, `H` and the `V_k` describe the full path; `u_bar`
/// defaults to `u0`.
pub fn simulate_companion_alg1<R: Rng + ?Sized>(
    p: &CompanionParams,
    u0: f64,
    t: f64,
    u_bar: Option<f64>,
    order: BandOrder,
    rng: &mut R,
) -> Result<CompanionRun> {
    check_value("u0", u0)?;
    check_value("t", t)?;
    let u_bar = u_bar.unwrap_or(u0);
    check_value("u_bar", u_bar)?;
    let ps = p_star(p, u_bar);
    if ps < 1.0 && (1.0 - ps) / ps > MAX_EXPECTED_PADDING {
        return Err(Error::Domain(format!(
            "p* = {ps:e} too small for the bookkeeping of the decide-ahead sampler"
        )));
    }
    let mut u = u0;
    let mut now = 0.0;
    let mut terminal = None;
    let mut waits = Vec::new();
    let mut v = Vec::new();
    let mut inverted_bands = 0;
    let mut n_before_t = 0;
    let n_prime;

    loop {
        let pu = p_infinite(p, u);
        let w: f64 = rng.random();
        let (stop, no_extension) = match order {
            BandOrder::Literal => (w <= ps || w <= pu, w <= ps),
            BandOrder::LawPreserving => (w <= pu, w <= ps.min(pu)),
        };
        if stop {
            let k = waits.len() as u64;
            if no_extension {
                n_prime = k;
            } else {
                let extra = Geometric::new(ps)
                    .map_err(|e| Error::Domain(format!("geometric({ps}): {e}")))?
                    .sample(rng);
                n_prime = k + extra;
                for _ in 0..extra {
                    let e: f64 = rng.sample(Exp1);
                    v.push(e / p.tau);
                }
            }
            break;
        }
        if pu < ps {
            inverted_bands += 1;
        }
        let s: f64 = rng.random();
        let wait = invert_waiting_cdf(p, s, u)?;
        // V = -ln(1 - S) / tau, the Exp(tau) quantile at the same level
        v.push(-(-s).ln_1p() / p.tau);
        waits.push(wait);
        if terminal.is_none() && now + wait > t {
            terminal = Some(u * (-p.d1_min * (t - now)).exp());
        }
        now += wait;
        if terminal.is_none() {
            n_before_t += 1;
        }
        let e: f64 = rng.sample(Exp1);
        u = u * (-p.d1_min * wait).exp() + e;
    }
    let terminal = terminal.unwrap_or_else(|| u * (-p.d1_min * (t - now)).exp());
    Ok(CompanionRun {
        terminal,
        n: waits.len() as u64,
        n_before_t,
        n_prime,
        h: now,
        waits,
        v,
        p_star: ps,
        inverted_bands,
    })
}

/// `U(t)` by thinning against the constant majorant `r`.
pub fn simulate_companion_thinning<R: Rng + ?Sized>(
    p: &CompanionParams,
    u0: f64,
    t: f64,
    rng: &mut R,
) -> Result<f64> {
    check_value("u0", u0)?;
    check_value("t", t)?;
    let d = p.d1_min;
    if p.frozen() {
        return Ok(u0 * (-d * t).exp());
    }
    let mut anchor = u0;
    let mut t_anchor = 0.0;
    let mut now = 0.0;
    loop {
        let e: f64 = rng.sample(Exp1);
        now += e / p.r;
        if now > t {
            return Ok(anchor * (-d * (t - t_anchor)).exp());
        }
        let u = anchor * (-d * (now - t_anchor)).exp();
        if rng.random::<f64>() * p.r < lambda_u(p, u) {
            let b: f64 = rng.sample(Exp1);
            anchor = u + b;
            t_anchor = now;
        }
    }
}
