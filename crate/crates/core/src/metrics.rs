//! Empirical Wasserstein-1 estimates (L1 ground cost) and the statistical
//! tests used to check stochastic-ordering claims.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coupling::{simulate_coupled, CoupledOptions, GapSummary};
use crate::driver::{mean_se, run_indexed, Job};
use crate::error::{Error, Result};
use crate::model::NetworkSpec;
use crate::simulate::{l1, ModelKind, MrnaProteinModel, ProteinModel, StateMP, StateP};

/// Largest cloud accepted by the exact assignment solver.
pub const MAX_EXACT_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub model: Option<ModelKind>,
    pub time: f64,
    pub seed: Option<u64>,
}

/// i.i.d. states at a fixed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCloud {
    pub points: Vec<Vec<f64>>,
    pub meta: CloudMeta,
}

impl SampleCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_meta(points, CloudMeta::default())
    }

    pub fn with_meta(points: Vec<Vec<f64>>, meta: CloudMeta) -> Result<Self> {
        if let Some(first) = points.first() {
            let d = first.len();
            for (k, p) in points.iter().enumerate() {
                if p.len() != d {
                    return Err(Error::Dimension(format!("point {k} has dimension {}, expected {d}", p.len())));
                }
                if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(Error::arg("points", format!("point {k} has a negative or non-finite entry")));
                }
            }
        }
        Ok(SampleCloud { points, meta })
    }

    /// One-dimensional cloud.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|v| vec![*v]).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    pub fn coord(&self, i: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[i]).collect()
    }
}

/// Minimum-cost perfect matching on a square cost matrix (row-major), by the
/// O(n^3) shortest augmenting path method with potentials. Returns the column
/// assigned to each row.
pub fn assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    let inf = f64::INFINITY;
    // 1-based rows/columns; column 0 is a virtual root.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = inf);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let row = &cost[(i0 - 1) * n..i0 * n];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = row[j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut rows = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            rows[p[j] - 1] = j - 1;
        }
    }
    rows
}

fn check_pair(a: &SampleCloud, b: &SampleCloud) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("clouds have {} and {} samples", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::arg("cloud", "empty"));
    }
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("clouds have dimensions {} and {}", a.dim(), b.dim())));
    }
    Ok(())
}

/// Exact optimal transport cost with its Monte Carlo standard error (spread of
/// the matched pair costs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Exact `W1` between two equal-size empirical measures.
pub fn empirical_w1_exact(a: &SampleCloud, b: &SampleCloud) -> Result<f64> {
    Ok(empirical_w1_exact_se(a, b)?.value)
}

pub fn empirical_w1_exact_se(a: &SampleCloud, b: &SampleCloud) -> Result<Estimate> {
    check_pair(a, b)?;
    let n = a.len();
    if n > MAX_EXACT_SAMPLES {
        return Err(Error::arg("cloud", format!("{n} samples exceed the exact solver cap {MAX_EXACT_SAMPLES}")));
    }
    let mut cost = Vec::with_capacity(n * n);
    for p in &a.points {
        for q in &b.points {
            cost.push(l1(p, q));
        }
    }
    let cols = assignment(&cost, n);
    let pairs: Vec<f64> = cols.iter().enumerate().map(|(i, &j)| cost[i * n + j]).collect();
    let (value, se) = mean_se(&pairs);
    Ok(Estimate { value, se })
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// 1-D `W1` between equal-size samples by sorted matching.
pub fn w1_sorted_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Dimension(format!("need equal non-empty samples, got {} and {}", a.len(), b.len())));
    }
    let (sa, sb) = (sorted(a), sorted(b));
    Ok(sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

/// 1-D `W1` between empirical measures of any sizes, `int |F_a - F_b|`.
pub fn w1_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::arg("sample", "empty"));
    }
    let (sa, sb) = (sorted(a), sorted(b));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    let mut x = sa[0].min(sb[0]);
    while i < sa.len() || j < sb.len() {
        let next = match (sa.get(i), sb.get(j)) {
            (Some(p), Some(q)) => p.min(*q),
            (Some(p), None) => *p,
            (None, Some(q)) => *q,
            (None, None) => unreachable!(),
        };
        total += (i as f64 / na - j as f64 / nb).abs() * (next - x);
        x = next;
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
    }
    Ok(total)
}

/// Sum of coordinatewise 1-D distances, a lower bound on `W1` under L1 cost.
pub fn w1_lower_marginals(a: &SampleCloud, b: &SampleCloud) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("clouds have dimensions {} and {}", a.dim(), b.dim())));
    }
    (0..a.dim()).map(|i| w1_1d(&a.coord(i), &b.coord(i))).sum()
}

/// Mean L1 distance between paired points: the cost of one particular
/// coupling, hence an upper bound on the exact empirical `W1`.
pub fn paired_cost(a: &SampleCloud, b: &SampleCloud) -> Result<Estimate> {
    check_pair(a, b)?;
    let d: Vec<f64> = a.points.iter().zip(&b.points).map(|(p, q)| l1(p, q)).collect();
    let (value, se) = mean_se(&d);
    Ok(Estimate { value, se })
}

/// Terminal clouds of the two copies of a synchronizing coupling, sampled at
/// `times`; run `k` of each cloud comes from the same coupled path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedClouds {
    pub times: Vec<f64>,
    pub first: Vec<SampleCloud>,
    pub second: Vec<SampleCloud>,
    /// Companion values at each time.
    pub u: Vec<Vec<f64>>,
    pub gap: GapSummary,
    pub clamp_count: u64,
    pub events: u64,
}

impl MatchedClouds {
    /// Coupling upper bound on `W1` at `times[k]`.
    pub fn upper(&self, k: usize) -> Result<Estimate> {
        paired_cost(&self.first[k], &self.second[k])
    }
}

fn collect_clouds<S>(
    model: ModelKind,
    times: &[f64],
    seed: u64,
    per_run: Vec<(Vec<crate::coupling::Coupled<S>>, GapSummary, u64, u64)>,
    coords: impl Fn(&S) -> Vec<f64>,
) -> Result<MatchedClouds> {
    let meta = |t: f64| CloudMeta {
        model: Some(model),
        time: t,
        seed: Some(seed),
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut u = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        first.push(SampleCloud::with_meta(per_run.iter().map(|r| coords(&r.0[k].first)).collect(), meta(t))?);
        second.push(SampleCloud::with_meta(per_run.iter().map(|r| coords(&r.0[k].second)).collect(), meta(t))?);
        u.push(per_run.iter().map(|r| r.0[k].u).collect());
    }
    let mut gap = GapSummary::default();
    let mut clamp_count = 0;
    let mut events = 0;
    for r in &per_run {
        gap.merge(&r.1);
        clamp_count += r.2;
        events += r.3;
    }
    Ok(MatchedClouds {
        times: times.to_vec(),
        first,
        second,
        u,
        gap,
        clamp_count,
        events,
    })
}

fn check_times(times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::arg("times", "empty"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !(times[0] >= 0.0) {
        return Err(Error::arg("times", "must be nonnegative and strictly increasing"));
    }
    Ok(*times.last().unwrap())
}

/// Matched protein clouds from the protein-only coupling.
pub fn coupled_clouds_p(net: &NetworkSpec, x1: &StateP, x2: &StateP, times: &[f64], job: &Job) -> Result<MatchedClouds> {
    let horizon = check_times(times)?;
    let constants = net.derived_constants()?;
    let model = ProteinModel::new(net);
    let opts = CoupledOptions::sampled(times);
    let runs = run_indexed(job, |_, rng| {
        let tr = simulate_coupled(&model, &constants, x1, x2, horizon, &opts, rng)?;
        Ok((tr.samples, tr.online_gap, tr.clamp_count, tr.counts.accepted()))
    })?;
    collect_clouds(ModelKind::P, times, job.seed, runs, |s: &StateP| s.x.clone())
}

/// Matched protein-layer clouds from the mRNA-protein coupling.
pub fn coupled_clouds_mp(net: &NetworkSpec, s1: &StateMP, s2: &StateMP, times: &[f64], job: &Job) -> Result<MatchedClouds> {
    let horizon = check_times(times)?;
    let constants = net.derived_constants()?;
    let model = MrnaProteinModel::new(net);
    let opts = CoupledOptions::sampled(times);
    let runs = run_indexed(job, |_, rng| {
        let tr = simulate_coupled(&model, &constants, s1, s2, horizon, &opts, rng)?;
        Ok((tr.samples, tr.online_gap, tr.clamp_count, tr.counts.accepted()))
    })?;
    collect_clouds(ModelKind::MP, times, job.seed, runs, |s: &StateMP| s.z.clone())
}

/// Monte Carlo estimate of `E||X1(t) - X2(t)||_1` under the coupling.
pub fn w1_upper_coupling_p(net: &NetworkSpec, x1: &StateP, x2: &StateP, t: f64, job: &Job) -> Result<Estimate> {
    if job.runs < 2 {
        return Err(Error::arg("runs", "need at least 2 runs for a standard error"));
    }
    coupled_clouds_p(net, x1, x2, &[t], job)?.upper(0)
}

/// Monte Carlo estimate of `E||Z1(t) - Z2(t)||_1` under the coupling.
pub fn w1_upper_coupling_mp(net: &NetworkSpec, s1: &StateMP, s2: &StateMP, t: f64, job: &Job) -> Result<Estimate> {
    if job.runs < 2 {
        return Err(Error::arg("runs", "need at least 2 runs for a standard error"));
    }
    coupled_clouds_mp(net, s1, s2, &[t], job)?.upper(0)
}

/// Half-width of the two-sided DKW band at confidence `level`.
pub fn dkw_epsilon(n: usize, level: f64) -> f64 {
    ((2.0 / (1.0 - level)).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceResult {
    pub pass: bool,
    /// `min (F_emp - F_ref) + epsilon` over the checked points; negative on failure.
    pub margin: f64,
    pub epsilon: f64,
    /// Point where the margin is attained.
    pub worst_at: f64,
    pub n: usize,
}

fn check_count(n: usize) -> Result<()> {
    if n < 100 {
        return Err(Error::arg("samples", format!("need at least 100 samples, got {n}")));
    }
    Ok(())
}

/// Tests `F_emp >= F_ref - epsilon` for a continuous, non-decreasing reference
/// CDF. The supremum of `F_ref - F_emp` is attained at left limits of sample
/// points, so those are the only points checked.
pub fn dominance_test(samples: &[f64], reference_cdf: impl Fn(f64) -> f64, level: f64) -> Result<DominanceResult> {
    check_count(samples.len())?;
    let s = sorted(samples);
    let n = s.len();
    let eps = dkw_epsilon(n, level);
    let mut margin = f64::INFINITY;
    let mut worst_at = s[0];
    for (k, &x) in s.iter().enumerate() {
        if k > 0 && s[k - 1] == x {
            continue;
        }
        let m = k as f64 / n as f64 - reference_cdf(x) + eps;
        if m < margin {
            margin = m;
            worst_at = x;
        }
    }
    Ok(DominanceResult {
        pass: margin >= 0.0,
        margin,
        epsilon: eps,
        worst_at,
        n,
    })
}

/// Same test for integer-valued samples, checked at `0..=max(sample)`.
pub fn dominance_test_discrete(samples: &[u64], reference_cdf: impl Fn(u64) -> f64, level: f64) -> Result<DominanceResult> {
    check_count(samples.len())?;
    let n = samples.len();
    let eps = dkw_epsilon(n, level);
    let max = *samples.iter().max().unwrap();
    let mut hist = vec![0usize; max as usize + 1];
    for &s in samples {
        hist[s as usize] += 1;
    }
    let mut cum = 0;
    let mut margin = f64::INFINITY;
    let mut worst_at = 0.0;
    for (k, h) in hist.iter().enumerate() {
        cum += h;
        let m = cum as f64 / n as f64 - reference_cdf(k as u64) + eps;
        if m < margin {
            margin = m;
            worst_at = k as f64;
        }
    }
    Ok(DominanceResult {
        pass: margin >= 0.0,
        margin,
        epsilon: eps,
        worst_at,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
}

/// Two-sample Kolmogorov-Smirnov test at significance `alpha` (asymptotic
/// critical value).
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::arg("sample", "empty"));
    }
    let (sa, sb) = (sorted(a), sorted(b));
    let (n, m) = (sa.len(), sb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = sa[i].min(sb[j]);
        while i < n && sa[i] <= x {
            i += 1;
        }
        while j < m && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let critical = c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    Ok(KsResult {
        statistic: d,
        critical,
        pass: d < critical,
    })
}

/// Distance from the empirical CDF to the closest unimodal CDF, approximated
/// by trying every sample as the mode: convex minorant to its left, concave
/// majorant to its right. Half the worst gap, as in the dip statistic.
pub fn dip_statistic(samples: &[f64]) -> f64 {
    let s = sorted(samples);
    let n = s.len() as f64;
    // distinct values with left and right CDF values
    let mut xs = Vec::new();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for (k, &x) in s.iter().enumerate() {
        if k > 0 && s[k - 1] == x {
            *hi.last_mut().unwrap() = (k + 1) as f64 / n;
        } else {
            xs.push(x);
            lo.push(k as f64 / n);
            hi.push((k + 1) as f64 / n);
        }
    }
    let m = xs.len();
    if m < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for mode in 0..m {
        let left = hull_gap(&xs[..=mode], &lo[..=mode], &hi[..=mode], true);
        let right = hull_gap(&xs[mode..], &lo[mode..], &hi[mode..], false);
        best = best.min(left.max(right));
    }
    0.5 * best
}

/// Largest vertical gap between the ECDF and its greatest convex minorant
/// (`lower = true`, built on left limits) or least concave majorant (built on
/// right values).
fn hull_gap(xs: &[f64], lo: &[f64], hi: &[f64], lower: bool) -> f64 {
    let ys = if lower { lo } else { hi };
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[k] - ys[a]) - (ys[b] - ys[a]) * (xs[k] - xs[a]);
            let keep = if lower { cross > 0.0 } else { cross < 0.0 };
            if keep {
                break;
            }
            hull.pop();
        }
        hull.push(k);
    }
    let mut gap: f64 = 0.0;
    let mut seg = 0;
    for k in 0..xs.len() {
        while seg + 1 < hull.len() - 1 && xs[hull[seg + 1]] <= xs[k] {
            seg += 1;
        }
        let h = if hull.len() == 1 {
            ys[hull[0]]
        } else {
            let (a, b) = (hull[seg], hull[seg + 1]);
            let w = if xs[b] > xs[a] { (xs[k] - xs[a]) / (xs[b] - xs[a]) } else { 0.0 };
            ys[a] + w * (ys[b] - ys[a])
        };
        let g = if lower { (hi[k] - h).max(lo[k] - h) } else { (h - lo[k]).max(h - hi[k]) };
        gap = gap.max(g);
    }
    gap
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipTest {
    pub dip: f64,
    /// Fraction of uniform null samples of the same size with a dip at least as large.
    pub p_value: f64,
    pub reps: usize,
}

impl DipTest {
    pub fn rejects_unimodality(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Dip statistic calibrated against uniform samples of the same size.
pub fn dip_test<R: Rng + ?Sized>(samples: &[f64], reps: usize, rng: &mut R) -> DipTest {
    let dip = dip_statistic(samples);
    let n = samples.len();
    let mut exceed = 0;
    let mut buf = vec![0.0; n];
    for _ in 0..reps {
        buf.iter_mut().for_each(|v| *v = rng.random());
        if dip_statistic(&buf) >= dip {
            exceed += 1;
        }
    }
    DipTest {
        dip,
        p_value: (exceed + 1) as f64 / (reps + 1) as f64,
        reps,
    }
}
