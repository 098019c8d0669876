//! Network parameterization and derived constants.
//!
//! All rates are per unit time. States handled here are dimensionless: the
//! regulation acts on the normalized protein vector and bursts have unit mean
//! on the protein scale.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-gene kinetic parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneParams {
    /// mRNA degradation rate.
    pub d0: f64,
    /// Protein degradation rate.
    pub d1: f64,
    /// Minimal burst frequency.
    pub k0: f64,
    /// Maximal burst frequency.
    pub k1: f64,
    /// Inverse mean mRNA burst size.
    pub b: f64,
    /// Translation rate.
    pub s1: f64,
    /// Lipschitz constant of the normalized regulation function.
    pub ell: f64,
}

impl GeneParams {
    pub fn span(&self) -> f64 {
        self.k1 - self.k0
    }

    pub fn epsilon(&self) -> Result<f64> {
        epsilon(self.d0, self.d1)
    }
}

/// Logistic regulation: gene `i` sees `sigmoid(beta[i] + sum_j theta[i][j] * x[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulationSpec {
    pub theta: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
}

impl RegulationSpec {
    /// No interactions, `sigmoid(0) = 1/2` for every gene.
    pub fn none(n: usize) -> Self {
        RegulationSpec {
            theta: vec![vec![0.0; n]; n],
            beta: vec![0.0; n],
        }
    }

    /// Lipschitz constant of the logistic row `i` w.r.t. the L1 norm on inputs,
    /// from the slope bound `sigmoid' <= 1/4`.
    pub fn row_lipschitz(&self, i: usize) -> f64 {
        0.25 * self.theta[i].iter().map(|t| t.abs()).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub genes: Vec<GeneParams>,
    pub regulation: RegulationSpec,
}

/// A single failed constraint, tagged with the gene it concerns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    EmptyNetwork,
    Dimension(String),
    NonFinite { field: String },
    /// `d0 > d1` fails.
    DegradationOrder { gene: usize, d0: f64, d1: f64 },
    NonPositiveDegradation { gene: usize, d1: f64 },
    /// `k0 <= k1` fails.
    RateOrdering { gene: usize, k0: f64, k1: f64 },
    NegativeRate { gene: usize, k0: f64 },
    NonPositive { gene: usize, field: String, value: f64 },
    NegativeLipschitz { gene: usize, ell: f64 },
}

impl Violation {
    pub fn gene(&self) -> Option<usize> {
        match *self {
            Violation::DegradationOrder { gene, .. }
            | Violation::NonPositiveDegradation { gene, .. }
            | Violation::RateOrdering { gene, .. }
            | Violation::NegativeRate { gene, .. }
            | Violation::NonPositive { gene, .. }
            | Violation::NegativeLipschitz { gene, .. } => Some(gene),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyNetwork => write!(f, "network has no genes"),
            Violation::Dimension(s) => write!(f, "dimension mismatch: {s}"),
            Violation::NonFinite { field } => write!(f, "{field} is not finite"),
            Violation::DegradationOrder { gene, d0, d1 } => write!(
                f,
                "genes[{gene}]: mRNA degradation d0 = {d0} must exceed protein degradation d1 = {d1}"
            ),
            Violation::NonPositiveDegradation { gene, d1 } => {
                write!(f, "genes[{gene}]: d1 = {d1} must be positive")
            }
            Violation::RateOrdering { gene, k0, k1 } => {
                write!(f, "genes[{gene}]: burst rates need k0 <= k1, got k0 = {k0}, k1 = {k1}")
            }
            Violation::NegativeRate { gene, k0 } => {
                write!(f, "genes[{gene}]: k0 = {k0} must be nonnegative")
            }
            Violation::NonPositive { gene, field, value } => {
                write!(f, "genes[{gene}]: {field} = {value} must be positive")
            }
            Violation::NegativeLipschitz { gene, ell } => {
                write!(f, "genes[{gene}]: ell = {ell} must be nonnegative")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(self.violations))
        }
    }
}

/// Every quantity that enters the convergence bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Total burst-rate span `sum_i (k1_i - k0_i)`.
    pub r: f64,
    /// Aggregated interaction strength, `(1/r) sum_i (k1_i - k0_i) ell_i`.
    pub lambda_cap: f64,
    /// `(1/r) sum_i ell_i`; equals `lambda_cap` only when every span is 1.
    pub lambda_unweighted: f64,
    pub d1_min: f64,
    /// `r / d1_min`.
    pub rho: f64,
    /// `min(r, d1_min)`.
    pub tau: f64,
    pub eps: Vec<f64>,
}

impl DerivedConstants {
    /// Total Lipschitz constant of `kon` in the L1 norm, `r * lambda_cap`.
    pub fn kon_lipschitz(&self) -> f64 {
        self.r * self.lambda_cap
    }
}

/// `d1 / (d0 - d1)`, the protein-scale factor that keeps coupled flows close.
pub fn epsilon(d0: f64, d1: f64) -> Result<f64> {
    if !(d1 > 0.0) || !(d0 > d1) || !d0.is_finite() {
        return Err(Error::Domain(format!(
            "epsilon needs d0 > d1 > 0, got d0 = {d0}, d1 = {d1}"
        )));
    }
    Ok(d1 / (d0 - d1))
}

#[inline]
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl NetworkSpec {
    /// Builds a network and fills every `ell` from the logistic slope bound.
    pub fn new(mut genes: Vec<GeneParams>, regulation: RegulationSpec) -> Result<Self> {
        let n = genes.len();
        if regulation.beta.len() != n
            || regulation.theta.len() != n
            || regulation.theta.iter().any(|row| row.len() != n)
        {
            return Err(Error::Dimension(format!(
                "{n} genes but theta is {}x? and beta has {} entries",
                regulation.theta.len(),
                regulation.beta.len()
            )));
        }
        for (i, g) in genes.iter_mut().enumerate() {
            g.ell = regulation.row_lipschitz(i);
        }
        Ok(NetworkSpec { genes, regulation })
    }

    pub fn n(&self) -> usize {
        self.genes.len()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_network(self)
    }

    pub fn derived_constants(&self) -> Result<DerivedConstants> {
        derived_constants(self)
    }

    /// `sum_i k1_i`, the thinning majorant for a single copy.
    pub fn max_total_rate(&self) -> f64 {
        self.genes.iter().map(|g| g.k1).sum()
    }

    pub fn kon(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.kon_into(x, &mut out);
        out
    }

    pub fn kon_into(&self, x: &[f64], out: &mut [f64]) {
        let reg = &self.regulation;
        for (i, g) in self.genes.iter().enumerate() {
            let drive: f64 = reg.beta[i]
                + reg.theta[i]
                    .iter()
                    .zip(x)
                    .map(|(t, xi)| t * xi)
                    .sum::<f64>();
            out[i] = g.k0 + g.span() * logistic(drive);
        }
    }

    pub fn eps(&self) -> Vec<f64> {
        self.genes
            .iter()
            .map(|g| g.d1 / (g.d0 - g.d1))
            .collect()
    }

    /// Multiplier taking biological protein counts to the dimensionless scale.
    pub fn protein_scale(&self) -> Vec<f64> {
        self.genes
            .iter()
            .map(|g| {
                let eps = g.d1 / (g.d0 - g.d1);
                g.d1 * g.b / (g.s1 * eps)
            })
            .collect()
    }

    /// Multiplier taking biological mRNA counts to the dimensionless scale.
    pub fn mrna_scale(&self) -> Vec<f64> {
        self.genes
            .iter()
            .map(|g| g.b / (g.d1 / (g.d0 - g.d1)))
            .collect()
    }

    pub fn protein_to_dimensionless(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_len(p.len())?;
        Ok(p.iter().zip(self.protein_scale()).map(|(v, s)| v * s).collect())
    }

    pub fn protein_from_dimensionless(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(x.iter().zip(self.protein_scale()).map(|(v, s)| v / s).collect())
    }

    pub fn mrna_to_dimensionless(&self, m: &[f64]) -> Result<Vec<f64>> {
        self.check_len(m.len())?;
        Ok(m.iter().zip(self.mrna_scale()).map(|(v, s)| v * s).collect())
    }

    pub fn mrna_from_dimensionless(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y.len())?;
        Ok(y.iter().zip(self.mrna_scale()).map(|(v, s)| v / s).collect())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::Dimension(format!(
                "state has {len} coordinates, network has {} genes",
                self.n()
            )));
        }
        Ok(())
    }
}

pub fn validate_network(net: &NetworkSpec) -> ValidationReport {
    let mut v = Vec::new();
    let n = net.genes.len();
    if n == 0 {
        v.push(Violation::EmptyNetwork);
    }
    let reg = &net.regulation;
    if reg.beta.len() != n {
        v.push(Violation::Dimension(format!(
            "beta has {} entries for {n} genes",
            reg.beta.len()
        )));
    }
    if reg.theta.len() != n || reg.theta.iter().any(|row| row.len() != n) {
        v.push(Violation::Dimension(format!("theta must be {n}x{n}")));
    }
    for (i, row) in reg.theta.iter().enumerate() {
        for (j, t) in row.iter().enumerate() {
            if !t.is_finite() {
                v.push(Violation::NonFinite {
                    field: format!("theta[{i}][{j}]"),
                });
            }
        }
    }
    for (i, b) in reg.beta.iter().enumerate() {
        if !b.is_finite() {
            v.push(Violation::NonFinite {
                field: format!("beta[{i}]"),
            });
        }
    }

    for (i, g) in net.genes.iter().enumerate() {
        let fields = [
            ("d0", g.d0),
            ("d1", g.d1),
            ("k0", g.k0),
            ("k1", g.k1),
            ("b", g.b),
            ("s1", g.s1),
            ("ell", g.ell),
        ];
        let mut finite = true;
        for (name, val) in fields {
            if !val.is_finite() {
                finite = false;
                v.push(Violation::NonFinite {
                    field: format!("genes[{i}].{name}"),
                });
            }
        }
        if !finite {
            continue;
        }
        if g.d1 <= 0.0 {
            v.push(Violation::NonPositiveDegradation { gene: i, d1: g.d1 });
        }
        if g.d0 <= g.d1 {
            v.push(Violation::DegradationOrder {
                gene: i,
                d0: g.d0,
                d1: g.d1,
            });
        }
        if g.k0 < 0.0 {
            v.push(Violation::NegativeRate { gene: i, k0: g.k0 });
        }
        if g.k0 > g.k1 {
            v.push(Violation::RateOrdering {
                gene: i,
                k0: g.k0,
                k1: g.k1,
            });
        }
        if g.b <= 0.0 {
            v.push(Violation::NonPositive {
                gene: i,
                field: "b".into(),
                value: g.b,
            });
        }
        if g.s1 <= 0.0 {
            v.push(Violation::NonPositive {
                gene: i,
                field: "s1".into(),
                value: g.s1,
            });
        }
        if g.ell < 0.0 {
            v.push(Violation::NegativeLipschitz { gene: i, ell: g.ell });
        }
    }
    ValidationReport { violations: v }
}

pub fn derived_constants(net: &NetworkSpec) -> Result<DerivedConstants> {
    validate_network(net).into_result()?;
    let r: f64 = net.genes.iter().map(GeneParams::span).sum();
    let d1_min = net
        .genes
        .iter()
        .map(|g| g.d1)
        .fold(f64::INFINITY, f64::min);
    let (lambda_cap, lambda_unweighted) = if r > 0.0 {
        let weighted: f64 = net.genes.iter().map(|g| g.span() * g.ell).sum();
        let plain: f64 = net.genes.iter().map(|g| g.ell).sum();
        (weighted / r, plain / r)
    } else {
        (0.0, 0.0)
    };
    let eps = net
        .genes
        .iter()
        .map(GeneParams::epsilon)
        .collect::<Result<Vec<_>>>()?;
    Ok(DerivedConstants {
        r,
        lambda_cap,
        lambda_unweighted,
        d1_min,
        rho: r / d1_min,
        tau: r.min(d1_min),
        eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub pairs_checked: usize,
    /// Largest `||kon(x) - kon(z)||_1 / (r (1 ^ Lambda ||x - z||_1))` seen.
    pub max_ratio: f64,
    /// Up to 16 offending pairs.
    pub violations: Vec<(Vec<f64>, Vec<f64>)>,
    pub violation_count: usize,
}

impl EnvelopeReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }
}

/// Samples pairs in `[0, box_hi]^n` and checks the Lipschitz envelope of `kon`
/// against the supplied constants. Half the pairs are independent uniforms,
/// half are local perturbations, so both the saturated and the Lipschitz part
/// of the envelope get exercised. `box_hi` defaults to `max(5 rho, 1)`.
pub fn check_lipschitz_envelope<R: Rng + ?Sized>(
    net: &NetworkSpec,
    constants: &DerivedConstants,
    num_pairs: usize,
    box_hi: Option<f64>,
    rng: &mut R,
) -> EnvelopeReport {
    let n = net.n();
    let hi = box_hi.unwrap_or_else(|| (5.0 * constants.rho).max(1.0));
    let mut report = EnvelopeReport {
        pairs_checked: num_pairs,
        max_ratio: 0.0,
        violations: Vec::new(),
        violation_count: 0,
    };
    let mut kx = vec![0.0; n];
    let mut kz = vec![0.0; n];
    for k in 0..num_pairs {
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * hi).collect();
        let z: Vec<f64> = if k % 2 == 0 {
            (0..n).map(|_| rng.random::<f64>() * hi).collect()
        } else {
            let scale = hi * 1e-2;
            x.iter()
                .map(|xi| (xi + (rng.random::<f64>() - 0.5) * scale).max(0.0))
                .collect()
        };
        net.kon_into(&x, &mut kx);
        net.kon_into(&z, &mut kz);
        let lhs: f64 = kx.iter().zip(&kz).map(|(a, b)| (a - b).abs()).sum();
        let dist: f64 = x.iter().zip(&z).map(|(a, b)| (a - b).abs()).sum();
        let rhs = constants.r * (constants.lambda_cap * dist).min(1.0);
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        report.max_ratio = report.max_ratio.max(ratio);
        if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
            report.violation_count += 1;
            if report.violations.len() < 16 {
                report.violations.push((x, z));
            }
        }
    }
    report
}
