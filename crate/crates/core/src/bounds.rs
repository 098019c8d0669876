//! Closed-form convergence bounds.

use serde::{Deserialize, Serialize};

use crate::companion::{p_star, CompanionParams};
use crate::model::DerivedConstants;

/// Everything a bound curve depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub w0: f64,
    pub constants: DerivedConstants,
    pub p_star: f64,
    pub gamma: f64,
}

impl BoundInputs {
    pub fn new(w0: f64, constants: &DerivedConstants) -> Self {
        let p = CompanionParams::from_constants(constants);
        let ps = p_star(&p, w0);
        BoundInputs {
            w0,
            constants: constants.clone(),
            p_star: ps,
            gamma: gamma(ps, constants.tau, constants.d1_min),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let c = &self.constants;
        decay_bound(t, self.w0, self.w0.max(c.rho), self.p_star, c.tau, self.gamma)
    }
}

/// `p* tau d1 / (p* tau + d1)`, zero when `p* tau = 0`.
pub fn gamma(p_star: f64, tau: f64, d1_min: f64) -> f64 {
    let a = p_star * tau;
    if a == 0.0 {
        0.0
    } else {
        a * d1_min / (a + d1_min)
    }
}

fn decay_bound(t: f64, mean0: f64, head: f64, ps: f64, tau: f64, g: f64) -> f64 {
    let slope = g * (-1.0f64).exp() * (mean0 + tau * (1.0 - ps));
    let decay = (-g * t).exp();
    if decay == 0.0 {
        return 0.0;
    }
    (head + slope * t) * decay
}

/// Wasserstein bound for the protein-only model started at distance `w1_0`.
pub fn bound_p(t: f64, w1_0: f64, constants: &DerivedConstants) -> f64 {
    BoundInputs::new(w1_0, constants).eval(t)
}

/// Wasserstein bound on the protein layer of the mRNA-protein model, with
/// `w0 = W1(proteins) + W1_eps(mRNA)` at time zero.
pub fn bound_mp(t: f64, w0: f64, constants: &DerivedConstants) -> f64 {
    BoundInputs::new(w0, constants).eval(t)
}

/// Bound on `E[U(t)]` for the companion process with `E[U(0)] = mean_u0`.
pub fn companion_mean_bound(p: &CompanionParams, mean_u0: f64, t: f64) -> f64 {
    let ps = p_star(p, mean_u0);
    let g = gamma(ps, p.tau, p.d1_min);
    decay_bound(t, mean_u0, mean_u0.max(p.rho), ps, p.tau, g)
}

/// Bound on the generating function of the last jump instant,
/// `E[e^{sH}] <= (tau - s) / (p* tau - s)` for `0 <= s < p* tau`.
pub fn last_jump_mgf_bound(p_star: f64, tau: f64, s: f64) -> f64 {
    (tau - s) / (p_star * tau - s)
}

/// Exponent of the Gronwall comparison curve: the `L1` Lipschitz constant of
/// `kon` minus `d1_min`.
pub fn chen_exponent(constants: &DerivedConstants) -> f64 {
    constants.kon_lipschitz() - constants.d1_min
}

/// `w1_0 exp((Lip(kon) - d1_min) t)`.
pub fn chen_bound(t: f64, w1_0: f64, constants: &DerivedConstants) -> f64 {
    w1_0 * (chen_exponent(constants) * t).exp()
}

/// `Lambda < 1 / rho`, the weak-interaction condition under which the
/// comparison curve decays.
pub fn is_dissipative(constants: &DerivedConstants) -> bool {
    constants.lambda_cap * constants.rho < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GeneParams, NetworkSpec, RegulationSpec};

    fn constants(r: f64, d1: f64, lambda: f64) -> DerivedConstants {
        DerivedConstants {
            r,
            lambda_cap: lambda,
            lambda_unweighted: lambda,
            d1_min: d1,
            rho: r / d1,
            tau: r.min(d1),
            eps: vec![1.0],
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(1.0, 1.0, 1.0), 0.5);
        assert_eq!(gamma(0.0, 1.0, 1.0), 0.0);
        let mut last = 0.0;
        for k in 0..=100 {
            let g = gamma(k as f64 / 100.0, 0.7, 1.3);
            assert!(g >= last);
            last = g;
        }
    }

    #[test]
    fn bound_p_examples() {
        let c = constants(1.0, 1.0, 1.0);
        assert_eq!(bound_p(0.0, 1.0, &c), 1.0);
        assert_eq!(bound_p(0.0, 0.3, &c), 1.0);
        assert_eq!(bound_p(0.0, 4.0, &c), 4.0);

        // hand evaluation: p* = e^-1, tau = 1, gamma = e^-1 / (e^-1 + 1)
        let e1 = (-1.0f64).exp();
        let g = e1 / (e1 + 1.0);
        let want = (1.0 + g * e1 * (1.0 + (1.0 - e1)) * 1.0) * (-g).exp();
        assert!((bound_p(1.0, 1.0, &c) - want).abs() < 1e-15);

        let b = BoundInputs::new(1.0, &c);
        let t = 100.0 / b.gamma;
        assert!(bound_p(t, 1.0, &c) < 1e-12);
        assert_eq!(bound_p(2.5, 1.7, &c), bound_mp(2.5, 1.7, &c));
    }

    #[test]
    fn bound_grid_matches_direct_formula() {
        let c = constants(2.0, 0.5, 0.3);
        let rho: f64 = 4.0;
        let tau: f64 = 0.5;
        for &w0 in &[0.5f64, 2.0, 10.0] {
            let u = w0.max(rho);
            let a: f64 = 0.3 * u;
            let ps = (-rho * a.min(1.0)).exp() * (1.0 / a.max(1.0)).powf(rho);
            let g = ps * tau * 0.5 / (ps * tau + 0.5);
            for k in 0..50 {
                let t = k as f64 * 0.7;
                let want = (u + g / std::f64::consts::E * (w0 + tau * (1.0 - ps)) * t) * (-g * t).exp();
                let got = bound_mp(t, w0, &c);
                assert!((got - want).abs() <= 1e-12 * want.max(1.0), "{got} vs {want}");
            }
        }
    }

    #[test]
    fn bound_is_eventually_decreasing() {
        let c = constants(1.0, 1.0, 1.0);
        let b = BoundInputs::new(3.0, &c);
        let peak = 1.0 / b.gamma;
        let mut last = b.eval(peak);
        for k in 1..200 {
            let v = b.eval(peak + k as f64);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn chen_and_dissipativity() {
        let g = GeneParams {
            d0: 2.0,
            d1: 1.0,
            k0: 0.0,
            k1: 1.0,
            b: 1.0,
            s1: 1.0,
            ell: 0.0,
        };
        let weak = NetworkSpec::new(
            vec![g, g],
            RegulationSpec {
                theta: vec![vec![0.0, -0.4], vec![-0.4, 0.0]],
                beta: vec![0.0, 0.0],
            },
        )
        .unwrap()
        .derived_constants()
        .unwrap();
        assert!(chen_exponent(&weak) < 0.0);
        assert!(is_dissipative(&weak));
        assert!(chen_bound(5.0, 2.0, &weak) < 2.0);

        let strong = constants(1.0 / 0.024, 1.0, 0.6);
        assert!(!is_dissipative(&strong));
        assert!(chen_exponent(&strong) > 0.0);
        let weak = constants(1.0 / 0.046, 1.0, 0.004);
        assert!(is_dissipative(&weak));
    }

    #[test]
    fn companion_mean_bound_is_bound_p() {
        let c = constants(1.0, 1.0, 1.0);
        let p = CompanionParams::from_constants(&c);
        for t in [0.0, 0.5, 3.0] {
            assert_eq!(companion_mean_bound(&p, 2.0, t), bound_p(t, 2.0, &c));
        }
        assert!((last_jump_mgf_bound(0.5, 1.0, 0.0) - 2.0).abs() < 1e-15);
    }
}
