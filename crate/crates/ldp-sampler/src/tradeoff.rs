//! Trade-off functions for pure, approximate, and Gaussian local privacy,
//! together with the conjugate values g*(-e^beta) that drive the mixing-weight
//! optimization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::{norm_cdf, norm_quantile};

/// A privacy notion expressed as a trade-off function on [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TradeoffFunction {
    PureLdp { epsilon: f64 },
    ApproxLdp { epsilon: f64, delta: f64 },
    GaussianLdp { nu: f64 },
}

impl TradeoffFunction {
    pub fn pure(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
        }
        Ok(TradeoffFunction::PureLdp { epsilon })
    }

    pub fn approx(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Domain(format!("delta must be in [0, 1], got {delta}")));
        }
        Ok(TradeoffFunction::ApproxLdp { epsilon, delta })
    }

    pub fn gaussian(nu: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Domain(format!("nu must be positive, got {nu}")));
        }
        Ok(TradeoffFunction::GaussianLdp { nu })
    }

    pub fn label(&self) -> String {
        match *self {
            TradeoffFunction::PureLdp { epsilon } => format!("pure(eps={epsilon})"),
            TradeoffFunction::ApproxLdp { epsilon, delta } => {
                format!("approx(eps={epsilon},delta={delta})")
            }
            TradeoffFunction::GaussianLdp { nu } => format!("gaussian(nu={nu})"),
        }
    }

    /// Trade-off value g(u) for u in [0, 1].
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("trade-off argument must be in [0, 1], got {u}")));
        }
        let v = match *self {
            TradeoffFunction::PureLdp { epsilon } => pure_tradeoff(epsilon, 0.0, u),
            TradeoffFunction::ApproxLdp { epsilon, delta } => pure_tradeoff(epsilon, delta, u),
            TradeoffFunction::GaussianLdp { nu } => {
                if u == 0.0 {
                    1.0
                } else if u == 1.0 {
                    0.0
                } else {
                    // Phi(Phi^{-1}(1 - u) - nu), with the quantile taken on the
                    // small tail for accuracy.
                    norm_cdf(-norm_quantile(u) - nu)
                }
            }
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Conjugate value g*(-e^beta) for beta >= 0, in closed form per kind.
    pub fn conjugate_at_neg_exp(&self, beta: f64) -> Result<f64> {
        if !(beta >= 0.0) {
            return Err(Error::Domain(format!("beta must be >= 0, got {beta}")));
        }
        let v = match *self {
            TradeoffFunction::PureLdp { epsilon } => pure_conjugate(epsilon, 0.0, beta),
            TradeoffFunction::ApproxLdp { epsilon, delta } => pure_conjugate(epsilon, delta, beta),
            TradeoffFunction::GaussianLdp { nu } => {
                // -e^beta Phi(-nu/2 - beta/nu) - Phi(-nu/2 + beta/nu),
                // with the first product formed in log space so neither factor
                // can overflow or underflow prematurely.
                let lower = norm_cdf(-0.5 * nu - beta / nu);
                let first = if lower > 0.0 {
                    -(beta + lower.ln()).exp()
                } else {
                    0.0
                };
                first - norm_cdf(-0.5 * nu + beta / nu)
            }
        };
        Ok(v)
    }

    /// Brute-force sup of (-e^beta * theta - g(theta)) over a theta grid,
    /// refined by golden section around the best grid point. Independent of
    /// the closed forms; intended as a test oracle.
    pub fn conjugate_numeric_oracle(&self, beta: f64, grid_points: usize) -> Result<f64> {
        if !(beta >= 0.0) {
            return Err(Error::Domain(format!("beta must be >= 0, got {beta}")));
        }
        if grid_points < 1000 {
            return Err(Error::Domain(format!(
                "oracle needs at least 1000 grid points, got {grid_points}"
            )));
        }
        let y = -beta.exp();
        let objective = |theta: f64| -> f64 { y * theta - self.eval(theta).unwrap() };
        let step = 1.0 / grid_points as f64;
        let mut best_i = 0usize;
        let mut best = objective(0.0);
        for i in 1..=grid_points {
            let theta = (i as f64 * step).min(1.0);
            let v = objective(theta);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let lo = if best_i == 0 { 0.0 } else { (best_i - 1) as f64 * step };
        let hi = ((best_i + 1) as f64 * step).min(1.0);
        // The objective is concave, so negating it gives a unimodal minimum.
        let (_, neg) = crate::numerics::minimize_scalar(|t| -objective(t), lo, hi, 64, 1e-13)
            .unwrap_or((0.0, -best));
        Ok(best.max(-neg))
    }
}

/// g_{eps,delta}(u) = max{0, 1 - delta - e^eps u, e^{-eps} (1 - delta - u)}.
fn pure_tradeoff(epsilon: f64, delta: f64, u: f64) -> f64 {
    let e = epsilon.exp();
    (1.0 - delta - e * u).max((1.0 - delta - u) / e).max(0.0)
}

/// Conjugate of g_{eps,delta} at y = -e^beta; only the two branches with
/// y <= -1 can be reached for beta >= 0, and they meet continuously at
/// beta = eps (ties resolved to either branch give the same value).
fn pure_conjugate(epsilon: f64, delta: f64, beta: f64) -> f64 {
    if beta > epsilon {
        -(1.0 - delta)
    } else {
        (1.0 - delta) * (-beta.exp() - 1.0) / (epsilon.exp() + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::KeyedRng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn eval_reference_points() {
        let g0 = TradeoffFunction::pure(0.0).unwrap();
        assert_close(g0.eval(0.3).unwrap(), 0.7, 1e-15);

        let g = TradeoffFunction::approx(1.0, 0.0).unwrap();
        assert_close(g.eval(0.0).unwrap(), 1.0, 1e-15);

        let gn = TradeoffFunction::gaussian(1.0).unwrap();
        assert_close(gn.eval(0.5).unwrap(), 0.158_655_253_931_457_05, 1e-12);
        assert_close(gn.eval(0.0).unwrap(), 1.0, 1e-15);
        assert_close(gn.eval(1.0).unwrap(), 0.0, 1e-15);

        assert!(g.eval(-0.1).is_err());
        assert!(g.eval(1.1).is_err());
    }

    #[test]
    fn conjugate_reference_points() {
        let g = TradeoffFunction::pure(1.0).unwrap();
        assert_close(g.conjugate_at_neg_exp(2.0).unwrap(), -1.0, 1e-15);
        let e = std::f64::consts::E;
        assert_close(g.conjugate_at_neg_exp(0.0).unwrap(), -2.0 / (e + 1.0), 1e-15);

        let gn = TradeoffFunction::gaussian(1.0).unwrap();
        assert_close(
            gn.conjugate_at_neg_exp(0.0).unwrap(),
            -0.617_075_077_451_973_8,
            1e-12,
        );
        let gn15 = TradeoffFunction::gaussian(1.5).unwrap();
        assert_close(
            gn15.conjugate_at_neg_exp(1.0).unwrap(),
            -0.679_608_085_789_614_8,
            1e-12,
        );
        assert!(g.conjugate_at_neg_exp(-0.5).is_err());
    }

    #[test]
    fn conjugate_oracle_matches_closed_forms() {
        let cases = [
            (TradeoffFunction::pure(1.0).unwrap(), 2.0),
            (TradeoffFunction::pure(1.0).unwrap(), 0.0),
            (TradeoffFunction::pure(0.3).unwrap(), 0.1),
            (TradeoffFunction::approx(1.0, 0.05).unwrap(), 0.5),
            (TradeoffFunction::approx(2.0, 0.2).unwrap(), 1.7),
            (TradeoffFunction::gaussian(1.5).unwrap(), 1.0),
            (TradeoffFunction::gaussian(0.4).unwrap(), 0.0),
        ];
        for (g, beta) in cases {
            let closed = g.conjugate_at_neg_exp(beta).unwrap();
            let oracle = g.conjugate_numeric_oracle(beta, 10_000).unwrap();
            assert_close(closed, oracle, 1e-6);
        }
    }

    #[test]
    fn conjugate_oracle_randomized_agreement() {
        let mut rng = KeyedRng::new(2024);
        for _ in 0..100 {
            let beta = rng.uniform(0.0, 5.0);
            let g = match rng.next_u64() % 3 {
                0 => TradeoffFunction::pure(rng.uniform(0.0, 3.0)).unwrap(),
                1 => TradeoffFunction::approx(rng.uniform(0.0, 3.0), rng.uniform(0.0, 0.5)).unwrap(),
                _ => TradeoffFunction::gaussian(rng.uniform(0.05, 3.0)).unwrap(),
            };
            let closed = g.conjugate_at_neg_exp(beta).unwrap();
            let oracle = g.conjugate_numeric_oracle(beta, 10_000).unwrap();
            assert_close(closed, oracle, 1e-5);
        }
    }

    #[test]
    fn pure_and_approx_delta_zero_agree() {
        let mut rng = KeyedRng::new(7);
        for _ in 0..50 {
            let eps = rng.uniform(0.0, 4.0);
            let pure = TradeoffFunction::pure(eps).unwrap();
            let approx = TradeoffFunction::approx(eps, 0.0).unwrap();
            for _ in 0..10 {
                let u = rng.next_f64();
                assert_close(pure.eval(u).unwrap(), approx.eval(u).unwrap(), 1e-12);
            }
            let beta = rng.uniform(0.0, 5.0);
            assert_close(
                pure.conjugate_at_neg_exp(beta).unwrap(),
                approx.conjugate_at_neg_exp(beta).unwrap(),
                1e-12,
            );
        }
    }

    #[test]
    fn conjugate_range_and_monotonicity() {
        let kinds = [
            TradeoffFunction::pure(1.3).unwrap(),
            TradeoffFunction::approx(0.8, 0.1).unwrap(),
            TradeoffFunction::gaussian(1.1).unwrap(),
        ];
        for g in kinds {
            let mut prev = f64::INFINITY;
            for i in 0..200 {
                let beta = i as f64 * 0.05;
                let v = g.conjugate_at_neg_exp(beta).unwrap();
                assert!((-1.0 - 1e-12..=1e-12).contains(&v), "{g:?} at {beta}: {v}");
                assert!(v <= prev + 1e-12, "{g:?} not non-increasing at {beta}");
                prev = v;
            }
        }
    }

    #[test]
    fn tradeoff_axioms_on_grid() {
        let kinds = [
            TradeoffFunction::pure(1.0).unwrap(),
            TradeoffFunction::approx(0.7, 0.05).unwrap(),
            TradeoffFunction::gaussian(1.4).unwrap(),
        ];
        for g in kinds {
            let n = 400;
            let vals: Vec<f64> = (0..=n)
                .map(|i| g.eval(i as f64 / n as f64).unwrap())
                .collect();
            for (i, &v) in vals.iter().enumerate() {
                let u = i as f64 / n as f64;
                assert!((0.0..=1.0).contains(&v));
                assert!(v <= 1.0 - u + 1e-12, "{g:?}: g({u}) = {v} > 1 - u");
                if i > 0 {
                    assert!(v <= vals[i - 1] + 1e-12, "{g:?} increasing at {u}");
                }
                if i > 0 && i < n {
                    let chord = 0.5 * (vals[i - 1] + vals[i + 1]);
                    assert!(v <= chord + 1e-9, "{g:?} non-convex at {u}");
                }
            }
        }
    }
}
