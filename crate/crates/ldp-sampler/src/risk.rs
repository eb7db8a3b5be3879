//! Mixing weights, non-triviality conditions, and closed-form minimax risks
//! for banded distribution classes under each privacy notion, both global and
//! neighborhood-local.

use serde::Serialize;

use crate::divergence::FDivergence;
use crate::error::{Error, Result};
use crate::numerics::minimize_scalar;
use crate::tradeoff::TradeoffFunction;

/// Tolerance for the integer check on (c2 - c1)/(1 - c1).
pub const INTEGRALITY_TOL: f64 = 1e-9;

/// Worst-case risk summary for one (class, privacy, divergence) triple.
#[derive(Clone, Debug, Serialize)]
pub struct RiskReport {
    pub lambda_star: f64,
    pub r1: f64,
    pub r2: f64,
    pub risk: f64,
    pub trivial: bool,
    pub c1: f64,
    pub c2: f64,
    pub privacy: TradeoffFunction,
    pub divergence: FDivergence,
}

fn validate_bounds(c1: f64, c2: f64) -> Result<()> {
    if !((0.0..1.0).contains(&c1) && 1.0 < c2) {
        return Err(Error::Domain(format!(
            "class bounds must satisfy 0 <= c1 < 1 < c2, got ({c1}, {c2})"
        )));
    }
    Ok(())
}

/// The risk formulas require (c2 - c1)/(1 - c1) to be a positive integer;
/// returns it, or a domain error when the ratio is more than 1e-9 off.
pub fn require_integral_band_ratio(c1: f64, c2: f64) -> Result<u64> {
    validate_bounds(c1, c2)?;
    let ratio = (c2 - c1) / (1.0 - c1);
    let nearest = ratio.round();
    if (ratio - nearest).abs() > INTEGRALITY_TOL || nearest < 2.0 {
        return Err(Error::Domain(format!(
            "(c2 - c1)/(1 - c1) = {ratio} is not an integer >= 2; \
             widen the class (e.g. decrease c1) first"
        )));
    }
    Ok(nearest as u64)
}

/// Decrease c1 to the nearest value making (c2 - c1)/(1 - c1) integral.
pub fn widen_c1_to_integral(c1: f64, c2: f64) -> Result<f64> {
    validate_bounds(c1, c2)?;
    let ratio = (c2 - c1) / (1.0 - c1);
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= INTEGRALITY_TOL && nearest >= 2.0 {
        return Ok(c1);
    }
    let m = ratio.floor();
    if m < 2.0 || m < c2 {
        return Err(Error::Config(format!(
            "cannot reach an integral band ratio by decreasing c1 alone \
             (ratio {ratio}, c2 {c2}); increase c2 instead"
        )));
    }
    Ok((m - c2) / (m - 1.0))
}

fn beta_search_max(c2: f64, g: &TradeoffFunction) -> f64 {
    let privacy_term = match *g {
        TradeoffFunction::PureLdp { epsilon } => 2.0 * epsilon + 10.0,
        TradeoffFunction::ApproxLdp { epsilon, .. } => 2.0 * epsilon + 10.0,
        TradeoffFunction::GaussianLdp { nu } => 4.0 * nu * nu + 20.0,
    };
    40.0_f64.max(4.0 * c2.ln()).max(privacy_term).min(650.0)
}

/// The mixing-weight objective at a single beta.
fn mixing_objective(c1: f64, c2: f64, g: &TradeoffFunction, beta: f64) -> f64 {
    let d = (c2 - c1) / (1.0 - c1);
    let eb = beta.exp();
    let conj = g.conjugate_at_neg_exp(beta).expect("beta >= 0");
    (eb + d * (1.0 + conj) - 1.0) / ((1.0 - c1) * eb + c2 - 1.0)
}

fn clamp_unit(lambda: f64) -> f64 {
    if (-1e-9..0.0).contains(&lambda) {
        0.0
    } else if lambda > 1.0 && lambda <= 1.0 + 1e-9 {
        1.0
    } else {
        lambda
    }
}

/// Numeric infimum over beta >= 0 of the mixing-weight objective. Always
/// takes the optimizer path, regardless of privacy kind; the closed forms are
/// tested against this.
pub fn lambda_star_infimum(c1: f64, c2: f64, g: &TradeoffFunction) -> Result<f64> {
    validate_bounds(c1, c2)?;
    let hi = beta_search_max(c2, g);
    let (_, val) = minimize_scalar(|beta| mixing_objective(c1, c2, g, beta), 0.0, hi, 512, 1e-12)?;
    Ok(clamp_unit(val))
}

/// Non-triviality: some beta >= 0 satisfies
/// 1 + g*(-e^beta) <= (c2 - c1 e^beta)(1 - c1)/(c2 - c1).
/// When it fails, the identity sampler is already private on the class.
pub fn non_trivial(c1: f64, c2: f64, g: &TradeoffFunction) -> Result<bool> {
    validate_bounds(c1, c2)?;
    Ok(match *g {
        TradeoffFunction::PureLdp { epsilon } => c1 == 0.0 || c1 * epsilon.exp() < c2,
        TradeoffFunction::ApproxLdp { epsilon, delta } => {
            if delta == 0.0 {
                c1 == 0.0 || c1 * epsilon.exp() < c2
            } else {
                delta <= approx_delta_bound(c1, c2, epsilon) + 1e-15
            }
        }
        TradeoffFunction::GaussianLdp { .. } => {
            let gap = |beta: f64| {
                let conj = g.conjugate_at_neg_exp(beta).expect("beta >= 0");
                let rhs = (c2 - c1 * beta.exp()) * (1.0 - c1) / (c2 - c1);
                1.0 + conj - rhs
            };
            let hi = beta_search_max(c2, g);
            let (_, min_gap) = minimize_scalar(gap, 0.0, hi, 512, 1e-12)?;
            min_gap <= 0.0
        }
    })
}

/// Largest delta for which the approximate notion stays non-trivial.
pub fn approx_delta_bound(c1: f64, c2: f64, epsilon: f64) -> f64 {
    (c2 - c1 * epsilon.exp()) * (1.0 - c1) / (c2 - c1)
}

/// Closed-form mixing weight under pure privacy:
/// (e^eps - 1)/((1 - c1) e^eps + c2 - 1). `None` in the trivial regime.
pub fn lambda_star_pure(c1: f64, c2: f64, epsilon: f64) -> Result<Option<f64>> {
    require_integral_band_ratio(c1, c2)?;
    let g = TradeoffFunction::pure(epsilon)?;
    if !non_trivial(c1, c2, &g)? {
        return Ok(None);
    }
    let e = epsilon.exp();
    Ok(Some(clamp_unit((e - 1.0) / ((1.0 - c1) * e + c2 - 1.0))))
}

/// Closed-form mixing weight under approximate privacy:
/// (e^eps + delta (c2 - c1)/(1 - c1) - 1)/((1 - c1) e^eps + c2 - 1).
/// Exactly 1 at the non-triviality boundary; `None` past it.
pub fn lambda_star_approx(c1: f64, c2: f64, epsilon: f64, delta: f64) -> Result<Option<f64>> {
    require_integral_band_ratio(c1, c2)?;
    let g = TradeoffFunction::approx(epsilon, delta)?;
    if !non_trivial(c1, c2, &g)? {
        return Ok(None);
    }
    let e = epsilon.exp();
    let d = (c2 - c1) / (1.0 - c1);
    Ok(Some(clamp_unit(
        (e + d * delta - 1.0) / ((1.0 - c1) * e + c2 - 1.0),
    )))
}

/// Mixing weight for any privacy kind: closed forms for pure/approximate,
/// numeric infimum for Gaussian. `None` in the trivial regime.
pub fn lambda_star_functional(c1: f64, c2: f64, g: &TradeoffFunction) -> Result<Option<f64>> {
    match *g {
        TradeoffFunction::PureLdp { epsilon } => lambda_star_pure(c1, c2, epsilon),
        TradeoffFunction::ApproxLdp { epsilon, delta } => lambda_star_approx(c1, c2, epsilon, delta),
        TradeoffFunction::GaussianLdp { .. } => {
            require_integral_band_ratio(c1, c2)?;
            if !non_trivial(c1, c2, g)? {
                return Ok(None);
            }
            Ok(Some(lambda_star_infimum(c1, c2, g)?))
        }
    }
}

/// Worst-case risk from a mixing weight: r1 = c1/(1 - (1 - c1) lambda),
/// r2 = c2/((c2 - 1) lambda + 1), combined through the generator at r1, r2.
fn risk_from_lambda(c1: f64, c2: f64, lambda: f64, f: FDivergence) -> (f64, f64, f64) {
    let r1 = c1 / (1.0 - (1.0 - c1) * lambda);
    let r2 = c2 / ((c2 - 1.0) * lambda + 1.0);
    (r1, r2, risk_from_ratio_bounds(r1, r2, f))
}

/// Worst-case risk for outputs whose density ratio to the input spans
/// [r1, r2]: ((1 - r1) f(r2) + (r2 - 1) f(r1))/(r2 - r1).
pub fn risk_from_ratio_bounds(r1: f64, r2: f64, f: FDivergence) -> f64 {
    if (r2 - r1).abs() < 1e-14 {
        return 0.0;
    }
    let f_r1 = if r1 == 0.0 {
        f.f_at_zero()
    } else {
        crate::divergence::eval_generator(f, r1).expect("r1 >= 0")
    };
    let f_r2 = crate::divergence::eval_generator(f, r2).expect("r2 >= 0");
    let risk = ((1.0 - r1) * f_r2 + (r2 - 1.0) * f_r1) / (r2 - r1);
    if risk < 0.0 && risk > -1e-12 {
        0.0
    } else {
        risk
    }
}

fn trivial_report(c1: f64, c2: f64, g: &TradeoffFunction, f: FDivergence) -> RiskReport {
    RiskReport {
        lambda_star: 1.0,
        r1: 1.0,
        r2: 1.0,
        risk: 0.0,
        trivial: true,
        c1,
        c2,
        privacy: *g,
        divergence: f,
    }
}

/// Global minimax risk of the banded class under privacy `g` and
/// divergence `f`.
pub fn minimax_risk(c1: f64, c2: f64, g: &TradeoffFunction, f: FDivergence) -> Result<RiskReport> {
    match lambda_star_functional(c1, c2, g)? {
        None => Ok(trivial_report(c1, c2, g, f)),
        Some(lambda) => {
            let (r1, r2, risk) = risk_from_lambda(c1, c2, lambda, f);
            Ok(RiskReport {
                lambda_star: lambda,
                r1,
                r2,
                risk,
                trivial: false,
                c1,
                c2,
                privacy: *g,
                divergence: f,
            })
        }
    }
}

/// Local minimax risk under pure privacy for the clipping sampler on an
/// N_gamma neighborhood: band floor b = (gamma + 1)/(gamma + e^eps),
/// r1 = 1/(gamma b), r2 = gamma/(b e^eps). Trivial once eps >= 2 ln gamma.
pub fn local_risk_pure(gamma: u32, epsilon: f64, f: FDivergence) -> Result<RiskReport> {
    if gamma < 2 {
        return Err(Error::Domain(format!("local risk needs gamma >= 2, got {gamma}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let ga = gamma as f64;
    let g = TradeoffFunction::pure(epsilon)?;
    let (c1, c2) = (1.0 / ga, ga);
    if epsilon >= 2.0 * ga.ln() {
        return Ok(trivial_report(c1, c2, &g, f));
    }
    let e = epsilon.exp();
    let b = (ga + 1.0) / (ga + e);
    let r1 = 1.0 / (ga * b);
    let r2 = ga / (b * e);
    let risk = risk_from_ratio_bounds(r1, r2, f);
    // The same (r1, r2) arise from the linear-sampler weight on this class,
    // so the report remains internally consistent.
    let lambda = ga * (e - 1.0) / ((ga - 1.0) * (e + ga));
    Ok(RiskReport {
        lambda_star: clamp_unit(lambda),
        r1,
        r2,
        risk,
        trivial: false,
        c1,
        c2,
        privacy: g,
        divergence: f,
    })
}

/// Local minimax risk under any functional privacy notion: the global risk
/// on the class restricted to (1/gamma, gamma) around the center.
pub fn local_risk_functional(gamma: u32, g: &TradeoffFunction, f: FDivergence) -> Result<RiskReport> {
    if gamma < 2 {
        return Err(Error::Domain(format!("local risk needs gamma >= 2, got {gamma}")));
    }
    let ga = gamma as f64;
    minimax_risk(1.0 / ga, ga, g, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::KeyedRng;

    const E: f64 = std::f64::consts::E;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn pure_lambda_closed_values() {
        let l = lambda_star_pure(0.5, 2.0, 1.0).unwrap().unwrap();
        assert_close(l, (E - 1.0) / (0.5 * E + 1.0), 1e-15);
        assert_close(l, 0.728_350_654_297_487_3, 1e-12);

        // Full simplex over [k]: (e^eps - 1)/(e^eps + k - 1).
        let k = 20.0;
        let l = lambda_star_pure(0.0, k, 1.0).unwrap().unwrap();
        assert_close(l, (E - 1.0) / (E + k - 1.0), 1e-15);

        // Neighborhood bounds (1/gamma, gamma).
        let l = lambda_star_pure(1.0 / 3.0, 3.0, 1.0).unwrap().unwrap();
        assert_close(l, 3.0 * (E - 1.0) / (2.0 * (E + 3.0)), 1e-14);
        assert_close(l, 0.450_733_772_837_343_4, 1e-12);

        assert_eq!(lambda_star_pure(0.5, 2.0, 0.0).unwrap().unwrap(), 0.0);
    }

    #[test]
    fn pure_lambda_trivial_regime() {
        // gamma = 3: trivial once eps >= 2 ln 3.
        assert!(lambda_star_pure(1.0 / 3.0, 3.0, 2.2).unwrap().is_none());
        assert!(lambda_star_pure(1.0 / 3.0, 3.0, 2.1).unwrap().is_some());
    }

    #[test]
    fn approx_lambda_closed_values() {
        let l = lambda_star_approx(0.0, 20.0, 1.0, 0.01).unwrap().unwrap();
        assert_close(l, (E + 0.2 - 1.0) / (E + 19.0), 1e-15);
        assert_close(l, 0.088_325_671_598_265_24, 1e-12);

        // delta = 0 reduces to the pure form.
        let a = lambda_star_approx(0.25, 4.0, 0.7, 0.0).unwrap().unwrap();
        let p = lambda_star_pure(0.25, 4.0, 0.7).unwrap().unwrap();
        assert_close(a, p, 1e-15);

        // At the boundary delta the weight is exactly 1.
        let (c1, c2, eps) = (0.2, 2.6, 0.9);
        assert_eq!(require_integral_band_ratio(c1, c2).unwrap(), 3);
        let bound = approx_delta_bound(c1, c2, eps);
        let l = lambda_star_approx(c1, c2, eps, bound).unwrap().unwrap();
        assert_close(l, 1.0, 1e-12);
        assert!(lambda_star_approx(c1, c2, eps, bound + 1e-6).unwrap().is_none());
    }

    #[test]
    fn non_trivial_cases() {
        let g9 = TradeoffFunction::pure(1.0).unwrap();
        assert!(non_trivial(1.0 / 9.0, 9.0, &g9).unwrap());
        let hot = TradeoffFunction::pure(2.0 * 9.0_f64.ln() + 0.01).unwrap();
        assert!(!non_trivial(1.0 / 9.0, 9.0, &hot).unwrap());
        let boundary = TradeoffFunction::pure(2.0 * 9.0_f64.ln()).unwrap();
        assert!(!non_trivial(1.0 / 9.0, 9.0, &boundary).unwrap());
        // c1 = 0 is never trivial.
        for g in [
            TradeoffFunction::pure(50.0).unwrap(),
            TradeoffFunction::approx(3.0, 0.9).unwrap(),
            TradeoffFunction::gaussian(10.0).unwrap(),
        ] {
            assert!(non_trivial(0.0, 20.0, &g).unwrap(), "{g:?}");
        }
        // Gaussian on (1/3, 3): non-trivial at nu = 2 even though the
        // beta = 0 gap is positive.
        let g2 = TradeoffFunction::gaussian(2.0).unwrap();
        assert!(non_trivial(1.0 / 3.0, 3.0, &g2).unwrap());
    }

    #[test]
    fn numeric_infimum_matches_closed_forms() {
        let mut rng = KeyedRng::new(31);
        for _ in 0..40 {
            let m = 2.0 + (rng.next_u64() % 9) as f64;
            let c1 = rng.uniform(0.0, 0.8);
            let c2 = m * (1.0 - c1) + c1;
            let mut eps = rng.uniform(0.05, 3.0);
            while c1 > 0.0 && c1 * eps.exp() >= c2 {
                eps *= 0.5;
            }
            let g = TradeoffFunction::pure(eps).unwrap();
            let closed = lambda_star_pure(c1, c2, eps).unwrap().unwrap();
            let numeric = lambda_star_infimum(c1, c2, &g).unwrap();
            assert_close(closed, numeric, 1e-8);

            let delta = rng.next_f64() * approx_delta_bound(c1, c2, eps) * 0.999;
            let ga = TradeoffFunction::approx(eps, delta).unwrap();
            let closed = lambda_star_approx(c1, c2, eps, delta).unwrap().unwrap();
            let numeric = lambda_star_infimum(c1, c2, &ga).unwrap();
            assert_close(closed, numeric, 1e-8);
        }
    }

    #[test]
    fn gaussian_lambda_in_unit_interval_and_monotone_in_nu() {
        let mut prev = 0.0;
        for &nu in &[0.1, 0.5, 1.0, 1.5, 2.0] {
            let g = TradeoffFunction::gaussian(nu).unwrap();
            let l = lambda_star_functional(1.0 / 9.0, 9.0, &g).unwrap().unwrap();
            assert!((0.0..=1.0).contains(&l), "nu {nu}: {l}");
            assert!(l >= prev - 1e-12, "lambda not monotone in nu at {nu}");
            prev = l;
        }
    }

    #[test]
    fn gaussian_lambda_frozen_oracle() {
        // Independently computed by arbitrary-precision golden section on the
        // same objective.
        let g = TradeoffFunction::gaussian(1.0).unwrap();
        let l = lambda_star_functional(1.0 / 9.0, 9.0, &g).unwrap().unwrap();
        assert_close(l, 0.286_249_236_910_984_2, 1e-10);
        let rep = minimax_risk(1.0 / 9.0, 9.0, &g, FDivergence::Kl).unwrap();
        assert_close(rep.risk, 0.715_344_995_209_001, 1e-9);
    }

    #[test]
    fn global_kl_risk_closed_form() {
        let g = TradeoffFunction::pure(1.0).unwrap();
        let rep = minimax_risk(0.0, 20.0, &g, FDivergence::Kl).unwrap();
        assert!(!rep.trivial);
        assert_close(rep.risk, (1.0 + 19.0 / E).ln(), 1e-12);
        assert_close(rep.risk, 2.078_154_386_433_002, 1e-12);
        assert_close(rep.r1, 0.0, 0.0);
        assert_close(rep.r2, (E + 19.0) / E, 1e-12);
    }

    #[test]
    fn risk_at_zero_epsilon() {
        let g = TradeoffFunction::pure(0.0).unwrap();
        let k = 20.0;
        let rep = minimax_risk(0.0, k, &g, FDivergence::Kl).unwrap();
        assert_close(rep.lambda_star, 0.0, 1e-12);
        assert_close(rep.r1, 0.0, 0.0);
        assert_close(rep.r2, k, 1e-12);
        assert_close(rep.risk, k.ln(), 1e-12);
    }

    #[test]
    fn tv_risk_matches_two_point_form() {
        let g = TradeoffFunction::pure(0.8).unwrap();
        let rep = minimax_risk(0.2, 2.6, &g, FDivergence::TotalVariation).unwrap();
        let expected = (rep.r2 - 1.0) * (1.0 - rep.r1) / (rep.r2 - rep.r1);
        assert_close(rep.risk, expected, 1e-13);
    }

    #[test]
    fn local_pure_risk_frozen_oracle() {
        let rep = local_risk_pure(9, 1.0, FDivergence::Kl).unwrap();
        assert_close(rep.r1, (E + 9.0) / 90.0, 1e-15);
        assert_close(rep.r2, 9.0 * (E + 9.0) / (10.0 * E), 1e-14);
        assert_close(rep.risk, 1.016_344_740_609_404_6, 1e-12);
        let tv = local_risk_pure(9, 1.0, FDivergence::TotalVariation).unwrap();
        assert_close(tv.risk, 0.668_030_683_315_926_1, 1e-12);
        let h2 = local_risk_pure(9, 1.0, FDivergence::SquaredHellinger).unwrap();
        assert_close(h2.risk, 0.531_900_332_846_678_4, 1e-12);
    }

    #[test]
    fn local_pure_risk_vanishes_at_privacy_ceiling() {
        for &gamma in &[3u32, 9] {
            let ceiling = 2.0 * (gamma as f64).ln();
            let near = local_risk_pure(gamma, ceiling - 1e-6, FDivergence::Kl).unwrap();
            assert!(near.risk < 1e-10, "risk {}", near.risk);
            let at = local_risk_pure(gamma, ceiling, FDivergence::Kl).unwrap();
            assert!(at.trivial);
            assert_eq!(at.risk, 0.0);
        }
    }

    #[test]
    fn local_pure_matches_band_risk_at_zero_epsilon() {
        let a = local_risk_pure(9, 0.0, FDivergence::Kl).unwrap();
        let g = TradeoffFunction::pure(0.0).unwrap();
        let b = minimax_risk(1.0 / 9.0, 9.0, &g, FDivergence::Kl).unwrap();
        assert_close(a.risk, b.risk, 1e-12);
    }

    #[test]
    fn local_functional_delegates() {
        let g = TradeoffFunction::pure(1.0).unwrap();
        let a = local_risk_functional(9, &g, FDivergence::Kl).unwrap();
        let b = minimax_risk(1.0 / 9.0, 9.0, &g, FDivergence::Kl).unwrap();
        assert_close(a.risk, b.risk, 1e-14);
        // The linear local sampler's worst case is never below the clip
        // sampler's (they agree in worst case on this class).
        let c = local_risk_pure(9, 1.0, FDivergence::Kl).unwrap();
        assert!(a.risk >= c.risk - 1e-9);
    }

    #[test]
    fn risk_monotonicity() {
        let ks = [6.0, 10.0, 20.0, 50.0];
        let mut prev = 0.0;
        for &k in &ks {
            let g = TradeoffFunction::pure(1.0).unwrap();
            let r = minimax_risk(0.0, k, &g, FDivergence::Kl).unwrap().risk;
            assert!(r >= prev, "not non-decreasing in k");
            prev = r;
        }
        let mut prev = f64::INFINITY;
        for &eps in &[0.1, 0.5, 1.0, 2.0, 3.0] {
            let g = TradeoffFunction::pure(eps).unwrap();
            let r = minimax_risk(0.0, 20.0, &g, FDivergence::Kl).unwrap().risk;
            assert!(r <= prev, "not non-increasing in eps");
            prev = r;
        }
        let mut prev = f64::INFINITY;
        for &delta in &[0.0, 0.005, 0.01, 0.02] {
            let g = TradeoffFunction::approx(1.0, delta).unwrap();
            let r = minimax_risk(0.0, 20.0, &g, FDivergence::Kl).unwrap().risk;
            assert!(r <= prev + 1e-12, "not non-increasing in delta");
            prev = r;
        }
    }

    #[test]
    fn report_ratio_bounds_bracket_one() {
        let mut rng = KeyedRng::new(5);
        for _ in 0..50 {
            let m = 2.0 + (rng.next_u64() % 9) as f64;
            let c1 = rng.uniform(0.0, 0.8);
            let c2 = m * (1.0 - c1) + c1;
            let mut eps = rng.uniform(0.05, 2.5);
            while c1 > 0.0 && c1 * eps.exp() >= c2 {
                eps *= 0.5;
            }
            let g = TradeoffFunction::pure(eps).unwrap();
            let rep = minimax_risk(c1, c2, &g, FDivergence::SquaredHellinger).unwrap();
            assert!(rep.r1 <= 1.0 + 1e-12 && rep.r2 >= 1.0 - 1e-12);
            assert!((0.0..=1.0).contains(&rep.lambda_star));
            assert!(rep.risk >= 0.0);
        }
    }

    #[test]
    fn integrality_enforced_and_widening_works() {
        assert!(require_integral_band_ratio(0.3, 2.0).is_err());
        let c1 = widen_c1_to_integral(0.4, 5.0).unwrap();
        assert_close((5.0 - c1) / (1.0 - c1), 7.0, 1e-12);
        assert!(c1 <= 0.4);
        // Already integral: unchanged.
        assert_eq!(widen_c1_to_integral(0.5, 2.0).unwrap(), 0.5);
        // Infeasible by shrinking c1 alone.
        assert!(widen_c1_to_integral(0.2, 1.5).is_err());
    }

    #[test]
    fn bad_bounds_rejected() {
        let g = TradeoffFunction::pure(1.0).unwrap();
        assert!(minimax_risk(-0.1, 2.0, &g, FDivergence::Kl).is_err());
        assert!(minimax_risk(0.5, 0.9, &g, FDivergence::Kl).is_err());
        assert!(minimax_risk(1.0, 2.0, &g, FDivergence::Kl).is_err());
    }
}
