//! f-divergence generators and divergence computation, exact for discrete
//! distributions and by tensor-grid quadrature for continuous densities.
//!
//! Extended-value conventions: f(0) is the right limit of the generator,
//! 0*f(0/0) = 0, and 0*f(a/0) = a * lim f(u)/u. Divergences are reported as a
//! finite value or an explicit `f64::INFINITY`, never clamped.

use serde::{Deserialize, Serialize};

use crate::distributions::DiscretePmf;
use crate::error::{Error, Result};

/// A named convex generator f with f(1) = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FDivergence {
    Kl,
    TotalVariation,
    SquaredHellinger,
    ChiSquared,
    HockeyStick { gamma: f64 },
}

impl FDivergence {
    /// The three divergences every comparison in the experiment suite uses.
    pub const STANDARD: [FDivergence; 3] = [
        FDivergence::Kl,
        FDivergence::TotalVariation,
        FDivergence::SquaredHellinger,
    ];

    pub fn hockey_stick(gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) {
            return Err(Error::Domain(format!("hockey-stick needs gamma >= 1, got {gamma}")));
        }
        Ok(FDivergence::HockeyStick { gamma })
    }

    /// Generator value f(t) for t > 0 (no domain checks; see [`eval_generator`]).
    fn f_at(&self, t: f64) -> f64 {
        match *self {
            FDivergence::Kl => t * t.ln(),
            FDivergence::TotalVariation => 0.5 * (t - 1.0).abs(),
            FDivergence::SquaredHellinger => {
                let d = t.sqrt() - 1.0;
                d * d
            }
            FDivergence::ChiSquared => (t - 1.0) * (t - 1.0),
            FDivergence::HockeyStick { gamma } => (t - gamma).max(0.0),
        }
    }

    /// lim_{t -> 0+} f(t).
    pub fn f_at_zero(&self) -> f64 {
        match *self {
            FDivergence::Kl => 0.0,
            FDivergence::TotalVariation => 0.5,
            FDivergence::SquaredHellinger => 1.0,
            FDivergence::ChiSquared => 1.0,
            FDivergence::HockeyStick { .. } => 0.0,
        }
    }

    /// lim_{u -> inf} f(u)/u, used to price mass where the second argument
    /// vanishes; +inf for KL and chi-squared.
    pub fn slope_at_infinity(&self) -> f64 {
        match *self {
            FDivergence::Kl => f64::INFINITY,
            FDivergence::TotalVariation => 0.5,
            FDivergence::SquaredHellinger => 1.0,
            FDivergence::ChiSquared => f64::INFINITY,
            FDivergence::HockeyStick { .. } => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match *self {
            FDivergence::Kl => "kl",
            FDivergence::TotalVariation => "tv",
            FDivergence::SquaredHellinger => "hellinger",
            FDivergence::ChiSquared => "chi2",
            FDivergence::HockeyStick { .. } => "hockey_stick",
        }
    }
}

/// Evaluate the generator at t >= 0 with the t = 0 limit convention.
pub fn eval_generator(d: FDivergence, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::Domain(format!("generator argument must be >= 0, got {t}")));
    }
    if let FDivergence::HockeyStick { gamma } = d {
        if !(gamma >= 1.0) {
            return Err(Error::Domain(format!("hockey-stick needs gamma >= 1, got {gamma}")));
        }
    }
    Ok(if t == 0.0 { d.f_at_zero() } else { d.f_at(t) })
}

/// Quadrature scheme for continuous integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Trapezoid,
    GaussLegendre,
}

/// A fixed tensor-product integration grid.
///
/// Deterministic by construction: the same config always produces the same
/// nodes and weights, which keeps experiment output reproducible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub bounds_per_axis: Vec<(f64, f64)>,
    pub points_per_axis: usize,
    pub scheme: Scheme,
}

impl QuadratureConfig {
    pub fn new(bounds_per_axis: Vec<(f64, f64)>, points_per_axis: usize, scheme: Scheme) -> Result<Self> {
        if bounds_per_axis.is_empty() {
            return Err(Error::Domain("quadrature needs at least one axis".into()));
        }
        for &(lo, hi) in &bounds_per_axis {
            if !(lo < hi) {
                return Err(Error::Domain(format!("axis bounds must satisfy lo < hi, got [{lo}, {hi}]")));
            }
        }
        if points_per_axis < 16 {
            return Err(Error::Domain(format!(
                "points_per_axis must be >= 16, got {points_per_axis}"
            )));
        }
        Ok(QuadratureConfig {
            bounds_per_axis,
            points_per_axis,
            scheme,
        })
    }

    /// Symmetric 1-D grid on [-half_width, half_width].
    pub fn symmetric_1d(half_width: f64, points: usize) -> Result<Self> {
        Self::new(vec![(-half_width, half_width)], points, Scheme::Trapezoid)
    }

    /// Symmetric n-D grid on [-half_width, half_width]^dim.
    pub fn symmetric(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        Self::new(vec![(-half_width, half_width); dim], points, Scheme::Trapezoid)
    }

    pub fn dim(&self) -> usize {
        self.bounds_per_axis.len()
    }

    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dim() as u32)
    }

    /// With the same points count but double resolution per axis.
    pub fn doubled(&self) -> Self {
        QuadratureConfig {
            bounds_per_axis: self.bounds_per_axis.clone(),
            points_per_axis: self.points_per_axis * 2,
            scheme: self.scheme,
        }
    }

    /// Nodes and weights for one axis.
    fn axis_rule(&self, axis: usize) -> (Vec<f64>, Vec<f64>) {
        let (lo, hi) = self.bounds_per_axis[axis];
        let n = self.points_per_axis;
        match self.scheme {
            Scheme::Trapezoid => {
                let h = (hi - lo) / (n - 1) as f64;
                let nodes: Vec<f64> = (0..n)
                    .map(|i| if i == n - 1 { hi } else { lo + h * i as f64 })
                    .collect();
                let mut weights = vec![h; n];
                weights[0] = 0.5 * h;
                weights[n - 1] = 0.5 * h;
                (nodes, weights)
            }
            Scheme::GaussLegendre => {
                let (xs, ws) = gauss_legendre(n);
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                (
                    xs.iter().map(|&x| mid + half * x).collect(),
                    ws.iter().map(|&w| half * w).collect(),
                )
            }
        }
    }

    /// Walk every tensor-grid node with its product weight.
    pub fn for_each_node(&self, mut f: impl FnMut(&[f64], f64)) {
        let dim = self.dim();
        let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..dim).map(|a| self.axis_rule(a)).collect();
        let n = self.points_per_axis;
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0f64; dim];
        loop {
            let mut w = 1.0;
            for a in 0..dim {
                x[a] = rules[a].0[idx[a]];
                w *= rules[a].1[idx[a]];
            }
            f(&x, w);
            // odometer increment
            let mut a = dim;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < n {
                    break;
                }
                idx[a] = 0;
                if a == 0 {
                    return;
                }
            }
        }
    }

    /// Evaluate a density on every node, returning (values, weights).
    pub fn sample_density(&self, density: impl Fn(&[f64]) -> f64) -> (Vec<f64>, Vec<f64>) {
        let mut vals = Vec::with_capacity(self.node_count());
        let mut weights = Vec::with_capacity(self.node_count());
        self.for_each_node(|x, w| {
            vals.push(density(x));
            weights.push(w);
        });
        (vals, weights)
    }
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Core kernel: sum of q * f(p/q) over aligned nonnegative mass vectors with
/// the extended-value conventions. Returns (value, absolute-continuity flag);
/// the flag is set when p puts mass where q has none. Callers own
/// normalization; pmfs and weighted grid samples both reduce to this.
pub fn divergence_masses(d: FDivergence, p: &[f64], q: &[f64]) -> (f64, bool) {
    assert_eq!(p.len(), q.len(), "mass vectors must be aligned");
    let slope = d.slope_at_infinity();
    let f0 = d.f_at_zero();
    let mut total = 0.0;
    let mut mismatch = false;
    for (&pi, &qi) in p.iter().zip(q) {
        if qi > 0.0 {
            if pi > 0.0 {
                total += qi * d.f_at(pi / qi);
            } else {
                total += qi * f0;
            }
        } else if pi > 0.0 {
            mismatch = true;
            if slope.is_infinite() {
                return (f64::INFINITY, true);
            }
            total += pi * slope;
        }
        // pi == qi == 0 contributes nothing: 0 * f(0/0) = 0.
    }
    (total, mismatch)
}

/// Exact f-divergence D_f(P || Q) between discrete distributions.
pub fn divergence_discrete(d: FDivergence, p: &DiscretePmf, q: &DiscretePmf) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "pmf supports differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    if let FDivergence::HockeyStick { gamma } = d {
        if !(gamma >= 1.0) {
            return Err(Error::Domain(format!("hockey-stick needs gamma >= 1, got {gamma}")));
        }
    }
    Ok(divergence_masses(d, p.probs(), q.probs()).0)
}

/// Quadrature result for a continuous divergence.
#[derive(Clone, Copy, Debug)]
pub struct ContinuousDivergence {
    pub value: f64,
    /// Set when p was positive at a grid point where q vanished.
    pub absolute_continuity_violated: bool,
}

/// f-divergence between continuous densities by tensor-grid quadrature.
pub fn divergence_continuous(
    d: FDivergence,
    p_density: impl Fn(&[f64]) -> f64,
    q_density: impl Fn(&[f64]) -> f64,
    cfg: &QuadratureConfig,
) -> Result<ContinuousDivergence> {
    if let FDivergence::HockeyStick { gamma } = d {
        if !(gamma >= 1.0) {
            return Err(Error::Domain(format!("hockey-stick needs gamma >= 1, got {gamma}")));
        }
    }
    let slope = d.slope_at_infinity();
    let f0 = d.f_at_zero();
    let mut total = 0.0;
    let mut mismatch = false;
    cfg.for_each_node(|x, w| {
        let p = p_density(x);
        let q = q_density(x);
        if q > 0.0 {
            if p > 0.0 {
                total += w * q * d.f_at(p / q);
            } else {
                total += w * q * f0;
            }
        } else if p > 0.0 {
            mismatch = true;
            if !slope.is_infinite() {
                total += w * p * slope;
            }
        }
    });
    let value = if mismatch && slope.is_infinite() {
        f64::INFINITY
    } else {
        total
    };
    Ok(ContinuousDivergence {
        value,
        absolute_continuity_violated: mismatch,
    })
}

/// Hockey-stick divergence between discrete distributions, computed from its
/// defining expectation form.
pub fn e_gamma_discrete(p: &DiscretePmf, q: &DiscretePmf, gamma: f64) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Domain(format!("e_gamma needs gamma >= 1, got {gamma}")));
    }
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "pmf supports differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| (pi - gamma * qi).max(0.0))
        .sum())
}

/// Same divergence through the signed-measure identity
/// (1/2) * sum |p - gamma q| - (gamma - 1)/2; used to cross-check.
pub fn e_gamma_discrete_alt(p: &DiscretePmf, q: &DiscretePmf, gamma: f64) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Domain(format!("e_gamma needs gamma >= 1, got {gamma}")));
    }
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "pmf supports differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    let abs_sum: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| (pi - gamma * qi).abs())
        .sum();
    Ok(0.5 * abs_sum - 0.5 * (gamma - 1.0))
}

/// Hockey-stick divergence between continuous densities by quadrature.
pub fn e_gamma_continuous(
    p_density: impl Fn(&[f64]) -> f64,
    q_density: impl Fn(&[f64]) -> f64,
    gamma: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Domain(format!("e_gamma needs gamma >= 1, got {gamma}")));
    }
    let mut total = 0.0;
    cfg.for_each_node(|x, w| {
        total += w * (p_density(x) - gamma * q_density(x)).max(0.0);
    });
    Ok(total)
}

/// Continuous counterpart of [`e_gamma_discrete_alt`], by quadrature.
pub fn e_gamma_continuous_alt(
    p_density: impl Fn(&[f64]) -> f64,
    q_density: impl Fn(&[f64]) -> f64,
    gamma: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Domain(format!("e_gamma needs gamma >= 1, got {gamma}")));
    }
    let mut abs_total = 0.0;
    cfg.for_each_node(|x, w| {
        abs_total += w * (p_density(x) - gamma * q_density(x)).abs();
    });
    Ok(0.5 * abs_total - 0.5 * (gamma - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::LaplaceMixture;

    fn pmf(v: &[f64]) -> DiscretePmf {
        DiscretePmf::new(v.to_vec()).unwrap()
    }

    #[test]
    fn generator_values() {
        assert_eq!(eval_generator(FDivergence::Kl, 1.0).unwrap(), 0.0);
        assert_eq!(eval_generator(FDivergence::TotalVariation, 3.0).unwrap(), 1.0);
        assert_eq!(
            eval_generator(FDivergence::HockeyStick { gamma: 2.0 }, 5.0).unwrap(),
            3.0
        );
        assert_eq!(eval_generator(FDivergence::Kl, 0.0).unwrap(), 0.0);
        assert_eq!(eval_generator(FDivergence::ChiSquared, 0.0).unwrap(), 1.0);
        assert!(eval_generator(FDivergence::Kl, -0.1).is_err());
        assert!(eval_generator(FDivergence::HockeyStick { gamma: 0.5 }, 1.0).is_err());
    }

    #[test]
    fn generator_zero_at_one_for_all_kinds() {
        for d in [
            FDivergence::Kl,
            FDivergence::TotalVariation,
            FDivergence::SquaredHellinger,
            FDivergence::ChiSquared,
            FDivergence::HockeyStick { gamma: 1.5 },
        ] {
            assert_eq!(eval_generator(d, 1.0).unwrap(), 0.0, "{d:?}");
        }
    }

    #[test]
    fn discrete_kl_cases() {
        let u = pmf(&[0.25; 4]);
        assert_eq!(divergence_discrete(FDivergence::Kl, &u, &u).unwrap(), 0.0);
        let point = pmf(&[1.0, 0.0, 0.0, 0.0]);
        let kl = divergence_discrete(FDivergence::Kl, &point, &u).unwrap();
        assert!((kl - 4.0_f64.ln()).abs() < 1e-12, "kl {kl}");
        // Reverse direction hits the infinite slope: KL(u || point) = inf.
        let rev = divergence_discrete(FDivergence::Kl, &u, &point).unwrap();
        assert!(rev.is_infinite());
    }

    #[test]
    fn discrete_tv_case() {
        let p = pmf(&[1.0, 0.0]);
        let q = pmf(&[0.5, 0.5]);
        let tv = divergence_discrete(FDivergence::TotalVariation, &p, &q).unwrap();
        assert!((tv - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let p = pmf(&[0.5, 0.5]);
        let q = pmf(&[0.25; 4]);
        assert!(matches!(
            divergence_discrete(FDivergence::Kl, &p, &q),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn e_gamma_hand_values() {
        let p = pmf(&[0.9, 0.1]);
        let q = pmf(&[0.5, 0.5]);
        assert!((e_gamma_discrete(&p, &q, 1.0).unwrap() - 0.4).abs() < 1e-15);
        assert!(e_gamma_discrete(&p, &q, 2.0).unwrap().abs() < 1e-15);
        let same = pmf(&[0.3, 0.7]);
        assert_eq!(e_gamma_discrete(&same, &same, 1.0).unwrap(), 0.0);
        assert!(e_gamma_discrete(&p, &q, 0.9).is_err());
    }

    #[test]
    fn continuous_identical_densities_vanish() {
        let m = LaplaceMixture::single(vec![0.0], 1.0).unwrap();
        let cfg = QuadratureConfig::symmetric_1d(30.0, 512).unwrap();
        for d in [FDivergence::Kl, FDivergence::SquaredHellinger] {
            let r = divergence_continuous(d, |x| m.density(x), |x| m.density(x), &cfg).unwrap();
            assert!(r.value.abs() < 1e-8, "{d:?}: {}", r.value);
            assert!(!r.absolute_continuity_violated);
        }
    }

    #[test]
    fn continuous_kl_matches_laplace_shift_closed_form() {
        let p = LaplaceMixture::single(vec![0.5], 1.0).unwrap();
        let q = LaplaceMixture::single(vec![0.0], 1.0).unwrap();
        let cfg = QuadratureConfig::symmetric_1d(30.0, 4096).unwrap();
        let r =
            divergence_continuous(FDivergence::Kl, |x| p.density(x), |x| q.density(x), &cfg).unwrap();
        let expected = 0.5 + (-0.5_f64).exp() - 1.0;
        assert!((r.value - expected).abs() < 1e-4, "{} vs {expected}", r.value);
    }

    #[test]
    fn quadrature_convergence_on_doubling() {
        let p = LaplaceMixture::single(vec![0.5], 1.0).unwrap();
        let q = LaplaceMixture::single(vec![0.0], 1.0).unwrap();
        let cfg = QuadratureConfig::symmetric_1d(30.0, 4096).unwrap();
        let coarse = divergence_continuous(FDivergence::Kl, |x| p.density(x), |x| q.density(x), &cfg)
            .unwrap()
            .value;
        let fine = divergence_continuous(
            FDivergence::Kl,
            |x| p.density(x),
            |x| q.density(x),
            &cfg.doubled(),
        )
        .unwrap()
        .value;
        assert!(((coarse - fine) / fine).abs() < 1e-4, "{coarse} vs {fine}");
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (xs, ws) = gauss_legendre(16);
        let quartic: f64 = xs.iter().zip(&ws).map(|(&x, &w)| w * x.powi(4)).sum();
        assert!((quartic - 0.4).abs() < 1e-13);
        let total: f64 = ws.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_scheme_on_divergence() {
        let p = LaplaceMixture::single(vec![0.5], 1.0).unwrap();
        let q = LaplaceMixture::single(vec![0.0], 1.0).unwrap();
        let cfg = QuadratureConfig::new(vec![(-30.0, 30.0)], 2048, Scheme::GaussLegendre).unwrap();
        let r =
            divergence_continuous(FDivergence::Kl, |x| p.density(x), |x| q.density(x), &cfg).unwrap();
        let expected = 0.5 + (-0.5_f64).exp() - 1.0;
        assert!((r.value - expected).abs() < 1e-4);
    }

    #[test]
    fn e_gamma_continuous_of_identical_is_zero() {
        let m = LaplaceMixture::single(vec![0.0], 1.0).unwrap();
        let cfg = QuadratureConfig::symmetric_1d(30.0, 1024).unwrap();
        let v = e_gamma_continuous(|x| m.density(x), |x| m.density(x), 1.0, &cfg).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn quadrature_config_validation() {
        assert!(QuadratureConfig::new(vec![(1.0, 0.0)], 64, Scheme::Trapezoid).is_err());
        assert!(QuadratureConfig::new(vec![(0.0, 1.0)], 8, Scheme::Trapezoid).is_err());
        assert!(QuadratureConfig::new(vec![], 64, Scheme::Trapezoid).is_err());
    }
}
