//! Distribution values: discrete pmfs, Laplace mixtures, reference-banded
//! universes, neighborhoods, and the randomized mixture generator used by the
//! continuous experiments.

use serde::{Deserialize, Serialize};

use crate::divergence::QuadratureConfig;
use crate::error::{Error, Result};
use crate::numerics::KeyedRng;

/// Multiplicative slack when certifying density-ratio band membership.
pub const BAND_SLACK: f64 = 1e-9;

/// A validated probability vector over at least two atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    probs: Vec<f64>,
}

impl DiscretePmf {
    /// Requires k >= 2, nonnegative entries, total mass 1 within 1e-12.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Shape(format!(
                "pmf needs at least two atoms, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Domain("pmf entries must be finite and nonnegative".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("pmf must sum to 1, got {sum}")));
        }
        Ok(DiscretePmf { probs })
    }

    /// Rescale a nonnegative weight vector to unit mass, then validate.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::Domain("cannot normalize a zero mass vector".into()));
        }
        for w in &mut weights {
            *w /= sum;
        }
        DiscretePmf::new(weights)
    }

    pub fn uniform(k: usize) -> Result<Self> {
        DiscretePmf::new(vec![1.0 / k as f64; k.max(1)])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Inverse-CDF draws.
    pub fn sample(&self, rng: &mut KeyedRng, count: usize) -> Vec<usize> {
        (0..count).map(|_| rng.categorical(&self.probs)).collect()
    }
}

/// Anything that can be evaluated as a probability density on R^n.
pub trait Density {
    fn dim(&self) -> usize;
    fn density(&self, x: &[f64]) -> f64;
}

/// A finite mixture of n-dimensional Laplace distributions sharing one scale.
///
/// Component density: (2b)^{-n} exp(-||x - m||_1 / b); coordinates are
/// independent, matching the l1-norm form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceMixture {
    pub dim: usize,
    pub scale: f64,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
}

impl LaplaceMixture {
    pub fn new(dim: usize, scale: f64, weights: Vec<f64>, means: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("mixture dimension must be positive".into()));
        }
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("mixture scale must be positive, got {scale}")));
        }
        if weights.is_empty() || weights.len() != means.len() {
            return Err(Error::Shape(format!(
                "weights ({}) and means ({}) must be nonempty and aligned",
                weights.len(),
                means.len()
            )));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::Domain("mixture weights must be finite and nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("mixture weights must sum to 1, got {sum}")));
        }
        let weights = weights.iter().map(|w| w / sum).collect();
        for m in &means {
            if m.len() != dim {
                return Err(Error::Shape(format!(
                    "mean dimension {} does not match mixture dimension {dim}",
                    m.len()
                )));
            }
        }
        Ok(LaplaceMixture {
            dim,
            scale,
            weights,
            means,
        })
    }

    /// Single Laplace component.
    pub fn single(mean: Vec<f64>, scale: f64) -> Result<Self> {
        let dim = mean.len();
        LaplaceMixture::new(dim, scale, vec![1.0], vec![mean])
    }

    /// Zero-mean reference of the given dimension and scale.
    pub fn reference(dim: usize, scale: f64) -> Result<Self> {
        LaplaceMixture::single(vec![0.0; dim], scale)
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        let norm = (2.0 * self.scale).powi(self.dim as i32);
        let mut total = 0.0;
        for (w, m) in self.weights.iter().zip(&self.means) {
            let l1: f64 = x.iter().zip(m).map(|(xi, mi)| (xi - mi).abs()).sum();
            total += w * (-l1 / self.scale).exp();
        }
        total / norm
    }

    /// Like [`density`](Self::density) but returns a shape error instead of
    /// panicking on dimension mismatch.
    pub fn density_checked(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Shape(format!(
                "point dimension {} does not match mixture dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.density(x))
    }

    /// Exact i.i.d. draws: pick a component by weight, then perturb each
    /// coordinate with an independent Laplace.
    pub fn sample(&self, rng_seed: u64, count: usize) -> Vec<Vec<f64>> {
        let mut rng = KeyedRng::new(rng_seed).child("mixture-sample");
        (0..count).map(|_| self.draw_one(&mut rng)).collect()
    }

    pub fn draw_one(&self, rng: &mut KeyedRng) -> Vec<f64> {
        let comp = rng.categorical(&self.weights);
        self.means[comp]
            .iter()
            .map(|m| m + self.scale * rng.laplace_std())
            .collect()
    }
}

impl Density for LaplaceMixture {
    fn dim(&self) -> usize {
        self.dim
    }

    fn density(&self, x: &[f64]) -> f64 {
        LaplaceMixture::density(self, x)
    }
}

/// Verify c1 * ref <= p <= c2 * ref at every node of the grid, with
/// multiplicative slack.
pub fn band_contains_on_grid(
    reference: &impl Density,
    p: &impl Density,
    c1: f64,
    c2: f64,
    grid: &QuadratureConfig,
) -> Result<bool> {
    if reference.dim() != p.dim() || grid.dim() != p.dim() {
        return Err(Error::Shape(format!(
            "dimension mismatch: reference {}, candidate {}, grid {}",
            reference.dim(),
            p.dim(),
            grid.dim()
        )));
    }
    let mut ok = true;
    grid.for_each_node(|x, _| {
        if !ok {
            return;
        }
        let h = reference.density(x);
        let v = p.density(x);
        if v < c1 * h * (1.0 - BAND_SLACK) - f64::MIN_POSITIVE
            || v > c2 * h * (1.0 + BAND_SLACK) + f64::MIN_POSITIVE
        {
            ok = false;
        }
    });
    Ok(ok)
}

/// Largest violation of the band on the grid, as a ratio v/h outside
/// [c1, c2]; `None` when the band holds everywhere.
pub fn band_worst_ratio_on_grid(
    reference: &impl Density,
    p: &impl Density,
    c1: f64,
    c2: f64,
    grid: &QuadratureConfig,
) -> Option<f64> {
    let mut worst: Option<f64> = None;
    let mut excess = 0.0;
    grid.for_each_node(|x, _| {
        let h = reference.density(x);
        if h <= 0.0 {
            return;
        }
        let r = p.density(x) / h;
        let e = (c1 * (1.0 - BAND_SLACK) - r).max(r - c2 * (1.0 + BAND_SLACK));
        if e > excess {
            excess = e;
            worst = Some(r);
        }
    });
    worst
}

/// The reference distribution of a universe: a uniform pmf or a continuous
/// density (Laplace mixtures cover every experiment in this crate).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceDist {
    Discrete { pmf: DiscretePmf },
    Continuous { mixture: LaplaceMixture },
}

/// A distribution class: everything whose density ratio against the
/// reference stays inside [c1, c2].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniverseSpec {
    pub c1: f64,
    pub c2: f64,
    pub reference: ReferenceDist,
}

impl UniverseSpec {
    pub fn new(c1: f64, c2: f64, reference: ReferenceDist) -> Result<Self> {
        if !((0.0..1.0).contains(&c1) && 1.0 < c2) {
            return Err(Error::Domain(format!(
                "universe bounds must satisfy 0 <= c1 < 1 < c2, got ({c1}, {c2})"
            )));
        }
        Ok(UniverseSpec { c1, c2, reference })
    }

    /// The simplex of all pmfs over [k]: bounds (0, k) against the uniform.
    pub fn full_simplex(k: usize) -> Result<Self> {
        UniverseSpec::new(
            0.0,
            k as f64,
            ReferenceDist::Discrete {
                pmf: DiscretePmf::uniform(k)?,
            },
        )
    }

    pub fn discrete_uniform(c1: f64, c2: f64, k: usize) -> Result<Self> {
        UniverseSpec::new(
            c1,
            c2,
            ReferenceDist::Discrete {
                pmf: DiscretePmf::uniform(k)?,
            },
        )
    }

    pub fn continuous(c1: f64, c2: f64, reference: LaplaceMixture) -> Result<Self> {
        UniverseSpec::new(c1, c2, ReferenceDist::Continuous { mixture: reference })
    }

    /// (c2 - c1) / (1 - c1); the risk formulas require this to be an integer.
    pub fn band_ratio(&self) -> f64 {
        (self.c2 - self.c1) / (1.0 - self.c1)
    }

    pub fn contains_pmf(&self, p: &DiscretePmf) -> Result<bool> {
        let reference = match &self.reference {
            ReferenceDist::Discrete { pmf } => pmf,
            ReferenceDist::Continuous { .. } => {
                return Err(Error::Shape("universe reference is continuous, input is a pmf".into()))
            }
        };
        if reference.len() != p.len() {
            return Err(Error::Shape(format!(
                "pmf supports differ: {} vs {}",
                reference.len(),
                p.len()
            )));
        }
        Ok(p.probs().iter().zip(reference.probs()).all(|(&pi, &hi)| {
            pi >= self.c1 * hi * (1.0 - BAND_SLACK) - f64::MIN_POSITIVE
                && pi <= self.c2 * hi * (1.0 + BAND_SLACK) + f64::MIN_POSITIVE
        }))
    }

    pub fn contains_density(&self, p: &impl Density, grid: &QuadratureConfig) -> Result<bool> {
        match &self.reference {
            ReferenceDist::Discrete { .. } => {
                Err(Error::Shape("universe reference is discrete, input is a density".into()))
            }
            ReferenceDist::Continuous { mixture } => {
                band_contains_on_grid(mixture, p, self.c1, self.c2, grid)
            }
        }
    }
}

/// The class N_gamma(P0): density ratio against the center within
/// [1/gamma, gamma] everywhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub center: ReferenceDist,
    pub gamma: f64,
}

impl Neighborhood {
    pub fn new(center: ReferenceDist, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) {
            return Err(Error::Domain(format!("neighborhood needs gamma >= 1, got {gamma}")));
        }
        Ok(Neighborhood { center, gamma })
    }

    pub fn around_uniform(k: usize, gamma: f64) -> Result<Self> {
        Neighborhood::new(
            ReferenceDist::Discrete {
                pmf: DiscretePmf::uniform(k)?,
            },
            gamma,
        )
    }

    pub fn around_mixture(center: LaplaceMixture, gamma: f64) -> Result<Self> {
        Neighborhood::new(ReferenceDist::Continuous { mixture: center }, gamma)
    }

    /// The equivalent banded universe with (c1, c2) = (1/gamma, gamma);
    /// needs gamma > 1 (at gamma = 1 the neighborhood is just the center).
    pub fn as_universe(&self) -> Result<UniverseSpec> {
        UniverseSpec::new(1.0 / self.gamma, self.gamma, self.center.clone())
    }

    /// Membership works for any gamma >= 1, including the degenerate
    /// gamma = 1 case where only the center itself qualifies.
    pub fn contains_pmf(&self, p: &DiscretePmf) -> Result<bool> {
        let center = match &self.center {
            ReferenceDist::Discrete { pmf } => pmf,
            ReferenceDist::Continuous { .. } => {
                return Err(Error::Shape("neighborhood center is continuous, input is a pmf".into()))
            }
        };
        if center.len() != p.len() {
            return Err(Error::Shape(format!(
                "pmf supports differ: {} vs {}",
                center.len(),
                p.len()
            )));
        }
        let (c1, c2) = (1.0 / self.gamma, self.gamma);
        Ok(p.probs().iter().zip(center.probs()).all(|(&pi, &hi)| {
            pi >= c1 * hi * (1.0 - BAND_SLACK) - f64::MIN_POSITIVE
                && pi <= c2 * hi * (1.0 + BAND_SLACK) + f64::MIN_POSITIVE
        }))
    }

    pub fn contains_density(&self, p: &impl Density, grid: &QuadratureConfig) -> Result<bool> {
        match &self.center {
            ReferenceDist::Discrete { .. } => {
                Err(Error::Shape("neighborhood center is discrete, input is a density".into()))
            }
            ReferenceDist::Continuous { mixture } => {
                band_contains_on_grid(mixture, p, 1.0 / self.gamma, self.gamma, grid)
            }
        }
    }
}

/// Configuration for the randomized Laplace-mixture generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureGenConfig {
    /// Hard cap on the component count.
    pub k_max: usize,
    /// Poisson mean for the (pre-truncation) component count.
    pub k0: f64,
    pub dim: usize,
    pub scale: f64,
    pub mean_region: MeanRegion,
}

/// Where component means live: [-1, 1] in one dimension, the unit l1 ball
/// otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanRegion {
    IntervalL1Ball,
}

impl MixtureGenConfig {
    pub fn new(k_max: usize, k0: f64, dim: usize, scale: f64) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::Domain("k_max must be at least 1".into()));
        }
        if !(k0 > 0.0) {
            return Err(Error::Domain(format!("k0 must be positive, got {k0}")));
        }
        if dim == 0 {
            return Err(Error::Domain("dim must be positive".into()));
        }
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {scale}")));
        }
        Ok(MixtureGenConfig {
            k_max,
            k0,
            dim,
            scale,
            mean_region: MeanRegion::IntervalL1Ball,
        })
    }
}

/// Uniform draw from the unit l1 ball by rejection from the bounding cube.
fn sample_l1_ball(rng: &mut KeyedRng, dim: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
        if x.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 {
            return x;
        }
    }
}

/// Draw a random mixture: component count min(Poisson(k0) + 1, k_max), means
/// uniform on [-1,1] (1-D) or the unit l1 ball, weights uniform on the
/// simplex via normalized unit exponentials. Deterministic per seed.
pub fn generate_random_mixture(cfg: &MixtureGenConfig, rng_seed: u64) -> Result<LaplaceMixture> {
    let mut rng = KeyedRng::new(rng_seed).child("mixture-gen");
    generate_random_mixture_with(cfg, &mut rng)
}

/// Same generator on a caller-provided stream (used for keyed per-client
/// streams inside experiments).
pub fn generate_random_mixture_with(
    cfg: &MixtureGenConfig,
    rng: &mut KeyedRng,
) -> Result<LaplaceMixture> {
    let k = ((rng.poisson(cfg.k0) + 1) as usize).min(cfg.k_max);
    let means: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            if cfg.dim == 1 {
                vec![rng.uniform(-1.0, 1.0)]
            } else {
                sample_l1_ball(rng, cfg.dim)
            }
        })
        .collect();
    let raw: Vec<f64> = (0..k).map(|_| rng.exp1()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    LaplaceMixture::new(cfg.dim, cfg.scale, weights, means)
}
