//! Sampler constructions: linear mixtures toward a reference, non-linear
//! clipping with a solved normalizer, neighborhood-gated local wrappers, and
//! the privacy verification harness for discrete domains.

use serde::Serialize;
use serde_json::json;

use crate::distributions::{
    band_worst_ratio_on_grid, DiscretePmf, LaplaceMixture, Neighborhood, ReferenceDist,
    UniverseSpec,
};
use crate::divergence::{QuadratureConfig, Scheme};
use crate::error::{Error, Result};
use crate::numerics::{bisect, Bracket, KeyedRng};
use crate::risk::lambda_star_functional;
use crate::tradeoff::TradeoffFunction;

/// How an output distribution was produced.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub sampler: &'static str,
    pub privacy: TradeoffFunction,
    pub c1: f64,
    pub c2: f64,
    /// Mixing weight (linear sampler).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Normalizing constant (clip sampler).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_p: Option<f64>,
    /// Output density-ratio band against the reference (clip sampler).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<(f64, f64)>,
}

/// A privatized output distribution plus a draw interface.
#[derive(Clone, Debug)]
pub struct SamplerOutput {
    pub repr: OutputRepr,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub enum OutputRepr {
    Discrete(DiscretePmf),
    Continuous(ContinuousOutput),
}

/// Continuous outputs are kept as density ratios against the reference, never
/// re-discretized into standalone densities.
#[derive(Clone, Debug)]
pub enum ContinuousOutput {
    Linear {
        lambda: f64,
        input: LaplaceMixture,
        reference: LaplaceMixture,
    },
    Clipped {
        band_lo: f64,
        band_hi: f64,
        r_p: f64,
        input: LaplaceMixture,
        reference: LaplaceMixture,
    },
}

impl ContinuousOutput {
    /// dQ/d(reference) at x.
    pub fn ratio(&self, x: &[f64]) -> f64 {
        match self {
            ContinuousOutput::Linear {
                lambda,
                input,
                reference,
            } => {
                let h = reference.density(x);
                if h <= 0.0 {
                    return 0.0;
                }
                lambda * input.density(x) / h + (1.0 - lambda)
            }
            ContinuousOutput::Clipped {
                band_lo,
                band_hi,
                r_p,
                input,
                reference,
            } => {
                let h = reference.density(x);
                if h <= 0.0 {
                    return 0.0;
                }
                (input.density(x) / h / r_p).clamp(*band_lo, *band_hi)
            }
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let h = match self {
            ContinuousOutput::Linear { reference, .. } => reference.density(x),
            ContinuousOutput::Clipped { reference, .. } => reference.density(x),
        };
        self.ratio(x) * h
    }

    pub fn reference(&self) -> &LaplaceMixture {
        match self {
            ContinuousOutput::Linear { reference, .. } => reference,
            ContinuousOutput::Clipped { reference, .. } => reference,
        }
    }
}

/// Draws from a sampler output.
#[derive(Clone, Debug)]
pub enum Draws {
    Indices(Vec<usize>),
    Points(Vec<Vec<f64>>),
}

impl SamplerOutput {
    pub fn as_pmf(&self) -> Option<&DiscretePmf> {
        match &self.repr {
            OutputRepr::Discrete(pmf) => Some(pmf),
            OutputRepr::Continuous(_) => None,
        }
    }

    pub fn as_continuous(&self) -> Option<&ContinuousOutput> {
        match &self.repr {
            OutputRepr::Discrete(_) => None,
            OutputRepr::Continuous(c) => Some(c),
        }
    }

    /// Deterministic draws given a seed. Discrete outputs use inverse-CDF;
    /// continuous linear outputs mix draws from the input and the reference;
    /// clipped outputs use rejection from the reference with envelope
    /// constant equal to the band ceiling.
    pub fn draw(&self, rng_seed: u64, count: usize) -> Draws {
        let mut rng = KeyedRng::new(rng_seed).child("draw");
        match &self.repr {
            OutputRepr::Discrete(pmf) => Draws::Indices(pmf.sample(&mut rng, count)),
            OutputRepr::Continuous(out) => {
                let mut points = Vec::with_capacity(count);
                match out {
                    ContinuousOutput::Linear {
                        lambda,
                        input,
                        reference,
                    } => {
                        for _ in 0..count {
                            let x = if rng.bernoulli(*lambda) {
                                input.draw_one(&mut rng)
                            } else {
                                reference.draw_one(&mut rng)
                            };
                            points.push(x);
                        }
                    }
                    ContinuousOutput::Clipped {
                        band_hi, reference, ..
                    } => {
                        for _ in 0..count {
                            loop {
                                let x = reference.draw_one(&mut rng);
                                let accept = out.ratio(&x) / band_hi;
                                if rng.next_f64() < accept {
                                    points.push(x);
                                    break;
                                }
                            }
                        }
                    }
                }
                Draws::Points(points)
            }
        }
    }

    /// JSON form: discrete pmfs directly; continuous outputs as ratio values
    /// sampled on a grid, with the grid metadata attached.
    pub fn to_json(&self, grid: Option<&QuadratureConfig>) -> Result<serde_json::Value> {
        match &self.repr {
            OutputRepr::Discrete(pmf) => Ok(json!({
                "kind": "discrete",
                "pmf": pmf.probs(),
                "provenance": self.provenance,
            })),
            OutputRepr::Continuous(out) => {
                let grid = grid.ok_or_else(|| {
                    Error::Config("serializing a continuous output requires a grid".into())
                })?;
                let mut ratios = Vec::with_capacity(grid.node_count());
                grid.for_each_node(|x, _| ratios.push(out.ratio(x)));
                Ok(json!({
                    "kind": "continuous",
                    "grid": grid,
                    "ratio_values": ratios,
                    "provenance": self.provenance,
                }))
            }
        }
    }
}

/// The mixture sampler Q(P) = lambda P + (1 - lambda) reference.
#[derive(Clone, Debug)]
pub struct LinearSampler {
    pub lambda: f64,
    pub universe: UniverseSpec,
    pub privacy: TradeoffFunction,
}

impl LinearSampler {
    /// Minimax-optimal weight for the class and privacy notion. In the
    /// trivial regime the weight is 1 (the identity is already private).
    pub fn minimax(universe: UniverseSpec, privacy: TradeoffFunction) -> Result<Self> {
        let lambda = lambda_star_functional(universe.c1, universe.c2, &privacy)?.unwrap_or(1.0);
        Ok(LinearSampler {
            lambda,
            universe,
            privacy,
        })
    }

    /// Any weight not exceeding the minimax one keeps the privacy guarantee.
    pub fn with_lambda(
        universe: UniverseSpec,
        privacy: TradeoffFunction,
        lambda: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("lambda must be in [0, 1], got {lambda}")));
        }
        Ok(LinearSampler {
            lambda,
            universe,
            privacy,
        })
    }

    fn provenance(&self, sampler: &'static str) -> Provenance {
        Provenance {
            sampler,
            privacy: self.privacy,
            c1: self.universe.c1,
            c2: self.universe.c2,
            lambda: Some(self.lambda),
            r_p: None,
            band: None,
        }
    }

    pub fn apply_pmf(&self, p: &DiscretePmf) -> Result<SamplerOutput> {
        let reference = match &self.universe.reference {
            ReferenceDist::Discrete { pmf } => pmf,
            ReferenceDist::Continuous { .. } => {
                return Err(Error::Shape("sampler reference is continuous, input is a pmf".into()))
            }
        };
        if !self.universe.contains_pmf(p)? {
            return Err(membership_error_pmf(p, reference, self.universe.c1, self.universe.c2));
        }
        let mixed: Vec<f64> = p
            .probs()
            .iter()
            .zip(reference.probs())
            .map(|(&pi, &hi)| self.lambda * pi + (1.0 - self.lambda) * hi)
            .collect();
        Ok(SamplerOutput {
            repr: OutputRepr::Discrete(DiscretePmf::new(mixed)?),
            provenance: self.provenance("linear"),
        })
    }

    pub fn apply_mixture(
        &self,
        p: &LaplaceMixture,
        grid: &QuadratureConfig,
    ) -> Result<SamplerOutput> {
        let reference = match &self.universe.reference {
            ReferenceDist::Discrete { .. } => {
                return Err(Error::Shape("sampler reference is discrete, input is a density".into()))
            }
            ReferenceDist::Continuous { mixture } => mixture.clone(),
        };
        if !self.universe.contains_density(p, grid)? {
            return Err(membership_error_density(
                p,
                &reference,
                self.universe.c1,
                self.universe.c2,
                grid,
            ));
        }
        Ok(SamplerOutput {
            repr: OutputRepr::Continuous(ContinuousOutput::Linear {
                lambda: self.lambda,
                input: p.clone(),
                reference,
            }),
            provenance: self.provenance("linear"),
        })
    }
}

/// The clipping sampler: dQ/d(reference) = clip(rho / r_P; b, b e^eps) with
/// r_P solved so the output has unit mass.
#[derive(Clone, Debug)]
pub struct ClipSampler {
    pub b: f64,
    pub epsilon: f64,
    pub universe: UniverseSpec,
}

impl ClipSampler {
    /// Band floor from the class bounds:
    /// b = (c2 - c1)/((e^eps - 1)(1 - c1) + c2 - c1).
    pub fn new(universe: UniverseSpec, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
        }
        let (c1, c2) = (universe.c1, universe.c2);
        let b = (c2 - c1) / ((epsilon.exp() - 1.0) * (1.0 - c1) + c2 - c1);
        Ok(ClipSampler {
            b,
            epsilon,
            universe,
        })
    }

    /// Neighborhood form: b = (gamma + 1)/(gamma + e^eps).
    pub fn local(nb: &Neighborhood, epsilon: f64) -> Result<Self> {
        ClipSampler::new(nb.as_universe()?, epsilon)
    }

    pub fn band_hi(&self) -> f64 {
        self.b * self.epsilon.exp()
    }

    fn provenance(&self, r_p: f64) -> Provenance {
        Provenance {
            sampler: "clip",
            privacy: TradeoffFunction::PureLdp { epsilon: self.epsilon },
            c1: self.universe.c1,
            c2: self.universe.c2,
            lambda: None,
            r_p: Some(r_p),
            band: Some((self.b, self.band_hi())),
        }
    }

    pub fn apply_pmf(&self, p: &DiscretePmf) -> Result<SamplerOutput> {
        let reference = match &self.universe.reference {
            ReferenceDist::Discrete { pmf } => pmf,
            ReferenceDist::Continuous { .. } => {
                return Err(Error::Shape("sampler reference is continuous, input is a pmf".into()))
            }
        };
        if !self.universe.contains_pmf(p)? {
            return Err(membership_error_pmf(p, reference, self.universe.c1, self.universe.c2));
        }
        let rho: Vec<f64> = p
            .probs()
            .iter()
            .zip(reference.probs())
            .map(|(&pi, &hi)| pi / hi)
            .collect();
        let b_eps = self.band_hi();
        let r_p = solve_normalizer(&rho, reference.probs(), self.b, b_eps)?;
        let clipped: Vec<f64> = rho
            .iter()
            .zip(reference.probs())
            .map(|(&r, &hi)| (r / r_p).clamp(self.b, b_eps) * hi)
            .collect();
        Ok(SamplerOutput {
            repr: OutputRepr::Discrete(DiscretePmf::normalized(clipped)?),
            provenance: self.provenance(r_p),
        })
    }

    pub fn apply_mixture(
        &self,
        p: &LaplaceMixture,
        grid: &QuadratureConfig,
    ) -> Result<SamplerOutput> {
        let reference = match &self.universe.reference {
            ReferenceDist::Discrete { .. } => {
                return Err(Error::Shape("sampler reference is discrete, input is a density".into()))
            }
            ReferenceDist::Continuous { mixture } => mixture.clone(),
        };
        if !self.universe.contains_density(p, grid)? {
            return Err(membership_error_density(
                p,
                &reference,
                self.universe.c1,
                self.universe.c2,
                grid,
            ));
        }
        let mut rho = Vec::with_capacity(grid.node_count());
        let mut masses = Vec::with_capacity(grid.node_count());
        grid.for_each_node(|x, w| {
            let h = reference.density(x);
            rho.push(if h > 0.0 { p.density(x) / h } else { 1.0 });
            masses.push(w * h);
        });
        let b_eps = self.band_hi();
        let r_p = solve_normalizer(&rho, &masses, self.b, b_eps)?;
        Ok(SamplerOutput {
            repr: OutputRepr::Continuous(ContinuousOutput::Clipped {
                band_lo: self.b,
                band_hi: b_eps,
                r_p,
                input: p.clone(),
                reference,
            }),
            provenance: self.provenance(r_p),
        })
    }
}

fn membership_error_pmf(p: &DiscretePmf, reference: &DiscretePmf, c1: f64, c2: f64) -> Error {
    let mut worst = 1.0;
    let mut excess = 0.0;
    for (&pi, &hi) in p.probs().iter().zip(reference.probs()) {
        if hi <= 0.0 {
            continue;
        }
        let r = pi / hi;
        let e = (c1 - r).max(r - c2);
        if e > excess {
            excess = e;
            worst = r;
        }
    }
    Error::Membership {
        worst_ratio: worst,
        band_lo: c1,
        band_hi: c2,
    }
}

fn membership_error_density(
    p: &LaplaceMixture,
    reference: &LaplaceMixture,
    c1: f64,
    c2: f64,
    grid: &QuadratureConfig,
) -> Error {
    let worst = band_worst_ratio_on_grid(reference, p, c1, c2, grid).unwrap_or(1.0);
    Error::Membership {
        worst_ratio: worst,
        band_lo: c1,
        band_hi: c2,
    }
}

/// Solve for r such that sum_i clip(rho_i / r; b, b_eps) * masses_i = 1.
///
/// G(r) is non-increasing with G(0+) = b_eps >= 1 and G(inf) = b <= 1, so the
/// bracket [min(rho)/b_eps, max(rho)/b] always sees a sign change.
pub fn solve_normalizer(rho: &[f64], masses: &[f64], b: f64, b_eps: f64) -> Result<f64> {
    if rho.len() != masses.len() {
        return Err(Error::Shape(format!(
            "ratio and mass vectors differ: {} vs {}",
            rho.len(),
            masses.len()
        )));
    }
    if !(b <= 1.0 + 1e-12 && b_eps >= 1.0 - 1e-12) {
        return Err(Error::Internal(format!(
            "normalizer needs b <= 1 <= b*e^eps, got [{b}, {b_eps}]"
        )));
    }
    if (b_eps - b).abs() < 1e-15 {
        // Degenerate band (eps = 0): output is the reference for any r.
        return Ok(1.0);
    }
    let total_mass: f64 = masses.iter().sum();
    // Aim for unit output mass. On quadrature grids the reference mass
    // carries the grid's own discretization error, so the reachable range
    // [b * total, b_eps * total] may just miss 1; clamp into it.
    let reach_lo = b * total_mass;
    let reach_hi = b_eps * total_mass;
    let span = reach_hi - reach_lo;
    let target = 1.0_f64.clamp(reach_lo + 1e-12 * span, reach_hi - 1e-12 * span);
    let g = |r: f64| -> f64 {
        let mut acc = 0.0;
        for (&ratio, &m) in rho.iter().zip(masses) {
            acc += (ratio / r).clamp(b, b_eps) * m;
        }
        acc - target
    };
    if g(1.0).abs() <= 1e-13 {
        return Ok(1.0);
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for &ratio in rho {
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let r_lo = (lo / b_eps).max(1e-12);
    let r_hi = (hi / b).max(r_lo * (1.0 + 1e-9));
    let bracket = Bracket::new(g, r_lo * (1.0 - 1e-12), r_hi * (1.0 + 1e-12), 1e-13).map_err(
        |_| Error::Internal(format!("normalizer bracket failed on [{r_lo}, {r_hi}]")),
    )?;
    Ok(bisect(g, &bracket, 1e-13))
}

/// Local sampler families over a neighborhood.
#[derive(Clone, Copy, Debug)]
pub enum LocalSamplerKind {
    /// Linear mixture toward the center, weight from the functional optimum.
    LinearFunctional(TradeoffFunction),
    /// Clipping sampler under pure privacy.
    NonLinearPure { epsilon: f64 },
}

fn local_sampler_pieces(
    kind: &LocalSamplerKind,
    nb: &Neighborhood,
) -> Result<(Option<LinearSampler>, Option<ClipSampler>)> {
    let universe = nb.as_universe()?;
    match kind {
        LocalSamplerKind::LinearFunctional(g) => {
            Ok((Some(LinearSampler::minimax(universe, *g)?), None))
        }
        LocalSamplerKind::NonLinearPure { epsilon } => {
            Ok((None, Some(ClipSampler::new(universe, *epsilon)?)))
        }
    }
}

/// Apply a local sampler with the default out-of-neighborhood policy:
/// membership outside the band is rejected with diagnostics.
pub fn local_apply_pmf(
    kind: &LocalSamplerKind,
    nb: &Neighborhood,
    p: &DiscretePmf,
) -> Result<SamplerOutput> {
    let (linear, clip) = local_sampler_pieces(kind, nb)?;
    match (linear, clip) {
        (Some(s), None) => s.apply_pmf(p),
        (None, Some(s)) => s.apply_pmf(p),
        _ => unreachable!(),
    }
}

/// Same policy for continuous inputs; the grid is used for both the
/// membership check and the normalizer solve.
pub fn local_apply_mixture(
    kind: &LocalSamplerKind,
    nb: &Neighborhood,
    p: &LaplaceMixture,
    grid: &QuadratureConfig,
) -> Result<SamplerOutput> {
    let (linear, clip) = local_sampler_pieces(kind, nb)?;
    match (linear, clip) {
        (Some(s), None) => s.apply_mixture(p, grid),
        (None, Some(s)) => s.apply_mixture(p, grid),
        _ => unreachable!(),
    }
}

/// Out-of-neighborhood hook: callers supply the projection onto the
/// neighborhood; in-neighborhood inputs pass through unchanged.
pub fn local_apply_pmf_or_project(
    kind: &LocalSamplerKind,
    nb: &Neighborhood,
    p: &DiscretePmf,
    project: impl FnOnce(&DiscretePmf, &Neighborhood) -> Result<DiscretePmf>,
) -> Result<SamplerOutput> {
    if nb.contains_pmf(p)? {
        local_apply_pmf(kind, nb, p)
    } else {
        let projected = project(p, nb)?;
        local_apply_pmf(kind, nb, &projected)
    }
}

/// Draw a random member of a discrete banded class: a Dirichlet(1,...,1)
/// direction mixed toward the reference just far enough to stay in the band.
pub fn random_class_member(class: &UniverseSpec, rng: &mut KeyedRng) -> Result<DiscretePmf> {
    let reference = match &class.reference {
        ReferenceDist::Discrete { pmf } => pmf,
        ReferenceDist::Continuous { .. } => {
            return Err(Error::Shape("random members need a discrete reference".into()))
        }
    };
    let k = reference.len();
    let raw: Vec<f64> = (0..k).map(|_| rng.exp1()).collect();
    let q = DiscretePmf::normalized(raw)?;
    let mut u_max = 1.0_f64;
    for (&qi, &hi) in q.probs().iter().zip(reference.probs()) {
        let ratio = qi / hi;
        if ratio > class.c2 {
            u_max = u_max.min((class.c2 - 1.0) / (ratio - 1.0));
        } else if ratio < class.c1 {
            u_max = u_max.min((1.0 - class.c1) / (1.0 - ratio));
        }
    }
    let u = rng.next_f64() * u_max * 0.999_999;
    let mixed: Vec<f64> = q
        .probs()
        .iter()
        .zip(reference.probs())
        .map(|(&qi, &hi)| u * qi + (1.0 - u) * hi)
        .collect();
    DiscretePmf::new(mixed)
}

/// The band-extreme member: c2 * reference mass on a block of cells carrying
/// reference mass (1 - c1)/(c2 - c1), c1 * reference elsewhere. Only exists
/// when that block is a whole number of uniform cells.
pub fn extreme_class_member(class: &UniverseSpec, block_start: usize) -> Result<DiscretePmf> {
    let reference = match &class.reference {
        ReferenceDist::Discrete { pmf } => pmf,
        ReferenceDist::Continuous { .. } => {
            return Err(Error::Shape("extreme members need a discrete reference".into()))
        }
    };
    let k = reference.len();
    let alpha = (1.0 - class.c1) / (class.c2 - class.c1);
    let cells = alpha * k as f64;
    let block = cells.round() as usize;
    if (cells - block as f64).abs() > 1e-9 || block == 0 {
        return Err(Error::Config(format!(
            "extreme member needs an integral cell count, got {cells}"
        )));
    }
    let probs: Vec<f64> = (0..k)
        .map(|i| {
            let in_block = (i + k - block_start % k) % k < block;
            let scale = if in_block { class.c2 } else { class.c1 };
            scale * reference.prob(i)
        })
        .collect();
    DiscretePmf::new(probs)
}

/// Worst observed LDP excess of a discrete sampler over random input pairs:
/// max over pairs and events of Q(A|P) - e^eps Q(A|P') - delta. Events are
/// exhaustive for k <= 12, singletons and complements above that.
pub fn verify_ldp_discrete(
    apply: impl Fn(&DiscretePmf) -> Result<DiscretePmf>,
    class: &UniverseSpec,
    epsilon: f64,
    delta: f64,
    trials: usize,
    rng_seed: u64,
) -> Result<f64> {
    let k = match &class.reference {
        ReferenceDist::Discrete { pmf } => pmf.len(),
        ReferenceDist::Continuous { .. } => {
            return Err(Error::Shape("verification harness is discrete-only".into()))
        }
    };
    let e_eps = epsilon.exp();
    let mut rng = KeyedRng::new(rng_seed).child("verify-ldp");
    let mut worst = f64::NEG_INFINITY;
    let alpha_cells = (1.0 - class.c1) / (class.c2 - class.c1) * k as f64;
    let extremes_available = (alpha_cells - alpha_cells.round()).abs() <= 1e-9;
    for trial in 0..trials {
        let draw_member = |rng: &mut KeyedRng, salt: usize| -> Result<DiscretePmf> {
            if extremes_available && (trial + salt).is_multiple_of(5) {
                extreme_class_member(class, rng.next_u64() as usize % k)
            } else {
                random_class_member(class, rng)
            }
        };
        let p = draw_member(&mut rng, 0)?;
        let p_alt = draw_member(&mut rng, 1)?;
        let q = apply(&p)?;
        let q_alt = apply(&p_alt)?;
        let excess = max_event_excess(&q, &q_alt, e_eps, delta, k);
        let excess_rev = max_event_excess(&q_alt, &q, e_eps, delta, k);
        worst = worst.max(excess).max(excess_rev);
    }
    Ok(worst)
}

fn max_event_excess(q: &DiscretePmf, q_alt: &DiscretePmf, e_eps: f64, delta: f64, k: usize) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    if k <= 12 {
        // All events except the empty set and the full space.
        let full: u64 = (1 << k) - 1;
        for mask in 1..full {
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..k {
                if mask & (1 << i) != 0 {
                    a += q.prob(i);
                    b += q_alt.prob(i);
                }
            }
            worst = worst.max(a - e_eps * b - delta);
        }
    } else {
        for i in 0..k {
            worst = worst.max(q.prob(i) - e_eps * q_alt.prob(i) - delta);
            worst = worst.max((1.0 - q.prob(i)) - e_eps * (1.0 - q_alt.prob(i)) - delta);
        }
    }
    worst
}

/// Convenience grid for 1-D continuous sampler work.
pub fn default_grid_1d() -> QuadratureConfig {
    QuadratureConfig::new(vec![(-30.0, 30.0)], 4096, Scheme::Trapezoid).expect("static config")
}
