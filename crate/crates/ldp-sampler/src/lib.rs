//! Locally private sampling toolkit.
//!
//! A client holding a distribution P releases a single draw from a privatized
//! distribution Q(P). This crate implements the minimax-optimal samplers for
//! banded distribution classes and for neighborhoods around a public
//! reference, under pure, approximate, and Gaussian local privacy; the
//! closed-form and numeric worst-case risks that go with them; and a
//! reproducible experiment harness comparing local against global samplers on
//! finite spaces and Laplace-mixture inputs.

// Validation guards are written as negated comparisons so NaN inputs fail
// them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod divergence;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod risk;
pub mod samplers;
pub mod tradeoff;

pub use distributions::{
    generate_random_mixture, DiscretePmf, LaplaceMixture, MixtureGenConfig, Neighborhood,
    ReferenceDist, UniverseSpec,
};
pub use divergence::{
    divergence_continuous, divergence_discrete, e_gamma_continuous, e_gamma_discrete,
    eval_generator, FDivergence, QuadratureConfig, Scheme,
};
pub use error::{Error, Result};
pub use risk::{
    lambda_star_approx, lambda_star_functional, lambda_star_infimum, lambda_star_pure,
    local_risk_functional, local_risk_pure, minimax_risk, non_trivial, RiskReport,
};
pub use samplers::{
    local_apply_mixture, local_apply_pmf, solve_normalizer, verify_ldp_discrete, ClipSampler,
    Draws, LinearSampler, LocalSamplerKind, SamplerOutput,
};
pub use tradeoff::TradeoffFunction;
