//! Max-semi-stable and max-semi-selfdecomposable laws on the real line.
//!
//! The crate builds laws `F(x) = exp{-ψ(x)}` whose exponent satisfies
//! `ψ(x) = a ψ(bx)`, mixes them through gamma Laplace transforms, extracts
//! the cofactors of the factorisation `F(x) = F(cx) H(x)`, and simulates the
//! processes built on top of them: extremal processes, their gamma
//! time-changes, and max-autoregressive series. Every structural identity
//! has a grid check and every simulation a Kolmogorov–Smirnov check.

// `!(x > 0.0)` is how the validators reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod corefn;
pub mod distributions;
mod error;
pub mod processes;
pub mod report;
pub mod rng;
pub mod stats;
pub mod timeseries;

pub use corefn::{alpha_from_ab, constancy_diagnostic, Branch, Harmonic, PeriodicLevel, PsiConfig, PsiFunction};
pub use distributions::{
    compose_phi_max, exp_max_semi_stable, sample, sample_power, semi_sd_cofactor_df, AnyLaw,
    CofactorDF, DistSpec, LaplaceTransformSpec, MaxLaw, MaxSemiStableDF, PhiMaxSemiStableDF,
};
pub use error::{Error, Result};
pub use report::IdentityReport;
