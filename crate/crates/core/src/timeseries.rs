//! Max-autoregressive series `X_n = ρ X_{n-1} ∨ ε_n` and the modified
//! scheme that skips the innovation with probability `p`.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    draw_power, semi_sd_cofactor_df, CofactorDF, LaplaceTransformSpec, MaxLaw, MaxSemiStableDF,
    PhiMaxSemiStableDF, IDENTITY_TOL,
};
use crate::error::{invalid, Error, Result};
use crate::report::IdentityReport;
use crate::rng::{open_unit, substream, SimRng};
use crate::stats::{ks_one_sample, KSReport};

/// Minimum replicate count for cross-sectional KS checks.
pub const MIN_REPLICATES: usize = 100;

pub const DEFAULT_BURN_IN: usize = 200;

/// Starting value of every replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    FromMarginal,
    Fixed(f64),
}

/// `replicates × (length + 1)`; row `r` holds `X_0, …, X_length`.
pub type SeriesMatrix = Vec<Vec<f64>>;

/// Standard scheme. The innovation law is the cofactor `H` with
/// `F(x) = F(x/ρ) H(x)`, which exists iff `F` is max-semi-SD(1/ρ).
#[derive(Debug, Clone)]
pub struct MaxAr1 {
    rho: f64,
    marginal: MaxSemiStableDF,
    innovation: CofactorDF,
    length: usize,
    burn_in: usize,
    init: Init,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() && rho != 1.0 {
        Ok(())
    } else {
        Err(invalid("rho > 0, rho != 1", format!("rho = {rho}")))
    }
}

impl MaxAr1 {
    pub fn new(rho: f64, marginal: MaxSemiStableDF, length: usize, burn_in: usize, init: Init) -> Result<Self> {
        check_rho(rho)?;
        let innovation = semi_sd_cofactor_df(&marginal, 1.0 / rho)?;
        Ok(MaxAr1 {
            rho,
            marginal,
            innovation,
            length,
            burn_in,
            init,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn marginal(&self) -> &MaxSemiStableDF {
        &self.marginal
    }

    pub fn innovation(&self) -> &CofactorDF {
        &self.innovation
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    /// `max |F(x) - F(x/ρ) F_ε(x)|` over `grid`.
    pub fn check_stationary_identity(&self, grid: &[f64]) -> IdentityReport {
        let max_err = grid
            .iter()
            .map(|&x| {
                let rhs = self.marginal.cdf(x / self.rho) * self.innovation.cdf(x);
                (self.marginal.cdf(x) - rhs).abs()
            })
            .fold(0.0, f64::max);
        IdentityReport::new("Eq8", max_err, IDENTITY_TOL)
    }

    fn replicate(&self, rng: &mut SimRng) -> Vec<f64> {
        let mut x = start(&self.marginal, self.init, rng);
        let mut row = Vec::with_capacity(self.length + 1);
        row.push(x);
        for _ in 0..self.length {
            x = (self.rho * x).max(draw_power(&self.innovation, 1.0, rng));
            row.push(x);
        }
        row
    }
}

fn start<L: MaxLaw + ?Sized>(marginal: &L, init: Init, rng: &mut SimRng) -> f64 {
    match init {
        Init::FromMarginal => draw_power(marginal, 1.0, rng),
        Init::Fixed(x0) => x0,
    }
}

/// Runs the standard recursion; replicate `r` uses substream `r`.
pub fn simulate_max_ar1(cfg: &MaxAr1, replicates: usize, seed: u64) -> SeriesMatrix {
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| cfg.replicate(&mut substream(seed, r)))
        .collect()
}

/// Modified scheme: with probability `p` keep `ρ X_{n-1}`, otherwise take
/// `ρ X_{n-1} ∨ ε_n` with `ε_n` drawn from the marginal itself.
#[derive(Debug, Clone)]
pub struct ModifiedMaxAr1 {
    rho: f64,
    p: f64,
    marginal: PhiMaxSemiStableDF,
    length: usize,
    burn_in: usize,
    init: Init,
}

impl ModifiedMaxAr1 {
    /// `marginal` must be exponential max-semi-stable with `a = 1/p` and
    /// `b = 1/ρ`.
    pub fn new(
        rho: f64,
        p: f64,
        marginal: PhiMaxSemiStableDF,
        length: usize,
        burn_in: usize,
        init: Init,
    ) -> Result<Self> {
        check_rho(rho)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("need p in (0, 1), got {p}")));
        }
        if marginal.phi() != LaplaceTransformSpec::Exponential {
            return Err(invalid(
                "exponential phi",
                format!("marginal uses {:?}", marginal.phi()),
            ));
        }
        let psi = marginal.psi();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        if rel(psi.a(), 1.0 / p) > 1e-12 {
            return Err(invalid("a = 1/p", format!("a = {}, 1/p = {}", psi.a(), 1.0 / p)));
        }
        if rel(psi.b(), 1.0 / rho) > 1e-12 {
            return Err(invalid("b = 1/rho", format!("b = {}, 1/rho = {}", psi.b(), 1.0 / rho)));
        }
        Ok(ModifiedMaxAr1 {
            rho,
            p,
            marginal,
            length,
            burn_in,
            init,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn marginal(&self) -> &PhiMaxSemiStableDF {
        &self.marginal
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    fn replicate(&self, rng: &mut SimRng) -> Vec<f64> {
        let mut x = start(&self.marginal, self.init, rng);
        let mut row = Vec::with_capacity(self.length + 1);
        row.push(x);
        for _ in 0..self.length {
            x *= self.rho;
            if open_unit(rng) >= self.p {
                x = x.max(draw_power(&self.marginal, 1.0, rng));
            }
            row.push(x);
        }
        row
    }
}

pub fn simulate_modified_max_ar1(cfg: &ModifiedMaxAr1, replicates: usize, seed: u64) -> SeriesMatrix {
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| cfg.replicate(&mut substream(seed, r)))
        .collect()
}

/// Draws `max(X_1, …, X_N) / c` with `N` geometric on `{1, 2, …}`,
/// `P(N = k) = p (1-p)^(k-1)`. When `F` is exponential max-semi-stable with
/// `a = 1/p`, `b = c`, the output law is `F` again.
pub fn geometric_max_sampler<L: MaxLaw + ?Sized>(law: &L, p: f64, c: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("need p in (0, 1], got {p}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("need c > 0, got {c}")));
    }
    let geometric = Geometric::new(p).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = substream(seed, 0);
    Ok((0..n)
        .map(|_| {
            let count = geometric.sample(&mut rng) + 1;
            let top = (0..count)
                .map(|_| draw_power(law, 1.0, &mut rng))
                .fold(f64::NEG_INFINITY, f64::max);
            top / c
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointReport {
    pub index: usize,
    pub ks: KSReport,
    pub pass: bool,
}

/// Default checkpoints `{0, burn_in/2, burn_in}`.
pub fn default_checkpoints(burn_in: usize) -> Vec<usize> {
    vec![0, burn_in / 2, burn_in]
}

/// One-sample KS of the cross-replicate slice at each checkpoint against
/// the marginal cdf. Slices across replicates are independent; values
/// within a series are not.
pub fn stationarity_report<F: Fn(f64) -> f64>(
    series: &[Vec<f64>],
    cdf: F,
    checkpoints: &[usize],
) -> Result<Vec<CheckpointReport>> {
    if series.len() < MIN_REPLICATES {
        return Err(Error::InsufficientReplicates {
            required: MIN_REPLICATES,
            got: series.len(),
        });
    }
    checkpoints
        .iter()
        .map(|&index| {
            let slice = series
                .iter()
                .map(|row| {
                    row.get(index).copied().ok_or_else(|| {
                        Error::Domain(format!("checkpoint {index} beyond series length {}", row.len()))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let ks = ks_one_sample(&slice, &cdf)?;
            Ok(CheckpointReport {
                index,
                pass: ks.pass,
                ks,
            })
        })
        .collect()
}

/// One step of the standard recursion applied to given draws.
pub fn one_step<R: Rng + ?Sized>(cfg: &MaxAr1, xs: &[f64], rng: &mut R) -> Vec<f64> {
    xs.iter()
        .map(|&x| (cfg.rho * x).max(draw_power(&cfg.innovation, 1.0, rng)))
        .collect()
}
