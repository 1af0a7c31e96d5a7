//! Extremal processes with homogeneous max-increments, gamma subordinators
//! and their composition `X(t) = Y(T(t))`.
//!
//! Paths live on caller-supplied time grids. Replicate `r` of a batch draws
//! from substream `r` of the seed, so batches are reproducible whatever the
//! thread count.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::corefn::Branch;
use crate::distributions::{draw_power, LaplaceTransformSpec, MaxLaw, MaxSemiStableDF};
use crate::error::{Error, Result};
use crate::rng::{substream, SimRng};
use crate::stats::{ks_two_sample, KSReport};

/// Nondecreasing path of an extremal process sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Path of a nonnegative subordinator; `T(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinatorPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ExtremalPath {
    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

impl SubordinatorPath {
    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

fn validate_times(times: &[f64], strictly_positive_start: bool) -> Result<()> {
    let first = *times
        .first()
        .ok_or_else(|| Error::Domain("time grid is empty".into()))?;
    let start_ok = if strictly_positive_start {
        first > 0.0
    } else {
        first >= 0.0
    };
    if !start_ok || !first.is_finite() {
        return Err(Error::Domain(format!("invalid first time {first}")));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0] && w[1].is_finite())) {
        return Err(Error::Domain(format!(
            "times must be strictly increasing, got {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Durations between consecutive grid points, measured from time 0.
fn durations(times: &[f64]) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(times[0]).chain(times.windows(2).map(|w| w[1] - w[0]))
}

/// Running maximum of independent increments with `cdf^tau_k`.
fn max_recursion<L, R, I>(law: &L, taus: I, rng: &mut R) -> Vec<f64>
where
    L: MaxLaw + ?Sized,
    R: Rng + ?Sized,
    I: IntoIterator<Item = f64>,
{
    let mut current = law.branch().lower_edge();
    taus.into_iter()
        .map(|tau| {
            if tau > 0.0 {
                current = current.max(draw_power(law, tau, rng));
            }
            current
        })
        .collect()
}

fn ep_path_with<L: MaxLaw + ?Sized>(law: &L, times: &[f64], rng: &mut SimRng) -> ExtremalPath {
    ExtremalPath {
        times: times.to_vec(),
        values: max_recursion(law, durations(times), rng),
    }
}

/// One extremal-process path: `Y(t₀) ~ F^t₀`, then
/// `Y(t_{k+1}) = Y(t_k) ∨ Z_k` with `Z_k ~ F^(t_{k+1} - t_k)`.
pub fn simulate_ep_path<L: MaxLaw + ?Sized>(
    law: &L,
    times: &[f64],
    seed: u64,
    replicate: u64,
) -> Result<ExtremalPath> {
    validate_times(times, true)?;
    Ok(ep_path_with(law, times, &mut substream(seed, replicate)))
}

/// `n` independent paths, replicate `r` on substream `r`.
pub fn simulate_ep_paths<L: MaxLaw + ?Sized>(
    law: &L,
    times: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<ExtremalPath>> {
    validate_times(times, true)?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|r| ep_path_with(law, times, &mut substream(seed, r)))
        .collect())
}

fn gamma_increments<R: Rng + ?Sized>(beta: f64, times: &[f64], rng: &mut R) -> Vec<f64> {
    durations(times)
        .map(|dt| {
            if dt == 0.0 {
                0.0
            } else {
                Gamma::new(beta * dt, 1.0)
                    .expect("positive shape")
                    .sample(rng)
            }
        })
        .collect()
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma intensity must be positive, got {beta}")))
    }
}

fn cumulative(increments: &[f64]) -> Vec<f64> {
    increments
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect()
}

/// Gamma subordinator with `E exp(-s T(t)) = (1 + s)^(-βt)`: increments over
/// `(s, t]` are Gamma(shape β(t - s), scale 1).
pub fn simulate_gamma_subordinator(
    beta: f64,
    times: &[f64],
    seed: u64,
    replicate: u64,
) -> Result<SubordinatorPath> {
    check_beta(beta)?;
    validate_times(times, false)?;
    let mut rng = substream(seed, replicate);
    let values = cumulative(&gamma_increments(beta, times, &mut rng));
    Ok(SubordinatorPath {
        times: times.to_vec(),
        values,
    })
}

pub fn simulate_gamma_subordinators(
    beta: f64,
    times: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<SubordinatorPath>> {
    check_beta(beta)?;
    validate_times(times, false)?;
    (0..n as u64)
        .into_par_iter()
        .map(|r| simulate_gamma_subordinator(beta, times, seed, r))
        .collect()
}

fn compound_with<L: MaxLaw + ?Sized>(law: &L, beta: f64, times: &[f64], rng: &mut SimRng) -> ExtremalPath {
    let increments = gamma_increments(beta, times, rng);
    ExtremalPath {
        times: times.to_vec(),
        values: max_recursion(law, increments, rng),
    }
}

/// `X(t) = Y(T(t))`: a gamma subordinator path first, then max-increments
/// with exponents `ΔT_k`. An interval with `ΔT = 0` leaves `X` unchanged.
pub fn simulate_compound_ep<L: MaxLaw + ?Sized>(
    law: &L,
    beta: f64,
    times: &[f64],
    seed: u64,
    replicate: u64,
) -> Result<ExtremalPath> {
    check_beta(beta)?;
    validate_times(times, false)?;
    Ok(compound_with(law, beta, times, &mut substream(seed, replicate)))
}

pub fn simulate_compound_eps<L: MaxLaw + ?Sized>(
    law: &L,
    beta: f64,
    times: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<ExtremalPath>> {
    check_beta(beta)?;
    validate_times(times, false)?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|r| compound_with(law, beta, times, &mut substream(seed, r)))
        .collect())
}

/// Time-changes an existing subordinator path through the extremal process
/// of `law`.
pub fn time_change<L: MaxLaw + ?Sized>(law: &L, sub: &SubordinatorPath, seed: u64, replicate: u64) -> ExtremalPath {
    let mut rng = substream(seed, replicate);
    let increments = std::iter::once(sub.values[0]).chain(sub.values.windows(2).map(|w| w[1] - w[0]));
    ExtremalPath {
        times: sub.times.clone(),
        values: max_recursion(law, increments, &mut rng),
    }
}

/// Marginal law of the time-changed process: `{φ(-ln F(x))}^t`.
pub fn compound_cdf_analytic<L: MaxLaw + ?Sized>(
    phi: LaplaceTransformSpec,
    law: &L,
    t: f64,
    x: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    let s = law.neg_log_cdf(x);
    Ok((-t * phi.beta() * s.ln_1p()).exp())
}

/// Values at grid index `index` across a batch of paths.
pub fn marginal(paths: &[ExtremalPath], index: usize) -> Vec<f64> {
    paths.iter().map(|p| p.values[index]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfSimilarityReport {
    pub time_scale: f64,
    /// `H` in `Y(bt) =d b^H Y(t)`.
    pub exponent: f64,
    pub ks: KSReport,
    pub pass: bool,
}

/// Two-sample KS between draws of `Y(bt)` and `b^H` times draws of `Y(t)`,
/// with `H = 1/α` (Fréchet) or `-1/α` (Weibull). Exact for max-stable
/// laws; for a genuinely periodic `h` it holds only when `b` is a power of
/// the law's own time scale `a`.
pub fn self_similarity_check(
    law: &MaxSemiStableDF,
    scale: f64,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<SelfSimilarityReport> {
    if !(scale > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("need b > 0 and t > 0, got {scale}, {t}")));
    }
    let alpha = law.psi().alpha();
    let exponent = match law.branch() {
        Branch::Frechet => 1.0 / alpha,
        Branch::Weibull => -1.0 / alpha,
    };
    let mut rng_scaled = substream(seed, 0);
    let mut rng_base = substream(seed, 1);
    let at_scaled_time: Vec<f64> = (0..n)
        .map(|_| draw_power(law, scale * t, &mut rng_scaled))
        .collect();
    let space = scale.powf(exponent);
    let rescaled: Vec<f64> = (0..n)
        .map(|_| space * draw_power(law, t, &mut rng_base))
        .collect();
    let ks = ks_two_sample(&at_scaled_time, &rescaled)?;
    Ok(SelfSimilarityReport {
        time_scale: scale,
        exponent,
        pass: ks.pass,
        ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corefn::{Harmonic, PsiFunction};
    use crate::stats::ks_one_sample;
    use std::f64::consts::E;

    fn frechet(harmonics: Vec<Harmonic>) -> MaxSemiStableDF {
        MaxSemiStableDF::new(PsiFunction::from_ab(Branch::Frechet, 2.0, 2.0, 1.0, harmonics).unwrap())
    }

    #[test]
    fn ep_marginals_follow_powers() {
        let f = frechet(vec![]);
        let paths = simulate_ep_paths(&f, &[1.0, 2.0], 10_000, 101).unwrap();
        assert!(paths.iter().all(ExtremalPath::is_nondecreasing));
        let at1 = ks_one_sample(&marginal(&paths, 0), |x| (-1.0 / x).exp()).unwrap();
        let at2 = ks_one_sample(&marginal(&paths, 1), |x| (-2.0 / x).exp()).unwrap();
        assert!(at1.pass, "{at1:?}");
        assert!(at2.pass, "{at2:?}");
    }

    #[test]
    fn ep_rejects_bad_grids() {
        let f = frechet(vec![]);
        assert!(simulate_ep_path(&f, &[1.0, 1.0], 1, 0).is_err());
        assert!(simulate_ep_path(&f, &[0.0, 1.0], 1, 0).is_err());
        assert!(simulate_ep_path(&f, &[], 1, 0).is_err());
    }

    #[test]
    fn single_paths_match_batch_replicates() {
        let f = frechet(vec![Harmonic::new(0.1, 0.0)]);
        let times = [0.5, 1.0, 3.0];
        let batch = simulate_ep_paths(&f, &times, 5, 9).unwrap();
        for (r, p) in batch.iter().enumerate() {
            assert_eq!(p, &simulate_ep_path(&f, &times, 9, r as u64).unwrap());
        }
    }

    #[test]
    fn subordinator_mean_and_shape() {
        let paths = simulate_gamma_subordinators(2.0, &[0.0, 1.0], 10_000, 55).unwrap();
        assert!(paths.iter().all(|p| p.values[0] == 0.0 && p.is_nondecreasing()));
        let at1: Vec<f64> = paths.iter().map(|p| p.values[1]).collect();
        let mean = at1.iter().sum::<f64>() / at1.len() as f64;
        // Var T(1) = β = 2
        let se = (2.0f64 / 10_000.0).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn compound_with_zero_increment_keeps_value() {
        let f = frechet(vec![]);
        let sub = SubordinatorPath {
            times: vec![1.0, 2.0, 3.0],
            values: vec![0.7, 0.7, 1.9],
        };
        let x = time_change(&f, &sub, 3, 0);
        assert_eq!(x.values[0], x.values[1]);
        assert!(x.values[2] >= x.values[1]);
    }

    #[test]
    fn compound_analytic_examples() {
        let f = frechet(vec![]);
        let exp = LaplaceTransformSpec::Exponential;
        let g2 = LaplaceTransformSpec::gamma(2.0).unwrap();
        assert!((compound_cdf_analytic(exp, &f, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((compound_cdf_analytic(g2, &f, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        let one = compound_cdf_analytic(g2, &f, 1.0, 2.7).unwrap();
        let three = compound_cdf_analytic(g2, &f, 3.0, 2.7).unwrap();
        assert!((three - one.powi(3)).abs() < 1e-15);
        assert_eq!(compound_cdf_analytic(exp, &f, 1.0, -1.0).unwrap(), 0.0);
        assert!(compound_cdf_analytic(exp, &f, 0.0, 1.0).is_err());
    }

    #[test]
    fn self_similarity_examples() {
        let f = frechet(vec![]);
        assert!(self_similarity_check(&f, 2.0, 1.0, 10_000, 7).unwrap().pass);
        let same = self_similarity_check(&f, 1.0, 1.0, 2000, 7).unwrap();
        assert!(same.pass);
        let semi = frechet(vec![Harmonic::new(0.1, 0.0)]);
        assert!(self_similarity_check(&semi, 2.0, 1.0, 10_000, 7).unwrap().pass);
        assert!(!self_similarity_check(&semi, E, 1.0, 10_000, 7).unwrap().pass);
    }
}
