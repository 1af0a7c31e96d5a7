//! Goodness-of-fit and numerical verification utilities.

use serde::Serialize;

use crate::error::{Error, Result};

/// 5% asymptotic Kolmogorov constant.
pub const KS_CRIT_5PCT: f64 = 1.36;

/// Tolerance on adjacent decreases in [`monotone_df_check`].
pub const MONOTONE_TOL: f64 = 1e-12;

/// Tolerance on sign violations in [`cm_proxy`].
pub const CM_TOL: f64 = 1e-10;

pub const CM_MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSReport {
    pub statistic: f64,
    pub n: usize,
    pub threshold: f64,
    pub pass: bool,
}

impl KSReport {
    fn new(statistic: f64, n: usize, threshold: f64) -> Self {
        KSReport {
            statistic,
            n,
            threshold,
            pass: statistic < threshold,
        }
    }
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Fraction of samples `≤ x`.
pub fn ecdf(samples: &[f64], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let below = samples.iter().filter(|&&s| s <= x).count();
    Ok(below as f64 / samples.len() as f64)
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous reference
/// cdf, with the 5% asymptotic threshold `1.36/√n`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KSReport> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let xs = sorted(samples);
    let n = xs.len() as f64;
    let statistic = xs.iter().enumerate().fold(0.0_f64, |acc, (i, &x)| {
        let f = cdf(x);
        let upper = ((i + 1) as f64 / n - f).abs();
        let lower = (i as f64 / n - f).abs();
        acc.max(upper).max(lower)
    });
    Ok(KSReport::new(
        statistic,
        xs.len(),
        KS_CRIT_5PCT / n.sqrt(),
    ))
}

/// Two-sample statistic `sup |F_n - G_m|`; threshold
/// `1.36·√((n+m)/(nm))`, which is `1.36·√(2/n)` at equal sizes.
pub fn ks_two_sample(first: &[f64], second: &[f64]) -> Result<KSReport> {
    if first.is_empty() || second.is_empty() {
        return Err(Error::EmptyInput);
    }
    let xs = sorted(first);
    let ys = sorted(second);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0, 0);
    let mut statistic = 0.0_f64;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(KSReport::new(
        statistic,
        n.min(m),
        KS_CRIT_5PCT * ((nf + mf) / (nf * mf)).sqrt(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfCheckReport {
    /// Adjacent grid decreases larger than [`MONOTONE_TOL`].
    pub violations: usize,
    /// `G(min) ≤ 0.01`, `G(max) ≥ 0.99`, and every value in `[0, 1]`.
    pub limits_ok: bool,
    pub non_degenerate: bool,
    pub pass: bool,
}

/// Checks that `g` behaves like a distribution function on a sorted,
/// support-spanning grid.
pub fn monotone_df_check<G: Fn(f64) -> f64>(g: G, grid: &[f64]) -> DfCheckReport {
    let values: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
    let violations = values
        .windows(2)
        .filter(|w| !(w[1] >= w[0] - MONOTONE_TOL))
        .count();
    let in_unit = values.iter().all(|v| (0.0..=1.0).contains(v));
    let (first, last) = match (values.first(), values.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => (f64::NAN, f64::NAN),
    };
    let limits_ok = in_unit && first <= 0.01 && last >= 0.99;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let non_degenerate = hi - lo > 1e-9;
    DfCheckReport {
        violations,
        limits_ok,
        non_degenerate,
        pass: violations == 0 && limits_ok && non_degenerate,
    }
}

/// `n` points geometrically spaced between `lo` and `hi` (both positive).
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    let step = (h - l) / (n.max(2) - 1) as f64;
    (0..n).map(|i| (l + step * i as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmOrder {
    pub order: usize,
    /// Smallest `(-1)^k Δ^k φ₀` seen on the grid.
    pub min_value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmReport {
    pub orders: Vec<CmOrder>,
    pub pass: bool,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Finite-difference proxy for complete monotonicity: a Laplace transform
/// has `(-1)^k Δ_h^k φ₀(s) ≥ 0` for every step `h > 0`. Checked for
/// `k = 0..=max_order` at each grid point with the local grid spacing and
/// a quarter of it. Necessary, not sufficient.
pub fn cm_proxy<F: Fn(f64) -> f64>(phi0: F, s_grid: &[f64], max_order: usize) -> Result<CmReport> {
    if s_grid.len() < 64 {
        return Err(Error::Domain(format!(
            "cm_proxy needs at least 64 grid points, got {}",
            s_grid.len()
        )));
    }
    if max_order > CM_MAX_ORDER {
        return Err(Error::Domain(format!(
            "cm_proxy order capped at {CM_MAX_ORDER}, got {max_order}"
        )));
    }
    let steps: Vec<f64> = s_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(
            s_grid[s_grid.len() - 1] - s_grid[s_grid.len() - 2],
        ))
        .collect();
    let orders: Vec<CmOrder> = (0..=max_order)
        .map(|k| {
            let min_value = s_grid
                .iter()
                .zip(&steps)
                .flat_map(|(&s, &h)| [h, 0.25 * h].map(|step| (s, step)))
                .map(|(s, step)| {
                    // (-1)^k Δ^k f(s) = Σ_j (-1)^j C(k,j) f(s + j h)
                    (0..=k)
                        .map(|j| {
                            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                            sign * binomial(k, j) * phi0(s + j as f64 * step)
                        })
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            CmOrder {
                order: k,
                min_value,
                pass: min_value >= -CM_TOL,
            }
        })
        .collect();
    let pass = orders.iter().all(|o| o.pass);
    Ok(CmReport { orders, pass })
}
