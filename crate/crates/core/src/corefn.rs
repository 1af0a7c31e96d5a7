//! The periodic level function `h` and the exponent function `ψ` of a
//! max-semi-stable law, together with the checks that everything else in
//! the crate relies on.
//!
//! A law of Fréchet type has `ψ(x) = x^(-α) h(ln x)` on `x > 0`, a law of
//! Weibull type has `ψ(x) = |x|^α h(ln |x|)` on `x < 0`. In both cases `h`
//! is periodic with period `|ln b|` and `ψ(x) = a ψ(bx)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::report::IdentityReport;

/// Grid density used for all pointwise validity checks on `h`.
pub const GRID_PER_PERIOD: usize = 4096;

/// Tolerance on the normalisation `a b^(∓α) = 1` and on the stored period.
pub const PARAM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Support `x > 0`, scale `b > 1`.
    Frechet,
    /// Support `x < 0`, scale `0 < b < 1`.
    Weibull,
}

impl Branch {
    /// Sign of the points in the support.
    pub(crate) fn sign(self) -> f64 {
        match self {
            Branch::Frechet => 1.0,
            Branch::Weibull => -1.0,
        }
    }

    /// +1 when `ψ` grows with `ln |x|`, -1 when it decays.
    pub(crate) fn log_slope(self) -> f64 {
        match self {
            Branch::Frechet => -1.0,
            Branch::Weibull => 1.0,
        }
    }

    pub fn in_support(self, x: f64) -> bool {
        match self {
            Branch::Frechet => x > 0.0,
            Branch::Weibull => x < 0.0,
        }
    }

    /// Left end of the support (`ℓ`); the value an extremal process
    /// takes before any time has elapsed.
    pub fn lower_edge(self) -> f64 {
        match self {
            Branch::Frechet => 0.0,
            Branch::Weibull => f64::NEG_INFINITY,
        }
    }
}

/// One sine term of `h`. The k-th entry of a harmonic list oscillates `k`
/// times per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Harmonic {
    pub fn new(amplitude: f64, phase: f64) -> Self {
        Harmonic { amplitude, phase }
    }
}

/// Positive bounded periodic function
/// `h(u) = base · (1 + Σ_k amp_k sin(2πk u / T + phase_k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicLevel {
    base: f64,
    harmonics: Vec<Harmonic>,
    period: f64,
}

impl PeriodicLevel {
    pub fn new(base: f64, harmonics: Vec<Harmonic>, period: f64) -> Result<Self> {
        if !(base.is_finite() && base > 0.0) {
            return Err(invalid("base > 0", format!("base = {base}")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(invalid("period > 0", format!("period = {period}")));
        }
        if let Some(bad) = harmonics
            .iter()
            .find(|hm| !(hm.amplitude.is_finite() && hm.phase.is_finite()))
        {
            return Err(invalid(
                "finite harmonics",
                format!("amplitude = {}, phase = {}", bad.amplitude, bad.phase),
            ));
        }
        let harmonics = harmonics
            .into_iter()
            .map(|hm| Harmonic::new(hm.amplitude, hm.phase.rem_euclid(TAU)))
            .collect();
        let level = PeriodicLevel {
            base,
            harmonics,
            period,
        };
        let (min, _) = level.grid_extrema();
        if !(min > 0.0) {
            return Err(invalid("h(u) > 0", format!("min over grid = {min}")));
        }
        Ok(level)
    }

    /// The max-stable case: `h ≡ base`.
    pub fn constant(base: f64, period: f64) -> Result<Self> {
        Self::new(base, Vec::new(), period)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn is_constant(&self) -> bool {
        self.harmonics.iter().all(|hm| hm.amplitude == 0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let w = TAU * u / self.period;
        let wave: f64 = self
            .harmonics
            .iter()
            .enumerate()
            .map(|(i, hm)| hm.amplitude * ((i + 1) as f64 * w + hm.phase).sin())
            .sum();
        self.base * (1.0 + wave)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let omega = TAU / self.period;
        let w = omega * u;
        let wave: f64 = self
            .harmonics
            .iter()
            .enumerate()
            .map(|(i, hm)| {
                let k = (i + 1) as f64;
                hm.amplitude * k * omega * (k * w + hm.phase).cos()
            })
            .sum();
        self.base * wave
    }

    /// Grid points `0, T/N, …, (N-1)T/N` over one period.
    pub fn period_grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..GRID_PER_PERIOD).map(move |i| self.period * i as f64 / GRID_PER_PERIOD as f64)
    }

    /// Minimum and maximum of `h` over the period grid.
    pub fn grid_extrema(&self) -> (f64, f64) {
        self.period_grid()
            .map(|u| self.eval(u))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// `u ↦ factor · h(u + shift)`, again a finite sine series with the same period.
    pub(crate) fn shifted_scaled(&self, shift: f64, factor: f64) -> Result<Self> {
        let w = TAU * shift / self.period;
        let harmonics = self
            .harmonics
            .iter()
            .enumerate()
            .map(|(i, hm)| Harmonic::new(hm.amplitude, hm.phase + (i + 1) as f64 * w))
            .collect();
        Self::new(self.base * factor, harmonics, self.period)
    }
}

/// Exponent function `ψ` of a max-semi-stable law.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiFunction {
    branch: Branch,
    alpha: f64,
    a: f64,
    b: f64,
    h: PeriodicLevel,
}

/// `α` solving `a b^(-α) = 1` (Fréchet) or `a b^α = 1` (Weibull).
pub fn alpha_from_ab(a: f64, b: f64, branch: Branch) -> Result<f64> {
    if !(a.is_finite() && a > 1.0) {
        return Err(Error::Domain(format!("need a > 1, got a = {a}")));
    }
    match branch {
        Branch::Frechet if b.is_finite() && b > 1.0 => Ok(a.ln() / b.ln()),
        Branch::Weibull if b > 0.0 && b < 1.0 => Ok(a.ln() / (1.0 / b).ln()),
        Branch::Frechet => Err(Error::Domain(format!("Frechet needs b > 1, got b = {b}"))),
        Branch::Weibull => Err(Error::Domain(format!(
            "Weibull needs 0 < b < 1, got b = {b}"
        ))),
    }
}

impl PsiFunction {
    /// Validating constructor. Checks the scale ranges, the normalisation
    /// `a b^(∓α) = 1`, that `h` has period `|ln b|`, and that `exp{-ψ}` is
    /// monotone (the slope condition on `h`).
    pub fn new(branch: Branch, alpha: f64, a: f64, b: f64, h: PeriodicLevel) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid("alpha > 0", format!("alpha = {alpha}")));
        }
        let implied = alpha_from_ab(a, b, branch).map_err(|e| match e {
            Error::Domain(d) => invalid("a > 1 and b on the branch side of 1", d),
            other => other,
        })?;
        let norm = match branch {
            Branch::Frechet => a * b.powf(-alpha),
            Branch::Weibull => a * b.powf(alpha),
        };
        if (norm - 1.0).abs() > PARAM_TOL {
            let invariant = match branch {
                Branch::Frechet => "a*b^(-alpha) = 1",
                Branch::Weibull => "a*b^(alpha) = 1",
            };
            return Err(invalid(
                invariant,
                format!("a = {a}, b = {b}, alpha = {alpha} gives {norm} (alpha implied by a, b: {implied})"),
            ));
        }
        let log_b = b.ln().abs();
        if (h.period() - log_b).abs() > PARAM_TOL * log_b {
            return Err(invalid(
                "period = |ln b|",
                format!("period = {}, |ln b| = {log_b}", h.period()),
            ));
        }
        let psi = PsiFunction {
            branch,
            alpha,
            a,
            b,
            h,
        };
        let margin = psi.slope_margin();
        if margin < -1e-12 * psi.h.base() {
            let invariant = match branch {
                Branch::Frechet => "h'(u) <= alpha*h(u)",
                Branch::Weibull => "h'(u) >= -alpha*h(u)",
            };
            return Err(invalid(
                invariant,
                format!("slope condition violated by {}", -margin),
            ));
        }
        Ok(psi)
    }

    /// Build from `(a, b)` with `α` and the period derived.
    pub fn from_ab(
        branch: Branch,
        a: f64,
        b: f64,
        base: f64,
        harmonics: Vec<Harmonic>,
    ) -> Result<Self> {
        let alpha = alpha_from_ab(a, b, branch)
            .map_err(|e| invalid("a > 1 and b on the branch side of 1", e.to_string()))?;
        let h = PeriodicLevel::new(base, harmonics, b.ln().abs())?;
        Self::new(branch, alpha, a, b, h)
    }

    /// Skips every check. Meant for building deliberately broken
    /// functions to exercise the diagnostics.
    pub fn new_unchecked(branch: Branch, alpha: f64, a: f64, b: f64, h: PeriodicLevel) -> Self {
        PsiFunction {
            branch,
            alpha,
            a,
            b,
            h,
        }
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn h(&self) -> &PeriodicLevel {
        &self.h
    }

    pub fn in_support(&self, x: f64) -> bool {
        self.branch.in_support(x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.in_support(x) {
            return Err(Error::Domain(format!(
                "x = {x} outside the {:?} support",
                self.branch
            )));
        }
        Ok(self.eval_on_support(x))
    }

    /// `ψ(x)` without the support check; callers guarantee `x` is in it.
    pub(crate) fn eval_on_support(&self, x: f64) -> f64 {
        let r = x.abs();
        r.powf(self.branch.log_slope() * self.alpha) * self.h.eval(r.ln())
    }

    /// `ln ψ(±e^t)`.
    pub(crate) fn log_eval(&self, t: f64) -> f64 {
        self.branch.log_slope() * self.alpha * t + self.h.eval(t).ln()
    }

    /// Smallest value over the period grid of `α h ∓ h'`; nonnegative iff
    /// `exp{-ψ}` is nondecreasing.
    pub fn slope_margin(&self) -> f64 {
        let h = &self.h;
        let s = -self.branch.log_slope();
        h.period_grid()
            .map(|u| self.alpha * h.eval(u) - s * h.derivative(u))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point `x` with `ln ψ(x) = log_s`. Uses the closed form when `h` is
    /// constant and the bracketed search otherwise.
    pub fn inverse_log(&self, log_s: f64) -> f64 {
        if self.h.is_constant() {
            self.inverse_log_closed_form(log_s)
                .expect("constant h has a closed-form inverse")
        } else {
            self.inverse_log_search(log_s)
        }
    }

    /// Closed-form inverse, available only for constant `h`.
    pub fn inverse_log_closed_form(&self, log_s: f64) -> Option<f64> {
        if !self.h.is_constant() {
            return None;
        }
        let d = self.branch.log_slope();
        let t = d * (log_s - self.h.base().ln()) / self.alpha;
        Some(self.branch.sign() * t.exp())
    }

    /// Monotone bisection in `t = ln |x|`. The bracket comes from the
    /// scaling relation: `ln ψ` moves by exactly `±ln a` per period, so the
    /// root sits in `[kT, (k+1)T]` for a `k` computed up front.
    pub fn inverse_log_search(&self, log_s: f64) -> f64 {
        let sign = self.branch.sign();
        let d = self.branch.log_slope();
        if log_s.is_nan() {
            return f64::NAN;
        }
        if log_s.is_infinite() {
            // log_s = +inf sends x to the lower edge, -inf to the upper edge.
            return sign * (d * log_s.signum() * f64::INFINITY).exp();
        }
        let period = self.h.period();
        let f = |t: f64| d * (self.log_eval(t) - log_s);
        let k = (d * (log_s - self.h.eval(0.0).ln()) / self.a.ln()).floor();
        let mut lo = k * period;
        let mut hi = lo + period;
        let mut guard = 0;
        while f(lo) > 0.0 && guard < 4096 {
            lo -= period;
            guard += 1;
        }
        while f(hi) < 0.0 && guard < 4096 {
            hi += period;
            guard += 1;
        }
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sign * (0.5 * (lo + hi)).exp()
    }

    /// `n` log-spaced support points spanning `periods` periods of `h`,
    /// centred at `x = ±1`.
    pub fn log_grid(&self, n: usize, periods: f64) -> Vec<f64> {
        let half = 0.5 * periods * self.h.period();
        let sign = self.branch.sign();
        log_spaced(-half, half, n)
            .into_iter()
            .map(|t| sign * t.exp())
            .collect()
    }

    /// Max relative error of `ψ(x) = a ψ(bx)` over a three-period log grid.
    pub fn check_scaling_identity(&self, grid_size: usize, tol: f64) -> IdentityReport {
        let grid_size = grid_size.max(2);
        let max_err = self
            .log_grid(grid_size, 3.0)
            .into_iter()
            .map(|x| {
                let lhs = self.eval_on_support(x);
                let rhs = self.a * self.eval_on_support(self.b * x);
                (lhs - rhs).abs() / lhs
            })
            .fold(0.0, f64::max);
        IdentityReport::new("Rem22", max_err, tol)
    }
}

pub(crate) fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Outcome of testing `h` for periodicity under two periods at once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyReport {
    /// `max h - min h ≤ tol` over one period.
    pub is_constant: bool,
    pub spread: f64,
    /// `max |h(u + T1) - h(u)|` over the grid.
    pub t1_violation: f64,
    pub t2_violation: f64,
    /// No `p/q` with `q ≤ 64` within `1e-9` of `T1/T2`.
    pub ratio_irrational: bool,
    /// Both periodicities hold and the ratio is irrational, so `h` must be
    /// constant.
    pub forces_constant: bool,
}

/// Best rational `p/q` with `q ≤ max_q` within `tol` of `r`, if any.
pub fn small_denominator_rational(r: f64, max_q: u32, tol: f64) -> Option<(i64, u32)> {
    (1..=max_q).find_map(|q| {
        let p = (r * q as f64).round();
        ((r - p / q as f64).abs() <= tol).then_some((p as i64, q))
    })
}

/// Detects whether `h` is periodic under two periods with irrational ratio,
/// in which case it must be constant.
pub fn constancy_diagnostic(h: &PeriodicLevel, t1: f64, t2: f64, tol: f64) -> Result<ConstancyReport> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::Domain(format!("need T1, T2 > 0, got {t1}, {t2}")));
    }
    let violation = |shift: f64| {
        h.period_grid()
            .map(|u| (h.eval(u + shift) - h.eval(u)).abs())
            .fold(0.0, f64::max)
    };
    let t1_violation = violation(t1);
    let t2_violation = violation(t2);
    let (min, max) = h.grid_extrema();
    let spread = max - min;
    let ratio_irrational = small_denominator_rational(t1 / t2, 64, 1e-9).is_none();
    Ok(ConstancyReport {
        is_constant: spread <= tol,
        spread,
        t1_violation,
        t2_violation,
        ratio_irrational,
        forces_constant: ratio_irrational && t1_violation <= tol && t2_violation <= tol,
    })
}

/// Serialized form of a [`PsiFunction`]. `alpha` and `period` may be left
/// out and are derived from `(a, b)`; when present they are validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiConfig {
    pub branch: Branch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub base: f64,
    #[serde(default)]
    pub harmonics: Vec<Harmonic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

impl TryFrom<PsiConfig> for PsiFunction {
    type Error = Error;

    fn try_from(cfg: PsiConfig) -> Result<Self> {
        let alpha = match cfg.alpha {
            Some(alpha) => alpha,
            None => alpha_from_ab(cfg.a, cfg.b, cfg.branch)
                .map_err(|e| invalid("a > 1 and b on the branch side of 1", e.to_string()))?,
        };
        if !(cfg.b > 0.0 && cfg.b.is_finite()) {
            return Err(invalid("b > 0", format!("b = {}", cfg.b)));
        }
        let derived = cfg.b.ln().abs();
        let period = cfg.period.unwrap_or(derived);
        let h = PeriodicLevel::new(cfg.base, cfg.harmonics, period)?;
        PsiFunction::new(cfg.branch, alpha, cfg.a, cfg.b, h)
    }
}

impl From<&PsiFunction> for PsiConfig {
    fn from(psi: &PsiFunction) -> Self {
        PsiConfig {
            branch: psi.branch,
            alpha: Some(psi.alpha),
            a: psi.a,
            b: psi.b,
            base: psi.h.base(),
            harmonics: psi.h.harmonics().to_vec(),
            period: Some(psi.h.period()),
        }
    }
}
