//! Max-semi-stable laws `F = exp{-ψ}`, their Laplace-transform mixtures
//! `G = φ(ψ)`, cofactor extraction and the grid identities tying them
//! together.

mod cofactor;
mod laplace;

pub use cofactor::{scale_exponent, semi_sd_cofactor_df, CofactorDF};
pub use laplace::{default_cm_grid, lt_semi_sd_cofactor, LaplaceTransformSpec, LtCofactor};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corefn::{Branch, PsiConfig, PsiFunction};
use crate::error::{Error, Result};
use crate::report::IdentityReport;
use crate::rng::{open_unit, substream};

use laplace::ln_expm1;

/// Tolerance for all exact algebraic identities checked on grids.
pub const IDENTITY_TOL: f64 = 1e-12;

/// A distribution function of the form `G(ψ(x))` with `G` decreasing
/// from 1 to 0, built on a [`PsiFunction`].
///
/// Implementors only describe `G`; cdf, powers and quantiles follow.
pub trait MaxLaw: Send + Sync {
    fn psi(&self) -> &PsiFunction;

    /// `-ln G(s)`.
    fn outer_neg_log(&self, s: f64) -> f64;

    /// `ln s` where `G(s)^tau = u`, for `u` in (0, 1) and `tau > 0`.
    fn level_log(&self, u: f64, tau: f64) -> f64;

    fn branch(&self) -> Branch {
        self.psi().branch()
    }

    /// `-ln cdf(x)`, with the branch conventions off the support.
    fn neg_log_cdf(&self, x: f64) -> f64 {
        let psi = self.psi();
        if psi.in_support(x) {
            self.outer_neg_log(psi.eval_on_support(x))
        } else {
            match psi.branch() {
                Branch::Frechet => f64::INFINITY,
                Branch::Weibull => 0.0,
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        (-self.neg_log_cdf(x)).exp()
    }

    /// `cdf(x)^tau`, the law of a max-increment over a duration `tau`.
    fn cdf_power(&self, x: f64, tau: f64) -> f64 {
        if tau == 0.0 {
            return 1.0;
        }
        (-tau * self.neg_log_cdf(x)).exp()
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        self.quantile_power(u, 1.0)
    }

    /// Quantile of `cdf^tau`: `cdf(x)^tau = u` iff `cdf(x) = u^(1/tau)`,
    /// solved at the level of `ψ` so that small `tau` does not underflow.
    fn quantile_power(&self, u: f64, tau: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile needs u in (0, 1), got {u}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("power needs tau > 0, got {tau}")));
        }
        Ok(self.psi().inverse_log(self.level_log(u, tau)))
    }
}

/// One draw from `cdf^tau`; `tau = 0` yields the lower support edge.
pub fn draw_power<L: MaxLaw + ?Sized, R: Rng + ?Sized>(law: &L, tau: f64, rng: &mut R) -> f64 {
    if tau <= 0.0 {
        return law.branch().lower_edge();
    }
    let u = open_unit(rng);
    law.psi().inverse_log(law.level_log(u, tau))
}

/// `n` inverse-transform draws from the law, reproducible from `seed`.
pub fn sample<L: MaxLaw + ?Sized>(law: &L, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_power(law, 1.0, n, seed)
}

/// `n` draws from `cdf^tau`.
pub fn sample_power<L: MaxLaw + ?Sized>(law: &L, tau: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1 draws".into()));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("power needs tau > 0, got {tau}")));
    }
    let mut rng = substream(seed, 0);
    Ok((0..n).map(|_| draw_power(law, tau, &mut rng)).collect())
}

/// Max-semi-stable law `F(x) = exp{-ψ(x)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxSemiStableDF {
    psi: PsiFunction,
}

impl MaxSemiStableDF {
    pub fn new(psi: PsiFunction) -> Self {
        MaxSemiStableDF { psi }
    }

    /// `max |F(x) - F(bx)^a|` over a three-period log grid.
    pub fn check_max_semi_stability(&self, grid_size: usize, tol: f64) -> IdentityReport {
        let psi = &self.psi;
        let max_err = psi
            .log_grid(grid_size.max(2), 3.0)
            .into_iter()
            .map(|x| (self.cdf(x) - self.cdf(psi.b() * x).powf(psi.a())).abs())
            .fold(0.0, f64::max);
        IdentityReport::new("Thm41", max_err, tol)
    }
}

impl MaxLaw for MaxSemiStableDF {
    fn psi(&self) -> &PsiFunction {
        &self.psi
    }

    fn outer_neg_log(&self, s: f64) -> f64 {
        s
    }

    fn level_log(&self, u: f64, tau: f64) -> f64 {
        (-u.ln()).ln() - tau.ln()
    }
}

/// Laplace-transform mixture `G(x) = φ(ψ(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiMaxSemiStableDF {
    phi: LaplaceTransformSpec,
    psi: PsiFunction,
}

impl PhiMaxSemiStableDF {
    pub fn phi(&self) -> LaplaceTransformSpec {
        self.phi
    }

    /// `max |G(x) - G(cx) φ₀(ψ(x))|` where `φ₀` is the Laplace-transform
    /// cofactor at scale `1/a(c)`. For `c = b` this is the `1/a = b^(∓α)`
    /// scale of the semi-selfdecomposable factorisation of `φ`.
    pub fn check_composition_identity(&self, c: f64, grid_size: usize, tol: f64) -> Result<IdentityReport> {
        let exponent = scale_exponent(&self.psi, c)?;
        if !(exponent > 1.0) {
            return Err(Error::InvalidCofactor {
                scale: c,
                detail: format!("a(c) = {exponent} must exceed 1"),
            });
        }
        let (phi0, _) = lt_semi_sd_cofactor(self.phi, 1.0 / exponent)?;
        let max_err = self
            .psi
            .log_grid(grid_size.max(2), 3.0)
            .into_iter()
            .map(|x| {
                let s = self.psi.eval_on_support(x);
                (self.cdf(x) - self.cdf(c * x) * phi0.eval(s)).abs()
            })
            .fold(0.0, f64::max);
        Ok(IdentityReport::new("Thm23", max_err, tol))
    }
}

/// `G = φ ∘ ψ`.
pub fn compose_phi_max(phi: LaplaceTransformSpec, psi: PsiFunction) -> Result<PhiMaxSemiStableDF> {
    Ok(PhiMaxSemiStableDF {
        phi: phi.validated()?,
        psi,
    })
}

/// `F(x) = 1 / (1 + ψ(x))`.
pub fn exp_max_semi_stable(psi: PsiFunction) -> PhiMaxSemiStableDF {
    PhiMaxSemiStableDF {
        phi: LaplaceTransformSpec::Exponential,
        psi,
    }
}

impl MaxLaw for PhiMaxSemiStableDF {
    fn psi(&self) -> &PsiFunction {
        &self.psi
    }

    fn outer_neg_log(&self, s: f64) -> f64 {
        self.phi.neg_log(s)
    }

    fn cdf(&self, x: f64) -> f64 {
        if self.psi.in_support(x) {
            self.phi.eval_unchecked(self.psi.eval_on_support(x))
        } else {
            (-self.neg_log_cdf(x)).exp()
        }
    }

    fn level_log(&self, u: f64, tau: f64) -> f64 {
        // (1 + s)^(-β τ) = u
        ln_expm1(-u.ln() / (self.phi.beta() * tau))
    }
}

/// Max gap between `F(x)` and the geometric-maximum right-hand side
/// `p F(cx) / (1 - (1-p) F(cx))` over `grid`.
pub fn geometric_max_identity_check(
    law: &PhiMaxSemiStableDF,
    p: f64,
    c: f64,
    grid: &[f64],
) -> Result<IdentityReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("need p in (0, 1), got {p}")));
    }
    let max_err = grid
        .iter()
        .map(|&x| {
            let fc = law.cdf(c * x);
            (law.cdf(x) - p * fc / (1.0 - (1.0 - p) * fc)).abs()
        })
        .fold(0.0, f64::max);
    Ok(IdentityReport::new("Eq10", max_err, IDENTITY_TOL))
}

/// Serialized distribution: `exp{-ψ}` when `phi` is absent, `φ(ψ)` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    pub psi: PsiConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<LaplaceTransformSpec>,
}

/// Either kind of law, as loaded from a [`DistSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum AnyLaw {
    MaxSemiStable(MaxSemiStableDF),
    Phi(PhiMaxSemiStableDF),
}

impl TryFrom<DistSpec> for AnyLaw {
    type Error = Error;

    fn try_from(spec: DistSpec) -> Result<Self> {
        let psi = PsiFunction::try_from(spec.psi)?;
        Ok(match spec.phi {
            None => AnyLaw::MaxSemiStable(MaxSemiStableDF::new(psi)),
            Some(phi) => AnyLaw::Phi(compose_phi_max(phi, psi)?),
        })
    }
}

impl From<&AnyLaw> for DistSpec {
    fn from(law: &AnyLaw) -> Self {
        DistSpec {
            psi: PsiConfig::from(law.psi()),
            phi: match law {
                AnyLaw::MaxSemiStable(_) => None,
                AnyLaw::Phi(g) => Some(g.phi()),
            },
        }
    }
}

impl MaxLaw for AnyLaw {
    fn psi(&self) -> &PsiFunction {
        match self {
            AnyLaw::MaxSemiStable(f) => f.psi(),
            AnyLaw::Phi(g) => g.psi(),
        }
    }

    fn outer_neg_log(&self, s: f64) -> f64 {
        match self {
            AnyLaw::MaxSemiStable(f) => f.outer_neg_log(s),
            AnyLaw::Phi(g) => g.outer_neg_log(s),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            AnyLaw::MaxSemiStable(f) => f.cdf(x),
            AnyLaw::Phi(g) => g.cdf(x),
        }
    }

    fn level_log(&self, u: f64, tau: f64) -> f64 {
        match self {
            AnyLaw::MaxSemiStable(f) => f.level_log(u, tau),
            AnyLaw::Phi(g) => g.level_log(u, tau),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corefn::Harmonic;
    use crate::stats::{ks_one_sample, monotone_df_check};
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn frechet(harmonics: Vec<Harmonic>) -> MaxSemiStableDF {
        MaxSemiStableDF::new(PsiFunction::from_ab(Branch::Frechet, 2.0, 2.0, 1.0, harmonics).unwrap())
    }

    fn weibull(harmonics: Vec<Harmonic>) -> MaxSemiStableDF {
        MaxSemiStableDF::new(PsiFunction::from_ab(Branch::Weibull, 2.0, 0.5, 1.0, harmonics).unwrap())
    }

    /// Bisection on the cdf alone, independent of the ψ-level inversion.
    fn bisect_quantile(cdf: impl Fn(f64) -> f64, u: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cdf_examples() {
        let f = frechet(vec![]);
        assert_relative_eq!(f.cdf(1.0), 0.367_879_441_171_442_3, epsilon = 1e-15);
        assert_relative_eq!(f.cdf(2.0), 0.606_530_659_712_633_4, epsilon = 1e-15);
        assert_eq!(f.cdf(-3.0), 0.0);
        assert_eq!(f.cdf(0.0), 0.0);
        let w = weibull(vec![]);
        assert_eq!(w.cdf(0.0), 1.0);
        assert_eq!(w.cdf(2.0), 1.0);
        assert_relative_eq!(w.cdf(-1.0), (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn quantile_examples() {
        let f = frechet(vec![]);
        assert_relative_eq!(f.quantile((-1.0f64).exp()).unwrap(), 1.0, max_relative = 1e-14);
        let oracle = bisect_quantile(|x| f.cdf(x), 0.5, 1e-6, 1e6);
        assert_relative_eq!(oracle, std::f64::consts::LOG2_E, max_relative = 1e-12);
        assert_relative_eq!(f.quantile(0.5).unwrap(), oracle, max_relative = 1e-12);
        for u in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(f.quantile(u), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn quantile_round_trip_periodic() {
        let f = frechet(vec![Harmonic::new(0.1, 0.0)]);
        for x0 in [0.5, 1.0, 3.0] {
            assert_relative_eq!(f.quantile(f.cdf(x0)).unwrap(), x0, max_relative = 1e-10);
        }
        let w = weibull(vec![Harmonic::new(0.1, 0.0)]);
        for x0 in [-0.5, -1.0, -3.0] {
            assert_relative_eq!(w.quantile(w.cdf(x0)).unwrap(), x0, max_relative = 1e-10);
        }
    }

    #[test]
    fn quantile_matches_bisection_for_phi_laws() {
        let psi = PsiFunction::from_ab(Branch::Frechet, 2.0, 2.0, 1.0, vec![Harmonic::new(0.08, 1.0)])
            .unwrap();
        let g = compose_phi_max(LaplaceTransformSpec::gamma(2.0).unwrap(), psi).unwrap();
        for u in [0.01, 0.3, 0.5, 0.97] {
            let oracle = bisect_quantile(|x| g.cdf(x), u, 1e-8, 1e8);
            assert_relative_eq!(g.quantile(u).unwrap(), oracle, max_relative = 1e-10);
        }
    }

    #[test]
    fn cdf_monotone_and_limits() {
        let laws: Vec<Box<dyn MaxLaw>> = vec![
            Box::new(frechet(vec![Harmonic::new(0.1, 0.0)])),
            Box::new(weibull(vec![Harmonic::new(0.05, 0.2), Harmonic::new(0.02, 0.0)])),
            Box::new(exp_max_semi_stable(frechet(vec![]).psi().clone())),
        ];
        for law in laws {
            let lo = law.quantile(1e-12).unwrap();
            let hi = law.quantile(1.0 - 1e-12).unwrap();
            let grid: Vec<f64> = (0..10_000)
                .map(|i| lo + (hi - lo) * i as f64 / 9999.0)
                .collect();
            let rep = monotone_df_check(|x| law.cdf(x), &grid);
            assert_eq!(rep.violations, 0);
            assert!(law.cdf(lo) <= 1e-9 + 1e-12 && law.cdf(hi) >= 1.0 - 1e-9 - 1e-12);
        }
    }

    #[test]
    fn max_semi_stability_identity() {
        for f in [
            frechet(vec![]),
            frechet(vec![Harmonic::new(0.1, 0.0)]),
            weibull(vec![Harmonic::new(0.1, 0.5)]),
        ] {
            assert!(f.check_max_semi_stability(2000, IDENTITY_TOL).pass);
        }
    }

    #[test]
    fn sample_examples() {
        let f = frechet(vec![]);
        let xs = sample(&f, 10_000, 42).unwrap();
        let rep = ks_one_sample(&xs, |x| (-1.0 / x).exp()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(sample(&f, 1, 3).unwrap()[0] > 0.0);
        assert!(sample(&weibull(vec![]), 1, 3).unwrap()[0] < 0.0);
        assert_eq!(sample(&f, 100, 9).unwrap(), sample(&f, 100, 9).unwrap());
        assert!(sample(&f, 0, 1).is_err());
    }

    #[test]
    fn sample_power_examples() {
        let f = frechet(vec![]);
        assert_eq!(sample_power(&f, 1.0, 50, 4).unwrap(), sample(&f, 50, 4).unwrap());

        let xs = sample_power(&f, 2.0, 10_000, 17).unwrap();
        assert!(ks_one_sample(&xs, |x| (-2.0 / x).exp()).unwrap().pass);

        let xs = sample_power(&f, 0.01, 1000, 23).unwrap();
        assert!(xs.iter().all(|x| x.is_finite() && *x > 0.0));
        let rep = ks_one_sample(&xs, |x| f.cdf_power(x, 0.01)).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn phi_composition_closed_forms() {
        let psi = frechet(vec![]).psi().clone();
        let g = exp_max_semi_stable(psi.clone());
        for x in [0.1, 1.0, 7.0] {
            assert_relative_eq!(g.cdf(x), x / (1.0 + x), epsilon = 1e-15);
        }
        assert_eq!(g.cdf(1.0), 0.5);
        let gg = compose_phi_max(LaplaceTransformSpec::gamma(2.5).unwrap(), psi.clone()).unwrap();
        for x in [0.3, 2.0] {
            let s = psi.eval(x).unwrap();
            assert_relative_eq!(gg.cdf(x), (1.0 + s).powf(-2.5), epsilon = 1e-15);
        }
    }

    #[test]
    fn composition_identity_on_grid() {
        for branch_law in [frechet(vec![Harmonic::new(0.1, 0.0)]), weibull(vec![])] {
            let g = compose_phi_max(LaplaceTransformSpec::gamma(2.0).unwrap(), branch_law.psi().clone())
                .unwrap();
            let rep = g.check_composition_identity(g.psi().b(), 2000, IDENTITY_TOL).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn geometric_identity_examples() {
        let g = exp_max_semi_stable(frechet(vec![]).psi().clone());
        let grid = g.psi().log_grid(1000, 3.0);
        let rep = geometric_max_identity_check(&g, 0.5, 2.0, &grid).unwrap();
        assert!(rep.pass);
        assert!(rep.max_err <= 1e-15);

        let gh = exp_max_semi_stable(frechet(vec![Harmonic::new(0.1, 0.0)]).psi().clone());
        assert!(geometric_max_identity_check(&gh, 0.5, 2.0, &grid).unwrap().pass);

        let rep = geometric_max_identity_check(&g, 0.4, 2.0, &grid).unwrap();
        assert!(!rep.pass);
        // at x = 1: F = 1/2, rhs = 0.4·(2/3)/(1 - 0.6·2/3) = 4/9
        assert!(rep.max_err >= 0.5 - 4.0 / 9.0 - 1e-3);
    }

    #[test]
    fn dist_spec_loads_both_kinds() {
        let spec: DistSpec = serde_json::from_str(
            r#"{"psi":{"branch":"frechet","a":2.0,"b":2.0,"base":1.0},"phi":{"kind":"gamma","beta":2.0}}"#,
        )
        .unwrap();
        let law = AnyLaw::try_from(spec.clone()).unwrap();
        assert!(matches!(law, AnyLaw::Phi(_)));
        assert_relative_eq!(law.cdf(1.0), 0.25, epsilon = 1e-15);
        let back = DistSpec::from(&law);
        assert_eq!(back.psi.period, Some(LN_2));
        assert_eq!(back.phi, spec.phi);
    }
}
