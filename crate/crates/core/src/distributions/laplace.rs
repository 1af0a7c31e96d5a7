use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::stats::{cm_proxy, geometric_grid, CmReport, CM_MAX_ORDER};

/// Laplace transform of a gamma law with unit scale,
/// `φ(s) = (1 + s)^(-β)`. The exponential case is `β = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LaplaceTransformSpec {
    Exponential,
    Gamma { beta: f64 },
}

impl LaplaceTransformSpec {
    pub fn gamma(beta: f64) -> Result<Self> {
        LaplaceTransformSpec::Gamma { beta }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            LaplaceTransformSpec::Gamma { beta } if !(beta.is_finite() && beta > 0.0) => {
                Err(invalid("beta > 0", format!("beta = {beta}")))
            }
            spec => Ok(spec),
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            LaplaceTransformSpec::Exponential => 1.0,
            LaplaceTransformSpec::Gamma { beta } => beta,
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("Laplace transform needs s >= 0, got {s}")));
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match *self {
            LaplaceTransformSpec::Exponential => 1.0 / (1.0 + s),
            LaplaceTransformSpec::Gamma { beta } => (-beta * s.ln_1p()).exp(),
        }
    }

    /// `-ln φ(s)`.
    pub(crate) fn neg_log(&self, s: f64) -> f64 {
        self.beta() * s.ln_1p()
    }
}

/// `ln(e^v - 1)` without overflow for large `v`.
pub(crate) fn ln_expm1(v: f64) -> f64 {
    if v > 36.0 {
        v + (-(-v).exp()).ln_1p()
    } else {
        v.exp_m1().ln()
    }
}

/// Cofactor `φ₀(s) = φ(s) / φ(cs)` of the semi-selfdecomposable
/// factorisation `φ(s) = φ(cs) φ₀(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtCofactor {
    phi: LaplaceTransformSpec,
    c: f64,
}

impl LtCofactor {
    pub fn phi(&self) -> LaplaceTransformSpec {
        self.phi
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.phi.eval_unchecked(s) / self.phi.eval_unchecked(self.c * s)
    }
}

/// Grid used by the complete-monotonicity proxy on cofactors.
pub fn default_cm_grid() -> Vec<f64> {
    geometric_grid(1e-3, 1e3, 128)
}

/// Extracts `φ₀` for a scale `0 < c < 1` and runs the complete-monotonicity
/// proxy on it up to order 8.
pub fn lt_semi_sd_cofactor(phi: LaplaceTransformSpec, c: f64) -> Result<(LtCofactor, CmReport)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("semi-SD scale must lie in (0, 1), got {c}")));
    }
    let phi = phi.validated()?;
    let cofactor = LtCofactor { phi, c };
    let report = cm_proxy(|s| cofactor.eval(s), &default_cm_grid(), CM_MAX_ORDER)?;
    Ok((cofactor, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lt_eval_examples() {
        let e = LaplaceTransformSpec::Exponential;
        assert_eq!(e.eval(0.0).unwrap(), 1.0);
        assert_eq!(e.eval(1.0).unwrap(), 0.5);
        assert_relative_eq!(LaplaceTransformSpec::gamma(2.0).unwrap().eval(1.0).unwrap(), 0.25);
        assert!(matches!(e.eval(-0.1), Err(Error::Domain(_))));
        assert!(LaplaceTransformSpec::gamma(0.0).is_err());
    }

    #[test]
    fn lt_is_decreasing_in_unit_interval() {
        for phi in [LaplaceTransformSpec::Exponential, LaplaceTransformSpec::gamma(0.3).unwrap()] {
            let grid = geometric_grid(1e-6, 1e6, 500);
            for w in grid.windows(2) {
                let (p, q) = (phi.eval(w[0]).unwrap(), phi.eval(w[1]).unwrap());
                assert!(q < p && q > 0.0 && p <= 1.0);
            }
        }
    }

    #[test]
    fn cofactor_examples() {
        let (c1, _) = lt_semi_sd_cofactor(LaplaceTransformSpec::gamma(1.0).unwrap(), 0.5).unwrap();
        assert_relative_eq!(c1.eval(1.0), 0.75, epsilon = 1e-15);
        assert_eq!(c1.eval(0.0), 1.0);

        let (c2, rep) = lt_semi_sd_cofactor(LaplaceTransformSpec::gamma(2.0).unwrap(), 0.5).unwrap();
        assert_eq!(c2.eval(0.0), 1.0);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.orders.len(), 9);
    }

    #[test]
    fn cofactor_rejects_scale_outside_unit_interval() {
        assert!(lt_semi_sd_cofactor(LaplaceTransformSpec::Exponential, 1.0).is_err());
        assert!(lt_semi_sd_cofactor(LaplaceTransformSpec::Exponential, 0.0).is_err());
    }

    #[test]
    fn ln_expm1_is_continuous_across_switch() {
        assert_relative_eq!(ln_expm1(36.0), 36.0f64.exp_m1().ln(), epsilon = 1e-13);
        assert_relative_eq!(ln_expm1(1e-8), (1e-8f64).ln(), max_relative = 1e-7);
        assert_eq!(ln_expm1(1e4), 1e4);
    }

    #[test]
    fn spec_serde_shape() {
        let g: LaplaceTransformSpec = serde_json::from_str(r#"{"kind":"gamma","beta":2.0}"#).unwrap();
        assert_eq!(g, LaplaceTransformSpec::Gamma { beta: 2.0 });
        let e: LaplaceTransformSpec = serde_json::from_str(r#"{"kind":"exponential"}"#).unwrap();
        assert_eq!(e.beta(), 1.0);
    }
}
