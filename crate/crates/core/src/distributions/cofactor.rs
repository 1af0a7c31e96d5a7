use crate::corefn::{Branch, PsiFunction};
use crate::distributions::{MaxLaw, MaxSemiStableDF};
use crate::error::{Error, Result};
use crate::stats::{monotone_df_check, DfCheckReport};

/// Grid size for cofactor validity checks.
const COFACTOR_GRID: usize = 10_000;

/// Exponent `a(c)` with `F(x) = F(cx)^a(c)` for the law built on `psi`.
///
/// Constant `h` admits every scale: `a(c) = c^α` (Fréchet) or `c^(-α)`
/// (Weibull). Otherwise only integer powers `c = b^k` have one, `a^k`.
pub fn scale_exponent(psi: &PsiFunction, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) || c == 1.0 {
        return Err(Error::UnsupportedScale {
            scale: c,
            detail: "scale must be positive and different from 1".into(),
        });
    }
    if psi.h().is_constant() {
        return Ok(match psi.branch() {
            Branch::Frechet => c.powf(psi.alpha()),
            Branch::Weibull => c.powf(-psi.alpha()),
        });
    }
    let k = c.ln() / psi.b().ln();
    let k_int = k.round();
    if (k - k_int).abs() > 1e-9 {
        return Err(Error::UnsupportedScale {
            scale: c,
            detail: format!(
                "periodic h only admits scales b^k; ln c / ln b = {k} with b = {}",
                psi.b()
            ),
        });
    }
    Ok(psi.a().powi(k_int as i32))
}

/// Cofactor `H(x) = F(x) / F(cx)` of a max-semi-stable `F`.
///
/// Since `F(x) = F(cx)^a(c)`, `H = F(c·)^(a(c)-1)`, which is again a
/// max-semi-stable law with the same `(α, a, b)` and a rescaled, shifted
/// `h`. That closed form drives evaluation and sampling; the raw ratio is
/// kept for the identity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CofactorDF {
    source: MaxSemiStableDF,
    scale: f64,
    exponent: f64,
    law: MaxSemiStableDF,
    report: DfCheckReport,
}

impl CofactorDF {
    pub fn source(&self) -> &MaxSemiStableDF {
        &self.source
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `a(c) - 1`.
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `H` as a max-semi-stable law in its own right.
    pub fn law(&self) -> &MaxSemiStableDF {
        &self.law
    }

    pub fn report(&self) -> &DfCheckReport {
        &self.report
    }

    /// `F(x) / F(cx)` evaluated literally.
    pub fn ratio(&self, x: f64) -> f64 {
        ratio(&self.source, self.scale, x)
    }

    /// `F(cx)^(a(c)-1)`.
    pub fn power_form(&self, x: f64) -> f64 {
        self.source.cdf(self.scale * x).powf(self.exponent)
    }

    /// Support-spanning grid used for the validity report.
    pub fn check_grid(&self) -> Vec<f64> {
        widened_grid(&self.law)
    }
}

fn ratio(f: &MaxSemiStableDF, c: f64, x: f64) -> f64 {
    let denom = f.cdf(c * x);
    if denom == 0.0 {
        0.0
    } else {
        f.cdf(x) / denom
    }
}

/// Grid spanning the `[1e-6, 1 - 1e-6]` quantile range of `law`, widened by a
/// factor of 2 in `|x|` on each side.
fn widened_grid<L: MaxLaw>(law: &L) -> Vec<f64> {
    let lo = law.quantile(1e-6).expect("valid level");
    let hi = law.quantile(1.0 - 1e-6).expect("valid level");
    let sign = law.branch().sign();
    let (from, to) = match law.branch() {
        Branch::Frechet => (lo.ln() - 2f64.ln(), hi.ln() + 2f64.ln()),
        Branch::Weibull => (lo.abs().ln() + 2f64.ln(), hi.abs().ln() - 2f64.ln()),
    };
    let step = (to - from) / (COFACTOR_GRID - 1) as f64;
    (0..COFACTOR_GRID)
        .map(|i| sign * (from + step * i as f64).exp())
        .collect()
}

/// Extracts `H` with `F(x) = F(cx) H(x)` and checks that it is a
/// distribution function.
///
/// Returns [`Error::InvalidCofactor`] when `H` fails the check (`c` on the
/// wrong side of 1 for the branch) and [`Error::UnsupportedScale`] when `c`
/// has no exponent for this law.
pub fn semi_sd_cofactor_df(f: &MaxSemiStableDF, c: f64) -> Result<CofactorDF> {
    let psi = f.psi();
    let a_c = scale_exponent(psi, c)?;
    let exponent = a_c - 1.0;
    if !(exponent > 0.0) {
        let report = monotone_df_check(|x| ratio(f, c, x), &widened_grid(f));
        return Err(Error::InvalidCofactor {
            scale: c,
            detail: format!(
                "a(c) - 1 = {exponent} <= 0; F(x)/F(cx) exceeds 1 (violations = {}, limits_ok = {})",
                report.violations, report.limits_ok
            ),
        });
    }
    // exponent·ψ(cx) = ψ̃(x) with h̃(u) = exponent·c^(∓α)·h(u + ln c)
    let factor = exponent * (psi.branch().log_slope() * psi.alpha() * c.ln()).exp();
    let h = psi.h().shifted_scaled(c.ln(), factor)?;
    let law = MaxSemiStableDF::new(PsiFunction::new(
        psi.branch(),
        psi.alpha(),
        psi.a(),
        psi.b(),
        h,
    )?);
    let grid = widened_grid(&law);
    let report = monotone_df_check(|x| ratio(f, c, x), &grid);
    if !report.pass {
        return Err(Error::InvalidCofactor {
            scale: c,
            detail: format!("{report:?}"),
        });
    }
    Ok(CofactorDF {
        source: f.clone(),
        scale: c,
        exponent,
        law,
        report,
    })
}

impl MaxLaw for CofactorDF {
    fn psi(&self) -> &PsiFunction {
        self.law.psi()
    }

    fn outer_neg_log(&self, s: f64) -> f64 {
        s
    }

    fn level_log(&self, u: f64, tau: f64) -> f64 {
        self.law.level_log(u, tau)
    }
}
