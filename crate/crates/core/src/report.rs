use serde::Serialize;

/// Result of a pointwise identity check over a grid.
///
/// `check` carries a short anchor naming the relation being verified
/// (`"Rem22"`, `"Thm41"`, `"Eq10"`, ...), so batch consumers can enumerate
/// what a run covered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub check: String,
    pub max_err: f64,
    pub tol: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(check: impl Into<String>, max_err: f64, tol: f64) -> Self {
        IdentityReport {
            check: check.into(),
            max_err,
            tol,
            // NaN errors must fail
            pass: max_err <= tol,
        }
    }
}
