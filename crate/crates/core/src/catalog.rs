//! Reference exponents used by the verification suites and the scenario
//! files: both branches with `a = 2`, `b = 2^{±1}` (so `α = 1`), each with
//! a constant, one-harmonic and two-harmonic level function.

use crate::corefn::{Branch, Harmonic, PsiFunction};

/// Which level function a reference exponent carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Constant,
    OneHarmonic,
    TwoHarmonic,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Constant, Shape::OneHarmonic, Shape::TwoHarmonic];

    pub fn harmonics(self) -> Vec<Harmonic> {
        match self {
            Shape::Constant => vec![],
            Shape::OneHarmonic => vec![Harmonic::new(0.1, 0.0)],
            Shape::TwoHarmonic => vec![Harmonic::new(0.05, 0.4), Harmonic::new(0.02, 1.3)],
        }
    }
}

/// The reference exponent for `branch` and `shape`.
pub fn reference_psi(branch: Branch, shape: Shape) -> PsiFunction {
    let b = match branch {
        Branch::Frechet => 2.0,
        Branch::Weibull => 0.5,
    };
    PsiFunction::from_ab(branch, 2.0, b, 1.0, shape.harmonics())
        .expect("reference exponents satisfy every invariant")
}

/// All six reference exponents with a short label each.
pub fn reference_set() -> Vec<(String, PsiFunction)> {
    [Branch::Frechet, Branch::Weibull]
        .into_iter()
        .flat_map(|branch| {
            Shape::ALL.into_iter().map(move |shape| {
                (
                    format!("{branch:?}/{shape:?}").to_lowercase(),
                    reference_psi(branch, shape),
                )
            })
        })
        .collect()
}
