//! Randomised invariants over admissible parameter draws.

use maxsemi::{Branch, Harmonic, MaxLaw, MaxSemiStableDF, PsiFunction};
use proptest::prelude::*;

/// An admissible one-harmonic exponent. The slope condition needs roughly
/// `eps < ln a / 2π`, which `eps < 0.02` satisfies for every `a >= 1.5`.
fn law() -> impl Strategy<Value = MaxSemiStableDF> {
    (any::<bool>(), 1.5f64..4.0, 1.5f64..4.0, 0.0f64..0.02, 0.0..std::f64::consts::TAU).prop_map(
        |(frechet, a, b, eps, phase)| {
            let (branch, b) = if frechet {
                (Branch::Frechet, b)
            } else {
                (Branch::Weibull, 1.0 / b)
            };
            let psi = PsiFunction::from_ab(branch, a, b, 1.0, vec![Harmonic::new(eps, phase)]).unwrap();
            MaxSemiStableDF::new(psi)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_invariant_under_the_scaling_pair(f in law(), t in -3.0f64..3.0) {
        let psi = f.psi();
        let x = match psi.branch() {
            Branch::Frechet => t.exp(),
            Branch::Weibull => -t.exp(),
        };
        let lhs = f.cdf(x);
        let rhs = f.cdf(psi.b() * x).powf(psi.a());
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(f in law(), u in 0.001f64..0.999) {
        let x = f.quantile(u).unwrap();
        prop_assert!((f.cdf(x) - u).abs() <= 1e-12);
    }

    #[test]
    fn cdf_is_nondecreasing(f in law(), t1 in -4.0f64..4.0, dt in 0.0f64..1.0) {
        let (x1, x2) = if f.psi().branch() == Branch::Frechet {
            (t1.exp(), (t1 + dt).exp())
        } else {
            (-(t1 + dt).exp(), -t1.exp())
        };
        prop_assert!(f.cdf(x1) <= f.cdf(x2) + 1e-15);
    }
}
