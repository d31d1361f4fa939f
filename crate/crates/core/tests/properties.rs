//! Property tests over parameter ranges.

use num_complex::Complex64;
use proptest::prelude::*;
use subfpt::cox_renewal::{ruin_probability, solve_rq, RiskModel};
use subfpt::models::{LevyModel, ProblemTriple, SubordinatorModel};
use subfpt::special::{gamma_complex, mittag_leffler};
use subfpt::spectrally_negative::fpt_laplace_exponent;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_reflection(x in -5.0f64..5.0, y in -4.0f64..4.0) {
        let z = Complex64::new(x, y);
        prop_assume!((x - x.round()).abs() > 1e-3 || y.abs() > 1e-3);
        let lhs = gamma_complex(z).unwrap() * gamma_complex(1.0 - z).unwrap();
        let rhs = std::f64::consts::PI / (z * std::f64::consts::PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm());
    }

    #[test]
    fn mittag_leffler_bounds(alpha in 0.1f64..1.0, x in -20.0f64..0.0) {
        let v = mittag_leffler(alpha, x).unwrap().value;
        prop_assert!(v > 0.0 && v <= 1.0 + 1e-12);
    }

    #[test]
    fn ruin_decreasing_in_capital(alpha in 0.2f64..0.9, delta in 0.5f64..3.0, a in 0.0f64..5.0) {
        let m = RiskModel::fractional(1.0, 1.0, delta, alpha).unwrap();
        let r = solve_rq(&m, 0.0).unwrap();
        prop_assert!(r > 0.0 && r < 1.0);
        let lo = ruin_probability(&m, a).unwrap();
        let hi = ruin_probability(&m, a + 0.5).unwrap();
        prop_assert!(hi < lo && lo <= 1.0);
    }

    #[test]
    fn brownian_stable_exponent(alpha in 0.1f64..0.95, q in 0.05f64..10.0) {
        let p = ProblemTriple::new(
            LevyModel::brownian(1.0, 0.0).unwrap(),
            SubordinatorModel::stable(alpha).unwrap(),
            SubordinatorModel::zero(),
            1.0,
            0.0,
        )
        .unwrap();
        let phi = fpt_laplace_exponent(&p, q).unwrap();
        prop_assert!((phi - (2.0 * q.powf(alpha)).sqrt()).abs() <= 1e-10 * phi.max(1.0));
    }
}
