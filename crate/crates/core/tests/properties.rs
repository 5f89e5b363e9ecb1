mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn constants_form_a_ring(a in constant(), b in constant(), c in constant()) {
        ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn evaluation_commutes_with_ring_operations(a in constant(), b in constant()) {
        numeric_faithfulness(&a, &b)?;
    }

    #[test]
    fn log_normalize_is_additive(a in 1u64..=10_000, b in 1u64..=10_000) {
        log_additive(a, b)?;
    }

    #[test]
    fn ratpi_is_a_field(num in prop::collection::vec(rational(), 1..=3), k in -3i32..=3) {
        ratpi_field(&num, k)?;
    }

    #[test]
    fn k_index_reduction_matches_quadrature(m in 0u32..=6, n in nonzero(-3, 3), y in 0.05f64..1.5) {
        bessel_reduction(m, n, y)?;
    }

    #[test]
    fn wronskian_of_half_orders(r in prop_oneof![Just(0u32), Just(5u32)], x in 0.5f64..10.0) {
        wronskian(r, x)?;
    }

    #[test]
    fn p_is_linear(lambda in 2i64..60, x in double_expr(), y in double_expr(), a in constant(), b in constant()) {
        p_linear(lambda, &x, &y, &a, &b)?;
    }

    #[test]
    fn l_is_linear(lambda in 2i64..60, (x, y) in single_pair(), a in constant(), b in constant()) {
        l_linear(lambda, &x, &y, &a, &b)?;
    }

    #[test]
    fn euler_is_linear(lambda in 2i64..60, f in laurent(-5, 5, 1), g in laurent(-5, 5, 1), a in constant(), b in constant()) {
        euler_linear(lambda, &f, &g, &a, &b)?;
    }

    #[test]
    fn operators_respect_degree_windows(lambda in 2i64..60, x in double_expr(), (s, _) in single_pair(), f in laurent(-5, 5, 1)) {
        degree_contract(lambda, &x)?;
        degree_contract(lambda, &s)?;
        degree_contract(lambda, &gnes_core::bessel_expr::BesselExpr::pure(f))?;
    }

    #[test]
    fn systems_are_banded((a2, b2, r) in tabulated_case(), (n1, n2) in generic_mode(), single in any::<bool>()) {
        if single {
            band_profile(a2, b2, r, 0, n2)?;
        } else {
            band_profile(a2, b2, r, n1, n2)?;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generic_solutions_fit_published_windows((a2, b2, r) in tabulated_case(), (n1, n2) in generic_mode()) {
        window_conformance(a2, b2, r, n1, n2)?;
    }
}
