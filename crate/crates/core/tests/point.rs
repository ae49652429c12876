use proptest::prelude::*;

use levinson::point::{bound_state_count, sector_bound_states, verify_levinson, PointInteraction};
use levinson::{Extended, Sector};

fn interactions() -> impl Strategy<Value = PointInteraction> {
    prop_oneof![
        (-20.0f64..20.0).prop_map(PointInteraction::delta),
        (-20.0f64..20.0).prop_map(PointInteraction::delta_prime),
        Just(PointInteraction::delta(Extended::PosInf)),
        Just(PointInteraction::delta_prime(Extended::PosInf)),
    ]
}

#[test]
fn bound_states_follow_the_sign() {
    assert_eq!(bound_state_count(&PointInteraction::delta(-0.3)), 1);
    assert_eq!(bound_state_count(&PointInteraction::delta(0.3)), 0);
    assert_eq!(bound_state_count(&PointInteraction::delta_prime(-2.0)), 1);
    assert_eq!(
        sector_bound_states(&PointInteraction::delta_prime(-2.0), Sector::Even),
        0
    );
    assert_eq!(bound_state_count(&PointInteraction::delta(Extended::PosInf)), 0);
}

proptest! {
    #[test]
    fn winding_counts_bound_states(pi in interactions()) {
        for sector in [Sector::Even, Sector::Odd, Sector::Full] {
            let r = verify_levinson(&pi, sector).unwrap();
            prop_assert!(r.residual < 1e-6, "{:?}", r);
            prop_assert!((r.total - r.total.round()).abs() < 1e-6);
            prop_assert!((r.time_delay() - (r.n_bound as f64 + r.correction)).abs() < 1e-9);
        }
    }

    #[test]
    fn sectors_add_up(pi in interactions()) {
        let e = verify_levinson(&pi, Sector::Even).unwrap();
        let o = verify_levinson(&pi, Sector::Odd).unwrap();
        let f = verify_levinson(&pi, Sector::Full).unwrap();
        for j in 0..4 {
            prop_assert!((e.w[j] + o.w[j] - f.w[j]).abs() < 1e-9);
        }
        prop_assert_eq!(e.n_bound + o.n_bound, f.n_bound);
    }

    #[test]
    fn s_matrix_is_unitary(pi in interactions(), k in 1e-4f64..1e4) {
        prop_assert!(pi.s_matrix(Extended::Finite(k)).unitarity_defect() < 1e-12);
    }
}
