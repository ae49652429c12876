use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use levinson::potential::{
    analyze_threshold, count_bound_states_oracle, count_bound_states_shooting, find_threshold, jost_solve, ode::Dopri5,
    to_even_odd, verify_levinson_potential, Gaussian, OracleOptions, Potential, ScatteringOptions,
};
use levinson::{Mat2, ResonanceClass, Sector};

/// Transmission and reflection of `V = −V0` on `[−a, a]` for `ψ = e^{ikx} + r e^{−ikx}`
/// on the left and `t e^{ikx}` on the right.
fn square_well_tr(v0: f64, a: f64, k: f64) -> (C64, C64) {
    let q = C64::new(k * k + v0, 0.0).sqrt();
    let kc = C64::new(k, 0.0);
    let (s, c) = ((2.0 * q * a).sin(), (2.0 * q * a).cos());
    let i = C64::i();
    let d = c - i * (kc * kc + q * q) / (2.0 * kc * q) * s;
    let t = C64::from_polar(1.0, -2.0 * k * a) / d;
    let r = i * (q * q - kc * kc) / (2.0 * kc * q) * s * t;
    (t, r)
}

#[test]
fn square_well_matches_closed_form() {
    let ode = Dopri5::default();
    for (v0, a) in [(1.0, 1.0), (9.0, 0.5), (-2.0, 1.0), (30.0, 2.0)] {
        let v = Potential::square_well(v0, a);
        for k in [1e-3, 0.1, 0.7, 1.9, 5.0, 40.0] {
            let j = jost_solve(&v, k, &ode).unwrap();
            let (t, r) = square_well_tr(v0, a, k);
            assert!((j.t - t).norm() < 1e-8, "V0={v0} a={a} k={k}: t {} vs {t}", j.t);
            assert!(
                (j.r_left - r).norm() < 1e-8,
                "V0={v0} a={a} k={k}: r {} vs {r}",
                j.r_left
            );
            assert!((j.r_right - r).norm() < 1e-8);
        }
    }
}

#[test]
fn even_odd_basis_diagonalizes_symmetric_wells() {
    let ode = Dopri5::default();
    let v = Potential::square_well(3.0, 0.8);
    for k in [0.05, 0.6, 3.0] {
        let (t, r) = square_well_tr(3.0, 0.8, k);
        let eo = to_even_odd(&jost_solve(&v, k, &ode).unwrap().s_matrix());
        let expected = Mat2::diag(t + r, t - r);
        assert!(eo.dist(&expected) < 1e-8, "k={k}");
    }
}

#[test]
fn symmetric_reflections_agree_and_transmissions_always_do() {
    let ode = Dopri5::default();
    let sym = Potential::gaussian_sum(vec![
        Gaussian {
            depth: 2.0,
            center: -1.0,
            width: 0.7,
        },
        Gaussian {
            depth: 2.0,
            center: 1.0,
            width: 0.7,
        },
    ]);
    let asym = Potential::gaussian_sum(vec![
        Gaussian {
            depth: 2.0,
            center: -1.0,
            width: 0.7,
        },
        Gaussian {
            depth: 0.5,
            center: 1.5,
            width: 0.3,
        },
    ]);
    for k in [0.01, 0.4, 2.0, 15.0] {
        let s = jost_solve(&sym, k, &ode).unwrap();
        assert!((s.r_left - s.r_right).norm() < 1e-9);
        assert!((s.t_left - s.t).norm() < 1e-9);
        let a = jost_solve(&asym, k, &ode).unwrap();
        assert!((a.t_left - a.t).norm() < 1e-9);
        assert!((a.r_left.norm() - a.r_right.norm()).abs() < 1e-9);
        assert!(a.s_matrix().unitarity_defect() < 1e-9);
    }
}

#[test]
fn zero_energy_limit_has_unit_determinant() {
    let ode = Dopri5::default();
    for v in [
        Potential::square_well(1.0, 1.0),
        Potential::square_well(-1.0, 1.0),
        Potential::square_well(PI * PI / 4.0, 1.0),
        Potential::gaussian_sum(vec![Gaussian {
            depth: 5.0,
            center: 0.3,
            width: 1.2,
        }]),
    ] {
        let t = analyze_threshold(&v, &ode).unwrap();
        let d = t.s0_extrapolated.det();
        let expected = if t.class.is_generic() { -1.0 } else { 1.0 };
        assert!((d - C64::new(expected, 0.0)).norm() < 2e-3, "{}: det {d}", v.label());
        assert!((t.class.s0().det() - C64::new(expected, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn crossing_a_threshold_adds_one_state_and_one_unit_of_time_delay() {
    let ode = Dopri5::default();
    let family = |d: f64| Potential::square_well(d, 1.0);
    let t = find_threshold(family, 1.0, 4.0, &ode).unwrap();
    let opts = ScatteringOptions::default();
    let below = verify_levinson_potential(&family(0.95 * t.parameter), Sector::Full, &opts).unwrap();
    let above = verify_levinson_potential(&family(1.05 * t.parameter), Sector::Full, &opts).unwrap();
    assert_eq!(above.n_oracle, below.n_oracle + 1);
    assert!((above.time_delay - below.time_delay - 1.0).abs() < 1e-3);
    assert!(below.threshold.class.is_generic() && above.threshold.class.is_generic());
}

#[test]
fn free_line_is_the_even_resonance() {
    let r = verify_levinson_potential(&Potential::zero(), Sector::Full, &ScatteringOptions::default()).unwrap();
    assert_eq!(r.threshold.class, ResonanceClass::Exceptional { gamma: 1.0 });
    assert_eq!(r.report.total, 0.0);
    assert_eq!(r.n_oracle, 0);
}

fn gaussian_strategy() -> impl Strategy<Value = Gaussian> {
    (0.1f64..20.0, -2.5f64..2.5, 0.3f64..2.0).prop_map(|(depth, center, width)| Gaussian { depth, center, width })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shooting_matches_finite_differences(wells in prop::collection::vec(gaussian_strategy(), 1..4)) {
        let v = Potential::gaussian_sum(wells);
        let o = OracleOptions::for_potential(&v).unwrap();
        let shooting = count_bound_states_shooting(&v);
        prop_assume!(shooting.is_ok());
        prop_assert_eq!(shooting.unwrap(), count_bound_states_oracle(&v, o.box_half_width, o.n_points).unwrap());
    }

    #[test]
    fn sectors_add_up_to_the_full_line(depth in 0.5f64..15.0, offset in 0.0f64..2.0, width in 0.3f64..1.5) {
        let v = Potential::gaussian_sum(vec![
            Gaussian { depth, center: -offset, width },
            Gaussian { depth, center: offset, width },
        ]);
        let opts = ScatteringOptions::default();
        let run = |s| verify_levinson_potential(&v, s, &opts);
        let (full, even, odd) = (run(Sector::Full), run(Sector::Even), run(Sector::Odd));
        // a draw inside the classification dead zone is not a counterexample
        prop_assume!(full.is_ok() && even.is_ok() && odd.is_ok());
        let (full, even, odd) = (full.unwrap(), even.unwrap(), odd.unwrap());
        for j in 0..4 {
            prop_assert!((even.report.w[j] + odd.report.w[j] - full.report.w[j]).abs() < 1e-6);
        }
        prop_assert_eq!(even.n_oracle + odd.n_oracle, full.n_oracle);
        prop_assert!(!(even.sector_resonant && odd.sector_resonant));
        prop_assert!(full.passes(1e-4) && even.passes(1e-4) && odd.passes(1e-4));
    }
}
