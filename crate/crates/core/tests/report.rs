use levinson::point::PointInteraction;
use levinson::potential::{Potential, ScatteringOptions};
use levinson::report::{
    parse_json, render_json, render_tables_text, reproduce_tables, run_experiment, run_experiment_outcomes,
    s_matrix_csv, ExperimentSpec, Outcome, System, TableRow,
};
use levinson::{Extended, Mat2, Sector, WindingReport};
use num_complex::Complex64 as C64;

#[test]
fn spec_round_trips_through_json() {
    let mut spec = ExperimentSpec::new(
        System::Potential {
            potential: Potential::square_well(2.0, 0.5).with_decay(4.0),
        },
        vec![Sector::Full, Sector::Odd],
    );
    spec.options = ScatteringOptions {
        points_per_decade: 25,
        ..ScatteringOptions::default()
    };
    let back: ExperimentSpec = parse_json(&render_json(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);

    let point = ExperimentSpec::new(
        System::Point {
            interaction: PointInteraction::delta(Extended::PosInf),
        },
        vec![Sector::Even],
    );
    let text = render_json(&point).unwrap();
    assert!(text.contains("\"inf\""));
    assert_eq!(parse_json::<ExperimentSpec>(&text).unwrap(), point);
}

#[test]
fn reports_round_trip_through_json() {
    let spec = ExperimentSpec::new(
        System::Potential {
            potential: Potential::square_well(1.0, 1.0),
        },
        vec![Sector::Full, Sector::Even],
    );
    let reports = run_experiment(&spec).unwrap();
    let back: Vec<WindingReport> = parse_json(&render_json(&reports).unwrap()).unwrap();
    assert_eq!(back, reports);

    let outcomes = run_experiment_outcomes(&spec).unwrap();
    assert!(outcomes.iter().all(Outcome::passes));
    let back: Vec<Outcome> = parse_json(&render_json(&outcomes).unwrap()).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[1].report(), outcomes[1].report());
}

#[test]
fn empty_sector_list_is_rejected() {
    let spec = ExperimentSpec::new(
        System::Potential {
            potential: Potential::zero(),
        },
        vec![],
    );
    assert!(run_experiment(&spec).is_err());
}

#[test]
fn golden_tables_reproduce() {
    let rows = reproduce_tables().unwrap();
    assert_eq!(rows.len(), 12);
    let text = render_tables_text(&rows);
    assert!(!text.contains("MISMATCH"));
    let back: Vec<TableRow> = parse_json(&render_json(&rows).unwrap()).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn golden_mismatch_names_the_cell() {
    let mut row = reproduce_tables().unwrap().remove(0);
    row.expected_w[1] = 0.5;
    let err = row.check(1e-4).unwrap_err().to_string();
    assert!(err.contains("w2"), "{err}");
}

#[test]
fn csv_continues_the_determinant_phase() {
    // det S = e^{iθ} with θ running past π
    let thetas = [0.0, 1.5, 3.0, 4.5, 6.0];
    let kappas: Vec<f64> = (1..=thetas.len()).map(|k| k as f64).collect();
    let s: Vec<Mat2> = thetas
        .iter()
        .map(|&t| Mat2::diag(C64::from_polar(1.0, t), C64::new(1.0, 0.0)))
        .collect();
    let csv = s_matrix_csv(&kappas, &s);
    let phases: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for (p, t) in phases.iter().zip(thetas) {
        assert!((p - t).abs() < 1e-12, "{p} vs {t}");
    }
}
