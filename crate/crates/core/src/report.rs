//! Experiments, golden tables and their renderings.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::OnceLock;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::linalg::{Mat2, C64};
use crate::paths::{ResonanceClass, Sector, WindingReport};
use crate::point::{verify_levinson, PointInteraction};
use crate::potential::{
    find_threshold, ode::Dopri5, verify_levinson_potential, Potential, PotentialLevinson, ScatteringOptions,
};

/// Residual tolerance for point interactions (exact multipliers).
pub const POINT_TOL: f64 = 1e-6;
/// Tolerance on every golden cell.
pub const GOLDEN_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "kebab-case")]
pub enum System {
    Point { interaction: PointInteraction },
    Potential { potential: Potential },
}

impl System {
    pub fn label(&self) -> String {
        match self {
            System::Point { interaction } => interaction.label(),
            System::Potential { potential } => potential.label(),
        }
    }
}

/// Where a run writes its artifacts; all optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    /// JSON report.
    pub report: Option<PathBuf>,
    /// `S(κ)` samples as CSV.
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub system: System,
    pub sectors: Vec<Sector>,
    #[serde(default)]
    pub options: ScatteringOptions,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentSpec {
    pub fn new(system: System, sectors: Vec<Sector>) -> Self {
        Self {
            system,
            sectors,
            options: ScatteringOptions::default(),
            outputs: Outputs::default(),
        }
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        if self.sectors.is_empty() {
            return Err(Error::InvalidInput("experiment needs at least one sector".into()));
        }
        match &self.system {
            System::Point { interaction } => interaction.validate().map(|_| Vec::new()),
            System::Potential { potential } => potential.validate(),
        }
    }
}

/// One sector of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Point { report: WindingReport },
    Potential { result: Box<PotentialLevinson> },
}

impl Outcome {
    pub fn report(&self) -> &WindingReport {
        match self {
            Outcome::Point { report } => report,
            Outcome::Potential { result } => &result.report,
        }
    }

    /// Identity within tolerance (and counters agreeing, for potentials).
    pub fn passes(&self) -> bool {
        match self {
            Outcome::Point { report } => report.passes(POINT_TOL),
            Outcome::Potential { result } => result.passes(GOLDEN_TOL),
        }
    }
}

fn with_context<T>(context: impl FnOnce() -> String, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Context {
        context: context(),
        source: Box::new(e),
    })
}

/// Runs every sector of `spec`, independently and in parallel.
pub fn run_experiment_outcomes(spec: &ExperimentSpec) -> Result<Vec<Outcome>> {
    use rayon::prelude::*;
    spec.validate()?;
    spec.sectors
        .par_iter()
        .map(|&sector| {
            let ctx = || format!("{} [{}]", spec.system.label(), sector);
            match &spec.system {
                System::Point { interaction } => {
                    with_context(ctx, verify_levinson(interaction, sector)).map(|report| Outcome::Point { report })
                }
                System::Potential { potential } => {
                    with_context(ctx, verify_levinson_potential(potential, sector, &spec.options))
                        .map(|r| Outcome::Potential { result: Box::new(r) })
                }
            }
        })
        .collect()
}

/// One report per sector.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<WindingReport>> {
    Ok(run_experiment_outcomes(spec)?
        .into_iter()
        .map(|o| o.report().clone())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    Delta,
    DeltaPrime,
    EvenSector,
    OddSector,
}

impl TableKind {
    pub fn title(self) -> &'static str {
        match self {
            TableKind::Delta => "delta interaction, even sector",
            TableKind::DeltaPrime => "delta-prime interaction, odd sector",
            TableKind::EvenSector => "symmetric potential, even sector",
            TableKind::OddSector => "symmetric potential, odd sector",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub table: TableKind,
    pub label: String,
    /// Descriptors of `Γ1 … Γ4` in the row's sector.
    pub sides: [String; 4],
    /// Sector value of `S(0)`, for the potential tables.
    pub s0: Option<f64>,
    pub w: [f64; 4],
    pub total: f64,
    pub expected_w: [f64; 4],
    pub expected_total: f64,
    pub n_bound: usize,
}

impl TableRow {
    /// First column deviating from the golden value by more than `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let cols = ["w1", "w2", "w3", "w4"];
        for ((col, &got), &expected) in cols.iter().zip(&self.w).zip(&self.expected_w) {
            if (got - expected).abs() > tol {
                return Err(self.mismatch(col, got, expected));
            }
        }
        if (self.total - self.expected_total).abs() > tol {
            return Err(self.mismatch("total", self.total, self.expected_total));
        }
        Ok(())
    }

    fn mismatch(&self, column: &str, got: f64, expected: f64) -> Error {
        Error::GoldenMismatch {
            row: format!("{}: {}", self.table.title(), self.label),
            column: column.into(),
            got,
            expected,
        }
    }
}

/// Symmetric square wells used for the sector tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedWells {
    /// Two bound states (one per sector), far from any threshold.
    pub generic: Potential,
    /// Depth tuned to the second even threshold.
    pub even_resonant: Potential,
    /// Depth tuned to the second odd threshold.
    pub odd_resonant: Potential,
}

/// Unit half-width; depths found by bisection once per process.
pub fn calibrated_wells() -> Result<&'static CalibratedWells> {
    static CELL: OnceLock<std::result::Result<CalibratedWells, Error>> = OnceLock::new();
    CELL.get_or_init(|| {
        let ode = Dopri5::default();
        let family = |d: f64| Potential::square_well(d, 1.0);
        Ok(CalibratedWells {
            generic: Potential::square_well(4.0, 1.0),
            even_resonant: find_threshold(family, 6.0, 12.0, &ode)?.potential,
            odd_resonant: find_threshold(family, 20.0, 24.0, &ode)?.potential,
        })
    })
    .as_ref()
    .map_err(Clone::clone)
}

const HALF: f64 = 0.5;

fn point_rows() -> Result<Vec<TableRow>> {
    let params = [
        ("< 0", Extended::Finite(-1.0)),
        ("= 0", Extended::Finite(0.0)),
        ("> 0", Extended::Finite(1.0)),
        ("= inf", Extended::PosInf),
    ];
    // (Γ descriptors, w) per printed row; the δ′ rows swap w1 and w3
    let delta: [([&str; 4], [f64; 4]); 4] = [
        (["r_e", "s^a", "1", "1"], [-HALF, -HALF, 0.0, 0.0]),
        (["1", "1", "1", "1"], [0.0; 4]),
        (["r_e", "s^a", "1", "1"], [-HALF, HALF, 0.0, 0.0]),
        (["r_e", "-1", "r_e", "1"], [-HALF, 0.0, HALF, 0.0]),
    ];
    let delta_prime: [([&str; 4], [f64; 4]); 4] = [
        (["1", "s^b", "r_o", "1"], [0.0, -HALF, -HALF, 0.0]),
        (["1", "1", "1", "1"], [0.0; 4]),
        (["1", "s^b", "r_o", "1"], [0.0, HALF, -HALF, 0.0]),
        (["r_o", "-1", "r_o", "1"], [HALF, 0.0, -HALF, 0.0]),
    ];
    let mut rows = Vec::new();
    for (table, golden, make, sector, name) in [
        (
            TableKind::Delta,
            delta,
            PointInteraction::delta as fn(Extended) -> PointInteraction,
            Sector::Even,
            "alpha",
        ),
        (
            TableKind::DeltaPrime,
            delta_prime,
            PointInteraction::delta_prime,
            Sector::Odd,
            "beta",
        ),
    ] {
        for ((cls, p), (sides, w)) in params.iter().zip(golden) {
            let r = verify_levinson(&make(*p), sector)?;
            rows.push(TableRow {
                table,
                label: format!("{name} {cls}"),
                sides: sides.map(String::from),
                s0: None,
                w: r.w,
                total: r.total,
                expected_w: w,
                expected_total: w.iter().sum(),
                n_bound: r.n_bound,
            });
        }
    }
    Ok(rows)
}

fn sector_row(table: TableKind, label: &str, v: &Potential, opts: &ScatteringOptions) -> Result<TableRow> {
    let sector = if table == TableKind::EvenSector {
        Sector::Even
    } else {
        Sector::Odd
    };
    let r = verify_levinson_potential(v, sector, opts)?;
    let n = r.n_oracle as f64;
    let resonant = r.sector_resonant;
    let (gamma1, expected_w) = match (sector, resonant) {
        (Sector::Even, false) => ("r_e", [-HALF, -(n - HALF), 0.0, 0.0]),
        (Sector::Even, true) => ("1", [0.0, -n, 0.0, 0.0]),
        (_, false) => ("1", [0.0, -n, 0.0, 0.0]),
        (_, true) => ("r_o", [HALF, -(n + HALF), 0.0, 0.0]),
    };
    let s0 = sector.project(&r.threshold.class.s0());
    let s0 = if sector == Sector::Even {
        s0.get(0, 0)
    } else {
        s0.get(1, 1)
    };
    Ok(TableRow {
        table,
        label: format!("{label} ({})", v.label()),
        sides: [gamma1, if sector == Sector::Even { "S_e" } else { "S_o" }, "1", "1"].map(String::from),
        s0: Some(s0.re),
        w: r.report.w,
        total: r.report.total,
        expected_w,
        expected_total: -n,
        n_bound: r.n_oracle,
    })
}

fn potential_rows() -> Result<Vec<TableRow>> {
    use rayon::prelude::*;
    let wells = calibrated_wells()?;
    let opts = ScatteringOptions::default();
    let jobs = [
        (TableKind::EvenSector, "generic", &wells.generic),
        (TableKind::EvenSector, "exceptional", &wells.even_resonant),
        (TableKind::OddSector, "generic", &wells.generic),
        (TableKind::OddSector, "exceptional", &wells.odd_resonant),
    ];
    jobs.par_iter().map(|(t, l, v)| sector_row(*t, l, v, &opts)).collect()
}

/// All twelve rows, unchecked.
pub fn compute_tables() -> Result<Vec<TableRow>> {
    let mut rows = point_rows()?;
    rows.extend(potential_rows()?);
    Ok(rows)
}

/// All twelve rows, each checked against its golden values.
pub fn reproduce_tables() -> Result<Vec<TableRow>> {
    let rows = compute_tables()?;
    for row in &rows {
        row.check(GOLDEN_TOL)?;
    }
    Ok(rows)
}

pub fn render_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// `S(κ)` samples as CSV, with `arg det S` continued along the grid.
pub fn s_matrix_csv(kappas: &[f64], s: &[Mat2]) -> String {
    let mut out = String::from(
        "kappa,arg_det_s,eigenphase_1,eigenphase_2,re_s11,im_s11,re_s12,im_s12,re_s21,im_s21,re_s22,im_s22\n",
    );
    let mut phase = 0.0;
    let mut prev: Option<C64> = None;
    for (k, m) in kappas.iter().zip(s) {
        let d = m.det();
        phase = match prev {
            None => d.arg(),
            Some(p) => phase + (d / p).arg(),
        };
        prev = Some(d);
        let [e1, e2] = m.eigenphases();
        let _ = write!(out, "{k:.17e},{phase:.17e},{e1:.17e},{e2:.17e}");
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let z = m.get(i, j);
            let _ = write!(out, ",{:.17e},{:.17e}", z.re, z.im);
        }
        out.push('\n');
    }
    out
}

/// `±½`-style rendering for values close to a multiple of ½.
pub fn fmt_half(x: f64) -> String {
    let twice = (2.0 * x).round();
    if (2.0 * x - twice).abs() > 1e-6 {
        return format!("{x:.6}");
    }
    let t = twice as i64;
    match (t, t % 2 == 0) {
        (0, _) => "0".into(),
        (_, true) => format!("{}", t / 2),
        (1, _) => "1/2".into(),
        (-1, _) => "-1/2".into(),
        (_, false) => format!("{t}/2"),
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let width: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = width[c]))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

/// Plain-text tables, one block per table kind, in the printed column order.
pub fn render_tables_text(rows: &[TableRow]) -> String {
    let mut out = String::new();
    for kind in [
        TableKind::Delta,
        TableKind::DeltaPrime,
        TableKind::EvenSector,
        TableKind::OddSector,
    ] {
        let block: Vec<&TableRow> = rows.iter().filter(|r| r.table == kind).collect();
        if block.is_empty() {
            continue;
        }
        let sector_table = matches!(kind, TableKind::EvenSector | TableKind::OddSector);
        let mut lines = vec![if sector_table {
            ["row", "G1", "G2", "S(0)", "w1", "w2", "total", "N", "status"]
                .map(String::from)
                .to_vec()
        } else {
            ["row", "G1", "G2", "G3", "G4", "w1", "w2", "w3", "w4", "total", "status"]
                .map(String::from)
                .to_vec()
        }];
        for r in block {
            let status = if r.check(GOLDEN_TOL).is_ok() { "ok" } else { "MISMATCH" }.to_string();
            let mut line = vec![r.label.clone(), r.sides[0].clone(), r.sides[1].clone()];
            if sector_table {
                line.push(fmt_half(r.s0.unwrap_or(f64::NAN)));
                line.extend([
                    fmt_half(r.w[0]),
                    fmt_half(r.w[1]),
                    fmt_half(r.total),
                    r.n_bound.to_string(),
                ]);
            } else {
                line.extend([r.sides[2].clone(), r.sides[3].clone()]);
                line.extend(r.w.iter().map(|w| fmt_half(*w)));
                line.push(fmt_half(r.total));
            }
            line.push(status);
            lines.push(line);
        }
        let _ = writeln!(out, "{}", kind.title());
        out.push_str(&aligned(&lines));
        out.push('\n');
    }
    out
}

fn class_note(c: &ResonanceClass) -> String {
    match c {
        ResonanceClass::Generic => "generic".into(),
        ResonanceClass::Exceptional { gamma } => format!("exceptional (gamma = {gamma:.6})"),
    }
}

/// Aligned summary of winding reports.
pub fn render_reports_text(reports: &[WindingReport]) -> String {
    let mut lines = vec![[
        "system",
        "w1",
        "w2",
        "w3",
        "w4",
        "total",
        "N",
        "nu",
        "residual",
        "threshold",
    ]
    .map(String::from)
    .to_vec()];
    for r in reports {
        let mut line = vec![r.label.clone()];
        line.extend(r.w.iter().map(|w| fmt_half(*w)));
        line.extend([
            fmt_half(r.total),
            r.n_bound.to_string(),
            fmt_half(r.correction),
            format!("{:.2e}", r.residual),
            class_note(&r.resonance),
        ]);
        lines.push(line);
    }
    aligned(&lines)
}
