//! `levinson`: command-line front end.
//!
//! Exit codes: 0 success, 1 identity or golden-table failure, 2 usage or
//! configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use levinson::config::ConfigFile;
use levinson::operator::{self, MellinConvention};
use levinson::point::{InteractionKind, PointInteraction};
use levinson::potential::{Basis, KappaGrid};
use levinson::report::{
    compute_tables, fmt_half, render_json, render_reports_text, render_tables_text, run_experiment_outcomes,
    s_matrix_csv, Outcome, GOLDEN_TOL, POINT_TOL,
};
use levinson::{Error, Extended, ResonanceClass, Sector};

#[derive(Parser)]
#[command(
    name = "levinson",
    version,
    about = "Levinson's theorem as a winding-number identity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Winding report for a δ or δ′ interaction at the origin.
    Point {
        #[arg(long)]
        kind: InteractionKind,
        /// α for δ, β for δ′; `inf` and `-inf` are accepted.
        #[arg(long, allow_hyphen_values = true)]
        param: Extended,
        #[arg(long, default_value = "full")]
        sector: Sector,
        /// Write S(κ) samples along the energy side.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Full reconciliation for a potential described by a JSON config.
    Potential {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `outputs.csv` from the config.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Recompute the four winding tables and compare them with the golden values.
    Tables {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check T = ½(1 − R) on a suite of test functions.
    VerifyR {
        /// Number of functions: the calibration one plus up to four others.
        #[arg(long, default_value_t = 5)]
        suite: usize,
        /// Append the zero function to the suite.
        #[arg(long)]
        with_zero: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, hide = true)]
        reversed_mellin_sign: bool,
    },
}

enum Failure {
    Usage(String),
    Identity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut root = &e;
        while let Error::Context { source, .. } = root {
            root = source;
        }
        match root {
            Error::InvalidInput(_) | Error::SymmetryRequired(_) => Failure::Usage(e.to_string()),
            _ => Failure::Identity(e.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point {
            kind,
            param,
            sector,
            csv,
        } => cmd_point(kind, param, sector, csv.as_deref()),
        Command::Potential { config, csv } => cmd_potential(&config, csv),
        Command::Tables { json } => cmd_tables(json.as_deref()),
        Command::VerifyR {
            suite,
            with_zero,
            csv,
            reversed_mellin_sign,
        } => cmd_verify_r(suite, with_zero, csv.as_deref(), reversed_mellin_sign),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Identity(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

/// Writes through a sibling temporary file so readers never see partial output.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Usage(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn cmd_point(kind: InteractionKind, param: Extended, sector: Sector, csv: Option<&Path>) -> CmdResult {
    let pi = PointInteraction { kind, param };
    let report = levinson::point::verify_levinson(&pi, sector)?;
    print!("{}", render_reports_text(std::slice::from_ref(&report)));
    if let Some(path) = csv {
        let kappas = KappaGrid {
            kappa_min: 1e-3,
            kappa_max: 1e3,
            points_per_decade: 40,
        }
        .nodes();
        let s: Vec<_> = kappas
            .iter()
            .map(|&k| sector.project(&pi.s_matrix(Extended::Finite(k))))
            .collect();
        write_atomic(path, &s_matrix_csv(&kappas, &s))?;
    }
    let ok = report.passes(POINT_TOL);
    println!("identity {}", if ok { "holds" } else { "FAILS" });
    Ok(ok)
}

fn class_line(c: &ResonanceClass) -> String {
    match c {
        ResonanceClass::Generic => "generic".into(),
        ResonanceClass::Exceptional { gamma } => {
            let kind = if (gamma - 1.0).abs() < 1e-3 {
                ", even half-bound state"
            } else if (gamma + 1.0).abs() < 1e-3 {
                ", odd half-bound state"
            } else {
                ""
            };
            format!("exceptional, gamma = {gamma:.6}{kind}")
        }
    }
}

fn cmd_potential(config: &Path, csv: Option<PathBuf>) -> CmdResult {
    let mut spec = ConfigFile::load(config)?;
    if csv.is_some() {
        spec.outputs.csv = csv;
    }
    let outcomes = run_experiment_outcomes(&spec)?;
    let mut ok = true;
    for o in &outcomes {
        ok &= o.passes();
        let r = o.report();
        println!("== {}", r.label);
        match o {
            Outcome::Point { .. } => {
                println!("classification: {}", class_line(&r.resonance));
                println!("bound states: N = {}", r.n_bound);
            }
            Outcome::Potential { result } => {
                let t = &result.threshold;
                println!(
                    "classification: {}; zero-energy growth {:.3e}, S(0) deviation {:.3e}{}",
                    class_line(&t.class),
                    t.solution.growth,
                    t.s0_deviation,
                    if result.sector_resonant {
                        "; resonant in this sector"
                    } else {
                        ""
                    },
                );
                println!(
                    "bound states: shooting {}, finite differences {} ({})",
                    result.n_shooting,
                    result.n_oracle,
                    if result.counters_agree() { "agree" } else { "DISAGREE" }
                );
                println!(
                    "time delay: {:.6} from the samples, {:.6} from the winding of the energy side",
                    result.time_delay + 0.0,
                    r.time_delay() + 0.0
                );
                println!(
                    "samples: {} momenta, max unitarity defect {:.2e}",
                    result.grid_points, result.max_unitarity_defect
                );
                for w in &result.warnings {
                    println!("warning: {w}");
                }
            }
        }
        println!(
            "windings: w1 = {}, w2 = {}, w3 = {}, w4 = {}, total = {}",
            fmt_half(r.w[0]),
            fmt_half(r.w[1]),
            fmt_half(r.w[2]),
            fmt_half(r.w[3]),
            fmt_half(r.total)
        );
        println!(
            "bookkeeping: N + nu = {} + ({}) = {} = time delay; total + N = {:.2e}",
            r.n_bound,
            fmt_half(r.correction),
            fmt_half(r.n_bound as f64 + r.correction),
            r.total + r.n_bound as f64
        );
        println!("identity {}", if o.passes() { "holds" } else { "FAILS" });
    }
    if let Some(path) = &spec.outputs.report {
        write_atomic(path, &render_json(&outcomes)?)?;
    }
    if let Some(path) = &spec.outputs.csv {
        let data = outcomes.iter().find_map(|o| match o {
            Outcome::Potential { result } => result.data.as_ref(),
            Outcome::Point { .. } => None,
        });
        match data {
            Some(d) => {
                let eo = d.in_basis(Basis::EvenOdd);
                write_atomic(path, &s_matrix_csv(&eo.kappas, &eo.s_matrices))?;
            }
            None => eprintln!("note: csv output is only produced for potentials"),
        }
    }
    Ok(ok)
}

fn cmd_tables(json: Option<&Path>) -> CmdResult {
    let rows = compute_tables()?;
    print!("{}", render_tables_text(&rows));
    let mut ok = true;
    for r in &rows {
        if let Err(e) = r.check(GOLDEN_TOL) {
            println!("{e}");
            ok = false;
        }
    }
    if let Some(path) = json {
        write_atomic(path, &render_json(&rows)?)?;
    }
    Ok(ok)
}

fn cmd_verify_r(size: usize, with_zero: bool, csv: Option<&Path>, reversed: bool) -> CmdResult {
    if size == 0 || size > 5 {
        return Err(Failure::Usage(format!(
            "suite size must be between 1 and 5, got {size}"
        )));
    }
    let (calibrated, [std, rev]) = operator::calibrate()?;
    println!("calibration residuals: standard {std:.3e}, reversed {rev:.3e}; selected {calibrated:?}");
    let conv = if reversed {
        MellinConvention::Reversed
    } else {
        MellinConvention::FROZEN
    };
    let mut functions = operator::suite(size);
    if with_zero {
        functions.push(operator::TestFunction::zero());
    }
    let lines = operator::verify_suite(&functions, conv)?;
    for l in &lines {
        println!(
            "{:<28} residual {:.3e}  |Rg|/|g| even {:.9} odd {:.9}  {}",
            l.name,
            l.residual,
            l.norm_ratios[0].sqrt(),
            l.norm_ratios[1].sqrt(),
            if l.passes() { "ok" } else { "FAIL" }
        );
    }
    if let Some(path) = csv {
        write_atomic(path, &operator::suite_csv(&lines))?;
    }
    Ok(lines.iter().all(|l| l.passes()))
}
