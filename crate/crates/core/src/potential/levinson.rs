//! The boundary loop of a potential and the time-delay bookkeeping.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bound::{count_bound_states_oracle, sector_bound_states_oracle, OracleOptions};
use super::jost::{s_matrix_grid, Basis, ScatteringData};
use super::ode::Dopri5;
use super::threshold::{analyze_threshold, sector_zero_energy_solution, ThresholdAnalysis};
use super::Potential;
use crate::error::{Error, Result};
use crate::linalg::{unitary_lerp, Mat2};
use crate::paths::{gamma_from_endpoint, loop_winding, BoundaryLoop, BoundaryPath, Sector, Side, WindingReport};

/// Numerical knobs for one potential run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScatteringOptions {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub points_per_decade: usize,
    /// Largest `‖S(κ_{j+1}) − S(κ_j)‖_max` tolerated before inserting a midpoint.
    pub max_jump: f64,
    pub max_refinements: usize,
    pub unitarity_tol: f64,
    pub rtol: f64,
    pub atol: f64,
    pub winding_samples: usize,
    pub residual_tol: f64,
}

impl Default for ScatteringOptions {
    fn default() -> Self {
        let ode = Dopri5::default();
        Self {
            kappa_min: 1e-4,
            kappa_max: 1e3,
            points_per_decade: 40,
            max_jump: 0.1,
            max_refinements: 12,
            unitarity_tol: 1e-8,
            rtol: ode.rtol,
            atol: ode.atol,
            winding_samples: 1024,
            residual_tol: 1e-4,
        }
    }
}

impl ScatteringOptions {
    pub fn ode(&self) -> Dopri5 {
        Dopri5 {
            rtol: self.rtol,
            atol: self.atol,
            ..Dopri5::default()
        }
    }
}

/// Geometric momentum grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaGrid {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub points_per_decade: usize,
}

impl KappaGrid {
    pub fn nodes(&self) -> Vec<f64> {
        let decades = (self.kappa_max / self.kappa_min).log10();
        let n = ((decades * self.points_per_decade as f64).ceil() as usize).max(1);
        (0..=n)
            .map(|k| self.kappa_min * (self.kappa_max / self.kappa_min).powf(k as f64 / n as f64))
            .collect()
    }
}

/// Samples `S` on a geometric grid, then bisects (geometrically) every interval
/// across which `S` moves by more than `opts.max_jump`.
pub fn scattering_data_for_loop(
    v: &Potential,
    threshold: &ThresholdAnalysis,
    opts: &ScatteringOptions,
) -> Result<ScatteringData> {
    let ode = opts.ode();
    let kappa_min = opts.kappa_min.min(1e-2 * threshold.low_momentum_scale());
    let grid = KappaGrid {
        kappa_min,
        kappa_max: opts.kappa_max,
        points_per_decade: opts.points_per_decade,
    };
    let mut data = s_matrix_grid(v, &grid.nodes(), &ode)?;
    for _ in 0..opts.max_refinements {
        let inserts: Vec<f64> = data
            .kappas
            .windows(2)
            .zip(data.s_matrices.windows(2))
            .filter(|(_, s)| s[0].dist(&s[1]) > opts.max_jump)
            .map(|(k, _)| (k[0] * k[1]).sqrt())
            .collect();
        if inserts.is_empty() {
            break;
        }
        let extra = s_matrix_grid(v, &inserts, &ode)?;
        let mut merged: Vec<(f64, Mat2)> = data
            .kappas
            .iter()
            .copied()
            .zip(data.s_matrices.iter().copied())
            .chain(extra.kappas.into_iter().zip(extra.s_matrices))
            .collect();
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        data.kappas = merged.iter().map(|m| m.0).collect();
        data.s_matrices = merged.iter().map(|m| m.1).collect();
    }
    for (k, s) in data.kappas.iter().zip(&data.s_matrices) {
        let defect = s.unitarity_defect();
        if defect > opts.unitarity_tol {
            return Err(Error::NonUnitaryPath { t: *k, defect });
        }
    }
    Ok(data)
}

/// `(1/2π)∫ tr[iS†S′] dκ` from tabulated data: the decrease of the unwrapped
/// `arg det S` from `κ = 0` (linear extrapolation) to `κ = ∞` (`S = 1`), over 2π.
pub fn time_delay_integral(data: &ScatteringData) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let dets: Vec<_> = data.s_matrices.iter().map(Mat2::det).collect();
    let head = if dets.len() >= 2 {
        let (k1, k2) = (data.kappas[0], data.kappas[1]);
        let d0 = dets[0] - (dets[1] - dets[0]) * (k1 / (k2 - k1));
        (dets[0] * d0.conj()).arg()
    } else {
        0.0
    };
    let tail = -dets[dets.len() - 1].arg();
    let mut total = head + tail;
    for (j, w) in dets.windows(2).enumerate() {
        let step = (w[1] * w[0].conj()).arg();
        if step.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::PhaseJumpTooLarge {
                side: Side::B2,
                step: step.abs(),
                samples: j,
            });
        }
        total += step;
    }
    for step in [head, tail] {
        if step.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::PhaseJumpTooLarge {
                side: Side::B2,
                step: step.abs(),
                samples: 0,
            });
        }
    }
    Ok(-total / (2.0 * PI))
}

/// `S` along the energy side: the exact threshold value at `κ = 0`, unitary
/// interpolation between grid nodes, and a unitary approach to 1 beyond the grid.
fn energy_side(s0: Mat2, data: &ScatteringData, sector: Sector) -> BoundaryPath {
    let kappas: Arc<[f64]> = Arc::from(data.kappas.clone());
    let mats: Arc<[Mat2]> = Arc::from(data.s_matrices.iter().map(|s| sector.project(s)).collect::<Vec<_>>());
    let knots = data.kappas.clone();
    let (ks, ms) = (kappas.clone(), mats.clone());
    BoundaryPath::new(Side::B2, move |p| {
        let k = match p {
            crate::Extended::Finite(k) => k,
            crate::Extended::PosInf => return Mat2::IDENTITY,
            crate::Extended::NegInf => return s0,
        };
        let n = ks.len();
        if k <= 0.0 {
            return s0;
        }
        if k <= ks[0] {
            return unitary_lerp(&s0, &ms[0], k / ks[0]);
        }
        if k >= ks[n - 1] {
            return unitary_lerp(&ms[n - 1], &Mat2::IDENTITY, 1.0 - ks[n - 1] / k);
        }
        let j = ks.partition_point(|&x| x <= k).clamp(1, n - 1);
        let s = (k - ks[j - 1]) / (ks[j] - ks[j - 1]);
        unitary_lerp(&ms[j - 1], &ms[j], s)
    })
    .with_knots(knots)
}

fn check_sector(v: &Potential, sector: Sector) -> Result<()> {
    if sector != Sector::Full && !v.is_symmetric() {
        return Err(Error::SymmetryRequired("sector loops need V(−x) = V(x)"));
    }
    Ok(())
}

fn assemble_loop(threshold: &ThresholdAnalysis, data: &ScatteringData, sector: Sector) -> Result<BoundaryLoop> {
    if !threshold.is_consistent() {
        return Err(Error::CornerMismatch {
            from: Side::B1,
            to: Side::B2,
            mismatch: threshold.s0_deviation,
        });
    }
    let s0 = sector.project(&threshold.class.s0());
    BoundaryLoop::new([
        gamma_from_endpoint(s0, Side::B1)?,
        energy_side(s0, &data.in_basis(Basis::EvenOdd), sector),
        gamma_from_endpoint(Mat2::IDENTITY, Side::B3)?,
        BoundaryPath::constant(Side::B4, Mat2::IDENTITY),
    ])
}

/// Loop `(Γ1, S, 1, 1)` in the even/odd basis, restricted to `sector`.
pub fn build_loop_potential(v: &Potential, sector: Sector, opts: &ScatteringOptions) -> Result<BoundaryLoop> {
    check_sector(v, sector)?;
    let threshold = analyze_threshold(v, &opts.ode())?;
    let data = scattering_data_for_loop(v, &threshold, opts)?;
    assemble_loop(&threshold, &data, sector)
}

/// Everything computed for one potential and one sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialLevinson {
    pub report: WindingReport,
    pub threshold: ThresholdAnalysis,
    /// Whether this sector carries the zero-energy resonance.
    pub sector_resonant: bool,
    pub n_shooting: usize,
    pub n_oracle: usize,
    /// `(1/2π)∫ tr[iS†S′]` from the sampled data, restricted to the sector.
    pub time_delay: f64,
    pub max_unitarity_defect: f64,
    pub grid_points: usize,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub data: Option<ScatteringData>,
}

impl PotentialLevinson {
    pub fn counters_agree(&self) -> bool {
        self.n_shooting == self.n_oracle
    }

    /// Index identity within `tol`, counters agreeing.
    pub fn passes(&self, tol: f64) -> bool {
        self.counters_agree() && self.report.passes(tol)
    }
}

fn restrict(data: &ScatteringData, sector: Sector) -> ScatteringData {
    let eo = data.in_basis(Basis::EvenOdd);
    if sector == Sector::Full {
        return eo;
    }
    ScatteringData {
        kappas: eo.kappas,
        s_matrices: eo.s_matrices.iter().map(|s| sector.project(s)).collect(),
        basis: Basis::EvenOdd,
    }
}

/// Classifies, counts, builds and winds the loop for `v` in `sector`.
pub fn verify_levinson_potential(v: &Potential, sector: Sector, opts: &ScatteringOptions) -> Result<PotentialLevinson> {
    let warnings = v.validate()?;
    check_sector(v, sector)?;
    let ode = opts.ode();
    let threshold = analyze_threshold(v, &ode)?;
    let data = scattering_data_for_loop(v, &threshold, opts)?;
    let lp = assemble_loop(&threshold, &data, sector)?;
    let windings = loop_winding(&lp, opts.winding_samples)?;

    let oracle = OracleOptions::for_potential(v)?;
    let (n_shooting, n_oracle, sector_resonant) = match sector {
        Sector::Full => (
            threshold.solution.nodes,
            count_bound_states_oracle(v, oracle.box_half_width, oracle.n_points)?,
            !threshold.class.is_generic(),
        ),
        Sector::Even | Sector::Odd => {
            let half = sector_zero_energy_solution(v, sector, &ode)?;
            (
                half.nodes,
                sector_bound_states_oracle(v, sector, oracle.box_half_width, oracle.n_points)?,
                half.is_bounded()?,
            )
        }
    };
    let restricted = restrict(&data, sector);
    let report = WindingReport::new(
        format!("{} [{}]", v.label(), sector),
        sector,
        windings,
        n_shooting,
        threshold.class,
    );
    Ok(PotentialLevinson {
        report,
        threshold,
        sector_resonant,
        n_shooting,
        n_oracle,
        time_delay: time_delay_integral(&restricted)?,
        max_unitarity_defect: data.max_unitarity_defect(),
        grid_points: data.len(),
        warnings,
        data: Some(data),
    })
}
