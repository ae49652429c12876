//! Two independent bound-state counters.
//!
//! The shooting counter counts nodes of the zero-energy solution (Sturm
//! oscillation). The oracle counts negative eigenvalues of a finite-difference
//! Hamiltonian in a hard-walled box via the inertia of its `LDLᵀ` factorization.

use serde::{Deserialize, Serialize};

use super::ode::Dopri5;
use super::threshold::{sector_zero_energy_solution, zero_energy_solution};
use super::Potential;
use crate::error::{Error, Result};
use crate::paths::Sector;

pub fn count_bound_states_shooting(v: &Potential) -> Result<usize> {
    Ok(zero_energy_solution(v, &Dopri5::default())?.nodes)
}

pub fn sector_bound_states_shooting(v: &Potential, sector: Sector) -> Result<usize> {
    Ok(sector_zero_energy_solution(v, sector, &Dopri5::default())?.nodes)
}

/// Box and resolution for the finite-difference counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub box_half_width: f64,
    pub n_points: usize,
}

impl OracleOptions {
    pub const MIN_POINTS: usize = 2000;
    const BASE_POINTS: usize = 16_000;
    const MAX_HALF_WIDTH: f64 = 1e5;

    /// A box of `max(3R, R + 50)` around a window of radius `R` with 16000
    /// points, widened to `R + 10|a|` at the same spacing when a growing
    /// zero-energy solution has scattering length `a`: a weakly bound state
    /// extends over about `a`.
    pub fn for_potential(v: &Potential) -> Result<Self> {
        let (lo, hi) = v.window()?;
        let r = lo.abs().max(hi.abs());
        let base = (3.0 * r).max(r + 50.0);
        let ode = Dopri5::default();
        let mut solutions = vec![zero_energy_solution(v, &ode)?];
        if v.is_symmetric() {
            for sector in [Sector::Even, Sector::Odd] {
                solutions.push(sector_zero_energy_solution(v, sector, &ode)?);
            }
        }
        let reach = solutions
            .iter()
            .filter(|s| matches!(s.is_bounded(), Ok(false)))
            .filter_map(|s| s.scattering_length())
            .map(|a| r + 10.0 * a.abs())
            .fold(base, f64::max)
            .min(Self::MAX_HALF_WIDTH.max(base));
        Ok(Self {
            box_half_width: reach,
            n_points: (Self::BASE_POINTS as f64 * reach / base).ceil() as usize,
        })
    }
}

/// Number of negative eigenvalues of the symmetric tridiagonal matrix with
/// diagonal `d` and constant off-diagonal `e`.
fn negative_inertia(diag: impl Iterator<Item = f64>, e: f64) -> usize {
    let e2 = e * e;
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for a in diag {
        let mut p = match prev {
            None => a,
            Some(q) => a - e2 / q,
        };
        if p == 0.0 {
            p = -f64::EPSILON * e2.sqrt().max(a.abs()).max(1.0);
        }
        if p < 0.0 {
            count += 1;
        }
        prev = Some(p);
    }
    count
}

fn full_line_count(v: &Potential, half: f64, n: usize) -> usize {
    let h = 2.0 * half / (n + 1) as f64;
    let k = 1.0 / (h * h);
    let diag = (1..=n).map(|j| 2.0 * k + v.eval(-half + j as f64 * h));
    negative_inertia(diag, -k)
}

fn half_line_count(v: &Potential, sector: Sector, half: f64, n: usize) -> usize {
    let k_of = |h: f64| 1.0 / (h * h);
    match sector {
        // cell centres (j + ½)h with a mirrored ghost cell at the origin
        Sector::Even => {
            let h = half / (n as f64 + 0.5);
            let k = k_of(h);
            let diag = (0..n).map(|j| {
                let x = (j as f64 + 0.5) * h;
                (if j == 0 { k } else { 2.0 * k }) + v.eval(x)
            });
            negative_inertia(diag, -k)
        }
        _ => {
            let h = half / (n + 1) as f64;
            let k = k_of(h);
            let diag = (1..=n).map(|j| 2.0 * k + v.eval(j as f64 * h));
            negative_inertia(diag, -k)
        }
    }
}

fn certified(n_points: usize, count: impl Fn(usize) -> usize) -> Result<usize> {
    if n_points < OracleOptions::MIN_POINTS {
        return Err(Error::InvalidInput(format!(
            "oracle needs at least {} points, got {n_points}",
            OracleOptions::MIN_POINTS
        )));
    }
    let coarse = count(n_points);
    let fine = count(2 * n_points);
    if coarse != fine {
        return Err(Error::ResolutionInsufficient { coarse, fine });
    }
    Ok(fine)
}

/// Negative eigenvalues of the box-discretized Hamiltonian on `[−L, L]`.
pub fn count_bound_states_oracle(v: &Potential, box_half_width: f64, n_points: usize) -> Result<usize> {
    if !(box_half_width > 0.0 && box_half_width.is_finite()) {
        return Err(Error::InvalidInput(format!("invalid box half-width {box_half_width}")));
    }
    certified(n_points, |n| full_line_count(v, box_half_width, n))
}

/// Sector count on `[0, L]`: Neumann at the origin for even, Dirichlet for odd.
pub fn sector_bound_states_oracle(
    v: &Potential,
    sector: Sector,
    box_half_width: f64,
    n_points: usize,
) -> Result<usize> {
    if sector == Sector::Full {
        return count_bound_states_oracle(v, box_half_width, n_points);
    }
    if !v.is_symmetric() {
        return Err(Error::SymmetryRequired("sector counts need V(−x) = V(x)"));
    }
    if !(box_half_width > 0.0 && box_half_width.is_finite()) {
        return Err(Error::InvalidInput(format!("invalid box half-width {box_half_width}")));
    }
    certified(n_points, |n| half_line_count(v, sector, box_half_width, n))
}
