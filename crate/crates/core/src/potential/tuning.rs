//! Locating zero-energy resonances along a one-parameter family by bisection.

use serde::{Deserialize, Serialize};

use super::ode::Dopri5;
use super::threshold::{zero_energy_solution, ZeroEnergySolution};
use super::Potential;
use crate::error::{Error, Result};

/// Resonant member of a family, approached from the side with fewer bound states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub parameter: f64,
    pub potential: Potential,
    pub solution: ZeroEnergySolution,
    /// Bound states just below and just above the threshold.
    pub n_below: usize,
    pub n_above: usize,
}

/// Bisects `param ↦ family(param)` on `[lo, hi]` for the point where the
/// asymptotic slope of the zero-energy solution changes sign, returning the last
/// parameter on the side with fewer bound states.
pub fn find_threshold(family: impl Fn(f64) -> Potential, lo: f64, hi: f64, ode: &Dopri5) -> Result<Threshold> {
    let count = |p: f64| -> Result<(usize, ZeroEnergySolution)> {
        let s = zero_energy_solution(&family(p), ode)?;
        Ok((s.slope_nodes, s))
    };
    let (mut a, mut b) = (lo, hi);
    let (n_a, mut sol_a) = count(a)?;
    let (n_b, _) = count(b)?;
    if n_a == n_b {
        return Err(Error::InvalidInput(format!(
            "no change in bound-state count on [{lo}, {hi}] (both {n_a})"
        )));
    }
    let ascending = n_b > n_a;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let (n_m, sol_m) = count(m)?;
        if n_m == n_a {
            a = m;
            sol_a = sol_m;
        } else {
            b = m;
        }
    }
    let (n_lo, n_hi) = if ascending { (n_a, n_b) } else { (n_b, n_a) };
    let (parameter, solution, n_below, n_above) = if ascending {
        (a, sol_a, n_lo, n_hi)
    } else {
        // the lower-count side is the upper bracket end
        let (_, sol_b) = count(b)?;
        (b, sol_b, n_lo, n_hi)
    };
    Ok(Threshold {
        parameter,
        potential: family(parameter),
        solution,
        n_below,
        n_above,
    })
}

impl Threshold {
    /// Moves away from the resonance, toward fewer bound states, until the
    /// relative growth of the zero-energy solution is about `target`.
    ///
    /// The growth is linear in the offset near a simple threshold, so one probe
    /// and one rescaled step suffice.
    pub fn detune(
        &self,
        family: impl Fn(f64) -> Potential,
        ascending: bool,
        target: f64,
        ode: &Dopri5,
    ) -> Result<(f64, Potential, ZeroEnergySolution)> {
        let dir = if ascending { -1.0 } else { 1.0 };
        let probe = 1e-9 * self.parameter.abs().max(1.0);
        let g = zero_energy_solution(&family(self.parameter + dir * probe), ode)?.growth;
        if g.is_nan() || g <= 0.0 {
            return Err(Error::InvalidInput("growth does not respond to the parameter".into()));
        }
        let p = self.parameter + dir * probe * target / g;
        let v = family(p);
        let sol = zero_energy_solution(&v, ode)?;
        Ok((p, v, sol))
    }
}
