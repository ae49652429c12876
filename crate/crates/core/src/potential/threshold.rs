//! Zero-energy behaviour: the solution of `−ψ'' + Vψ = 0` that is constant on
//! the left, its asymptotics `A + Bx` on the right, and the threshold form of
//! `S(0)` it selects.

use serde::{Deserialize, Serialize};

use super::jost::{to_even_odd, Setup};
use super::ode::Dopri5;
use super::{Potential, Shape};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::paths::{ResonanceClass, Sector};

/// Relative growth below the lower bound is a resonance, above the upper bound
/// generic; in between the classification is refused.
pub const DEAD_ZONE: (f64, f64) = (1e-6, 1e-3);

/// Allowed distance between the extrapolated `S(0)` and its threshold form.
pub const S0_TOL: f64 = 1e-3;

/// Zero-energy solution with unit data at the start of the integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEnergySolution {
    /// Constant term of `A + Bx` beyond the window.
    pub a: f64,
    /// Slope beyond the window.
    pub b: f64,
    /// Sign changes on the open half-line or line, counted through the asymptote.
    pub nodes: usize,
    /// Same count but always following the slope `B`; changes exactly where `B = 0`.
    pub slope_nodes: usize,
    /// `|B|ℓ / √(A² + (Bℓ)²)` with `ℓ` the window radius.
    pub growth: f64,
    pub x_start: f64,
    pub x_end: f64,
}

impl ZeroEnergySolution {
    /// Free solution `ψ ≡ 1`.
    fn constant(x_start: f64, x_end: f64) -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            nodes: 0,
            slope_nodes: 0,
            growth: 0.0,
            x_start,
            x_end,
        }
    }

    /// `−A/B`, the zero of the asymptote, when the solution grows.
    pub fn scattering_length(&self) -> Option<f64> {
        (self.b != 0.0).then(|| -self.a / self.b)
    }

    /// Bounded (`true`) or growing (`false`), or an error inside the dead zone.
    pub fn is_bounded(&self) -> Result<bool> {
        if self.growth < DEAD_ZONE.0 {
            Ok(true)
        } else if self.growth > DEAD_ZONE.1 {
            Ok(false)
        } else {
            Err(Error::ClassificationAmbiguous { growth: self.growth })
        }
    }
}

fn shooting_solver(v: &Potential, ode: &Dopri5) -> Dopri5 {
    let scale = v.max_abs().sqrt().max(1e-3);
    super::jost::solver_for(v, ode).with_h_max(ode.h_max.min(0.5 / scale))
}

fn shoot(v: &Potential, ode: &Dopri5, points: &[f64], y0: [f64; 2], radius: f64) -> Result<ZeroEnergySolution> {
    let x_start = points[0];
    let x_end = points[points.len() - 1];
    let rhs = |x: f64, y: &[f64; 2], d: &mut [f64; 2]| {
        d[0] = y[1];
        d[1] = v.eval(x) * y[0];
    };
    let mut nodes = 0usize;
    let mut last_sign = y0[0].signum() * (y0[0] != 0.0) as i32 as f64;
    let y = shooting_solver(v, ode).integrate_segments(rhs, points, y0, |_, y| {
        if y[0] != 0.0 {
            let s = y[0].signum();
            if last_sign != 0.0 && s != last_sign {
                nodes += 1;
            }
            last_sign = s;
        }
    })?;
    let b = y[1];
    let a = y[0] - b * x_end;
    let growth = (b.abs() * radius) / (a * a + (b * radius).powi(2)).sqrt();
    // a bounded solution keeps the sign of A for ever; the far zero of an
    // asymptote with negligible slope belongs to the threshold, not to a state
    let crosses = |far: f64| (last_sign != 0.0 && far != 0.0 && far.signum() != last_sign) as usize;
    let slope_nodes = nodes + crosses(b);
    nodes += crosses(if growth < DEAD_ZONE.0 { a } else { b });
    Ok(ZeroEnergySolution {
        a,
        b,
        nodes,
        slope_nodes,
        growth,
        x_start,
        x_end,
    })
}

/// Full-line zero-energy solution, equal to 1 left of the window.
pub fn zero_energy_solution(v: &Potential, ode: &Dopri5) -> Result<ZeroEnergySolution> {
    let (xl, xr) = v.window()?;
    if matches!(v.shape, Shape::Zero) {
        return Ok(ZeroEnergySolution::constant(xl, xr));
    }
    let radius = xl.abs().max(xr.abs()).max(1.0);
    shoot(v, ode, &v.segment_points(xl, xr), [1.0, 0.0], radius)
}

/// Half-line solution of a symmetric potential: `(ψ, ψ') = (1, 0)` at the
/// origin for the even sector, `(0, 1)` for the odd one.
pub fn sector_zero_energy_solution(v: &Potential, sector: Sector, ode: &Dopri5) -> Result<ZeroEnergySolution> {
    let y0 = match sector {
        Sector::Even => [1.0, 0.0],
        Sector::Odd => [0.0, 1.0],
        Sector::Full => return zero_energy_solution(v, ode),
    };
    if !v.is_symmetric() {
        return Err(Error::SymmetryRequired("sector analysis needs V(−x) = V(x)"));
    }
    let (xl, xr) = v.window()?;
    let radius = xl.abs().max(xr.abs()).max(1.0);
    if matches!(v.shape, Shape::Zero) {
        return shoot(&Potential::zero(), ode, &[0.0, radius], y0, radius);
    }
    shoot(v, ode, &v.segment_points(0.0, radius), y0, radius)
}

/// Classification from the zero-energy solution, with a low-momentum cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdAnalysis {
    pub class: ResonanceClass,
    pub solution: ZeroEnergySolution,
    /// `S(0)` in the even/odd basis, extrapolated from small momenta.
    pub s0_extrapolated: Mat2,
    /// `max |S(0)_extrapolated − S(0)_class|`.
    pub s0_deviation: f64,
    /// Smallest momentum used by the extrapolation.
    pub kappa_probe: f64,
}

impl ThresholdAnalysis {
    pub fn is_consistent(&self) -> bool {
        self.s0_deviation <= S0_TOL
    }

    /// Momentum scale below which `S` is close to its threshold form.
    pub fn low_momentum_scale(&self) -> f64 {
        match self.class {
            ResonanceClass::Generic => {
                let reach = self.solution.x_start.abs().max(self.solution.x_end.abs());
                let a = self.solution.scattering_length().unwrap_or(0.0).abs() + reach;
                1.0 / a
            }
            ResonanceClass::Exceptional { .. } => f64::INFINITY,
        }
    }
}

/// `S(0)` by quadratic extrapolation from `κ0`, `κ0/2`, `κ0/4`.
pub(crate) fn extrapolate_s0(v: &Potential, kappa0: f64, ode: &Dopri5) -> Result<Mat2> {
    let setup = Setup::new(v, ode)?;
    let mut s = [Mat2::IDENTITY; 3];
    for (k, m) in s.iter_mut().enumerate() {
        let kappa = kappa0 / f64::powi(2.0, k as i32);
        *m = to_even_odd(&setup.solve(v, kappa)?.s_matrix());
    }
    Ok((s[0] - s[1].scale(6.0.into()) + s[2].scale(8.0.into())).scale((1.0 / 3.0).into()))
}

/// Zero-energy classification of `v` plus the extrapolated `S(0)` it implies.
pub fn analyze_threshold(v: &Potential, ode: &Dopri5) -> Result<ThresholdAnalysis> {
    let solution = zero_energy_solution(v, ode)?;
    let class = if solution.is_bounded()? {
        ResonanceClass::Exceptional { gamma: solution.a }
    } else {
        ResonanceClass::Generic
    };
    // below the crossover momentum a near-resonance no longer looks resonant
    let reach = solution.x_start.abs().max(solution.x_end.abs()).max(1.0);
    let kappa_probe = match (class, solution.scattering_length()) {
        (ResonanceClass::Generic, Some(a)) => (1e-3f64).min(1e-2 / (a.abs() + reach)),
        (ResonanceClass::Generic, None) => 1e-3,
        (ResonanceClass::Exceptional { .. }, _) => 1e-2 / reach,
    };
    let s0_extrapolated = if matches!(v.shape, Shape::Zero) {
        Mat2::IDENTITY
    } else {
        extrapolate_s0(v, kappa_probe, ode)?
    };
    let s0_deviation = s0_extrapolated.dist(&class.s0());
    Ok(ThresholdAnalysis {
        class,
        solution,
        s0_extrapolated,
        s0_deviation,
        kappa_probe,
    })
}

/// Generic or exceptional, failing when the cross-check disagrees.
pub fn classify_zero_energy(v: &Potential) -> Result<ResonanceClass> {
    let t = analyze_threshold(v, &Dopri5::default())?;
    if !t.is_consistent() {
        return Err(Error::ThresholdMismatch {
            class: if t.class.is_generic() { "generic" } else { "exceptional" },
            deviation: t.s0_deviation,
        });
    }
    Ok(t.class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_is_exceptional_gamma_one() {
        assert_eq!(
            classify_zero_energy(&Potential::zero()).unwrap(),
            ResonanceClass::Exceptional { gamma: 1.0 }
        );
    }

    #[test]
    fn unit_square_well_is_generic() {
        let v = Potential::square_well(1.0, 1.0);
        let t = analyze_threshold(&v, &Dopri5::default()).unwrap();
        assert_eq!(t.class, ResonanceClass::Generic);
        assert_eq!(t.solution.nodes, 1);
        // ψ = cos(x + 1) inside, so B = −sin 2 and A = cos 2 + sin 2
        assert!((t.solution.b + 2f64.sin()).abs() < 1e-9);
        assert!((t.solution.a - 2f64.cos() - 2f64.sin()).abs() < 1e-9);
        assert!(t.s0_deviation < 1e-4, "{}", t.s0_deviation);
    }

    #[test]
    fn resonant_square_wells() {
        // even resonance at √V0·a = π, odd resonance at π/2
        for (depth, gamma) in [(PI * PI, 1.0), (PI * PI / 4.0, -1.0)] {
            let v = Potential::square_well(depth, 1.0);
            let t = analyze_threshold(&v, &Dopri5::default()).unwrap();
            match t.class {
                ResonanceClass::Exceptional { gamma: g } => assert!((g - gamma).abs() < 1e-8),
                other => panic!("{other:?}"),
            }
            assert!(t.s0_deviation < 1e-4, "{}", t.s0_deviation);
        }
    }

    #[test]
    fn dead_zone_is_refused() {
        let v = Potential::square_well(PI * PI / 4.0 * (1.0 + 1e-5), 1.0);
        let r = zero_energy_solution(&v, &Dopri5::default()).unwrap();
        assert!(r.growth > DEAD_ZONE.0 && r.growth < DEAD_ZONE.1, "{}", r.growth);
        assert!(matches!(r.is_bounded(), Err(Error::ClassificationAmbiguous { .. })));
    }

    #[test]
    fn sector_solutions_of_free_line() {
        let v = Potential::zero();
        let e = sector_zero_energy_solution(&v, Sector::Even, &Dopri5::default()).unwrap();
        let o = sector_zero_energy_solution(&v, Sector::Odd, &Dopri5::default()).unwrap();
        assert!(e.is_bounded().unwrap());
        assert!(!o.is_bounded().unwrap());
        assert_eq!(e.nodes + o.nodes, 0);
    }

    #[test]
    fn asymmetric_sector_is_refused() {
        let v = Potential::tabulated(vec![0.0, 1.0, 2.0], vec![-1.0, -2.0, 0.0]).unwrap();
        assert!(matches!(
            sector_zero_energy_solution(&v, Sector::Even, &Dopri5::default()),
            Err(Error::SymmetryRequired(_))
        ));
    }
}
