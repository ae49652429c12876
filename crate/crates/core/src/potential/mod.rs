//! Scattering by a real, decaying potential `V` on the line: `H = −d²/dx² + V`.

mod bound;
mod jost;
mod levinson;
pub mod ode;
mod threshold;
mod tuning;

pub use bound::{
    count_bound_states_oracle, count_bound_states_shooting, sector_bound_states_oracle, sector_bound_states_shooting,
    OracleOptions,
};
pub use jost::{jost_solve, s_matrix_grid, to_even_odd, Basis, JostSolution, ScatteringData};
pub use levinson::{
    build_loop_potential, scattering_data_for_loop, time_delay_integral, verify_levinson_potential, KappaGrid,
    PotentialLevinson, ScatteringOptions,
};
pub use threshold::{
    analyze_threshold, classify_zero_energy, sector_zero_energy_solution, zero_energy_solution, ThresholdAnalysis,
    ZeroEnergySolution, DEAD_ZONE, S0_TOL,
};
pub use tuning::{find_threshold, Threshold};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neglected `∫|V|` beyond the integration window.
pub const TAIL_TOL: f64 = 1e-10;
const MAX_RADIUS: f64 = 1e4;

/// `V(x) = −depth · exp(−((x − center)/width)²)`; positive depth is attractive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub depth: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Zero,
    /// `V = −depth` on `|x − center| ≤ half_width`.
    SquareWell {
        depth: f64,
        half_width: f64,
        #[serde(default)]
        center: f64,
    },
    GaussianSum {
        wells: Vec<Gaussian>,
    },
    /// Piecewise-linear through the samples, zero outside them.
    Tabulated {
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub shape: Shape,
    /// Claimed exponent `p` in `|V(x)| ≤ C(1 + |x|)^−p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
}

impl From<Shape> for Potential {
    fn from(shape: Shape) -> Self {
        Self { shape, decay: None }
    }
}

impl Potential {
    pub fn zero() -> Self {
        Shape::Zero.into()
    }

    pub fn square_well(depth: f64, half_width: f64) -> Self {
        Shape::SquareWell {
            depth,
            half_width,
            center: 0.0,
        }
        .into()
    }

    pub fn gaussian_sum(wells: Vec<Gaussian>) -> Self {
        Shape::GaussianSum { wells }.into()
    }

    pub fn tabulated(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let p: Potential = Shape::Tabulated { x, v }.into();
        p.validate()?;
        Ok(p)
    }

    pub fn with_decay(mut self, p: f64) -> Self {
        self.decay = Some(p);
        self
    }

    /// Hard errors for malformed shapes; returns soft warnings otherwise.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        match &self.shape {
            Shape::Zero => {}
            Shape::SquareWell {
                depth,
                half_width,
                center,
            } => {
                if !(depth.is_finite() && center.is_finite() && *half_width > 0.0 && half_width.is_finite()) {
                    return bad(format!("invalid square well depth={depth} half_width={half_width}"));
                }
            }
            Shape::GaussianSum { wells } => {
                for g in wells {
                    if !(g.depth.is_finite() && g.center.is_finite() && g.width > 0.0 && g.width.is_finite()) {
                        return bad(format!("invalid gaussian {g:?}"));
                    }
                }
            }
            Shape::Tabulated { x, v } => {
                if x.len() != v.len() || x.len() < 2 {
                    return bad("tabulated potential needs matching x/v arrays of length >= 2".into());
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("tabulated abscissae must be strictly ascending".into());
                }
                if x.iter().chain(v).any(|a| !a.is_finite()) {
                    return bad("tabulated potential contains non-finite values".into());
                }
            }
        }
        let mut warnings = Vec::new();
        if let Some(p) = self.decay {
            if p <= 2.5 {
                warnings.push(format!(
                    "declared decay exponent {p} does not exceed 5/2; results are outside the validated class"
                ));
            }
        }
        Ok(warnings)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::SquareWell {
                depth,
                half_width,
                center,
            } => {
                if (x - center).abs() <= *half_width {
                    -depth
                } else {
                    0.0
                }
            }
            Shape::GaussianSum { wells } => wells
                .iter()
                .map(|g| {
                    let z = (x - g.center) / g.width;
                    -g.depth * (-z * z).exp()
                })
                .sum(),
            Shape::Tabulated { x: xs, v } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&a| a <= x).clamp(1, xs.len() - 1);
                let s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                v[i - 1] + s * (v[i] - v[i - 1])
            }
        }
    }

    /// Interval outside which `V` is zero, or negligible (`∫|V| < TAIL_TOL`).
    pub fn window(&self) -> Result<(f64, f64)> {
        let (lo, hi) = match &self.shape {
            Shape::Zero => (-1.0, 1.0),
            Shape::SquareWell { half_width, center, .. } => (center - half_width, center + half_width),
            Shape::Tabulated { x, .. } => (x[0], x[x.len() - 1]),
            Shape::GaussianSum { wells } if wells.is_empty() => (-1.0, 1.0),
            Shape::GaussianSum { wells } => {
                // ∫_X^∞ e^{−((x−c)/w)²} dx = w(√π/2) erfc(z) ≤ w(√π/2) e^{−z²}
                let share = TAIL_TOL / (2.0 * wells.len() as f64);
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for g in wells {
                    let mass = g.depth.abs() * g.width * 0.5 * std::f64::consts::PI.sqrt();
                    let z = if mass > share { (mass / share).ln().sqrt() } else { 0.0 };
                    lo = lo.min(g.center - g.width * z.max(1.0));
                    hi = hi.max(g.center + g.width * z.max(1.0));
                }
                (lo, hi)
            }
        };
        let radius = lo.abs().max(hi.abs());
        if radius > MAX_RADIUS {
            return Err(Error::DecayTooSlow {
                radius: MAX_RADIUS,
                tail: self.tail_estimate(MAX_RADIUS),
                tolerance: TAIL_TOL,
            });
        }
        Ok((lo, hi))
    }

    /// Bound on `∫_{|x| > radius} |V|`.
    pub fn tail_estimate(&self, radius: f64) -> f64 {
        match &self.shape {
            Shape::GaussianSum { wells } => wells
                .iter()
                .map(|g| {
                    let near = (radius - g.center.abs()).max(0.0) / g.width;
                    2.0 * g.depth.abs() * g.width * 0.5 * std::f64::consts::PI.sqrt() * (-near * near).exp()
                })
                .sum(),
            _ => {
                let (lo, hi) = self.window().unwrap_or((0.0, 0.0));
                if lo >= -radius && hi <= radius {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Points inside the window where `V` or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::SquareWell { half_width, center, .. } => vec![center - half_width, center + half_width],
            Shape::Tabulated { x, .. } => x.clone(),
            _ => Vec::new(),
        }
    }

    /// Ordered integration nodes from `x0` to `x1` including interior breakpoints.
    pub(crate) fn segment_points(&self, x0: f64, x1: f64) -> Vec<f64> {
        let (a, b) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
        let mut pts: Vec<f64> = self.breakpoints().into_iter().filter(|&p| p > a && p < b).collect();
        pts.push(a);
        pts.push(b);
        pts.sort_by(|p, q| p.total_cmp(q));
        pts.dedup();
        if x0 > x1 {
            pts.reverse();
        }
        pts
    }

    /// `max |V|` over the window, by dense sampling.
    pub fn max_abs(&self) -> f64 {
        let Ok((lo, hi)) = self.window() else {
            return 0.0;
        };
        let mut m: f64 = 0.0;
        let n = 4000;
        for k in 0..=n {
            m = m.max(self.eval(lo + (hi - lo) * k as f64 / n as f64).abs());
        }
        for b in self.breakpoints() {
            m = m.max(self.eval(b).abs());
        }
        if let Shape::GaussianSum { wells } = &self.shape {
            for g in wells {
                m = m.max(self.eval(g.center).abs());
            }
        }
        m
    }

    /// `V(−x) = V(x)`, checked on a grid covering the window.
    pub fn is_symmetric(&self) -> bool {
        let Ok((lo, hi)) = self.window() else {
            return false;
        };
        let r = lo.abs().max(hi.abs());
        let scale = self.max_abs().max(1e-300);
        let n = 2001;
        let mut pts: Vec<f64> = (0..=n).map(|k| r * k as f64 / n as f64).collect();
        pts.extend(self.breakpoints().iter().map(|b| b.abs()));
        pts.iter()
            .all(|&x| (self.eval(x) - self.eval(-x)).abs() <= 1e-12 * scale)
    }

    pub fn label(&self) -> String {
        match &self.shape {
            Shape::Zero => "V=0".into(),
            Shape::SquareWell {
                depth,
                half_width,
                center,
            } if *center == 0.0 => format!("square well (V0={depth}, a={half_width})"),
            Shape::SquareWell {
                depth,
                half_width,
                center,
            } => format!("square well (V0={depth}, a={half_width}, c={center})"),
            Shape::GaussianSum { wells } => format!("gaussian sum ({} wells)", wells.len()),
            Shape::Tabulated { x, .. } => format!("tabulated ({} samples)", x.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_well_eval_and_window() {
        let v = Potential::square_well(2.0, 1.5);
        assert_eq!(v.eval(0.0), -2.0);
        assert_eq!(v.eval(1.5), -2.0);
        assert_eq!(v.eval(1.6), 0.0);
        assert_eq!(v.window().unwrap(), (-1.5, 1.5));
        assert!(v.is_symmetric());
        assert_eq!(v.tail_estimate(2.0), 0.0);
    }

    #[test]
    fn finite_support_is_zero_outside() {
        let v = Potential::tabulated(vec![-1.0, 0.0, 2.0], vec![0.5, -1.0, 0.0]).unwrap();
        let (lo, hi) = v.window().unwrap();
        for k in 1..200 {
            let d = k as f64 * 0.37;
            assert_eq!(v.eval(hi + d), 0.0);
            assert_eq!(v.eval(lo - d), 0.0);
        }
        assert_eq!(v.eval(1.0), -0.5);
        assert!(!v.is_symmetric());
    }

    #[test]
    fn tabulated_requires_ascending() {
        assert!(Potential::tabulated(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(Potential::tabulated(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn gaussian_window_bounds_tail() {
        let v = Potential::gaussian_sum(vec![
            Gaussian {
                depth: 30.0,
                center: 1.0,
                width: 3.0,
            },
            Gaussian {
                depth: 0.5,
                center: -2.0,
                width: 0.2,
            },
        ]);
        let (lo, hi) = v.window().unwrap();
        assert!(v.eval(hi).abs() < 1e-9 && v.eval(lo).abs() < 1e-9);
        assert!(v.tail_estimate(lo.abs().max(hi)) < 2.0 * TAIL_TOL);
        assert!(!v.is_symmetric());
        let s = Potential::gaussian_sum(vec![
            Gaussian {
                depth: 1.0,
                center: 1.0,
                width: 0.5,
            },
            Gaussian {
                depth: 1.0,
                center: -1.0,
                width: 0.5,
            },
        ]);
        assert!(s.is_symmetric());
    }

    #[test]
    fn too_wide_is_decay_error() {
        let v = Potential::gaussian_sum(vec![Gaussian {
            depth: 1.0,
            center: 0.0,
            width: 5e3,
        }]);
        assert!(matches!(v.window(), Err(Error::DecayTooSlow { .. })));
    }

    #[test]
    fn slow_decay_warns_only() {
        let v = Potential::square_well(1.0, 1.0).with_decay(1.0);
        let w = v.validate().unwrap();
        assert_eq!(w.len(), 1);
        assert!(Potential::square_well(1.0, 1.0)
            .with_decay(3.0)
            .validate()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn segment_points_include_breakpoints() {
        let v = Potential::square_well(1.0, 1.0);
        assert_eq!(v.segment_points(-3.0, 3.0), vec![-3.0, -1.0, 1.0, 3.0]);
        assert_eq!(v.segment_points(3.0, 0.0), vec![3.0, 1.0, 0.0]);
    }

    #[test]
    fn serde_shape_tags() {
        let v = Potential::square_well(1.0, 1.0);
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"kind\":\"square-well\""), "{s}");
        assert_eq!(serde_json::from_str::<Potential>(&s).unwrap(), v);
    }
}
