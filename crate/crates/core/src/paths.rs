//! Boundary loops of 2×2 unitaries over the compactified square and their winding numbers.
//!
//! The square has an energy side (`κ = √λ ∈ [0, ∞]`) and a dilation side
//! (`x ∈ [−∞, ∞]`). Its boundary is traversed as
//!
//! * `B1`: `x` from −∞ to +∞ at zero energy,
//! * `B2`: `κ` from 0 to ∞ at `x = +∞`,
//! * `B3`: `x` from +∞ to −∞ at infinite energy,
//! * `B4`: `κ` from ∞ to 0 at `x = −∞`,
//!
//! so that consecutive sides meet at the corners `Γ1(+∞) = Γ2(0)`,
//! `Γ2(∞) = Γ3(+∞)`, `Γ3(−∞) = Γ4(∞)` and `Γ4(0) = Γ1(−∞)`.
//!
//! All matrices live in the even/odd basis where the dilation multiplier is
//! `R(x) = diag(r_e(x), r_o(x))`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::linalg::{Mat2, C64, ONE};

pub const UNITARITY_TOL: f64 = 1e-10;
pub const CORNER_TOL: f64 = 1e-8;
pub const WINDING_CONVERGENCE_TOL: f64 = 1e-8;
pub const MIN_SAMPLES: usize = 16;
const MAX_SAMPLES: usize = 1 << 20;

/// `r_e(x) = −tanh(πx) − i / cosh(πx)`.
pub fn r_even(x: Extended) -> C64 {
    match x {
        Extended::NegInf => ONE,
        Extended::PosInf => -ONE,
        Extended::Finite(x) => {
            let px = PI * x;
            // 1/cosh underflows gracefully to 0 for |πx| > 710
            C64::new(-px.tanh(), -1.0 / px.cosh())
        }
    }
}

/// `r_o = conj(r_e)`.
pub fn r_odd(x: Extended) -> C64 {
    r_even(x).conj()
}

/// The dilation multiplier `R(x) = diag(r_e(x), r_o(x))`.
pub fn dilation_multiplier(x: Extended) -> Mat2 {
    Mat2::diag(r_even(x), r_odd(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    B1,
    B2,
    B3,
    B4,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::B1, Side::B2, Side::B3, Side::B4];

    /// Sides parametrized by the dilation variable `x`.
    pub fn is_dilation(self) -> bool {
        matches!(self, Side::B1 | Side::B3)
    }

    /// Whether the natural parameter decreases along the traversal.
    fn descending(self) -> bool {
        matches!(self, Side::B3 | Side::B4)
    }

    pub fn next(self) -> Side {
        match self {
            Side::B1 => Side::B2,
            Side::B2 => Side::B3,
            Side::B3 => Side::B4,
            Side::B4 => Side::B1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Even,
    Odd,
    Full,
}

impl Sector {
    /// Restricts an even/odd-basis matrix to the sector, padding the other
    /// parity with the identity so determinants reduce to the sector's scalar.
    pub fn project(self, m: &Mat2) -> Mat2 {
        match self {
            Sector::Full => *m,
            Sector::Even => Mat2::diag(m.get(0, 0), ONE),
            Sector::Odd => Mat2::diag(ONE, m.get(1, 1)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
            Sector::Full => "full",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Sector {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(Sector::Even),
            "odd" => Ok(Sector::Odd),
            "full" => Ok(Sector::Full),
            other => Err(format!("unknown sector '{other}' (even | odd | full)")),
        }
    }
}

/// Zero-energy behaviour of the scattering matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
pub enum ResonanceClass {
    /// `det S(0) = −1`, `S(0) = diag(−1, 1)`.
    Generic,
    /// Zero-energy resonance; `det S(0) = +1`.
    Exceptional { gamma: f64 },
}

impl ResonanceClass {
    /// The threshold value `S(0)` in the even/odd basis.
    pub fn s0(&self) -> Mat2 {
        match *self {
            ResonanceClass::Generic => Mat2::from_real(-1.0, 0.0, 0.0, 1.0),
            ResonanceClass::Exceptional { gamma } => {
                let n = 1.0 / (gamma * gamma + 1.0);
                Mat2::from_real(
                    2.0 * gamma * n,
                    (1.0 - gamma * gamma) * n,
                    (gamma * gamma - 1.0) * n,
                    2.0 * gamma * n,
                )
            }
        }
    }

    /// Classifies an even/odd-basis `S(0)` by its determinant. Exceptional
    /// diagonal values `±I` map to `γ = ±1`.
    pub fn from_s0(s0: &Mat2) -> Self {
        if s0.det().re < 0.0 {
            ResonanceClass::Generic
        } else {
            // 2γ/(γ²+1) = c and (γ²−1)/(γ²+1) = s give γ = c / (1 − s)
            let c = s0.get(0, 0).re;
            let s = s0.get(1, 0).re;
            let gamma = if s < 1.0 { c / (1.0 - s) } else { f64::INFINITY };
            ResonanceClass::Exceptional { gamma }
        }
    }

    pub fn is_generic(&self) -> bool {
        matches!(self, ResonanceClass::Generic)
    }
}

impl fmt::Display for ResonanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResonanceClass::Generic => f.write_str("generic"),
            ResonanceClass::Exceptional { gamma } => write!(f, "exceptional (gamma = {gamma:.6})"),
        }
    }
}

/// Map from the unit interval onto a side's natural parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Compactification {
    /// `x = tan(π(t − ½))` on dilation sides, `κ = t/(1 − t)` on energy sides.
    #[default]
    Standard,
    /// `x = (2t − 1)/(t(1 − t))` on dilation sides, `κ = tan(πt/2)` on energy sides.
    Alternate,
}

impl Compactification {
    fn to_x(self, t: f64) -> Extended {
        if t <= 0.0 {
            return Extended::NegInf;
        }
        if t >= 1.0 {
            return Extended::PosInf;
        }
        Extended::Finite(match self {
            Compactification::Standard => (PI * (t - 0.5)).tan(),
            Compactification::Alternate => (2.0 * t - 1.0) / (t * (1.0 - t)),
        })
    }

    fn t_of_x(self, x: f64) -> f64 {
        match self {
            Compactification::Standard => 0.5 + x.atan() / PI,
            Compactification::Alternate => 2.0 / (2.0 - x + (x * x + 4.0).sqrt()),
        }
    }

    fn to_kappa(self, t: f64) -> Extended {
        if t >= 1.0 {
            return Extended::PosInf;
        }
        let t = t.max(0.0);
        Extended::Finite(match self {
            Compactification::Standard => t / (1.0 - t),
            Compactification::Alternate => (FRAC_PI_2 * t).tan(),
        })
    }

    fn t_of_kappa(self, k: f64) -> f64 {
        match self {
            Compactification::Standard => k / (1.0 + k),
            Compactification::Alternate => k.atan() / FRAC_PI_2,
        }
    }
}

type PathFn = dyn Fn(Extended) -> Mat2 + Send + Sync;

/// A continuous family of unitaries along one side of the square.
///
/// The closure receives the side's natural parameter (`x` or `κ`); the
/// traversal parameter `t ∈ [0, 1]` is mapped onto it according to the
/// side's orientation.
#[derive(Clone)]
pub struct BoundaryPath {
    side: Side,
    map: Compactification,
    span: (f64, f64),
    func: Arc<PathFn>,
    knots: Arc<[f64]>,
}

impl fmt::Debug for BoundaryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryPath")
            .field("side", &self.side)
            .field("map", &self.map)
            .field("span", &self.span)
            .field("knots", &self.knots.len())
            .finish()
    }
}

impl BoundaryPath {
    pub fn new(side: Side, func: impl Fn(Extended) -> Mat2 + Send + Sync + 'static) -> Self {
        Self {
            side,
            map: Compactification::Standard,
            span: (0.0, 1.0),
            func: Arc::new(func),
            knots: Arc::from(Vec::new()),
        }
    }

    pub fn constant(side: Side, value: Mat2) -> Self {
        Self::new(side, move |_| value)
    }

    /// Natural-parameter values (finite `x` or `κ`) where the path has
    /// breakpoints; the winding engine always samples them.
    pub fn with_knots(mut self, knots: Vec<f64>) -> Self {
        self.knots = Arc::from(knots);
        self
    }

    pub fn with_compactification(mut self, map: Compactification) -> Self {
        self.map = map;
        self
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// The same family traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut p = self.clone();
        p.span = (self.span.1, self.span.0);
        p
    }

    /// The portion of the traversal between `t0` and `t1`, reparametrized onto `[0, 1]`.
    pub fn sub_path(&self, t0: f64, t1: f64) -> Self {
        let (a, b) = self.span;
        let mut p = self.clone();
        p.span = (a + t0 * (b - a), a + t1 * (b - a));
        p
    }

    fn raw_t(&self, t: f64) -> f64 {
        let (a, b) = self.span;
        a + t.clamp(0.0, 1.0) * (b - a)
    }

    fn natural(&self, raw: f64) -> Extended {
        let u = if self.side.descending() { 1.0 - raw } else { raw };
        if self.side.is_dilation() {
            self.map.to_x(u)
        } else {
            self.map.to_kappa(u)
        }
    }

    /// Value at natural parameter `p` (`x` or `κ`), bypassing the traversal map.
    pub fn at(&self, p: Extended) -> Mat2 {
        (self.func)(p)
    }

    pub fn eval(&self, t: f64) -> Mat2 {
        (self.func)(self.natural(self.raw_t(t)))
    }

    pub fn start(&self) -> Mat2 {
        self.eval(0.0)
    }

    pub fn end(&self) -> Mat2 {
        self.eval(1.0)
    }

    /// Knots converted to traversal parameters inside `(0, 1)`.
    fn knot_ts(&self) -> Vec<f64> {
        let (a, b) = self.span;
        self.knots
            .iter()
            .filter_map(|&k| {
                let u = if self.side.is_dilation() {
                    self.map.t_of_x(k)
                } else if k > 0.0 {
                    self.map.t_of_kappa(k)
                } else {
                    return None;
                };
                let raw = if self.side.descending() { 1.0 - u } else { u };
                let t = (raw - a) / (b - a);
                (t > 0.0 && t < 1.0).then_some(t)
            })
            .collect()
    }

    /// Largest unitarity defect over `n + 1` uniformly spaced samples.
    pub fn max_unitarity_defect(&self, n: usize) -> (f64, f64) {
        (0..=n)
            .map(|k| {
                let t = k as f64 / n as f64;
                (self.eval(t).unitarity_defect(), t)
            })
            .fold((0.0, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc })
    }

    pub fn check_unitary(&self, n: usize, tol: f64) -> Result<()> {
        let (defect, t) = self.max_unitarity_defect(n);
        if defect > tol {
            return Err(Error::NonUnitaryPath { t, defect });
        }
        Ok(())
    }

    /// Largest sample-to-sample distance for `n` uniform steps.
    pub fn max_step(&self, n: usize) -> f64 {
        let vals: Vec<Mat2> = (0..=n).map(|k| self.eval(k as f64 / n as f64)).collect();
        vals.windows(2).map(|w| w[0].dist(&w[1])).fold(0.0, f64::max)
    }
}

/// `Γ(x) = I + ½(I − R(x))(S − I)` on side `B1` (with `S = S(0)`) or `B3` (with `S = S(∞)`).
///
/// The result runs from `I` at `x = −∞` to `S` at `x = +∞` and is rejected
/// when sampling finds a non-unitary value.
pub fn gamma_from_endpoint(s_end: Mat2, side: Side) -> Result<BoundaryPath> {
    if !side.is_dilation() {
        return Err(Error::InvalidInput(format!(
            "endpoint paths live on B1 or B3, not {side:?}"
        )));
    }
    let shift = s_end - Mat2::IDENTITY;
    let path = BoundaryPath::new(side, move |x| {
        let half = (Mat2::IDENTITY - dilation_multiplier(x)).scale(0.5.into());
        Mat2::IDENTITY + half * shift
    });
    path.check_unitary(512, UNITARITY_TOL)?;
    Ok(path)
}

fn sample_ts(n: usize, knots: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    ts.extend_from_slice(knots);
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    ts
}

/// Returns `(Σ arg(d_{k+1} / d_k) / 2π, largest |step|)` for the determinant along `ts`.
fn phase_sum(path: &BoundaryPath, ts: &[f64]) -> (f64, f64) {
    let dets: Vec<C64> = if ts.len() > 4096 {
        ts.par_iter().map(|&t| path.eval(t).det()).collect()
    } else {
        ts.iter().map(|&t| path.eval(t).det()).collect()
    };
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    for w in dets.windows(2) {
        let step = (w[1] * w[0].conj()).arg();
        total += step;
        max_step = max_step.max(step.abs());
    }
    (total / (2.0 * PI), max_step)
}

/// Winding of `t ↦ det Γ(t)` along the traversal, `(1/2π) Δ arg det`.
///
/// With `refine`, the sample count doubles until two successive estimates
/// agree to within [`WINDING_CONVERGENCE_TOL`] and no step exceeds π/2.
pub fn winding(path: &BoundaryPath, n_samples: usize, refine: bool) -> Result<f64> {
    let knots = path.knot_ts();
    let mut n = n_samples.max(MIN_SAMPLES);
    let mut previous: Option<f64> = None;
    loop {
        let (estimate, max_step) = phase_sum(path, &sample_ts(n, &knots));
        let certified = max_step <= FRAC_PI_2;
        if !refine || n >= MAX_SAMPLES {
            if !certified {
                return Err(Error::PhaseJumpTooLarge {
                    side: path.side,
                    step: max_step,
                    samples: n,
                });
            }
            return Ok(estimate);
        }
        if certified {
            if let Some(p) = previous {
                if (estimate - p).abs() < WINDING_CONVERGENCE_TOL {
                    return Ok(estimate);
                }
            }
            previous = Some(estimate);
        }
        n *= 2;
    }
}

/// Four sides in traversal order, closed at the corners.
#[derive(Debug, Clone)]
pub struct BoundaryLoop {
    sides: [BoundaryPath; 4],
}

impl BoundaryLoop {
    pub fn new(sides: [BoundaryPath; 4]) -> Result<Self> {
        for (k, side) in sides.iter().enumerate() {
            let expected = Side::ALL[k];
            if side.side() != expected {
                return Err(Error::InvalidInput(format!(
                    "side {k} is {:?}, expected {expected:?}",
                    side.side()
                )));
            }
        }
        let lp = Self { sides };
        for k in 0..4 {
            let (a, b) = (&lp.sides[k], &lp.sides[(k + 1) % 4]);
            let mismatch = a.end().dist(&b.start());
            if mismatch > CORNER_TOL {
                return Err(Error::CornerMismatch {
                    from: a.side(),
                    to: b.side(),
                    mismatch,
                });
            }
        }
        Ok(lp)
    }

    pub fn trivial() -> Self {
        Self {
            sides: Side::ALL.map(|s| BoundaryPath::constant(s, Mat2::IDENTITY)),
        }
    }

    pub fn sides(&self) -> &[BoundaryPath; 4] {
        &self.sides
    }

    pub fn side(&self, side: Side) -> &BoundaryPath {
        &self.sides[side as usize]
    }

    /// The loop with every value restricted to one parity sector.
    pub fn project(&self, sector: Sector) -> Self {
        let sides = self.sides.clone().map(|p| {
            let f = p.func.clone();
            let mut q = BoundaryPath::new(p.side, move |x| sector.project(&f(x)));
            q.map = p.map;
            q.knots = p.knots.clone();
            q
        });
        Self { sides }
    }
}

/// Per-side windings of a closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Windings {
    pub w: [f64; 4],
    pub total: f64,
}

impl Windings {
    /// How far the total is from the nearest integer.
    pub fn integrality_defect(&self) -> f64 {
        (self.total - self.total.round()).abs()
    }
}

pub fn loop_winding(lp: &BoundaryLoop, n_samples: usize) -> Result<Windings> {
    let mut w = [0.0; 4];
    for (k, side) in lp.sides.iter().enumerate() {
        w[k] = winding(side, n_samples, true)?;
    }
    Ok(Windings {
        w,
        total: w.iter().sum(),
    })
}

/// Outcome of one Levinson verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub label: String,
    pub sector: Sector,
    pub w: [f64; 4],
    pub total: f64,
    pub n_bound: usize,
    /// Threshold correction `ν = w1 + w3 + w4`, so that the time-delay
    /// integral `−w2` equals `N + ν`.
    pub correction: f64,
    pub resonance: ResonanceClass,
    /// `|total + N|`.
    pub residual: f64,
}

impl WindingReport {
    pub fn new(
        label: impl Into<String>,
        sector: Sector,
        windings: Windings,
        n_bound: usize,
        resonance: ResonanceClass,
    ) -> Self {
        let w = windings.w;
        Self {
            label: label.into(),
            sector,
            w,
            total: windings.total,
            n_bound,
            correction: w[0] + w[2] + w[3],
            resonance,
            residual: (windings.total + n_bound as f64).abs(),
        }
    }

    /// The scattering-side integral `(1/2π)∫ tr[i S* S'] dλ = −w2`.
    pub fn time_delay(&self) -> f64 {
        -self.w[1]
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.residual < tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fin(x: f64) -> Extended {
        Extended::Finite(x)
    }

    #[test]
    fn r_even_values() {
        assert_abs_diff_eq!(r_even(fin(0.0)).re, 0.0);
        assert_abs_diff_eq!(r_even(fin(0.0)).im, -1.0);
        assert_eq!(r_even(Extended::PosInf), -ONE);
        assert_eq!(r_even(Extended::NegInf), ONE);
        // tanh(π) = 0.99627207622..., 1/cosh(π) = 0.08626673833...
        let v = r_even(fin(1.0));
        assert_abs_diff_eq!(v.re, -0.996_272_076_220_75, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, -0.086_266_738_334_05, epsilon = 1e-12);
        assert_abs_diff_eq!(r_even(fin(1e4)).re, -1.0);
    }

    #[test]
    fn r_odd_values() {
        assert_abs_diff_eq!(r_odd(fin(0.0)).im, 1.0);
        assert_eq!(r_odd(Extended::NegInf), ONE);
        for x in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            let p = r_odd(fin(x)) * r_even(fin(x)).conj();
            assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn r_even_unimodular_on_log_grid() {
        for k in 0..=600 {
            let mag = 10f64.powf(-3.0 + k as f64 / 100.0);
            for x in [mag, -mag] {
                assert!((r_even(fin(x)).norm() - 1.0).abs() < 1e-12, "x = {x}");
            }
        }
    }

    #[test]
    fn compactification_inverses() {
        for map in [Compactification::Standard, Compactification::Alternate] {
            for x in [-1e3, -2.0, 0.0, 0.3, 50.0] {
                let t = map.t_of_x(x);
                assert_abs_diff_eq!(map.to_x(t).finite().unwrap(), x, epsilon = 1e-9 * x.abs().max(1.0));
            }
            for k in [1e-4, 0.5, 7.0, 1e3] {
                let t = map.t_of_kappa(k);
                assert_abs_diff_eq!(map.to_kappa(t).finite().unwrap(), k, epsilon = 1e-9 * k);
            }
        }
    }

    #[test]
    fn side_orientation() {
        let p = BoundaryPath::new(Side::B3, |x| Mat2::scalar(r_even(x)));
        assert_eq!(p.start(), Mat2::scalar(-ONE));
        assert_eq!(p.end(), Mat2::scalar(ONE));
        let q = BoundaryPath::new(Side::B4, |k| match k {
            Extended::PosInf => Mat2::scalar(-ONE),
            _ => Mat2::IDENTITY,
        });
        assert_eq!(q.start(), Mat2::scalar(-ONE));
    }

    #[test]
    fn constant_path_has_zero_winding() {
        let p = BoundaryPath::constant(Side::B2, Mat2::IDENTITY);
        assert_eq!(winding(&p, 16, true).unwrap(), 0.0);
    }

    #[test]
    fn r_even_path_winds_minus_half() {
        let p = BoundaryPath::new(Side::B1, |x| Mat2::diag(r_even(x), ONE));
        assert_abs_diff_eq!(winding(&p, 64, true).unwrap(), -0.5, epsilon = 1e-9);
        let q = BoundaryPath::new(Side::B1, |x| Mat2::diag(r_odd(x), ONE));
        assert_abs_diff_eq!(winding(&q, 64, true).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn gamma_identity_endpoint_is_constant() {
        let p = gamma_from_endpoint(Mat2::IDENTITY, Side::B1).unwrap();
        for k in 0..=20 {
            assert!(p.eval(k as f64 / 20.0).dist(&Mat2::IDENTITY) < 1e-15);
        }
    }

    #[test]
    fn gamma_minus_identity_gives_r() {
        let p = gamma_from_endpoint(Mat2::scalar(-ONE), Side::B1).unwrap();
        for x in [-4.0, -0.3, 0.0, 1.0, 9.0] {
            assert!(p.at(fin(x)).dist(&dilation_multiplier(fin(x))) < 1e-15);
        }
        let q = gamma_from_endpoint(Mat2::from_real(-1.0, 0.0, 0.0, 1.0), Side::B1).unwrap();
        for x in [-4.0, 0.0, 2.5] {
            assert!(q.at(fin(x)).dist(&Mat2::diag(r_even(fin(x)), ONE)) < 1e-15);
        }
    }

    #[test]
    fn gamma_endpoints() {
        let s = ResonanceClass::Exceptional { gamma: 2.0 }.s0();
        let p = gamma_from_endpoint(s, Side::B1).unwrap();
        assert!(p.start().dist(&Mat2::IDENTITY) < 1e-15);
        assert!(p.end().dist(&s) < 1e-15);
        let q = gamma_from_endpoint(s, Side::B3).unwrap();
        assert!(q.start().dist(&s) < 1e-15);
        assert!(q.end().dist(&Mat2::IDENTITY) < 1e-15);
    }

    #[test]
    fn gamma_rejects_inadmissible_endpoint() {
        let s = Mat2::from_real(0.0, 1.0, 1.0, 0.0);
        assert!(matches!(
            gamma_from_endpoint(s, Side::B1),
            Err(Error::NonUnitaryPath { .. })
        ));
        assert!(gamma_from_endpoint(Mat2::IDENTITY, Side::B2).is_err());
    }

    #[test]
    fn threshold_forms_unitary_and_wind_correctly() {
        let generic = gamma_from_endpoint(ResonanceClass::Generic.s0(), Side::B1).unwrap();
        assert_abs_diff_eq!(winding(&generic, 64, true).unwrap(), -0.5, epsilon = 1e-6);
        for gamma in [10.0, 2.0, 1.0, 0.5, 0.1, -0.1, -0.5, -1.0, -2.0, -10.0] {
            let s0 = ResonanceClass::Exceptional { gamma }.s0();
            assert!(s0.unitarity_defect() < 1e-14);
            let p = gamma_from_endpoint(s0, Side::B1).unwrap();
            assert!(p.max_unitarity_defect(2000).0 < 1e-10, "gamma = {gamma}");
            assert_abs_diff_eq!(winding(&p, 64, true).unwrap(), 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn resonance_class_round_trip_through_s0() {
        for gamma in [-3.0, -1.0, 0.25, 1.0, 4.0] {
            let class = ResonanceClass::Exceptional { gamma };
            match ResonanceClass::from_s0(&class.s0()) {
                ResonanceClass::Exceptional { gamma: g } => assert_abs_diff_eq!(g, gamma, epsilon = 1e-12),
                other => panic!("{other:?}"),
            }
        }
        assert!(ResonanceClass::from_s0(&ResonanceClass::Generic.s0()).is_generic());
    }

    #[test]
    fn loop_of_identities() {
        let w = loop_winding(&BoundaryLoop::trivial(), 16).unwrap();
        assert_eq!(w.w, [0.0; 4]);
        assert_eq!(w.total, 0.0);
    }

    #[test]
    fn open_loop_is_rejected() {
        let mut sides = BoundaryLoop::trivial().sides().clone();
        sides[1] = BoundaryPath::constant(Side::B2, Mat2::scalar(-ONE));
        assert!(matches!(
            BoundaryLoop::new(sides),
            Err(Error::CornerMismatch {
                from: Side::B1,
                to: Side::B2,
                ..
            })
        ));
    }

    #[test]
    fn continuity_by_refinement() {
        let p = gamma_from_endpoint(ResonanceClass::Generic.s0(), Side::B1).unwrap();
        let (a, b) = (p.max_step(200), p.max_step(400));
        assert!(b <= 0.5 * a * 1.01, "{a} {b}");
    }

    #[test]
    fn knots_are_sampled() {
        // a path whose only feature sits between uniform samples
        let p = BoundaryPath::new(Side::B2, |k| match k {
            Extended::Finite(k) if (k - 0.3).abs() < 1e-3 => Mat2::scalar(C64::from_polar(1.0, 1.0)),
            _ => Mat2::IDENTITY,
        })
        .with_knots(vec![0.3]);
        assert_eq!(p.knot_ts().len(), 1);
        assert_abs_diff_eq!(p.knot_ts()[0], 0.3 / 1.3, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn reversal_negates_winding(theta in -3.0f64..3.0, scale in 0.1f64..5.0) {
            let p = BoundaryPath::new(Side::B2, move |k| match k {
                Extended::Finite(k) => Mat2::diag(C64::from_polar(1.0, theta * (k / scale).tanh()), ONE),
                _ => Mat2::diag(C64::from_polar(1.0, theta), ONE),
            });
            let w = winding(&p, 32, true).unwrap();
            let r = winding(&p.reversed(), 32, true).unwrap();
            prop_assert!((w + r).abs() < 1e-9);
            prop_assert!((w - theta / (2.0 * PI)).abs() < 1e-9);
        }

        #[test]
        fn winding_additive_under_splitting(split in 0.05f64..0.95, gamma in 0.1f64..10.0) {
            let p = gamma_from_endpoint(ResonanceClass::Generic.s0(), Side::B1).unwrap();
            let whole = winding(&p, 32, true).unwrap();
            let a = winding(&p.sub_path(0.0, split), 32, true).unwrap();
            let b = winding(&p.sub_path(split, 1.0), 32, true).unwrap();
            prop_assert!((a + b - whole).abs() < 1e-9);
            let q = gamma_from_endpoint(ResonanceClass::Exceptional { gamma }.s0(), Side::B3).unwrap();
            prop_assert!(winding(&q, 32, true).unwrap().abs() < 1e-9);
        }

        #[test]
        fn winding_reparametrization_invariant(alpha in -5.0f64..5.0) {
            let f = move |k: Extended| match k {
                Extended::Finite(k) => Mat2::diag(C64::new(2.0 * k, -alpha) / C64::new(2.0 * k, alpha), ONE),
                Extended::PosInf => Mat2::IDENTITY,
                Extended::NegInf => unreachable!(),
            };
            let a = winding(&BoundaryPath::new(Side::B2, f), 32, true).unwrap();
            let b = winding(
                &BoundaryPath::new(Side::B2, f).with_compactification(Compactification::Alternate),
                32,
                true,
            )
            .unwrap();
            prop_assert!((a - b).abs() < 1e-8);
            let x1 = winding(&gamma_from_endpoint(ResonanceClass::Generic.s0(), Side::B1).unwrap(), 32, true).unwrap();
            let x2 = winding(
                &gamma_from_endpoint(ResonanceClass::Generic.s0(), Side::B1)
                    .unwrap()
                    .with_compactification(Compactification::Alternate),
                32,
                true,
            )
            .unwrap();
            prop_assert!((x1 - x2).abs() < 1e-8);
        }
    }
}
