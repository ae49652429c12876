//! The half-line Fourier operator `T` against `½(1 − R)`, with `R` acting as the
//! multipliers `r_e`, `r_o` on the Mellin side.
//!
//! With `u = ln x` and `h(u) = e^{u/2} f(e^u)`, the Mellin transform
//! `F(τ) = (1/√2π) ∫₀^∞ f(x) x^{−1/2−iτ} dx` is the Fourier transform of `h`, and
//! `x^{−1/2+iτ}` is an eigenfunction of the dilation generator `−i(x d/dx + ½)`
//! with eigenvalue `τ`. Both integrals are evaluated by the trapezoidal rule in
//! `u` and `τ`, which converges geometrically for these analytic integrands.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::linalg::{C64, I, ZERO};
use crate::paths::{r_even, r_odd};

/// Largest residual accepted by the identity check.
pub const IDENTITY_TOL: f64 = 1e-3;
/// Largest relative norm change accepted for `R`.
pub const UNITARITY_TOL: f64 = 1e-6;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// `amp · exp(−(x − center)² / (2 width²)) · e^{i freq x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm {
    pub amp: C64,
    pub center: f64,
    pub width: f64,
    pub freq: f64,
}

impl GaussianTerm {
    pub fn eval(&self, x: f64) -> C64 {
        let z = (x - self.center) / self.width;
        self.amp * C64::from_polar((-0.5 * z * z).exp(), self.freq * x)
    }

    /// `(1/√2π) ∫ e^{−ikx} g(x) dx` in closed form.
    pub fn fourier(&self, k: f64) -> C64 {
        let d = k - self.freq;
        self.amp
            * C64::from_polar(
                self.width * (-0.5 * d * d * self.width * self.width).exp(),
                -d * self.center,
            )
    }
}

/// A finite sum of modulated Gaussians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub name: String,
    pub terms: Vec<GaussianTerm>,
}

impl TestFunction {
    pub fn gaussian(name: &str, center: f64, width: f64, freq: f64) -> Self {
        Self {
            name: name.into(),
            terms: vec![GaussianTerm {
                amp: C64::new(1.0, 0.0),
                center,
                width,
                freq,
            }],
        }
    }

    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            terms: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if !(t.width > 0.0 && t.width.is_finite() && t.center.is_finite() && t.freq.is_finite()) {
                return Err(Error::InvalidInput(format!("invalid gaussian term {t:?}")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn fourier(&self, k: f64) -> C64 {
        self.terms.iter().map(|t| t.fourier(k)).sum()
    }

    pub fn even_part(&self, x: f64) -> C64 {
        (self.eval(x) + self.eval(-x)) * 0.5
    }

    pub fn odd_part(&self, x: f64) -> C64 {
        (self.eval(x) - self.eval(-x)) * 0.5
    }

    /// Half-width beyond which every term is below `e^{−50}` of its amplitude.
    pub fn reach(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.center.abs() + 10.0 * t.width)
            .fold(1.0, f64::max)
    }

    /// Values on `n` equispaced points of `[−L, L]`, `L = reach()`.
    pub fn samples(&self, n: usize) -> (Vec<f64>, Vec<C64>) {
        let l = self.reach();
        let xs: Vec<f64> = (0..n)
            .map(|k| -l + 2.0 * l * k as f64 / (n.max(2) - 1) as f64)
            .collect();
        let ys = xs.iter().map(|&x| self.eval(x)).collect();
        (xs, ys)
    }

    /// `|g| < 1e-12` at both ends of the sampling grid.
    pub fn decays_at_edges(&self) -> bool {
        let l = self.reach();
        self.eval(l).norm() < 1e-12 && self.eval(-l).norm() < 1e-12
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn composite_gl(f: impl Fn(f64) -> C64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> C64 {
    let h = (b - a) / panels as f64;
    let mut s = ZERO;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in rule {
            s += f(mid + 0.5 * h * x) * w;
        }
    }
    s * (0.5 * h)
}

/// `[Tg](rω) = (1/√2π) ∫₀^∞ e^{iκr} ĝ(κω) dκ`, with `ĝ` in closed form.
pub fn apply_t(g: &TestFunction, r: f64, omega: f64) -> Result<C64> {
    if g.terms.is_empty() {
        return Ok(ZERO);
    }
    // ĝ is below e^{−72} of its peak beyond |ν| + 12/w
    let k_max = g
        .terms
        .iter()
        .map(|t| t.freq.abs() + 12.0 / t.width)
        .fold(0.0, f64::max);
    let spread = g.terms.iter().map(|t| t.center.abs()).fold(0.0, f64::max) + r.abs() + 1.0;
    let w_min = g.terms.iter().map(|t| t.width).fold(f64::INFINITY, f64::min);
    let h0 = (0.5 * w_min).min(1.0 / spread);
    let rule = gauss_legendre(12);
    let f = |k: f64| C64::from_polar(1.0, k * r) * g.fourier(k * omega);
    let mut panels = ((k_max / h0).ceil() as usize).max(4);
    let mut prev = composite_gl(f, 0.0, k_max, panels, &rule);
    for _ in 0..12 {
        panels *= 2;
        let next = composite_gl(f, 0.0, k_max, panels, &rule);
        let diff = (next - prev).norm();
        if diff <= 1e-13 * next.norm().max(1e-3) {
            return Ok(next * INV_SQRT_2PI);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged {
        difference: (prev - composite_gl(f, 0.0, k_max, panels / 2, &rule)).norm(),
    })
}

/// Sign of the dilation generator used to read the multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MellinConvention {
    /// `A = −i(x d/dx + ½)`: `x^{−1/2+iτ}` carries `r(τ)`.
    Standard,
    /// `A = +i(x d/dx + ½)`: `x^{−1/2+iτ}` carries `r(−τ)`.
    Reversed,
}

impl MellinConvention {
    /// The convention fixed by calibration on the unit Gaussian.
    pub const FROZEN: MellinConvention = MellinConvention::Standard;

    fn tau(self, tau: f64) -> Extended {
        Extended::Finite(match self {
            MellinConvention::Standard => tau,
            MellinConvention::Reversed => -tau,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

/// Mellin transforms of the even and odd parts of `g` on `(0, ∞)`.
#[derive(Debug, Clone)]
pub struct MellinPair {
    u0: f64,
    du: f64,
    n_u: usize,
    tau0: f64,
    dtau: f64,
    even: Vec<C64>,
    odd: Vec<C64>,
    h_norm2: [f64; 2],
}

/// Lower end of the `u = ln x` grid: the `x^{1/2}` weight is below `e^{−30}` there.
const U_MIN: f64 = -60.0;
/// Period in `u` implied by the `τ` step.
const U_PERIOD: f64 = 160.0;

impl MellinPair {
    pub fn new(g: &TestFunction) -> Result<Self> {
        g.validate()?;
        let reach = g.reach();
        let w_min = g.terms.iter().map(|t| t.width).fold(1.0, f64::min);
        let nu_max = g.terms.iter().map(|t| t.freq.abs()).fold(0.0, f64::max);
        let tau_max = reach * (nu_max + 10.0 / w_min) + 40.0;
        let u1 = reach.ln();
        let dtau = 2.0 * PI / U_PERIOD;
        let n_tau = 2 * (tau_max / dtau).ceil() as usize + 1;
        let tau0 = -dtau * (n_tau / 2) as f64;

        let mut du = PI / (1.5 * tau_max);
        for _ in 0..4 {
            let n_u = ((u1 - U_MIN) / du).ceil() as usize + 1;
            let pair = Self::sample(g, du, n_u, tau0, dtau, n_tau);
            let coarse = Self::sample(g, 2.0 * du, n_u.div_ceil(2), tau0, dtau, n_tau);
            let scale = pair
                .even
                .iter()
                .chain(&pair.odd)
                .map(|z| z.norm())
                .fold(1e-300, f64::max);
            let diff = pair
                .even
                .iter()
                .zip(&coarse.even)
                .chain(pair.odd.iter().zip(&coarse.odd))
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let tail = [pair.even[0], pair.even[n_tau - 1], pair.odd[0], pair.odd[n_tau - 1]]
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if diff <= 1e-10 * scale && tail <= 1e-10 * scale {
                return Ok(pair);
            }
            if tail > 1e-10 * scale {
                return Err(Error::QuadratureNotConverged {
                    difference: tail / scale,
                });
            }
            du *= 0.5;
        }
        Err(Error::QuadratureNotConverged { difference: f64::NAN })
    }

    fn sample(g: &TestFunction, du: f64, n_u: usize, tau0: f64, dtau: f64, n_tau: usize) -> Self {
        let us: Vec<f64> = (0..n_u).map(|k| U_MIN + k as f64 * du).collect();
        let weight = |u: f64| (0.5 * u).exp();
        let he: Vec<C64> = us.iter().map(|&u| g.even_part(u.exp()) * weight(u)).collect();
        let ho: Vec<C64> = us.iter().map(|&u| g.odd_part(u.exp()) * weight(u)).collect();
        let norm2 = |h: &[C64]| h.iter().map(|z| z.norm_sqr()).sum::<f64>() * du;
        let transform = |h: &[C64]| -> Vec<C64> {
            (0..n_tau)
                .into_par_iter()
                .map(|j| {
                    let tau = tau0 + j as f64 * dtau;
                    let step = C64::from_polar(1.0, -tau * du);
                    let mut phase = C64::from_polar(1.0, -tau * U_MIN);
                    let mut s = ZERO;
                    for z in h {
                        s += z * phase;
                        phase *= step;
                    }
                    s * (du * INV_SQRT_2PI)
                })
                .collect()
        };
        Self {
            u0: U_MIN,
            du,
            n_u,
            tau0,
            dtau,
            even: transform(&he),
            odd: transform(&ho),
            h_norm2: [norm2(&he), norm2(&ho)],
        }
    }

    fn spectrum(&self, parity: Parity) -> &[C64] {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    fn multiplier(parity: Parity, conv: MellinConvention, tau: f64) -> C64 {
        match parity {
            Parity::Even => r_even(conv.tau(tau)),
            Parity::Odd => r_odd(conv.tau(tau)),
        }
    }

    /// `r(τ_j) F(τ_j)` for the parity's multiplier.
    fn weighted(&self, parity: Parity, conv: MellinConvention) -> Vec<C64> {
        self.spectrum(parity)
            .iter()
            .enumerate()
            .map(|(j, f)| Self::multiplier(parity, conv, self.tau0 + j as f64 * self.dtau) * f)
            .collect()
    }

    /// `e^{u/2}·(R f)(e^u)` from the weighted spectrum.
    fn inverse_at(&self, weighted: &[C64], u: f64) -> C64 {
        let step = C64::from_polar(1.0, self.dtau * u);
        let mut phase = C64::from_polar(1.0, self.tau0 * u);
        let mut s = ZERO;
        for f in weighted {
            s += f * phase;
            phase *= step;
        }
        s * (self.dtau * INV_SQRT_2PI)
    }

    /// `(R_{e/o} g_{e/o})(r)` for `r > 0`.
    fn apply(&self, parity: Parity, conv: MellinConvention, r: f64) -> C64 {
        let u = r.ln();
        self.inverse_at(&self.weighted(parity, conv), u) * (-0.5 * u).exp()
    }

    /// `‖RF‖² / ‖g‖²` on the half-line, per parity, evaluated back in `u` space.
    pub fn norm_ratios(&self, conv: MellinConvention) -> [f64; 2] {
        let mut out = [1.0; 2];
        for (k, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
            let g2 = self.h_norm2[k];
            if g2 < 1e-300 {
                continue;
            }
            let weighted = self.weighted(parity, conv);
            // ‖Rh‖² over one full period in u equals the discrete Plancherel sum
            let n = (U_PERIOD / self.du).round() as usize;
            let rh2: f64 = (0..n)
                .into_par_iter()
                .map(|i| {
                    self.inverse_at(&weighted, self.u0 - 40.0 + i as f64 * self.du)
                        .norm_sqr()
                })
                .sum::<f64>()
                * self.du;
            out[k] = rh2 / g2;
        }
        out
    }

    /// Number of `u` nodes used; useful for reporting.
    pub fn nodes(&self) -> usize {
        self.n_u
    }
}

/// `(Rg)(rω) = (R_e g_e)(r) + ω (R_o g_o)(r)`.
pub fn apply_r(m: &MellinPair, g: &TestFunction, conv: MellinConvention, r: f64, omega: f64) -> C64 {
    if r == 0.0 {
        // R_e g_e vanishes at the origin; R_o g_o(0) = (2i/π) ∫₀^∞ g_o(x)/x dx
        return omega * I * (2.0 / PI) * odd_moment(g);
    }
    m.apply(Parity::Even, conv, r) + omega * m.apply(Parity::Odd, conv, r)
}

fn odd_moment(g: &TestFunction) -> C64 {
    let rule = gauss_legendre(12);
    let f = |x: f64| if x == 0.0 { ZERO } else { g.odd_part(x) / x };
    composite_gl(f, 0.0, g.reach(), 2000, &rule)
}

/// `½(g − Rg)` at `rω`.
pub fn apply_half_one_minus_r(m: &MellinPair, g: &TestFunction, conv: MellinConvention, r: f64, omega: f64) -> C64 {
    (g.eval(r * omega) - apply_r(m, g, conv, r, omega)) * 0.5
}

/// The 20 sample points `(r, ω)`: ten radii across the support, both signs.
pub fn sample_points(g: &TestFunction) -> Vec<(f64, f64)> {
    let r_max = g
        .terms
        .iter()
        .map(|t| t.center.abs() + 2.5 * t.width)
        .fold(1.0, f64::max);
    (1..=10)
        .flat_map(|k| {
            let r = r_max * k as f64 / 10.0;
            [(r, 1.0), (r, -1.0)]
        })
        .collect()
}

/// `‖Tg − ½(1 − R)g‖ / ‖g‖` over `points` (ℓ²), and 0 for `g = 0`.
pub fn identity_residual(g: &TestFunction, conv: MellinConvention, points: &[(f64, f64)]) -> Result<f64> {
    if g.terms.is_empty() {
        return Ok(0.0);
    }
    let m = MellinPair::new(g)?;
    let rows: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&(r, w)| -> Result<(f64, f64)> {
            let t = apply_t(g, r, w)?;
            let h = apply_half_one_minus_r(&m, g, conv, r, w);
            Ok(((t - h).norm_sqr(), g.eval(r * w).norm_sqr()))
        })
        .collect::<Result<_>>()?;
    let (num, den): (f64, f64) = rows.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((num / den.max(1e-300)).sqrt())
}

/// Unit Gaussian at the origin; fixes the convention.
pub fn calibration_function() -> TestFunction {
    TestFunction::gaussian("calibration: unit gaussian", 0.0, 1.0, 0.0)
}

/// Four functions independent of the calibration: shifted, narrow, oscillatory and a two-term mixture.
pub fn independent_functions() -> Vec<TestFunction> {
    let mut mixed = TestFunction::gaussian("two-term mixture", 0.8, 0.6, 0.0);
    mixed.terms.push(GaussianTerm {
        amp: C64::new(-0.4, 0.7),
        center: -1.3,
        width: 1.1,
        freq: 1.5,
    });
    vec![
        TestFunction::gaussian("shifted gaussian", 1.5, 0.8, 0.0),
        TestFunction::gaussian("narrow gaussian", -0.7, 0.4, 0.0),
        TestFunction::gaussian("oscillatory gaussian", 1.0, 1.0, 3.0),
        mixed,
    ]
}

/// Convention giving the smaller residual on the calibration function.
pub fn calibrate() -> Result<(MellinConvention, [f64; 2])> {
    let g = calibration_function();
    let pts = sample_points(&g);
    let std = identity_residual(&g, MellinConvention::Standard, &pts)?;
    let rev = identity_residual(&g, MellinConvention::Reversed, &pts)?;
    let conv = if std <= rev {
        MellinConvention::Standard
    } else {
        MellinConvention::Reversed
    };
    Ok((conv, [std, rev]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteLine {
    pub name: String,
    pub calibration: bool,
    pub residual: f64,
    /// `‖R g_e‖² / ‖g_e‖²` and `‖R g_o‖² / ‖g_o‖²`.
    pub norm_ratios: [f64; 2],
}

impl SuiteLine {
    pub fn passes(&self) -> bool {
        self.residual < IDENTITY_TOL && self.norm_ratios.iter().all(|r| (r - 1.0).abs() < UNITARITY_TOL)
    }
}

/// Calibration function first, then up to `size − 1` independent ones.
pub fn suite(size: usize) -> Vec<TestFunction> {
    std::iter::once(calibration_function())
        .chain(independent_functions())
        .take(size.max(1))
        .collect()
}

pub fn verify_suite(functions: &[TestFunction], conv: MellinConvention) -> Result<Vec<SuiteLine>> {
    functions
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let residual = identity_residual(g, conv, &sample_points(g))?;
            let norm_ratios = if g.terms.is_empty() {
                [1.0; 2]
            } else {
                MellinPair::new(g)?.norm_ratios(conv)
            };
            Ok(SuiteLine {
                name: g.name.clone(),
                calibration: k == 0 && g.name.starts_with("calibration"),
                residual,
                norm_ratios,
            })
        })
        .collect()
}

/// Residual table as CSV: `name,calibration,residual,norm_even,norm_odd`.
pub fn suite_csv(lines: &[SuiteLine]) -> String {
    let mut out = String::from("name,calibration,residual,norm_even,norm_odd\n");
    for l in lines {
        out.push_str(&format!(
            "{},{},{:.6e},{:.12},{:.12}\n",
            l.name, l.calibration, l.residual, l.norm_ratios[0], l.norm_ratios[1]
        ));
    }
    out
}
