//! Transmission and reflection by direct integration of `−ψ'' + Vψ = κ²ψ`.
//!
//! Outside the window `[x_L, x_R]` every solution is `a e^{iκx} + b e^{−iκx}`.
//! The solver builds the amplitude transfer matrix `M` with
//! `(a, b)(x_R) = M (a, b)(x_L)`, from which
//!
//! * incidence from the left, `(1, r_L) ↦ (t, 0)`: `r_L = −m21/m22`, `t = det M / m22`,
//! * incidence from the right, `(0, t) ↦ (r_R, 1)`: `t = 1/m22`, `r_R = m12/m22`.
//!
//! Low momenta integrate the real fundamental system `(ψ, ψ')`; high momenta
//! integrate the amplitudes `(a, b)` directly, whose derivatives carry a factor
//! `V/κ` and stay well conditioned over many wavelengths.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ode::Dopri5;
use super::Potential;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64, I, ONE};

/// Below this momentum (in units of `√max|V|`, floor 1) the real system is used.
const AMPLITUDE_SWITCH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostSolution {
    /// Transmission for incidence from the right, `1/m22`.
    pub t: C64,
    /// Transmission for incidence from the left, `det M/m22`; equals `t` for an exact solve.
    pub t_left: C64,
    pub r_left: C64,
    pub r_right: C64,
}

impl JostSolution {
    pub const FREE: JostSolution = JostSolution {
        t: ONE,
        t_left: ONE,
        r_left: C64::new(0.0, 0.0),
        r_right: C64::new(0.0, 0.0),
    };

    /// Plane-wave scattering matrix `[[t, r_R], [r_L, t]]`.
    pub fn s_matrix(&self) -> Mat2 {
        Mat2::new(self.t, self.r_right, self.r_left, self.t)
    }

    /// `max(| |t|² + |r_L|² − 1 |, | |t|² + |r_R|² − 1 |)`.
    pub fn flux_defect(&self) -> f64 {
        let t2 = self.t.norm_sqr();
        (t2 + self.r_left.norm_sqr() - 1.0)
            .abs()
            .max((t2 + self.r_right.norm_sqr() - 1.0).abs())
    }
}

fn minimum_feature(v: &Potential) -> f64 {
    match &v.shape {
        super::Shape::GaussianSum { wells } => wells.iter().map(|g| g.width).fold(f64::INFINITY, f64::min),
        _ => f64::INFINITY,
    }
}

pub(crate) fn solver_for(v: &Potential, ode: &Dopri5) -> Dopri5 {
    ode.with_h_max(ode.h_max.min(0.25 * minimum_feature(v)))
}

fn transfer_real(v: &Potential, kappa: f64, ode: &Dopri5, xl: f64, xr: f64) -> Result<Mat2> {
    let k2 = kappa * kappa;
    let rhs = |x: f64, y: &[f64; 4], d: &mut [f64; 4]| {
        let q = v.eval(x) - k2;
        d[0] = y[1];
        d[1] = q * y[0];
        d[2] = y[3];
        d[3] = q * y[2];
    };
    let y = solver_for(v, ode).integrate_segments(rhs, &v.segment_points(xl, xr), [1.0, 0.0, 0.0, 1.0], |_, _| {})?;
    let transfer = Mat2::from_real(y[0], y[2], y[1], y[3]);
    let plane = |x: f64| {
        let e = C64::from_polar(1.0, kappa * x);
        let ik = I * kappa;
        Mat2::new(e, e.inv(), ik * e, -ik * e.inv())
    };
    let inv_r = plane(xr).inverse().ok_or(Error::SolverDiverged { x: xr, step: 0.0 })?;
    Ok(inv_r * transfer * plane(xl))
}

fn transfer_amplitude(v: &Potential, kappa: f64, ode: &Dopri5, xl: f64, xr: f64) -> Result<Mat2> {
    // a' = c (a + b e^{−2iκx}), b' = −c (a e^{2iκx} + b), c = V/(2iκ)
    let rhs = |x: f64, y: &[f64; 8], d: &mut [f64; 8]| {
        let c = C64::new(0.0, -v.eval(x) / (2.0 * kappa));
        let ph = C64::from_polar(1.0, 2.0 * kappa * x);
        for col in 0..2 {
            let o = 4 * col;
            let a = C64::new(y[o], y[o + 1]);
            let b = C64::new(y[o + 2], y[o + 3]);
            let da = c * (a + b * ph.conj());
            let db = -c * (a * ph + b);
            d[o] = da.re;
            d[o + 1] = da.im;
            d[o + 2] = db.re;
            d[o + 3] = db.im;
        }
    };
    let y = solver_for(v, ode).integrate_segments(
        rhs,
        &v.segment_points(xl, xr),
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        |_, _| {},
    )?;
    Ok(Mat2::new(
        C64::new(y[0], y[1]),
        C64::new(y[4], y[5]),
        C64::new(y[2], y[3]),
        C64::new(y[6], y[7]),
    ))
}

/// Window, solver and formulation switch for one potential, computed once per grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Setup {
    xl: f64,
    xr: f64,
    switch: f64,
    ode: Dopri5,
}

impl Setup {
    pub(crate) fn new(v: &Potential, ode: &Dopri5) -> Result<Self> {
        let (xl, xr) = v.window()?;
        Ok(Self {
            xl,
            xr,
            switch: AMPLITUDE_SWITCH * v.max_abs().sqrt().max(1.0),
            ode: *ode,
        })
    }

    /// Amplitude transfer matrix across the window at momentum `kappa`.
    pub(crate) fn transfer(&self, v: &Potential, kappa: f64) -> Result<Mat2> {
        if kappa >= self.switch {
            transfer_amplitude(v, kappa, &self.ode, self.xl, self.xr)
        } else {
            transfer_real(v, kappa, &self.ode, self.xl, self.xr)
        }
    }

    pub(crate) fn solve(&self, v: &Potential, kappa: f64) -> Result<JostSolution> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidInput(format!("momentum must be positive, got {kappa}")));
        }
        if matches!(v.shape, super::Shape::Zero) {
            return Ok(JostSolution::FREE);
        }
        let m = self.transfer(v, kappa)?;
        let m22 = m.get(1, 1);
        Ok(JostSolution {
            t: m22.inv(),
            t_left: m.det() / m22,
            r_left: -m.get(1, 0) / m22,
            r_right: m.get(0, 1) / m22,
        })
    }
}

/// Transmission and reflection amplitudes at momentum `kappa > 0`.
pub fn jost_solve(v: &Potential, kappa: f64, ode: &Dopri5) -> Result<JostSolution> {
    Setup::new(v, ode)?.solve(v, kappa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Index order: incoming momentum direction `+`, then `−`.
    PlaneWave,
    /// Index order: even, then odd.
    EvenOdd,
}

/// `U S U` with `U = (1/√2)[[1, 1], [1, −1]]` (`U = U^T = U^{-1}`).
pub fn to_even_odd(s: &Mat2) -> Mat2 {
    let u = Mat2::from_real(1.0, 1.0, 1.0, -1.0).scale(std::f64::consts::FRAC_1_SQRT_2.into());
    u * *s * u
}

/// `S(κ)` sampled on an ascending momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub kappas: Vec<f64>,
    pub s_matrices: Vec<Mat2>,
    pub basis: Basis,
}

impl ScatteringData {
    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn in_basis(&self, basis: Basis) -> ScatteringData {
        if basis == self.basis {
            return self.clone();
        }
        // the change of basis is an involution
        ScatteringData {
            kappas: self.kappas.clone(),
            s_matrices: self.s_matrices.iter().map(to_even_odd).collect(),
            basis,
        }
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.s_matrices.iter().map(Mat2::unitarity_defect).fold(0.0, f64::max)
    }

    /// Unwrapped `arg det S` along the grid, starting from the principal value.
    pub fn unwrapped_det_phase(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut prev: Option<(C64, f64)> = None;
        for s in &self.s_matrices {
            let d = s.det();
            let phase = match prev {
                None => d.arg(),
                Some((pd, pp)) => pp + (d * pd.conj()).arg(),
            };
            out.push(phase);
            prev = Some((d, phase));
        }
        out
    }

    /// CSV with columns `kappa, arg_det_s, eigenphase_1, eigenphase_2` then
    /// real and imaginary parts of `s11, s12, s21, s22`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "kappa,arg_det_s,eigenphase_1,eigenphase_2,re_s11,im_s11,re_s12,im_s12,re_s21,im_s21,re_s22,im_s22\n",
        );
        for ((k, s), ph) in self.kappas.iter().zip(&self.s_matrices).zip(self.unwrapped_det_phase()) {
            let e = s.eigenphases();
            let _ = write!(out, "{k:.12e},{ph:.12e},{:.12e},{:.12e}", e[0], e[1]);
            for z in s.0.iter().flatten() {
                let _ = write!(out, ",{:.12e},{:.12e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

/// Plane-wave `S` at every grid momentum (solved in parallel).
pub fn s_matrix_grid(v: &Potential, kappas: &[f64], ode: &Dopri5) -> Result<ScatteringData> {
    if kappas.windows(2).any(|w| w[1] <= w[0]) || kappas.first().is_some_and(|&k| k <= 0.0) {
        return Err(Error::InvalidInput(
            "momentum grid must be positive and ascending".into(),
        ));
    }
    let setup = Setup::new(v, ode)?;
    let s_matrices = kappas
        .par_iter()
        .map(|&k| setup.solve(v, k).map(|j| j.s_matrix()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScatteringData {
        kappas: kappas.to_vec(),
        s_matrices,
        basis: Basis::PlaneWave,
    })
}
