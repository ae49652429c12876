//! Dense 2×2 complex matrices, the fibre of every path in this crate.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    pub fn scalar(s: C64) -> Self {
        Self::diag(s, s)
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Self::new(s * m[0][0], s * m[0][1], s * m[1][0], s * m[1][1])
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        Some(Self::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(det.inv()))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::IDENTITY).max_abs()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.0[0][1].norm() <= tol && self.0[1][0].norm() <= tol
    }

    /// Eigenvalues of a general 2×2 matrix, ordered by ascending argument.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let tr = self.trace();
        let disc = (tr * tr - self.det().scale(4.0)).sqrt();
        let mut e = [(tr + disc) * 0.5, (tr - disc) * 0.5];
        if e[0].arg() > e[1].arg() {
            e.swap(0, 1);
        }
        e
    }

    /// Principal eigenphases in (−π, π], ascending.
    pub fn eigenphases(&self) -> [f64; 2] {
        let e = self.eigenvalues();
        [e[0].arg(), e[1].arg()]
    }

    /// Unitary factor of the polar decomposition `M = U P`.
    ///
    /// Uses the closed form `√A = (A + √det A · I) / √(tr A + 2√det A)` for the
    /// positive 2×2 matrix `A = M†M`.
    pub fn unitary_part(&self) -> Option<Self> {
        let a = self.adjoint() * *self;
        let sdet = a.det().re.max(0.0).sqrt();
        let denom = (a.trace().re + 2.0 * sdet).sqrt();
        if denom == 0.0 {
            return None;
        }
        let root = (a + Mat2::scalar(sdet.into())).scale((1.0 / denom).into());
        root.inverse().map(|inv| *self * inv)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale((-1.0).into())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Linear interpolation between two unitaries followed by projection back onto U(2).
///
/// Valid while the two endpoints are close (no eigenvalue of `a†b` near −1).
pub fn unitary_lerp(a: &Mat2, b: &Mat2, s: f64) -> Mat2 {
    let m = a.scale((1.0 - s).into()) + b.scale(s.into());
    m.unitary_part().unwrap_or(if s < 0.5 { *a } else { *b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rotation(theta: f64) -> Mat2 {
        Mat2::from_real(theta.cos(), -theta.sin(), theta.sin(), theta.cos())
    }

    #[test]
    fn det_and_inverse() {
        let m = Mat2::new(C64::new(1.0, 2.0), I, C64::new(-3.0, 0.5), ONE);
        let inv = m.inverse().unwrap();
        assert!((m * inv).dist(&Mat2::IDENTITY) < 1e-14);
        assert!(Mat2::from_real(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }

    #[test]
    fn rotation_eigenphases() {
        let p = rotation(0.7).eigenphases();
        assert_abs_diff_eq!(p[0], -0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.7, epsilon = 1e-14);
    }

    #[test]
    fn unitary_part_of_unitary_is_itself() {
        let (a, b, phi) = (C64::from_polar(0.6, 0.3), C64::from_polar(0.8, -1.1), 0.9);
        let e = C64::from_polar(1.0, phi);
        let u = Mat2::new(a, b, -e * b.conj(), e * a.conj());
        assert!(u.unitarity_defect() < 1e-14);
        assert!(u.unitary_part().unwrap().dist(&u) < 1e-14);
    }

    #[test]
    fn unitary_part_projects() {
        let m = Mat2::new(
            C64::new(1.0, 0.1),
            C64::new(0.2, -0.3),
            C64::new(0.0, 0.4),
            C64::new(2.0, 0.0),
        );
        let u = m.unitary_part().unwrap();
        assert!(u.unitarity_defect() < 1e-14);
        // P = U†M must be Hermitian
        let p = u.adjoint() * m;
        assert!(p.dist(&p.adjoint()) < 1e-14);
    }

    #[test]
    fn lerp_stays_unitary() {
        let a = rotation(0.2);
        let b = Mat2::diag(C64::from_polar(1.0, 0.5), C64::from_polar(1.0, -0.4));
        for k in 0..=10 {
            let u = unitary_lerp(&a, &b, k as f64 / 10.0);
            assert!(u.unitarity_defect() < 1e-13);
        }
        assert!(unitary_lerp(&a, &b, 0.0).dist(&a) < 1e-14);
        assert!(unitary_lerp(&a, &b, 1.0).dist(&b) < 1e-14);
    }
}
