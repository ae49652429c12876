//! Dormand–Prince 5(4) with embedded error control, on fixed-size real states.

use crate::error::{Error, Result};

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂ (fifth minus fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction), calling
    /// `observe` after every accepted step.
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        mut observe: O,
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N], &mut [f64; N]),
        O: FnMut(f64, &[f64; N]),
    {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut x = x0;
        let mut y = y0;
        let mut k1 = [0.0; N];
        f(x, &y, &mut k1);
        let mut h = (span.abs() / 100.0).min(self.h_max).max(1e-12 * span.abs()) * dir;
        let mut steps = 0usize;
        let h_min = 1e-14 * (x0.abs() + x1.abs()).max(1.0);

        while (x1 - x) * dir > 0.0 {
            if steps >= self.max_steps {
                return Err(Error::SolverDiverged { x, step: h });
            }
            steps += 1;
            if (x + h - x1) * dir > 0.0 {
                h = x1 - x;
            }
            let mut k2 = [0.0; N];
            let mut k3 = [0.0; N];
            let mut k4 = [0.0; N];
            let mut k5 = [0.0; N];
            let mut k6 = [0.0; N];
            let mut k7 = [0.0; N];
            f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]), &mut k2);
            f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]), &mut k3);
            f(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), &mut k4);
            f(
                x + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                &mut k5,
            );
            f(
                x + h,
                &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                &mut k6,
            );
            let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            f(x + h, &y_new, &mut k7);

            let mut err = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();

            if err <= 1.0 {
                x += h;
                y = y_new;
                k1 = k7;
                observe(x, &y);
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h.abs() * fac).min(self.h_max) * dir;
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                h *= fac;
                if h.abs() < h_min {
                    return Err(Error::SolverDiverged { x, step: h });
                }
            }
            if !y.iter().all(|v| v.is_finite()) {
                return Err(Error::SolverDiverged { x, step: h });
            }
        }
        Ok(y)
    }

    /// Integrates across the ordered points `[x0, b1, b2, …, x1]`, restarting
    /// the stepper at every breakpoint.
    pub fn integrate_segments<const N: usize, F, O>(
        &self,
        mut f: F,
        points: &[f64],
        y0: [f64; N],
        mut observe: O,
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N], &mut [f64; N]),
        O: FnMut(f64, &[f64; N]),
    {
        let mut y = y0;
        for w in points.windows(2) {
            y = self.integrate(&mut f, w[0], y, w[1], &mut observe)?;
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = Dopri5::default()
            .integrate(|_, y: &[f64; 1], d| d[0] = -y[0], 0.0, [1.0], 3.0, |_, _| {})
            .unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        // y'' = −y from x = 2 back to 0 starting on (sin, cos)
        let f = |_: f64, y: &[f64; 2], d: &mut [f64; 2]| {
            d[0] = y[1];
            d[1] = -y[0];
        };
        let y = Dopri5::default()
            .integrate(f, 2.0, [2f64.sin(), 2f64.cos()], 0.0, |_, _| {})
            .unwrap();
        assert!(y[0].abs() < 1e-10);
        assert!((y[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn segments_and_observer() {
        let mut count = 0;
        let mut last = 0.0;
        let y = Dopri5::default()
            .with_h_max(0.1)
            .integrate_segments(
                |_, _: &[f64; 1], d| d[0] = 1.0,
                &[0.0, 0.5, 2.0],
                [0.0],
                |x, _| {
                    count += 1;
                    last = x;
                },
            )
            .unwrap();
        assert!((y[0] - 2.0).abs() < 1e-14);
        assert!(count >= 20);
        assert_eq!(last, 2.0);
    }

    #[test]
    fn blow_up_is_reported() {
        let r = Dopri5 {
            max_steps: 10_000,
            ..Dopri5::default()
        }
        .integrate(|_, y: &[f64; 1], d| d[0] = y[0] * y[0], 0.0, [1.0], 2.0, |_, _| {});
        assert!(matches!(r, Err(Error::SolverDiverged { .. })));
    }
}
