//! Explicit Runge–Kutta steppers.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A first-order system `ẋ = f(t, x)`.
pub trait Ode {
    /// State dimension.
    fn dim(&self) -> usize;
    /// Write `f(t, x)` into `dx`.
    fn eval(&mut self, t: f64, x: &[f64], dx: &mut [f64]);
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Ode for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&mut self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.1)(t, x, dx)
    }
}

/// Classic fourth-order Runge–Kutta with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    /// Buffers for dimension `n`.
    pub fn new(n: usize) -> Self {
        Self {
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
        }
    }

    /// Advance `x` from `t` by `h` in place.
    pub fn step(&mut self, ode: &mut dyn Ode, t: f64, h: f64, x: &mut [f64]) {
        let n = x.len();
        let [k1, k2, k3, k4] = &mut self.k;
        ode.eval(t, x, k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        ode.eval(t + 0.5 * h, &self.tmp, k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        ode.eval(t + 0.5 * h, &self.tmp, k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * k3[i];
        }
        ode.eval(t + h, &self.tmp, k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4).
#[derive(Debug, Clone)]
pub struct Rk45 {
    /// Relative tolerance.
    pub rtol: f64,
    /// Absolute tolerance.
    pub atol: f64,
    /// Smallest step before giving up.
    pub h_min: f64,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y5: Vec<f64>,
}

impl Rk45 {
    /// Buffers for dimension `n`.
    pub fn new(n: usize, rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h_min: 1e-12,
            k: core::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y5: vec![0.0; n],
        }
    }

    /// Integrate from `t0` to `t1` exactly, starting with step `h`.
    /// Returns the last accepted step size.
    pub fn advance(
        &mut self,
        ode: &mut dyn Ode,
        t0: f64,
        t1: f64,
        x: &mut [f64],
        mut h: f64,
    ) -> Result<f64> {
        let n = x.len();
        let mut t = t0;
        let mut last = h;
        while t < t1 {
            let end = t + h >= t1;
            let hh = if end { t1 - t } else { h };
            for s in 0..7 {
                for i in 0..n {
                    let mut acc = x[i];
                    for j in 0..s {
                        acc += hh * A[s][j] * self.k[j][i];
                    }
                    self.tmp[i] = acc;
                }
                ode.eval(t + C[s] * hh, &self.tmp, &mut self.k[s]);
            }
            let mut err = 0.0_f64;
            for i in 0..n {
                let mut y5 = x[i];
                let mut y4 = x[i];
                for s in 0..7 {
                    y5 += hh * B5[s] * self.k[s][i];
                    y4 += hh * B4[s] * self.k[s][i];
                }
                self.y5[i] = y5;
                let sc = self.atol + self.rtol * x[i].abs().max(y5.abs());
                let r = (y5 - y4) / sc;
                err += r * r;
            }
            let err = libm::sqrt(err / n.max(1) as f64);
            if !err.is_finite() {
                return Err(Error::Diverged(t));
            }
            if err <= 1.0 {
                t = if end { t1 } else { t + hh };
                x.copy_from_slice(&self.y5);
                last = hh;
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
            };
            h = hh * fac;
            if h < self.h_min {
                return Err(Error::NoConvergence(t));
            }
        }
        Ok(last)
    }
}
