//! Thin helpers over `nalgebra` for the dense systems used here.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::port::C64;
use crate::{Error, Result};

/// Max-abs norm; NaN propagates as infinity.
pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            m.max(v.abs())
        }
    })
}

/// `½ xᵀ M x` for a row-major square `m`.
pub fn half_quad(m: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        let row = &m[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for j in 0..n {
            acc += row[j] * x[j];
        }
        s += x[i] * acc;
    }
    0.5 * s
}

/// Whether a row-major square matrix is symmetric to a relative tolerance.
pub fn is_symmetric(m: &[f64], n: usize, tol: f64) -> bool {
    let scale = m.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[i * n + j] - m[j * n + i]).abs() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// Solve `A x = b` with `A` row-major `n × n`.
pub fn solve(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::Dimension {
            expected: n * n,
            got: a.len(),
        });
    }
    let m = DMatrix::from_row_slice(n, n, a);
    let rhs = DVector::from_column_slice(b);
    let x = m.lu().solve(&rhs).ok_or(Error::Singular)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(x.iter().copied().collect())
}

/// Solve a complex system `A x = b`, `A` row-major.
pub fn solve_complex(a: &[C64], b: &[C64]) -> Result<Vec<C64>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::Dimension {
            expected: n * n,
            got: a.len(),
        });
    }
    let m = DMatrix::from_row_slice(n, n, a);
    let rhs = DVector::from_column_slice(b);
    let x = m.lu().solve(&rhs).ok_or(Error::Singular)?;
    Ok(x.iter().copied().collect())
}
