//! Damped Newton solve for operating points.

use alloc::vec;
use alloc::vec::Vec;

use crate::component::Drive;
use crate::linalg::{inf_norm, solve};
use crate::network::{CompositeSystem, Workspace};
use crate::{Error, Result};

/// Newton settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions {
    /// Target `‖ẋ‖∞`.
    pub tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 60,
        }
    }
}

/// Solve `ẋ = 0` for the given drives.
///
/// The reference rotor angle is pinned at its starting value and the
/// reference machine's power adjustment is solved for instead, so the
/// system is square. Mirror bus-voltage states follow their owners and the
/// states of inactive components are held. Without a `guess` the phasor
/// estimate from [`CompositeSystem::steady_guess`] seeds the iteration.
pub fn find_equilibrium(
    sys: &CompositeSystem,
    drives: &[Drive],
    guess: Option<(&[f64], f64)>,
    opts: &EquilibriumOptions,
) -> Result<(Vec<f64>, Vec<Drive>)> {
    let n = sys.dim();
    let (mut x, mut d) = match guess {
        Some((x0, adj)) => {
            let mut d = drives.to_vec();
            if let Some(r) = sys.reference_component() {
                d[r].power_adjust = adj;
            }
            (x0.to_vec(), d)
        }
        None => sys.steady_guess(drives)?,
    };
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    let reference = sys.reference_component();
    let ref_angle = sys.reference_angle();

    let mut held = vec![false; n];
    for &(m, _) in sys.mirrors() {
        held[m] = true;
    }
    for (c, comp) in sys.components().iter().enumerate() {
        if !comp.is_active(&d[c]) {
            for i in sys.state_range(c) {
                held[i] = true;
            }
        }
    }
    let equations: Vec<usize> = (0..n).filter(|&i| !held[i]).collect();
    let mut unknowns: Vec<usize> = equations
        .iter()
        .copied()
        .filter(|&i| Some(i) != ref_angle)
        .collect();
    let solve_adjust = reference.is_some() && ref_angle.is_some();
    if !solve_adjust {
        unknowns = equations.clone();
    }
    let m = equations.len();
    let mut ws = sys.workspace();
    let mut dx = vec![0.0; n];

    let sync = |x: &mut [f64]| {
        for &(mi, owner) in sys.mirrors() {
            x[mi] = x[owner];
        }
    };
    let residual = |x: &[f64], d: &[Drive], out: &mut [f64], ws: &mut Workspace, dx: &mut [f64]| {
        sys.rhs(0.0, x, d, ws, dx);
        for (k, &i) in equations.iter().enumerate() {
            out[k] = dx[i];
        }
    };

    sync(&mut x);
    let mut r = vec![0.0; m];
    residual(&x, &d, &mut r, &mut ws, &mut dx);
    let mut norm = inf_norm(&r);
    let mut jac = vec![0.0; m * m];
    let mut rp = vec![0.0; m];
    let mut rm = vec![0.0; m];
    for _ in 0..opts.max_iter {
        if norm < opts.tol {
            return Ok((x, d));
        }
        // central-difference Jacobian, columns over the unknowns
        for col in 0..m {
            let (orig, step) = if solve_adjust && col == m - 1 {
                let r = reference.unwrap_or(0);
                (d[r].power_adjust, 1e-6 * d[r].power_adjust.abs().max(1.0))
            } else {
                let i = unknowns[col];
                (x[i], 1e-7 * x[i].abs().max(1.0))
            };
            let set = |v: f64, x: &mut Vec<f64>, d: &mut Vec<Drive>| {
                if solve_adjust && col == m - 1 {
                    d[reference.unwrap_or(0)].power_adjust = v;
                } else {
                    x[unknowns[col]] = v;
                    sync(x);
                }
            };
            set(orig + step, &mut x, &mut d);
            residual(&x, &d, &mut rp, &mut ws, &mut dx);
            set(orig - step, &mut x, &mut d);
            residual(&x, &d, &mut rm, &mut ws, &mut dx);
            set(orig, &mut x, &mut d);
            for row in 0..m {
                jac[row * m + col] = (rp[row] - rm[row]) / (2.0 * step);
            }
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = solve(&jac, &neg)?;
        let mut lambda = 1.0;
        let (x_old, d_old) = (x.clone(), d.clone());
        loop {
            for (col, dv) in delta.iter().enumerate() {
                if solve_adjust && col == m - 1 {
                    let rc = reference.unwrap_or(0);
                    d[rc].power_adjust = d_old[rc].power_adjust + lambda * dv;
                } else {
                    x[unknowns[col]] = x_old[unknowns[col]] + lambda * dv;
                }
            }
            sync(&mut x);
            residual(&x, &d, &mut r, &mut ws, &mut dx);
            let trial = inf_norm(&r);
            if trial < norm || lambda < 1e-4 {
                norm = trial;
                break;
            }
            lambda *= 0.5;
        }
    }
    if norm < opts.tol {
        Ok((x, d))
    } else {
        Err(Error::NoConvergence(norm))
    }
}
