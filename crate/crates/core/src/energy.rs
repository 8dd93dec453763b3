//! Per-component energy quantities and network Tellegen sums.
//!
//! `D` is the total dissipated power, so the metric returned by
//! [`Component::damping`] is twice the resistance matrix and
//! `dE/dt = ΣP − D` holds exactly. With this convention the ratio `E/D` of
//! an RL branch is `L/(2R)` in seconds.

use alloc::vec;
use alloc::vec::Vec;

use crate::component::{Component, Ctx, StorageClass};
use crate::linalg::{half_quad, is_symmetric};
use crate::network::{CompositeSystem, Evaluation};
use crate::port::PortVariables;
use crate::{Drive, Error, Result};

const SYM_TOL: f64 = 1e-12;

/// `½ xᵀ H x`. Rejects a non-symmetric metric.
pub fn stored_energy(x: &[f64], h: &[f64]) -> Result<f64> {
    quad(x, h)
}

/// `½ xᵀ B x` with `B` scaled so the result is the total dissipated power.
pub fn dissipated_power(x: &[f64], b: &[f64]) -> Result<f64> {
    quad(x, b)
}

/// `½ ẋᵀ H ẋ`.
pub fn tangent_energy(dx: &[f64], h: &[f64]) -> Result<f64> {
    quad(dx, h)
}

fn quad(x: &[f64], m: &[f64]) -> Result<f64> {
    let n = x.len();
    if m.len() != n * n {
        return Err(Error::Dimension {
            expected: n * n,
            got: m.len(),
        });
    }
    if !is_symmetric(m, n, SYM_TOL) {
        return Err(Error::Asymmetric);
    }
    Ok(half_quad(m, x))
}

/// `E / D`.
///
/// A lossless element (`D = 0`, `E > 0`) is an error. When both vanish the
/// ratio is indeterminate and `nominal` is returned if supplied.
pub fn time_constant(stored: f64, dissipated: f64, nominal: Option<f64>) -> Result<f64> {
    if dissipated > 0.0 {
        return Ok(stored / dissipated);
    }
    if stored > 0.0 {
        return Err(Error::Lossless(
            "no dissipation with nonzero stored energy".into(),
        ));
    }
    nominal.ok_or(Error::Indeterminate)
}

/// Instantaneous power into a port.
pub fn port_power(pv: &PortVariables) -> f64 {
    pv.power()
}

/// Reactive-power rate of a port with the sign of the component's storage
/// class applied (capacitive storage is reversed).
pub fn port_qdot(pv: &PortVariables, class: StorageClass) -> f64 {
    class.qdot_sign() * pv.qdot()
}

/// Energy quantities of one component at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySnapshot {
    /// Time, s.
    pub t: f64,
    /// Stored energy.
    pub stored: f64,
    /// Dissipated power.
    pub dissipated: f64,
    /// `E/D` in seconds; the nominal value when both vanish, NaN if lossless.
    pub tau: f64,
    /// Tangent-space energy.
    pub tangent: f64,
    /// Net energy rate `ΣP − D`.
    pub net_rate: f64,
    /// Power into each port.
    pub port_power: Vec<f64>,
    /// Reactive-power rate at each port (class sign applied).
    pub port_qdot: Vec<f64>,
}

impl EnergySnapshot {
    /// Sum of port powers.
    pub fn power(&self) -> f64 {
        self.port_power.iter().sum()
    }

    /// Sum of port reactive-power rates.
    pub fn qdot(&self) -> f64 {
        self.port_qdot.iter().sum()
    }
}

/// Snapshot of a standalone component given its state, derivative and port
/// records.
pub fn snapshot(
    comp: &dyn Component,
    t: f64,
    x: &[f64],
    dx: &[f64],
    ports: &[PortVariables],
    ctx: &Ctx,
) -> Result<EnergySnapshot> {
    let n = comp.state_dim();
    let mut h = vec![0.0; n * n];
    let mut b = vec![0.0; n * n];
    comp.inertia(x, ctx, &mut h);
    comp.damping(x, ctx, &mut b);
    let stored = stored_energy(x, &h)?;
    let dissipated = dissipated_power(x, &b)?;
    let tangent = tangent_energy(dx, &h)?;
    let tau = match time_constant(stored, dissipated, Some(comp.nominal_tau(ctx.omega_b))) {
        Ok(v) => v,
        Err(Error::Lossless(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    let class = comp.storage_class();
    let port_power: Vec<f64> = ports.iter().map(port_power).collect();
    let port_qdot: Vec<f64> = ports.iter().map(|p| port_qdot(p, class)).collect();
    let net_rate = port_power.iter().sum::<f64>() - dissipated;
    Ok(EnergySnapshot {
        t,
        stored,
        dissipated,
        tau,
        tangent,
        net_rate,
        port_power,
        port_qdot,
    })
}

/// Snapshots of every component of an evaluated network state.
pub fn network_snapshots(
    sys: &CompositeSystem,
    x: &[f64],
    eval: &Evaluation,
    drives: &[Drive],
) -> Result<Vec<EnergySnapshot>> {
    let mut out = Vec::with_capacity(sys.components().len());
    for (c, comp) in sys.components().iter().enumerate() {
        let ctx = Ctx {
            t: eval.t,
            w: sys.frame_speed(),
            omega_b: sys.omega_b(),
            drive: drives[c],
        };
        let sr = sys.state_range(c);
        out.push(snapshot(
            comp.as_ref(),
            eval.t,
            &x[sr.clone()],
            &eval.dx[sr],
            &eval.ports[sys.port_range(c)],
            &ctx,
        )?);
    }
    Ok(out)
}

/// Network-wide sums of the Tellegen quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TellegenReport {
    /// Time, s.
    pub t: f64,
    /// `ΣP`.
    pub residual_p: f64,
    /// `ΣṖ`.
    pub residual_pdot: f64,
    /// `ΣQ̇` with one uniform sign for every port.
    pub residual_qdot: f64,
    /// Sum of absolute port quantities, for relative tolerances.
    pub scale: f64,
}

impl TellegenReport {
    /// Largest residual relative to the scale (scale floored at 1).
    pub fn relative(&self) -> f64 {
        let m = self
            .residual_p
            .abs()
            .max(self.residual_pdot.abs())
            .max(self.residual_qdot.abs());
        m / self.scale.max(1.0)
    }
}

/// Sum `P`, `Ṗ`, `Q̇` over every port.
///
/// Tellegen's theorem needs the same sign on every port, so the reactive
/// rate here is the uniform `e·ḟ − f·ė`, not the per-class value.
pub fn tellegen(t: f64, ports: &[PortVariables]) -> TellegenReport {
    let mut r = TellegenReport {
        t,
        ..Default::default()
    };
    for p in ports {
        let (a, b, c) = (p.power(), p.power_rate(), p.qdot());
        r.residual_p += a;
        r.residual_pdot += b;
        r.residual_qdot += c;
        r.scale += a.abs() + b.abs() + c.abs();
    }
    r
}

/// One sample of a single component's energy record.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BalanceSample {
    /// Time, s.
    pub t: f64,
    /// Stored energy.
    pub stored: f64,
    /// `ΣP − D`.
    pub net_rate: f64,
    /// Tangent energy.
    pub tangent: f64,
    /// `ΣQ̇` (class sign).
    pub qdot: f64,
}

impl From<&EnergySnapshot> for BalanceSample {
    fn from(s: &EnergySnapshot) -> Self {
        Self {
            t: s.t,
            stored: s.stored,
            net_rate: s.net_rate,
            tangent: s.tangent,
            qdot: s.qdot(),
        }
    }
}

/// Residual series of the two energy-balance identities.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceResiduals {
    /// Times of the interior samples where residuals were formed.
    pub t: Vec<f64>,
    /// `dE/dt − (ΣP − D)`.
    pub first: Vec<f64>,
    /// `dp/dt − (4E_t − ΣQ̇)`.
    pub second: Vec<f64>,
}

impl BalanceResiduals {
    /// Max-abs of the first residual.
    pub fn max_first(&self) -> f64 {
        crate::linalg::inf_norm(&self.first)
    }

    /// Max-abs of the second residual.
    pub fn max_second(&self) -> f64 {
        crate::linalg::inf_norm(&self.second)
    }
}

/// Finite-difference the stored energy and net rate over a uniformly sampled
/// window and compare them with the instantaneous right-hand sides.
///
/// Five-point central differences are used where the window allows,
/// three-point ones next to the ends.
pub fn energy_balance_residuals(samples: &[BalanceSample]) -> Result<BalanceResiduals> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::ShortWindow(n));
    }
    let h = samples[1].t - samples[0].t;
    if !(h > 0.0) {
        return Err(Error::Invalid("samples must be increasing in time".into()));
    }
    let diff = |k: usize, get: &dyn Fn(&BalanceSample) -> f64| -> f64 {
        if k >= 2 && k + 2 < n {
            (get(&samples[k - 2]) - 8.0 * get(&samples[k - 1]) + 8.0 * get(&samples[k + 1])
                - get(&samples[k + 2]))
                / (12.0 * h)
        } else {
            (get(&samples[k + 1]) - get(&samples[k - 1])) / (2.0 * h)
        }
    };
    let mut out = BalanceResiduals {
        t: Vec::with_capacity(n - 2),
        first: Vec::with_capacity(n - 2),
        second: Vec::with_capacity(n - 2),
    };
    for k in 1..n - 1 {
        let s = &samples[k];
        out.t.push(s.t);
        out.first.push(diff(k, &|s| s.stored) - s.net_rate);
        out.second
            .push(diff(k, &|s| s.net_rate) - (4.0 * s.tangent - s.qdot));
    }
    Ok(out)
}
