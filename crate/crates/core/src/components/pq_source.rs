use crate::component::{Component, Ctx, Drive, Role, SteadyInit, StorageClass};
use crate::port::C64;
use crate::{Error, Result};

/// Smallest terminal voltage magnitude the source divides by.
pub const VOLTAGE_FLOOR: f64 = 1e-4;

/// Setpoints and tracking constants of the controlled source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqSourceParams {
    /// Active-power setpoint into the port, p.u.
    pub p0: f64,
    /// Reactive-power setpoint into the port, p.u.; negative supplies vars.
    pub q0: f64,
    /// Active-power tracking time constant, s.
    pub tau_p: f64,
    /// Reactive-power tracking time constant, s.
    pub tau_q: f64,
    /// Time at which tracking starts, s.
    pub enable_time: f64,
}

/// Grid-following source that tracks `(P, Q)` setpoints with first-order
/// lags and injects the matching current.
///
/// States `[P, Q]` are the power into the port, so a source configured as a
/// negative load carries negative values. The port flow is
/// `conj((P + jQ) / v)`. While the source is disabled its states are frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct PqSource {
    /// Parameters.
    pub params: PqSourceParams,
}

impl PqSource {
    /// Wrap parameters.
    pub fn new(params: PqSourceParams) -> Self {
        Self { params }
    }

    fn guarded(e: C64) -> C64 {
        let m = e.norm();
        if m >= VOLTAGE_FLOOR {
            e
        } else if m > 0.0 {
            e * (VOLTAGE_FLOOR / m)
        } else {
            C64::new(VOLTAGE_FLOOR, 0.0)
        }
    }
}

impl Component for PqSource {
    fn role(&self) -> Role {
        Role::Source
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn n_ports(&self) -> usize {
        1
    }

    fn state_names(&self) -> &'static [&'static str] {
        &["p", "q"]
    }

    fn storage_class(&self) -> StorageClass {
        StorageClass::None
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(p.tau_p.is_finite() && p.tau_p > 0.0) {
            return Err(Error::param("source.tau_p", "must be > 0"));
        }
        if !(p.tau_q.is_finite() && p.tau_q > 0.0) {
            return Err(Error::param("source.tau_q", "must be > 0"));
        }
        if !(p.p0.is_finite() && p.q0.is_finite() && p.enable_time.is_finite()) {
            return Err(Error::param("source", "setpoints must be finite"));
        }
        Ok(())
    }

    fn enable_time(&self) -> Option<f64> {
        Some(self.params.enable_time)
    }

    fn is_active(&self, drive: &Drive) -> bool {
        drive.enabled
    }

    fn flows(&self, x: &[f64], e: &[C64], _ctx: &Ctx, f: &mut [C64]) {
        let s = C64::new(x[0], x[1]);
        f[0] = (s / Self::guarded(e[0])).conj();
    }

    fn derivative(&self, x: &[f64], _e: &[C64], _de: &[C64], ctx: &Ctx, dx: &mut [f64]) {
        if ctx.drive.enabled {
            let p = &self.params;
            dx[0] = -(x[0] - p.p0) / p.tau_p;
            dx[1] = -(x[1] - p.q0) / p.tau_q;
        } else {
            dx[0] = 0.0;
            dx[1] = 0.0;
        }
    }

    fn flow_rates(&self, x: &[f64], dx: &[f64], e: &[C64], de: &[C64], _ctx: &Ctx, df: &mut [C64]) {
        let s = C64::new(x[0], x[1]);
        let ds = C64::new(dx[0], dx[1]);
        let v = Self::guarded(e[0]);
        df[0] = (ds / v - s * de[0] / (v * v)).conj();
    }

    fn inertia(&self, _x: &[f64], _ctx: &Ctx, h: &mut [f64]) {
        h.fill(0.0);
    }

    fn damping(&self, _x: &[f64], _ctx: &Ctx, b: &mut [f64]) {
        b.fill(0.0);
    }

    fn nominal_tau(&self, _omega_b: f64) -> f64 {
        self.params.tau_p
    }

    fn admittance(&self, ctx: &Ctx) -> Option<[C64; 4]> {
        let y = if ctx.drive.enabled {
            C64::new(self.params.p0, -self.params.q0)
        } else {
            C64::default()
        };
        Some([y, C64::default(), C64::default(), C64::default()])
    }

    fn steady_init(&self, _e: &[C64], _f_out: &[C64], ctx: &Ctx, x: &mut [f64]) -> SteadyInit {
        if ctx.drive.enabled {
            x[0] = self.params.p0;
            x[1] = self.params.q0;
        } else {
            x[0] = 0.0;
            x[1] = 0.0;
        }
        SteadyInit::default()
    }

    fn rotate(&self, _x: &mut [f64], _angle: f64) {}

    fn saturated(&self, _x: &[f64], e: &[C64]) -> bool {
        e[0].norm() < VOLTAGE_FLOOR
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injected_power_matches_state() {
        let s = PqSource::new(PqSourceParams {
            p0: 0.0,
            q0: -0.1,
            tau_p: 0.01,
            tau_q: 0.01,
            enable_time: 0.0,
        });
        let ctx = Ctx {
            t: 0.0,
            w: 1.0,
            omega_b: 377.0,
            drive: Drive::default(),
        };
        let e = [C64::from_polar(0.95, 0.4)];
        let mut f = [C64::default()];
        s.flows(&[0.2, -0.1], &e, &ctx, &mut f);
        let sin = e[0] * f[0].conj();
        assert!((sin.re - 0.2).abs() < 1e-14);
        assert!((sin.im + 0.1).abs() < 1e-14);
    }

    #[test]
    fn low_voltage_is_guarded() {
        let s = PqSource::new(PqSourceParams {
            p0: 0.0,
            q0: -0.1,
            tau_p: 0.01,
            tau_q: 0.01,
            enable_time: 0.0,
        });
        let ctx = Ctx {
            t: 0.0,
            w: 1.0,
            omega_b: 377.0,
            drive: Drive::default(),
        };
        let mut f = [C64::default()];
        s.flows(&[0.0, -0.1], &[C64::default()], &ctx, &mut f);
        assert!(f[0].norm().is_finite());
        assert!(s.saturated(&[0.0, -0.1], &[C64::new(1e-6, 0.0)]));
    }
}
