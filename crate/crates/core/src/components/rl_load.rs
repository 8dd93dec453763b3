use crate::component::{
    pair, rotate_pair, set_pair, Component, Ctx, Role, SteadyInit, StorageClass,
};
use crate::port::C64;
use crate::{Error, Result};

/// Series RL load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlLoadParams {
    /// Resistance, p.u.
    pub r: f64,
    /// Reactance at base frequency, p.u.
    pub x: f64,
}

/// Series RL load with one port; states are the load current `(i_d, i_q)`.
///
/// `(X/ω_b) di/dt = v − R i − j w X i`. The port flow is the load current,
/// which is the current into the load.
#[derive(Debug, Clone, PartialEq)]
pub struct RlLoad {
    /// Parameters.
    pub params: RlLoadParams,
}

impl RlLoad {
    /// Wrap parameters.
    pub fn new(params: RlLoadParams) -> Self {
        Self { params }
    }

    fn r(&self, ctx: &Ctx) -> f64 {
        self.params.r * ctx.drive.r_scale
    }
}

impl Component for RlLoad {
    fn role(&self) -> Role {
        Role::Load
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn n_ports(&self) -> usize {
        1
    }

    fn state_names(&self) -> &'static [&'static str] {
        &["i_d", "i_q"]
    }

    fn storage_class(&self) -> StorageClass {
        StorageClass::Inductive
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(p.r.is_finite() && p.r >= 0.0) {
            return Err(Error::param("load.r", "must be >= 0"));
        }
        if !(p.x.is_finite() && p.x > 0.0) {
            return Err(Error::param("load.x", "must be > 0"));
        }
        if p.r == 0.0 {
            return Err(Error::Lossless("load".into()));
        }
        Ok(())
    }

    fn flows(&self, x: &[f64], _e: &[C64], _ctx: &Ctx, f: &mut [C64]) {
        f[0] = pair(x, 0);
    }

    fn derivative(&self, x: &[f64], e: &[C64], _de: &[C64], ctx: &Ctx, dx: &mut [f64]) {
        let i = pair(x, 0);
        let xl = self.params.x;
        let di = (e[0] - i * self.r(ctx) - C64::new(0.0, ctx.w * xl) * i) * (ctx.omega_b / xl);
        set_pair(dx, 0, di);
    }

    fn flow_rates(
        &self,
        _x: &[f64],
        dx: &[f64],
        _e: &[C64],
        _de: &[C64],
        _ctx: &Ctx,
        df: &mut [C64],
    ) {
        df[0] = pair(dx, 0);
    }

    fn inertia(&self, _x: &[f64], ctx: &Ctx, h: &mut [f64]) {
        let l = self.params.x / ctx.omega_b;
        h.copy_from_slice(&[l, 0.0, 0.0, l]);
    }

    fn damping(&self, _x: &[f64], ctx: &Ctx, b: &mut [f64]) {
        let r2 = 2.0 * self.r(ctx);
        b.copy_from_slice(&[r2, 0.0, 0.0, r2]);
    }

    fn nominal_tau(&self, omega_b: f64) -> f64 {
        // E/D of the branch: (½ L i²) / (R i²)
        self.params.x / (2.0 * self.params.r * omega_b)
    }

    fn admittance(&self, ctx: &Ctx) -> Option<[C64; 4]> {
        let z = C64::new(self.r(ctx), ctx.w * self.params.x);
        Some([z.inv(), C64::default(), C64::default(), C64::default()])
    }

    fn steady_init(&self, e: &[C64], _f_out: &[C64], ctx: &Ctx, x: &mut [f64]) -> SteadyInit {
        let z = C64::new(self.r(ctx), ctx.w * self.params.x);
        set_pair(x, 0, e[0] / z);
        SteadyInit::default()
    }

    fn rotate(&self, x: &mut [f64], angle: f64) {
        rotate_pair(x, 0, angle);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::Drive;

    fn ctx(w: f64) -> Ctx {
        Ctx {
            t: 0.0,
            w,
            omega_b: crate::units::OMEGA_60HZ,
            drive: Drive::default(),
        }
    }

    #[test]
    fn zero_state_zero_everything() {
        let l = RlLoad::new(RlLoadParams { r: 1.0, x: 1.0 });
        let mut dx = [9.0; 2];
        let e = [C64::default()];
        l.derivative(&[0.0, 0.0], &e, &e, &ctx(1.0), &mut dx);
        assert_eq!(dx, [0.0, 0.0]);
        let mut f = [C64::new(1.0, 1.0)];
        l.flows(&[0.0, 0.0], &e, &ctx(1.0), &mut f);
        assert_eq!(f[0], C64::default());
    }

    #[test]
    fn dc_steady_state_has_zero_rate() {
        let l = RlLoad::new(RlLoadParams { r: 1.0, x: 1.0 });
        let mut dx = [9.0; 2];
        let e = [C64::new(1.0, 0.0)];
        l.derivative(&[1.0, 0.0], &e, &[C64::default()], &ctx(0.0), &mut dx);
        assert!(dx[0].abs() < 1e-15 && dx[1].abs() < 1e-15);
    }

    #[test]
    fn lossless_rejected() {
        assert!(RlLoad::new(RlLoadParams { r: 0.0, x: 1.0 })
            .validate()
            .is_err());
        assert!(RlLoad::new(RlLoadParams { r: 1.0, x: 0.0 })
            .validate()
            .is_err());
    }
}
