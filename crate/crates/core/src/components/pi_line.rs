use crate::component::{
    pair, rotate_pair, set_pair, Component, Ctx, Role, SteadyInit, StorageClass,
};
use crate::port::C64;
use crate::{Error, Result};

/// Lumped π-line parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiLineParams {
    /// Series resistance, p.u.
    pub r: f64,
    /// Series reactance at base frequency, p.u.
    pub x: f64,
    /// Total shunt susceptance, p.u.; half sits at each end.
    pub b: f64,
}

impl PiLineParams {
    /// Series-branch time constant `E/D = L / 2R` in seconds.
    pub fn series_tau(&self, omega_b: f64) -> f64 {
        self.x / (2.0 * self.r * omega_b)
    }
}

/// Two-port π-line.
///
/// States `[i_d, i_q, v1_d, v1_q, v2_d, v2_q]`: the series current from end 1
/// to end 2 and the two shunt-capacitor voltages, which double as the bus
/// voltages. Conductive port flows are `i` at end 1 and `−i` at end 2; the
/// network adds the capacitor currents.
#[derive(Debug, Clone, PartialEq)]
pub struct PiLine {
    /// Parameters.
    pub params: PiLineParams,
}

impl PiLine {
    /// Wrap parameters.
    pub fn new(params: PiLineParams) -> Self {
        Self { params }
    }

    fn series_z(&self, w: f64) -> C64 {
        C64::new(self.params.r, w * self.params.x)
    }
}

impl Component for PiLine {
    fn role(&self) -> Role {
        Role::Line
    }

    fn state_dim(&self) -> usize {
        6
    }

    fn n_ports(&self) -> usize {
        2
    }

    fn state_names(&self) -> &'static [&'static str] {
        &["i_d", "i_q", "v1_d", "v1_q", "v2_d", "v2_q"]
    }

    fn storage_class(&self) -> StorageClass {
        StorageClass::Mixed
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(p.r.is_finite() && p.r >= 0.0) {
            return Err(Error::param("line.r", "must be >= 0"));
        }
        if p.r == 0.0 {
            return Err(Error::Lossless("line".into()));
        }
        if !(p.x.is_finite() && p.x > 0.0) {
            return Err(Error::param("line.x", "must be > 0"));
        }
        if !(p.b.is_finite() && p.b > 0.0) {
            return Err(Error::param("line.b", "must be > 0"));
        }
        Ok(())
    }

    fn shunt(&self, _port: usize) -> f64 {
        0.5 * self.params.b
    }

    fn voltage_state(&self, port: usize) -> Option<usize> {
        Some(2 + 2 * port)
    }

    fn flows(&self, x: &[f64], _e: &[C64], _ctx: &Ctx, f: &mut [C64]) {
        let i = pair(x, 0);
        f[0] = i;
        f[1] = -i;
    }

    fn derivative(&self, x: &[f64], e: &[C64], de: &[C64], ctx: &Ctx, dx: &mut [f64]) {
        let i = pair(x, 0);
        let di = (e[0] - e[1] - self.series_z(ctx.w) * i) * (ctx.omega_b / self.params.x);
        set_pair(dx, 0, di);
        set_pair(dx, 2, de[0]);
        set_pair(dx, 4, de[1]);
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
        let di = pair(dx, 0);
        df[0] = di;
        df[1] = -di;
    }

    fn inertia(&self, _x: &[f64], ctx: &Ctx, h: &mut [f64]) {
        let l = self.params.x / ctx.omega_b;
        let c = 0.5 * self.params.b / ctx.omega_b;
        h.fill(0.0);
        for (k, v) in [l, l, c, c, c, c].into_iter().enumerate() {
            h[k * 6 + k] = v;
        }
    }

    fn damping(&self, _x: &[f64], _ctx: &Ctx, b: &mut [f64]) {
        b.fill(0.0);
        b[0] = 2.0 * self.params.r;
        b[7] = 2.0 * self.params.r;
    }

    fn nominal_tau(&self, omega_b: f64) -> f64 {
        self.params.series_tau(omega_b)
    }

    fn admittance(&self, ctx: &Ctx) -> Option<[C64; 4]> {
        let y = self.series_z(ctx.w).inv();
        Some([y, -y, -y, y])
    }

    fn steady_init(&self, e: &[C64], _f_out: &[C64], ctx: &Ctx, x: &mut [f64]) -> SteadyInit {
        set_pair(x, 0, (e[0] - e[1]) / self.series_z(ctx.w));
        set_pair(x, 2, e[0]);
        set_pair(x, 4, e[1]);
        SteadyInit::default()
    }

    fn rotate(&self, x: &mut [f64], angle: f64) {
        for k in [0, 2, 4] {
            rotate_pair(x, k, angle);
        }
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
    fn equal_ends_no_series_rate() {
        let l = PiLine::new(PiLineParams {
            r: 0.01,
            x: 0.1,
            b: 0.1,
        });
        let v = C64::new(1.0, 0.2);
        let x = [0.0, 0.0, v.re, v.im, v.re, v.im];
        let mut dx = [0.0; 6];
        l.derivative(
            &x,
            &[v, v],
            &[C64::new(0.3, 0.0), C64::new(0.3, 0.0)],
            &ctx(1.0),
            &mut dx,
        );
        assert_eq!(&dx[..2], &[0.0, 0.0]);
        assert_eq!(dx[2], 0.3);
    }

    #[test]
    fn dc_ohms_law() {
        let l = PiLine::new(PiLineParams {
            r: 0.5,
            x: 0.1,
            b: 0.1,
        });
        let mut x = [0.0; 6];
        let e = [C64::new(1.0, 0.0), C64::default()];
        l.steady_init(&e, &[C64::default(); 2], &ctx(0.0), &mut x);
        assert!((x[0] - 2.0).abs() < 1e-14);
        let mut dx = [1.0; 6];
        l.derivative(&x, &e, &[C64::default(); 2], &ctx(0.0), &mut dx);
        assert!(dx[0].abs() < 1e-12);
    }
}
