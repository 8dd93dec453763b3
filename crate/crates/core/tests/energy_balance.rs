//! Energy-rate identities along integrated single-storage trajectories.

use loadability_core::component::{Component, Ctx, Drive, Role, SteadyInit, StorageClass};
use loadability_core::components::{RlLoad, RlLoadParams};
use loadability_core::energy::{energy_balance_residuals, BalanceSample};
use loadability_core::sim::{Driven, Ode, Rk4};
use loadability_core::units::OMEGA_60HZ;
use loadability_core::{Result, C64};
use proptest::prelude::*;

/// Sinusoidal drive in the stationary (`w = 0`) frame plus a second
/// harmonic on the q axis, so the trajectory is not a pure phasor.
#[derive(Debug, Clone, Copy)]
struct Drive2 {
    amp: f64,
    omega: f64,
    phase: f64,
}

impl Drive2 {
    /// Voltage and its first two rates.
    fn eval(&self, t: f64) -> (C64, C64, C64) {
        let (a, w) = (self.omega * t + self.phase, self.omega);
        let k = 0.3 * self.amp;
        let e = C64::new(self.amp * a.cos(), k * (2.0 * a).sin());
        let de = C64::new(-self.amp * w * a.sin(), 2.0 * k * w * (2.0 * a).cos());
        let dde = C64::new(
            -self.amp * w * w * a.cos(),
            -4.0 * k * w * w * (2.0 * a).sin(),
        );
        (e, de, dde)
    }
}

/// Capacitor with a parallel conductance, sitting directly on its port.
/// The state is the capacitor voltage, so it follows the driven port; the
/// displacement current needs the drive's rates, so the drive is carried
/// along.
#[derive(Debug)]
struct ShuntRc {
    g: f64,
    b: f64,
    drive: Drive2,
}

impl ShuntRc {
    fn c(&self, omega_b: f64) -> f64 {
        self.b / omega_b
    }
}

impl Component for ShuntRc {
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
        &["v_d", "v_q"]
    }
    fn storage_class(&self) -> StorageClass {
        StorageClass::Capacitive
    }
    fn validate(&self) -> Result<()> {
        Ok(())
    }
    fn flows(&self, x: &[f64], _e: &[C64], ctx: &Ctx, f: &mut [C64]) {
        let (_, dv, _) = self.drive.eval(ctx.t);
        f[0] = C64::new(x[0], x[1]) * self.g + dv * self.c(ctx.omega_b);
    }
    fn derivative(&self, _x: &[f64], _e: &[C64], de: &[C64], _ctx: &Ctx, dx: &mut [f64]) {
        dx[0] = de[0].re;
        dx[1] = de[0].im;
    }
    fn flow_rates(
        &self,
        _x: &[f64],
        dx: &[f64],
        _e: &[C64],
        _de: &[C64],
        ctx: &Ctx,
        df: &mut [C64],
    ) {
        let (_, _, ddv) = self.drive.eval(ctx.t);
        df[0] = C64::new(dx[0], dx[1]) * self.g + ddv * self.c(ctx.omega_b);
    }
    fn inertia(&self, _x: &[f64], ctx: &Ctx, h: &mut [f64]) {
        let c = self.c(ctx.omega_b);
        h.copy_from_slice(&[c, 0.0, 0.0, c]);
    }
    fn damping(&self, _x: &[f64], _ctx: &Ctx, b: &mut [f64]) {
        b.copy_from_slice(&[2.0 * self.g, 0.0, 0.0, 2.0 * self.g]);
    }
    fn nominal_tau(&self, omega_b: f64) -> f64 {
        self.c(omega_b) / (2.0 * self.g)
    }
    fn steady_init(&self, e: &[C64], _f: &[C64], _ctx: &Ctx, x: &mut [f64]) -> SteadyInit {
        x[0] = e[0].re;
        x[1] = e[0].im;
        SteadyInit::default()
    }
    fn rotate(&self, _x: &mut [f64], _angle: f64) {}
}

fn ctx() -> Ctx {
    Ctx {
        t: 0.0,
        w: 0.0,
        omega_b: OMEGA_60HZ,
        drive: Drive::default(),
    }
}

/// Max interior residuals `(r₁, r₂)` of a driven run with step `h`, each
/// relative to the largest magnitude of its right-hand side.
fn residuals(comp: &dyn Component, drive: Drive2, x0: &[f64], h: f64, t_end: f64) -> (f64, f64) {
    let mut sys = Driven::new(comp, ctx(), move |t: f64, e: &mut [C64], de: &mut [C64]| {
        let (v, dv, _) = drive.eval(t);
        e[0] = v;
        de[0] = dv;
    });
    let steps = (t_end / h).round() as usize;
    let mut rk = Rk4::new(sys.dim());
    let mut x = x0.to_vec();
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * h;
        samples.push(BalanceSample::from(&sys.snapshot(t, &x).unwrap()));
        if k < steps {
            rk.step(&mut sys, t, h, &mut x);
        }
    }
    let r = energy_balance_residuals(&samples).unwrap();
    // the first and last residual use a lower-order stencil
    let n = r.first.len();
    let inner = &samples[2..n];
    let scale1 = inner.iter().fold(0.0_f64, |m, s| m.max(s.net_rate.abs()));
    let scale2 = inner
        .iter()
        .fold(0.0_f64, |m, s| m.max((4.0 * s.tangent - s.qdot).abs()));
    let interior = |v: &[f64]| v[1..n - 1].iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    (interior(&r.first) / scale1, interior(&r.second) / scale2)
}

fn order(a: f64, b: f64) -> f64 {
    (a / b).log2()
}

const DRIVE: Drive2 = Drive2 {
    amp: 1.0,
    omega: OMEGA_60HZ,
    phase: 0.3,
};

#[test]
fn rl_identities_converge_at_fourth_order() {
    let load = RlLoad::new(RlLoadParams { r: 0.5, x: 0.2 });
    let x0 = [0.2, -0.1];
    let hs = [40e-6, 20e-6, 10e-6];
    let r: Vec<(f64, f64)> = hs
        .iter()
        .map(|&h| residuals(&load, DRIVE, &x0, h, 0.02))
        .collect();
    for w in r.windows(2) {
        assert!(order(w[0].0, w[1].0) >= 3.8, "{r:?}");
        assert!(order(w[0].1, w[1].1) >= 3.8, "{r:?}");
    }
    assert!(r[2].0 < 1e-7 && r[2].1 < 1e-7, "{r:?}");
}

#[test]
fn shunt_capacitor_identities_converge_at_fourth_order() {
    let rc = ShuntRc {
        g: 0.8,
        b: 0.3,
        drive: DRIVE,
    };
    let (e0, _, _) = DRIVE.eval(0.0);
    let x0 = [e0.re, e0.im];
    let hs = [40e-6, 20e-6, 10e-6];
    let r: Vec<(f64, f64)> = hs
        .iter()
        .map(|&h| residuals(&rc, DRIVE, &x0, h, 0.02))
        .collect();
    for w in r.windows(2) {
        assert!(order(w[0].0, w[1].0) >= 3.8, "{r:?}");
        assert!(order(w[0].1, w[1].1) >= 3.8, "{r:?}");
    }
    assert!(r[2].0 < 1e-7 && r[2].1 < 1e-7, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // L/R stays above a millisecond so the start-up transient is resolved
    // by the difference stencil
    #[test]
    fn rl_identities_small_at_fine_step(
        r in 0.01f64..0.2,
        x in 0.1f64..0.5,
        amp in 0.2f64..1.5,
        phase in 0.0..std::f64::consts::TAU,
        i0 in -0.5f64..0.5,
    ) {
        let load = RlLoad::new(RlLoadParams { r, x });
        let d = Drive2 { amp, omega: OMEGA_60HZ, phase };
        let (a1, a2) = residuals(&load, d, &[i0, 0.1], 20e-6, 0.01);
        let (b1, b2) = residuals(&load, d, &[i0, 0.1], 10e-6, 0.01);
        prop_assert!(b1 < 1e-7 && b2 < 1e-7, "{b1} {b2}");
        prop_assert!(b1 <= a1 && b2 <= a2);
    }
}
