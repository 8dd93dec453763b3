//! Trajectory-level properties of assembled systems and of the controlled
//! source.

mod common;

use common::*;
use loadability_core::analysis::pv::operating_point;
use loadability_core::component::{Ctx, Drive};
use loadability_core::components::{PqSource, PqSourceParams, RlLoadParams};
use loadability_core::sim::{integrate, Driven, Method, Ode, Rk4, Schedule, SimConfig};
use loadability_core::units::OMEGA_60HZ;
use loadability_core::{Role, C64};
use proptest::prelude::*;

#[test]
fn equilibrium_holds_under_simulation() {
    let sys = fig1(0.15, 0.9);
    let op = operating_point(&sys, None).unwrap();
    let schedule = Schedule::new(&sys, op.drives.clone(), vec![], 1.0).unwrap();
    let trace = integrate(&sys, &SimConfig::default(), &schedule, &op.x).unwrap();
    let drift = (0..trace.len())
        .flat_map(|k| {
            trace
                .state(k)
                .iter()
                .zip(&op.x)
                .map(|(a, b)| (a - b).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    assert!(drift < 1e-6, "{drift}");
}

#[test]
fn adaptive_and_fixed_step_agree() {
    let sys = fig1(0.1, 1.0);
    let op = operating_point(&sys, None).unwrap();
    let ev = vec![loadability_core::sim::Event::exciter_probe(0.02, 0, 0.05)];
    let schedule = Schedule::new(&sys, op.drives.clone(), ev, 0.3).unwrap();
    let fixed = integrate(
        &sys,
        &SimConfig {
            t_end: 0.3,
            step: 20e-6,
            ..SimConfig::default()
        },
        &schedule,
        &op.x,
    )
    .unwrap();
    let adaptive = integrate(
        &sys,
        &SimConfig {
            t_end: 0.3,
            step: 1e-3,
            method: Method::Rk45 {
                rtol: 1e-9,
                atol: 1e-11,
            },
            ..SimConfig::default()
        },
        &schedule,
        &op.x,
    )
    .unwrap();
    let (a, b) = (fixed.last().unwrap(), adaptive.last().unwrap());
    let gap = a
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-6, "{gap}");
}

#[test]
fn source_tracks_setpoint_with_first_order_lag() {
    let src = PqSource::new(PqSourceParams {
        p0: 0.0,
        q0: -0.1,
        tau_p: 0.01,
        tau_q: 0.01,
        enable_time: 0.0,
    });
    let ctx = Ctx {
        t: 0.0,
        w: 1.0,
        omega_b: OMEGA_60HZ,
        drive: Drive::default(),
    };
    let mut sys = Driven::new(&src, ctx, |_t: f64, e: &mut [C64], de: &mut [C64]| {
        e[0] = C64::new(0.98, 0.1);
        de[0] = C64::default();
    });
    let mut x = vec![0.0, 0.0];
    let mut rk = Rk4::new(sys.dim());
    let h = 50e-6;
    let mut worst = 0.0_f64;
    let mut last_err = f64::INFINITY;
    for k in 0..1000 {
        rk.step(&mut sys, k as f64 * h, h, &mut x);
        let t = (k + 1) as f64 * h;
        let q = -0.1 * (1.0 - (-t / 0.01).exp());
        worst = worst.max((x[1] - q).abs());
        assert_eq!(x[0], 0.0);
        // tracking error shrinks monotonically
        let err = (x[1] + 0.1).abs();
        assert!(err < last_err);
        last_err = err;
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn line_energy_balances_with_its_ports() {
    // d/dt(line stored energy) + line dissipation = power into the line,
    // with the rate taken by central differences of the recorded energy
    let sys = radial(
        machine_params(),
        line(0.15),
        RlLoadParams { r: 0.8, x: 0.1 },
        Some(PqSourceParams {
            p0: 0.0,
            q0: -0.1,
            tau_p: 0.01,
            tau_q: 0.01,
            enable_time: 0.02,
        }),
    );
    let op = operating_point(&sys, None).unwrap();
    let ev = vec![loadability_core::sim::Event::exciter_probe(0.01, 0, 0.05)];
    let schedule = Schedule::new(&sys, op.drives.clone(), ev, 0.1).unwrap();
    let cfg = SimConfig {
        t_end: 0.1,
        step: 10e-6,
        ..SimConfig::default()
    };
    let trace = integrate(&sys, &cfg, &schedule, &op.x).unwrap();
    let line_idx = sys
        .components()
        .iter()
        .position(|c| c.role() == Role::Line)
        .unwrap();
    let mut ws = sys.workspace();
    let rec: Vec<_> = (0..trace.len())
        .map(|k| trace.record(&sys, &mut ws, k).unwrap())
        .collect();
    let h = cfg.step;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for k in 2..rec.len() - 2 {
        // skip samples whose stencil straddles a drive change
        if trace.drive_index[k - 2] != trace.drive_index[k + 2] {
            continue;
        }
        let e = |j: usize| rec[j].energy[line_idx].stored;
        let de = (e(k - 2) - 8.0 * e(k - 1) + 8.0 * e(k + 1) - e(k + 2)) / (12.0 * h);
        let s = &rec[k].energy[line_idx];
        worst = worst.max((de + s.dissipated - s.power()).abs());
        scale = scale.max(s.power().abs());
    }
    assert!(worst < 1e-7 * scale.max(1.0), "{worst} vs {scale}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn network_rate_is_componentwise(seed in proptest::collection::vec(-0.05f64..0.05, 17)) {
        // perturb an operating point and compare the assembled derivative
        // with each component's own law at the network's port values
        let sys = fig1(0.1, 1.2);
        let op = operating_point(&sys, None).unwrap();
        let x: Vec<f64> = op.x.iter().zip(&seed).map(|(a, b)| a + b).collect();
        let mut ws = sys.workspace();
        let ev = sys.evaluate(0.0, &x, &op.drives, &mut ws);
        for (c, comp) in sys.components().iter().enumerate() {
            let ctx = Ctx { t: 0.0, w: sys.frame_speed(), omega_b: sys.omega_b(), drive: op.drives[c] };
            let ports = &ev.ports[sys.port_range(c)];
            let e: Vec<C64> = ports.iter().map(|p| p.e).collect();
            let de: Vec<C64> = ports.iter().map(|p| p.de).collect();
            let sr = sys.state_range(c);
            let mut dx = vec![0.0; sr.len()];
            comp.derivative(&x[sr.clone()], &e, &de, &ctx, &mut dx);
            for (a, b) in dx.iter().zip(&ev.dx[sr]) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{} {a} {b}", sys.names()[c]);
            }
        }
    }
}
