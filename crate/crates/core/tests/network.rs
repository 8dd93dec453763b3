//! Whole-network behaviour: conservation sums, operating points,
//! determinism and the loadability report.

mod common;

use common::*;
use loadability_core::analysis::dissipativity::loadability_row;
use loadability_core::analysis::pv::{initial_drives, operating_point, probe, ProbeOptions};
use loadability_core::analysis::Stability;
use loadability_core::components::{PqSourceParams, RlLoadParams};
use loadability_core::linalg::inf_norm;
use loadability_core::sim::{integrate, Event, EventKind, Record, Schedule, SimConfig, Trace};
use loadability_core::CompositeSystem;

fn run(sys: &CompositeSystem, t_end: f64) -> (Trace, Vec<Record>) {
    let op = operating_point(sys, None).unwrap();
    let machine = sys.reference_component().unwrap();
    let events = vec![Event::exciter_probe(0.05, machine, 0.01)];
    let schedule = Schedule::new(sys, op.drives.clone(), events, t_end).unwrap();
    let cfg = SimConfig {
        t_end,
        stride: 10,
        ..SimConfig::default()
    };
    let trace = integrate(sys, &cfg, &schedule, &op.x).unwrap();
    let mut ws = sys.workspace();
    let records = (0..trace.len())
        .map(|k| trace.record(sys, &mut ws, k).unwrap())
        .collect();
    (trace, records)
}

fn worst_tellegen(records: &[Record]) -> f64 {
    records
        .iter()
        .map(|r| r.tellegen.relative())
        .fold(0.0, f64::max)
}

fn source() -> PqSourceParams {
    PqSourceParams {
        p0: 0.0,
        q0: -0.1,
        tau_p: 0.01,
        tau_q: 0.01,
        enable_time: 0.2,
    }
}

#[test]
fn tellegen_sums_vanish_radial() {
    let (trace, records) = run(&fig1(0.1, 1.0), 0.5);
    assert!(trace.diverged.is_none());
    assert!(worst_tellegen(&records) < 1e-8);
}

#[test]
fn tellegen_sums_vanish_with_source() {
    let sys = radial(
        machine_params(),
        line(0.15),
        RlLoadParams { r: 0.8, x: 0.1 },
        Some(source()),
    );
    let (_, records) = run(&sys, 0.5);
    assert!(worst_tellegen(&records) < 1e-8);
}

#[test]
fn tellegen_sums_vanish_two_machine() {
    let (_, records) = run(&two_machine(3.0), 0.3);
    assert!(worst_tellegen(&records) < 1e-8);
}

#[test]
fn operating_point_is_stationary() {
    let sys = fig1(0.15, 0.7);
    let op = operating_point(&sys, None).unwrap();
    let mut ws = sys.workspace();
    let mut dx = vec![0.0; sys.dim()];
    sys.rhs(0.0, &op.x, &op.drives, &mut ws, &mut dx);
    assert!(inf_norm(&dx) < 1e-9, "{}", inf_norm(&dx));
    assert_eq!(op.drives.len(), initial_drives(&sys).len());
}

#[test]
fn runs_are_bit_identical() {
    let sys = fig1(0.1, 1.0);
    let (a, _) = run(&sys, 0.2);
    let (b, _) = run(&sys, 0.2);
    assert_eq!(a.x, b.x);
    assert_eq!(a.t, b.t);
}

#[test]
fn load_step_is_undone_after_its_duration() {
    let sys = fig1(0.1, 1.0);
    let op = operating_point(&sys, None).unwrap();
    let ev = Event {
        time: 0.02,
        component: 2,
        kind: EventKind::LoadStep,
        magnitude: 0.2,
        duration: Some(0.05),
    };
    let schedule = Schedule::new(&sys, op.drives.clone(), vec![ev], 0.2).unwrap();
    assert_eq!(schedule.drives_at(0.0), op.drives);
    assert!((schedule.drives_at(0.03)[2].r_scale - 1.2).abs() < 1e-15);
    assert_eq!(schedule.drives_at(0.1), op.drives);
}

#[test]
fn bound_margin_is_supply_minus_boundary_storage_rate() {
    let sys = fig1(0.15, 0.8);
    let (_, records) = run(&sys, 0.5);
    for rec in &records {
        let row = loadability_row(&sys, rec).unwrap();
        let direct = row.supply_rate - row.storage_rate_boundary;
        let scale = row.lhs.abs().max(row.rhs.abs()).max(1.0);
        assert!(
            (row.margin - direct).abs() <= 1e-12 * scale,
            "t={} {} vs {direct}",
            row.t,
            row.margin
        );
    }
}

#[test]
fn light_load_probe_is_stable() {
    let sys = fig1(0.1, 2.0);
    let op = operating_point(&sys, None).unwrap();
    let out = probe(&sys, &op, &ProbeOptions::default()).unwrap();
    assert_eq!(out.stability, Stability::Stable);
}
