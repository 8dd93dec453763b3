//! Classifier verdicts on synthetic trajectories around a real operating
//! point.

mod common;

use common::fig1;
use loadability_core::analysis::pv::operating_point;
use loadability_core::analysis::stability::{classify_stability, StabilityCriterion};
use loadability_core::analysis::Stability;
use loadability_core::sim::Trace;
use loadability_core::CompositeSystem;

/// Reference state plus `amp·e^{σt}·sin(2πt/period)` on the load current.
fn synthetic(
    sys: &CompositeSystem,
    reference: &[f64],
    amp: f64,
    sigma: f64,
    period: f64,
    t_end: f64,
) -> Trace {
    let load = sys.state_range(2).start;
    let dt = 1e-3;
    let n = (t_end / dt) as usize + 1;
    let mut t = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n * reference.len());
    for k in 0..n {
        let tk = k as f64 * dt;
        let mut s = reference.to_vec();
        s[load] += amp * (sigma * tk).exp() * (std::f64::consts::TAU * tk / period).sin();
        t.push(tk);
        x.extend(s);
    }
    Trace {
        t,
        x,
        dim: reference.len(),
        drive_index: vec![0; n],
        drive_sets: vec![sys.default_drives()],
        diverged: None,
    }
}

fn verdict(amp: f64, sigma: f64, period: f64, t_end: f64) -> Stability {
    let sys = fig1(0.1, 1.0);
    let op = operating_point(&sys, None).unwrap();
    let tr = synthetic(&sys, &op.x, amp, sigma, period, t_end);
    classify_stability(&sys, &tr, 0.0, &op.x, &StabilityCriterion::default()).verdict
}

#[test]
fn decayed_oscillation_is_stable() {
    assert_eq!(verdict(0.05, -3.0, 0.5, 4.0), Stability::Stable);
}

#[test]
fn growing_oscillation_is_unstable() {
    assert_eq!(verdict(1e-4, 1.0, 0.5, 4.0), Stability::Unstable);
}

#[test]
fn sustained_oscillation_over_many_periods_is_unstable() {
    assert_eq!(verdict(0.01, 0.0, 0.1, 4.0), Stability::Unstable);
}

#[test]
fn slow_decay_in_short_window_is_inconclusive() {
    // decaying, still outside the band, and only a few periods observed
    assert_eq!(verdict(0.05, -0.2, 1.0, 4.0), Stability::Inconclusive);
}

#[test]
fn diverged_run_is_unstable() {
    let sys = fig1(0.1, 1.0);
    let op = operating_point(&sys, None).unwrap();
    let mut tr = synthetic(&sys, &op.x, 0.0, 0.0, 1.0, 0.1);
    tr.diverged = Some(0.1);
    assert_eq!(
        classify_stability(&sys, &tr, 0.0, &op.x, &StabilityCriterion::default()).verdict,
        Stability::Unstable
    );
}

#[test]
fn rotation_of_whole_state_is_ignored() {
    let sys = fig1(0.1, 1.0);
    let op = operating_point(&sys, None).unwrap();
    let mut tr = synthetic(&sys, &op.x, 0.0, 0.0, 1.0, 1.0);
    for k in 0..tr.len() {
        let mut s = tr.state(k).to_vec();
        for c in 0..sys.components().len() {
            let r = sys.state_range(c);
            sys.components()[c].rotate(&mut s[r], 0.3);
        }
        tr.x[k * tr.dim..(k + 1) * tr.dim].copy_from_slice(&s);
    }
    assert_eq!(
        classify_stability(&sys, &tr, 0.0, &op.x, &StabilityCriterion::default()).verdict,
        Stability::Stable
    );
}
