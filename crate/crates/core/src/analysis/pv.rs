//! PV-curve sweeps: operating points along a load-resistance grid, probe
//! runs and the maximum-power point.

use alloc::vec;
use alloc::vec::Vec;

use super::stability::{classify_stability, Stability, StabilityCriterion};
use crate::component::{Drive, Role};
use crate::network::CompositeSystem;
use crate::sim::{
    find_equilibrium, integrate, EquilibriumOptions, Event, EventKind, Schedule, SimConfig, Trace,
};
use crate::{Error, Result};

/// Which side of the nose a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Load voltage at or above the voltage at maximum power.
    High,
    /// Load voltage below it.
    Low,
}

impl Branch {
    /// `high` or `low`.
    pub fn label(self) -> &'static str {
        match self {
            Self::High => "high",
            Self::Low => "low",
        }
    }
}

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvPoint {
    /// Load resistance, p.u.
    pub r: f64,
    /// Load voltage magnitude, p.u.
    pub v: f64,
    /// Load power, p.u.
    pub p: f64,
    /// Whether an operating point was found.
    pub feasible: bool,
    /// Probe-run verdict.
    pub stability: Stability,
    /// Whether the probe run diverged.
    pub diverged: bool,
    /// Branch, once labelled.
    pub branch: Option<Branch>,
}

impl PvPoint {
    fn infeasible(r: f64) -> Self {
        Self {
            r,
            v: f64::NAN,
            p: f64::NAN,
            feasible: false,
            stability: Stability::Inconclusive,
            diverged: false,
            branch: None,
        }
    }

    /// Feasible and classified stable.
    pub fn is_stable(&self) -> bool {
        self.feasible && self.stability == Stability::Stable
    }
}

/// Label branches by comparing each voltage with the voltage at the
/// largest sampled power.
pub fn label_branches(points: &mut [PvPoint]) {
    let nose = points
        .iter()
        .filter(|p| p.feasible)
        .fold(None::<&PvPoint>, |m, p| match m {
            Some(q) if q.p >= p.p => Some(q),
            _ => Some(p),
        })
        .map(|p| p.v);
    let Some(v_nose) = nose else { return };
    for p in points.iter_mut().filter(|p| p.feasible) {
        p.branch = Some(if p.v >= v_nose {
            Branch::High
        } else {
            Branch::Low
        });
    }
}

/// Interpolated maximum-power point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxPower {
    /// Power, p.u.
    pub p: f64,
    /// Voltage, p.u.
    pub v: f64,
}

/// Vertex of the parabola `p(v)` through the three highest-power stable
/// samples; the best sample itself when the fit is degenerate or the vertex
/// falls outside the three voltages.
pub fn max_power(points: &[PvPoint]) -> Option<MaxPower> {
    let mut s: Vec<&PvPoint> = points.iter().filter(|p| p.is_stable()).collect();
    s.sort_by(|a, b| b.p.total_cmp(&a.p));
    let best = MaxPower {
        p: s.first()?.p,
        v: s.first()?.v,
    };
    if s.len() < 3 {
        return Some(best);
    }
    let mut t = [s[0], s[1], s[2]];
    t.sort_by(|a, b| a.v.total_cmp(&b.v));
    let (x0, x1, x2) = (t[0].v, t[1].v, t[2].v);
    let (y0, y1, y2) = (t[0].p, t[1].p, t[2].p);
    if !(x1 - x0 > 1e-12 && x2 - x1 > 1e-12) {
        return Some(best);
    }
    // divided differences
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < 0.0) {
        return Some(best);
    }
    let b = d01 - a * (x0 + x1);
    let v = -b / (2.0 * a);
    if v < x0 || v > x2 {
        return Some(best);
    }
    let p = y0 + d01 * (v - x0) + a * (v - x0) * (v - x1);
    Some(MaxPower {
        p: p.max(best.p),
        v,
    })
}

/// Load voltage magnitude and power at a state.
pub fn load_point(sys: &CompositeSystem, x: &[f64], drives: &[Drive], load: usize) -> (f64, f64) {
    let mut ws = sys.workspace();
    let ev = sys.evaluate(0.0, x, drives, &mut ws);
    let port = &ev.ports[sys.port_range(load).start];
    (port.e.norm(), port.power())
}

/// Drives at the start of a run: sources with a later enable time are off.
pub fn initial_drives(sys: &CompositeSystem) -> Vec<Drive> {
    let mut d = sys.default_drives();
    for (c, comp) in sys.components().iter().enumerate() {
        if comp.enable_time().is_some_and(|t| t > 0.0) {
            d[c].enabled = false;
        }
    }
    d
}

/// An operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct Operating {
    /// State.
    pub x: Vec<f64>,
    /// Drives, including the solved power adjustment.
    pub drives: Vec<Drive>,
}

impl Operating {
    fn adjust(&self, sys: &CompositeSystem) -> f64 {
        sys.reference_component()
            .map_or(0.0, |r| self.drives[r].power_adjust)
    }
}

/// Solve the starting operating point, warm-started from `prev` if given.
pub fn operating_point(sys: &CompositeSystem, prev: Option<&Operating>) -> Result<Operating> {
    let drives = initial_drives(sys);
    let guess = prev
        .filter(|p| p.x.len() == sys.dim())
        .map(|p| (p.x.as_slice(), p.adjust(sys)));
    let opts = EquilibriumOptions::default();
    let (x, drives) = match find_equilibrium(sys, &drives, guess, &opts) {
        Ok(v) => v,
        Err(_) if guess.is_some() => find_equilibrium(sys, &drives, None, &opts)?,
        Err(e) => return Err(e),
    };
    Ok(Operating { x, drives })
}

/// Settings of a probe run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Simulation settings; `t_end` is the whole run.
    pub sim: SimConfig,
    /// Probe start, s.
    pub probe_time: f64,
    /// Relative exciter reference step.
    pub magnitude: f64,
    /// Probe length, s.
    pub duration: f64,
    /// Classifier thresholds.
    pub criterion: StabilityCriterion,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            sim: SimConfig {
                t_end: 4.0,
                stride: 20,
                ..SimConfig::default()
            },
            probe_time: 0.05,
            magnitude: 0.01,
            duration: 0.1,
            criterion: StabilityCriterion::default(),
        }
    }
}

/// Result of a probe run.
#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    /// Verdict.
    pub stability: Stability,
    /// Trajectory.
    pub trace: Trace,
    /// Operating point the run is judged against.
    pub reference: Operating,
}

/// Disturb the reference machine's exciter from `start` and classify.
///
/// When a source switches on during the run, the operating point with the
/// source on becomes the reference and the reference machine is
/// redispatched to it at the switching instant, so droop does not leave a
/// frequency offset that would mask a return.
pub fn probe(
    sys: &CompositeSystem,
    start: &Operating,
    opts: &ProbeOptions,
) -> Result<ProbeOutcome> {
    let machine = sys
        .reference_component()
        .ok_or_else(|| Error::Invalid("probe needs a machine".into()))?;
    let t_end = opts.sim.t_end;
    let mut events = vec![Event {
        duration: Some(opts.duration),
        ..Event::exciter_probe(opts.probe_time, machine, opts.magnitude)
    }];
    let schedule = Schedule::new(sys, start.drives.clone(), events.clone(), t_end)?;
    let mut final_drives = schedule.drives_at(t_end);
    final_drives[machine].power_adjust = start.drives[machine].power_adjust;
    let mut settle = opts.probe_time + opts.duration;
    let reference = if final_drives == start.drives {
        start.clone()
    } else {
        let eq = EquilibriumOptions::default();
        let warm = Some((start.x.as_slice(), start.drives[machine].power_adjust));
        let (x, drives) = find_equilibrium(sys, &final_drives, warm, &eq)
            .or_else(|_| find_equilibrium(sys, &final_drives, None, &eq))?;
        let switch = schedule
            .events()
            .iter()
            .filter(|e| e.kind == EventKind::EnableSource)
            .map(|e| e.time)
            .fold(opts.probe_time, f64::max);
        settle = settle.max(switch);
        events.push(Event {
            time: switch,
            component: machine,
            kind: EventKind::Redispatch,
            magnitude: drives[machine].power_adjust,
            duration: None,
        });
        Operating { x, drives }
    };
    let schedule = Schedule::new(sys, start.drives.clone(), events, t_end)?;
    let trace = integrate(sys, &opts.sim, &schedule, &start.x)?;
    let stability = classify_stability(sys, &trace, settle, &reference.x, &opts.criterion).verdict;
    Ok(ProbeOutcome {
        stability,
        trace,
        reference,
    })
}

/// PV point from an operating point and its probe verdict.
pub fn point(
    sys: &CompositeSystem,
    r: f64,
    op: &Operating,
    load: usize,
    outcome: Option<&ProbeOutcome>,
) -> PvPoint {
    let (v, p) = load_point(sys, &op.x, &op.drives, load);
    PvPoint {
        r,
        v,
        p,
        feasible: true,
        stability: outcome.map_or(Stability::Inconclusive, |o| o.stability),
        diverged: outcome.is_some_and(|o| o.trace.diverged.is_some()),
        branch: None,
    }
}

/// Operating points along the grid, each warm-started from the previous
/// feasible one.
pub fn continuation<F>(build: F, rs: &[f64]) -> Vec<(f64, Result<(CompositeSystem, Operating)>)>
where
    F: Fn(f64) -> Result<CompositeSystem>,
{
    let mut prev: Option<Operating> = None;
    rs.iter()
        .map(|&r| {
            let res = build(r).and_then(|sys| {
                let op = operating_point(&sys, prev.as_ref())?;
                Ok((sys, op))
            });
            if let Ok((_, op)) = &res {
                prev = Some(op.clone());
            }
            (r, res)
        })
        .collect()
}

/// Index of the load component (the first one).
pub fn load_index(sys: &CompositeSystem) -> Option<usize> {
    sys.components().iter().position(|c| c.role() == Role::Load)
}

/// Sequential sweep: continuation, a probe run per point, branch labels.
pub fn pv_sweep<F>(build: F, rs: &[f64], opts: &ProbeOptions) -> Result<Vec<PvPoint>>
where
    F: Fn(f64) -> Result<CompositeSystem>,
{
    if rs.is_empty() {
        return Err(Error::Invalid("empty resistance grid".into()));
    }
    let mut out: Vec<PvPoint> = continuation(build, rs)
        .into_iter()
        .map(|(r, res)| match res {
            Ok((sys, op)) => {
                let Some(load) = load_index(&sys) else {
                    return PvPoint::infeasible(r);
                };
                let outcome = probe(&sys, &op, opts).ok();
                point(&sys, r, &op, load, outcome.as_ref())
            }
            Err(_) => PvPoint::infeasible(r),
        })
        .collect();
    label_branches(&mut out);
    Ok(out)
}

/// Point for a grid value whose operating point could not be found.
pub fn infeasible_point(r: f64) -> PvPoint {
    PvPoint::infeasible(r)
}
