//! Experiment runners behind the subcommands.

use anyhow::{anyhow, Context};
use loadability_core::analysis::dissipativity::{
    loadability_delta_bound, loadability_row, BoundaryDelta, LoadabilityRow,
};
use loadability_core::analysis::pv::{
    continuation, operating_point, point, probe, Operating, ProbeOptions,
};
use loadability_core::analysis::spectrum::in_band_fraction;
use loadability_core::analysis::{
    label_branches, max_power, MaxPower, PvPoint, StabilityCriterion,
};
use loadability_core::component::Role;
use loadability_core::sim::{integrate, EventKind, Record, Schedule, SimConfig, Trace};
use loadability_core::CompositeSystem;
use rayon::prelude::*;

use crate::scenario::{ComponentParams, Scenario, SweepSpec, ValidationError};
use crate::spectra::power_spectrum;

/// Command-line overrides shared by all experiments.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Integration step, s.
    pub step: Option<f64>,
    /// End time, s.
    pub t_end: Option<f64>,
    /// Disturbance size; its meaning depends on the experiment.
    pub disturbance_mag: Option<f64>,
}

fn invalid(scn: &Scenario, msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(ValidationError {
        path: scn.path.clone(),
        line: None,
        message: msg.into(),
    })
}

fn sim_config(scn: &Scenario, base: SimConfig, ov: &Overrides) -> anyhow::Result<SimConfig> {
    let cfg = SimConfig {
        step: ov.step.unwrap_or(base.step),
        t_end: ov.t_end.unwrap_or(base.t_end),
        ..base
    };
    cfg.validate().map_err(|e| invalid(scn, e.to_string()))?;
    Ok(cfg)
}

/// A plain run and everything recorded along it.
#[derive(Debug)]
pub struct RunResult {
    /// Assembled network.
    pub sys: CompositeSystem,
    /// Trajectory; possibly cut short by divergence.
    pub trace: Trace,
    /// Energy quantities at each recorded instant.
    pub records: Vec<Record>,
    /// Loadability report rows.
    pub loadability: Vec<LoadabilityRow>,
}

/// Start at equilibrium, apply the scenario events and integrate.
pub fn run(scn: &Scenario, ov: &Overrides) -> anyhow::Result<RunResult> {
    let sys = scn.system()?;
    let cfg = sim_config(scn, scn.sim, ov)?;
    let op = operating_point(&sys, None).context("operating point")?;
    let mut events = scn.core_events();
    if let Some(m) = ov.disturbance_mag {
        for e in events
            .iter_mut()
            .filter(|e| e.kind != EventKind::Redispatch)
        {
            e.magnitude = m;
        }
    }
    let schedule = Schedule::new(&sys, op.drives.clone(), events, cfg.t_end)
        .map_err(|e| invalid(scn, e.to_string()))?;
    if !cfg.resolves(&sys) {
        log::info!(
            "step {} s does not resolve the fastest time constant tenfold",
            cfg.step
        );
    }
    let trace = integrate(&sys, &cfg, &schedule, &op.x)?;
    if let Some(t) = trace.diverged {
        log::warn!("run diverged at t = {t}");
    }
    let mut ws = sys.workspace();
    let mut records = Vec::with_capacity(trace.len());
    for k in 0..trace.len() {
        match trace.record(&sys, &mut ws, k) {
            Ok(r) => records.push(r),
            // the divergent tail may not evaluate; keep what did
            Err(e) if trace.diverged.is_some() => {
                log::debug!("record {k}: {e}");
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let loadability = records
        .iter()
        .filter_map(|r| loadability_row(&sys, r))
        .collect();
    Ok(RunResult {
        sys,
        trace,
        records,
        loadability,
    })
}

/// Options of a PV sweep.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOptions {
    /// Line reactances; defaults to the scenario's list.
    pub line_x: Option<Vec<f64>>,
    /// Also sweep with the reactive support source.
    pub with_support: bool,
    /// Source active-power time constant, s.
    pub tau_p: Option<f64>,
    /// Source reactive-power time constant, s.
    pub tau_q: Option<f64>,
    /// Reactive power supplied by the source, p.u.
    pub q_setpoint: Option<f64>,
    /// Shared overrides; the disturbance is the probe magnitude.
    pub overrides: Overrides,
}

/// One PV curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// Line reactance, p.u.
    pub line_x: f64,
    /// Whether the support source was connected.
    pub support: bool,
    /// Points in grid order.
    pub points: Vec<PvPoint>,
    /// Interpolated maximum stable power.
    pub max: Option<MaxPower>,
}

/// One row of the maximum-power comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    /// Line reactance, p.u.
    pub line_x: f64,
    /// Maximum without support.
    pub without: Option<MaxPower>,
    /// Maximum with support.
    pub with: Option<MaxPower>,
    /// Predicted increase from the support source's own reactive rate.
    pub estimate_support: f64,
    /// Predicted increase from all boundary components.
    pub estimate_all: f64,
}

impl SummaryRow {
    /// Observed increase.
    pub fn increase(&self) -> Option<f64> {
        Some(self.with?.p - self.without?.p)
    }
}

/// Result of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Curves, ordered by reactance then support.
    pub curves: Vec<Curve>,
    /// Comparison rows when support was swept.
    pub summary: Vec<SummaryRow>,
}

fn set_line_x(scn: &mut Scenario, line: &str, x: f64) {
    if let Some(ComponentParams::Line(p)) = scn.def_mut(line).map(|d| &mut d.params) {
        p.x = x;
    }
}

fn set_load_r(scn: &mut Scenario, load: &str, r: f64) {
    if let Some(ComponentParams::Load(p)) = scn.def_mut(load).map(|d| &mut d.params) {
        p.r = r;
    }
}

fn probe_options(scn: &Scenario, spec: &SweepSpec, ov: &Overrides) -> anyhow::Result<ProbeOptions> {
    let base = SimConfig {
        t_end: spec.t_end,
        stride: spec.stride,
        ..scn.sim
    };
    Ok(ProbeOptions {
        sim: sim_config(scn, base, ov)?,
        probe_time: spec.probe_time,
        magnitude: ov.disturbance_mag.unwrap_or(spec.probe_magnitude),
        duration: spec.probe_duration,
        criterion: StabilityCriterion {
            eps: spec.eps,
            min_periods: spec.min_periods,
            ..StabilityCriterion::default()
        },
    })
}

/// Sweep one curve: continuation for the operating points, probe runs in
/// parallel.
pub fn curve(scn: &Scenario, spec: &SweepSpec, opts: &ProbeOptions) -> Vec<PvPoint> {
    let build = |r: f64| {
        let mut s = scn.clone();
        set_load_r(&mut s, &spec.load, r);
        s.system()
            .map_err(|e| loadability_core::Error::Invalid(e.to_string()))
    };
    let load = scn
        .components
        .iter()
        .position(|c| c.name == spec.load)
        .unwrap_or(0);
    let mut points: Vec<PvPoint> = continuation(build, &spec.r)
        .into_par_iter()
        .map(|(r, res)| match res {
            Ok((sys, op)) => {
                let outcome = probe(&sys, &op, opts);
                if let Err(e) = &outcome {
                    log::warn!("probe at r = {r}: {e}");
                }
                let p = point(&sys, r, &op, load, outcome.as_ref().ok());
                log::debug!(
                    "r = {r}: v = {:.4}, p = {:.4}, {}",
                    p.v,
                    p.p,
                    p.stability.label()
                );
                p
            }
            Err(e) => {
                log::info!("no operating point at r = {r}: {e}");
                loadability_core::analysis::pv::infeasible_point(r)
            }
        })
        .collect();
    label_branches(&mut points);
    points
}

/// The scenario without and with the support source, after overrides.
pub fn variants(
    scn: &Scenario,
    opts: &SweepOptions,
) -> anyhow::Result<(Scenario, Option<Scenario>)> {
    let Some((support, _)) = &scn.support else {
        if opts.with_support {
            return Err(invalid(scn, "--with-q-support needs a [support] section"));
        }
        return Ok((scn.clone(), None));
    };
    let mut without = scn.clone();
    without.remove(&support.source);
    if !(opts.with_support || support.enabled) {
        return Ok((without, None));
    }
    let mut with = scn.clone();
    if let Some(ComponentParams::Source(p)) = with.def_mut(&support.source).map(|d| &mut d.params) {
        if let Some(t) = opts.tau_p {
            p.tau_p = t;
        }
        if let Some(t) = opts.tau_q {
            p.tau_q = t;
        }
        if let Some(q) = opts.q_setpoint {
            p.q0 = -q;
        }
        if !(p.tau_p > 0.0 && p.tau_q > 0.0 && p.q0.is_finite()) {
            return Err(invalid(scn, "source time constants must be > 0"));
        }
    }
    Ok((without, Some(with)))
}

/// Run every requested curve and, with support, the comparison table.
pub fn pv_sweep(scn: &Scenario, opts: &SweepOptions) -> anyhow::Result<SweepResult> {
    let (spec, _) = scn
        .sweep
        .clone()
        .ok_or_else(|| invalid(scn, "scenario has no [sweep] section"))?;
    let xs = match &opts.line_x {
        Some(v) => v.clone(),
        None if !spec.line_x.is_empty() => spec.line_x.clone(),
        None => match scn.def(&spec.line).map(|d| d.params) {
            Some(ComponentParams::Line(p)) => vec![p.x],
            _ => return Err(invalid(scn, "sweep line missing")),
        },
    };
    if xs.is_empty() || xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(invalid(
            scn,
            "line reactances must be a non-empty list of values > 0",
        ));
    }
    let popts = probe_options(scn, &spec, &opts.overrides)?;
    let (without, with) = variants(scn, opts)?;

    let mut jobs: Vec<(f64, bool, Scenario)> = Vec::new();
    for &x in &xs {
        for (support, base) in [(false, Some(&without)), (true, with.as_ref())] {
            if let Some(b) = base {
                let mut s = b.clone();
                set_line_x(&mut s, &spec.line, x);
                jobs.push((x, support, s));
            }
        }
    }
    let curves: Vec<Curve> = jobs
        .into_par_iter()
        .map(|(line_x, support, s)| {
            let points = curve(&s, &spec, &popts);
            let max = max_power(&points);
            Curve {
                line_x,
                support,
                points,
                max,
            }
        })
        .collect();

    let mut summary = Vec::new();
    if let (Some(with), Some((sup, _))) = (&with, &scn.support) {
        for &x in &xs {
            let find = |s: bool| curves.iter().find(|c| c.line_x == x && c.support == s);
            let (Some(a), Some(b)) = (find(false), find(true)) else {
                continue;
            };
            let (estimate_support, estimate_all) = match nose_r(&a.points) {
                Some(r) => support_estimate(&without, with, &spec, &sup.source, x, r)
                    .unwrap_or_else(|e| {
                        log::warn!("estimate at x = {x}: {e}");
                        (f64::NAN, f64::NAN)
                    }),
                None => (f64::NAN, f64::NAN),
            };
            summary.push(SummaryRow {
                line_x: x,
                without: a.max,
                with: b.max,
                estimate_support,
                estimate_all,
            });
        }
    }
    Ok(SweepResult { curves, summary })
}

/// Grid resistance of the highest-power stable point.
fn nose_r(points: &[PvPoint]) -> Option<f64> {
    points
        .iter()
        .filter(|p| p.is_stable())
        .max_by(|a, b| a.p.total_cmp(&b.p))
        .map(|p| p.r)
}

/// Per-component `(Ṗ + Q̇)` at an operating point. `Ṗ` is the three-phase
/// rate; `Q̇` comes from the reconstructed phase-a waveforms, expressed per
/// unit of base time (single-phase power pulsates, so its rate is not used).
fn boundary_rates(sys: &CompositeSystem, op: &Operating) -> Vec<(String, f64)> {
    let mut ws = sys.workspace();
    let ev = sys.evaluate(0.0, &op.x, &op.drives, &mut ws);
    let theta = sys.frame_angle(0.0);
    let omega = sys.frame_speed() * sys.omega_b();
    sys.components()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.role() != Role::Line)
        .map(|(c, _)| {
            let v: f64 = ev.ports[sys.port_range(c)]
                .iter()
                .map(|p| {
                    let a = p.phase_a(theta, omega);
                    p.power_rate() / sys.omega_b() + a.qdot() / sys.omega_b()
                })
                .sum();
            (sys.names()[c].clone(), v)
        })
        .collect()
}

/// Predicted increase of the weighted load power from switching the source
/// on at resistance `r`: the source's own term and the all-boundary sum.
pub fn support_estimate(
    without: &Scenario,
    with: &Scenario,
    spec: &SweepSpec,
    source: &str,
    line_x: f64,
    r: f64,
) -> anyhow::Result<(f64, f64)> {
    let prepare = |s: &Scenario| -> anyhow::Result<(CompositeSystem, Operating)> {
        let mut s = s.clone();
        set_line_x(&mut s, &spec.line, line_x);
        set_load_r(&mut s, &spec.load, r);
        if let Some(ComponentParams::Source(p)) = s.def_mut(source).map(|d| &mut d.params) {
            p.enable_time = 0.0;
        }
        let sys = s.system()?;
        let op = operating_point(&sys, None)?;
        Ok((sys, op))
    };
    let (s0, o0) = prepare(without)?;
    let (s1, o1) = prepare(with)?;
    let before = boundary_rates(&s0, &o0);
    let after = boundary_rates(&s1, &o1);
    let deltas: Vec<(String, BoundaryDelta)> = after
        .iter()
        .map(|(name, v)| {
            let old = before
                .iter()
                .find(|(n, _)| n == name)
                .map_or(0.0, |(_, v)| *v);
            (
                name.clone(),
                BoundaryDelta {
                    pdot: 0.0,
                    qdot: v - old,
                },
            )
        })
        .collect();
    let own = deltas
        .iter()
        .find(|(n, _)| n == source)
        .map(|(_, d)| loadability_delta_bound(&[*d]))
        .ok_or_else(|| anyhow!("support source `{source}` not in network"))?;
    let all: Vec<BoundaryDelta> = deltas.iter().map(|(_, d)| *d).collect();
    Ok((own.abs(), loadability_delta_bound(&all).abs()))
}

/// Options of the inertia experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InertiaOptions {
    /// First inertia, s.
    pub j_high: Option<f64>,
    /// Second inertia, s.
    pub j_low: Option<f64>,
    /// Shared overrides; the disturbance is the line-current offset and
    /// `t_end` the analysis window.
    pub overrides: Overrides,
}

/// One run of the inertia experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct InertiaRun {
    /// Inertia, s.
    pub j: f64,
    /// Line power over the analysis window.
    pub signal: Vec<f64>,
    /// Sample spacing, s.
    pub dt: f64,
    /// In-band fraction, direct DFT.
    pub fraction: f64,
    /// In-band fraction from the FFT spectrum.
    pub fraction_fft: f64,
    /// One-sided spectrum.
    pub spectrum: (Vec<f64>, Vec<f64>),
    /// Divergence time, if any.
    pub diverged: Option<f64>,
}

/// Both runs plus the band used.
#[derive(Debug, Clone, PartialEq)]
pub struct InertiaResult {
    /// High- then low-inertia run.
    pub runs: [InertiaRun; 2],
    /// Band centre, Hz.
    pub center: f64,
    /// Band half width, Hz.
    pub half_width: f64,
}

fn inertia_run(scn: &Scenario, j: f64, opts: &InertiaOptions) -> anyhow::Result<InertiaRun> {
    let (spec, _) = scn
        .inertia
        .clone()
        .ok_or_else(|| invalid(scn, "scenario has no [inertia] section"))?;
    let mut s = scn.clone();
    for m in &spec.machines {
        if let Some(ComponentParams::Machine(p)) = s.def_mut(m).map(|d| &mut d.params) {
            p.j = j;
        }
    }
    let sys = s.system()?;
    let window = opts.overrides.t_end.unwrap_or(spec.window);
    let cfg = sim_config(
        scn,
        scn.sim,
        &Overrides {
            t_end: Some(spec.settle + window),
            ..opts.overrides
        },
    )?;
    let op = operating_point(&sys, None).context("operating point")?;
    let line = s
        .components
        .iter()
        .position(|c| c.name == spec.line)
        .unwrap_or(0);
    let mut x0 = op.x.clone();
    x0[sys.state_range(line).start] += opts.overrides.disturbance_mag.unwrap_or(spec.kick);
    let schedule = Schedule::new(&sys, op.drives.clone(), s.core_events(), cfg.t_end)?;
    let trace = integrate(&sys, &cfg, &schedule, &x0)?;
    let port = sys.port_range(line).start;
    let mut ws = sys.workspace();
    let mut signal = Vec::new();
    let mut times = Vec::new();
    for k in 0..trace.len() {
        if trace.t[k] + 1e-12 < spec.settle {
            continue;
        }
        let ev = sys.evaluate(trace.t[k], trace.state(k), trace.drives(k), &mut ws);
        signal.push(ev.ports[port].power());
        times.push(trace.t[k]);
    }
    let dt = if times.len() > 1 {
        (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64
    } else {
        cfg.step
    };
    let center = scn.omega_b() / (2.0 * std::f64::consts::PI);
    let spectrum = power_spectrum(&signal, dt);
    Ok(InertiaRun {
        j,
        fraction: in_band_fraction(&signal, dt, center, spec.band_hz),
        fraction_fft: loadability_core::analysis::spectrum::spectrum_fraction(
            &spectrum.0,
            &spectrum.1,
            center,
            spec.band_hz,
        ),
        signal,
        dt,
        spectrum,
        diverged: trace.diverged,
    })
}

/// Kick the line current under two inertia values and compare how much of
/// the line-power fluctuation stays near the base frequency.
pub fn inertia_demo(scn: &Scenario, opts: &InertiaOptions) -> anyhow::Result<InertiaResult> {
    let (spec, _) = scn
        .inertia
        .clone()
        .ok_or_else(|| invalid(scn, "scenario has no [inertia] section"))?;
    let j_high = opts.j_high.unwrap_or(spec.j_high);
    let j_low = opts.j_low.unwrap_or(spec.j_low);
    if !(j_high > 0.0 && j_low > 0.0) {
        return Err(invalid(scn, "inertia values must be > 0"));
    }
    if j_high == j_low {
        log::warn!("both runs use J = {j_high}; outputs will be identical");
    }
    let (a, b) = rayon::join(
        || inertia_run(scn, j_high, opts),
        || inertia_run(scn, j_low, opts),
    );
    Ok(InertiaResult {
        runs: [a?, b?],
        center: scn.omega_b() / (2.0 * std::f64::consts::PI),
        half_width: spec.band_hz,
    })
}
