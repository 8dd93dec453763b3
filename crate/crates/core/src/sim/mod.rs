//! Time integration of assembled networks with scheduled events.

mod equilibrium;
mod events;
mod integrator;

use alloc::vec;
use alloc::vec::Vec;

pub use equilibrium::{find_equilibrium, EquilibriumOptions};
pub use events::{Event, EventKind, Schedule};
pub use integrator::{Ode, Rk4, Rk45};

use crate::component::{Component, Ctx, Drive};
use crate::energy::{self, EnergySnapshot, TellegenReport};
use crate::linalg::inf_norm;
use crate::network::{CompositeSystem, Evaluation, Workspace};
use crate::port::{PortVariables, C64};
use crate::{Error, Result};

/// Default fixed step, s.
pub const DEFAULT_STEP: f64 = 50e-6;
/// State magnitude treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e3;

/// Integration method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Fixed-step classic RK4.
    Rk4,
    /// Adaptive Dormand–Prince between record points.
    Rk45 {
        /// Relative tolerance.
        rtol: f64,
        /// Absolute tolerance.
        atol: f64,
    },
}

/// Run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// End time, s.
    pub t_end: f64,
    /// Step (RK4) or record spacing (RK45), s.
    pub step: f64,
    /// Method.
    pub method: Method,
    /// Record every `stride` steps.
    pub stride: usize,
    /// Divergence threshold on `‖x‖∞`.
    pub divergence_limit: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            step: DEFAULT_STEP,
            method: Method::Rk4,
            stride: 1,
            divergence_limit: DIVERGENCE_LIMIT,
        }
    }
}

impl SimConfig {
    /// Reject unusable settings.
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param("sim.step", "must be > 0"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::param("sim.t_end", "must be > 0"));
        }
        if self.stride == 0 {
            return Err(Error::param("sim.stride", "must be ≥ 1"));
        }
        if let Method::Rk45 { rtol, atol } = self.method {
            if !(rtol > 0.0 && atol > 0.0) {
                return Err(Error::param("sim.tolerance", "must be > 0"));
            }
        }
        Ok(())
    }

    /// Whether the step resolves the fastest nominal time constant tenfold.
    pub fn resolves(&self, sys: &CompositeSystem) -> bool {
        let tau_min = sys
            .components()
            .iter()
            .map(|c| c.nominal_tau(sys.omega_b()))
            .fold(f64::INFINITY, f64::min);
        self.step <= tau_min / 10.0
    }
}

/// Network right-hand side with fixed drives.
#[derive(Debug)]
pub struct NetworkOde<'a> {
    sys: &'a CompositeSystem,
    /// Drives in effect.
    pub drives: Vec<Drive>,
    ws: Workspace,
}

impl<'a> NetworkOde<'a> {
    /// Wrap a system.
    pub fn new(sys: &'a CompositeSystem, drives: Vec<Drive>) -> Self {
        Self {
            sys,
            drives,
            ws: sys.workspace(),
        }
    }
}

impl Ode for NetworkOde<'_> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn eval(&mut self, t: f64, x: &[f64], dx: &mut [f64]) {
        self.sys.rhs(t, x, &self.drives, &mut self.ws, dx);
    }
}

/// Recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Sample times, s.
    pub t: Vec<f64>,
    /// States, row-major `t.len() × dim`.
    pub x: Vec<f64>,
    /// State dimension.
    pub dim: usize,
    /// Index into `drive_sets` per sample.
    pub drive_index: Vec<usize>,
    /// Distinct drive sets used over the run.
    pub drive_sets: Vec<Vec<Drive>>,
    /// Time at which the run was aborted, if it diverged.
    pub diverged: Option<f64>,
}

/// Everything derived from one trace sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// Network evaluation (derivative, ports, bus voltages).
    pub eval: Evaluation,
    /// Per-component energy quantities.
    pub energy: Vec<EnergySnapshot>,
    /// Tellegen sums.
    pub tellegen: TellegenReport,
}

impl Trace {
    fn new(dim: usize) -> Self {
        Self {
            t: Vec::new(),
            x: Vec::new(),
            dim,
            drive_index: Vec::new(),
            drive_sets: Vec::new(),
            diverged: None,
        }
    }

    fn push(&mut self, t: f64, x: &[f64], set: usize) {
        self.t.push(t);
        self.x.extend_from_slice(x);
        self.drive_index.push(set);
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.t.len()
    }

    /// Whether no sample was recorded.
    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// State at sample `k`.
    pub fn state(&self, k: usize) -> &[f64] {
        &self.x[k * self.dim..(k + 1) * self.dim]
    }

    /// Drives at sample `k`.
    pub fn drives(&self, k: usize) -> &[Drive] {
        &self.drive_sets[self.drive_index[k]]
    }

    /// Last state.
    pub fn last(&self) -> Option<&[f64]> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }

    /// Evaluate ports, energies and Tellegen sums at sample `k`.
    pub fn record(&self, sys: &CompositeSystem, ws: &mut Workspace, k: usize) -> Result<Record> {
        let x = self.state(k);
        let drives = self.drives(k);
        let eval = sys.evaluate(self.t[k], x, drives, ws);
        let energy = energy::network_snapshots(sys, x, &eval, drives)?;
        let tellegen = energy::tellegen(self.t[k], &eval.ports);
        Ok(Record {
            eval,
            energy,
            tellegen,
        })
    }

    /// One state column.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.x[k * self.dim + i]).collect()
    }
}

/// Integrate `sys` from `x0` at `t = 0` under a schedule.
///
/// Steps are split so every drive change lands on a step boundary. A state
/// that leaves the divergence bound or turns NaN stops the run; the trace up
/// to that point is kept and [`Trace::diverged`] set.
pub fn integrate(
    sys: &CompositeSystem,
    cfg: &SimConfig,
    schedule: &Schedule,
    x0: &[f64],
) -> Result<Trace> {
    cfg.validate()?;
    let n = sys.dim();
    if x0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    let mut trace = Trace::new(n);
    let mut x = x0.to_vec();
    let mut bounds = schedule.breakpoints(0.0, cfg.t_end);
    bounds.push(cfg.t_end);
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut rk4 = Rk4::new(n);
    let mut rk45 = match cfg.method {
        Method::Rk45 { rtol, atol } => Some(Rk45::new(n, rtol, atol)),
        Method::Rk4 => None,
    };
    let mut h_adapt = cfg.step;
    let mut ode = NetworkOde::new(sys, schedule.drives_at(0.0));
    trace.drive_sets.push(ode.drives.clone());
    trace.push(0.0, &x, 0);
    'segments: for &seg_end in &bounds {
        let drives = schedule.drives_at(t);
        if drives != ode.drives {
            ode.drives = drives;
        }
        if trace.drive_sets.last() != Some(&ode.drives) {
            trace.drive_sets.push(ode.drives.clone());
        }
        let set = trace.drive_sets.len() - 1;
        while t < seg_end {
            let remaining = seg_end - t;
            // absorb a sliver left by rounding into the last step
            let h = if remaining < cfg.step * (1.0 + 1e-9) {
                remaining
            } else {
                cfg.step
            };
            let t_next = if h == remaining { seg_end } else { t + h };
            match rk45.as_mut() {
                None => rk4.step(&mut ode, t, h, &mut x),
                Some(st) => match st.advance(&mut ode, t, t_next, &mut x, h_adapt) {
                    Ok(hl) => h_adapt = hl,
                    Err(_) => {
                        trace.diverged = Some(t);
                        break 'segments;
                    }
                },
            }
            t = t_next;
            steps += 1;
            let norm = inf_norm(&x);
            if norm > cfg.divergence_limit {
                trace.diverged = Some(t);
                if norm.is_finite() {
                    trace.push(t, &x, set);
                }
                break 'segments;
            }
            if steps.is_multiple_of(cfg.stride) || t >= cfg.t_end {
                trace.push(t, &x, set);
            }
        }
    }
    Ok(trace)
}

/// A single component with prescribed port voltages, for checking
/// component-level identities outside a network.
pub struct Driven<'a, F> {
    comp: &'a dyn Component,
    source: F,
    /// Context passed to the component (its `t` is overwritten).
    pub ctx: Ctx,
    e: Vec<C64>,
    de: Vec<C64>,
}

impl<'a, F: FnMut(f64, &mut [C64], &mut [C64])> Driven<'a, F> {
    /// `source(t, e, de)` fills the port voltages and their rates.
    pub fn new(comp: &'a dyn Component, ctx: Ctx, source: F) -> Self {
        let np = comp.n_ports();
        Self {
            comp,
            source,
            ctx,
            e: vec![C64::default(); np],
            de: vec![C64::default(); np],
        }
    }

    /// Port records and the state derivative at `(t, x)`.
    pub fn ports(&mut self, t: f64, x: &[f64]) -> (Vec<PortVariables>, Vec<f64>) {
        let np = self.comp.n_ports();
        (self.source)(t, &mut self.e, &mut self.de);
        self.ctx.t = t;
        let mut dx = vec![0.0; x.len()];
        self.comp
            .derivative(x, &self.e, &self.de, &self.ctx, &mut dx);
        let mut f = vec![C64::default(); np];
        let mut df = vec![C64::default(); np];
        self.comp.flows(x, &self.e, &self.ctx, &mut f);
        self.comp
            .flow_rates(x, &dx, &self.e, &self.de, &self.ctx, &mut df);
        let pv = (0..np)
            .map(|p| PortVariables::new(self.e[p], f[p], self.de[p], df[p]))
            .collect();
        (pv, dx)
    }

    /// Energy snapshot at `(t, x)`.
    pub fn snapshot(&mut self, t: f64, x: &[f64]) -> Result<EnergySnapshot> {
        let (pv, dx) = self.ports(t, x);
        energy::snapshot(self.comp, t, x, &dx, &pv, &self.ctx)
    }
}

impl<F: FnMut(f64, &mut [C64], &mut [C64])> Ode for Driven<'_, F> {
    fn dim(&self) -> usize {
        self.comp.state_dim()
    }

    fn eval(&mut self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.source)(t, &mut self.e, &mut self.de);
        self.ctx.t = t;
        self.comp.derivative(x, &self.e, &self.de, &self.ctx, dx);
    }
}

impl<F> core::fmt::Debug for Driven<'_, F> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Driven")
            .field("comp", &self.comp)
            .field("ctx", &self.ctx)
            .finish()
    }
}
