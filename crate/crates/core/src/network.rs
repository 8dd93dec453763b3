//! Topology, validation and the assembled network ODE.
//!
//! Bus voltages are not solved for: every bus carries shunt capacitance from
//! at least one line end, and the first such line end owns the voltage as a
//! state. Further line ends on the same bus hold mirror copies that follow
//! the same rate. The bus balance
//!
//! `(C_bus/ω_b) dv/dt = −Σ f_conductive − j w C_bus v`
//!
//! closes Kirchhoff's current law exactly, so port sums of `P`, `Ṗ` and the
//! reactive rate vanish to rounding at every bus.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::component::{pair, Component, Ctx, Drive, Role};
use crate::port::{PortVariables, C64};
use crate::{linalg, Error, Result};

/// Buses and the port-to-bus map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Topology {
    /// Bus names.
    pub buses: Vec<String>,
    /// Per component, per port: the bus it attaches to.
    pub ports: Vec<Vec<Option<usize>>>,
}

impl Topology {
    /// Empty topology with the given bus names.
    pub fn with_buses<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Self {
            buses: names.into_iter().map(Into::into).collect(),
            ports: Vec::new(),
        }
    }

    /// Register the next component's port attachments.
    pub fn attach(&mut self, buses: &[usize]) -> &mut Self {
        self.ports.push(buses.iter().map(|&b| Some(b)).collect());
        self
    }

    /// Index of a bus by name.
    pub fn bus(&self, name: &str) -> Option<usize> {
        self.buses.iter().position(|b| b == name)
    }
}

/// Check a topology against its components. All problems are collected.
pub fn validate(topology: &Topology, components: &[Box<dyn Component>]) -> Result<()> {
    let mut errs = Vec::new();
    if topology.ports.len() != components.len() {
        errs.push(format!(
            "{} components but {} attachment lists",
            components.len(),
            topology.ports.len()
        ));
    }
    let nb = topology.buses.len();
    let mut has_cap = vec![false; nb];
    let mut used = vec![false; nb];
    for (c, comp) in components.iter().enumerate() {
        if let Err(e) = comp.validate() {
            errs.push(format!("component {c}: {e}"));
        }
        let want = if comp.role() == Role::Line { 2 } else { 1 };
        if comp.n_ports() != want {
            errs.push(format!(
                "component {c}: {} must have {want} port(s)",
                comp.role().label()
            ));
        }
        let Some(att) = topology.ports.get(c) else {
            continue;
        };
        if att.len() != comp.n_ports() {
            errs.push(format!(
                "component {c}: {} attachments for {} ports",
                att.len(),
                comp.n_ports()
            ));
        }
        for (p, b) in att.iter().enumerate() {
            match b {
                None => errs.push(format!("dangling port: component {c} port {p}")),
                Some(b) if *b >= nb => errs.push(format!("component {c} port {p}: no bus {b}")),
                Some(b) => {
                    used[*b] = true;
                    if comp.voltage_state(p).is_some() && comp.shunt(p) > 0.0 {
                        has_cap[*b] = true;
                    }
                }
            }
        }
    }
    for b in 0..nb {
        if !used[b] {
            errs.push(format!("bus `{}` has nothing attached", topology.buses[b]));
        } else if !has_cap[b] {
            errs.push(format!("bus `{}` has no capacitance", topology.buses[b]));
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(Error::Topology(errs))
    }
}

/// Scratch buffers for one evaluation thread.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    e: Vec<C64>,
    de: Vec<C64>,
    f: Vec<C64>,
    df: Vec<C64>,
    bus_v: Vec<C64>,
    bus_i: Vec<C64>,
    bus_dv: Vec<C64>,
    bus_ddv: Vec<C64>,
}

/// Everything the energy layer needs at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Time, s.
    pub t: f64,
    /// State derivative.
    pub dx: Vec<f64>,
    /// Full port variables in global port order (shunt currents included).
    pub ports: Vec<PortVariables>,
    /// Bus voltages.
    pub bus_v: Vec<C64>,
    /// Bus voltage rates.
    pub bus_dv: Vec<C64>,
}

/// Components assembled over a validated topology.
#[derive(Debug)]
pub struct CompositeSystem {
    components: Vec<Box<dyn Component>>,
    names: Vec<String>,
    topology: Topology,
    offsets: Vec<usize>,
    port_offsets: Vec<usize>,
    port_bus: Vec<usize>,
    bus_owner: Vec<usize>,
    bus_c: Vec<f64>,
    mirrors: Vec<(usize, usize)>,
    omega_b: f64,
    w: f64,
}

impl CompositeSystem {
    /// Validate and assemble. `names` label components in outputs.
    pub fn assemble(
        components: Vec<Box<dyn Component>>,
        names: Vec<String>,
        topology: Topology,
        omega_b: f64,
    ) -> Result<Self> {
        validate(&topology, &components)?;
        if names.len() != components.len() {
            return Err(Error::Dimension {
                expected: components.len(),
                got: names.len(),
            });
        }
        let mut offsets = vec![0];
        let mut port_offsets = vec![0];
        let mut port_bus = Vec::new();
        for (c, comp) in components.iter().enumerate() {
            offsets.push(offsets[c] + comp.state_dim());
            port_offsets.push(port_offsets[c] + comp.n_ports());
            for b in &topology.ports[c] {
                port_bus.push(b.expect("validated"));
            }
        }
        let nb = topology.buses.len();
        let mut bus_owner = vec![usize::MAX; nb];
        let mut bus_c = vec![0.0; nb];
        let mut mirrors = Vec::new();
        for (c, comp) in components.iter().enumerate() {
            for p in 0..comp.n_ports() {
                let b = topology.ports[c][p].expect("validated");
                bus_c[b] += comp.shunt(p);
                if let Some(k) = comp.voltage_state(p) {
                    let g = offsets[c] + k;
                    if bus_owner[b] == usize::MAX {
                        bus_owner[b] = g;
                    } else {
                        mirrors.push((g, bus_owner[b]));
                    }
                }
            }
        }
        Ok(Self {
            components,
            names,
            topology,
            offsets,
            port_offsets,
            port_bus,
            bus_owner,
            bus_c,
            mirrors,
            omega_b,
            w: 1.0,
        })
    }

    /// Switch off the rotational cross-coupling (DC frame), for tests of
    /// identities that hold only without frame rotation.
    pub fn with_frame_speed(mut self, w: f64) -> Self {
        self.w = w;
        self
    }

    /// Frame speed in p.u.
    pub fn frame_speed(&self) -> f64 {
        self.w
    }

    /// Base angular frequency, rad/s.
    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    /// Total state dimension.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Total number of ports.
    pub fn n_ports(&self) -> usize {
        *self.port_offsets.last().unwrap_or(&0)
    }

    /// Components in order.
    pub fn components(&self) -> &[Box<dyn Component>] {
        &self.components
    }

    /// Component names.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Topology.
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// State range of component `c`.
    pub fn state_range(&self, c: usize) -> core::ops::Range<usize> {
        self.offsets[c]..self.offsets[c + 1]
    }

    /// Global port range of component `c`.
    pub fn port_range(&self, c: usize) -> core::ops::Range<usize> {
        self.port_offsets[c]..self.port_offsets[c + 1]
    }

    /// Bus of a global port.
    pub fn port_bus(&self, port: usize) -> usize {
        self.port_bus[port]
    }

    /// `(mirror, owner)` pairs of redundant bus-voltage states.
    pub fn mirrors(&self) -> &[(usize, usize)] {
        &self.mirrors
    }

    /// Total shunt susceptance per bus.
    pub fn bus_susceptance(&self) -> &[f64] {
        &self.bus_c
    }

    /// Drives with every component enabled and no adjustments.
    pub fn default_drives(&self) -> Vec<Drive> {
        vec![Drive::default(); self.components.len()]
    }

    /// Global index of the first rotor angle, the network's angle reference.
    pub fn reference_angle(&self) -> Option<usize> {
        self.components
            .iter()
            .enumerate()
            .find_map(|(c, comp)| comp.angle_state().map(|k| self.offsets[c] + k))
    }

    /// Component owning the reference angle.
    pub fn reference_component(&self) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.angle_state().is_some())
    }

    /// Frame angle at time `t`.
    pub fn frame_angle(&self, t: f64) -> f64 {
        self.w * self.omega_b * t
    }

    fn ctx(&self, t: f64, drive: Drive) -> Ctx {
        Ctx {
            t,
            w: self.w,
            omega_b: self.omega_b,
            drive,
        }
    }

    /// Fresh workspace sized for this system.
    pub fn workspace(&self) -> Workspace {
        let np = self.n_ports();
        let nb = self.topology.buses.len();
        Workspace {
            e: vec![C64::default(); np],
            de: vec![C64::default(); np],
            f: vec![C64::default(); np],
            df: vec![C64::default(); np],
            bus_v: vec![C64::default(); nb],
            bus_i: vec![C64::default(); nb],
            bus_dv: vec![C64::default(); nb],
            bus_ddv: vec![C64::default(); nb],
        }
    }

    fn bus_stage(&self, t: f64, x: &[f64], drives: &[Drive], ws: &mut Workspace) {
        for (b, &k) in self.bus_owner.iter().enumerate() {
            ws.bus_v[b] = pair(x, k);
            ws.bus_i[b] = C64::default();
        }
        for (p, &b) in self.port_bus.iter().enumerate() {
            ws.e[p] = ws.bus_v[b];
        }
        for (c, comp) in self.components.iter().enumerate() {
            let pr = self.port_range(c);
            let ctx = self.ctx(t, drives[c]);
            comp.flows(
                &x[self.state_range(c)],
                &ws.e[pr.clone()],
                &ctx,
                &mut ws.f[pr.clone()],
            );
            for p in pr {
                ws.bus_i[self.port_bus[p]] += ws.f[p];
            }
        }
        let jw = C64::new(0.0, self.w);
        for b in 0..ws.bus_v.len() {
            let c = self.bus_c[b];
            ws.bus_dv[b] = (-ws.bus_i[b] - jw * c * ws.bus_v[b]) * (self.omega_b / c);
        }
        for (p, &b) in self.port_bus.iter().enumerate() {
            ws.de[p] = ws.bus_dv[b];
        }
    }

    /// Composite state derivative.
    pub fn rhs(&self, t: f64, x: &[f64], drives: &[Drive], ws: &mut Workspace, dx: &mut [f64]) {
        self.bus_stage(t, x, drives, ws);
        for (c, comp) in self.components.iter().enumerate() {
            let pr = self.port_range(c);
            let sr = self.state_range(c);
            let ctx = self.ctx(t, drives[c]);
            comp.derivative(
                &x[sr.clone()],
                &ws.e[pr.clone()],
                &ws.de[pr],
                &ctx,
                &mut dx[sr],
            );
        }
    }

    /// Derivative plus full port records.
    pub fn evaluate(&self, t: f64, x: &[f64], drives: &[Drive], ws: &mut Workspace) -> Evaluation {
        let mut dx = vec![0.0; self.dim()];
        self.rhs(t, x, drives, ws, &mut dx);
        let nb = ws.bus_v.len();
        let mut bus_df = vec![C64::default(); nb];
        for (c, comp) in self.components.iter().enumerate() {
            let pr = self.port_range(c);
            let sr = self.state_range(c);
            let ctx = self.ctx(t, drives[c]);
            comp.flow_rates(
                &x[sr.clone()],
                &dx[sr],
                &ws.e[pr.clone()],
                &ws.de[pr.clone()],
                &ctx,
                &mut ws.df[pr.clone()],
            );
            for p in pr {
                bus_df[self.port_bus[p]] += ws.df[p];
            }
        }
        let jw = C64::new(0.0, self.w);
        for b in 0..nb {
            let c = self.bus_c[b];
            ws.bus_ddv[b] = (-bus_df[b] - jw * c * ws.bus_dv[b]) * (self.omega_b / c);
        }
        let mut ports = Vec::with_capacity(self.n_ports());
        for (c, comp) in self.components.iter().enumerate() {
            for (k, p) in self.port_range(c).enumerate() {
                let b = self.port_bus[p];
                let cap = comp.shunt(k);
                let (mut f, mut df) = (ws.f[p], ws.df[p]);
                if cap > 0.0 {
                    f += (ws.bus_dv[b] / self.omega_b + jw * ws.bus_v[b]) * cap;
                    df += (ws.bus_ddv[b] / self.omega_b + jw * ws.bus_dv[b]) * cap;
                }
                ports.push(PortVariables::new(ws.e[p], f, ws.de[p], df));
            }
        }
        Evaluation {
            t,
            dx,
            ports,
            bus_v: ws.bus_v.clone(),
            bus_dv: ws.bus_dv.clone(),
        }
    }

    /// State in coordinates invariant to a common rotation: every network
    /// quantity is rotated by the reference rotor angle.
    pub fn canonical(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        let Some(k) = self.reference_angle() else {
            return y;
        };
        let angle = x[k];
        for (c, comp) in self.components.iter().enumerate() {
            comp.rotate(&mut y[self.state_range(c)], angle);
        }
        y
    }

    /// Steady-state initial guess from a phasor solve.
    ///
    /// Buses with a voltage-regulating component are held at its setpoint
    /// with zero angle; the remaining bus voltages follow from the linear
    /// (or linearised) admittances. Components are then initialised from
    /// their bus voltages, regulating ones last from the current the rest
    /// of the network draws. The returned drives carry the power-reference
    /// adjustment of the reference machine only.
    pub fn steady_guess(&self, drives: &[Drive]) -> Result<(Vec<f64>, Vec<Drive>)> {
        let nb = self.topology.buses.len();
        let mut fixed: Vec<Option<C64>> = vec![None; nb];
        for (c, comp) in self.components.iter().enumerate() {
            if let Some(v) = comp.voltage_setpoint() {
                let b = self.port_bus[self.port_offsets[c]];
                fixed[b] = Some(C64::new(v * drives[c].vref_scale, 0.0));
            }
        }
        let mut y = vec![C64::default(); nb * nb];
        for b in 0..nb {
            y[b * nb + b] += C64::new(0.0, self.w * self.bus_c[b]);
        }
        for (c, comp) in self.components.iter().enumerate() {
            if let Some(yc) = comp.admittance(&self.ctx(0.0, drives[c])) {
                let np = comp.n_ports();
                let base = self.port_offsets[c];
                for p in 0..np {
                    for q in 0..np {
                        let (bp, bq) = (self.port_bus[base + p], self.port_bus[base + q]);
                        y[bp * nb + bq] += yc[p * np + q];
                    }
                }
            }
        }
        let free: Vec<usize> = (0..nb).filter(|&b| fixed[b].is_none()).collect();
        let mut v: Vec<C64> = fixed
            .iter()
            .map(|f| f.unwrap_or(C64::new(1.0, 0.0)))
            .collect();
        if !free.is_empty() && free.len() < nb {
            let nf = free.len();
            let mut a = vec![C64::default(); nf * nf];
            let mut rhs = vec![C64::default(); nf];
            for (i, &bi) in free.iter().enumerate() {
                for (j, &bj) in free.iter().enumerate() {
                    a[i * nf + j] = y[bi * nb + bj];
                }
                for bk in 0..nb {
                    if let Some(vk) = fixed[bk] {
                        rhs[i] -= y[bi * nb + bk] * vk;
                    }
                }
            }
            let sol = linalg::solve_complex(&a, &rhs)?;
            for (i, &bi) in free.iter().enumerate() {
                v[bi] = sol[i];
            }
        }

        let mut x = vec![0.0; self.dim()];
        let mut out = drives.to_vec();
        let mut e = vec![C64::default(); self.n_ports()];
        for (p, &b) in self.port_bus.iter().enumerate() {
            e[p] = v[b];
        }
        // non-regulating components first
        let mut bus_draw = vec![C64::default(); nb];
        for b in 0..nb {
            bus_draw[b] = C64::new(0.0, self.w * self.bus_c[b]) * v[b];
        }
        let zero = [C64::default(); 2];
        for (c, comp) in self.components.iter().enumerate() {
            if comp.voltage_setpoint().is_some() {
                continue;
            }
            let pr = self.port_range(c);
            let sr = self.state_range(c);
            let ctx = self.ctx(0.0, drives[c]);
            comp.steady_init(&e[pr.clone()], &zero[..pr.len()], &ctx, &mut x[sr.clone()]);
            let mut f = [C64::default(); 2];
            comp.flows(&x[sr], &e[pr.clone()], &ctx, &mut f[..pr.len()]);
            for (k, p) in pr.enumerate() {
                bus_draw[self.port_bus[p]] += f[k];
            }
        }
        let mut regulators = vec![0usize; nb];
        for (c, comp) in self.components.iter().enumerate() {
            if comp.voltage_setpoint().is_some() {
                regulators[self.port_bus[self.port_offsets[c]]] += 1;
            }
        }
        let reference = self.reference_component();
        for (c, comp) in self.components.iter().enumerate() {
            if comp.voltage_setpoint().is_none() {
                continue;
            }
            let pr = self.port_range(c);
            let sr = self.state_range(c);
            let b = self.port_bus[pr.start];
            let share = [bus_draw[b] / regulators[b] as f64];
            let ctx = self.ctx(0.0, drives[c]);
            let init = comp.steady_init(&e[pr], &share, &ctx, &mut x[sr]);
            if Some(c) == reference {
                out[c].power_adjust = init.power_adjust;
            }
        }
        Ok((x, out))
    }
}

/// Port quantities a boundary component exchanges with the network,
/// summed over its ports with the into-component sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryInjection {
    /// Component index.
    pub component: usize,
    /// Role; sources are grouped with generators.
    pub role: Role,
    /// Power into the component.
    pub p: f64,
    /// Rate of `p`.
    pub pdot: f64,
    /// Reactive-power rate into the component.
    pub qdot: f64,
    /// Component time constant, s.
    pub tau: f64,
}

/// Boundary quantities of every non-line component at one instant.
pub fn boundary_injections(
    sys: &CompositeSystem,
    eval: &Evaluation,
    energy: &[crate::energy::EnergySnapshot],
) -> Vec<BoundaryInjection> {
    let mut out = Vec::new();
    for (c, comp) in sys.components().iter().enumerate() {
        if comp.role() == Role::Line {
            continue;
        }
        let ports = &eval.ports[sys.port_range(c)];
        out.push(BoundaryInjection {
            component: c,
            role: comp.role(),
            p: ports.iter().map(PortVariables::power).sum(),
            pdot: ports.iter().map(PortVariables::power_rate).sum(),
            qdot: ports.iter().map(PortVariables::qdot).sum(),
            tau: energy[c].tau,
        });
    }
    out
}
