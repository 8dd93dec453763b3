//! Scenario files: strict TOML, parameter records, assembly.

use std::fmt;
use std::path::{Path, PathBuf};

use loadability_core::component::{Component, Role};
use loadability_core::components::{
    Machine, MachineParams, PiLine, PiLineParams, PqSource, PqSourceParams, RlLoad, RlLoadParams,
};
use loadability_core::sim::{Event, EventKind, Method, SimConfig, DEFAULT_STEP, DIVERGENCE_LIMIT};
use loadability_core::units::PerUnitBase;
use loadability_core::{CompositeSystem, Topology};
use serde::Deserialize;
use toml::Spanned;

/// A problem with the input, anchored to a file and usually a line.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    /// File the problem was found in.
    pub path: PathBuf,
    /// 1-based line, when known.
    pub line: Option<usize>,
    /// What is wrong.
    pub message: String,
}

impl ValidationError {
    fn new(path: &Path, line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.path.display(), l, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for ValidationError {}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

// toml parse errors already carry "line N, column M"; pull the line out so
// the message leads with `path:line:`.
fn toml_error(path: &Path, src: &str, e: toml::de::Error) -> ValidationError {
    let line = e.span().map(|s| line_of(src, s.start));
    ValidationError::new(path, line, e.message().trim().to_string())
}

macro_rules! param_record {
    ($partial:ident => $target:ident { $($f:ident),* $(,)? }) => {
        #[derive(Debug, Default, Clone, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $partial {
            $( $f: Option<f64>, )*
        }

        impl $partial {
            fn overlay(self, o: Self) -> Self {
                Self { $( $f: o.$f.or(self.$f), )* }
            }

            fn finish(self) -> Result<$target, String> {
                Ok($target {
                    $( $f: self.$f.ok_or_else(|| format!("missing parameter `{}`", stringify!($f)))?, )*
                })
            }
        }
    };
}

param_record!(MachinePartial => MachineParams {
    j, kd, ra, xl, xd, xd1, xd2, xq, xq2, td01, td02, tq02, droop, tg, ka, ta, pref, vref,
});
param_record!(LinePartial => PiLineParams { r, x, b });
param_record!(LoadPartial => RlLoadParams { r, x });
param_record!(SourcePartial => PqSourceParams { p0, q0, tau_p, tau_q, enable_time });

/// Component kind as written in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Synchronous machine.
    Machine,
    /// π-model line.
    Line,
    /// Series RL load.
    Load,
    /// Controlled PQ source.
    Source,
}

/// Parameters of one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentParams {
    /// Machine.
    Machine(MachineParams),
    /// Line.
    Line(PiLineParams),
    /// Load.
    Load(RlLoadParams),
    /// Source.
    Source(PqSourceParams),
}

impl ComponentParams {
    fn instantiate(&self, omega_b: f64) -> loadability_core::Result<Box<dyn Component>> {
        Ok(match *self {
            ComponentParams::Machine(p) => Box::new(Machine::new(p, omega_b)?),
            ComponentParams::Line(p) => Box::new(PiLine::new(p)),
            ComponentParams::Load(p) => Box::new(RlLoad::new(p)),
            ComponentParams::Source(p) => Box::new(PqSource::new(p)),
        })
    }

    /// Role of the component these parameters build.
    pub fn role(&self) -> Role {
        match self {
            ComponentParams::Machine(_) => Role::Generator,
            ComponentParams::Line(_) => Role::Line,
            ComponentParams::Load(_) => Role::Load,
            ComponentParams::Source(_) => Role::Source,
        }
    }
}

/// A component entry after parameter merging.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentDef {
    /// Unique name.
    pub name: String,
    /// Bus per port.
    pub buses: Vec<String>,
    /// Merged parameters.
    pub params: ComponentParams,
    /// Line of the entry in the scenario file.
    pub line: usize,
}

/// An event entry with its target resolved by name.
#[derive(Debug, Clone, PartialEq)]
pub struct EventDef {
    /// Target component name.
    pub component: String,
    /// Core event; `component` index is filled on assembly.
    pub event: Event,
    /// Line in the scenario file.
    pub line: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseSpec {
    #[serde(default = "default_s")]
    s_mva: f64,
    #[serde(default = "default_v")]
    v_kv: f64,
    #[serde(default = "default_hz")]
    frequency_hz: f64,
}

fn default_s() -> f64 {
    100.0
}
fn default_v() -> f64 {
    230.0
}
fn default_hz() -> f64 {
    60.0
}

impl Default for BaseSpec {
    fn default() -> Self {
        Self {
            s_mva: default_s(),
            v_kv: default_v(),
            frequency_hz: default_hz(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    name: String,
    kind: Kind,
    buses: Vec<String>,
    file: Option<String>,
    params: Option<Spanned<toml::Table>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum EventKindSpec {
    ExciterRefStep,
    LoadStep,
    Redispatch,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventSpec {
    time: f64,
    component: String,
    kind: EventKindSpec,
    magnitude: f64,
    duration: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum MethodSpec {
    Rk4,
    Rk45,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSpec {
    #[serde(default = "default_t_end")]
    t_end: f64,
    #[serde(default = "default_step")]
    step: f64,
    #[serde(default = "default_method")]
    method: MethodSpec,
    #[serde(default = "default_rtol")]
    rtol: f64,
    #[serde(default = "default_atol")]
    atol: f64,
    #[serde(default = "default_stride")]
    stride: usize,
    #[serde(default = "default_limit")]
    divergence_limit: f64,
}

fn default_t_end() -> f64 {
    1.0
}
fn default_step() -> f64 {
    DEFAULT_STEP
}
fn default_method() -> MethodSpec {
    MethodSpec::Rk4
}
fn default_rtol() -> f64 {
    1e-6
}
fn default_atol() -> f64 {
    1e-9
}
fn default_stride() -> usize {
    10
}
fn default_limit() -> f64 {
    DIVERGENCE_LIMIT
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            t_end: default_t_end(),
            step: default_step(),
            method: default_method(),
            rtol: default_rtol(),
            atol: default_atol(),
            stride: default_stride(),
            divergence_limit: default_limit(),
        }
    }
}

/// `[sweep]`: PV-curve settings.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Load whose resistance is swept.
    pub load: String,
    /// Line whose reactance is varied between curves.
    pub line: String,
    /// Load resistances, p.u.
    pub r: Vec<f64>,
    /// Line reactances, one curve each; empty uses the line's own value.
    #[serde(default)]
    pub line_x: Vec<f64>,
    /// Probe run length, s.
    #[serde(default = "default_probe_t_end")]
    pub t_end: f64,
    /// Probe start, s.
    #[serde(default = "default_probe_time")]
    pub probe_time: f64,
    /// Relative exciter reference step.
    #[serde(default = "default_probe_mag")]
    pub probe_magnitude: f64,
    /// Probe length, s.
    #[serde(default = "default_probe_duration")]
    pub probe_duration: f64,
    /// Record stride of probe runs.
    #[serde(default = "default_probe_stride")]
    pub stride: usize,
    /// Return tolerance of the stability classifier.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Periods the window must span before a non-return counts as unstable.
    #[serde(default = "default_min_periods")]
    pub min_periods: f64,
}

fn default_probe_t_end() -> f64 {
    10.0
}
fn default_probe_time() -> f64 {
    0.05
}
fn default_probe_mag() -> f64 {
    0.01
}
fn default_probe_duration() -> f64 {
    0.1
}
fn default_probe_stride() -> usize {
    20
}
fn default_eps() -> f64 {
    1e-3
}
fn default_min_periods() -> f64 {
    20.0
}

/// `[support]`: the load-side reactive source used by `pv-sweep`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportSpec {
    /// Source component name.
    pub source: String,
    /// Whether sweeps include it without `--with-q-support`.
    #[serde(default)]
    pub enabled: bool,
}

/// `[inertia]`: the two-run spectral experiment.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InertiaSpec {
    /// Machines whose inertia is set for each run.
    pub machines: Vec<String>,
    /// Line whose sending-end power is analysed.
    pub line: String,
    /// Offset added to the line series current at t = 0, p.u.
    #[serde(default = "default_kick")]
    pub kick: f64,
    /// Time skipped before the analysis window, s.
    #[serde(default = "default_settle")]
    pub settle: f64,
    /// Analysis window length, s.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Inertia of the first run, s.
    #[serde(default = "default_j_high")]
    pub j_high: f64,
    /// Inertia of the second run, s.
    #[serde(default = "default_j_low")]
    pub j_low: f64,
    /// Half width of the band around the base frequency, Hz.
    #[serde(default = "default_band")]
    pub band_hz: f64,
}

fn default_kick() -> f64 {
    0.3
}
fn default_settle() -> f64 {
    0.01
}
fn default_window() -> f64 {
    1.0
}
fn default_j_high() -> f64 {
    100.0
}
fn default_j_low() -> f64 {
    1.0
}
fn default_band() -> f64 {
    2.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    base: BaseSpec,
    buses: Vec<String>,
    #[serde(rename = "component")]
    components: Vec<Spanned<ComponentSpec>>,
    #[serde(default, rename = "event")]
    events: Vec<Spanned<EventSpec>>,
    #[serde(default)]
    sim: SimSpec,
    sweep: Option<Spanned<SweepSpec>>,
    support: Option<Spanned<SupportSpec>>,
    inertia: Option<Spanned<InertiaSpec>>,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Scenario file.
    pub path: PathBuf,
    /// Per-unit base.
    pub base: PerUnitBase,
    /// Bus names.
    pub buses: Vec<String>,
    /// Components in file order.
    pub components: Vec<ComponentDef>,
    /// Scheduled events.
    pub events: Vec<EventDef>,
    /// Simulation settings.
    pub sim: SimConfig,
    /// PV sweep settings.
    pub sweep: Option<(SweepSpec, usize)>,
    /// Reactive support settings.
    pub support: Option<(SupportSpec, usize)>,
    /// Inertia experiment settings.
    pub inertia: Option<(InertiaSpec, usize)>,
}

fn parse_partial<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ValidationError> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        ValidationError::new(path, None, format!("cannot read parameter file: {e}"))
    })?;
    toml::from_str(&src).map_err(|e| toml_error(path, &src, e))
}

trait Overlay {
    fn overlay_with(self, o: Self) -> Self;
}

macro_rules! overlay_impl {
    ($($t:ident),*) => { $( impl Overlay for $t { fn overlay_with(self, o: Self) -> Self { self.overlay(o) } } )* };
}
overlay_impl!(MachinePartial, LinePartial, LoadPartial, SourcePartial);

impl Scenario {
    /// Read and validate a scenario file.
    pub fn load(path: &Path) -> Result<Self, ValidationError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ValidationError::new(path, None, format!("cannot read scenario: {e}")))?;
        Self::parse(&src, path)
    }

    /// Parse scenario text; parameter files resolve relative to `path`.
    pub fn parse(src: &str, path: &Path) -> Result<Self, ValidationError> {
        let file: ScenarioFile = toml::from_str(src).map_err(|e| toml_error(path, src, e))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let err = |line: usize, msg: String| ValidationError::new(path, Some(line), msg);

        let b = &file.base;
        let base = PerUnitBase::new(b.s_mva, b.v_kv, 2.0 * std::f64::consts::PI * b.frequency_hz)
            .map_err(|e| ValidationError::new(path, None, format!("[base]: {e}")))?;

        let mut components = Vec::with_capacity(file.components.len());
        for c in &file.components {
            let line = line_of(src, c.span().start);
            let spec = c.get_ref();
            if components
                .iter()
                .any(|d: &ComponentDef| d.name == spec.name)
            {
                return Err(err(
                    line,
                    format!("duplicate component name `{}`", spec.name),
                ));
            }
            let params = Self::component_params(dir, path, spec, line, src)?;
            components.push(ComponentDef {
                name: spec.name.clone(),
                buses: spec.buses.clone(),
                params,
                line,
            });
        }

        let mut events = Vec::with_capacity(file.events.len());
        for e in &file.events {
            let line = line_of(src, e.span().start);
            let spec = e.get_ref();
            let Some(target) = components.iter().find(|c| c.name == spec.component) else {
                return Err(err(
                    line,
                    format!("event targets unknown component `{}`", spec.component),
                ));
            };
            let kind = match spec.kind {
                EventKindSpec::ExciterRefStep => EventKind::ExciterRefStep,
                EventKindSpec::LoadStep => EventKind::LoadStep,
                EventKindSpec::Redispatch => EventKind::Redispatch,
            };
            let expected = match kind {
                EventKind::LoadStep => Role::Load,
                _ => Role::Generator,
            };
            if target.params.role() != expected {
                return Err(err(
                    line,
                    format!(
                        "event kind does not apply to component `{}`",
                        spec.component
                    ),
                ));
            }
            events.push(EventDef {
                component: spec.component.clone(),
                event: Event {
                    time: spec.time,
                    component: 0,
                    kind,
                    magnitude: spec.magnitude,
                    duration: spec.duration,
                },
                line,
            });
        }

        let s = &file.sim;
        let sim = SimConfig {
            t_end: s.t_end,
            step: s.step,
            method: match s.method {
                MethodSpec::Rk4 => Method::Rk4,
                MethodSpec::Rk45 => Method::Rk45 {
                    rtol: s.rtol,
                    atol: s.atol,
                },
            },
            stride: s.stride,
            divergence_limit: s.divergence_limit,
        };
        sim.validate()
            .map_err(|e| ValidationError::new(path, None, format!("[sim]: {e}")))?;

        let scn = Scenario {
            path: path.to_path_buf(),
            base,
            buses: file.buses,
            components,
            events,
            sim,
            sweep: file
                .sweep
                .map(|s| (s.get_ref().clone(), line_of(src, s.span().start))),
            support: file
                .support
                .map(|s| (s.get_ref().clone(), line_of(src, s.span().start))),
            inertia: file
                .inertia
                .map(|s| (s.get_ref().clone(), line_of(src, s.span().start))),
        };
        scn.check_sections()?;
        scn.system()?;
        Ok(scn)
    }

    fn component_params(
        dir: &Path,
        path: &Path,
        spec: &ComponentSpec,
        line: usize,
        src: &str,
    ) -> Result<ComponentParams, ValidationError> {
        let fail = |m: String| {
            ValidationError::new(path, Some(line), format!("component `{}`: {m}", spec.name))
        };
        Ok(match spec.kind {
            Kind::Machine => ComponentParams::Machine(
                merged::<MachinePartial>(dir, path, spec, line, src)?
                    .finish()
                    .map_err(fail)?,
            ),
            Kind::Line => ComponentParams::Line(
                merged::<LinePartial>(dir, path, spec, line, src)?
                    .finish()
                    .map_err(fail)?,
            ),
            Kind::Load => ComponentParams::Load(
                merged::<LoadPartial>(dir, path, spec, line, src)?
                    .finish()
                    .map_err(fail)?,
            ),
            Kind::Source => ComponentParams::Source(
                merged::<SourcePartial>(dir, path, spec, line, src)?
                    .finish()
                    .map_err(fail)?,
            ),
        })
    }

    fn check_sections(&self) -> Result<(), ValidationError> {
        let err = |line: usize, msg: String| ValidationError::new(&self.path, Some(line), msg);
        let role_of = |name: &str| self.def(name).map(|c| c.params.role());
        if let Some((s, line)) = &self.sweep {
            if role_of(&s.load) != Some(Role::Load) {
                return Err(err(
                    *line,
                    format!("[sweep] load `{}` is not a load component", s.load),
                ));
            }
            if role_of(&s.line) != Some(Role::Line) {
                return Err(err(
                    *line,
                    format!("[sweep] line `{}` is not a line component", s.line),
                ));
            }
            if s.r.is_empty() {
                return Err(err(*line, "[sweep] resistance grid `r` is empty".into()));
            }
            if s.r
                .iter()
                .chain(&s.line_x)
                .any(|v| !(v.is_finite() && *v > 0.0))
            {
                return Err(err(
                    *line,
                    "[sweep] grid values must be finite and > 0".into(),
                ));
            }
            if s.t_end.partial_cmp(&(s.probe_time + s.probe_duration))
                != Some(std::cmp::Ordering::Greater)
                || s.stride == 0
            {
                return Err(err(
                    *line,
                    "[sweep] probe must end before t_end and stride must be ≥ 1".into(),
                ));
            }
        }
        if let Some((s, line)) = &self.support {
            if role_of(&s.source) != Some(Role::Source) {
                return Err(err(
                    *line,
                    format!("[support] source `{}` is not a source component", s.source),
                ));
            }
        }
        if let Some((s, line)) = &self.inertia {
            if s.machines.is_empty()
                || s.machines
                    .iter()
                    .any(|m| role_of(m) != Some(Role::Generator))
            {
                return Err(err(
                    *line,
                    "[inertia] machines must name machine components".into(),
                ));
            }
            if role_of(&s.line) != Some(Role::Line) {
                return Err(err(
                    *line,
                    format!("[inertia] line `{}` is not a line component", s.line),
                ));
            }
            if !(s.j_high > 0.0
                && s.j_low > 0.0
                && s.window > 0.0
                && s.settle >= 0.0
                && s.band_hz > 0.0)
            {
                return Err(err(
                    *line,
                    "[inertia] inertias, window and band must be > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Component entry by name.
    pub fn def(&self, name: &str) -> Option<&ComponentDef> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Mutable component entry by name.
    pub fn def_mut(&mut self, name: &str) -> Option<&mut ComponentDef> {
        self.components.iter_mut().find(|c| c.name == name)
    }

    /// Drop a component (and any events aimed at it).
    pub fn remove(&mut self, name: &str) {
        self.components.retain(|c| c.name != name);
        self.events.retain(|e| e.component != name);
    }

    /// Base angular frequency, rad/s.
    pub fn omega_b(&self) -> f64 {
        self.base.omega_base()
    }

    /// Assemble the network described by the current component list.
    pub fn system(&self) -> Result<CompositeSystem, ValidationError> {
        let mut topo = Topology::with_buses(self.buses.iter().cloned());
        let mut comps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let err = |m: String| {
                ValidationError::new(
                    &self.path,
                    Some(c.line),
                    format!("component `{}`: {m}", c.name),
                )
            };
            let mut idx = Vec::with_capacity(c.buses.len());
            for b in &c.buses {
                idx.push(
                    topo.bus(b)
                        .ok_or_else(|| err(format!("unknown bus `{b}`")))?,
                );
            }
            topo.attach(&idx);
            comps.push(
                c.params
                    .instantiate(self.omega_b())
                    .map_err(|e| err(e.to_string()))?,
            );
        }
        let names = self.components.iter().map(|c| c.name.clone()).collect();
        CompositeSystem::assemble(comps, names, topo, self.omega_b())
            .map_err(|e| ValidationError::new(&self.path, None, e.to_string()))
    }

    /// Events with component indices resolved against the current list.
    pub fn core_events(&self) -> Vec<Event> {
        self.events
            .iter()
            .filter_map(|e| {
                let idx = self.components.iter().position(|c| c.name == e.component)?;
                Some(Event {
                    component: idx,
                    ..e.event
                })
            })
            .collect()
    }
}

fn merged<T>(
    dir: &Path,
    path: &Path,
    spec: &ComponentSpec,
    line: usize,
    src: &str,
) -> Result<T, ValidationError>
where
    T: for<'de> Deserialize<'de> + Default + Overlay,
{
    let base: T = match &spec.file {
        Some(f) => parse_partial(&dir.join(f))?,
        None => T::default(),
    };
    let over: T =
        match &spec.params {
            Some(p) => toml::Value::Table(p.get_ref().clone()).try_into().map_err(
                |e: toml::de::Error| {
                    ValidationError::new(
                        path,
                        Some(line_of(src, p.span().start).max(line)),
                        format!("component `{}` params: {}", spec.name, e.message().trim()),
                    )
                },
            )?,
            None => T::default(),
        };
    Ok(base.overlay_with(over))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = r#"
buses = ["a", "b"]

[[component]]
name = "g1"
kind = "machine"
buses = ["a"]
params = { j = 7.0, kd = 0.0, ra = 0.003, xl = 0.15, xd = 1.81, xd1 = 0.3, xd2 = 0.23, xq = 1.76, xq2 = 0.25, td01 = 8.0, td02 = 0.03, tq02 = 0.07, droop = 0.05, tg = 0.5, ka = 200.0, ta = 0.02, pref = 0.0, vref = 1.0 }

[[component]]
name = "tl1"
kind = "line"
buses = ["a", "b"]
params = { r = 0.01, x = 0.1, b = 0.1 }

[[component]]
name = "l1"
kind = "load"
buses = ["b"]
params = { r = 1.0, x = 0.1 }
"#;

    fn parse(s: &str) -> Result<Scenario, ValidationError> {
        Scenario::parse(s, Path::new("mini.toml"))
    }

    #[test]
    fn minimal_scenario_assembles() {
        let s = parse(MINI).unwrap();
        assert_eq!(s.components.len(), 3);
        assert_eq!(s.system().unwrap().dim(), 9 + 6 + 2);
    }

    #[test]
    fn unknown_top_level_field_rejected_with_line() {
        let src = format!("{MINI}\n[sim]\nstep = 1e-5\nbogus = 1\n");
        let e = parse(&src).unwrap_err();
        assert!(e.message.contains("bogus"), "{e}");
        assert_eq!(
            e.line,
            Some(src.lines().position(|l| l.starts_with("bogus")).unwrap() + 1)
        );
    }

    #[test]
    fn unknown_param_rejected() {
        let src = MINI.replace("r = 1.0, x = 0.1", "r = 1.0, x = 0.1, l = 2.0");
        let e = parse(&src).unwrap_err();
        assert!(e.message.contains("unknown field"), "{e}");
        assert!(e.line.is_some());
    }

    #[test]
    fn missing_param_named() {
        let src = MINI.replace("r = 1.0, x = 0.1", "r = 1.0");
        let e = parse(&src).unwrap_err();
        assert!(e.message.contains("missing parameter `x`"), "{e}");
        assert_eq!(
            e.line,
            Some(
                src.lines()
                    .position(|l| l.contains("name = \"l1\""))
                    .unwrap()
            )
        );
    }

    #[test]
    fn unknown_bus_reported() {
        let e = parse(&MINI.replace("buses = [\"b\"]", "buses = [\"c\"]")).unwrap_err();
        assert!(e.message.contains("unknown bus `c`"), "{e}");
    }

    #[test]
    fn empty_sweep_grid_rejected() {
        let src = format!("{MINI}\n[sweep]\nload = \"l1\"\nline = \"tl1\"\nr = []\n");
        let e = parse(&src).unwrap_err();
        assert!(e.message.contains("empty"), "{e}");
    }
}
