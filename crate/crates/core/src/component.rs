//! The component contract shared by machines, lines, loads and sources.
//!
//! A component owns a slice of the global state vector and one or two
//! ports. Evaluation is split in three pure steps so the network can close
//! the bus equations without an algebraic solve:
//!
//! 1. [`Component::flows`]: conductive flow into every port from the state
//!    and the port efforts.
//! 2. The network turns the net conductive current at each bus into the bus
//!    voltage rate through the bus capacitance.
//! 3. [`Component::derivative`] and [`Component::flow_rates`] then use the
//!    efforts and effort rates.
//!
//! Shunt capacitor current is added to a port's flow by the network, never
//! by the component.

use core::fmt::Debug;

use crate::port::C64;
use crate::Result;

/// Membership in the boundary sets used by the loadability bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Rotating generator (set G).
    Generator,
    /// Two-port transmission line (set TL).
    Line,
    /// Load (set L).
    Load,
    /// Controlled power source; counted in G.
    Source,
}

impl Role {
    /// True for members of G.
    pub fn is_generation(self) -> bool {
        matches!(self, Role::Generator | Role::Source)
    }

    /// Short lowercase label.
    pub fn label(self) -> &'static str {
        match self {
            Role::Generator => "generator",
            Role::Line => "line",
            Role::Load => "load",
            Role::Source => "source",
        }
    }
}

/// Which sign makes the per-component reactive-rate balance exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageClass {
    /// Magnetic storage only: `e·ḟ − f·ė`.
    Inductive,
    /// Electric storage only: `f·ė − e·ḟ`.
    Capacitive,
    /// Both kinds; the inductive sign is used and the balance is not exact.
    Mixed,
    /// No storage.
    None,
}

impl StorageClass {
    /// Multiplier applied to the uniform `e·ḟ − f·ė`.
    pub fn qdot_sign(self) -> f64 {
        match self {
            StorageClass::Capacitive => -1.0,
            _ => 1.0,
        }
    }
}

/// Exogenous, piecewise-constant inputs of one component.
///
/// Events edit these between integration segments; the equilibrium solver
/// edits `power_adjust` of the reference machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    /// Source tracking on (PQ source) or off.
    pub enabled: bool,
    /// Multiplier on the voltage reference (exciter).
    pub vref_scale: f64,
    /// Added to the mechanical power reference (governor).
    pub power_adjust: f64,
    /// Multiplier on the load resistance.
    pub r_scale: f64,
}

impl Default for Drive {
    fn default() -> Self {
        Self {
            enabled: true,
            vref_scale: 1.0,
            power_adjust: 0.0,
            r_scale: 1.0,
        }
    }
}

/// Evaluation context: time, frame coupling and the component's drive.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    /// Time, s.
    pub t: f64,
    /// Frame speed in p.u. of the base frequency; 1 for the synchronous dq
    /// frame, 0 disables the rotational cross-coupling (DC frame).
    pub w: f64,
    /// Base angular frequency, rad/s.
    pub omega_b: f64,
    /// Inputs for this component.
    pub drive: Drive,
}

/// Result of a component's steady-state initialisation.
#[derive(Debug, Clone, Copy, Default)]
pub struct SteadyInit {
    /// Power-reference adjustment that balances the initialised state.
    pub power_adjust: f64,
}

/// A dynamical component with ports.
pub trait Component: Debug + Send + Sync {
    /// Boundary-set membership.
    fn role(&self) -> Role;

    /// Number of states.
    fn state_dim(&self) -> usize;

    /// Number of ports (1 or 2).
    fn n_ports(&self) -> usize;

    /// Column labels for the states.
    fn state_names(&self) -> &'static [&'static str];

    /// Storage class for the reactive-rate balance.
    fn storage_class(&self) -> StorageClass;

    /// Check parameter invariants.
    fn validate(&self) -> Result<()>;

    /// Shunt susceptance (p.u.) this component places at `port`.
    fn shunt(&self, _port: usize) -> f64 {
        0.0
    }

    /// Index of the `(d, q)` state pair holding the voltage at `port`.
    fn voltage_state(&self, _port: usize) -> Option<usize> {
        None
    }

    /// Terminal voltage magnitude this component regulates, if any. Buses
    /// with a regulating component are held at this magnitude in the
    /// steady-state guess.
    fn voltage_setpoint(&self) -> Option<f64> {
        None
    }

    /// Index of a rotor angle usable as the network's angle reference.
    fn angle_state(&self) -> Option<usize> {
        None
    }

    /// Time at which the component switches on, if it starts disabled.
    fn enable_time(&self) -> Option<f64> {
        None
    }

    /// Whether the state evolves under this drive. Inactive components are
    /// held at zero state by the equilibrium solver.
    fn is_active(&self, _drive: &Drive) -> bool {
        true
    }

    /// Conductive flow into each port.
    fn flows(&self, x: &[f64], e: &[C64], ctx: &Ctx, f: &mut [C64]);

    /// State derivative given port efforts `e` and their rates `de`.
    fn derivative(&self, x: &[f64], e: &[C64], de: &[C64], ctx: &Ctx, dx: &mut [f64]);

    /// Rate of the conductive flows, by the chain rule through `dx`, `de`.
    fn flow_rates(&self, x: &[f64], dx: &[f64], e: &[C64], de: &[C64], ctx: &Ctx, df: &mut [C64]);

    /// Inertia metric `H(x)`, row-major `state_dim²`.
    fn inertia(&self, x: &[f64], ctx: &Ctx, h: &mut [f64]);

    /// Damping metric `B(x)`, row-major `state_dim²`, scaled so that
    /// `½ xᵀ B x` is the total instantaneous dissipated power.
    fn damping(&self, x: &[f64], ctx: &Ctx, b: &mut [f64]);

    /// Time constant from parameters (s), used when `E = D = 0`.
    fn nominal_tau(&self, omega_b: f64) -> f64;

    /// Steady-state admittance `f = Y e` (row-major, `n_ports²` entries
    /// used) in the frame selected by `ctx.w`, excluding shunts. Nonlinear
    /// components return their linearisation at 1 p.u. voltage; voltage
    /// regulating components return `None`.
    fn admittance(&self, _ctx: &Ctx) -> Option<[C64; 4]> {
        None
    }

    /// Initialise the state from steady port efforts. `f_out` is the flow
    /// the rest of the network draws out of each port.
    fn steady_init(&self, e: &[C64], f_out: &[C64], ctx: &Ctx, x: &mut [f64]) -> SteadyInit;

    /// Rotate every network-frame quantity in `x` by `-angle`.
    fn rotate(&self, x: &mut [f64], angle: f64);

    /// Whether the current port efforts put the component in a saturated
    /// or otherwise guarded regime.
    fn saturated(&self, _x: &[f64], _e: &[C64]) -> bool {
        false
    }
}

/// Rotate the `(d, q)` pair at `x[k]`, `x[k+1]` by `-angle`.
pub(crate) fn rotate_pair(x: &mut [f64], k: usize, angle: f64) {
    let z = C64::new(x[k], x[k + 1]) * C64::from_polar(1.0, -angle);
    x[k] = z.re;
    x[k + 1] = z.im;
}

/// Read the `(d, q)` pair at `x[k]` as a complex number.
#[inline]
pub(crate) fn pair(x: &[f64], k: usize) -> C64 {
    C64::new(x[k], x[k + 1])
}

/// Write a complex number into the `(d, q)` pair at `x[k]`.
#[inline]
pub(crate) fn set_pair(x: &mut [f64], k: usize, z: C64) {
    x[k] = z.re;
    x[k + 1] = z.im;
}
