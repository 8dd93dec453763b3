use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::component::{Component, Ctx, Role, SteadyInit, StorageClass};
use crate::port::C64;
use crate::{Error, Result};

/// Standard parameters of a synchronous machine with first-order governor
/// and exciter. Reactances in p.u., time constants in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineParams {
    /// Inertia constant `J = 2H`, s.
    pub j: f64,
    /// Speed damping, p.u. torque per p.u. speed.
    pub kd: f64,
    /// Stator resistance.
    pub ra: f64,
    /// Stator leakage reactance.
    pub xl: f64,
    /// d-axis synchronous reactance.
    pub xd: f64,
    /// d-axis transient reactance.
    pub xd1: f64,
    /// d-axis subtransient reactance.
    pub xd2: f64,
    /// q-axis synchronous reactance.
    pub xq: f64,
    /// q-axis subtransient reactance.
    pub xq2: f64,
    /// d-axis open-circuit transient time constant.
    pub td01: f64,
    /// d-axis open-circuit subtransient time constant.
    pub td02: f64,
    /// q-axis open-circuit subtransient time constant.
    pub tq02: f64,
    /// Governor droop; the governor gain is `1 / droop`.
    pub droop: f64,
    /// Governor time constant.
    pub tg: f64,
    /// Exciter gain.
    pub ka: f64,
    /// Exciter time constant.
    pub ta: f64,
    /// Mechanical power reference.
    pub pref: f64,
    /// Terminal voltage reference.
    pub vref: f64,
}

/// Equivalent-circuit constants derived from [`MachineParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineCircuit {
    /// d-axis mutual inductance.
    pub lad: f64,
    /// q-axis mutual inductance.
    pub laq: f64,
    /// Field leakage.
    pub lfd: f64,
    /// d-damper leakage.
    pub l1d: f64,
    /// q-damper leakage.
    pub l1q: f64,
    /// Field resistance.
    pub rfd: f64,
    /// d-damper resistance.
    pub r1d: f64,
    /// q-damper resistance.
    pub r1q: f64,
    md_inv: Matrix3<f64>,
    mq_inv: Matrix2<f64>,
}

impl MachineCircuit {
    fn from_params(p: &MachineParams, omega_b: f64) -> Result<Self> {
        let lad = p.xd - p.xl;
        let d1 = p.xd1 - p.xl;
        let lfd = lad * d1 / (lad - d1);
        let rfd = (lad + lfd) / (omega_b * p.td01);
        let d2 = p.xd2 - p.xl;
        let l1d = d2 * lad * lfd / (lad * lfd - d2 * (lad + lfd));
        let r1d = (l1d + lad * lfd / (lad + lfd)) / (omega_b * p.td02);
        let laq = p.xq - p.xl;
        let q2 = p.xq2 - p.xl;
        let l1q = laq * q2 / (laq - q2);
        let r1q = (laq + l1q) / (omega_b * p.tq02);
        let md = Matrix3::new(
            lad + p.xl,
            lad,
            lad,
            lad,
            lad + lfd,
            lad,
            lad,
            lad,
            lad + l1d,
        );
        let mq = Matrix2::new(laq + p.xl, laq, laq, laq + l1q);
        let md_inv = md.try_inverse().ok_or(Error::Singular)?;
        let mq_inv = mq.try_inverse().ok_or(Error::Singular)?;
        Ok(Self {
            lad,
            laq,
            lfd,
            l1d,
            l1q,
            rfd,
            r1d,
            r1q,
            md_inv,
            mq_inv,
        })
    }
}

/// Stator currents (generator convention) and rotor currents from fluxes.
#[derive(Debug, Clone, Copy)]
struct Currents {
    id: f64,
    iq: f64,
    ifd: f64,
    i1d: f64,
    i1q: f64,
}

/// Synchronous machine, seven machine states plus governor and exciter.
///
/// States `[δ, Δω, ψ_d, ψ_q, ψ_fd, ψ_1d, ψ_1q, T_m, E_fd]`: rotor angle
/// against the network frame, speed deviation, stator d/q fluxes, field
/// flux, one damper per axis, mechanical torque and exciter output. Stator
/// flux dynamics are kept so that the machine behaves as an inductive
/// current source toward its bus, which the capacitor-voltage buses need.
///
/// Machine-frame terminal voltage is `v e^{−jδ}`; the stator current leaves
/// the machine as `(i_d + j i_q) e^{jδ}`, so the flow into the port is its
/// negative. Exciter output is scaled so `E_fd` equals the open-circuit
/// voltage it sustains.
#[derive(Debug, Clone, PartialEq)]
pub struct Machine {
    /// Parameters.
    pub params: MachineParams,
    circuit: MachineCircuit,
    omega_b: f64,
}

const DELTA: usize = 0;
const DW: usize = 1;
const PSI_D: usize = 2;
const PSI_Q: usize = 3;
const PSI_FD: usize = 4;
const PSI_1D: usize = 5;
const PSI_1Q: usize = 6;
const TM: usize = 7;
const EFD: usize = 8;

impl Machine {
    /// Build and derive the equivalent circuit.
    pub fn new(params: MachineParams, omega_b: f64) -> Result<Self> {
        Self::check(&params)?;
        let circuit = MachineCircuit::from_params(&params, omega_b)?;
        Ok(Self {
            params,
            circuit,
            omega_b,
        })
    }

    /// Derived equivalent circuit.
    pub fn circuit(&self) -> &MachineCircuit {
        &self.circuit
    }

    fn check(p: &MachineParams) -> Result<()> {
        let pos = [
            ("machine.j", p.j),
            ("machine.ra", p.ra),
            ("machine.xl", p.xl),
            ("machine.td01", p.td01),
            ("machine.td02", p.td02),
            ("machine.tq02", p.tq02),
            ("machine.droop", p.droop),
            ("machine.tg", p.tg),
            ("machine.ta", p.ta),
        ];
        for (name, v) in pos {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, "must be > 0"));
            }
        }
        if !(p.kd.is_finite() && p.kd >= 0.0) {
            return Err(Error::param("machine.kd", "must be >= 0"));
        }
        if !(p.ka.is_finite() && p.ka >= 0.0) {
            return Err(Error::param("machine.ka", "must be >= 0"));
        }
        // The equivalent circuit only exists for strictly ordered reactances.
        if !(p.xd > p.xd1 && p.xd1 > p.xd2 && p.xd2 > p.xl) {
            return Err(Error::param("machine.xd", "need xd > xd1 > xd2 > xl"));
        }
        if !(p.xq > p.xq2 && p.xq2 > p.xl) {
            return Err(Error::param("machine.xq", "need xq > xq2 > xl"));
        }
        if !(p.pref.is_finite() && p.vref.is_finite() && p.vref > 0.0) {
            return Err(Error::param(
                "machine.vref",
                "setpoints must be finite, vref > 0",
            ));
        }
        Ok(())
    }

    fn currents(&self, x: &[f64]) -> Currents {
        let c = &self.circuit;
        let yd = c.md_inv * Vector3::new(x[PSI_D], x[PSI_FD], x[PSI_1D]);
        let yq = c.mq_inv * Vector2::new(x[PSI_Q], x[PSI_1Q]);
        Currents {
            id: -yd[0],
            iq: -yq[0],
            ifd: yd[1],
            i1d: yd[2],
            i1q: yq[1],
        }
    }

    /// Electrical torque.
    pub fn electrical_torque(&self, x: &[f64]) -> f64 {
        let i = self.currents(x);
        x[PSI_D] * i.iq - x[PSI_Q] * i.id
    }

    /// Stator current leaving the machine, network frame.
    pub fn stator_current(&self, x: &[f64]) -> C64 {
        let i = self.currents(x);
        C64::new(i.id, i.iq) * C64::from_polar(1.0, x[DELTA])
    }
}

impl Component for Machine {
    fn role(&self) -> Role {
        Role::Generator
    }

    fn state_dim(&self) -> usize {
        9
    }

    fn n_ports(&self) -> usize {
        1
    }

    fn state_names(&self) -> &'static [&'static str] {
        &[
            "delta", "dw", "psi_d", "psi_q", "psi_fd", "psi_1d", "psi_1q", "tm", "efd",
        ]
    }

    fn storage_class(&self) -> StorageClass {
        StorageClass::Inductive
    }

    fn validate(&self) -> Result<()> {
        Self::check(&self.params)
    }

    fn angle_state(&self) -> Option<usize> {
        Some(DELTA)
    }

    fn voltage_setpoint(&self) -> Option<f64> {
        Some(self.params.vref)
    }

    fn flows(&self, x: &[f64], _e: &[C64], _ctx: &Ctx, f: &mut [C64]) {
        f[0] = -self.stator_current(x);
    }

    fn derivative(&self, x: &[f64], e: &[C64], _de: &[C64], ctx: &Ctx, dx: &mut [f64]) {
        let p = &self.params;
        let c = &self.circuit;
        let wb = self.omega_b;
        let v = e[0] * C64::from_polar(1.0, -x[DELTA]);
        let i = self.currents(x);
        let wr = 1.0 + x[DW];
        dx[PSI_D] = wb * (v.re + p.ra * i.id + wr * x[PSI_Q]);
        dx[PSI_Q] = wb * (v.im + p.ra * i.iq - wr * x[PSI_D]);
        dx[PSI_FD] = wb * (c.rfd / c.lad * x[EFD] - c.rfd * i.ifd);
        dx[PSI_1D] = -wb * c.r1d * i.i1d;
        dx[PSI_1Q] = -wb * c.r1q * i.i1q;
        let te = x[PSI_D] * i.iq - x[PSI_Q] * i.id;
        dx[DW] = (x[TM] - te - p.kd * x[DW]) / p.j;
        dx[DELTA] = wb * x[DW];
        dx[TM] = (p.pref + ctx.drive.power_adjust - x[DW] / p.droop - x[TM]) / p.tg;
        dx[EFD] = (p.ka * (p.vref * ctx.drive.vref_scale - e[0].norm()) - x[EFD]) / p.ta;
    }

    fn flow_rates(
        &self,
        x: &[f64],
        dx: &[f64],
        _e: &[C64],
        _de: &[C64],
        _ctx: &Ctx,
        df: &mut [C64],
    ) {
        let c = &self.circuit;
        let i = self.currents(x);
        let dyd = c.md_inv * Vector3::new(dx[PSI_D], dx[PSI_FD], dx[PSI_1D]);
        let dyq = c.mq_inv * Vector2::new(dx[PSI_Q], dx[PSI_1Q]);
        let im = C64::new(i.id, i.iq);
        let dim = C64::new(-dyd[0], -dyq[0]);
        let rot = C64::from_polar(1.0, x[DELTA]);
        df[0] = -(dim + C64::new(0.0, dx[DELTA]) * im) * rot;
    }

    fn inertia(&self, _x: &[f64], _ctx: &Ctx, h: &mut [f64]) {
        let c = &self.circuit;
        let n = 9;
        h.fill(0.0);
        h[DW * n + DW] = self.params.j;
        let d = [PSI_D, PSI_FD, PSI_1D];
        for (a, &ra) in d.iter().enumerate() {
            for (b, &rb) in d.iter().enumerate() {
                h[ra * n + rb] = c.md_inv[(a, b)] / self.omega_b;
            }
        }
        let q = [PSI_Q, PSI_1Q];
        for (a, &ra) in q.iter().enumerate() {
            for (b, &rb) in q.iter().enumerate() {
                h[ra * n + rb] = c.mq_inv[(a, b)] / self.omega_b;
            }
        }
    }

    fn damping(&self, _x: &[f64], _ctx: &Ctx, b: &mut [f64]) {
        let c = &self.circuit;
        let p = &self.params;
        let n = 9;
        b.fill(0.0);
        b[DW * n + DW] = 2.0 * p.kd;
        let rd = Matrix3::from_diagonal(&Vector3::new(p.ra, c.rfd, c.r1d));
        let bd = c.md_inv.transpose() * rd * c.md_inv * 2.0;
        let rq = Matrix2::from_diagonal(&Vector2::new(p.ra, c.r1q));
        let bq = c.mq_inv.transpose() * rq * c.mq_inv * 2.0;
        let d = [PSI_D, PSI_FD, PSI_1D];
        for (a, &ra) in d.iter().enumerate() {
            for (k, &rb) in d.iter().enumerate() {
                b[ra * n + rb] = bd[(a, k)];
            }
        }
        let q = [PSI_Q, PSI_1Q];
        for (a, &ra) in q.iter().enumerate() {
            for (k, &rb) in q.iter().enumerate() {
                b[ra * n + rb] = bq[(a, k)];
            }
        }
    }

    fn nominal_tau(&self, _omega_b: f64) -> f64 {
        self.params.td01
    }

    fn steady_init(&self, e: &[C64], f_out: &[C64], _ctx: &Ctx, x: &mut [f64]) -> SteadyInit {
        let p = &self.params;
        let c = &self.circuit;
        let v = e[0];
        let ig = f_out[0];
        let eq = v + C64::new(p.ra, p.xq) * ig;
        let delta = eq.arg() - core::f64::consts::FRAC_PI_2;
        let rot = C64::from_polar(1.0, -delta);
        let vm = v * rot;
        let im = ig * rot;
        let (vd, vq, id, iq) = (vm.re, vm.im, im.re, im.im);
        let psi_d = vq + p.ra * iq;
        let psi_q = -vd - p.ra * id;
        let ifd = (psi_d + (c.lad + p.xl) * id) / c.lad;
        let te = psi_d * iq - psi_q * id;
        x[DELTA] = delta;
        x[DW] = 0.0;
        x[PSI_D] = psi_d;
        x[PSI_Q] = psi_q;
        x[PSI_FD] = -c.lad * id + (c.lad + c.lfd) * ifd;
        x[PSI_1D] = -c.lad * id + c.lad * ifd;
        x[PSI_1Q] = -c.laq * iq;
        x[TM] = te;
        x[EFD] = c.lad * ifd;
        SteadyInit {
            power_adjust: te - p.pref,
        }
    }

    fn rotate(&self, x: &mut [f64], angle: f64) {
        x[DELTA] -= angle;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::Drive;
    use crate::units::OMEGA_60HZ;

    pub(crate) fn reference() -> MachineParams {
        MachineParams {
            j: 7.0,
            kd: 0.0,
            ra: 0.003,
            xl: 0.15,
            xd: 1.81,
            xd1: 0.30,
            xd2: 0.23,
            xq: 1.76,
            xq2: 0.25,
            td01: 8.0,
            td02: 0.03,
            tq02: 0.07,
            droop: 0.05,
            tg: 0.5,
            ka: 200.0,
            ta: 0.02,
            pref: 0.0,
            vref: 1.0,
        }
    }

    fn ctx() -> Ctx {
        Ctx {
            t: 0.0,
            w: 1.0,
            omega_b: OMEGA_60HZ,
            drive: Drive::default(),
        }
    }

    #[test]
    fn circuit_reproduces_operational_reactances() {
        let m = Machine::new(reference(), OMEGA_60HZ).unwrap();
        let c = m.circuit();
        let p = reference();
        let par = |a: f64, b: f64| a * b / (a + b);
        assert!((p.xl + par(c.lad, c.lfd) - p.xd1).abs() < 1e-12);
        assert!((p.xl + 1.0 / (1.0 / c.lad + 1.0 / c.lfd + 1.0 / c.l1d) - p.xd2).abs() < 1e-12);
        assert!((p.xl + par(c.laq, c.l1q) - p.xq2).abs() < 1e-12);
        assert!(((c.lad + c.lfd) / (OMEGA_60HZ * c.rfd) - p.td01).abs() < 1e-9);
    }

    #[test]
    fn steady_init_is_a_fixed_point_of_the_electrical_states() {
        let m = Machine::new(reference(), OMEGA_60HZ).unwrap();
        let v = [C64::from_polar(1.0, 0.1)];
        let ig = [C64::from_polar(0.8, -0.3)];
        let mut x = [0.0; 9];
        let init = m.steady_init(&v, &ig, &ctx(), &mut x);
        let mut c = ctx();
        c.drive.power_adjust = init.power_adjust;
        // exciter equation holds only at the regulated voltage
        let mut dx = [0.0; 9];
        m.derivative(&x, &v, &[C64::default()], &c, &mut dx);
        for k in [DELTA, DW, PSI_D, PSI_Q, PSI_FD, PSI_1D, PSI_1Q, TM] {
            assert!(dx[k].abs() < 1e-9, "state {k}: {}", dx[k]);
        }
        assert!((m.stator_current(&x) - ig[0]).norm() < 1e-12);
    }

    #[test]
    fn reactance_ordering_enforced() {
        let mut p = reference();
        p.xd2 = 0.35;
        assert!(Machine::new(p, OMEGA_60HZ).is_err());
        let mut p = reference();
        p.j = 0.0;
        assert!(Machine::new(p, OMEGA_60HZ).is_err());
    }
}
