//! Per-unit bases and conversions.

use crate::{Error, Result};

/// Which derived base a quantity is normalised by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Active, reactive or apparent power.
    Power,
    /// Voltage.
    Voltage,
    /// Current.
    Current,
    /// Resistance, reactance or impedance.
    Impedance,
    /// Time, normalised by `1 / omega_base`.
    Time,
}

impl core::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "power" => Quantity::Power,
            "voltage" => Quantity::Voltage,
            "current" => Quantity::Current,
            "impedance" => Quantity::Impedance,
            "time" => Quantity::Time,
            other => {
                return Err(Error::Invalid(alloc::format!(
                    "unknown quantity kind `{other}`"
                )))
            }
        })
    }
}

/// System base: apparent power, voltage and angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerUnitBase {
    s_base: f64,
    v_base: f64,
    omega_base: f64,
}

impl PerUnitBase {
    /// Build a base; all three values must be finite and strictly positive.
    pub fn new(s_base: f64, v_base: f64, omega_base: f64) -> Result<Self> {
        for (name, v) in [
            ("s_base", s_base),
            ("v_base", v_base),
            ("omega_base", omega_base),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, "must be finite and > 0"));
            }
        }
        Ok(Self {
            s_base,
            v_base,
            omega_base,
        })
    }

    /// 100 MVA, 230 kV, 60 Hz.
    pub fn sixty_hz() -> Self {
        Self {
            s_base: 100e6,
            v_base: 230e3,
            omega_base: 2.0 * core::f64::consts::PI * 60.0,
        }
    }

    /// Apparent power base (VA).
    pub fn s_base(&self) -> f64 {
        self.s_base
    }

    /// Voltage base (V).
    pub fn v_base(&self) -> f64 {
        self.v_base
    }

    /// Angular frequency base (rad/s).
    pub fn omega_base(&self) -> f64 {
        self.omega_base
    }

    /// Current base `s / v`.
    pub fn i_base(&self) -> f64 {
        self.s_base / self.v_base
    }

    /// Impedance base `v² / s`.
    pub fn z_base(&self) -> f64 {
        self.v_base * self.v_base / self.s_base
    }

    /// Time base `1 / omega`.
    pub fn t_base(&self) -> f64 {
        1.0 / self.omega_base
    }

    fn base_of(&self, kind: Quantity) -> f64 {
        match kind {
            Quantity::Power => self.s_base,
            Quantity::Voltage => self.v_base,
            Quantity::Current => self.i_base(),
            Quantity::Impedance => self.z_base(),
            Quantity::Time => self.t_base(),
        }
    }

    /// SI value to per unit.
    pub fn to_per_unit(&self, value: f64, kind: Quantity) -> f64 {
        value / self.base_of(kind)
    }

    /// Per-unit value back to SI.
    pub fn from_per_unit(&self, value: f64, kind: Quantity) -> f64 {
        value * self.base_of(kind)
    }
}

impl Default for PerUnitBase {
    fn default() -> Self {
        Self::sixty_hz()
    }
}

/// Frame speed used throughout: 60 Hz in rad/s.
pub const OMEGA_60HZ: f64 = 2.0 * core::f64::consts::PI * 60.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_base_case() {
        let b = PerUnitBase::new(100e6, 230e3, OMEGA_60HZ).unwrap();
        assert_eq!(b.to_per_unit(100e6, Quantity::Power), 1.0);
        assert_eq!(b.to_per_unit(0.0, Quantity::Power), 0.0);
    }

    #[test]
    fn impedance_from_hand_base() {
        // 230 kV² / 100 MVA = 529 ohm
        let b = PerUnitBase::new(100e6, 230e3, OMEGA_60HZ).unwrap();
        assert!((b.to_per_unit(52.9, Quantity::Impedance) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_base() {
        assert!(PerUnitBase::new(0.0, 1.0, 1.0).is_err());
        assert!(PerUnitBase::new(1.0, -1.0, 1.0).is_err());
        assert!(PerUnitBase::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!("energy".parse::<Quantity>().is_err());
        assert_eq!("time".parse::<Quantity>().unwrap(), Quantity::Time);
    }
}
