//! Port variables: effort, flow and their time derivatives.
//!
//! Two-axis quantities are stored as complex numbers `d + j q`. Flow is
//! positive into the port. The port power is the real inner product
//! `e·f = Re(e f*)`, which is the three-phase instantaneous power in the
//! power-invariant scaling used here.

pub use num_complex::Complex64 as C64;

/// Real inner product of two dq vectors.
#[inline]
pub fn dot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Effort, flow and their analytic time derivatives at one port.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PortVariables {
    /// Effort (bus voltage), p.u.
    pub e: C64,
    /// Flow (current into the port), p.u.
    pub f: C64,
    /// d e / dt, p.u. per second.
    pub de: C64,
    /// d f / dt, p.u. per second.
    pub df: C64,
}

impl PortVariables {
    /// Bundle the four port quantities.
    pub fn new(e: C64, f: C64, de: C64, df: C64) -> Self {
        Self { e, f, de, df }
    }

    /// Instantaneous power into the port, `e·f`.
    pub fn power(&self) -> f64 {
        dot(self.e, self.f)
    }

    /// Time derivative of [`power`](Self::power).
    pub fn power_rate(&self) -> f64 {
        dot(self.de, self.f) + dot(self.e, self.df)
    }

    /// `e·ḟ − f·ė` with the uniform (network) sign.
    pub fn qdot(&self) -> f64 {
        dot(self.e, self.df) - dot(self.f, self.de)
    }

    /// Reactive power into the port, `Im(e f*)`.
    pub fn reactive_power(&self) -> f64 {
        (self.e * self.f.conj()).im
    }

    /// Same port seen from the other side: flow and its rate negated.
    pub fn reversed(&self) -> Self {
        Self {
            e: self.e,
            f: -self.f,
            de: self.de,
            df: -self.df,
        }
    }

    /// Express the port in a stationary frame.
    ///
    /// `theta` is the dq frame angle at this instant and `omega` its speed in
    /// rad/s. Values rotate by `e^{jθ}` and every derivative picks up the
    /// `jω` frame term.
    pub fn to_stationary(&self, theta: f64, omega: f64) -> Self {
        let r = C64::from_polar(1.0, theta);
        let jw = C64::new(0.0, omega);
        Self {
            e: self.e * r,
            f: self.f * r,
            de: (self.de + jw * self.e) * r,
            df: (self.df + jw * self.f) * r,
        }
    }

    /// Phase-a waveform of the port: `(v_a, i_a, dv_a/dt, di_a/dt)`.
    ///
    /// Reconstruction is the real part of the stationary-frame value, so a
    /// steady dq phasor `E` maps to `|E| cos(ωt + arg E)`.
    pub fn phase_a(&self, theta: f64, omega: f64) -> PortVariables {
        let s = self.to_stationary(theta, omega);
        PortVariables {
            e: C64::new(s.e.re, 0.0),
            f: C64::new(s.f.re, 0.0),
            de: C64::new(s.de.re, 0.0),
            df: C64::new(s.df.re, 0.0),
        }
    }
}

impl core::ops::Add for PortVariables {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            e: self.e + o.e,
            f: self.f + o.f,
            de: self.de + o.de,
            df: self.df + o.df,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_is_inner_product() {
        let p = PortVariables::new(
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::default(),
            C64::default(),
        );
        assert_eq!(p.power(), 2.0);
        let p = PortVariables::new(
            C64::new(0.0, 0.0),
            C64::new(5.0, 1.0),
            C64::default(),
            C64::default(),
        );
        assert_eq!(p.power(), 0.0);
    }

    #[test]
    fn stationary_steady_state_qdot_is_twice_omega_q() {
        // constant dq phasors: e = 1, f = 1∠-30°
        let f = C64::from_polar(1.0, -core::f64::consts::FRAC_PI_6);
        let p = PortVariables::new(C64::new(1.0, 0.0), f, C64::default(), C64::default());
        let w = 377.0;
        let s = p.to_stationary(0.3, w);
        assert!((s.qdot() - 2.0 * w * p.reactive_power()).abs() < 1e-9);
        assert!((s.power() - p.power()).abs() < 1e-12);
    }

    #[test]
    fn reversed_flips_flow_only() {
        let p = PortVariables::new(
            C64::new(1.0, 2.0),
            C64::new(3.0, 4.0),
            C64::new(5.0, 6.0),
            C64::new(7.0, 8.0),
        );
        let r = p.reversed();
        assert_eq!(r.e, p.e);
        assert_eq!(r.f, -p.f);
        assert_eq!(r.power(), -p.power());
        assert_eq!(r.qdot(), -p.qdot());
    }
}
