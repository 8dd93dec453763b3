//! Band energy of sampled signals.

use alloc::vec::Vec;

use crate::port::C64;

/// Mean-removed copy of a signal.
pub fn detrend(x: &[f64]) -> Vec<f64> {
    let m = x.iter().sum::<f64>() / x.len().max(1) as f64;
    x.iter().map(|v| v - m).collect()
}

/// Energy of the AC part, `Σ (x − mean)²`.
pub fn ac_energy(x: &[f64]) -> f64 {
    detrend(x).iter().map(|v| v * v).sum()
}

/// Energy of the DFT bins with frequency in `[lo, hi]`, normalised so the
/// bins of the whole one-sided spectrum add up to [`ac_energy`].
///
/// Bins are evaluated directly, so the cost is `O(N · bins)`.
pub fn band_energy(x: &[f64], dt: f64, lo: f64, hi: f64) -> f64 {
    let y = detrend(x);
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    let df = 1.0 / (n as f64 * dt);
    let k_lo = libm::ceil(lo / df).max(1.0) as usize;
    let k_hi = (libm::floor(hi / df) as usize).min(n / 2);
    let mut e = 0.0;
    for k in k_lo..=k_hi {
        let w = -2.0 * core::f64::consts::PI * k as f64 / n as f64;
        let rot = C64::from_polar(1.0, w);
        let mut ph = C64::new(1.0, 0.0);
        let mut acc = C64::default();
        for v in &y {
            acc += ph * *v;
            ph *= rot;
        }
        // one-sided: double every bin except Nyquist
        let mult = if 2 * k == n { 1.0 } else { 2.0 };
        e += mult * acc.norm_sqr() / n as f64;
    }
    e
}

/// Fraction of AC energy in `center ± half_width`.
pub fn in_band_fraction(x: &[f64], dt: f64, center: f64, half_width: f64) -> f64 {
    let total = ac_energy(x);
    if total <= 0.0 {
        return f64::NAN;
    }
    band_energy(x, dt, center - half_width, center + half_width) / total
}

/// Fraction of a one-sided power spectrum in a band, excluding DC.
pub fn spectrum_fraction(freq: &[f64], power: &[f64], center: f64, half_width: f64) -> f64 {
    let mut band = 0.0;
    let mut total = 0.0;
    for (f, p) in freq.iter().zip(power) {
        if *f <= 0.0 {
            continue;
        }
        total += p;
        if (*f - center).abs() <= half_width {
            band += p;
        }
    }
    if total > 0.0 {
        band / total
    } else {
        f64::NAN
    }
}

/// In-band fractions of the two inertia runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumReport {
    /// Inertia of the first run.
    pub j_high: f64,
    /// Inertia of the second run.
    pub j_low: f64,
    /// In-band fraction of the first run.
    pub fraction_high: f64,
    /// In-band fraction of the second run.
    pub fraction_low: f64,
}
