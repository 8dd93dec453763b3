//! FFT power spectra of recorded signals.

use loadability_core::analysis::spectrum::detrend;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// One-sided power spectrum of the mean-removed signal.
///
/// Scaled so the bins sum to `Σ (x − x̄)²`, which makes band fractions
/// comparable with the direct-DFT route in the core crate.
pub fn power_spectrum(x: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut buf: Vec<Complex64> = detrend(x)
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let mut freq = Vec::with_capacity(half + 1);
    let mut power = Vec::with_capacity(half + 1);
    for (k, c) in buf.iter().take(half + 1).enumerate() {
        let mult = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
        freq.push(k as f64 / (n as f64 * dt));
        power.push(mult * c.norm_sqr() / n as f64);
    }
    (freq, power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use loadability_core::analysis::spectrum::{in_band_fraction, spectrum_fraction};

    #[test]
    fn parseval_holds() {
        let x: Vec<f64> = (0..501)
            .map(|k| (0.37 * k as f64).sin() + 0.2 * (1.3 * k as f64).cos() + 3.0)
            .collect();
        let (_, p) = power_spectrum(&x, 1e-3);
        let direct: f64 = detrend(&x).iter().map(|v| v * v).sum();
        assert!((p.iter().sum::<f64>() - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn matches_direct_dft_fraction() {
        let dt = 2e-4;
        let x: Vec<f64> = (0..5000)
            .map(|k| {
                let t = k as f64 * dt;
                (2.0 * std::f64::consts::PI * 60.0 * t).sin() * (-t).exp()
                    + 0.3 * (2.0 * std::f64::consts::PI * 7.0 * t).cos()
            })
            .collect();
        let (f, p) = power_spectrum(&x, dt);
        let a = spectrum_fraction(&f, &p, 60.0, 2.0);
        let b = in_band_fraction(&x, dt, 60.0, 2.0);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}
