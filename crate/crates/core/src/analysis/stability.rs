//! Time-domain stability classification after a probe disturbance.

use alloc::vec::Vec;

use crate::network::CompositeSystem;
use crate::sim::Trace;

/// Outcome of a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    /// Returned to the reference operating point with a decaying envelope.
    Stable,
    /// Diverged, growing, or still away from the reference after the
    /// required number of periods.
    Unstable,
    /// Decaying but not yet returned within a window shorter than the
    /// required number of periods.
    Inconclusive,
}

impl Stability {
    /// `stable`, `unstable` or `inconclusive`.
    pub fn label(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// Thresholds of the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCriterion {
    /// Return tolerance on the rotation-invariant state, p.u.
    pub eps: f64,
    /// Required post-disturbance window in dominant periods.
    pub min_periods: f64,
    /// Relative growth of the envelope still counted as non-increasing.
    pub envelope_slack: f64,
}

impl Default for StabilityCriterion {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            min_periods: 20.0,
            envelope_slack: 0.02,
        }
    }
}

/// Diagnostics behind a classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityDetail {
    /// Verdict.
    pub verdict: Stability,
    /// Deviation from the reference at the last sample, `‖·‖∞`.
    pub final_deviation: f64,
    /// Envelope over the earlier and later halves of the final third.
    pub envelope: (f64, f64),
    /// Estimated dominant period, s (infinite when no oscillation is seen).
    pub period: f64,
}

/// Classify the part of `trace` after `settle_from` against `reference`.
///
/// Deviations are taken in rotation-invariant coordinates, so a common
/// phase drift accumulated during the transient does not count.
pub fn classify_stability(
    sys: &CompositeSystem,
    trace: &Trace,
    settle_from: f64,
    reference: &[f64],
    crit: &StabilityCriterion,
) -> StabilityDetail {
    let unstable = |dev| StabilityDetail {
        verdict: Stability::Unstable,
        final_deviation: dev,
        envelope: (f64::NAN, f64::NAN),
        period: f64::NAN,
    };
    if trace.diverged.is_some() {
        return unstable(f64::INFINITY);
    }
    let reference = sys.canonical(reference);
    let idx: Vec<usize> = (0..trace.len())
        .filter(|&k| trace.t[k] >= settle_from)
        .collect();
    if idx.len() < 6 {
        return StabilityDetail {
            verdict: Stability::Inconclusive,
            final_deviation: f64::NAN,
            envelope: (f64::NAN, f64::NAN),
            period: f64::NAN,
        };
    }
    // deviation vectors; the state with the largest excursion drives the
    // period estimate
    let n = trace.dim;
    let mut dev = Vec::with_capacity(idx.len());
    let mut peak = alloc::vec![0.0_f64; n];
    for &k in &idx {
        let y = sys.canonical(trace.state(k));
        let d: Vec<f64> = y.iter().zip(&reference).map(|(a, b)| a - b).collect();
        for i in 0..n {
            peak[i] = peak[i].max(d[i].abs());
        }
        dev.push(d);
    }
    let norms: Vec<f64> = dev.iter().map(|d| crate::linalg::inf_norm(d)).collect();
    let final_deviation = *norms.last().unwrap_or(&f64::NAN);
    if !final_deviation.is_finite() {
        return unstable(f64::INFINITY);
    }
    let lead = (0..n).fold(0, |m, i| if peak[i] > peak[m] { i } else { m });
    let mut crossings = Vec::new();
    for w in 1..dev.len() {
        let (a, b) = (dev[w - 1][lead], dev[w][lead]);
        if a != 0.0 && a.signum() != b.signum() {
            crossings.push(trace.t[idx[w]]);
        }
    }
    let period = if crossings.len() >= 3 {
        let span = crossings[crossings.len() - 1] - crossings[0];
        2.0 * span / (crossings.len() - 1) as f64
    } else {
        f64::INFINITY
    };
    let window = trace.t[*idx.last().unwrap_or(&0)] - settle_from;
    let third = norms.len() * 2 / 3;
    let mid = third + (norms.len() - third) / 2;
    let env = |r: &[f64]| r.iter().fold(0.0_f64, |m, v| m.max(*v));
    let envelope = (env(&norms[third..mid]), env(&norms[mid..]));
    // judged on the tail envelope, so a zero crossing at the last sample
    // does not pass for a return
    let returned = envelope.1 < crit.eps;
    let decaying =
        envelope.1 <= envelope.0 * (1.0 + crit.envelope_slack) || envelope.1 < 0.1 * crit.eps;
    // a growing envelope is unstable at once; a decaying one that has not
    // yet returned needs the full window of periods before it is condemned
    let verdict = if returned && decaying {
        Stability::Stable
    } else if !decaying || (period.is_finite() && window >= crit.min_periods * period) {
        Stability::Unstable
    } else {
        Stability::Inconclusive
    };
    StabilityDetail {
        verdict,
        final_deviation,
        envelope,
        period,
    }
}
