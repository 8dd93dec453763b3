//! Storage and supply rates, the load bound and its boundary-only form.

use alloc::vec::Vec;

use crate::component::Role;
use crate::energy::EnergySnapshot;
use crate::network::{boundary_injections, BoundaryInjection, CompositeSystem};
use crate::sim::Record;

/// `4 Σ E_t` over the transmission lines.
pub fn storage_rate(lines: &[EnergySnapshot]) -> f64 {
    4.0 * lines.iter().map(|s| s.tangent).sum::<f64>()
}

/// `Σ −P/τ` over generators, sources and loads.
pub fn supply_rate(boundary: &[BoundaryInjection]) -> f64 {
    boundary.iter().map(|b| -b.p / b.tau).sum()
}

/// Storage rate rebuilt from boundary quantities and the total line energy
/// with one shared line time constant.
pub fn sdot_boundary_form(line_stored: f64, tau_line: f64, boundary: &[BoundaryInjection]) -> f64 {
    let mut s = line_stored / (tau_line * tau_line);
    for b in boundary {
        s -= b.pdot + b.qdot - b.p / tau_line;
    }
    s
}

/// `(lhs, rhs)` of the load inequality: weighted load power on the left,
/// line energy, boundary rates and generator output on the right.
pub fn loadability_bound(
    line_stored: f64,
    tau_line: f64,
    boundary: &[BoundaryInjection],
) -> (f64, f64) {
    let mut lhs = 0.0;
    let mut rhs = -line_stored / (tau_line * tau_line);
    for b in boundary {
        let weight = 1.0 / tau_line + 1.0 / b.tau;
        rhs += b.pdot + b.qdot;
        if b.role == Role::Load {
            lhs += weight * b.p;
        } else {
            rhs -= weight * b.p;
        }
    }
    (lhs, rhs)
}

/// `s − Ṡ`; non-negative when the network is dissipative at that instant.
pub fn dissipativity_margin(supply: f64, storage_rate: f64) -> f64 {
    supply - storage_rate
}

/// One row of the loadability report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadabilityRow {
    /// Time, s.
    pub t: f64,
    /// Weighted load power.
    pub lhs: f64,
    /// Bound on the weighted load power.
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    /// `4 Σ E_t` over lines.
    pub storage_rate: f64,
    /// Storage rate from the boundary-only form.
    pub storage_rate_boundary: f64,
    /// Supply rate.
    pub supply_rate: f64,
    /// `s − Ṡ` with the tangent-energy storage rate.
    pub dissipativity_margin: f64,
    /// Shared line time constant used, s.
    pub tau_line: f64,
    /// `(max − min) / mean` of the line time constants.
    pub tau_spread: f64,
}

/// Shared line time constant (mean of the lines' nominal values) and the
/// relative spread among them.
pub fn shared_line_tau(sys: &CompositeSystem) -> Option<(f64, f64)> {
    let taus: Vec<f64> = sys
        .components()
        .iter()
        .filter(|c| c.role() == Role::Line)
        .map(|c| c.nominal_tau(sys.omega_b()))
        .collect();
    if taus.is_empty() {
        return None;
    }
    let mean = taus.iter().sum::<f64>() / taus.len() as f64;
    let (lo, hi) = taus
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    Some((mean, (hi - lo) / mean))
}

/// Evaluate the report at one recorded instant.
pub fn loadability_row(sys: &CompositeSystem, rec: &Record) -> Option<LoadabilityRow> {
    let (tau_line, tau_spread) = shared_line_tau(sys)?;
    let boundary = boundary_injections(sys, &rec.eval, &rec.energy);
    let lines: Vec<EnergySnapshot> = sys
        .components()
        .iter()
        .zip(&rec.energy)
        .filter(|(c, _)| c.role() == Role::Line)
        .map(|(_, s)| s.clone())
        .collect();
    let line_stored: f64 = lines.iter().map(|s| s.stored).sum();
    let (lhs, rhs) = loadability_bound(line_stored, tau_line, &boundary);
    let sdot = storage_rate(&lines);
    let supply = supply_rate(&boundary);
    Some(LoadabilityRow {
        t: rec.eval.t,
        lhs,
        rhs,
        margin: rhs - lhs,
        storage_rate: sdot,
        storage_rate_boundary: sdot_boundary_form(line_stored, tau_line, &boundary),
        supply_rate: supply,
        dissipativity_margin: dissipativity_margin(supply, sdot),
        tau_line,
        tau_spread,
    })
}

/// Change of a boundary component's rates between two runs at matched times.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryDelta {
    /// `Δ Ṗ`.
    pub pdot: f64,
    /// `Δ Q̇`.
    pub qdot: f64,
}

/// Bound on the change of the weighted load sum: `Σ (ΔṖ + ΔQ̇)` over the
/// supplied boundary components.
pub fn loadability_delta_bound(deltas: &[BoundaryDelta]) -> f64 {
    deltas.iter().map(|d| d.pdot + d.qdot).sum()
}
