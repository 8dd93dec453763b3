//! CSV and text writers.
//!
//! Numbers are written with 12 significant digits.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use loadability_core::analysis::dissipativity::LoadabilityRow;
use loadability_core::analysis::PvPoint;
use loadability_core::sim::{Record, Trace};
use loadability_core::CompositeSystem;

use crate::experiments::{InertiaResult, SummaryRow};

/// 12 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.11e}")
}

// lossless components have no finite time constant
fn tau(v: f64) -> String {
    if v.is_nan() {
        "inf".into()
    } else {
        num(v)
    }
}

fn writer(path: &Path) -> anyhow::Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

/// Column names of the trace file.
pub fn trace_header(sys: &CompositeSystem) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for (c, comp) in sys.components().iter().enumerate() {
        let name = &sys.names()[c];
        h.extend(comp.state_names().iter().map(|s| format!("{name}.{s}")));
    }
    for (c, comp) in sys.components().iter().enumerate() {
        let name = &sys.names()[c];
        for k in 0..comp.n_ports() {
            for q in ["e", "f", "de", "df"] {
                for axis in ["d", "q"] {
                    h.push(format!("{name}.{k}.{q}_{axis}"));
                }
            }
        }
    }
    for name in sys.names() {
        for q in ["E", "D", "tau", "Et", "p", "P", "Qdot"] {
            h.push(format!("{name}.{q}"));
        }
    }
    h.extend(
        [
            "tellegen_p",
            "tellegen_pdot",
            "tellegen_qdot",
            "tellegen_scale",
        ]
        .map(String::from),
    );
    h
}

/// Write the trace; returns the worst Tellegen residual relative to its
/// scale.
pub fn write_trace(
    path: &Path,
    sys: &CompositeSystem,
    trace: &Trace,
    records: &[Record],
) -> anyhow::Result<f64> {
    let mut w = writer(path)?;
    w.write_record(trace_header(sys))?;
    let mut worst = 0.0_f64;
    for (k, rec) in records.iter().enumerate() {
        let mut row =
            Vec::with_capacity(1 + trace.dim + 8 * sys.n_ports() + 7 * rec.energy.len() + 4);
        row.push(num(trace.t[k]));
        row.extend(trace.state(k).iter().map(|v| num(*v)));
        for p in &rec.eval.ports {
            for z in [p.e, p.f, p.de, p.df] {
                row.push(num(z.re));
                row.push(num(z.im));
            }
        }
        for s in &rec.energy {
            row.extend([
                num(s.stored),
                num(s.dissipated),
                tau(s.tau),
                num(s.tangent),
                num(s.net_rate),
                num(s.power()),
                num(s.qdot()),
            ]);
        }
        let tg = &rec.tellegen;
        row.extend([tg.residual_p, tg.residual_pdot, tg.residual_qdot, tg.scale].map(num));
        worst = worst.max(tg.relative());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(worst)
}

/// Write the loadability report.
pub fn write_loadability(path: &Path, rows: &[LoadabilityRow]) -> anyhow::Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "t",
        "lhs",
        "rhs",
        "margin",
        "sdot",
        "s",
        "sdot_boundary",
        "dissipativity_margin",
        "tau_line",
        "tau_spread",
    ])?;
    for r in rows {
        w.write_record(
            [
                r.t,
                r.lhs,
                r.rhs,
                r.margin,
                r.storage_rate,
                r.supply_rate,
                r.storage_rate_boundary,
                r.dissipativity_margin,
                r.tau_line,
                r.tau_spread,
            ]
            .map(num),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Write one PV curve. Grid points without an operating point are skipped.
pub fn write_pv(path: &Path, points: &[PvPoint]) -> anyhow::Result<()> {
    let mut w = writer(path)?;
    w.write_record(["R", "V", "P", "stable", "branch"])?;
    for p in points.iter().filter(|p| p.feasible) {
        w.write_record([
            num(p.r),
            num(p.v),
            num(p.p),
            p.stability.label().to_string(),
            p.branch.map_or("", |b| b.label()).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.6}"),
        _ => "-".into(),
    }
}

/// Aligned maximum-power comparison table.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let header = [
        "line_x",
        "p_max",
        "v_at_p_max",
        "p_max_support",
        "v_at_p_max_support",
        "increase",
        "estimate_source",
        "estimate_all",
    ];
    let body: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                format!("{:.4}", r.line_x),
                cell(r.without.map(|m| m.p)),
                cell(r.without.map(|m| m.v)),
                cell(r.with.map(|m| m.p)),
                cell(r.with.map(|m| m.v)),
                cell(r.increase()),
                cell(Some(r.estimate_support)),
                cell(Some(r.estimate_all)),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &body {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &[&str], out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&header, &mut out);
    for row in &body {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&cells, &mut out);
    }
    out
}

/// Write text to a file.
pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Both spectra on the shared frequency grid.
pub fn write_spectra(path: &Path, res: &InertiaResult) -> anyhow::Result<()> {
    let [a, b] = &res.runs;
    let mut w = writer(path)?;
    w.write_record([
        "freq_hz",
        &format!("power_j{}", a.j),
        &format!("power_j{}", b.j),
    ])?;
    let n = a.spectrum.0.len().min(b.spectrum.0.len());
    for k in 0..n {
        w.write_record([
            num(a.spectrum.0[k]),
            num(a.spectrum.1[k]),
            num(b.spectrum.1[k]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// In-band fractions of the two inertia runs.
pub fn write_fractions(path: &Path, res: &InertiaResult) -> anyhow::Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "j",
        "center_hz",
        "half_width_hz",
        "in_band",
        "in_band_fft",
        "out_of_band",
    ])?;
    for r in &res.runs {
        w.write_record(
            [
                r.j,
                res.center,
                res.half_width,
                r.fraction,
                r.fraction_fft,
                1.0 - r.fraction,
            ]
            .map(num),
        )?;
    }
    w.flush()?;
    Ok(())
}
