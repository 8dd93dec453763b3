//! Command-line front end: scenario files, experiment runners and output
//! files for the `loadability` binary.

#![forbid(unsafe_code)]

pub mod experiments;
pub mod output;
pub mod scenario;
pub mod spectra;

use std::path::{Path, PathBuf};

use anyhow::Context;

use experiments::{InertiaOptions, Overrides, SweepOptions};
use scenario::{Scenario, ValidationError};

/// Exit code for invalid input.
pub const EXIT_INVALID: i32 = 2;
/// Exit code for a diverged run.
pub const EXIT_DIVERGED: i32 = 3;

/// How a command finished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    /// Everything written.
    Done,
    /// Partial output written; the run diverged at this time.
    Diverged(f64),
}

impl Status {
    /// Process exit code.
    pub fn code(self) -> i32 {
        match self {
            Status::Done => 0,
            Status::Diverged(_) => EXIT_DIVERGED,
        }
    }
}

/// Exit code for an error returned by a command.
pub fn error_code(e: &anyhow::Error) -> i32 {
    if e.chain().any(|c| c.is::<ValidationError>()) {
        EXIT_INVALID
    } else {
        1
    }
}

fn prepare_out(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

/// Files written by a command.
pub type Written = Vec<PathBuf>;

/// `run`: trace and loadability report of one scenario.
pub fn cmd_run(scenario: &Path, out: &Path, ov: &Overrides) -> anyhow::Result<(Status, Written)> {
    let scn = Scenario::load(scenario)?;
    let res = experiments::run(&scn, ov)?;
    prepare_out(out)?;
    let trace_path = out.join("trace.csv");
    let load_path = out.join("loadability.csv");
    let worst = output::write_trace(&trace_path, &res.sys, &res.trace, &res.records)?;
    output::write_loadability(&load_path, &res.loadability)?;
    log::info!(
        "{} samples, worst relative Tellegen residual {worst:.3e}",
        res.records.len()
    );
    let status = res.trace.diverged.map_or(Status::Done, Status::Diverged);
    Ok((status, vec![trace_path, load_path]))
}

fn tag(x: f64) -> String {
    format!("{x}")
}

/// `pv-sweep`: one PV file per curve plus the comparison table.
pub fn cmd_pv_sweep(
    scenario: &Path,
    out: &Path,
    opts: &SweepOptions,
) -> anyhow::Result<(Status, Written)> {
    let scn = Scenario::load(scenario)?;
    let res = experiments::pv_sweep(&scn, opts)?;
    prepare_out(out)?;
    let mut written = Vec::new();
    for c in &res.curves {
        let name = format!(
            "pv_x{}{}.csv",
            tag(c.line_x),
            if c.support { "_support" } else { "" }
        );
        let path = out.join(name);
        output::write_pv(&path, &c.points)?;
        let unstable = c
            .points
            .iter()
            .filter(|p| p.feasible && !p.is_stable())
            .count();
        log::info!(
            "x = {}{}: {} points, {unstable} not stable, max {:?}",
            c.line_x,
            if c.support { " (support)" } else { "" },
            c.points.len(),
            c.max.map(|m| m.p)
        );
        written.push(path);
    }
    if !res.summary.is_empty() {
        let path = out.join("summary.txt");
        output::write_text(&path, &output::summary_table(&res.summary))?;
        written.push(path);
    }
    Ok((Status::Done, written))
}

/// `inertia-demo`: spectra of both runs and their in-band fractions.
pub fn cmd_inertia_demo(
    scenario: &Path,
    out: &Path,
    opts: &InertiaOptions,
) -> anyhow::Result<(Status, Written)> {
    let scn = Scenario::load(scenario)?;
    let res = experiments::inertia_demo(&scn, opts)?;
    prepare_out(out)?;
    let spectra = out.join("spectra.csv");
    let fractions = out.join("fractions.csv");
    output::write_spectra(&spectra, &res)?;
    output::write_fractions(&fractions, &res)?;
    for r in &res.runs {
        log::info!("J = {}: {:.4} of AC energy within band", r.j, r.fraction);
    }
    let status = res
        .runs
        .iter()
        .find_map(|r| r.diverged)
        .map_or(Status::Done, Status::Diverged);
    Ok((status, vec![spectra, fractions]))
}
