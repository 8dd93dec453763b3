use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loadability::experiments::{InertiaOptions, Overrides, SweepOptions};

/// Energy-dynamics simulation and dynamic loadability experiments.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Worker threads for sweeps; defaults to the logical core count.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file.
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Integration step, s.
    #[arg(long)]
    step: Option<f64>,
    /// End time, s (the analysis window for inertia-demo).
    #[arg(long)]
    t_end: Option<f64>,
    /// Disturbance size: event magnitude, probe step or line-current offset.
    #[arg(long, allow_hyphen_values = true)]
    disturbance_mag: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            step: self.step,
            t_end: self.t_end,
            disturbance_mag: self.disturbance_mag,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Simulate a scenario and write the trace and loadability report.
    Run(Common),
    /// Sweep load resistance and classify each operating point.
    PvSweep {
        #[command(flatten)]
        common: Common,
        /// Line reactances, comma separated.
        #[arg(long, value_delimiter = ',')]
        line_inductance: Option<Vec<f64>>,
        /// Add the load-side reactive source and compare maxima.
        #[arg(long)]
        with_q_support: bool,
        /// Source reactive-power time constant, s.
        #[arg(long)]
        tau_q: Option<f64>,
        /// Source active-power time constant, s.
        #[arg(long)]
        tau_p: Option<f64>,
        /// Reactive power supplied by the source, p.u.
        #[arg(long, allow_hyphen_values = true)]
        q_setpoint: Option<f64>,
    },
    /// Compare line-power spectra under high and low machine inertia.
    InertiaDemo {
        #[command(flatten)]
        common: Common,
        /// Inertia of the first run, s.
        #[arg(long)]
        j_high: Option<f64>,
        /// Inertia of the second run, s.
        #[arg(long)]
        j_low: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOADABILITY_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    if let Some(n) = cli.parallel {
        if n == 0 {
            eprintln!("error: --parallel must be ≥ 1");
            return ExitCode::from(loadability::EXIT_INVALID as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("thread pool: {e}");
        }
    }
    let result = match &cli.cmd {
        Cmd::Run(c) => loadability::cmd_run(&c.scenario, &c.out, &c.overrides()),
        Cmd::PvSweep {
            common,
            line_inductance,
            with_q_support,
            tau_q,
            tau_p,
            q_setpoint,
        } => loadability::cmd_pv_sweep(
            &common.scenario,
            &common.out,
            &SweepOptions {
                line_x: line_inductance.clone(),
                with_support: *with_q_support,
                tau_p: *tau_p,
                tau_q: *tau_q,
                q_setpoint: *q_setpoint,
                overrides: common.overrides(),
            },
        ),
        Cmd::InertiaDemo {
            common,
            j_high,
            j_low,
        } => loadability::cmd_inertia_demo(
            &common.scenario,
            &common.out,
            &InertiaOptions {
                j_high: *j_high,
                j_low: *j_low,
                overrides: common.overrides(),
            },
        ),
    };
    match result {
        Ok((status, files)) => {
            for f in files {
                println!("{}", f.display());
            }
            if let loadability::Status::Diverged(t) = status {
                eprintln!("error: run diverged at t = {t}; partial output kept");
            }
            ExitCode::from(status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(loadability::error_code(&e) as u8)
        }
    }
}
