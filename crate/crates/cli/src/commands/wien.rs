use netsync_core::{estimate_period, integrate, SystemSpec};
use serde::Serialize;

use super::report;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{gnuplot_script, Artifacts};

#[derive(Debug, Serialize)]
pub struct WienSummary {
    pub natural_frequency_hz: f64,
    pub measured_frequency_hz: f64,
    pub frequency_rel_error: f64,
    pub period: f64,
    pub period_stddev: f64,
    /// Peak `|v|` over the post-transient window.
    pub amplitude: f64,
    /// `2 sqrt((G0 - 3) / k_nl)`.
    pub averaged_amplitude: Option<f64>,
    pub amplitude_rel_error: Option<f64>,
}

pub fn run(cfg: &RunConfig) -> CliResult<(Artifacts, WienSummary)> {
    let params = match cfg.system() {
        SystemSpec::WienBridge { params } => *params,
        other => {
            return Err(CliError::config(format!(
                "wien needs a wien_bridge system or a circuit, got {}",
                other.name()
            )))
        }
    };
    let traj = integrate(cfg.system(), cfg.x0(), &cfg.integrator())?;
    let est = estimate_period(&traj, 0, None)?;
    let v = traj.component(0);
    let amplitude = v[traj.analysis_start()..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let natural = params.natural_frequency_hz();
    let measured = 1.0 / est.period;
    let averaged = params.averaged_amplitude();
    let summary = WienSummary {
        natural_frequency_hz: natural,
        measured_frequency_hz: measured,
        frequency_rel_error: (measured - natural).abs() / natural,
        period: est.period,
        period_stddev: est.stddev,
        amplitude,
        averaged_amplitude: averaged,
        amplitude_rel_error: averaged.map(|a| (amplitude - a).abs() / a),
    };
    let mut out = Artifacts::new();
    out.render("traj.csv", |w| traj.write_csv(w));
    if cfg.plot {
        out.text("traj.gp", gnuplot_script("traj.csv", "Wien bridge", "t (s)", "v (V)", 1));
    }
    out.json("wien.json", &report("wien", cfg, &summary));
    Ok((out, summary))
}

pub fn print_summary(s: &WienSummary) {
    println!(
        "frequency {:.4} Hz (1/(2 pi RC) = {:.4} Hz, rel. error {:.2e})",
        s.measured_frequency_hz, s.natural_frequency_hz, s.frequency_rel_error
    );
    match s.averaged_amplitude {
        Some(a) => println!("amplitude {:.5} (averaged estimate {a:.5})", s.amplitude),
        None => println!("amplitude {:.5}", s.amplitude),
    }
}
