use netsync_core::{detect_sync, estimate_period, integrate, phase_differences, sync_error, SyncVerdict, SystemSpec};
use serde::Serialize;

use super::{label, report};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{gnuplot_script, table_csv, Artifacts};

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub model: &'static str,
    pub n_nodes: usize,
    pub samples: usize,
    pub sync: Option<SyncVerdict>,
    /// Largest pairwise state distance at the final sample (planar networks).
    pub final_sync_error: Option<f64>,
    pub period: Option<f64>,
    pub period_stddev: Option<f64>,
}

/// Node pairs `(i, j)`, `i < j`.
fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

pub fn run(cfg: &RunConfig) -> CliResult<(Artifacts, SimulationSummary)> {
    let system = cfg.system();
    let integrator = cfg.integrator();
    let traj = integrate(system, cfg.x0(), &integrator)?;
    let n = system.n_nodes();
    let mut out = Artifacts::new();
    out.render("traj.csv", |w| traj.write_csv(w));

    let mut summary = SimulationSummary {
        model: system.name(),
        n_nodes: n,
        samples: traj.len(),
        sync: None,
        final_sync_error: None,
        period: None,
        period_stddev: None,
    };

    if n >= 2 {
        let pairs = all_pairs(n);
        let diffs = phase_differences(&traj, &pairs)?;
        let mut header = vec!["t".to_string()];
        header.extend(pairs.iter().map(|(i, j)| format!("d{i}_{j}")));
        let mut columns = vec![traj.times().to_vec()];
        columns.extend(diffs);
        out.text("phase_diffs.csv", table_csv(&header, &columns));
        summary.sync = Some(detect_sync(&traj, cfg.sync.hub, cfg.sync.tolerance)?);

        if matches!(system, SystemSpec::FhnStar { .. } | SystemSpec::FhnNetwork { .. }) {
            let nodes: Vec<usize> = (0..n).collect();
            let err = sync_error(&traj, &nodes)?;
            summary.final_sync_error = err.last().copied();
            out.render("sync_error.csv", |w| netsync_core::analysis::write_series_csv(w, traj.times(), &err));
        }
        if cfg.plot {
            out.text(
                "phase_diffs.gp",
                gnuplot_script("phase_diffs.csv", "phase differences", "t", "rad", pairs.len()),
            );
        }
    } else {
        let est = estimate_period(&traj, 0, None)?;
        summary.period = Some(est.period);
        summary.period_stddev = Some(est.stddev);
    }
    if cfg.plot {
        out.text("traj.gp", gnuplot_script("traj.csv", system.name(), "t", "state", traj.dim()));
    }
    out.json("verdict.json", &report("simulate", cfg, &summary));
    Ok((out, summary))
}

pub fn print_summary(s: &SimulationSummary) {
    println!("model {} nodes {} samples {}", s.model, s.n_nodes, s.samples);
    if let Some(v) = &s.sync {
        println!(
            "verdict {} (peripheral residual {:.3e}, hub residual {:.3e}, periods {:.1})",
            label(&v.classification),
            v.peripheral_residual,
            v.hub_residual,
            v.periods_observed
        );
        if let Some(t) = v.convergence_time {
            println!("converged at t = {t:.3}");
        }
    }
    if let Some(e) = s.final_sync_error {
        println!("final sync error {e:.3e}");
    }
    if let Some(p) = s.period {
        println!("period {p:.8}");
    }
}
