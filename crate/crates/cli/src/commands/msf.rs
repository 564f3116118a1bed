use netsync_core::{eigendecompose, evaluate_network_msf, laplacian, msf_sweep, FhnParams, Graph, MsfCurve, NetworkMsfReport, SystemSpec};
use serde::Serialize;

use super::{label, report};
use crate::config::{MsfSettings, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{gnuplot_script, Artifacts};

#[derive(Debug, Clone, Default)]
pub struct MsfOverrides {
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub steps: Option<usize>,
    pub graph: Option<Graph>,
    pub phi: Option<f64>,
}

/// Merges flags into the config's `msf` block; the network defaults to the
/// graph and coupling of an `fhn_network` system.
pub fn resolve(mut cfg: RunConfig, ov: MsfOverrides) -> CliResult<RunConfig> {
    let base = cfg.msf.take();
    let pick = |flag: Option<f64>, conf: Option<f64>, name: &str| {
        flag.or(conf)
            .ok_or_else(|| CliError::config(format!("missing --{name} (or msf.{} in the config)", name.replace('-', "_"))))
    };
    let gamma_min = pick(ov.gamma_min, base.as_ref().map(|b| b.gamma_min), "gamma-min")?;
    let gamma_max = pick(ov.gamma_max, base.as_ref().map(|b| b.gamma_max), "gamma-max")?;
    let steps = ov
        .steps
        .or(base.as_ref().map(|b| b.steps))
        .ok_or_else(|| CliError::config("missing --steps (or msf.steps in the config)"))?;
    let (net_graph, net_phi) = match cfg.system() {
        SystemSpec::FhnNetwork { graph, coupling, .. } => (Some(graph.clone()), Some(*coupling)),
        _ => (None, None),
    };
    let graph = ov.graph.or(base.as_ref().and_then(|b| b.graph.clone())).or(net_graph);
    let phi = ov.phi.or(base.as_ref().and_then(|b| b.phi)).or(net_phi);
    if graph.is_some() != phi.is_some() {
        return Err(CliError::config("a network report needs both a graph and a coupling phi"));
    }
    if gamma_min.partial_cmp(&gamma_max) != Some(std::cmp::Ordering::Less) || steps < 2 {
        return Err(CliError::config(format!(
            "bad gamma grid: need gamma_min < gamma_max and steps >= 2 (got [{gamma_min}, {gamma_max}], {steps})"
        )));
    }
    cfg.msf = Some(MsfSettings {
        gamma_min,
        gamma_max,
        steps,
        graph,
        phi,
    });
    Ok(cfg)
}

fn fhn_params(system: &SystemSpec) -> CliResult<FhnParams> {
    match system {
        SystemSpec::FhnSingle { params } | SystemSpec::FhnStar { params, .. } | SystemSpec::FhnNetwork { params, .. } => {
            Ok(*params)
        }
        other => Err(CliError::config(format!(
            "msf needs a FitzHugh-Nagumo system, got {}",
            other.name()
        ))),
    }
}

#[derive(Debug, Serialize)]
pub struct MsfSummary {
    pub period: f64,
    pub points: usize,
    pub diverged: usize,
    pub curve: MsfCurve,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSummary>,
}

#[derive(Debug, Serialize)]
pub struct NetworkSummary {
    pub eigenvalues: Vec<f64>,
    pub report: NetworkMsfReport,
}

pub fn run(cfg: &RunConfig) -> CliResult<(Artifacts, MsfSummary)> {
    let settings = cfg.msf.as_ref().expect("msf settings resolved");
    let params = fhn_params(cfg.system())?;
    let curve = msf_sweep(
        &params,
        (settings.gamma_min, settings.gamma_max),
        settings.steps,
        &cfg.integrator(),
    )?;
    let network = match (&settings.graph, settings.phi) {
        (Some(g), Some(phi)) => {
            let spec = eigendecompose(&laplacian(g))?;
            let report = evaluate_network_msf(&curve, &spec, phi)?;
            Some(NetworkSummary {
                eigenvalues: spec.eigenvalues,
                report,
            })
        }
        _ => None,
    };

    let mut out = Artifacts::new();
    out.render("msf.csv", |w| curve.write_csv(w));
    if cfg.plot {
        out.text("msf.gp", gnuplot_script("msf.csv", "master stability function", "gamma", "value", 2));
    }
    let summary = MsfSummary {
        period: curve.period,
        points: curve.gammas.len(),
        diverged: curve.values.iter().filter(|v| v.diverged).count(),
        curve,
        network,
    };
    if let Some(net) = &summary.network {
        out.json("network_report.json", &report("msf", cfg, net));
    }
    out.json("msf.json", &report("msf", cfg, &summary));
    Ok((out, summary))
}

pub fn print_summary(s: &MsfSummary) {
    println!(
        "cycle period {:.8}; {} gamma points, {} diverged",
        s.period, s.points, s.diverged
    );
    let c = &s.curve;
    if let Some(k) = c.gammas.iter().position(|g| g.abs() < 1e-12) {
        println!("msf(0) = {:.3e}", c.values[k].msf);
    }
    if let Some(net) = &s.network {
        println!("network coupling phi = {}", net.report.coupling);
        for m in &net.report.modes {
            println!(
                "  lambda {:.6} gamma {:.6} ln|mu|max {:+.4e} {}",
                m.eigenvalue,
                m.gamma,
                m.log_max_modulus,
                label(&m.verdict)
            );
        }
        println!("network verdict {}", label(&net.report.verdict));
    }
}
