//! Runs the canned experiments and checks them against fixed thresholds.

use std::f64::consts::PI;
use std::path::Path;

use netsync_core::models::kuramoto_reduced_jacobian;
use netsync_core::{find_equilibrium, msf_point, settle_isolated_fhn, DiscAxis, KuramotoStarParams, Stability, SyncClass};
use serde::Serialize;

use super::{fixed, floquet, gershgorin, label, msf, simulate, topo, wien};
use crate::config::{Overrides, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{matrix_csv, Artifacts};

pub const KURAMOTO_STAR: &str = include_str!("../../configs/kuramoto_star.json");
pub const FHN_STAR: &str = include_str!("../../configs/fhn_star.json");
pub const FHN_NETWORK: &str = include_str!("../../configs/fhn_network.json");
pub const FIVE_NODE_GRAPH: &str = include_str!("../../configs/five_node_graph.json");
pub const WIEN: &str = include_str!("../../configs/wien.json");

/// Rounded spectrum quoted for the five-node network.
const QUOTED_SPECTRUM: [f64; 5] = [0.0, 0.8, 2.0, 2.6, 4.4];
/// Quoted non-trivial modulus at the largest sampled network mode.
const QUOTED_U2: (f64, f64) = (0.506, 0.24);

#[derive(Debug, Serialize)]
pub struct Check {
    pub experiment: &'static str,
    pub check: String,
    pub value: String,
    pub threshold: String,
    pub pass: bool,
}

#[derive(Default)]
struct Table {
    checks: Vec<Check>,
}

impl Table {
    fn add(&mut self, experiment: &'static str, check: impl Into<String>, value: String, threshold: &str, pass: bool) {
        self.checks.push(Check {
            experiment,
            check: check.into(),
            value,
            threshold: threshold.to_string(),
            pass,
        });
    }
}

fn canned(text: &str) -> CliResult<RunConfig> {
    RunConfig::from_json(text)?.resolve(&Overrides::default())
}

fn write(out: Artifacts, dir: &Path, sub: &str) -> CliResult<()> {
    out.write_all(&dir.join(sub)).map(|_| ())
}

fn kuramoto(dir: &Path, t: &mut Table) -> CliResult<()> {
    let cfg = canned(KURAMOTO_STAR)?;
    let (out, s) = simulate::run(&cfg)?;
    write(out, dir, "kuramoto_star")?;
    let v = s.sync.as_ref().ok_or_else(|| CliError::failure("no sync verdict"))?;
    t.add(
        "kuramoto_star",
        "verdict",
        label(&v.classification),
        "complete_sync",
        v.classification == SyncClass::CompleteSync,
    );
    let worst = v.peripheral_residual.max(v.hub_residual);
    t.add(
        "kuramoto_star",
        "max phase difference (final window)",
        format!("{worst:.2e}"),
        "< 1e-2 rad",
        worst < 1e-2,
    );
    Ok(())
}

fn star_jacobian(dir: &Path, t: &mut Table) -> CliResult<()> {
    let params = KuramotoStarParams::identical(3, 1.0, 1.0);
    let eq = find_equilibrium(&params, &[6.0, 6.0, 6.0])?;
    let at_2pi = eq.x_star.iter().map(|x| (x - 2.0 * PI).abs()).fold(0.0, f64::max);
    t.add(
        "star_jacobian",
        "equilibrium at 2 pi",
        format!("{at_2pi:.1e}"),
        "<= 1e-9",
        at_2pi <= 1e-9,
    );
    let jac = kuramoto_reduced_jacobian(&eq.x_star, &params)?;
    let cfg = gershgorin::GershgorinConfig {
        matrix: jac,
        axis: DiscAxis::Row,
    };
    let (mut out, s) = gershgorin::run(&cfg)?;
    out.text("jacobian.csv", matrix_csv(&cfg.matrix));
    write(out, dir, "star_jacobian")?;
    let err = s
        .eigenvalues
        .iter()
        .zip([-4.0, -1.0, -1.0])
        .map(|(z, e)| (z - e).norm())
        .fold(0.0, f64::max);
    let shown: Vec<String> = s.eigenvalues.iter().map(|z| fixed(z.re, 6)).collect();
    t.add(
        "star_jacobian",
        "eigenvalues {-4, -1, -1}",
        shown.join(" "),
        "within 1e-9",
        err <= 1e-9,
    );
    t.add(
        "star_jacobian",
        "Gershgorin discs in left half-plane",
        s.left_half_plane.to_string(),
        "true",
        s.left_half_plane,
    );
    t.add(
        "star_jacobian",
        "eigenvalues inside disc union",
        s.eigenvalues_inside.to_string(),
        "true",
        s.eigenvalues_inside,
    );
    Ok(())
}

fn fhn_star(dir: &Path, t: &mut Table) -> CliResult<()> {
    let mut cfg = canned(FHN_STAR)?;
    if let Some(i) = cfg.integrator.as_mut() {
        i.sample_every = 1;
    }
    let (out, s) = floquet::run(&cfg)?;
    write(out, dir, "fhn_star")?;
    let near_one = s.multipliers.iter().filter(|z| (**z - 1.0).norm() <= 0.05).count();
    t.add(
        "fhn_star",
        "multipliers within 0.05 of 1",
        near_one.to_string(),
        "exactly 1",
        near_one == 1,
    );
    t.add(
        "fhn_star",
        "max non-trivial modulus",
        format!("{:.5}", s.max_nontrivial_modulus),
        "< 1",
        s.max_nontrivial_modulus < 1.0,
    );
    Ok(())
}

fn network(dir: &Path, t: &mut Table) -> CliResult<()> {
    let graph = netsync_core::Graph::from_json(FIVE_NODE_GRAPH)?;
    let (out, spec) = topo::run(&topo::TopoSource::Edges { graph })?;
    write(out, dir, "network/topology")?;
    let dev = spec
        .eigenvalues
        .iter()
        .zip(QUOTED_SPECTRUM)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let shown: Vec<String> = spec.eigenvalues.iter().map(|v| fixed(*v, 4)).collect();
    t.add(
        "network",
        "Laplacian spectrum vs {0, 0.8, 2.0, 2.6, 4.4}",
        shown.join(" "),
        "within 0.05",
        dev <= 0.05,
    );

    let mut cfg = msf::resolve(canned(FHN_NETWORK)?, msf::MsfOverrides::default())?;
    if let Some(i) = cfg.integrator.as_mut() {
        i.sample_every = 1;
    }
    let (out, s) = msf::run(&cfg)?;
    write(out, dir, "network/msf")?;
    let c = &s.curve;
    let msf0 = c
        .gammas
        .iter()
        .position(|g| g.abs() < 1e-12)
        .map_or(f64::NAN, |k| c.values[k].msf);
    t.add("network", "msf(0)", format!("{msf0:.2e}"), "|.| <= 5e-3", msf0.abs() <= 5e-3);
    let pos = c.gammas.iter().zip(&c.values).filter(|(g, _)| **g > 1e-12).all(|(_, v)| !v.diverged && v.msf < 0.0);
    t.add("network", "msf < 0 for sampled gamma > 0", pos.to_string(), "true", pos);
    let neg = c
        .gammas
        .iter()
        .zip(&c.values)
        .filter(|(g, _)| **g < -0.05)
        .all(|(_, v)| v.max_floquet_modulus > 1.0);
    t.add("network", "max modulus > 1 for sampled gamma < -0.05", neg.to_string(), "true", neg);
    let verdict = s.network.as_ref().map(|n| n.report.verdict);
    t.add(
        "network",
        "network verdict at phi = 0.115",
        verdict.map_or("none".into(), |v| label(&v)),
        "stable",
        verdict == Some(Stability::Stable),
    );

    let params = netsync_core::FhnParams::default();
    let integrator = cfg.integrator();
    let cycle = settle_isolated_fhn(&params, &integrator)?;
    let (u2, _) = msf_point(&params, &cycle, QUOTED_U2.0, &integrator)?;
    t.add(
        "network",
        "max modulus at gamma = 0.506",
        format!("{:.5}", u2.max_floquet_modulus),
        "0.24 +/- 0.10",
        (u2.max_floquet_modulus - QUOTED_U2.1).abs() <= 0.10,
    );

    let sim_cfg = canned(FHN_NETWORK)?;
    let (out, s) = simulate::run(&sim_cfg)?;
    write(out, dir, "network/simulation")?;
    let e = s.final_sync_error.unwrap_or(f64::INFINITY);
    t.add("network", "final sync error", format!("{e:.2e}"), "< 1e-3", e < 1e-3);
    Ok(())
}

fn wien_bridge(dir: &Path, t: &mut Table) -> CliResult<()> {
    let cfg = canned(WIEN)?;
    let (out, s) = wien::run(&cfg)?;
    write(out, dir, "wien")?;
    t.add(
        "wien",
        "frequency vs 159.155 Hz",
        format!("{:.3} Hz", s.measured_frequency_hz),
        "within 5%",
        (s.measured_frequency_hz - 159.155).abs() / 159.155 <= 0.05,
    );
    let rel = s.amplitude_rel_error.unwrap_or(f64::INFINITY);
    t.add(
        "wien",
        "amplitude vs 2 sqrt((G0-3)/k)",
        format!("{:.4} ({:.1}%)", s.amplitude, 100.0 * rel),
        "within 10%",
        rel <= 0.10,
    );
    Ok(())
}

/// Runs every experiment, writes artifacts under `dir` and returns the checks.
pub fn run(dir: &Path) -> CliResult<Vec<Check>> {
    let mut t = Table::default();
    kuramoto(dir, &mut t)?;
    star_jacobian(dir, &mut t)?;
    fhn_star(dir, &mut t)?;
    network(dir, &mut t)?;
    wien_bridge(dir, &mut t)?;
    let mut out = Artifacts::new();
    out.json("reproduce.json", &t.checks);
    out.write_all(dir)?;
    Ok(t.checks)
}

pub fn print_table(checks: &[Check]) {
    let w_exp = checks.iter().map(|c| c.experiment.len()).max().unwrap_or(0);
    let w_chk = checks.iter().map(|c| c.check.len()).max().unwrap_or(0);
    let w_val = checks.iter().map(|c| c.value.len()).max().unwrap_or(0);
    for c in checks {
        println!(
            "{:<w_exp$}  {:<w_chk$}  {:<w_val$}  {:<14}  {}",
            c.experiment,
            c.check,
            c.value,
            c.threshold,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {} passed, {} failed", checks.len(), checks.len() - failed, failed);
}
