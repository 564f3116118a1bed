use netsync_core::{
    floquet_multipliers, settle_to_limit_cycle, system_monodromy, Complex64, Matrix, Stability,
};
use serde::Serialize;

use super::{label, report};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::Artifacts;

#[derive(Debug, Serialize)]
pub struct Liouville {
    pub determinant: f64,
    pub exp_trace_integral: f64,
}

#[derive(Debug, Serialize)]
pub struct FloquetSummary {
    pub model: &'static str,
    pub period: f64,
    pub period_stddev: f64,
    pub return_error: f64,
    pub anchor: Vec<f64>,
    pub monodromy: Matrix,
    pub liouville: Liouville,
    /// Sorted by descending modulus, as `[re, im]`.
    pub multipliers: Vec<Complex64>,
    pub moduli: Vec<f64>,
    pub trivial_index: usize,
    pub trivial_tolerance: f64,
    pub max_nontrivial_modulus: f64,
    pub stable: bool,
    pub verdict: Stability,
}

pub fn run(cfg: &RunConfig) -> CliResult<(Artifacts, FloquetSummary)> {
    let system = cfg.system();
    let integrator = cfg.integrator();
    let cycle = settle_to_limit_cycle(system, cfg.x0(), &integrator)?;
    let mono = system_monodromy(system, &cycle, &integrator)?;
    let fr = floquet_multipliers(&mono)?;
    let summary = FloquetSummary {
        model: system.name(),
        period: cycle.period,
        period_stddev: cycle.period_stddev,
        return_error: cycle.return_error,
        anchor: cycle.anchor.clone(),
        liouville: Liouville {
            determinant: mono.matrix.determinant()?,
            exp_trace_integral: mono.trace_integral.exp(),
        },
        monodromy: mono.matrix,
        moduli: fr.multipliers.iter().map(|z| z.norm()).collect(),
        multipliers: fr.multipliers,
        trivial_index: fr.trivial_index,
        trivial_tolerance: fr.trivial_tolerance,
        max_nontrivial_modulus: fr.max_nontrivial_modulus,
        stable: fr.stable,
        verdict: fr.verdict,
    };
    let mut out = Artifacts::new();
    out.json("floquet.json", &report("floquet", cfg, &summary));
    Ok((out, summary))
}

pub fn print_summary(s: &FloquetSummary) {
    println!("model {} period {:.8} return error {:.2e}", s.model, s.period, s.return_error);
    for (k, z) in s.multipliers.iter().enumerate() {
        let tag = if k == s.trivial_index { " (trivial)" } else { "" };
        println!("  mu{k} = {:+.6e} {:+.6e}i  |mu| = {:.6e}{tag}", z.re, z.im, z.norm());
    }
    println!(
        "verdict {} (max non-trivial modulus {:.6})",
        label(&s.verdict),
        s.max_nontrivial_modulus
    );
}
