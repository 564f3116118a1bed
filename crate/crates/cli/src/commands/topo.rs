use std::path::PathBuf;

use netsync_core::{eigendecompose, laplacian, Graph, SpectralDecomposition};
use serde::Serialize;

use super::{fixed, report};
use crate::error::{CliError, CliResult};
use crate::output::{matrix_csv, Artifacts};

/// Where a topology comes from.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TopoSource {
    Star { n_peripheral: usize },
    Edges { graph: Graph },
    ScaleFree { n: usize, m: usize, seed: u64 },
}

impl TopoSource {
    pub fn build(&self) -> CliResult<Graph> {
        Ok(match self {
            TopoSource::Star { n_peripheral } => Graph::star(*n_peripheral)?,
            TopoSource::Edges { graph } => graph.clone(),
            TopoSource::ScaleFree { n, m, seed } => Graph::scale_free(*n, *m, *seed)?,
        })
    }
}

pub fn read_graph(path: &PathBuf) -> CliResult<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Graph::from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Parses `N,M`.
pub fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected N,M, got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Serialize)]
pub struct SpectrumReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors listed one per eigenvalue.
    pub eigenvectors: Vec<Vec<f64>>,
    pub zero_eigenvalues: usize,
    pub connected: bool,
}

pub fn spectrum_report(g: &Graph, spec: &SpectralDecomposition) -> SpectrumReport {
    let zeros = spec.zero_count(1e-8);
    SpectrumReport {
        n_nodes: g.n_nodes(),
        n_edges: g.n_edges(),
        eigenvalues: spec.eigenvalues.clone(),
        eigenvectors: (0..spec.eigenvalues.len()).map(|k| spec.eigenvector(k)).collect(),
        zero_eigenvalues: zeros,
        connected: zeros == 1,
    }
}

pub fn run(source: &TopoSource) -> CliResult<(Artifacts, SpectrumReport)> {
    let graph = source.build()?;
    let l = laplacian(&graph);
    let spec = eigendecompose(&l)?;
    let summary = spectrum_report(&graph, &spec);

    let mut out = Artifacts::new();
    out.json("graph.json", &graph);
    out.text("laplacian.csv", matrix_csv(l.matrix()));
    out.json("spectrum.json", &report("topo", source, &summary));
    Ok((out, summary))
}

pub fn print_summary(s: &SpectrumReport) {
    let vals: Vec<String> = s.eigenvalues.iter().map(|v| fixed(*v, 6)).collect();
    println!("nodes {} edges {} connected {}", s.n_nodes, s.n_edges, s.connected);
    println!("eigenvalues: {}", vals.join(" "));
}
