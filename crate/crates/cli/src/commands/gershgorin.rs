use std::path::Path;

use netsync_core::graph::in_disc_union;
use netsync_core::linalg::general_eigenvalues;
use netsync_core::{discs_bound_left_half_plane, gershgorin_discs, Complex64, DiscAxis, GershgorinDisc, Matrix};
use serde::Serialize;

use super::report;
use crate::error::{CliError, CliResult};
use crate::output::Artifacts;

/// Reads a comma-separated numeric matrix. A first line that is not numeric is
/// taken as a header and skipped.
pub fn parse_matrix_csv(text: &str) -> CliResult<Matrix> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if lineno == 0 => continue,
            Err(e) => return Err(CliError::config(format!("line {}: {e}", lineno + 1))),
        }
    }
    if rows.is_empty() {
        return Err(CliError::config("matrix file has no numeric rows"));
    }
    let cols = rows[0].len();
    if let Some((k, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(CliError::config(format!(
            "ragged matrix: row {} has {} entries, expected {cols}",
            k + 1,
            r.len()
        )));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::config("matrix entries must be finite"));
    }
    Ok(Matrix::from_rows(&rows)?)
}

pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    parse_matrix_csv(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
}

#[derive(Debug, Serialize)]
pub struct GershgorinConfig {
    pub matrix: Matrix,
    pub axis: DiscAxis,
}

#[derive(Debug, Serialize)]
pub struct GershgorinSummary {
    pub discs: Vec<GershgorinDisc>,
    /// Every disc satisfies `Re(center) + radius <= 0`.
    pub left_half_plane: bool,
    pub eigenvalues: Vec<Complex64>,
    pub eigenvalues_inside: bool,
}

pub fn run(cfg: &GershgorinConfig) -> CliResult<(Artifacts, GershgorinSummary)> {
    let discs = gershgorin_discs(&cfg.matrix, cfg.axis)?;
    let mut eigenvalues = general_eigenvalues(&cfg.matrix)?;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let scale = cfg.matrix.max_abs().max(1.0);
    let summary = GershgorinSummary {
        left_half_plane: discs_bound_left_half_plane(&discs),
        eigenvalues_inside: eigenvalues.iter().all(|z| in_disc_union(&discs, *z, 1e-9 * scale)),
        discs,
        eigenvalues,
    };
    let mut out = Artifacts::new();
    out.json("gershgorin.json", &report("gershgorin", cfg, &summary));
    Ok((out, summary))
}

pub fn print_summary(s: &GershgorinSummary) {
    for (k, d) in s.discs.iter().enumerate() {
        println!("disc {k}: center {:+.6} radius {:.6}", d.center.re, d.radius);
    }
    let eig: Vec<String> = s
        .eigenvalues
        .iter()
        .map(|z| format!("{:+.6}{:+.6}i", z.re + 0.0, z.im + 0.0))
        .collect();
    println!("eigenvalues: {}", eig.join(" "));
    println!("left half-plane: {}", s.left_half_plane);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_skipped() {
        let m = parse_matrix_csv("c0,c1\n1,2\n3,4\n").unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }

    #[test]
    fn ragged_and_garbage_rejected() {
        assert!(parse_matrix_csv("1,2\n3\n").is_err());
        assert!(parse_matrix_csv("1,2\n3,x\n").is_err());
        assert!(parse_matrix_csv("").is_err());
    }
}
