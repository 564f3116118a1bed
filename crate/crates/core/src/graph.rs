//! Network topologies, graph Laplacians, spectra and Gershgorin bounds.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, Matrix};

/// Asymmetry above which [`eigendecompose`] rejects its input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Undirected, unweighted simple graph.
///
/// Edges are stored normalized as `(min, max)` in a sorted set, so equality
/// and iteration order are deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct Graph {
    n_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRecord {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<GraphRecord> for Graph {
    type Error = Error;

    fn try_from(rec: GraphRecord) -> Result<Self> {
        let edges: Vec<(usize, usize)> = rec.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::from_edges(rec.n, &edges)?;
        match rec.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }
}

impl From<Graph> for GraphRecord {
    fn from(g: Graph) -> Self {
        GraphRecord {
            n: g.n_nodes,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
            labels: g.labels,
        }
    }
}

impl Graph {
    /// Star with node 0 as hub and `n_peripheral` leaves.
    pub fn star(n_peripheral: usize) -> Result<Self> {
        if n_peripheral == 0 {
            return Err(Error::InvalidGraph(
                "a star needs at least one peripheral node".into(),
            ));
        }
        let edges: Vec<_> = (1..=n_peripheral).map(|p| (0, p)).collect();
        Self::from_edges(n_peripheral + 1, &edges)
    }

    /// Graph with exactly the given edges; duplicates collapse, either orientation accepted.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node".into()));
        }
        let mut set = BTreeSet::new();
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Self {
            n_nodes: n,
            edges: set,
            labels: None,
        })
    }

    /// Preferential-attachment graph: a complete core of `m + 1` nodes, then
    /// every new node links to `m` distinct existing nodes chosen with
    /// probability proportional to their current degree.
    pub fn scale_free(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || n <= m {
            return Err(Error::InvalidGraph(format!(
                "scale-free generator needs n > m >= 1 (got n = {n}, m = {m})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        // each edge endpoint appears once per incident edge, so uniform draws are degree-weighted
        let mut endpoints: Vec<usize> = Vec::new();
        for i in 0..=m {
            for j in (i + 1)..=m {
                edges.push((i, j));
                endpoints.extend([i, j]);
            }
        }
        for new in (m + 1)..n {
            let mut targets = BTreeSet::new();
            while targets.len() < m {
                let t = endpoints[rng.gen_range(0..endpoints.len())];
                targets.insert(t);
            }
            for t in targets {
                edges.push((t, new));
                endpoints.extend([t, new]);
            }
        }
        Self::from_edges(n, &edges)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_nodes {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n_nodes
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == i || b == i).count()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Combinatorial Laplacian `D - A` of an unweighted graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianMatrix {
    matrix: Matrix,
}

impl LaplacianMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.size())
            .map(|i| self.matrix.row(i).iter().sum())
            .collect()
    }
}

pub fn laplacian(g: &Graph) -> LaplacianMatrix {
    let n = g.n_nodes();
    let mut m = Matrix::zeros(n, n);
    for (i, j) in g.edges() {
        m[(i, j)] = -1.0;
        m[(j, i)] = -1.0;
        m[(i, i)] += 1.0;
        m[(j, j)] += 1.0;
    }
    LaplacianMatrix { matrix: m }
}

/// Sorted eigenvalues with paired orthonormal eigenvectors (as columns).
#[derive(Debug, Clone, Serialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    /// Eigenvalues with `|lambda| <= tol`.
    pub fn zero_count(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|l| l.abs() <= tol).count()
    }
}

pub fn eigendecompose(l: &LaplacianMatrix) -> Result<SpectralDecomposition> {
    eigendecompose_symmetric(l.matrix())
}

/// Spectral decomposition of any real symmetric matrix.
pub fn eigendecompose_symmetric(m: &Matrix) -> Result<SpectralDecomposition> {
    m.require_square()?;
    let asym = m.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let eig = jacobi_eigen(m)?;
    Ok(SpectralDecomposition {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscAxis {
    Row,
    Column,
}

impl std::str::FromStr for DiscAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row" => Ok(DiscAxis::Row),
            "column" | "col" => Ok(DiscAxis::Column),
            other => Err(Error::Parse(format!("unknown disc axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GershgorinDisc {
    pub center: Complex64,
    pub radius: f64,
    pub axis: DiscAxis,
}

impl GershgorinDisc {
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        (z - self.center).norm() <= self.radius + tol
    }
}

pub fn gershgorin_discs(m: &Matrix, axis: DiscAxis) -> Result<Vec<GershgorinDisc>> {
    m.require_square()?;
    let n = m.rows();
    Ok((0..n)
        .map(|i| {
            let radius = (0..n)
                .filter(|&j| j != i)
                .map(|j| match axis {
                    DiscAxis::Row => m[(i, j)].abs(),
                    DiscAxis::Column => m[(j, i)].abs(),
                })
                .sum();
            GershgorinDisc {
                center: Complex64::new(m[(i, i)], 0.0),
                radius,
                axis,
            }
        })
        .collect())
}

/// True when every disc lies in the closed left half-plane.
pub fn discs_bound_left_half_plane(discs: &[GershgorinDisc]) -> bool {
    discs.iter().all(|d| d.center.re + d.radius <= 0.0)
}

pub fn in_disc_union(discs: &[GershgorinDisc], z: Complex64, tol: f64) -> bool {
    discs.iter().any(|d| d.contains(z, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_five_node() -> Graph {
        Graph::from_edges(5, &[(0, 1), (0, 3), (1, 2), (1, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn star_structure() {
        let g = Graph::star(3).unwrap();
        assert_eq!(g.n_nodes(), 4);
        assert_eq!(g.n_edges(), 3);
        assert_eq!(g.degree(0), 3);
        for p in 1..4 {
            assert_eq!(g.degree(p), 1);
        }
        assert!(!g.has_edge(1, 2));

        let g1 = Graph::star(1).unwrap();
        assert_eq!((g1.n_nodes(), g1.n_edges()), (2, 1));
        assert!(Graph::star(0).is_err());
    }

    #[test]
    fn star_spectrum_closed_form() {
        let spec = eigendecompose(&laplacian(&Graph::star(3).unwrap())).unwrap();
        for (got, want) in spec.eigenvalues.iter().zip([0.0, 1.0, 1.0, 4.0]) {
            assert!((got - want).abs() < 1e-9, "{:?}", spec.eigenvalues);
        }
    }

    #[test]
    fn from_edges_validation_and_dedup() {
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        let g = Graph::from_edges(3, &[(0, 1), (0, 1), (1, 0)]).unwrap();
        assert_eq!(g.n_edges(), 1);

        let path = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let l = laplacian(&path);
        assert_eq!(l.matrix().to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
    }

    #[test]
    fn five_node_laplacian_matches_published_matrix() {
        let l = laplacian(&example_five_node());
        let expected = vec![
            vec![2.0, -1.0, 0.0, -1.0, 0.0],
            vec![-1.0, 3.0, -1.0, 0.0, -1.0],
            vec![0.0, -1.0, 1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0, 2.0, -1.0],
            vec![0.0, -1.0, 0.0, -1.0, 2.0],
        ];
        assert_eq!(l.matrix().to_rows(), expected);
        assert!(l.row_sums().iter().all(|s| *s == 0.0));
    }

    #[test]
    fn star_laplacian_and_single_node() {
        let l = laplacian(&Graph::star(3).unwrap());
        assert_eq!(l.matrix().row(0), &[3.0, -1.0, -1.0, -1.0]);
        assert_eq!(l.matrix().row(2), &[-1.0, 0.0, 1.0, 0.0]);
        let single = laplacian(&Graph::from_edges(1, &[]).unwrap());
        assert_eq!(single.matrix().to_rows(), vec![vec![0.0]]);
    }

    #[test]
    fn scale_free_small_cases() {
        for seed in 0..20 {
            let g = Graph::scale_free(4, 1, seed).unwrap();
            assert_eq!(g.n_edges(), 3);
        }
        assert!(Graph::scale_free(3, 3, 0).is_err());
        assert!(Graph::scale_free(5, 0, 0).is_err());
        assert_eq!(
            Graph::scale_free(30, 2, 11).unwrap(),
            Graph::scale_free(30, 2, 11).unwrap()
        );
    }

    #[test]
    fn eigendecompose_rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            eigendecompose_symmetric(&m),
            Err(Error::NotSymmetric { .. })
        ));
        let spec = eigendecompose_symmetric(&Matrix::identity(2)).unwrap();
        assert_eq!(spec.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn gershgorin_examples() {
        let j = Matrix::from_rows(&[
            vec![-2.0, -1.0, -1.0],
            vec![-1.0, -2.0, -1.0],
            vec![-1.0, -1.0, -2.0],
        ])
        .unwrap();
        let discs = gershgorin_discs(&j, DiscAxis::Row).unwrap();
        assert_eq!(discs.len(), 3);
        for d in &discs {
            assert_eq!(d.center, Complex64::new(-2.0, 0.0));
            assert_eq!(d.radius, 2.0);
        }
        assert!(discs_bound_left_half_plane(&discs));

        let id = gershgorin_discs(&Matrix::identity(3), DiscAxis::Column).unwrap();
        assert!(id.iter().all(|d| d.center.re == 1.0 && d.radius == 0.0));
        assert!(!discs_bound_left_half_plane(&id[..1]));

        let diag = gershgorin_discs(&Matrix::from_diagonal(&[5.0, -5.0]), DiscAxis::Row).unwrap();
        assert_eq!((diag[0].center.re, diag[0].radius), (5.0, 0.0));
        assert_eq!((diag[1].center.re, diag[1].radius), (-5.0, 0.0));

        assert!(discs_bound_left_half_plane(&[]));
        assert!(gershgorin_discs(&Matrix::zeros(2, 3), DiscAxis::Row).is_err());
    }

    #[test]
    fn graph_json_round_trip() {
        let g = example_five_node();
        let back = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
        assert!(Graph::from_json(r#"{"n": 2, "edges": [[0, 2]]}"#).is_err());
        assert!(Graph::from_json(r#"{"n": 2, "edges": [], "extra": 1}"#).is_err());
    }
}
