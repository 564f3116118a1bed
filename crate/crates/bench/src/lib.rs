//! Fixtures shared by the benchmarks.

use netsync_core::{laplacian, Graph, Matrix};

/// Laplacian of a seeded preferential-attachment graph.
pub fn scale_free_laplacian(n: usize) -> Matrix {
    let g = Graph::scale_free(n, 2, 7).expect("n > 2");
    laplacian(&g).matrix().clone()
}

/// Dense non-symmetric matrix with a deterministic pattern of entries.
pub fn dense_general(n: usize) -> Matrix {
    let data = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            ((i * 7 + j * 13) % 11) as f64 / 11.0 - 0.5 + if i == j { -1.0 } else { 0.0 }
        })
        .collect();
    Matrix::from_row_major(n, n, data).expect("square")
}
