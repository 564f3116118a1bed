use std::cmp::Ordering;

use super::Matrix;
use crate::error::{Error, Result};

/// Off-diagonal convergence threshold, relative to the Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a real symmetric matrix.
///
/// Eigenvalues ascend; column `k` of `vectors` is the unit eigenvector for
/// `values[k]`, with its first nonzero component made positive.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Cyclic Jacobi rotations on a symmetric matrix.
///
/// The caller is responsible for checking symmetry; only the upper triangle
/// drives the rotations but both triangles are updated.
pub fn jacobi_eigen(m: &Matrix) -> Result<SymmetricEigen> {
    m.require_square()?;
    let n = m.rows();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = if scale > 0.0 {
        JACOBI_TOLERANCE * scale
    } else {
        0.0
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::EigenNoConvergence {
            iterations: MAX_SWEEPS,
        });
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut col = v.column(k);
            if let Some(first) = col.iter().copied().find(|x| x.abs() > 1e-12) {
                if first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (a[(k, k)], col)
        })
        .collect();

    let tie = 1e-12 * scale.max(1.0);
    pairs.sort_by(|(la, va), (lb, vb)| {
        if (la - lb).abs() <= tie {
            va.iter()
                .zip(vb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        } else {
            la.total_cmp(lb)
        }
    });

    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, (lambda, col)) in pairs.into_iter().enumerate() {
        values.push(lambda);
        for (i, x) in col.into_iter().enumerate() {
            vectors[(i, k)] = x;
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

// A <- J^T A J, V <- V J with J the plane rotation in (p, q).
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(m: &Matrix, eig: &SymmetricEigen) -> f64 {
        (0..m.rows())
            .map(|k| {
                let vk = eig.vectors.column(k);
                let mv = m.mul_vec(&vk);
                mv.iter()
                    .zip(&vk)
                    .map(|(a, b)| (a - eig.values[k] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let eig = jacobi_eigen(&Matrix::identity(2)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let eig = jacobi_eigen(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
        assert!(residual(&m, &eig) < 1e-14);
        // first nonzero component positive
        assert!(eig.vectors[(0, 0)] > 0.0 && eig.vectors[(0, 1)] > 0.0);
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let m = Matrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let eig = jacobi_eigen(&m).unwrap();
        let vtv = eig.vectors.transpose().matmul(&eig.vectors);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[(i, j)] - expect).abs() < 1e-12);
            }
        }
        assert!(residual(&m, &eig) < 1e-10);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
