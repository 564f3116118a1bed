//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use netsync_core::{Graph, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficients of det(λI − A), highest degree first, by Faddeev–LeVerrier.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = a.matmul(&m);
        let c_prev = *coeffs.last().unwrap();
        for i in 0..n {
            next[(i, i)] += c_prev;
        }
        m = next;
        let c_k = -a.matmul(&m).trace() / k as f64;
        coeffs.push(c_k);
    }
    coeffs
}

pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * x + c)
}

/// Simple real roots in [lo, hi] found by sign-change scanning plus bisection.
pub fn bisection_roots(coeffs: &[f64], lo: f64, hi: f64, scan: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let h = (hi - lo) / scan as f64;
    for k in 0..scan {
        let (mut a, mut b) = (lo + k as f64 * h, lo + (k + 1) as f64 * h);
        let (mut fa, fb) = (poly_eval(coeffs, a), poly_eval(coeffs, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = poly_eval(coeffs, mid);
            if fm == 0.0 || (b - a) < 1e-15 {
                a = mid;
                b = mid;
                break;
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    roots
}

pub fn component_count(g: &Graph) -> usize {
    let n = g.n_nodes();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j) in g.edges() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// G(n, p) graph from a seeded generator.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// G(n, M): exactly `m` distinct uniformly random edges.
pub fn uniform_graph_with_edges(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = std::collections::BTreeSet::new();
    while set.len() < m {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            set.insert((i.min(j), i.max(j)));
        }
    }
    Graph::from_edges(n, &set.into_iter().collect::<Vec<_>>()).unwrap()
}

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Matrix {
    let n = x.len();
    let m = f(x).len();
    let mut j = Matrix::zeros(m, n);
    for c in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for r in 0..m {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// Max entrywise error relative to the larger of the analytic entry magnitude and 1.
pub fn max_rel_err(analytic: &Matrix, numeric: &Matrix) -> f64 {
    analytic
        .as_slice()
        .iter()
        .zip(numeric.as_slice())
        .map(|(a, n)| (a - n).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
