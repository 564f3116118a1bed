//! Eigenvalues of general real matrices: Householder reduction to upper
//! Hessenberg form followed by Francis double-shift QR.

use num_complex::Complex64;

use super::Matrix;
use crate::error::{Error, Result};

/// Iteration cap per eigenvalue for the shifted QR sweep.
pub const MAX_QR_ITERATIONS: usize = 500;

/// Orthogonal similarity reduction to upper Hessenberg form.
pub fn hessenberg(m: &Matrix) -> Result<Matrix> {
    m.require_square()?;
    let n = m.rows();
    let mut a = m.clone();
    if n < 3 {
        return Ok(a);
    }
    for k in 0..n - 2 {
        let mut v: Vec<f64> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);

        // A <- H A
        for j in 0..n {
            let dot: f64 = v
                .iter()
                .enumerate()
                .map(|(idx, vi)| vi * a[(k + 1 + idx, j)])
                .sum();
            for (idx, vi) in v.iter().enumerate() {
                a[(k + 1 + idx, j)] -= 2.0 * vi * dot;
            }
        }
        // A <- A H
        for i in 0..n {
            let dot: f64 = v
                .iter()
                .enumerate()
                .map(|(idx, vi)| vi * a[(i, k + 1 + idx)])
                .sum();
            for (idx, vi) in v.iter().enumerate() {
                a[(i, k + 1 + idx)] -= 2.0 * vi * dot;
            }
        }
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
        }
    }
    Ok(a)
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// All eigenvalues of a real square matrix, in deflation order.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex64>> {
    let mut a = hessenberg(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let at = |a: &Matrix, i: isize, j: isize| a[(i as usize, j as usize)];

    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 1 {
                let mut s = at(&a, l - 1, l - 1).abs() + at(&a, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at(&a, l, l - 1).abs() + s == s {
                    a[(l as usize, (l - 1) as usize)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = at(&a, nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = at(&a, nn - 1, nn - 1);
            let mut w = at(&a, nn, nn - 1) * at(&a, nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                let (i1, i0) = (nn as usize, (nn - 1) as usize);
                if q >= 0.0 {
                    let z = p + sign(z, p);
                    wr[i0] = x + z;
                    wr[i1] = x + z;
                    if z != 0.0 {
                        wr[i1] = x - w / z;
                    }
                    wi[i0] = 0.0;
                    wi[i1] = 0.0;
                } else {
                    wr[i0] = x + p;
                    wr[i1] = x + p;
                    wi[i0] = -z;
                    wi[i1] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_QR_ITERATIONS {
                return Err(Error::EigenNoConvergence {
                    iterations: MAX_QR_ITERATIONS,
                });
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nn {
                    a[(i as usize, i as usize)] -= x;
                }
                let s = at(&a, nn, nn - 1).abs() + at(&a, nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r);
            let mut z;
            let mut m = nn - 2;
            loop {
                z = at(&a, m, m);
                r = x - z;
                let s = y - z;
                p = (r * s - w) / at(&a, m + 1, m) + at(&a, m, m + 1);
                q = at(&a, m + 1, m + 1) - z - r - s;
                r = at(&a, m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = at(&a, m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (at(&a, m - 1, m - 1).abs() + z.abs() + at(&a, m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[(i as usize, (i - 2) as usize)] = 0.0;
                if i != m + 2 {
                    a[(i as usize, (i - 3) as usize)] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = at(&a, k, k - 1);
                    q = at(&a, k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = at(&a, k + 2, k - 1);
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            let e = &mut a[(k as usize, (k - 1) as usize)];
                            *e = -*e;
                        }
                    } else {
                        a[(k as usize, (k - 1) as usize)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    let (ku, k1) = (k as usize, (k + 1) as usize);
                    for j in ku..=(nn as usize) {
                        let mut pp = a[(ku, j)] + q * a[(k1, j)];
                        if k != nn - 1 {
                            pp += r * a[(ku + 2, j)];
                            a[(ku + 2, j)] -= pp * z;
                        }
                        a[(k1, j)] -= pp * y;
                        a[(ku, j)] -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in (l as usize)..=(mmin as usize) {
                        let mut pp = x * a[(i, ku)] + y * a[(i, k1)];
                        if k != nn - 1 {
                            pp += z * a[(i, ku + 2)];
                            a[(i, ku + 2)] -= pp * r;
                        }
                        a[(i, k1)] -= pp * q;
                        a[(i, ku)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}
