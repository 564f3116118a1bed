//! Phase extraction, synchronization classification and equilibria of the
//! reduced phase system.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{fmt17, Trajectory};
use crate::linalg::general_eigenvalues;
use crate::models::{kuramoto_reduced_jacobian, kuramoto_reduced_rhs, KuramotoStarParams, SystemSpec};

pub const DEFAULT_SYNC_TOLERANCE: f64 = 1e-2;

/// Fraction of the post-transient window used for residuals.
pub const MEASUREMENT_FRACTION: f64 = 0.25;

/// Periods the post-transient window must span for a verdict.
pub const MIN_PERIODS: usize = 5;

pub const MAX_NEWTON_ITERATIONS: usize = 100;
pub const MAX_STEP_HALVINGS: usize = 20;
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-12;

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn unwrap_in_place(phases: &mut [f64]) {
    let mut offset = 0.0;
    let mut prev = match phases.first() {
        Some(&p) => p,
        None => return,
    };
    for p in phases.iter_mut().skip(1) {
        let raw = *p;
        let mut d = raw - prev;
        while d > PI {
            d -= 2.0 * PI;
            offset -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
            offset += 2.0 * PI;
        }
        prev = raw;
        *p = raw + offset;
    }
}

fn n_nodes(traj: &Trajectory) -> usize {
    match traj.spec() {
        Some(spec) => spec.n_nodes(),
        None => traj.dim() / 2,
    }
}

fn node_dim(traj: &Trajectory) -> usize {
    traj.spec().map_or(2, SystemSpec::node_dim)
}

/// Unwrapped phase of one node.
///
/// Phase models return the phase itself (the reduced Kuramoto system yields
/// phases relative to the hub, so node 0 is identically zero). Planar
/// oscillators use the angle about the post-transient mean, oriented so that
/// the phase advances.
pub fn phase_of(traj: &Trajectory, node: usize) -> Result<Vec<f64>> {
    let nodes = n_nodes(traj);
    if node >= nodes {
        return Err(Error::DimensionMismatch {
            expected: nodes,
            actual: node,
        });
    }
    match traj.spec() {
        Some(SystemSpec::KuramotoStar { .. }) => return Ok(traj.component(node)),
        Some(SystemSpec::KuramotoReduced { .. }) => {
            return Ok(if node == 0 {
                vec![0.0; traj.len()]
            } else {
                traj.component(node - 1).into_iter().map(|x| -x).collect()
            })
        }
        _ => {}
    }
    // (v, v̇) orbits run clockwise
    let clockwise = matches!(
        traj.spec(),
        Some(SystemSpec::WienBridge { .. }) | Some(SystemSpec::Harmonic { .. })
    );
    let v = traj.component(2 * node);
    let w = traj.component(2 * node + 1);
    let start = traj.analysis_start().min(traj.len().saturating_sub(1));
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len().max(1) as f64;
    let ptp = |xs: &[f64]| {
        xs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) - xs.iter().fold(f64::INFINITY, |m, &x| m.min(x))
    };
    let (vbar, wbar) = (mean(&v[start..]), mean(&w[start..]));
    let scale = v[start..]
        .iter()
        .chain(&w[start..])
        .fold(1.0f64, |m, x| m.max(x.abs()));
    if ptp(&v[start..]) <= 1e-9 * scale || ptp(&w[start..]) <= 1e-9 * scale {
        return Err(Error::DegenerateNode { node });
    }
    let sign = if clockwise { -1.0 } else { 1.0 };
    let mut phases: Vec<f64> = v
        .iter()
        .zip(&w)
        .map(|(vi, wi)| (sign * (wi - wbar)).atan2(vi - vbar))
        .collect();
    unwrap_in_place(&mut phases);
    Ok(phases)
}

/// Wrapped phase differences `φ_i − φ_j` for each `(i, j)` pair.
pub fn phase_differences(traj: &Trajectory, pairs: &[(usize, usize)]) -> Result<Vec<Vec<f64>>> {
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; n_nodes(traj)];
    let mut get = |node: usize| -> Result<Vec<f64>> {
        if node >= cache.len() {
            return Err(Error::DimensionMismatch {
                expected: cache.len(),
                actual: node,
            });
        }
        if cache[node].is_none() {
            cache[node] = Some(phase_of(traj, node)?);
        }
        Ok(cache[node].clone().expect("filled above"))
    };
    pairs
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (get(i)?, get(j)?);
            Ok(a.iter().zip(&b).map(|(x, y)| wrap_angle(x - y)).collect())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyncClass {
    Unsynchronized,
    RemoteSync,
    CompleteSync,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyncVerdict {
    pub classification: SyncClass,
    /// Max wrapped phase difference among peripherals in the measurement window (rad).
    pub peripheral_residual: f64,
    /// Max wrapped phase difference between hub and any peripheral (rad).
    pub hub_residual: f64,
    pub convergence_time: Option<f64>,
    pub tolerance: f64,
    /// Periods spanned by the post-transient window.
    pub periods_observed: f64,
}

/// Classifies a trajectory with `hub` as mediator and every other node as peripheral.
pub fn detect_sync(traj: &Trajectory, hub: usize, tolerance: f64) -> Result<SyncVerdict> {
    let peripherals: Vec<usize> = (0..n_nodes(traj)).filter(|&i| i != hub).collect();
    detect_sync_groups(traj, hub, &peripherals, tolerance)
}

/// Classification with an explicit peripheral set.
pub fn detect_sync_groups(traj: &Trajectory, hub: usize, peripherals: &[usize], tolerance: f64) -> Result<SyncVerdict> {
    let nodes = n_nodes(traj);
    if hub >= nodes || peripherals.iter().any(|&p| p >= nodes || p == hub) || peripherals.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "hub {hub} / peripherals {peripherals:?} invalid for {nodes} nodes"
        )));
    }
    let mut phases = vec![None; nodes];
    for &node in std::iter::once(&hub).chain(peripherals) {
        if phases[node].is_none() {
            phases[node] = Some(phase_of(traj, node)?);
        }
    }
    let phase = |i: usize| phases[i].as_ref().expect("extracted above");

    let start = traj.analysis_start();
    if traj.len() < start + 4 {
        return Err(Error::WindowTooShort {
            periods: 0.0,
            required: MIN_PERIODS,
        });
    }
    let periods_observed = std::iter::once(&hub)
        .chain(peripherals)
        .map(|&i| {
            let ph = phase(i);
            (ph[traj.len() - 1] - ph[start]).abs() / (2.0 * PI)
        })
        .fold(f64::INFINITY, f64::min);
    // relative phase coordinates have a motionless hub; fall back to the peripherals
    let periods_observed = if periods_observed < MIN_PERIODS as f64 {
        if let Some(SystemSpec::KuramotoReduced { params }) = traj.spec() {
            let span = traj.times()[traj.len() - 1] - traj.times()[start];
            params.omega_peripheral.abs() * span / (2.0 * PI)
        } else {
            periods_observed
        }
    } else {
        periods_observed
    };
    if periods_observed < MIN_PERIODS as f64 {
        return Err(Error::WindowTooShort {
            periods: periods_observed,
            required: MIN_PERIODS,
        });
    }

    let len = traj.len();
    let peripheral_series: Vec<f64> = (0..len)
        .map(|k| {
            let mut worst: f64 = 0.0;
            for (a, &i) in peripherals.iter().enumerate() {
                for &j in &peripherals[a + 1..] {
                    worst = worst.max(wrap_angle(phase(i)[k] - phase(j)[k]).abs());
                }
            }
            worst
        })
        .collect();
    let hub_series: Vec<f64> = (0..len)
        .map(|k| {
            peripherals
                .iter()
                .map(|&p| wrap_angle(phase(hub)[k] - phase(p)[k]).abs())
                .fold(0.0, f64::max)
        })
        .collect();

    let window_start = len - ((len - start) as f64 * MEASUREMENT_FRACTION).ceil().max(1.0) as usize;
    let window_max = |s: &[f64]| s[window_start..].iter().copied().fold(0.0, f64::max);
    let peripheral_residual = window_max(&peripheral_series);
    let hub_residual = window_max(&hub_series);

    let classification = if peripheral_residual <= tolerance && hub_residual <= tolerance {
        SyncClass::CompleteSync
    } else if peripheral_residual <= tolerance {
        SyncClass::RemoteSync
    } else {
        SyncClass::Unsynchronized
    };
    let convergence_time = match classification {
        SyncClass::Unsynchronized => None,
        class => {
            let last_bad = (0..len).rev().find(|&k| {
                peripheral_series[k] > tolerance
                    || (class == SyncClass::CompleteSync && hub_series[k] > tolerance)
            });
            Some(match last_bad {
                None => traj.times()[0],
                Some(k) => traj.times()[(k + 1).min(len - 1)],
            })
        }
    };
    Ok(SyncVerdict {
        classification,
        peripheral_residual,
        hub_residual,
        convergence_time,
        tolerance,
        periods_observed,
    })
}

/// Per-sample maximum Euclidean distance between any two listed nodes' sub-states.
pub fn sync_error(traj: &Trajectory, nodes: &[usize]) -> Result<Vec<f64>> {
    let nd = node_dim(traj);
    let total = n_nodes(traj);
    if nodes.len() < 2 || nodes.iter().any(|&n| n >= total) {
        return Err(Error::InvalidParameter(format!(
            "sync error needs at least two valid nodes, got {nodes:?} of {total}"
        )));
    }
    Ok((0..traj.len())
        .map(|k| {
            let x = traj.state(k);
            let mut worst: f64 = 0.0;
            for (a, &i) in nodes.iter().enumerate() {
                for &j in &nodes[a + 1..] {
                    let d = (0..nd)
                        .map(|c| (x[i * nd + c] - x[j * nd + c]).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    worst = worst.max(d);
                }
            }
            worst
        })
        .collect())
}

/// CSV with header `t,value`.
pub fn write_series_csv<W: Write>(mut w: W, times: &[f64], values: &[f64]) -> io::Result<()> {
    writeln!(w, "t,value")?;
    for (t, v) in times.iter().zip(values) {
        writeln!(w, "{},{}", fmt17(*t), fmt17(*v))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    /// Converged point as iterated (not reduced modulo 2π).
    pub x_star: Vec<f64>,
    /// `x_star` reduced into `[0, 2π)`.
    pub x_star_normalized: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub jacobian_eigenvalues: Vec<Complex64>,
    pub locally_stable: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton iteration for an equilibrium of the reduced Kuramoto star.
pub fn find_equilibrium(p: &KuramotoStarParams, guess: &[f64]) -> Result<EquilibriumResult> {
    p.validate()?;
    let mut x = guess.to_vec();
    let mut r = kuramoto_reduced_rhs(&x, p)?;
    let mut res = norm(&r);
    let mut iterations = 0;
    while res > EQUILIBRIUM_TOLERANCE {
        if iterations == MAX_NEWTON_ITERATIONS {
            return Err(Error::NewtonNoConvergence {
                iterations,
                iterate: x,
            });
        }
        iterations += 1;
        let j = kuramoto_reduced_jacobian(&x, p)?;
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let tiny = 1e-13 * j.max_abs().max(1.0);
        let step = j
            .solve(&neg_r, tiny)
            .ok_or_else(|| Error::SingularJacobian { iterate: x.clone() })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_STEP_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let tr = kuramoto_reduced_rhs(&trial, p)?;
            let tres = norm(&tr);
            if tres < res {
                accepted = Some((trial, tr, tres));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((nx, nr, nres)) => {
                x = nx;
                r = nr;
                res = nres;
            }
            // no descent along the Newton direction: accept only if already at round-off
            None if res <= 1e-10 => break,
            None => {
                return Err(Error::NewtonNoConvergence {
                    iterations,
                    iterate: x,
                })
            }
        }
    }
    let jac = kuramoto_reduced_jacobian(&x, p)?;
    let mut eig = general_eigenvalues(&jac)?;
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let locally_stable = eig.iter().all(|z| z.re < 0.0);
    Ok(EquilibriumResult {
        x_star_normalized: x.iter().map(|v| v.rem_euclid(2.0 * PI)).collect(),
        x_star: x,
        residual: res,
        iterations,
        jacobian_eigenvalues: eig,
        locally_stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::KuramotoStarParams;

    fn kuramoto_traj(phases: impl Fn(f64) -> Vec<f64>, n: usize, t_end: f64, dt: f64) -> Trajectory {
        let spec = SystemSpec::KuramotoStar {
            params: KuramotoStarParams::identical(n - 1, 1.0, 1.0),
        };
        let steps = (t_end / dt) as usize;
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
        let states: Vec<f64> = times.iter().flat_map(|&t| phases(t)).collect();
        Trajectory::from_samples(times, states, n, 0.0, Some(spec)).unwrap()
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn circular_orbit_phase() {
        let dt = 1e-3;
        let times: Vec<f64> = (0..5000).map(|k| k as f64 * dt).collect();
        let states: Vec<f64> = times
            .iter()
            .flat_map(|t| [(2.0 * PI * t).cos(), (2.0 * PI * t).sin()])
            .collect();
        let traj = Trajectory::from_samples(times.clone(), states, 2, 0.0, None).unwrap();
        let ph = phase_of(&traj, 0).unwrap();
        for (p, t) in ph.iter().zip(&times) {
            assert!((p - 2.0 * PI * t).abs() < 1e-3);
        }
    }

    #[test]
    fn kuramoto_phase_is_identity() {
        let traj = kuramoto_traj(|t| vec![t, 2.0 * t, 0.5], 3, 1.0, 0.1);
        assert_eq!(phase_of(&traj, 1).unwrap(), traj.component(1));
    }

    #[test]
    fn stationary_node_is_degenerate() {
        let times: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let traj = Trajectory::from_samples(times, vec![1.0; 200], 2, 0.0, None).unwrap();
        assert!(matches!(phase_of(&traj, 0), Err(Error::DegenerateNode { node: 0 })));
    }

    #[test]
    fn identical_nodes_zero_difference() {
        let traj = kuramoto_traj(|t| vec![t, t, t], 3, 10.0, 0.1);
        let d = phase_differences(&traj, &[(1, 2), (0, 1)]).unwrap();
        assert!(d.iter().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn drifting_difference_grows_linearly() {
        let delta = 0.01;
        let traj = kuramoto_traj(|t| vec![t, (1.0 + delta) * t, t], 3, 100.0, 0.1);
        let d = phase_differences(&traj, &[(1, 0)]).unwrap();
        // before the first wrap the difference is exactly Δ·t
        for (k, t) in traj.times().iter().enumerate().take(300) {
            assert!((d[0][k] - delta * t).abs() < 1e-9);
        }
    }

    #[test]
    fn classification_branches() {
        let complete = kuramoto_traj(|t| vec![t; 4], 4, 100.0, 0.05);
        assert_eq!(detect_sync(&complete, 0, 0.01).unwrap().classification, SyncClass::CompleteSync);

        let remote = kuramoto_traj(|t| vec![t + 1.0, t, t, t], 4, 100.0, 0.05);
        let v = detect_sync(&remote, 0, 0.1).unwrap();
        assert_eq!(v.classification, SyncClass::RemoteSync);
        assert!((v.hub_residual - 1.0).abs() < 1e-12);

        let drift = kuramoto_traj(|t| vec![t, 1.1 * t, 0.9 * t], 3, 100.0, 0.05);
        let v = detect_sync(&drift, 0, 0.01).unwrap();
        assert_eq!(v.classification, SyncClass::Unsynchronized);
        assert_eq!(v.convergence_time, None);

        let short = kuramoto_traj(|t| vec![t; 3], 3, 10.0, 0.05);
        assert!(matches!(detect_sync(&short, 0, 0.01), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn convergence_time_marks_last_excursion() {
        let traj = kuramoto_traj(|t| vec![t, t + (-t).exp(), t], 3, 100.0, 0.01);
        let v = detect_sync(&traj, 0, 0.01).unwrap();
        assert_eq!(v.classification, SyncClass::CompleteSync);
        let tc = v.convergence_time.unwrap();
        assert!((tc - 0.01f64.ln().abs()).abs() < 0.02, "{tc}");
    }

    #[test]
    fn sync_error_of_identical_nodes() {
        let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let states: Vec<f64> = times.iter().flat_map(|t| [*t, 1.0, *t, 1.0, *t + 3.0, 5.0]).collect();
        let traj = Trajectory::from_samples(times, states, 6, 0.0, None).unwrap();
        assert!(sync_error(&traj, &[0, 1]).unwrap().iter().all(|e| *e == 0.0));
        let e = sync_error(&traj, &[0, 1, 2]).unwrap();
        assert!(e.iter().all(|x| (x - 5.0).abs() < 1e-12));
        assert!(sync_error(&traj, &[0]).is_err());
    }

    #[test]
    fn equilibrium_examples() {
        let p = KuramotoStarParams::identical(3, 1.0, 1.0);
        let eq = find_equilibrium(&p, &[6.0; 3]).unwrap();
        for x in &eq.x_star {
            assert!((x - 2.0 * PI).abs() < 1e-10);
        }
        assert!(eq.residual <= 1e-10 && eq.locally_stable);
        let re: Vec<f64> = eq.jacobian_eigenvalues.iter().map(|z| z.re).collect();
        for (g, w) in re.iter().zip([-4.0, -1.0, -1.0]) {
            assert!((g - w).abs() < 1e-9, "{re:?}");
        }

        let eq = find_equilibrium(&p, &[3.0; 3]).unwrap();
        assert!(eq.x_star.iter().all(|x| (x - PI).abs() < 1e-10));
        assert!(!eq.locally_stable);

        let eq = find_equilibrium(&p, &[0.0; 3]).unwrap();
        assert_eq!(eq.iterations, 0);
        assert_eq!(eq.residual, 0.0);
    }

    #[test]
    fn singular_jacobian_reported() {
        // x = π/2 makes every cosine vanish
        let p = KuramotoStarParams {
            omega_hub: 5.0,
            omega_peripheral: 0.0,
            incoming: vec![1.0],
            outgoing: vec![1.0],
        };
        match find_equilibrium(&p, &[PI / 2.0]) {
            Err(Error::SingularJacobian { iterate }) => assert_eq!(iterate, vec![PI / 2.0]),
            other => panic!("{other:?}"),
        }
    }
}
