//! Monodromy matrices, Floquet multipliers and master-stability sweeps.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpectralDecomposition;
use crate::integrate::{
    check_state, fmt17, settle_to_limit_cycle, FnField, IntegratorConfig, LimitCycle, Rk4, VectorField,
};
use crate::linalg::{general_eigenvalues, Matrix};
use crate::models::{fhn_rhs, msf_block_matrix, FhnParams, SystemSpec};

/// Allowed distance of the flow-direction multiplier from 1.
pub const TRIVIAL_TOLERANCE: f64 = 0.05;

/// Non-trivial moduli within this distance of 1 give a marginal verdict.
pub const NEUTRAL_TOLERANCE: f64 = 1e-6;

/// `|ln max modulus|` at or below this is reported as marginal in network reports.
pub const MARGINAL_LOG_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

/// State-transition matrix of the variational equation over one period.
#[derive(Debug, Clone, Serialize)]
pub struct MonodromyMatrix {
    pub matrix: Matrix,
    pub period: f64,
    pub anchor: Vec<f64>,
    /// Trapezoid quadrature of `tr J(x(t))` over the period, on the integration grid.
    pub trace_integral: f64,
}

/// Co-integrates `ẋ = f(x)` from the anchor and `Φ̇ = J(x) Φ`, `Φ(0) = I`, over
/// one period on a uniform RK4 grid no coarser than `cfg.dt`.
///
/// The variational dimension is taken from `J` at the anchor and may differ
/// from the state dimension.
pub fn monodromy<F, J>(field: &F, variational: J, cycle: &LimitCycle, cfg: &IntegratorConfig) -> Result<MonodromyMatrix>
where
    F: VectorField + ?Sized,
    J: Fn(&[f64]) -> Matrix,
{
    let n = field.dim();
    if cycle.anchor.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: cycle.anchor.len(),
        });
    }
    if !(cycle.period > 0.0 && cycle.period.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "period must be positive, got {}",
            cycle.period
        )));
    }
    let m = variational(&cycle.anchor).rows();
    let combined = FnField::new(n + m * m, |z: &[f64], out: &mut [f64]| {
        let (x, phi) = z.split_at(n);
        let (dx, dphi) = out.split_at_mut(n);
        field.eval(x, dx);
        let j = variational(x);
        for r in 0..m {
            for c in 0..m {
                dphi[r * m + c] = (0..m).map(|k| j[(r, k)] * phi[k * m + c]).sum();
            }
        }
    });

    let steps = (cycle.period / cfg.dt).ceil().max(1.0) as usize;
    let h = cycle.period / steps as f64;
    let mut z = cycle.anchor.clone();
    z.extend_from_slice(Matrix::identity(m).as_slice());
    let mut rk = Rk4::new(z.len());
    let mut trace_prev = variational(&z[..n]).trace();
    let mut trace_integral = 0.0;
    for step in 1..=steps {
        rk.step(&combined, &mut z, h);
        check_state(&z, step as f64 * h)?;
        let trace_now = variational(&z[..n]).trace();
        trace_integral += 0.5 * h * (trace_prev + trace_now);
        trace_prev = trace_now;
    }
    let matrix = Matrix::from_row_major(m, m, z[n..].to_vec())?;
    Ok(MonodromyMatrix {
        matrix,
        period: cycle.period,
        anchor: cycle.anchor.clone(),
        trace_integral,
    })
}

/// Monodromy of a model system using its analytic Jacobian.
pub fn system_monodromy(spec: &SystemSpec, cycle: &LimitCycle, cfg: &IntegratorConfig) -> Result<MonodromyMatrix> {
    let dim = spec.state_dim();
    monodromy(
        spec,
        |x: &[f64]| spec.jacobian(x).unwrap_or_else(|_| Matrix::zeros(dim, dim)),
        cycle,
        cfg,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct FloquetResult {
    /// Sorted by descending modulus, serialized as `[re, im]` pairs.
    pub multipliers: Vec<Complex64>,
    pub trivial_index: usize,
    pub max_nontrivial_modulus: f64,
    pub trivial_tolerance: f64,
    pub stable: bool,
    pub verdict: Stability,
}

impl FloquetResult {
    /// Multipliers of an arbitrary square matrix treated as a monodromy.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        m.require_square()?;
        let mut multipliers = general_eigenvalues(m)?;
        multipliers.sort_by(|a, b| {
            b.norm()
                .total_cmp(&a.norm())
                .then(b.re.total_cmp(&a.re))
                .then(b.im.total_cmp(&a.im))
        });
        let one = Complex64::new(1.0, 0.0);
        let trivial_index = multipliers
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (**a - one).norm().total_cmp(&(**b - one).norm()))
            .map_or(0, |(i, _)| i);
        let max_nontrivial_modulus = multipliers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != trivial_index)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        let trivial_ok = multipliers
            .get(trivial_index)
            .is_some_and(|z| (z - one).norm() <= TRIVIAL_TOLERANCE);
        let stable = trivial_ok && max_nontrivial_modulus < 1.0;
        let verdict = if max_nontrivial_modulus > 1.0 + NEUTRAL_TOLERANCE {
            Stability::Unstable
        } else if stable && max_nontrivial_modulus < 1.0 - NEUTRAL_TOLERANCE {
            Stability::Stable
        } else {
            Stability::Marginal
        };
        Ok(Self {
            multipliers,
            trivial_index,
            max_nontrivial_modulus,
            trivial_tolerance: TRIVIAL_TOLERANCE,
            stable,
            verdict,
        })
    }

    pub fn trivial_multiplier(&self) -> Option<Complex64> {
        self.multipliers.get(self.trivial_index).copied()
    }
}

pub fn floquet_multipliers(m: &MonodromyMatrix) -> Result<FloquetResult> {
    FloquetResult::from_matrix(&m.matrix)
}

/// One point of a master stability curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MsfValue {
    pub max_floquet_modulus: f64,
    /// `ln(max modulus) / T`.
    pub msf: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MsfCurve {
    pub gammas: Vec<f64>,
    pub values: Vec<MsfValue>,
    /// Period of the synchronous orbit the curve was computed on.
    pub period: f64,
}

impl MsfCurve {
    /// CSV with header `gamma,max_modulus,msf,diverged`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "gamma,max_modulus,msf,diverged")?;
        for (g, v) in self.gammas.iter().zip(&self.values) {
            writeln!(
                w,
                "{},{},{},{}",
                fmt17(*g),
                fmt17(v.max_floquet_modulus),
                fmt17(v.msf),
                v.diverged
            )?;
        }
        Ok(())
    }

    fn log_modulus(&self, k: usize) -> f64 {
        let v = &self.values[k];
        if v.diverged {
            f64::INFINITY
        } else {
            v.max_floquet_modulus.ln()
        }
    }

    /// Linear interpolation of `ln(max modulus)` at `gamma`.
    pub fn log_modulus_at(&self, gamma: f64) -> Result<f64> {
        let (min, max) = match (self.gammas.first(), self.gammas.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                return Err(Error::GammaOutOfRange {
                    gamma,
                    min: f64::NAN,
                    max: f64::NAN,
                })
            }
        };
        let slack = 1e-12 * (max - min).abs().max(1.0);
        if !(gamma >= min - slack && gamma <= max + slack) {
            return Err(Error::GammaOutOfRange { gamma, min, max });
        }
        let hi = self.gammas.partition_point(|&g| g < gamma).min(self.gammas.len() - 1);
        if hi == 0 || (self.gammas[hi] - gamma).abs() <= slack {
            return Ok(self.log_modulus(hi));
        }
        let lo = hi - 1;
        let (a, b) = (self.log_modulus(lo), self.log_modulus(hi));
        if a.is_infinite() || b.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let w = (gamma - self.gammas[lo]) / (self.gammas[hi] - self.gammas[lo]);
        Ok(a + w * (b - a))
    }
}

/// Max Floquet modulus of `ζ̇ = (J(x(t)) − γ I) ζ` along the isolated FHN cycle.
pub fn msf_point(p: &FhnParams, cycle: &LimitCycle, gamma: f64, cfg: &IntegratorConfig) -> Result<(MsfValue, FloquetResult)> {
    let field = fhn_field(*p);
    let mono = monodromy(&field, |x: &[f64]| msf_block_matrix([x[0], x[1]], p, gamma), cycle, cfg)?;
    let fr = floquet_multipliers(&mono)?;
    let max = fr.multipliers.first().map_or(0.0, |z| z.norm());
    Ok((
        MsfValue {
            max_floquet_modulus: max,
            msf: max.ln() / cycle.period,
            diverged: false,
        },
        fr,
    ))
}

fn fhn_field(p: FhnParams) -> impl VectorField {
    FnField::new(2, move |x: &[f64], out: &mut [f64]| {
        out.copy_from_slice(&fhn_rhs([x[0], x[1]], &p));
    })
}

/// Settles the isolated FHN oscillator from the origin.
pub fn settle_isolated_fhn(p: &FhnParams, cfg: &IntegratorConfig) -> Result<LimitCycle> {
    settle_to_limit_cycle(&fhn_field(*p), &[0.0, 0.0], cfg)
}

/// Master stability curve on a uniform γ grid. Points whose variational
/// solution blows up are recorded as diverged with infinite modulus.
pub fn msf_sweep(p: &FhnParams, gamma_range: (f64, f64), steps: usize, cfg: &IntegratorConfig) -> Result<MsfCurve> {
    let (min, max) = gamma_range;
    if steps < 2 || !(min.is_finite() && max.is_finite() && min < max) {
        return Err(Error::InvalidParameter(format!(
            "gamma grid needs min < max and at least 2 steps (got [{min}, {max}], {steps})"
        )));
    }
    let cycle = settle_isolated_fhn(p, cfg)?;
    let gammas: Vec<f64> = (0..steps)
        .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
        .collect();
    let values = gammas
        .par_iter()
        .map(|&g| match msf_point(p, &cycle, g, cfg) {
            Ok((v, _)) => Ok(v),
            Err(Error::BlowUp { .. }) => Ok(MsfValue {
                max_floquet_modulus: f64::INFINITY,
                msf: f64::INFINITY,
                diverged: true,
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MsfCurve {
        gammas,
        values,
        period: cycle.period,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeStability {
    pub eigenvalue: f64,
    pub gamma: f64,
    pub log_max_modulus: f64,
    pub msf: f64,
    pub verdict: Stability,
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkMsfReport {
    pub coupling: f64,
    pub modes: Vec<ModeStability>,
    pub verdict: Stability,
}

/// Evaluates the curve at `γ = φ λ` for every Laplacian eigenvalue but the first.
pub fn evaluate_network_msf(curve: &MsfCurve, spectrum: &SpectralDecomposition, phi: f64) -> Result<NetworkMsfReport> {
    let mut modes = Vec::new();
    for &lambda in spectrum.eigenvalues.iter().skip(1) {
        let gamma = phi * lambda;
        let log_mod = curve.log_modulus_at(gamma)?;
        let verdict = if log_mod.abs() <= MARGINAL_LOG_TOLERANCE {
            Stability::Marginal
        } else if log_mod < 0.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        };
        modes.push(ModeStability {
            eigenvalue: lambda,
            gamma,
            log_max_modulus: log_mod,
            msf: log_mod / curve.period,
            verdict,
        });
    }
    let verdict = if modes.iter().any(|m| m.verdict == Stability::Unstable) {
        Stability::Unstable
    } else if modes.iter().all(|m| m.verdict == Stability::Stable) {
        Stability::Stable
    } else {
        Stability::Marginal
    };
    Ok(NetworkMsfReport {
        coupling: phi,
        modes,
        verdict,
    })
}
