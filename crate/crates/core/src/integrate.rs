//! Fixed-step RK4 integration, period detection and limit-cycle settling.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::SystemSpec;

/// Any `|component|` above this aborts integration as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e6;

/// Minimum number of upward level crossings for a period estimate.
pub const MIN_CROSSINGS: usize = 3;

/// Autonomous vector field `ẋ = f(x)`.
pub trait VectorField {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64], out: &mut [f64]);

    /// The model description, when the field comes from one.
    fn spec(&self) -> Option<&SystemSpec> {
        None
    }
}

/// Adapter turning a closure into a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Leading duration excluded from every post-run analysis.
    #[serde(default)]
    pub transient: f64,
    /// Keep every n-th step in the trajectory.
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn one() -> usize {
    1
}

impl Default for IntegratorConfig {
    /// Settings used for the FitzHugh–Nagumo experiments.
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 400.0,
            transient: 200.0,
            sample_every: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, transient: f64) -> Self {
        Self {
            dt,
            t_end,
            transient,
            sample_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return bad(format!("t_end must be >= dt, got {}", self.t_end));
        }
        if !(self.transient.is_finite() && self.transient >= 0.0 && self.transient < self.t_end) {
            return bad(format!(
                "transient must lie in [0, t_end), got {}",
                self.transient
            ));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Scratch space for classical fourth-order Runge–Kutta steps.
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn step<F: VectorField + ?Sized>(&mut self, f: &F, x: &mut [f64], h: f64) {
        let n = x.len();
        f.eval(x, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        f.eval(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        f.eval(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        f.eval(&self.tmp, &mut self.k4);
        for i in 0..n {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

pub(crate) fn check_state(x: &[f64], time: f64) -> Result<()> {
    for (component, &value) in x.iter().enumerate() {
        if !value.is_finite() || value.abs() > BLOWUP_THRESHOLD {
            return Err(Error::BlowUp {
                time,
                component,
                value,
            });
        }
    }
    Ok(())
}

/// Uniformly sampled solution of an initial value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<f64>,
    dim: usize,
    transient: f64,
    spec: Option<SystemSpec>,
}

impl Trajectory {
    /// Wraps externally produced samples; `states` is row-major with `dim` columns.
    pub fn from_samples(
        times: Vec<f64>,
        states: Vec<f64>,
        dim: usize,
        transient: f64,
        spec: Option<SystemSpec>,
    ) -> Result<Self> {
        if dim == 0 || states.len() != times.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: times.len() * dim,
                actual: states.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        Ok(Self {
            times,
            states,
            dim,
            transient,
            spec,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn transient(&self) -> f64 {
        self.transient
    }

    pub fn spec(&self) -> Option<&SystemSpec> {
        self.spec.as_ref()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states.iter().skip(c).step_by(self.dim).copied().collect()
    }

    /// Sample spacing.
    pub fn spacing(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Index of the first sample at or after the transient.
    pub fn analysis_start(&self) -> usize {
        self.times.partition_point(|&t| t < self.transient)
    }

    /// CSV with header `t,x0,x1,...`, values at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((0..self.dim).map(|i| format!("x{i}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (k, t) in self.times.iter().enumerate() {
            write!(w, "{}", fmt17(*t))?;
            for x in self.state(k) {
                write!(w, ",{}", fmt17(*x))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Integrates `field` from `x0` over `[0, t_end]` with fixed-step RK4.
pub fn integrate<F: VectorField + ?Sized>(field: &F, x0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let dim = field.dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: x0.len(),
        });
    }
    check_state(x0, 0.0)?;
    let n_steps = cfg.n_steps();
    let n_samples = n_steps / cfg.sample_every + 1;
    let mut times = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples * dim);
    let mut x = x0.to_vec();
    let mut rk = Rk4::new(dim);
    times.push(0.0);
    states.extend_from_slice(&x);
    for step in 1..=n_steps {
        rk.step(field, &mut x, cfg.dt);
        let t = step as f64 * cfg.dt;
        check_state(&x, t)?;
        if step % cfg.sample_every == 0 {
            times.push(t);
            states.extend_from_slice(&x);
        }
    }
    Ok(Trajectory {
        times,
        states,
        dim,
        transient: cfg.transient,
        spec: field.spec().cloned(),
    })
}

/// Advances `x0` by exactly `duration` on a uniform grid no coarser than `max_dt`.
pub fn flow<F: VectorField + ?Sized>(field: &F, x0: &[f64], duration: f64, max_dt: f64) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    if duration <= 0.0 {
        return Ok(x);
    }
    let n = (duration / max_dt).ceil().max(1.0) as usize;
    let h = duration / n as f64;
    let mut rk = Rk4::new(x.len());
    for step in 1..=n {
        rk.step(field, &mut x, h);
        check_state(&x, step as f64 * h)?;
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Standard deviation of the crossing spacings.
    pub stddev: f64,
    pub level: f64,
    /// Interpolated upward crossing times.
    pub crossings: Vec<f64>,
}

fn peak_to_peak(xs: &[f64]) -> f64 {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// Period of one component from upward crossings of `level` (default: the
/// post-transient mean) after the transient.
///
/// Decaying or growing oscillations are rejected: the peak-to-peak range of
/// the last third of the window must stay within a factor of two of the first
/// third's, and must not vanish.
pub fn estimate_period(traj: &Trajectory, component: usize, level: Option<f64>) -> Result<PeriodEstimate> {
    if component >= traj.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.dim(),
            actual: component,
        });
    }
    let start = traj.analysis_start();
    let xs: Vec<f64> = traj.component(component)[start..].to_vec();
    let ts = &traj.times()[start..];
    if xs.len() < 6 {
        return Err(Error::NoPeriod("post-transient window has too few samples".into()));
    }
    let level = level.unwrap_or_else(|| xs.iter().sum::<f64>() / xs.len() as f64);

    let third = xs.len() / 3;
    let early = peak_to_peak(&xs[..third]);
    let late = peak_to_peak(&xs[xs.len() - third..]);
    let scale = xs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if late <= 1e-9 * scale {
        return Err(Error::NoPeriod("component is stationary".into()));
    }
    if late < 0.5 * early {
        return Err(Error::NoPeriod(format!(
            "oscillation is decaying (peak-to-peak {early:.3e} -> {late:.3e})"
        )));
    }
    if late > 2.0 * early {
        return Err(Error::NoPeriod(format!(
            "oscillation is growing (peak-to-peak {early:.3e} -> {late:.3e})"
        )));
    }

    let crossings: Vec<f64> = xs
        .windows(2)
        .zip(ts.windows(2))
        .filter(|(x, _)| x[0] < level && x[1] >= level)
        .map(|(x, t)| t[0] + (level - x[0]) / (x[1] - x[0]) * (t[1] - t[0]))
        .collect();
    if crossings.len() < MIN_CROSSINGS {
        return Err(Error::NoPeriod(format!(
            "{} upward crossings of level {level:.6}, need {MIN_CROSSINGS}",
            crossings.len()
        )));
    }
    let spacings: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let period = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let var = spacings.iter().map(|s| (s - period).powi(2)).sum::<f64>() / spacings.len() as f64;
    Ok(PeriodEstimate {
        period,
        stddev: var.sqrt(),
        level,
        crossings,
    })
}

/// A point on a detected periodic orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCycle {
    pub anchor: Vec<f64>,
    pub period: f64,
    pub period_stddev: f64,
    /// `‖x(T) − x(0)‖` when flowing the anchor for one period.
    pub return_error: f64,
    pub section_component: usize,
    pub section_level: f64,
}

/// Integrates through the transient, detects the period on component 0 and
/// anchors the cycle at the last upward section crossing.
pub fn settle_to_limit_cycle<F: VectorField + ?Sized>(field: &F, x0: &[f64], cfg: &IntegratorConfig) -> Result<LimitCycle> {
    settle_on_component(field, x0, cfg, 0)
}

pub fn settle_on_component<F: VectorField + ?Sized>(
    field: &F,
    x0: &[f64],
    cfg: &IntegratorConfig,
    component: usize,
) -> Result<LimitCycle> {
    let traj = integrate(field, x0, cfg)?;
    let est = estimate_period(&traj, component, None)?;
    let t_cross = *est.crossings.last().expect("at least MIN_CROSSINGS crossings");
    let k = traj.times().partition_point(|&t| t <= t_cross) - 1;
    let anchor = flow(field, traj.state(k), t_cross - traj.times()[k], cfg.dt)?;
    let back = flow(field, &anchor, est.period, cfg.dt)?;
    let return_error = back
        .iter()
        .zip(&anchor)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(LimitCycle {
        anchor,
        period: est.period,
        period_stddev: est.stddev,
        return_error,
        section_component: component,
        section_level: est.level,
    })
}
