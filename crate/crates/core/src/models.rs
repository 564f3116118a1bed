//! Right-hand sides and Jacobians of the oscillator systems.
//!
//! State layouts:
//!
//! * Kuramoto star: `(θ₀, θ₁, …, θₙ)`, hub first.
//! * Reduced Kuramoto: `(x₁, …, xₙ)` with `xᵢ = θ₀ − θᵢ`.
//! * FitzHugh–Nagumo variants: `(v₀, w₀, v₁, w₁, …)`, node-major; in the star
//!   the hub is node 0.
//! * Wien bridge and harmonic oscillator: `(v, v̇)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::integrate::VectorField;
use crate::linalg::Matrix;

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {x}")))
    }
}

// ---------------------------------------------------------------- Kuramoto

/// Star of phase oscillators with directional couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KuramotoStarParams {
    /// Natural frequency of the hub (rad/s).
    pub omega_hub: f64,
    /// Natural frequency shared by the peripherals (rad/s).
    pub omega_peripheral: f64,
    /// Peripheral-to-hub strengths φᵢ.
    pub incoming: Vec<f64>,
    /// Hub-to-peripheral strengths Aᵢ.
    pub outgoing: Vec<f64>,
}

impl KuramotoStarParams {
    /// Identical frequencies and couplings on every spoke.
    pub fn identical(n_peripheral: usize, omega: f64, coupling: f64) -> Self {
        Self {
            omega_hub: omega,
            omega_peripheral: omega,
            incoming: vec![coupling; n_peripheral],
            outgoing: vec![coupling; n_peripheral],
        }
    }

    pub fn n_peripheral(&self) -> usize {
        self.incoming.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.incoming.is_empty() || self.incoming.len() != self.outgoing.len() {
            return Err(Error::InvalidParameter(format!(
                "incoming ({}) and outgoing ({}) couplings must be non-empty and equal in length",
                self.incoming.len(),
                self.outgoing.len()
            )));
        }
        check_finite("omega_hub", self.omega_hub)?;
        check_finite("omega_peripheral", self.omega_peripheral)?;
        for (k, (&phi, &a)) in self.incoming.iter().zip(&self.outgoing).enumerate() {
            check_finite(&format!("incoming[{k}]"), phi)?;
            check_finite(&format!("outgoing[{k}]"), a)?;
        }
        Ok(())
    }
}

fn kuramoto_star_into(theta: &[f64], p: &KuramotoStarParams, out: &mut [f64]) {
    let hub = theta[0];
    out[0] = p.omega_hub
        + p.incoming
            .iter()
            .zip(&theta[1..])
            .map(|(phi, th)| phi * (th - hub).sin())
            .sum::<f64>();
    for (i, (&a, &th)) in p.outgoing.iter().zip(&theta[1..]).enumerate() {
        out[i + 1] = p.omega_peripheral + a * (hub - th).sin();
    }
}

pub fn kuramoto_star_rhs(theta: &[f64], p: &KuramotoStarParams) -> Result<Vec<f64>> {
    check_len(p.n_peripheral() + 1, theta.len())?;
    let mut out = vec![0.0; theta.len()];
    kuramoto_star_into(theta, p, &mut out);
    Ok(out)
}

pub fn kuramoto_star_jacobian(theta: &[f64], p: &KuramotoStarParams) -> Result<Matrix> {
    let n = p.n_peripheral();
    check_len(n + 1, theta.len())?;
    let mut j = Matrix::zeros(n + 1, n + 1);
    let hub = theta[0];
    for i in 0..n {
        let c = (theta[i + 1] - hub).cos();
        j[(0, i + 1)] = p.incoming[i] * c;
        j[(0, 0)] -= p.incoming[i] * c;
        j[(i + 1, 0)] = p.outgoing[i] * c;
        j[(i + 1, i + 1)] = -p.outgoing[i] * c;
    }
    Ok(j)
}

fn kuramoto_reduced_into(x: &[f64], p: &KuramotoStarParams, out: &mut [f64]) {
    let detune = p.omega_hub - p.omega_peripheral;
    let feedback: f64 = p.incoming.iter().zip(x).map(|(phi, xj)| phi * xj.sin()).sum();
    for (i, (&a, &xi)) in p.outgoing.iter().zip(x).enumerate() {
        out[i] = detune - a * xi.sin() - feedback;
    }
}

/// Dynamics of the hub-relative phase differences `xᵢ = θ₀ − θᵢ`.
///
/// `ẋᵢ = ω₀ − ω − (φᵢ + Aᵢ) sin xᵢ − Σ_{j≠i} φⱼ sin xⱼ`.
pub fn kuramoto_reduced_rhs(x: &[f64], p: &KuramotoStarParams) -> Result<Vec<f64>> {
    check_len(p.n_peripheral(), x.len())?;
    let mut out = vec![0.0; x.len()];
    kuramoto_reduced_into(x, p, &mut out);
    Ok(out)
}

pub fn kuramoto_reduced_jacobian(x: &[f64], p: &KuramotoStarParams) -> Result<Matrix> {
    let n = p.n_peripheral();
    check_len(n, x.len())?;
    let mut j = Matrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            j[(i, k)] = -p.incoming[k] * x[k].cos();
        }
        j[(i, i)] -= p.outgoing[i] * x[i].cos();
    }
    Ok(j)
}

// ---------------------------------------------------------------- FitzHugh–Nagumo

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FhnParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// External drive current I.
    pub drive: f64,
}

impl Default for FhnParams {
    fn default() -> Self {
        Self {
            a: 3.0,
            b: 2.0,
            c: 1.0,
            d: 0.2799991,
            drive: 2.1,
        }
    }
}

/// Uniform coupling strength used with the published FHN experiments.
pub const DEFAULT_FHN_COUPLING: f64 = 0.115;

impl FhnParams {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("drive", self.drive),
        ] {
            check_finite(name, x)?;
        }
        if self.c == 0.0 {
            return Err(Error::InvalidParameter("c must be nonzero".into()));
        }
        Ok(())
    }
}

/// Isolated node: `v̇ = c(v − w − v³/3) + I`, `ẇ = d(a + b v − w)`.
pub fn fhn_rhs(state: [f64; 2], p: &FhnParams) -> [f64; 2] {
    let [v, w] = state;
    [
        p.c * (v - w - v * v * v / 3.0) + p.drive,
        p.d * (p.a + p.b * v - w),
    ]
}

pub fn fhn_jacobian(v: f64, p: &FhnParams) -> Matrix {
    let mut j = Matrix::zeros(2, 2);
    j[(0, 0)] = p.c * (1.0 - v * v);
    j[(0, 1)] = -p.c;
    j[(1, 0)] = p.d * p.b;
    j[(1, 1)] = -p.d;
    j
}

fn fhn_star_into(state: &[f64], p: &FhnParams, incoming: &[f64], outgoing: &[f64], out: &mut [f64]) {
    let (vh, wh) = (state[0], state[1]);
    let [dvh, dwh] = fhn_rhs([vh, wh], p);
    out[0] = dvh;
    out[1] = dwh;
    for (i, (&phi, &a)) in incoming.iter().zip(outgoing).enumerate() {
        let (v, w) = (state[2 * i + 2], state[2 * i + 3]);
        out[0] += phi * (v - vh);
        out[1] += phi * (w - wh);
        let [dv, dw] = fhn_rhs([v, w], p);
        out[2 * i + 2] = dv + a * (vh - v);
        out[2 * i + 3] = dw + a * (wh - w);
    }
}

/// Star of FHN nodes, hub first, diffusively coupled on both `v` and `w`.
/// `incoming[i]` weights peripheral i's pull on the hub, `outgoing[i]` the hub's pull on it.
pub fn fhn_star_rhs(state: &[f64], p: &FhnParams, incoming: &[f64], outgoing: &[f64]) -> Result<Vec<f64>> {
    check_star_couplings(incoming, outgoing)?;
    check_len(2 * (incoming.len() + 1), state.len())?;
    let mut out = vec![0.0; state.len()];
    fhn_star_into(state, p, incoming, outgoing, &mut out);
    Ok(out)
}

fn check_star_couplings(incoming: &[f64], outgoing: &[f64]) -> Result<()> {
    if incoming.is_empty() || incoming.len() != outgoing.len() {
        return Err(Error::InvalidParameter(format!(
            "star needs matching non-empty coupling lists (incoming {}, outgoing {})",
            incoming.len(),
            outgoing.len()
        )));
    }
    Ok(())
}

/// Jacobian of [`fhn_star_rhs`]; the hub diagonal carries `−Σφᵢ` on both channels.
pub fn fhn_star_variational_matrix(
    state: &[f64],
    p: &FhnParams,
    incoming: &[f64],
    outgoing: &[f64],
) -> Result<Matrix> {
    check_star_couplings(incoming, outgoing)?;
    let dim = 2 * (incoming.len() + 1);
    check_len(dim, state.len())?;
    let mut j = Matrix::zeros(dim, dim);
    let phi_sum: f64 = incoming.iter().sum();
    j[(0, 0)] = p.c * (1.0 - state[0] * state[0]) - phi_sum;
    j[(0, 1)] = -p.c;
    j[(1, 0)] = p.d * p.b;
    j[(1, 1)] = -p.d - phi_sum;
    for (i, (&phi, &a)) in incoming.iter().zip(outgoing).enumerate() {
        let (rv, rw) = (2 * i + 2, 2 * i + 3);
        let v = state[rv];
        j[(0, rv)] = phi;
        j[(1, rw)] = phi;
        j[(rv, 0)] = a;
        j[(rw, 1)] = a;
        j[(rv, rv)] = p.c * (1.0 - v * v) - a;
        j[(rv, rw)] = -p.c;
        j[(rw, rv)] = p.d * p.b;
        j[(rw, rw)] = -p.d - a;
    }
    Ok(j)
}

fn fhn_network_into(state: &[f64], p: &FhnParams, g: &Graph, phi: f64, out: &mut [f64]) {
    for node in 0..g.n_nodes() {
        let [dv, dw] = fhn_rhs([state[2 * node], state[2 * node + 1]], p);
        out[2 * node] = dv;
        out[2 * node + 1] = dw;
    }
    for (i, j) in g.edges() {
        for ch in 0..2 {
            let diff = state[2 * j + ch] - state[2 * i + ch];
            out[2 * i + ch] += phi * diff;
            out[2 * j + ch] -= phi * diff;
        }
    }
}

/// Network of FHN nodes with uniform diffusive coupling `−φ (L ⊗ I₂) x`.
pub fn fhn_network_rhs(state: &[f64], p: &FhnParams, g: &Graph, phi: f64) -> Result<Vec<f64>> {
    check_len(2 * g.n_nodes(), state.len())?;
    let mut out = vec![0.0; state.len()];
    fhn_network_into(state, p, g, phi, &mut out);
    Ok(out)
}

pub fn fhn_network_jacobian(state: &[f64], p: &FhnParams, g: &Graph, phi: f64) -> Result<Matrix> {
    let n = g.n_nodes();
    check_len(2 * n, state.len())?;
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for node in 0..n {
        let block = fhn_jacobian(state[2 * node], p);
        let deg = g.degree(node) as f64;
        for r in 0..2 {
            for c in 0..2 {
                j[(2 * node + r, 2 * node + c)] = block[(r, c)];
            }
            j[(2 * node + r, 2 * node + r)] -= phi * deg;
        }
    }
    for (a, b) in g.edges() {
        for ch in 0..2 {
            j[(2 * a + ch, 2 * b + ch)] = phi;
            j[(2 * b + ch, 2 * a + ch)] = phi;
        }
    }
    Ok(j)
}

/// Transverse variational block `J(v) − γ I₂` for identity coupling, `γ = φ·λ`.
pub fn msf_block_matrix(sync_state: [f64; 2], p: &FhnParams, gamma: f64) -> Matrix {
    let mut m = fhn_jacobian(sync_state[0], p);
    m[(0, 0)] -= gamma;
    m[(1, 1)] -= gamma;
    m
}

// ---------------------------------------------------------------- Wien bridge

/// Component values a Wien-bridge oscillator is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WienDevice {
    /// Bridge resistance (Ω).
    pub r: f64,
    /// Bridge capacitance (F).
    pub c: f64,
    /// Diode saturation current (A).
    pub i_s: f64,
    /// Feedback resistor in parallel with the diodes (Ω).
    pub r_f2: f64,
    /// Diode ideality factor.
    pub ideality: f64,
    /// Thermal voltage (V).
    pub v_t: f64,
}

impl WienDevice {
    /// `8 I_s R_f2 / (9 (n V_T)³)`, in V⁻².
    pub fn nonlinearity(&self) -> f64 {
        8.0 * self.i_s * self.r_f2 / (9.0 * (self.ideality * self.v_t).powi(3))
    }
}

/// Amplitude-stabilised Wien-bridge oscillator in van der Pol form:
/// `v̈ + ω₀[(3 − G₀) + k v²] v̇ + ω₀² v = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WienParams {
    /// `1 / (RC)` in rad/s.
    pub omega0: f64,
    /// Small-signal amplifier gain G₀.
    pub g0: f64,
    /// Cubic gain-compression coefficient (V⁻²).
    pub k_nl: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<WienDevice>,
}

impl WienParams {
    pub fn from_rc(r: f64, c: f64, g0: f64, k_nl: f64) -> Result<Self> {
        if !(r > 0.0 && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "R and C must be positive (R = {r}, C = {c})"
            )));
        }
        let p = Self {
            omega0: 1.0 / (r * c),
            g0,
            k_nl,
            device: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_device(device: WienDevice, g0: f64) -> Result<Self> {
        let mut p = Self::from_rc(device.r, device.c, g0, device.nonlinearity())?;
        p.device = Some(device);
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("g0", self.g0)?;
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if !(self.k_nl > 0.0 && self.k_nl.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "k_nl must be positive, got {}",
                self.k_nl
            )));
        }
        Ok(())
    }

    /// `f = 1 / (2πRC)` in Hz.
    pub fn natural_frequency_hz(&self) -> f64 {
        self.omega0 / (2.0 * PI)
    }

    /// Weakly nonlinear (averaged) steady-state amplitude `2 √((G₀ − 3) / k)`;
    /// `None` when the origin is not linearly unstable.
    pub fn averaged_amplitude(&self) -> Option<f64> {
        (self.g0 > 3.0).then(|| 2.0 * ((self.g0 - 3.0) / self.k_nl).sqrt())
    }
}

pub fn wien_bridge_rhs(state: [f64; 2], p: &WienParams) -> [f64; 2] {
    let [v, dv] = state;
    let damping = p.omega0 * ((3.0 - p.g0) + p.k_nl * v * v);
    [dv, -damping * dv - p.omega0 * p.omega0 * v]
}

pub fn wien_bridge_jacobian(state: [f64; 2], p: &WienParams) -> Matrix {
    let [v, dv] = state;
    let mut j = Matrix::zeros(2, 2);
    j[(0, 1)] = 1.0;
    j[(1, 0)] = -2.0 * p.omega0 * p.k_nl * v * dv - p.omega0 * p.omega0;
    j[(1, 1)] = -p.omega0 * ((3.0 - p.g0) + p.k_nl * v * v);
    j
}

// ---------------------------------------------------------------- SystemSpec

/// A fully specified oscillator system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    KuramotoStar {
        params: KuramotoStarParams,
    },
    KuramotoReduced {
        params: KuramotoStarParams,
    },
    FhnSingle {
        #[serde(default)]
        params: FhnParams,
    },
    FhnStar {
        #[serde(default)]
        params: FhnParams,
        incoming: Vec<f64>,
        outgoing: Vec<f64>,
    },
    FhnNetwork {
        #[serde(default)]
        params: FhnParams,
        graph: Graph,
        coupling: f64,
    },
    WienBridge {
        params: WienParams,
    },
    /// Linear oscillator `v̈ = −ω² v`; a reference system with a known flow.
    Harmonic {
        omega: f64,
    },
}

impl SystemSpec {
    pub fn fhn_star_uniform(params: FhnParams, n_peripheral: usize, coupling: f64) -> Self {
        SystemSpec::FhnStar {
            params,
            incoming: vec![coupling; n_peripheral],
            outgoing: vec![coupling; n_peripheral],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::KuramotoStar { .. } => "kuramoto_star",
            SystemSpec::KuramotoReduced { .. } => "kuramoto_reduced",
            SystemSpec::FhnSingle { .. } => "fhn_single",
            SystemSpec::FhnStar { .. } => "fhn_star",
            SystemSpec::FhnNetwork { .. } => "fhn_network",
            SystemSpec::WienBridge { .. } => "wien_bridge",
            SystemSpec::Harmonic { .. } => "harmonic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SystemSpec::KuramotoStar { params } | SystemSpec::KuramotoReduced { params } => {
                params.validate()
            }
            SystemSpec::FhnSingle { params } => params.validate(),
            SystemSpec::FhnStar {
                params,
                incoming,
                outgoing,
            } => {
                params.validate()?;
                check_star_couplings(incoming, outgoing)?;
                for &k in incoming.iter().chain(outgoing) {
                    check_finite("coupling", k)?;
                }
                Ok(())
            }
            SystemSpec::FhnNetwork {
                params, coupling, ..
            } => {
                params.validate()?;
                if !(coupling.is_finite() && *coupling >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "coupling must be finite and non-negative, got {coupling}"
                    )));
                }
                Ok(())
            }
            SystemSpec::WienBridge { params } => params.validate(),
            SystemSpec::Harmonic { omega } => {
                if omega.is_finite() && *omega > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "omega must be positive, got {omega}"
                    )))
                }
            }
        }
    }

    /// Number of oscillator nodes.
    pub fn n_nodes(&self) -> usize {
        match self {
            SystemSpec::KuramotoStar { params } => params.n_peripheral() + 1,
            SystemSpec::KuramotoReduced { params } => params.n_peripheral() + 1,
            SystemSpec::FhnSingle { .. } | SystemSpec::WienBridge { .. } | SystemSpec::Harmonic { .. } => 1,
            SystemSpec::FhnStar { incoming, .. } => incoming.len() + 1,
            SystemSpec::FhnNetwork { graph, .. } => graph.n_nodes(),
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            SystemSpec::KuramotoStar { params } => params.n_peripheral() + 1,
            SystemSpec::KuramotoReduced { params } => params.n_peripheral(),
            SystemSpec::FhnSingle { .. } | SystemSpec::WienBridge { .. } | SystemSpec::Harmonic { .. } => 2,
            SystemSpec::FhnStar { incoming, .. } => 2 * (incoming.len() + 1),
            SystemSpec::FhnNetwork { graph, .. } => 2 * graph.n_nodes(),
        }
    }

    /// Components per node: 1 for phase models, 2 for planar oscillators.
    pub fn node_dim(&self) -> usize {
        if self.is_phase_model() {
            1
        } else {
            2
        }
    }

    pub fn is_phase_model(&self) -> bool {
        matches!(
            self,
            SystemSpec::KuramotoStar { .. } | SystemSpec::KuramotoReduced { .. }
        )
    }

    /// Analytic Jacobian of the vector field at `x`.
    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        check_len(self.state_dim(), x.len())?;
        Ok(match self {
            SystemSpec::KuramotoStar { params } => kuramoto_star_jacobian(x, params)?,
            SystemSpec::KuramotoReduced { params } => kuramoto_reduced_jacobian(x, params)?,
            SystemSpec::FhnSingle { params } => fhn_jacobian(x[0], params),
            SystemSpec::FhnStar {
                params,
                incoming,
                outgoing,
            } => fhn_star_variational_matrix(x, params, incoming, outgoing)?,
            SystemSpec::FhnNetwork {
                params,
                graph,
                coupling,
            } => fhn_network_jacobian(x, params, graph, *coupling)?,
            SystemSpec::WienBridge { params } => wien_bridge_jacobian([x[0], x[1]], params),
            SystemSpec::Harmonic { omega } => {
                Matrix::from_rows(&[vec![0.0, 1.0], vec![-omega * omega, 0.0]])?
            }
        })
    }

    /// Evaluates the vector field, checking the state length.
    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.state_dim(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.eval(x, &mut out);
        Ok(out)
    }
}

impl VectorField for SystemSpec {
    fn dim(&self) -> usize {
        self.state_dim()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            SystemSpec::KuramotoStar { params } => kuramoto_star_into(x, params, out),
            SystemSpec::KuramotoReduced { params } => kuramoto_reduced_into(x, params, out),
            SystemSpec::FhnSingle { params } => out.copy_from_slice(&fhn_rhs([x[0], x[1]], params)),
            SystemSpec::FhnStar {
                params,
                incoming,
                outgoing,
            } => fhn_star_into(x, params, incoming, outgoing, out),
            SystemSpec::FhnNetwork {
                params,
                graph,
                coupling,
            } => fhn_network_into(x, params, graph, *coupling, out),
            SystemSpec::WienBridge { params } => {
                out.copy_from_slice(&wien_bridge_rhs([x[0], x[1]], params))
            }
            SystemSpec::Harmonic { omega } => {
                out[0] = x[1];
                out[1] = -omega * omega * x[0];
            }
        }
    }

    fn spec(&self) -> Option<&SystemSpec> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kuramoto_star_examples() {
        let p = KuramotoStarParams::identical(3, 1.0, 1.0);
        assert_eq!(kuramoto_star_rhs(&[0.3; 4], &p).unwrap(), vec![1.0; 4]);

        let p = KuramotoStarParams::identical(3, 0.0, 1.0);
        let d = kuramoto_star_rhs(&[0.0, PI / 2.0, 0.0, 0.0], &p).unwrap();
        assert!(close(d[0], 1.0, 1e-15) && close(d[1], -1.0, 1e-15));
        assert_eq!((d[2], d[3]), (0.0, 0.0));

        let p = KuramotoStarParams::identical(1, 0.0, 2.0);
        let d = kuramoto_star_rhs(&[0.0, PI], &p).unwrap();
        assert!(d.iter().all(|x| x.abs() < 1e-15));

        assert!(kuramoto_star_rhs(&[0.0; 3], &KuramotoStarParams::identical(3, 1.0, 1.0)).is_err());
    }

    #[test]
    fn kuramoto_reduced_examples() {
        let p = KuramotoStarParams::identical(3, 1.0, 1.0);
        assert_eq!(kuramoto_reduced_rhs(&[0.0; 3], &p).unwrap(), vec![0.0; 3]);
        let at_2pi = kuramoto_reduced_rhs(&[2.0 * PI; 3], &p).unwrap();
        assert!(at_2pi.iter().all(|x| x.abs() < 1e-14));
        let d = kuramoto_reduced_rhs(&[PI / 2.0, 0.0, 0.0], &p).unwrap();
        assert!(close(d[0], -2.0, 1e-15) && close(d[1], -1.0, 1e-15) && close(d[2], -1.0, 1e-15));
        assert!(kuramoto_reduced_rhs(&[0.0; 2], &p).is_err());
    }

    #[test]
    fn kuramoto_reduced_jacobian_at_equilibria() {
        let p = KuramotoStarParams::identical(3, 1.0, 1.0);
        let j = kuramoto_reduced_jacobian(&[2.0 * PI; 3], &p).unwrap();
        assert_eq!(
            j.to_rows(),
            vec![
                vec![-2.0, -1.0, -1.0],
                vec![-1.0, -2.0, -1.0],
                vec![-1.0, -1.0, -2.0]
            ]
        );
        let j = kuramoto_reduced_jacobian(&[PI; 3], &p).unwrap();
        assert_eq!(j[(0, 0)], 2.0);
        assert_eq!(j[(0, 1)], 1.0);
    }

    #[test]
    fn fhn_examples() {
        let d = fhn_rhs([0.0, 0.0], &FhnParams::default());
        assert!(close(d[0], 2.1, 1e-15));
        assert!(close(d[1], 0.8399973, 1e-15));
        let p = FhnParams {
            drive: 0.0,
            a: 0.0,
            ..FhnParams::default()
        };
        assert_eq!(fhn_rhs([0.0, 0.0], &p), [0.0, 0.0]);
        let p = FhnParams {
            drive: 0.0,
            ..FhnParams::default()
        };
        assert!(fhn_rhs([1.0, 2.0 / 3.0], &p)[0].abs() < 1e-15);
    }

    #[test]
    fn fhn_star_hand_evaluation() {
        let p = FhnParams::default();
        let k = [0.115, 0.115];
        let d = fhn_star_rhs(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], &p, &k, &k).unwrap();
        assert!(close(d[0], 1.0 - 1.0 / 3.0 + 2.1 - 0.23, 1e-14));
        assert!(close(d[1], p.d * (p.a + p.b), 1e-14));
        // peripheral 1: v̇ = 2.1 + A(1 - 0), ẇ = d·a
        assert!(close(d[2], 2.1 + 0.115, 1e-14));
        assert!(close(d[3], p.d * p.a, 1e-14));

        let uncoupled = fhn_star_rhs(&[0.5, 1.0, -1.0, 2.0, 0.1, 0.2], &p, &[0.0; 2], &[0.0; 2]).unwrap();
        let expect: Vec<f64> = [[0.5, 1.0], [-1.0, 2.0], [0.1, 0.2]]
            .iter()
            .flat_map(|s| fhn_rhs(*s, &p))
            .collect();
        assert_eq!(uncoupled, expect);
    }

    #[test]
    fn fhn_star_variational_structure() {
        let p = FhnParams {
            c: 1.0,
            d: 0.28,
            b: 2.0,
            ..FhnParams::default()
        };
        let m = fhn_star_variational_matrix(&[0.0; 6], &p, &[0.0; 2], &[0.0; 2]).unwrap();
        for node in 0..3 {
            let o = 2 * node;
            assert_eq!(m[(o, o)], 1.0);
            assert_eq!(m[(o, o + 1)], -1.0);
            assert!(close(m[(o + 1, o)], 0.56, 1e-15));
            assert_eq!(m[(o + 1, o + 1)], -0.28);
        }
        let m = fhn_star_variational_matrix(&[0.3; 6], &p, &[0.1, 0.2], &[0.3, 0.4]).unwrap();
        assert_eq!(m[(0, 2)], 0.1);
        assert_eq!(m[(0, 4)], 0.2);
        assert_eq!(m[(2, 0)], 0.3);
        assert_eq!(m[(4, 0)], 0.4);
    }

    #[test]
    fn fhn_network_degree_three_node() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 3), (1, 2), (1, 4), (3, 4)]).unwrap();
        let p = FhnParams::default();
        let phi = 0.115;
        let state = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        let d = fhn_network_rhs(&state, &p, &g, phi).unwrap();
        let own = fhn_rhs([0.3, 0.4], &p);
        // node index 1 couples to 0, 2 and 4
        let cv = phi * (state[8] + state[4] + state[0] - 3.0 * state[2]);
        let cw = phi * (state[9] + state[5] + state[1] - 3.0 * state[3]);
        assert!(close(d[2], own[0] + cv, 1e-15));
        assert!(close(d[3], own[1] + cw, 1e-15));
        assert!(fhn_network_rhs(&state[..8], &p, &g, phi).is_err());
    }

    #[test]
    fn msf_block_examples() {
        let p = FhnParams::default();
        let m = msf_block_matrix([0.0, 0.0], &p, 0.0);
        assert_eq!(m.to_rows(), vec![vec![p.c, -p.c], vec![p.d * p.b, -p.d]]);
        let shifted = msf_block_matrix([0.4, 1.0], &p, 2.5);
        let base = msf_block_matrix([0.4, 1.0], &p, 0.0);
        assert!(close(base.trace() - shifted.trace(), 5.0, 1e-14));
    }

    #[test]
    fn wien_examples() {
        let p = WienParams::from_rc(1e3, 1e-6, 3.0, 1.0).unwrap();
        let d = wien_bridge_rhs([1.0, 0.0], &p);
        assert_eq!(d, [0.0, -p.omega0 * p.omega0]);
        assert!(close(p.natural_frequency_hz(), 159.15494309189535, 1e-9));

        let unstable = WienParams::from_rc(1e3, 1e-6, 3.2, 1.0).unwrap();
        let j = wien_bridge_jacobian([0.0, 0.0], &unstable);
        assert!(j.trace() > 0.0);
        assert!(WienParams::from_rc(1e3, 1e-6, 3.2, 0.0).is_err());
        assert!(WienParams::from_rc(0.0, 1e-6, 3.2, 1.0).is_err());
    }

    #[test]
    fn wien_device_nonlinearity() {
        let dev = WienDevice {
            r: 1e3,
            c: 1e-6,
            i_s: 1e-14,
            r_f2: 1e4,
            ideality: 1.0,
            v_t: 0.025,
        };
        let p = WienParams::from_device(dev, 3.2).unwrap();
        assert!(close(p.k_nl, 8.0 * 1e-14 * 1e4 / (9.0 * 0.025f64.powi(3)), 1e-18));
        assert_eq!(p.omega0, 1e3);
    }

    #[test]
    fn system_spec_dims_and_serde() {
        let spec = SystemSpec::fhn_star_uniform(FhnParams::default(), 2, 0.115);
        assert_eq!(spec.state_dim(), 6);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"model\":\"fhn_star\""));
        let back: SystemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let minimal: SystemSpec = serde_json::from_str(r#"{"model":"fhn_single"}"#).unwrap();
        assert_eq!(minimal, SystemSpec::FhnSingle { params: FhnParams::default() });
        assert!(serde_json::from_str::<SystemSpec>(r#"{"model":"fhn_single","bogus":1}"#).is_err());

        let k = SystemSpec::KuramotoReduced {
            params: KuramotoStarParams::identical(3, 1.0, 1.0),
        };
        assert_eq!(k.state_dim(), 3);
        assert_eq!(SystemSpec::Harmonic { omega: 1.0 }.state_dim(), 2);
    }
}
