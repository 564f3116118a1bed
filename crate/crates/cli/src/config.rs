//! Run configuration: one JSON document per run, unknown keys rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use netsync_core::analysis::DEFAULT_SYNC_TOLERANCE;
use netsync_core::{Graph, IntegratorConfig, SystemSpec, WienDevice, WienParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Oscillator system. May be omitted when `circuit` describes a Wien bridge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<WienCircuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<f64>>,
    /// Seeds the random initial state when `initial_state` is absent.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sync: SyncSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msf: Option<MsfSettings>,
    /// Not embedded in artifacts so that outputs do not depend on where they are written.
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
    /// Also write gnuplot scripts next to the CSV files.
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncSettings {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub hub: usize,
}

fn default_tolerance() -> f64 {
    DEFAULT_SYNC_TOLERANCE
}

impl Default for SyncSettings {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_SYNC_TOLERANCE,
            hub: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsfSettings {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<Graph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

/// Wien-bridge description at the component level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WienCircuit {
    Rc(RcCircuit),
    Device(DeviceCircuit),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcCircuit {
    pub r: f64,
    pub c: f64,
    pub g0: f64,
    pub k_nl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceCircuit {
    pub device: WienDevice,
    pub g0: f64,
}

impl WienCircuit {
    pub fn params(&self) -> netsync_core::Result<WienParams> {
        match *self {
            WienCircuit::Rc(c) => WienParams::from_rc(c.r, c.c, c.g0, c.k_nl),
            WienCircuit::Device(d) => WienParams::from_device(d.device, d.g0),
        }
    }
}

/// Overrides supplied on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub transient: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    /// Fills every defaulted field so the result fully describes the run.
    pub fn resolve(mut self, ov: &Overrides) -> CliResult<Self> {
        let system = match (self.system.take(), self.circuit) {
            (Some(s), None) => s,
            (None, Some(c)) => SystemSpec::WienBridge { params: c.params()? },
            (Some(_), Some(_)) => return Err(CliError::config("give either `system` or `circuit`, not both")),
            (None, None) => return Err(CliError::config("config needs a `system` (or a `circuit`)")),
        };
        system.validate()?;
        if let Some(seed) = ov.seed {
            self.seed = seed;
        }
        let mut integrator = self.integrator.unwrap_or_else(|| default_integrator(&system));
        if let Some(dt) = ov.dt {
            integrator.dt = dt;
        }
        if let Some(t) = ov.t_end {
            integrator.t_end = t;
        }
        if let Some(t) = ov.transient {
            integrator.transient = t;
        }
        integrator.validate()?;
        let x0 = match self.initial_state.take() {
            Some(x) => {
                if x.len() != system.state_dim() {
                    return Err(CliError::config(format!(
                        "initial_state has {} entries, {} needs {}",
                        x.len(),
                        system.name(),
                        system.state_dim()
                    )));
                }
                x
            }
            None => random_state(&system, self.seed),
        };
        if !(self.sync.tolerance > 0.0 && self.sync.tolerance.is_finite()) {
            return Err(CliError::config("sync.tolerance must be positive"));
        }
        Ok(Self {
            system: Some(system),
            integrator: Some(integrator),
            initial_state: Some(x0),
            ..self
        })
    }

    /// Accessors valid after `resolve`.
    pub fn system(&self) -> &SystemSpec {
        self.system.as_ref().expect("resolved config has a system")
    }

    pub fn integrator(&self) -> IntegratorConfig {
        self.integrator.expect("resolved config has integrator settings")
    }

    pub fn x0(&self) -> &[f64] {
        self.initial_state.as_deref().expect("resolved config has an initial state")
    }
}

/// Integration settings scaled to the natural time unit of each model.
pub fn default_integrator(system: &SystemSpec) -> IntegratorConfig {
    match system {
        SystemSpec::KuramotoStar { .. } | SystemSpec::KuramotoReduced { .. } => IntegratorConfig {
            sample_every: 10,
            ..IntegratorConfig::new(1e-3, 200.0, 100.0)
        },
        SystemSpec::FhnSingle { .. } | SystemSpec::FhnStar { .. } | SystemSpec::FhnNetwork { .. } => IntegratorConfig {
            sample_every: 10,
            ..IntegratorConfig::default()
        },
        SystemSpec::WienBridge { params } => {
            let unit = 1.0 / params.omega0;
            IntegratorConfig::new(1e-3 * unit, 300.0 * unit, 200.0 * unit)
        }
        SystemSpec::Harmonic { omega } => {
            let period = 2.0 * PI / omega;
            IntegratorConfig::new(1e-3 * period, 20.0 * period, 5.0 * period)
        }
    }
}

/// Seeded initial state: phases within ±π/4, planar states within the unit box
/// (small amplitudes for the Wien bridge so that growth is observable).
pub fn random_state(system: &SystemSpec, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (span, dim) = match system {
        SystemSpec::KuramotoStar { .. } | SystemSpec::KuramotoReduced { .. } => (PI / 4.0, system.state_dim()),
        SystemSpec::WienBridge { .. } => (1e-2, 1),
        _ => (1.0, system.state_dim()),
    };
    let mut x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-span..span)).collect();
    if let SystemSpec::WienBridge { .. } = system {
        x.push(0.0);
    }
    x
}
