//! Simulation and synchronization-stability analysis for networks of coupled
//! nonlinear oscillators.
//!
//! The crate covers four oscillator families (Kuramoto phase oscillators on a
//! star, FitzHugh–Nagumo neurons on stars and arbitrary graphs, and the
//! amplitude-stabilised Wien-bridge circuit) and the tools used to certify
//! their synchronous states:
//!
//! * [`graph`]: topologies, Laplacians, symmetric spectra, Gershgorin discs.
//! * [`models`]: vector fields and analytic Jacobians.
//! * [`integrate`]: fixed-step RK4, period detection, limit-cycle settling.
//! * [`floquet`]: monodromy matrices, Floquet multipliers, master stability sweeps.
//! * [`analysis`]: phase extraction, synchronization verdicts, equilibria.

pub mod analysis;
pub mod error;
pub mod floquet;
pub mod graph;
pub mod integrate;
pub mod linalg;
pub mod models;

pub use num_complex::Complex64;

pub use analysis::{
    detect_sync, detect_sync_groups, find_equilibrium, phase_differences, phase_of, sync_error, wrap_angle,
    EquilibriumResult, SyncClass, SyncVerdict,
};
pub use error::{Error, Result};
pub use floquet::{
    evaluate_network_msf, floquet_multipliers, monodromy, msf_point, msf_sweep, settle_isolated_fhn,
    system_monodromy, FloquetResult, MonodromyMatrix, MsfCurve, MsfValue, NetworkMsfReport, Stability,
};
pub use graph::{
    discs_bound_left_half_plane, eigendecompose, eigendecompose_symmetric, gershgorin_discs, laplacian, DiscAxis,
    GershgorinDisc, Graph, LaplacianMatrix, SpectralDecomposition,
};
pub use integrate::{
    estimate_period, integrate, settle_to_limit_cycle, FnField, IntegratorConfig, LimitCycle, PeriodEstimate,
    Trajectory, VectorField,
};
pub use linalg::Matrix;
pub use models::{FhnParams, KuramotoStarParams, SystemSpec, WienDevice, WienParams};

/// The five-node example network: edges 1–2, 1–4, 2–3, 2–5, 4–5 in one-based labels.
pub fn five_node_graph() -> Graph {
    Graph::from_edges(5, &[(0, 1), (0, 3), (1, 2), (1, 4), (3, 4)]).expect("static edge list is valid")
}
