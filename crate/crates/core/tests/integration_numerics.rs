use std::f64::consts::PI;

use netsync_core::*;

/// Period of the free FHN oscillator with default parameters, measured with
/// dt = 1e-3 after a 200-unit transient (agrees with an adaptive rtol 1e-11 solver).
const FHN_REFERENCE_PERIOD: f64 = 11.023_389_96;

fn harmonic_endpoint_error(dt: f64) -> f64 {
    let spec = SystemSpec::Harmonic { omega: 2.0 * PI };
    let traj = integrate(&spec, &[1.0, 0.0], &IntegratorConfig::new(dt, 1.0, 0.0)).unwrap();
    let x = traj.last_state();
    ((x[0] - 1.0).powi(2) + (x[1] / (2.0 * PI)).powi(2)).sqrt()
}

#[test]
fn rk4_is_fourth_order() {
    let dts = [0.01, 0.005, 0.0025, 0.00125];
    let errs: Vec<f64> = dts.iter().map(|&dt| harmonic_endpoint_error(dt)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio >= 14.0, "ratio {ratio} from {errs:?}");
        assert!(ratio.log2() >= 3.8);
    }
}

#[test]
fn harmonic_energy_drift_is_negligible() {
    let omega = 2.0 * PI;
    let spec = SystemSpec::Harmonic { omega };
    let cfg = IntegratorConfig {
        sample_every: 1000,
        ..IntegratorConfig::new(1e-3, 100.0, 0.0)
    };
    let traj = integrate(&spec, &[1.0, 0.0], &cfg).unwrap();
    let energy = |x: &[f64]| 0.5 * x[1] * x[1] + 0.5 * omega * omega * x[0] * x[0];
    let e0 = energy(traj.state(0));
    let drift = (energy(traj.last_state()) - e0).abs() / e0;
    assert!(drift < 1e-6, "{drift:e}");
}

#[test]
fn integration_is_bitwise_deterministic() {
    let spec = SystemSpec::FhnNetwork {
        params: FhnParams::default(),
        graph: five_node_graph(),
        coupling: 0.115,
    };
    let x0 = [0.1, 0.2, -1.0, 1.5, 0.7, 2.2, 1.9, 2.4, -0.3, 1.0];
    let cfg = IntegratorConfig {
        sample_every: 10,
        ..IntegratorConfig::new(1e-3, 20.0, 0.0)
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    integrate(&spec, &x0, &cfg).unwrap().write_csv(&mut a).unwrap();
    integrate(&spec, &x0, &cfg).unwrap().write_csv(&mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fhn_relaxation_cycle_is_bounded_and_periodic() {
    let spec = SystemSpec::FhnSingle { params: FhnParams::default() };
    let cfg = IntegratorConfig::default();
    let traj = integrate(&spec, &[0.0, 0.0], &cfg).unwrap();
    let v = traj.component(0);
    let start = traj.analysis_start();
    let vmax = v[start..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(vmax < 3.0 && vmax > 0.5, "{vmax}");

    let est = estimate_period(&traj, 0, None).unwrap();
    assert!((est.period - FHN_REFERENCE_PERIOD).abs() < 1e-6, "{}", est.period);
    assert!(est.stddev < 1e-3 * est.period);

    let cycle = settle_to_limit_cycle(&spec, &[0.0, 0.0], &cfg).unwrap();
    assert!(cycle.return_error < 1e-4, "{}", cycle.return_error);

    // planar phase advances by 2π per period
    let ph = phase_of(&traj, 0).unwrap();
    let times = traj.times();
    let advance = (ph[traj.len() - 1] - ph[start]) / (times[traj.len() - 1] - times[start]);
    let expected = 2.0 * PI / est.period;
    assert!((advance - expected).abs() / expected < 0.01, "{advance} vs {expected}");
}

#[test]
fn fhn_without_drive_has_no_cycle() {
    let spec = SystemSpec::FhnSingle {
        params: FhnParams {
            drive: 0.0,
            ..FhnParams::default()
        },
    };
    let err = settle_to_limit_cycle(&spec, &[0.0, 0.0], &IntegratorConfig::default()).unwrap_err();
    assert!(matches!(err, Error::NoPeriod(_)), "{err}");
}

#[test]
fn wien_bridge_oscillates_at_rc_frequency() {
    let params = WienParams::from_rc(1e3, 1e-6, 3.2, 1.0).unwrap();
    let spec = SystemSpec::WienBridge { params };
    let cfg = IntegratorConfig::new(1e-6, 0.3, 0.2);
    let traj = integrate(&spec, &[0.01, 0.0], &cfg).unwrap();
    let est = estimate_period(&traj, 0, None).unwrap();
    let f = 1.0 / est.period;
    assert!((f - 159.155).abs() / 159.155 < 0.05, "{f}");

    let decaying = SystemSpec::WienBridge {
        params: WienParams { g0: 2.5, ..params },
    };
    assert!(settle_to_limit_cycle(&decaying, &[1.0, 0.0], &cfg).is_err());
}
