use wfl_core::variational::ElasticInterval;
use wfl_core::{
    energy_balance_residual, energy_scale, fenchel_residual, integrate, run_sweep, solve_limit,
    strip_diagnostics, uniform_grid, BristleModel, DissipationDensity, IntegratorConfig,
    LimitSystem, LoadingProgram, SurfaceProfile, SweepSetup, WigglySystem,
};

fn ramp() -> LimitSystem {
    LimitSystem::spring(
        1.0,
        0.0,
        LoadingProgram::Ramp {
            offset: 0.0,
            rate: 1.0,
        },
        2.0,
        0.1,
        -0.1,
    )
    .unwrap()
}

fn canonical(eps: f64) -> WigglySystem {
    WigglySystem::new(
        ramp(),
        BristleModel::vertical(1.0, 2.0, 1.0).unwrap(),
        SurfaceProfile::sinusoid_with_slope(0.1).unwrap(),
        eps,
        1.0,
    )
    .unwrap()
}

/// Classical fixed-step RK4, the brute-force oracle for the adaptive integrator.
fn rk4(sys: &WigglySystem, z0: f64, horizon: f64, steps: usize) -> Vec<(f64, f64)> {
    let h = horizon / steps as f64;
    let f = |t: f64, z: f64| sys.rhs(t, z).unwrap();
    let mut out = vec![(0.0, z0)];
    let mut z = z0;
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = f(t, z);
        let k2 = f(t + 0.5 * h, z + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, z + 0.5 * h * k2);
        let k4 = f(t + h, z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((t + h, z));
    }
    out
}

#[test]
fn adaptive_run_matches_fixed_step_oracle() {
    let sys = canonical(0.1);
    let cfg = IntegratorConfig {
        grid_intervals: 400,
        ..IntegratorConfig::default()
    };
    let traj = integrate(&sys, 0.0, 2.0, &cfg).unwrap();
    let oracle = rk4(&sys, 0.0, 2.0, 40_000);
    for (i, (t, z)) in traj.times.iter().zip(&traj.states).enumerate() {
        let (to, zo) = oracle[i * 100];
        assert!((t - to).abs() < 1e-12);
        assert!((z - zo).abs() < 1e-7, "t={t}: {z} vs {zo}");
    }
}

#[test]
fn sliding_phase_shows_one_slip_per_well() {
    let eps = 0.05;
    let sys = canonical(eps);
    let cfg = IntegratorConfig {
        grid_intervals: 8192,
        ..IntegratorConfig::default()
    };
    let traj = integrate(&sys, 0.0, 2.0, &cfg).unwrap();
    let (a, b) = (4096, 8192);
    let v = &traj.velocities[a..=b];
    let peaks = (1..v.len() - 1)
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > 1.0)
        .count();
    let wells = (traj.states[b] - traj.states[a]) / eps;
    assert!(
        (peaks as f64 - wells).abs() <= 1.5,
        "{peaks} peaks for {wells} wells"
    );
}

#[test]
fn energy_balance_tightens_with_tolerance() {
    let sys = canonical(0.05);
    let run = |rtol: f64| {
        let cfg = IntegratorConfig {
            rtol,
            atol: rtol * 1e-2,
            ..IntegratorConfig::default()
        };
        let traj = integrate(&sys, 0.0, 2.0, &cfg).unwrap();
        energy_balance_residual(&traj) / energy_scale(&traj)
    };
    let (loose, tight) = (run(1e-6), run(1e-8));
    assert!(tight * 2.0 <= loose, "{loose:.3e} -> {tight:.3e}");
    assert!(run(1e-10) <= 1e-6);
}

#[test]
fn fenchel_identity_along_the_solution() {
    let eps = 0.05;
    let sys = canonical(eps);
    let traj = integrate(&sys, 0.0, 2.0, &IntegratorConfig::default()).unwrap();
    let density = DissipationDensity::viscous(eps, 1.0).unwrap();
    let mut force_scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..traj.len() {
        let xi = sys.driving_force(traj.times[i], traj.states[i]).unwrap();
        force_scale = force_scale.max(xi.abs());
        worst = worst.max(fenchel_residual(&density, traj.velocities[i], xi).to_f64());
    }
    assert!(worst <= 1e-8 * force_scale * force_scale, "{worst:.3e}");
}

#[test]
fn strip_distance_decays_from_far_outside() {
    let eps = 0.05;
    let sys = canonical(eps);
    let base = ramp();
    let (_, hi) = base.elastic_strip(0.0);
    let cfg = IntegratorConfig {
        grid_intervals: 8192,
        ..IntegratorConfig::default()
    };
    let traj = integrate(&sys, hi + 1.0, 2.0, &cfg).unwrap();
    let diag = strip_diagnostics(&base, &traj, eps, 1.0).unwrap();
    assert!((diag.delta[0] - 1.0).abs() < 1e-12);
    assert!(diag.delta.iter().all(|&d| d >= 0.0));

    // δ decreases wherever it exceeds 10 ε^β
    for i in 1..diag.delta.len() {
        if diag.delta[i - 1] > 10.0 * eps {
            assert!(diag.delta[i] < diag.delta[i - 1], "t={}", diag.times[i]);
            let rate = sys.strip_distance_rate(traj.times[i], traj.states[i], traj.velocities[i]);
            assert!(rate < 0.0);
        }
    }
    let c = diag.fitted_constant;
    assert!(c.is_finite() && c > 0.0);
    let settle = diag.times.iter().position(|&t| t >= 5.0 * eps).unwrap();
    assert!(diag.delta[settle..].iter().all(|&d| d <= c * eps + 1e-12));
    assert!(diag.delta[settle..].iter().all(|&d| d <= 10.0 * eps));
}

#[test]
fn viscous_solution_stays_near_the_envelopes() {
    for eps in [0.1, 0.02] {
        let sys = canonical(eps);
        let base = ramp();
        let traj = integrate(&sys, 0.0, 2.0, &IntegratorConfig::default()).unwrap();
        let bound = traj
            .times
            .iter()
            .map(|&t| {
                let (lo, hi) = base.elastic_strip(t);
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max);
        assert!(traj.max_abs_state() <= bound + 10.0 * eps);
    }
}

fn sweep_setup() -> SweepSetup {
    let mut s = SweepSetup::new(
        ramp(),
        BristleModel::vertical(1.0, 2.0, 1.0).unwrap(),
        SurfaceProfile::sinusoid_with_slope(0.1).unwrap(),
    );
    s.grid_intervals = 1024;
    s.windows = vec![(0.0, 0.7), (0.7, 1.3), (1.3, 2.0), (0.0, 2.0)];
    s
}

#[test]
fn sweep_is_deterministic_and_window_additive() {
    let eps = [0.1, 0.05, 0.02];
    let mut setup = sweep_setup();
    let a = run_sweep(&setup, &eps).unwrap();
    setup.threads = Some(1);
    let b = run_sweep(&setup, &eps).unwrap();
    assert_eq!(a.sup_errors, b.sup_errors);
    assert_eq!(a.dissipation_gaps, b.dissipation_gaps);
    assert_eq!(a.fitted_order, b.fitted_order);
    assert!(a.monotone(1e-12));

    let limit = solve_limit(&setup.base, 0.0, &setup.grid()).unwrap();
    let whole = limit.dissipation_between(0.0, 2.0).unwrap();
    let parts: f64 = [(0.0, 0.7), (0.7, 1.3), (1.3, 2.0)]
        .iter()
        .map(|&(s, t)| limit.dissipation_between(s, t).unwrap())
        .sum();
    assert!((whole - parts).abs() <= 1e-15);
    assert!((a.limit_dissipation[3] - 0.19).abs() < 1e-12);

    let sys = setup.system(0.05).unwrap();
    let cfg = IntegratorConfig {
        grid_intervals: 1000,
        ..IntegratorConfig::default()
    };
    let traj = integrate(&sys, 0.0, 2.0, &cfg).unwrap();
    let grid = uniform_grid(2.0, 1000);
    let (t1, t2, t3) = (grid[0], grid[350], grid[1000]);
    let split =
        traj.dissipation_between(t1, t2).unwrap() + traj.dissipation_between(t2, t3).unwrap();
    assert!((split - traj.dissipation_between(t1, t3).unwrap()).abs() <= 1e-15);
}

#[test]
fn elastic_interval_is_the_limit_domain() {
    let sys = ramp();
    assert_eq!(sys.interval(), ElasticInterval::new(-0.1, 0.1).unwrap());
}
