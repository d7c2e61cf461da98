//! ε-sweeps comparing viscous trajectories against the rate-independent limit.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limit::{solve_limit, LimitSystem};
use crate::models::BristleModel;
use crate::profiles::SurfaceProfile;
use crate::trajectory::{uniform_grid, Trajectory};
use crate::viscous::{integrate_on, IntegratorConfig, WigglySystem};

/// Everything a sweep shares across scales.
#[derive(Debug, Clone)]
pub struct SweepSetup {
    pub base: LimitSystem,
    pub model: BristleModel,
    pub profile: SurfaceProfile,
    pub gamma: f64,
    pub z0: f64,
    pub grid_intervals: usize,
    pub integrator: IntegratorConfig,
    /// Time windows `[t1, t2]` on which dissipation is compared.
    pub windows: Vec<(f64, f64)>,
    /// Worker cap; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SweepSetup {
    pub fn new(base: LimitSystem, model: BristleModel, profile: SurfaceProfile) -> Self {
        let horizon = base.horizon();
        SweepSetup {
            base,
            model,
            profile,
            gamma: 1.0,
            z0: 0.0,
            grid_intervals: crate::limit::DEFAULT_GRID_INTERVALS,
            integrator: IntegratorConfig::default(),
            windows: vec![(0.0, horizon)],
            threads: None,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.base.horizon(), self.grid_intervals)
    }

    pub fn system(&self, epsilon: f64) -> Result<WigglySystem> {
        WigglySystem::new(
            self.base.clone(),
            self.model,
            self.profile.clone(),
            epsilon,
            self.gamma,
        )
    }

    /// Integrator settings at scale `ε`: tolerances shrink linearly below `ε = 0.1`.
    pub fn integrator_at(&self, epsilon: f64) -> IntegratorConfig {
        let f = (10.0 * epsilon).min(1.0);
        IntegratorConfig {
            rtol: self.integrator.rtol * f,
            atol: self.integrator.atol * f,
            ..self.integrator
        }
    }

    /// Fail-fast validation of a sweep over `epsilons`.
    pub fn check(&self, epsilons: &[f64]) -> Result<()> {
        if epsilons.is_empty() {
            return Err(Error::Domain("sweep needs at least one epsilon".into()));
        }
        if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Domain("epsilons must be strictly decreasing".into()));
        }
        let horizon = self.base.horizon();
        for &(t1, t2) in &self.windows {
            if !(0.0 <= t1 && t1 < t2 && t2 <= horizon) {
                return Err(Error::Domain(format!(
                    "window [{t1}, {t2}] not inside [0, {horizon}]"
                )));
            }
        }
        for &eps in epsilons {
            self.system(eps)?;
        }
        self.integrator.check()
    }
}

/// Measured convergence of a sweep, one row per ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub epsilons: Vec<f64>,
    pub sup_errors: Vec<f64>,
    /// `|∫ ε^γ ż_ε² - ∫ R(ż̄)|` per window, one inner vector per ε.
    pub dissipation_gaps: Vec<Vec<f64>>,
    pub windows: Vec<(f64, f64)>,
    /// `∫ R(ż̄)` per window.
    pub limit_dissipation: Vec<f64>,
    /// Least-squares slope of `log sup_error` against `log ε`.
    pub fitted_order: Option<f64>,
    pub runtimes: Vec<f64>,
}

impl SweepReport {
    pub fn len(&self) -> usize {
        self.epsilons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilons.is_empty()
    }

    /// Sup errors strictly decrease, up to `slack`.
    pub fn monotone(&self, slack: f64) -> bool {
        self.sup_errors.windows(2).all(|w| w[1] < w[0] + slack)
    }
}

/// A sweep stopped by a failing trajectory, with the rows finished before it.
#[derive(Debug, Clone, thiserror::Error)]
#[error("sweep aborted at epsilon = {epsilon}: {source}")]
pub struct SweepFailure {
    pub partial: Box<SweepReport>,
    pub epsilon: f64,
    #[source]
    pub source: Error,
}

impl From<SweepFailure> for Error {
    fn from(f: SweepFailure) -> Self {
        f.source
    }
}

/// Slope of the least-squares line through `(log x, log y)`.
pub fn fit_order(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct Row {
    sup_error: f64,
    gaps: Vec<f64>,
    runtime: f64,
}

fn run_one(setup: &SweepSetup, limit: &Trajectory, grid: &[f64], epsilon: f64) -> Result<Row> {
    let start = Instant::now();
    let system = setup.system(epsilon)?;
    let traj = integrate_on(&system, setup.z0, grid, &setup.integrator_at(epsilon))?;
    let sup_error = traj.sup_distance(limit)?;
    let gaps = setup
        .windows
        .iter()
        .map(|&(t1, t2)| {
            Ok((traj.dissipation_between(t1, t2)? - limit.dissipation_between(t1, t2)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Row {
        sup_error,
        gaps,
        runtime: start.elapsed().as_secs_f64(),
    })
}

/// Runs the viscous problem for every ε and compares it with the limit
/// trajectory on the shared uniform grid.
///
/// All scales are validated before any integration starts. Rows are computed
/// in parallel and assembled by index, so the numbers do not depend on
/// scheduling.
pub fn run_sweep(
    setup: &SweepSetup,
    epsilons: &[f64],
) -> std::result::Result<SweepReport, SweepFailure> {
    let empty = |epsilon: f64, source: Error| SweepFailure {
        partial: Box::new(SweepReport {
            epsilons: vec![],
            sup_errors: vec![],
            dissipation_gaps: vec![],
            windows: setup.windows.clone(),
            limit_dissipation: vec![],
            fitted_order: None,
            runtimes: vec![],
        }),
        epsilon,
        source,
    };
    if let Err(e) = setup.check(epsilons) {
        let eps = epsilons
            .iter()
            .copied()
            .find(|&x| setup.system(x).is_err())
            .unwrap_or(f64::NAN);
        return Err(empty(eps, e));
    }
    let grid = setup.grid();
    let limit = solve_limit(&setup.base, setup.z0, &grid).map_err(|e| empty(f64::NAN, e))?;
    let limit_dissipation = setup
        .windows
        .iter()
        .map(|&(t1, t2)| limit.dissipation_between(t1, t2))
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| empty(f64::NAN, e))?;

    let work = || -> Vec<Result<Row>> {
        epsilons
            .par_iter()
            .map(|&eps| run_one(setup, &limit, &grid, eps))
            .collect()
    };
    let rows = match setup.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(work),
            Err(e) => return Err(empty(f64::NAN, Error::Domain(e.to_string()))),
        },
        None => work(),
    };

    let mut report = SweepReport {
        epsilons: Vec::with_capacity(rows.len()),
        sup_errors: Vec::with_capacity(rows.len()),
        dissipation_gaps: Vec::with_capacity(rows.len()),
        windows: setup.windows.clone(),
        limit_dissipation,
        fitted_order: None,
        runtimes: Vec::with_capacity(rows.len()),
    };
    for (&eps, row) in epsilons.iter().zip(rows) {
        match row {
            Ok(r) => {
                report.epsilons.push(eps);
                report.sup_errors.push(r.sup_error);
                report.dissipation_gaps.push(r.gaps);
                report.runtimes.push(r.runtime);
            }
            Err(source) => {
                report.fitted_order = fit_order(&report.epsilons, &report.sup_errors);
                return Err(SweepFailure {
                    partial: Box::new(report),
                    epsilon: eps,
                    source,
                });
            }
        }
    }
    report.fitted_order = fit_order(&report.epsilons, &report.sup_errors);
    Ok(report)
}

/// Distance of a viscous trajectory to the elastic strip over time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripDiagnostics {
    pub times: Vec<f64>,
    pub delta: Vec<f64>,
    /// Smallest `C ≥ 0` with `δ(t) ≤ δ(0) e^{-φ t/ε^γ} + C ε^β` on the samples.
    pub fitted_constant: f64,
}

/// `δ_ε(t) = dist(z_ε(t), [z̃-(t), z̃+(t)])` and the constant of its decay bound.
pub fn strip_diagnostics(
    system: &LimitSystem,
    trajectory: &Trajectory,
    epsilon: f64,
    gamma: f64,
) -> Result<StripDiagnostics> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidScale(epsilon));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidSystem(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let delta: Vec<f64> = trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .map(|(&t, &z)| system.strip_distance(t, z))
        .collect();
    let damping = epsilon.powf(gamma);
    let beta = gamma.min(1.0);
    let phi = system.stored_energy().convexity();
    let d0 = delta.first().copied().unwrap_or(0.0);
    let fitted_constant = trajectory
        .times
        .iter()
        .zip(&delta)
        .map(|(&t, &d)| (d - d0 * (-phi * t / damping).exp()) / epsilon.powf(beta))
        .fold(0.0, f64::max);
    Ok(StripDiagnostics {
        times: trajectory.times.clone(),
        delta,
        fitted_constant,
    })
}
