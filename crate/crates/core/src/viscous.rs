//! The viscous ε-family `ε^γ ż = ℓ(t) - Φ'(z) - V_ε'(z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::LimitSystem;
use crate::models::{BristleModel, WigglyPotential};
use crate::ode::{dopri5, AcceptedStep, StepControl};
use crate::profiles::SurfaceProfile;
use crate::trajectory::{check_grid, uniform_grid, Trajectory};

/// Limit spring system perturbed by a wiggly mediator and viscous damping `ε^γ`.
#[derive(Debug, Clone)]
pub struct WigglySystem {
    base: LimitSystem,
    potential: WigglyPotential,
    gamma: f64,
    damping: f64,
}

impl WigglySystem {
    pub fn new(
        base: LimitSystem,
        model: BristleModel,
        profile: SurfaceProfile,
        epsilon: f64,
        gamma: f64,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let potential = WigglyPotential::new(model, profile, epsilon)?;
        Ok(WigglySystem {
            base,
            potential,
            gamma,
            damping: epsilon.powf(gamma),
        })
    }

    pub fn base(&self) -> &LimitSystem {
        &self.base
    }

    pub fn potential(&self) -> &WigglyPotential {
        &self.potential
    }

    pub fn epsilon(&self) -> f64 {
        self.potential.epsilon()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `β = min(1, γ)`.
    pub fn beta(&self) -> f64 {
        self.gamma.min(1.0)
    }

    /// Viscosity `ε^γ`.
    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// `-D_z E_ε(t, z) = ℓ(t) - Φ'(z) - V_ε'(z)`.
    pub fn driving_force(&self, t: f64, z: f64) -> Result<f64> {
        Ok(self.base.driving_force(t, z) - self.potential.force(z)?)
    }

    /// `E_ε(t, z) = Φ(z) - ℓ(t) z + V_ε(z)`.
    pub fn energy(&self, t: f64, z: f64) -> Result<f64> {
        Ok(self.base.energy(t, z) + self.potential.energy(z)?)
    }

    /// `(E_ε, ż)` from a single potential evaluation.
    fn energy_and_velocity(&self, t: f64, z: f64) -> Result<(f64, f64)> {
        let (v, dv) = self.potential.eval(z)?;
        let xi = self.base.driving_force(t, z) - dv;
        Ok((self.base.energy(t, z) + v, xi / self.damping))
    }

    /// `ż = (ℓ(t) - Φ'(z) - V_ε'(z)) / ε^γ`.
    pub fn rhs(&self, t: f64, z: f64) -> Result<f64> {
        Ok(self.driving_force(t, z)? / self.damping)
    }

    /// `2 R_ε(v) = ε^γ v²`.
    pub fn dissipation_rate(&self, v: f64) -> f64 {
        self.damping * v * v
    }

    /// Rate of change of the distance to the elastic strip along the flow;
    /// zero inside the strip.
    pub fn strip_distance_rate(&self, t: f64, z: f64, zdot: f64) -> f64 {
        let (lo, hi) = self.base.elastic_strip(t);
        let phi = self.base.stored_energy();
        let ldot = self.base.load().rate(t);
        // d/dt (Φ')⁻¹(ℓ - ρ) = ℓ̇ / Φ''; Φ'' taken by differencing Φ' at the envelope
        let envelope_rate = |zt: f64| {
            let h = 1e-7 * zt.abs().max(1.0);
            let curvature = (phi.derivative(zt + h) - phi.derivative(zt - h)) / (2.0 * h);
            ldot / curvature
        };
        if z > hi {
            zdot - envelope_rate(hi)
        } else if z < lo {
            envelope_rate(lo) - zdot
        } else {
            0.0
        }
    }
}

pub fn rhs(system: &WigglySystem, t: f64, z: f64) -> Result<f64> {
    system.rhs(t, z)
}

/// Tolerances and output settings for the viscous integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    #[serde(rename = "rel")]
    pub rtol: f64,
    #[serde(rename = "abs")]
    pub atol: f64,
    /// Optional cap on the step; the boundary-layer cap `ε^γ/2` always applies.
    pub max_step: Option<f64>,
    /// Sample on the uniform output grid (true) or record accepted steps.
    pub dense_output: bool,
    /// Number of intervals of the uniform output grid.
    pub grid_intervals: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-9,
            atol: 1e-11,
            max_step: None,
            dense_output: true,
            grid_intervals: crate::limit::DEFAULT_GRID_INTERVALS,
        }
    }
}

impl IntegratorConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidIntegrator(
                "tolerances must be positive".into(),
            ));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::InvalidIntegrator("max_step must be positive".into()));
            }
        }
        if self.dense_output && self.grid_intervals == 0 {
            return Err(Error::InvalidIntegrator(
                "grid_intervals must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Effective step cap for a given viscosity.
    pub fn step_cap(&self, damping: f64) -> f64 {
        let layer = 0.5 * damping;
        self.max_step.map_or(layer, |h| h.min(layer))
    }
}

/// Per-step Simpson quadrature of the dissipation `ε^γ ż²` and of the power
/// `∂_t E_ε = -ℓ̇ z` over `[step.t0, t]`. Returns the two integrals together
/// with the state, velocity and energy at `t`.
fn partial_step(
    system: &WigglySystem,
    step: &AcceptedStep,
    t: f64,
) -> Result<(f64, f64, f64, f64, f64)> {
    let t0 = step.t0;
    let (zt, et, vt) = if t == step.t1 {
        let (e, v) = system.energy_and_velocity(t, step.y1)?;
        (step.y1, e, v)
    } else {
        let z = step.dense(t);
        let (e, v) = system.energy_and_velocity(t, z)?;
        (z, e, v)
    };
    let tm = 0.5 * (t0 + t);
    let zm = step.dense(tm);
    let vm = system.rhs(tm, zm)?;
    let h = t - t0;
    let base = system.base();
    let diss = h / 6.0
        * (system.dissipation_rate(step.f0)
            + 4.0 * system.dissipation_rate(vm)
            + system.dissipation_rate(vt));
    let work = h / 6.0 * (base.power(t0, step.y0) + 4.0 * base.power(tm, zm) + base.power(t, zt));
    Ok((diss, work, zt, vt, et))
}

/// Integrates the viscous dynamics on `[0, horizon]` with the adaptive
/// Dormand–Prince pair.
pub fn integrate(
    system: &WigglySystem,
    z0: f64,
    horizon: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.check()?;
    if config.dense_output {
        let grid = uniform_grid(horizon, config.grid_intervals);
        integrate_on(system, z0, &grid, config)
    } else {
        integrate_steps(system, z0, horizon, config)
    }
}

/// Integrates and samples the dense output on `grid`.
pub fn integrate_on(
    system: &WigglySystem,
    z0: f64,
    grid: &[f64],
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.check()?;
    if !z0.is_finite() {
        return Err(Error::InvalidSystem(format!(
            "initial state must be finite, got {z0}"
        )));
    }
    let horizon = *grid.last().unwrap_or(&0.0);
    check_grid(grid, horizon)?;
    let control = StepControl {
        rtol: config.rtol,
        atol: config.atol,
        max_step: config.step_cap(system.damping()),
    };

    let mut traj = Trajectory::with_capacity(grid.len());
    let (e0, v0) = system.energy_and_velocity(0.0, z0)?;
    traj.push(0.0, z0, v0, e0, 0.0, 0.0);
    let mut next = 1;
    let (mut diss, mut work) = (0.0, 0.0);
    dopri5(
        |t, z| system.rhs(t, z),
        0.0,
        z0,
        horizon,
        control,
        |step| {
            while next < grid.len() && grid[next] <= step.t1 {
                let t = grid[next].max(step.t0);
                let (d, w, z, v, e) = partial_step(system, step, t)?;
                traj.push(grid[next], z, v, e, diss + d, work + w);
                next += 1;
            }
            let (d, w, ..) = partial_step(system, step, step.t1)?;
            diss += d;
            work += w;
            Ok(())
        },
    )?;
    Ok(traj)
}

fn integrate_steps(
    system: &WigglySystem,
    z0: f64,
    horizon: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let control = StepControl {
        rtol: config.rtol,
        atol: config.atol,
        max_step: config.step_cap(system.damping()),
    };
    let mut traj = Trajectory::with_capacity(1024);
    let (e0, v0) = system.energy_and_velocity(0.0, z0)?;
    traj.push(0.0, z0, v0, e0, 0.0, 0.0);
    let (mut diss, mut work) = (0.0, 0.0);
    dopri5(
        |t, z| system.rhs(t, z),
        0.0,
        z0,
        horizon,
        control,
        |step| {
            let (d, w, z, v, e) = partial_step(system, step, step.t1)?;
            diss += d;
            work += w;
            traj.push(step.t1, z, v, e, diss, work);
            Ok(())
        },
    )?;
    Ok(traj)
}

/// Magnitude of the energy terms of a run, used to normalize residuals.
pub fn energy_scale(trajectory: &Trajectory) -> f64 {
    let n = trajectory.len() - 1;
    [
        trajectory.energies[0].abs(),
        trajectory.energies[n].abs(),
        trajectory.dissipation[n].abs(),
        trajectory.work[n].abs(),
    ]
    .into_iter()
    .fold(f64::MIN_POSITIVE, f64::max)
}

/// `|E_ε(T) + ∫ε^γ ż² - E_ε(0) - ∫∂_t E_ε|`.
pub fn energy_balance_residual(trajectory: &Trajectory) -> f64 {
    let n = trajectory.len() - 1;
    (trajectory.energies[n] + trajectory.dissipation[n]
        - trajectory.energies[0]
        - trajectory.work[n])
        .abs()
}
