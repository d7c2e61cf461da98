//! The rate-independent limit system and its play-operator solver.
//!
//! With energy `E(t, z) = Φ(z) - ℓ(t) z` and dissipation `R(v) = ρ+ v` for
//! `v ≥ 0`, `ρ- v` for `v ≤ 0`, the state sticks while the driving force
//! `ℓ(t) - Φ'(z)` stays in `[ρ-, ρ+]` and is dragged by the boundary of the
//! elastic strip `[(Φ')⁻¹(ℓ - ρ+), (Φ')⁻¹(ℓ - ρ-)]` otherwise.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::loading::{Load, LoadingProgram, SpringLoad};
use crate::trajectory::{check_grid, Trajectory};
use crate::variational::ElasticInterval;

/// Default number of intervals in the limit solver's uniform grid.
pub const DEFAULT_GRID_INTERVALS: usize = 4096;

/// A uniformly convex `C²` stored energy `Φ`.
pub trait ConvexEnergy: Send + Sync + Debug {
    fn value(&self, z: f64) -> f64;
    /// `Φ'(z)`.
    fn derivative(&self, z: f64) -> f64;
    /// `(Φ')⁻¹(force)`.
    fn derivative_inverse(&self, force: f64) -> f64;
    /// Uniform convexity constant `φ` with `Φ'' ≥ φ`.
    fn convexity(&self) -> f64;
}

/// `Φ(z) = k_h z² / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub k_h: f64,
}

impl ConvexEnergy for Quadratic {
    fn value(&self, z: f64) -> f64 {
        0.5 * self.k_h * z * z
    }

    fn derivative(&self, z: f64) -> f64 {
        self.k_h * z
    }

    fn derivative_inverse(&self, force: f64) -> f64 {
        force / self.k_h
    }

    fn convexity(&self) -> f64 {
        self.k_h
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied uniformly convex energy. The derivative and its inverse
/// are both required so that the strip never needs inner root finding.
#[derive(Clone)]
pub struct CustomEnergy {
    value: ScalarFn,
    derivative: ScalarFn,
    inverse: ScalarFn,
    convexity: f64,
}

impl CustomEnergy {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        convexity: f64,
    ) -> Result<Self> {
        if !(convexity > 0.0) {
            return Err(Error::InvalidSystem(format!(
                "convexity constant must be positive, got {convexity}"
            )));
        }
        let e = CustomEnergy {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            inverse: Arc::new(inverse),
            convexity,
        };
        for force in [-1.0, -0.1, 0.0, 0.3, 2.0] {
            let back = (e.derivative)((e.inverse)(force));
            if (back - force).abs() > 1e-8 * force.abs().max(1.0) {
                return Err(Error::InvalidSystem(format!(
                    "derivative inverse is inconsistent at force {force}: got {back}"
                )));
            }
        }
        Ok(e)
    }
}

impl Debug for CustomEnergy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomEnergy")
            .field("convexity", &self.convexity)
            .finish_non_exhaustive()
    }
}

impl ConvexEnergy for CustomEnergy {
    fn value(&self, z: f64) -> f64 {
        (self.value)(z)
    }

    fn derivative(&self, z: f64) -> f64 {
        (self.derivative)(z)
    }

    fn derivative_inverse(&self, force: f64) -> f64 {
        (self.inverse)(force)
    }

    fn convexity(&self) -> f64 {
        self.convexity
    }
}

/// Macroscopic system with dry friction `ρ±`.
#[derive(Debug, Clone)]
pub struct LimitSystem {
    energy: Arc<dyn ConvexEnergy>,
    load: Arc<dyn Load>,
    interval: ElasticInterval,
}

impl LimitSystem {
    pub fn new(
        energy: Arc<dyn ConvexEnergy>,
        load: Arc<dyn Load>,
        rho_plus: f64,
        rho_minus: f64,
    ) -> Result<Self> {
        if !(energy.convexity() > 0.0) {
            return Err(Error::InvalidSystem(
                "stored energy must be uniformly convex".into(),
            ));
        }
        Ok(LimitSystem {
            energy,
            load,
            interval: ElasticInterval::new(rho_minus, rho_plus)?,
        })
    }

    /// Quadratic spring `Φ(z) = k_h z²/2` driven by `ℓ(t) = k_h (q(t) - L_h_rest)`.
    pub fn spring(
        k_h: f64,
        rest_length: f64,
        program: LoadingProgram,
        horizon: f64,
        rho_plus: f64,
        rho_minus: f64,
    ) -> Result<Self> {
        let load = SpringLoad::new(k_h, rest_length, program, horizon)?;
        Self::new(
            Arc::new(Quadratic { k_h }),
            Arc::new(load),
            rho_plus,
            rho_minus,
        )
    }

    /// Same stored energy and friction, different loading.
    pub fn with_load(&self, load: Arc<dyn Load>) -> Self {
        LimitSystem {
            energy: Arc::clone(&self.energy),
            load,
            interval: self.interval,
        }
    }

    /// Same stored energy and loading, different friction.
    pub fn with_friction(&self, rho_plus: f64, rho_minus: f64) -> Result<Self> {
        Ok(LimitSystem {
            energy: Arc::clone(&self.energy),
            load: Arc::clone(&self.load),
            interval: ElasticInterval::new(rho_minus, rho_plus)?,
        })
    }

    pub fn stored_energy(&self) -> &dyn ConvexEnergy {
        self.energy.as_ref()
    }

    pub fn load(&self) -> &dyn Load {
        self.load.as_ref()
    }

    pub fn interval(&self) -> ElasticInterval {
        self.interval
    }

    pub fn rho_plus(&self) -> f64 {
        self.interval.upper
    }

    pub fn rho_minus(&self) -> f64 {
        self.interval.lower
    }

    pub fn horizon(&self) -> f64 {
        self.load.horizon()
    }

    /// `E(t, z) = Φ(z) - ℓ(t) z`.
    pub fn energy(&self, t: f64, z: f64) -> f64 {
        self.energy.value(z) - self.load.value(t) * z
    }

    /// `-D_z E(t, z) = ℓ(t) - Φ'(z)`.
    pub fn driving_force(&self, t: f64, z: f64) -> f64 {
        self.load.value(t) - self.energy.derivative(z)
    }

    /// `∂_t E(t, z) = -ℓ̇(t) z`.
    pub fn power(&self, t: f64, z: f64) -> f64 {
        -self.load.rate(t) * z
    }

    /// `R(v)`.
    pub fn dissipation_rate(&self, v: f64) -> f64 {
        if v >= 0.0 {
            self.interval.upper * v
        } else {
            self.interval.lower * v
        }
    }

    /// `(z̃-(t), z̃+(t))`.
    pub fn elastic_strip(&self, t: f64) -> (f64, f64) {
        let l = self.load.value(t);
        (
            self.energy.derivative_inverse(l - self.interval.upper),
            self.energy.derivative_inverse(l - self.interval.lower),
        )
    }

    /// Distance from `z` to the elastic strip at time `t`.
    pub fn strip_distance(&self, t: f64, z: f64) -> f64 {
        let (lo, hi) = self.elastic_strip(t);
        (lo - z).max(z - hi).max(0.0)
    }
}

pub fn elastic_strip(system: &LimitSystem, t: f64) -> (f64, f64) {
    system.elastic_strip(t)
}

/// Simpson rule for `∫ ∂_t E` over one step with `z` linear in time.
fn step_work(system: &LimitSystem, t0: f64, t1: f64, z0: f64, z1: f64) -> f64 {
    let tm = 0.5 * (t0 + t1);
    let zm = 0.5 * (z0 + z1);
    (t1 - t0) / 6.0 * (system.power(t0, z0) + 4.0 * system.power(tm, zm) + system.power(t1, z1))
}

/// Solves the limit inclusion on `grid` with the play operator
/// `z_{n+1} = clamp(z_n, z̃-(t_{n+1}), z̃+(t_{n+1}))`.
pub fn solve_limit(system: &LimitSystem, z0: f64, grid: &[f64]) -> Result<Trajectory> {
    check_grid(grid, system.horizon())?;
    let (lo, hi) = system.elastic_strip(grid[0]);
    if !(z0 >= lo && z0 <= hi) {
        return Err(Error::InvalidInitialState {
            z0,
            lower: lo,
            upper: hi,
        });
    }

    let mut traj = Trajectory::with_capacity(grid.len());
    let mut z = z0;
    let mut dissipated = 0.0;
    let mut work = 0.0;
    traj.push(grid[0], z, 0.0, system.energy(grid[0], z), 0.0, 0.0);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (lo, hi) = system.elastic_strip(t1);
        let next = z.max(lo).min(hi);
        let dz = next - z;
        dissipated += system.dissipation_rate(dz);
        work += step_work(system, t0, t1, z, next);
        traj.push(
            t1,
            next,
            dz / (t1 - t0),
            system.energy(t1, next),
            dissipated,
            work,
        );
        z = next;
    }
    if traj.len() > 1 {
        traj.velocities[0] = traj.velocities[1];
    }
    Ok(traj)
}

/// `∫_{t1}^{t2} R(ż) dt` from the state increments.
pub fn dissipation_limit(trajectory: &Trajectory, t1: f64, t2: f64) -> Result<f64> {
    trajectory.dissipation_between(t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::uniform_grid;

    fn ramp_system() -> LimitSystem {
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

    #[test]
    fn strip_geometry() {
        let s = ramp_system();
        let (lo, hi) = s.elastic_strip(0.0);
        assert!((lo + 0.1).abs() < 1e-16 && (hi - 0.1).abs() < 1e-16);
        for t in [0.3, 1.7] {
            let (lo, hi) = s.elastic_strip(t);
            assert!((hi - lo - 0.2).abs() < 1e-15);
            assert!((0.5 * (lo + hi) - t).abs() < 1e-15);
        }
    }

    #[test]
    fn ramp_closed_form() {
        let s = ramp_system();
        let grid = uniform_grid(2.0, DEFAULT_GRID_INTERVALS);
        let traj = solve_limit(&s, 0.0, &grid).unwrap();
        let dt = 2.0 / DEFAULT_GRID_INTERVALS as f64;
        for (t, z) in traj.times.iter().zip(&traj.states) {
            assert!((z - (t - 0.1).max(0.0)).abs() <= dt);
        }
        let d = dissipation_limit(&traj, 0.0, 1.0).unwrap();
        assert!((d - 0.09).abs() < 1e-12, "{d}");
    }

    #[test]
    fn sticking_under_constant_load() {
        let s = LimitSystem::spring(
            2.0,
            0.0,
            LoadingProgram::Ramp {
                offset: 0.3,
                rate: 0.0,
            },
            1.0,
            0.2,
            -0.1,
        )
        .unwrap();
        let traj = solve_limit(&s, 0.27, &uniform_grid(1.0, 100)).unwrap();
        assert!(traj.states.iter().all(|&z| z == 0.27));
        assert_eq!(traj.total_dissipation(), 0.0);
    }

    #[test]
    fn reversed_ramp_uses_negative_branch() {
        let s = LimitSystem::spring(
            1.0,
            0.0,
            LoadingProgram::Ramp {
                offset: 0.0,
                rate: -1.0,
            },
            1.0,
            0.3,
            -0.2,
        )
        .unwrap();
        let traj = solve_limit(&s, 0.0, &uniform_grid(1.0, 1000)).unwrap();
        // slides once the upper envelope -t + 0.2 reaches 0
        let travel = 0.0 - traj.final_state();
        assert!((travel - 0.8).abs() < 1e-12);
        assert!((traj.total_dissipation() - 0.2 * travel).abs() < 1e-12);
    }

    #[test]
    fn rejects_initial_state_outside_strip() {
        let s = ramp_system();
        let err = solve_limit(&s, 0.2, &uniform_grid(2.0, 10)).unwrap_err();
        assert!(matches!(err, Error::InvalidInitialState { .. }));
    }

    #[test]
    fn custom_energy_strip() {
        // Φ(z) = z²/2 + z⁴/4 has Φ' = z + z³; inverse by Cardano
        let inv = |f: f64| {
            let d = (f * f / 4.0 + 1.0 / 27.0).sqrt();
            (f / 2.0 + d).cbrt() + (f / 2.0 - d).cbrt()
        };
        let e = CustomEnergy::new(
            |z| 0.5 * z * z + 0.25 * z.powi(4),
            |z| z + z.powi(3),
            inv,
            1.0,
        )
        .unwrap();
        let load = SpringLoad::new(
            1.0,
            0.0,
            LoadingProgram::Ramp {
                offset: 0.0,
                rate: 1.0,
            },
            2.0,
        )
        .unwrap();
        let s = LimitSystem::new(Arc::new(e), Arc::new(load), 0.1, -0.1).unwrap();
        let traj = solve_limit(&s, 0.0, &uniform_grid(2.0, 400)).unwrap();
        for (t, z) in traj.times.iter().zip(&traj.states) {
            let xi = s.driving_force(*t, *z);
            assert!((-0.1 - 1e-12..=0.1 + 1e-12).contains(&xi));
        }
        assert!(CustomEnergy::new(|z| z, |z| z, |f| 2.0 * f, 1.0).is_err());
    }
}
