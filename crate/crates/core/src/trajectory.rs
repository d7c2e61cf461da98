//! Time-sampled solution paths shared by both solvers.

use serde::Serialize;

use crate::error::{Error, Result};

/// A solution sampled on an increasing time grid.
///
/// `dissipation` is cumulative: `∫ R(ż)` for the limit system and
/// `∫ 2R_ε(ż) = ∫ ε^γ ż²` for the viscous one. `work` is the cumulative
/// `∫ ∂_t E(s, z(s)) ds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub velocities: Vec<f64>,
    pub energies: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub work: Vec<f64>,
}

impl Trajectory {
    pub fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            velocities: Vec::with_capacity(n),
            energies: Vec::with_capacity(n),
            dissipation: Vec::with_capacity(n),
            work: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, t: f64, z: f64, zdot: f64, energy: f64, dissipation: f64, work: f64) {
        self.times.push(t);
        self.states.push(z);
        self.velocities.push(zdot);
        self.energies.push(energy);
        self.dissipation.push(dissipation);
        self.work.push(work);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> f64 {
        *self.states.last().expect("empty trajectory")
    }

    pub fn total_dissipation(&self) -> f64 {
        self.dissipation.last().copied().unwrap_or(0.0)
    }

    /// Index `i` with `times[i] <= t <= times[i + 1]`.
    fn bracket(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&s| s <= t);
        i.saturating_sub(1).min(self.times.len().saturating_sub(2))
    }

    fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let i = self.bracket(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let s = (t - t0) / (t1 - t0);
        values[i] + s * (values[i + 1] - values[i])
    }

    /// Linear interpolation of the state.
    pub fn state_at(&self, t: f64) -> f64 {
        self.interpolate(&self.states, t)
    }

    /// Cumulative dissipation at `t`, linearly interpolated between samples.
    pub fn dissipation_at(&self, t: f64) -> f64 {
        self.interpolate(&self.dissipation, t)
    }

    /// Dissipation over `[t1, t2]`.
    pub fn dissipation_between(&self, t1: f64, t2: f64) -> Result<f64> {
        if self.len() < 2 {
            return Err(Error::InvalidGrid(
                "trajectory has fewer than two samples".into(),
            ));
        }
        let (start, end) = (self.times[0], *self.times.last().unwrap_or(&0.0));
        if !(t1 < t2 && t1 >= start && t2 <= end) {
            return Err(Error::Domain(format!(
                "window [{t1}, {t2}] not inside [{start}, {end}] with t1 < t2"
            )));
        }
        Ok(self.dissipation_at(t2) - self.dissipation_at(t1))
    }

    /// `max_i |z_i - other.z_i|` over a shared grid.
    pub fn sup_distance(&self, other: &Trajectory) -> Result<f64> {
        if self.times.len() != other.times.len()
            || self
                .times
                .iter()
                .zip(&other.times)
                .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
        {
            return Err(Error::InvalidGrid(
                "trajectories are not on the same grid".into(),
            ));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs_state(&self) -> f64 {
        self.states.iter().fold(0.0, |m, z| m.max(z.abs()))
    }
}

/// Uniform grid of `intervals + 1` points on `[0, horizon]`.
pub fn uniform_grid(horizon: f64, intervals: usize) -> Vec<f64> {
    let dt = horizon / intervals as f64;
    let mut grid: Vec<f64> = (0..=intervals).map(|i| i as f64 * dt).collect();
    if let Some(last) = grid.last_mut() {
        *last = horizon;
    }
    grid
}

/// Checks that `grid` starts at 0, ends at `horizon` and strictly increases.
pub fn check_grid(grid: &[f64], horizon: f64) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid(
            "at least two grid points are required".into(),
        ));
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "grid must start at 0, starts at {}",
            grid[0]
        )));
    }
    let last = grid[grid.len() - 1];
    if (last - horizon).abs() > 1e-12 * horizon.abs().max(1.0) {
        return Err(Error::InvalidGrid(format!(
            "grid must end at the horizon {horizon}, ends at {last}"
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}
