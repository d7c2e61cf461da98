//! External loading: the driven spring end `q(t)` and the force `ℓ(t)` it exerts.

use std::f64::consts::TAU;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `C¹` external force `ℓ` on `[0, T]`.
pub trait Load: Send + Sync + Debug {
    /// `ℓ(t)`.
    fn value(&self, t: f64) -> f64;
    /// `ℓ̇(t)`.
    fn rate(&self, t: f64) -> f64;
    /// Final time `T`.
    fn horizon(&self) -> f64;
    /// Lipschitz constant of `ℓ` on `[0, T]`.
    fn lipschitz(&self) -> f64;
}

/// Position program `q(t)` of the driven spring end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadingProgram {
    /// `q(t) = offset + rate * t`.
    Ramp {
        #[serde(default)]
        offset: f64,
        rate: f64,
    },
    /// `q(t) = offset + amplitude * sin(2π t / period + phase)`.
    Sinusoid {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Piecewise linear through `knots` (`[t, q]` pairs), with every interior
    /// corner replaced by a quadratic blend of half-width `blend` so that the
    /// program stays `C¹`.
    SmoothedPiecewiseLinear { knots: Vec<[f64; 2]>, blend: f64 },
}

impl LoadingProgram {
    pub fn check(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match self {
            LoadingProgram::Ramp { offset, rate } => {
                if !(finite(*offset) && finite(*rate)) {
                    return Err(Error::InvalidSystem("non-finite ramp parameters".into()));
                }
            }
            LoadingProgram::Sinusoid {
                offset,
                amplitude,
                period,
                phase,
            } => {
                if !(finite(*offset) && finite(*amplitude) && finite(*phase)) || !(*period > 0.0) {
                    return Err(Error::InvalidSystem(
                        "sinusoid loading needs finite parameters and a positive period".into(),
                    ));
                }
            }
            LoadingProgram::SmoothedPiecewiseLinear { knots, blend } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidSystem(
                        "piecewise loading needs at least two knots".into(),
                    ));
                }
                if knots.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidSystem("non-finite knot".into()));
                }
                let min_gap = knots
                    .windows(2)
                    .map(|w| w[1][0] - w[0][0])
                    .fold(f64::INFINITY, f64::min);
                if !(min_gap > 0.0) {
                    return Err(Error::InvalidSystem(
                        "knot times must be strictly increasing".into(),
                    ));
                }
                if knots.len() > 2 && !(*blend > 0.0 && *blend <= 0.5 * min_gap) {
                    return Err(Error::InvalidSystem(format!(
                        "blend half-width must lie in (0, {}] to keep the program C1",
                        0.5 * min_gap
                    )));
                }
            }
        }
        Ok(())
    }

    fn segment_slope(knots: &[[f64; 2]], i: usize) -> f64 {
        (knots[i + 1][1] - knots[i][1]) / (knots[i + 1][0] - knots[i][0])
    }

    /// `(q(t), q̇(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            LoadingProgram::Ramp { offset, rate } => (offset + rate * t, *rate),
            LoadingProgram::Sinusoid {
                offset,
                amplitude,
                period,
                phase,
            } => {
                let omega = TAU / period;
                let arg = omega * t + phase;
                (
                    offset + amplitude * arg.sin(),
                    amplitude * omega * arg.cos(),
                )
            }
            LoadingProgram::SmoothedPiecewiseLinear { knots, blend } => {
                let n = knots.len();
                // interior corner blends
                for i in 1..n - 1 {
                    let tk = knots[i][0];
                    if (t - tk).abs() < *blend {
                        let s1 = Self::segment_slope(knots, i - 1);
                        let s2 = Self::segment_slope(knots, i);
                        let start = tk - blend;
                        let tau = t - start;
                        let q_start = knots[i][1] - blend * s1;
                        let q = q_start + s1 * tau + (s2 - s1) * tau * tau / (4.0 * blend);
                        let dq = s1 + (s2 - s1) * tau / (2.0 * blend);
                        return (q, dq);
                    }
                }
                let seg = knots.windows(2).position(|w| t < w[1][0]).unwrap_or(n - 2);
                let s = Self::segment_slope(knots, seg);
                (knots[seg][1] + s * (t - knots[seg][0]), s)
            }
        }
    }

    /// Bound on `|q̇|` over all times.
    pub fn max_speed(&self) -> f64 {
        match self {
            LoadingProgram::Ramp { rate, .. } => rate.abs(),
            LoadingProgram::Sinusoid {
                amplitude, period, ..
            } => amplitude.abs() * TAU / period,
            LoadingProgram::SmoothedPiecewiseLinear { knots, .. } => (0..knots.len() - 1)
                .map(|i| Self::segment_slope(knots, i).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// The macroscopic spring: `ℓ(t) = k_h (q(t) - L_h_rest)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpringLoad {
    pub k_h: f64,
    pub rest_length: f64,
    pub program: LoadingProgram,
    pub horizon: f64,
}

impl SpringLoad {
    pub fn new(k_h: f64, rest_length: f64, program: LoadingProgram, horizon: f64) -> Result<Self> {
        program.check()?;
        if !(k_h > 0.0 && k_h.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "k_h must be positive, got {k_h}"
            )));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if !rest_length.is_finite() {
            return Err(Error::InvalidSystem("non-finite rest length".into()));
        }
        Ok(SpringLoad {
            k_h,
            rest_length,
            program,
            horizon,
        })
    }
}

impl Load for SpringLoad {
    fn value(&self, t: f64) -> f64 {
        self.k_h * (self.program.eval(t).0 - self.rest_length)
    }

    fn rate(&self, t: f64) -> f64 {
        self.k_h * self.program.eval(t).1
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn lipschitz(&self) -> f64 {
        self.k_h * self.program.max_speed()
    }
}

/// `ℓ ∘ s` for a strictly increasing `C¹` time change `s`.
pub struct Reparametrized<L, S, D> {
    inner: L,
    warp: S,
    warp_rate: D,
    horizon: f64,
    max_warp_rate: f64,
}

impl<L, S, D> Reparametrized<L, S, D>
where
    L: Load,
    S: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    /// `horizon` is the new final time τ with `s(τ) = T`; `max_warp_rate`
    /// bounds `s'` on `[0, horizon]`.
    pub fn new(inner: L, warp: S, warp_rate: D, horizon: f64, max_warp_rate: f64) -> Self {
        Reparametrized {
            inner,
            warp,
            warp_rate,
            horizon,
            max_warp_rate,
        }
    }

    pub fn warp(&self, tau: f64) -> f64 {
        (self.warp)(tau)
    }
}

impl<L, S, D> Debug for Reparametrized<L, S, D>
where
    L: Load,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reparametrized")
            .field("inner", &self.inner)
            .field("horizon", &self.horizon)
            .finish()
    }
}

impl<L, S, D> Load for Reparametrized<L, S, D>
where
    L: Load,
    S: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, t: f64) -> f64 {
        self.inner.value((self.warp)(t))
    }

    fn rate(&self, t: f64) -> f64 {
        self.inner.rate((self.warp)(t)) * (self.warp_rate)(t)
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz() * self.max_warp_rate
    }
}
