//! One-periodic roughness profiles given as finite Fourier series.
//!
//! A profile is `w(x) = Σ A_j sin(2π n_j x + φ_j)` with integer harmonics, so
//! periodicity is exact and every derivative is available in closed form.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{golden_max, periodic_local_maxima, safeguarded_newton};

/// Highest harmonic index accepted in a profile.
pub const MAX_HARMONIC: u32 = 64;

/// Number of uniform samples used to seed extremum searches.
pub const EXTREMA_SCAN_POINTS: usize = 4096;

/// Tolerance on the location of a refined extremum.
pub const EXTREMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    SingleSinusoid,
    FourierSeries,
}

/// One term `amplitude * sin(2π * harmonic * x + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm {
    pub amplitude: f64,
    pub harmonic: u32,
    #[serde(default)]
    pub phase: f64,
}

/// Which derivative of the profile to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    Slope,
    Curvature,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(order: u8) -> Result<Self> {
        match order {
            0 => Ok(Order::Value),
            1 => Ok(Order::Slope),
            2 => Ok(Order::Curvature),
            n => Err(Error::Domain(format!(
                "derivative order {n} not in {{0, 1, 2}}"
            ))),
        }
    }
}

/// Global extrema of `w'` over one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeExtrema {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub argmax_location: f64,
    pub argmin_location: f64,
}

/// A 1-periodic, non-constant, smooth roughness profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceProfile {
    kind: ProfileKind,
    terms: Vec<FourierTerm>,
    extrema: Option<DerivativeExtrema>,
    sup_norm: f64,
}

impl SurfaceProfile {
    /// `w(x) = amplitude * sin(2π x)`; the slope extrema are `±2π * amplitude`.
    pub fn sinusoid(amplitude: f64) -> Result<Self> {
        Self::build(
            ProfileKind::SingleSinusoid,
            vec![FourierTerm {
                amplitude,
                harmonic: 1,
                phase: 0.0,
            }],
        )
    }

    /// Single sinusoid whose slope ranges over `[-slope, slope]`.
    pub fn sinusoid_with_slope(slope: f64) -> Result<Self> {
        Self::sinusoid(slope / TAU)
    }

    pub fn fourier(terms: Vec<FourierTerm>) -> Result<Self> {
        Self::build(ProfileKind::FourierSeries, terms)
    }

    /// The identically-zero profile.
    ///
    /// It has no slope extrema, so friction coefficients cannot be computed
    /// from it, but the dynamics stay well defined (the wiggle force vanishes).
    pub fn flat() -> Self {
        SurfaceProfile {
            kind: ProfileKind::FourierSeries,
            terms: Vec::new(),
            extrema: None,
            sup_norm: 0.0,
        }
    }

    fn build(kind: ProfileKind, terms: Vec<FourierTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidProfile(
                "at least one term is required".into(),
            ));
        }
        for t in &terms {
            if !(1..=MAX_HARMONIC).contains(&t.harmonic) {
                return Err(Error::InvalidProfile(format!(
                    "harmonic index {} outside 1..={MAX_HARMONIC}",
                    t.harmonic
                )));
            }
            if !t.amplitude.is_finite() || !t.phase.is_finite() {
                return Err(Error::InvalidProfile("non-finite coefficient".into()));
            }
        }
        let mut profile = SurfaceProfile {
            kind,
            terms,
            extrema: None,
            sup_norm: 0.0,
        };
        let extrema = compute_extrema(&profile);
        if !(extrema.omega_plus > 0.0 && extrema.omega_minus < 0.0) {
            return Err(Error::DegenerateProfile {
                omega_plus: extrema.omega_plus,
                omega_minus: extrema.omega_minus,
            });
        }
        profile.extrema = Some(extrema);
        profile.sup_norm = compute_sup_norm(&profile);
        Ok(profile)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn is_flat(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    /// `d^order w / dx^order` at `x`, for any order.
    pub fn derivative(&self, x: f64, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let freq = TAU * f64::from(t.harmonic);
                let arg = freq * x + t.phase;
                let trig = match order % 4 {
                    0 => arg.sin(),
                    1 => arg.cos(),
                    2 => -arg.sin(),
                    _ => -arg.cos(),
                };
                t.amplitude * freq.powi(order as i32) * trig
            })
            .sum()
    }

    pub fn eval(&self, x: f64, order: Order) -> f64 {
        match order {
            Order::Value => self.value(x),
            Order::Slope => self.slope(x),
            Order::Curvature => self.curvature(x),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.derivative(x, 1)
    }

    pub fn curvature(&self, x: f64) -> f64 {
        self.derivative(x, 2)
    }

    /// Evaluates the ε-scaled profile `w_ε(x) = ε w(x/ε)` (order 0) or its
    /// slope `w'(x/ε)` (order 1).
    pub fn scaled(&self, epsilon: f64, x: f64, order: Order) -> Result<f64> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidScale(epsilon));
        }
        let y = x / epsilon;
        match order {
            Order::Value => Ok(epsilon * self.value(y)),
            Order::Slope => Ok(self.slope(y)),
            Order::Curvature => Ok(self.curvature(y) / epsilon),
        }
    }

    pub fn derivative_extrema(&self) -> Result<DerivativeExtrema> {
        self.extrema.ok_or(Error::DegenerateProfile {
            omega_plus: 0.0,
            omega_minus: 0.0,
        })
    }

    /// `max |w|` over one period.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }
}

/// Maximizes the `order`-th derivative over one period by a uniform scan
/// followed by refinement of every discrete local maximum.
fn maximize_derivative(profile: &SurfaceProfile, order: u32, sign: f64) -> (f64, f64) {
    let n = EXTREMA_SCAN_POINTS;
    let h = 1.0 / n as f64;
    let samples: Vec<f64> = (0..n)
        .map(|i| sign * profile.derivative(i as f64 * h, order))
        .collect();
    let target = |x: f64| sign * profile.derivative(x, order);

    let mut best = (0.0, f64::NEG_INFINITY);
    for i in periodic_local_maxima(&samples) {
        let (lo, hi) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        // stationary points of the target are roots of its derivative
        let grad = |x: f64| {
            (
                sign * profile.derivative(x, order + 1),
                sign * profile.derivative(x, order + 2),
            )
        };
        let refined = safeguarded_newton(grad, lo, hi, i as f64 * h, EXTREMA_TOL, 100)
            .map(|r| r.x)
            .filter(|x| target(*x) >= samples[i]);
        let (x, v) = match refined {
            Some(x) => (x, target(x)),
            None => golden_max(target, lo, hi, EXTREMA_TOL),
        };
        if v > best.1 {
            best = (x, v);
        }
    }
    (best.0.rem_euclid(1.0), sign * best.1)
}

fn compute_extrema(profile: &SurfaceProfile) -> DerivativeExtrema {
    let (argmax, omega_plus) = maximize_derivative(profile, 1, 1.0);
    let (argmin, omega_minus) = maximize_derivative(profile, 1, -1.0);
    DerivativeExtrema {
        omega_plus,
        omega_minus,
        argmax_location: argmax,
        argmin_location: argmin,
    }
}

fn compute_sup_norm(profile: &SurfaceProfile) -> f64 {
    let (_, max) = maximize_derivative(profile, 0, 1.0);
    let (_, min) = maximize_derivative(profile, 0, -1.0);
    max.abs().max(min.abs())
}

/// Closed-form evaluation of `w`, `w'` or `w''` with the order given as an integer.
pub fn eval_profile(profile: &SurfaceProfile, x: f64, order: u8) -> Result<f64> {
    Ok(profile.eval(x, Order::try_from(order)?))
}

pub fn scaled_profile(profile: &SurfaceProfile, epsilon: f64, x: f64, order: u8) -> Result<f64> {
    profile.scaled(epsilon, x, Order::try_from(order)?)
}

pub fn derivative_extrema(profile: &SurfaceProfile) -> Result<DerivativeExtrema> {
    profile.derivative_extrema()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_mode() -> SurfaceProfile {
        SurfaceProfile::fourier(vec![
            FourierTerm {
                amplitude: 0.1 / TAU,
                harmonic: 1,
                phase: 0.0,
            },
            FourierTerm {
                amplitude: 0.05 / (2.0 * TAU),
                harmonic: 2,
                phase: 0.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn sinusoid_slope_at_origin() {
        let w = SurfaceProfile::sinusoid(0.1 / TAU).unwrap();
        assert!((eval_profile(&w, 0.0, 1).unwrap() - 0.1).abs() < 1e-16);
        assert!(eval_profile(&w, 0.0, 3).is_err());
    }

    #[test]
    fn two_mode_slope_at_origin_matches_finite_differences() {
        // w'(x) = 0.1 cos(2πx) + 0.05 cos(4πx)
        let w = two_mode();
        assert!((w.slope(0.0) - 0.15).abs() < 1e-15);
        let h = 1e-5;
        let fd = (w.value(h) - w.value(-h)) / (2.0 * h);
        assert!((fd - 0.15).abs() < 1e-9);
    }

    #[test]
    fn scaled_values() {
        let w = SurfaceProfile::sinusoid(0.1 / TAU).unwrap();
        assert_eq!(scaled_profile(&w, 0.01, 0.0, 0).unwrap(), 0.0);
        let v = scaled_profile(&w, 0.5, 0.125, 0).unwrap();
        assert!((v - 0.05 / TAU).abs() < 1e-16);
        assert_eq!(
            scaled_profile(&w, 0.0, 0.1, 0).unwrap_err(),
            Error::InvalidScale(0.0)
        );
        assert!(scaled_profile(&w, -1.0, 0.1, 1).is_err());
    }

    #[test]
    fn sinusoid_extrema() {
        let e = SurfaceProfile::sinusoid_with_slope(0.1)
            .unwrap()
            .derivative_extrema()
            .unwrap();
        assert!((e.omega_plus - 0.1).abs() < 1e-15);
        assert!((e.omega_minus + 0.1).abs() < 1e-15);
        assert!(e.argmax_location.abs() < 1e-12 || (1.0 - e.argmax_location) < 1e-12);
        assert!((e.argmin_location - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_mode_extrema_match_brute_force() {
        let w = two_mode();
        let e = w.derivative_extrema().unwrap();
        let n = 1_000_000;
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..n {
            let s = w.slope(i as f64 / n as f64);
            hi = hi.max(s);
            lo = lo.min(s);
        }
        assert!((e.omega_plus - 0.15).abs() < 1e-14);
        // refinement can only improve on sampling
        assert!(e.omega_minus <= lo + 1e-15);
        assert!((e.omega_minus - lo).abs() < 1e-10);
        assert!((w.slope(e.argmin_location) - e.omega_minus).abs() < 1e-14);
        assert!(hi <= e.omega_plus + 1e-15);
    }

    #[test]
    fn constant_profile_is_degenerate() {
        let err = SurfaceProfile::fourier(vec![FourierTerm {
            amplitude: 0.0,
            harmonic: 3,
            phase: 0.2,
        }])
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateProfile { .. }));
        assert!(matches!(
            SurfaceProfile::flat().derivative_extrema(),
            Err(Error::DegenerateProfile { .. })
        ));
    }

    #[test]
    fn harmonic_cap() {
        let bad = SurfaceProfile::fourier(vec![FourierTerm {
            amplitude: 0.01,
            harmonic: 65,
            phase: 0.0,
        }]);
        assert!(matches!(bad, Err(Error::InvalidProfile(_))));
        assert!(SurfaceProfile::fourier(vec![]).is_err());
    }

    #[test]
    fn sup_norm_of_sinusoid() {
        let w = SurfaceProfile::sinusoid(0.3).unwrap();
        assert!((w.sup_norm() - 0.3).abs() < 1e-15);
    }
}
