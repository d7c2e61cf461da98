//! Convex duality for the limit and viscous dissipation potentials: the
//! elastic domain, Legendre conjugates, the dissipation density
//! `M(v, ξ) = |v| K(ξ) + χ_Ω₀(ξ)`, Fenchel residuals and the De Giorgi
//! energy-dissipation certificate.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::LimitSystem;
use crate::models::{BristleModel, PerceivedProfile};
use crate::profiles::SurfaceProfile;
use crate::quadrature::integrate;
use crate::roots::{bisect, golden_max, periodic_local_maxima};
use crate::trajectory::Trajectory;

/// Absolute tolerance of `K(ξ)`.
pub const K_TOL: f64 = 1e-10;
/// Samples per period used to bracket the roots of `ξ - W'(y)`.
pub const K_SCAN_POINTS: usize = 1024;
/// Relative force tolerance of the contact set and of `χ_Ω₀` checks.
pub const FORCE_REL_TOL: f64 = 1e-8;

/// The elastic domain `Ω₀ = [ρ-, ρ+]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticInterval {
    pub lower: f64,
    pub upper: f64,
}

impl ElasticInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < 0.0 && upper > 0.0 && lower.is_finite() && upper.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "elastic domain needs rho_minus < 0 < rho_plus, got [{lower}, {upper}]"
            )));
        }
        Ok(ElasticInterval { lower, upper })
    }

    pub fn contains(&self, xi: f64) -> bool {
        xi >= self.lower && xi <= self.upper
    }

    pub fn contains_within(&self, xi: f64, tol: f64) -> bool {
        xi >= self.lower - tol && xi <= self.upper + tol
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// `max(ρ+, -ρ-)`.
    pub fn scale(&self) -> f64 {
        self.upper.max(-self.lower)
    }

    /// Default force tolerance `1e-8 ρ+`.
    pub fn force_tolerance(&self) -> f64 {
        FORCE_REL_TOL * self.upper
    }
}

/// A value in `(-∞, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    PlusInfinity,
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(x) => Some(x),
            Extended::PlusInfinity => None,
        }
    }

    /// `f64` view with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::PlusInfinity => write!(f, "+inf"),
        }
    }
}

/// `R*(ξ) = χ_Ω₀(ξ)`.
pub fn legendre_conjugate_limit(xi: f64, interval: ElasticInterval) -> Extended {
    if interval.contains(xi) {
        Extended::Finite(0.0)
    } else {
        Extended::PlusInfinity
    }
}

/// `sup_x (ξ x - f(x))` over the sample points `grid`.
pub fn legendre_conjugate_discrete<F: Fn(f64) -> f64>(f: F, grid: &[f64], xi: f64) -> f64 {
    grid.iter()
        .map(|&x| xi * x - f(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `K(ξ) = ∫₀¹ |ξ - W'(y)| dy` for a 1-periodic `W'`.
///
/// The integrand is split at the roots of `ξ - W'`, bracketed on a uniform
/// scan and refined by bisection; each smooth piece goes to Gauss–Kronrod.
pub fn k_of_xi<F: Fn(f64) -> f64>(xi: f64, w_prime: F) -> f64 {
    k_of_xi_with(xi, &w_prime, K_SCAN_POINTS)
}

fn k_of_xi_with<F: Fn(f64) -> f64>(xi: f64, w_prime: &F, scan: usize) -> f64 {
    let g = |y: f64| xi - w_prime(y);
    let h = 1.0 / scan as f64;
    let mut breaks = vec![0.0];
    let mut prev = g(0.0);
    for i in 1..=scan {
        let y = i as f64 * h;
        let cur = g(y);
        if cur == 0.0 && i < scan {
            breaks.push(y);
        } else if prev * cur < 0.0 {
            let y0 = y - h;
            if let Some(r) = bisect(g, y0, y, 1e-15, 200) {
                breaks.push(r.x);
            }
        }
        prev = cur;
    }
    breaks.push(1.0);
    let pieces = (breaks.len() - 1) as f64;
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| integrate(g, w[0], w[1], K_TOL / pieces).abs())
        .sum()
}

/// `K(ξ)` computed in the contact variable: `∫₀¹ |ξ (1 + a w'(p)) - α w'(p)| dp`.
///
/// With `z = p + a w(p)` this equals `K(ξ)` for `W' = α 𝒲'`, without
/// inverting the lift. Used as an independent check.
pub fn k_of_xi_contact(xi: f64, profile: &SurfaceProfile, a: f64, alpha: f64) -> f64 {
    k_of_xi(0.0, |p| {
        let s = profile.slope(p);
        alpha * s - xi * (1.0 + a * s)
    })
}

type Slope = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `K` for a fixed 1-periodic, zero-average slope `W'` with image `Ω₀`.
#[derive(Clone)]
pub struct KFunction {
    w_prime: Slope,
    interval: ElasticInterval,
    scan_points: usize,
}

impl fmt::Debug for KFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KFunction")
            .field("interval", &self.interval)
            .field("scan_points", &self.scan_points)
            .finish_non_exhaustive()
    }
}

impl KFunction {
    /// Uses `interval` as the image of `w_prime` without checking it.
    pub fn new<F>(w_prime: F, interval: ElasticInterval) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        KFunction {
            w_prime: Arc::new(w_prime),
            interval,
            scan_points: K_SCAN_POINTS,
        }
    }

    /// Locates the image of `w_prime` by a scan refined with golden-section search.
    pub fn from_slope<F>(w_prime: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let n = K_SCAN_POINTS * 4;
        let h = 1.0 / n as f64;
        let table: Vec<f64> = (0..n).map(|i| w_prime(i as f64 * h)).collect();
        let extreme = |sign: f64| {
            let signed: Vec<f64> = table.iter().map(|v| sign * v).collect();
            periodic_local_maxima(&signed)
                .into_iter()
                .map(|i| {
                    let y = i as f64 * h;
                    golden_max(|x| sign * w_prime(x), y - h, y + h, 1e-13)
                        .1
                        .max(signed[i])
                })
                .fold(f64::NEG_INFINITY, f64::max)
                * sign
        };
        let interval = ElasticInterval::new(extreme(-1.0), extreme(1.0))?;
        Ok(KFunction {
            w_prime: Arc::new(w_prime),
            interval,
            scan_points: K_SCAN_POINTS,
        })
    }

    /// `W'(y) = A sin(2π y)`.
    pub fn sinusoid(amplitude: f64) -> Result<Self> {
        let interval = ElasticInterval::new(-amplitude, amplitude)?;
        Ok(Self::new(
            move |y| amplitude * (2.0 * PI * y).sin(),
            interval,
        ))
    }

    /// Zero-average slope with image `[ρ-, ρ+]`: a positive half-sine on
    /// `[0, f]` and a negative one on `[f, 1]`, `f = |ρ-| / (ρ+ + |ρ-|)`.
    pub fn split_sine(rho_plus: f64, rho_minus: f64) -> Result<Self> {
        let interval = ElasticInterval::new(rho_minus, rho_plus)?;
        let f = -rho_minus / (rho_plus - rho_minus);
        Ok(Self::new(
            move |y| {
                let y = y.rem_euclid(1.0);
                if y < f {
                    rho_plus * (PI * y / f).sin()
                } else {
                    rho_minus * (PI * (y - f) / (1.0 - f)).sin()
                }
            },
            interval,
        ))
    }

    /// `W' = α 𝒲'`, the slope of the limit wiggly energy of a model on a profile.
    pub fn from_model(model: &BristleModel, profile: &SurfaceProfile) -> Result<Self> {
        let coeffs = model.coefficients(profile)?;
        let perceived = PerceivedProfile::new(profile, model.slope_factor())?;
        let alpha = coeffs.alpha;
        let interval = ElasticInterval::new(coeffs.rho_minus, coeffs.rho_plus)?;
        // the tabulated inverse is admissible, so slope never fails here
        Ok(Self::new(
            move |z| alpha * perceived.slope(z).unwrap_or(f64::NAN),
            interval,
        ))
    }

    pub fn with_scan_points(mut self, points: usize) -> Self {
        self.scan_points = points.max(2);
        self
    }

    pub fn interval(&self) -> ElasticInterval {
        self.interval
    }

    pub fn slope(&self, y: f64) -> f64 {
        (self.w_prime)(y)
    }

    /// `K(ξ)`.
    pub fn eval(&self, xi: f64) -> f64 {
        k_of_xi_with(xi, &|y| (self.w_prime)(y), self.scan_points)
    }

    /// `K` on a list of forces.
    pub fn table(&self, xis: &[f64]) -> Vec<(f64, f64)> {
        xis.iter().map(|&xi| (xi, self.eval(xi))).collect()
    }
}

/// The two dissipation densities `M(v, ξ) ≥ v ξ`.
#[derive(Debug, Clone)]
pub enum DissipationDensity {
    /// `M_ε(v, ξ) = ε^γ v²/2 + ξ²/(2 ε^γ)`.
    ViscousQuadratic { epsilon: f64, gamma: f64 },
    /// `M(v, ξ) = |v| K(ξ) + χ_Ω₀(ξ)`.
    LimitWithK(KFunction),
}

impl DissipationDensity {
    pub fn viscous(epsilon: f64, gamma: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidScale(epsilon));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(DissipationDensity::ViscousQuadratic { epsilon, gamma })
    }

    /// `M(v, ξ)`.
    pub fn eval(&self, v: f64, xi: f64) -> Extended {
        match self {
            DissipationDensity::ViscousQuadratic { epsilon, gamma } => {
                let d = epsilon.powf(*gamma);
                Extended::Finite(0.5 * d * v * v + 0.5 * xi * xi / d)
            }
            DissipationDensity::LimitWithK(k) => {
                if !k.interval().contains(xi) {
                    return Extended::PlusInfinity;
                }
                Extended::Finite(if v == 0.0 { 0.0 } else { v.abs() * k.eval(xi) })
            }
        }
    }
}

/// `M(v, ξ) - v ξ`.
///
/// The viscous residual is returned in the completed-square form
/// `(ε^{γ/2} v - ε^{-γ/2} ξ)²/2`, which is exactly nonnegative.
pub fn fenchel_residual(density: &DissipationDensity, v: f64, xi: f64) -> Extended {
    match density {
        DissipationDensity::ViscousQuadratic { epsilon, gamma } => {
            let s = epsilon.powf(0.5 * gamma);
            let d = s * v - xi / s;
            Extended::Finite(0.5 * d * d)
        }
        DissipationDensity::LimitWithK(_) => match density.eval(v, xi) {
            Extended::PlusInfinity => Extended::PlusInfinity,
            Extended::Finite(_) if v == 0.0 => Extended::Finite(0.0),
            Extended::Finite(m) => Extended::Finite(m - v * xi),
        },
    }
}

/// Tolerances of the contact-set test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactTolerance {
    pub force: f64,
    pub velocity: f64,
}

impl ContactTolerance {
    pub fn for_interval(interval: ElasticInterval) -> Self {
        ContactTolerance {
            force: interval.force_tolerance(),
            velocity: 1e-12,
        }
    }
}

/// Membership in `𝒞 = ({0} × Ω₀) ∪ ((-∞, 0) × {ρ-}) ∪ ((0, ∞) × {ρ+})`.
pub fn contact_set_member(v: f64, xi: f64, interval: ElasticInterval) -> bool {
    contact_set_member_with(v, xi, interval, ContactTolerance::for_interval(interval))
}

pub fn contact_set_member_with(
    v: f64,
    xi: f64,
    interval: ElasticInterval,
    tol: ContactTolerance,
) -> bool {
    if v.abs() <= tol.velocity {
        interval.contains_within(xi, tol.force)
    } else if v > 0.0 {
        (xi - interval.upper).abs() <= tol.force
    } else {
        (xi - interval.lower).abs() <= tol.force
    }
}

/// Outcome of [`de_giorgi_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    /// `E(T) + ∫ M - E(0) - ∫ ∂_t E`.
    pub residual: f64,
    /// `10 Λ_ℓ max|z| Δt`.
    pub tolerance: f64,
    pub passed: bool,
    /// `E(T) - E(0)`.
    pub energy_change: f64,
    /// `∫ |ż| K(-D_z E)`.
    pub dissipation: f64,
    /// `∫ ∂_t E`.
    pub work: f64,
}

/// Checks the upper energy estimate
/// `E(T, z(T)) + ∫ (|ż| K(ξ) + χ_Ω₀(ξ)) dt ≤ E(0, z(0)) + ∫ ∂_t E dt`,
/// `ξ = -D_z E(t, z)`, along a piecewise linear trajectory.
///
/// `χ_Ω₀` is tested at the nodes; a violation is returned as
/// [`Error::OutsideElasticDomain`].
pub fn de_giorgi_certificate(
    system: &LimitSystem,
    trajectory: &Trajectory,
    k: &KFunction,
) -> Result<Certificate> {
    let n = trajectory.len();
    if n < 2 {
        return Err(Error::InvalidGrid(
            "certificate needs at least two samples".into(),
        ));
    }
    let interval = system.interval();
    let chi_tol = interval.scale() * FORCE_REL_TOL;
    let (ts, zs) = (&trajectory.times, &trajectory.states);
    for (&t, &z) in ts.iter().zip(zs) {
        let xi = system.driving_force(t, z);
        if !interval.contains_within(xi, chi_tol) {
            return Err(Error::OutsideElasticDomain {
                t,
                xi,
                lower: interval.lower,
                upper: interval.upper,
            });
        }
    }

    let mut dissipation = 0.0;
    let mut work = 0.0;
    let mut dt_max: f64 = 0.0;
    for i in 0..n - 1 {
        let (t0, t1, z0, z1) = (ts[i], ts[i + 1], zs[i], zs[i + 1]);
        let (tm, zm) = (0.5 * (t0 + t1), 0.5 * (z0 + z1));
        dt_max = dt_max.max(t1 - t0);
        work += (t1 - t0) / 6.0
            * (system.power(t0, z0) + 4.0 * system.power(tm, zm) + system.power(t1, z1));
        let dz = z1 - z0;
        if dz != 0.0 {
            let kk = |t: f64, z: f64| k.eval(system.driving_force(t, z));
            dissipation += dz.abs() / 6.0 * (kk(t0, z0) + 4.0 * kk(tm, zm) + kk(t1, z1));
        }
    }
    let energy_change = system.energy(ts[n - 1], zs[n - 1]) - system.energy(ts[0], zs[0]);
    let residual = energy_change + dissipation - work;
    let scale = energy_change.abs().max(dissipation).max(work.abs());
    let tolerance = 10.0 * system.load().lipschitz() * trajectory.max_abs_state() * dt_max
        + 64.0 * f64::EPSILON * scale;
    Ok(Certificate {
        residual,
        tolerance,
        passed: residual <= tolerance,
        energy_change,
        dissipation,
        work,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loading::LoadingProgram;
    use crate::trajectory::uniform_grid;

    fn omega() -> ElasticInterval {
        ElasticInterval::new(-0.1, 0.1).unwrap()
    }

    #[test]
    fn interval_rejects_bad_bounds() {
        assert!(ElasticInterval::new(0.0, 1.0).is_err());
        assert!(ElasticInterval::new(-1.0, 0.0).is_err());
        assert!(ElasticInterval::new(-1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn limit_conjugate_is_indicator() {
        let i = omega();
        assert_eq!(legendre_conjugate_limit(0.0, i), Extended::Finite(0.0));
        assert_eq!(legendre_conjugate_limit(0.1, i), Extended::Finite(0.0));
        assert_eq!(legendre_conjugate_limit(-0.1, i), Extended::Finite(0.0));
        assert_eq!(
            legendre_conjugate_limit(0.1 + 1e-9, i),
            Extended::PlusInfinity
        );
    }

    #[test]
    fn k_of_sinusoid() {
        let k = KFunction::sinusoid(0.1).unwrap();
        assert!((k.eval(0.0) - 0.2 / PI).abs() < 1e-12);
        for xi in [0.1, -0.1, 0.2, -1.0, 5.0] {
            assert!((k.eval(xi) - xi.abs()).abs() < 1e-12, "{xi}");
        }
        // closed form: K(ξ) = (2/π)(√(A² - ξ²) + ξ arcsin(ξ/A)) for |ξ| < A
        for xi in [0.03, -0.07, 0.099] {
            let a: f64 = 0.1;
            let exact = 2.0 / PI * ((a * a - xi * xi).sqrt() + xi * (xi / a).asin());
            assert!((k.eval(xi) - exact).abs() < 1e-11, "{xi}");
        }
    }

    #[test]
    fn split_sine_has_zero_mean_and_image() {
        let k = KFunction::split_sine(0.3, -0.1).unwrap();
        let mean = integrate(|y| k.slope(y), 0.0, 0.25, 1e-14)
            + integrate(|y| k.slope(y), 0.25, 1.0, 1e-14);
        assert!(mean.abs() < 1e-12);
        let found = KFunction::from_slope(move |y| k.slope(y))
            .unwrap()
            .interval();
        assert!((found.upper - 0.3).abs() < 1e-10 && (found.lower + 0.1).abs() < 1e-10);
    }

    #[test]
    fn contact_route_matches_perceived_route() {
        let profile = SurfaceProfile::sinusoid_with_slope(0.1).unwrap();
        let model = BristleModel::slanted(1.0, 3.0, 1.0, 0.6).unwrap();
        let k = KFunction::from_model(&model, &profile).unwrap();
        for xi in [-0.05, 0.0, 0.02, 0.08] {
            let contact = k_of_xi_contact(xi, &profile, model.slope_factor(), model.alpha());
            assert!(
                (k.eval(xi) - contact).abs() < 1e-6,
                "{xi}: {} vs {contact}",
                k.eval(xi)
            );
        }
    }

    #[test]
    fn viscous_residual_is_completed_square() {
        let d = DissipationDensity::viscous(0.1, 1.0).unwrap();
        for (v, xi) in [(1.0, 0.3), (-2.0, 0.5), (0.0, -1.0)] {
            let m = d.eval(v, xi).to_f64();
            let r = fenchel_residual(&d, v, xi).to_f64();
            assert!((m - v * xi - r).abs() < 1e-12);
        }
        assert!(fenchel_residual(&d, 3.0, 0.3).to_f64() < 1e-15);
    }

    #[test]
    fn limit_residual_cases() {
        let d = DissipationDensity::LimitWithK(KFunction::sinusoid(0.1).unwrap());
        assert_eq!(fenchel_residual(&d, 0.0, 0.05), Extended::Finite(0.0));
        assert!(fenchel_residual(&d, 1.0, 0.1).to_f64().abs() < 1e-12);
        assert!(fenchel_residual(&d, -1.0, -0.1).to_f64().abs() < 1e-12);
        assert_eq!(fenchel_residual(&d, 1.0, 0.2), Extended::PlusInfinity);
        assert!(fenchel_residual(&d, 1.0, 0.0).to_f64() > 0.06);
    }

    #[test]
    fn contact_set() {
        let i = omega();
        let tau = i.force_tolerance();
        assert!(contact_set_member(0.0, 0.0, i));
        assert!(contact_set_member(1.0, 0.1, i));
        assert!(!contact_set_member(1.0, -0.1, i));
        assert!(contact_set_member(-1.0, -0.1, i));
        assert!(!contact_set_member(-1.0, -0.1 + 2.0 * tau, i));
        assert!(!contact_set_member(0.0, 0.2, i));
    }

    #[test]
    fn discrete_conjugate_of_quadratic() {
        let d = 0.05;
        let grid: Vec<f64> = (0..=4000).map(|i| -40.0 + i as f64 * 0.02).collect();
        for v in [-3.0, 0.0, 1.5] {
            let dual = |xi: f64| xi * xi / (2.0 * d);
            let xi_grid: Vec<f64> = (0..=4000).map(|i| -2.0 + i as f64 * 0.001).collect();
            let back = legendre_conjugate_discrete(dual, &xi_grid, v);
            assert!((back - 0.5 * d * v * v).abs() < 1e-6, "{v}");
        }
        assert!(legendre_conjugate_discrete(|x| x * x, &grid, 2.0) >= 1.0 - 1e-3);
    }

    #[test]
    fn certificate_on_play_operator() {
        let sys = LimitSystem::spring(
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
        .unwrap();
        let k = KFunction::sinusoid(0.1).unwrap();
        let traj = crate::limit::solve_limit(&sys, 0.0, &uniform_grid(2.0, 4096)).unwrap();
        let c = de_giorgi_certificate(&sys, &traj, &k).unwrap();
        assert!(c.passed, "{c:?}");
        assert!((c.dissipation - 0.19).abs() < 1e-5, "{c:?}");

        let mut bad = traj.clone();
        for (t, z) in bad.times.iter().zip(bad.states.iter_mut()) {
            if *t >= 1.0 {
                *z += 0.05;
            }
        }
        let c = de_giorgi_certificate(&sys, &bad, &k).unwrap();
        assert!(!c.passed, "{c:?}");
    }

    #[test]
    fn certificate_flags_confinement() {
        let sys = LimitSystem::spring(
            1.0,
            0.0,
            LoadingProgram::Ramp {
                offset: 0.0,
                rate: 0.0,
            },
            1.0,
            0.1,
            -0.1,
        )
        .unwrap();
        let k = KFunction::sinusoid(0.1).unwrap();
        let mut traj = crate::limit::solve_limit(&sys, 0.0, &uniform_grid(1.0, 16)).unwrap();
        let c = de_giorgi_certificate(&sys, &traj, &k).unwrap();
        assert!(c.passed && c.residual == 0.0);
        traj.states[8] = 0.5;
        assert!(matches!(
            de_giorgi_certificate(&sys, &traj, &k),
            Err(Error::OutsideElasticDomain { t, .. }) if t == 0.5
        ));
    }
}
