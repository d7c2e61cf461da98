//! Bristle mediators: admissibility, closed-form friction coefficients, the
//! perceived profile oracle and the exact wiggly force.
//!
//! Every model turns the surface profile into a wiggly energy of the form
//! `V_ε(z) = F(y(z)) - F(0)`, where `y` is the height of the contact point
//! and `F` is the mediator's internal energy as a function of that height.
//! The limit friction is `ρ± = α μ±` with `α = F'(0)` and `μ±` the slope
//! extrema of the profile as seen through the mediator's kinematics.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{DerivativeExtrema, SurfaceProfile, EXTREMA_SCAN_POINTS};
use crate::roots::{golden_max, periodic_local_maxima, safeguarded_newton};

/// Absolute tolerance on the (scaled) contact coordinate for every inversion.
pub const INVERSION_TOL: f64 = 1e-12;
/// Iteration cap for every inversion.
pub const INVERSION_MAX_ITER: usize = 100;

/// Geometric configuration of the mediating element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BristleModel {
    /// Vertical spring of stiffness `k` and rest length `rest_length`,
    /// anchored at height `height` above the mean surface.
    Vertical {
        k: f64,
        #[serde(rename = "L_rest")]
        rest_length: f64,
        #[serde(rename = "h")]
        height: f64,
    },
    /// Spring held at a fixed angle `theta` from the vertical.
    Slanted {
        k: f64,
        #[serde(rename = "L_rest")]
        rest_length: f64,
        #[serde(rename = "h")]
        height: f64,
        theta: f64,
    },
    /// Rigid rod of length `length` hinged on an angular spring of stiffness
    /// `k` with rest angle `theta_rest`.
    Angular {
        k: f64,
        #[serde(rename = "L")]
        length: f64,
        #[serde(rename = "h")]
        height: f64,
        theta_rest: f64,
    },
}

impl BristleModel {
    pub fn vertical(k: f64, rest_length: f64, height: f64) -> Result<Self> {
        let m = BristleModel::Vertical {
            k,
            rest_length,
            height,
        };
        m.check()?;
        Ok(m)
    }

    pub fn slanted(k: f64, rest_length: f64, height: f64, theta: f64) -> Result<Self> {
        let m = BristleModel::Slanted {
            k,
            rest_length,
            height,
            theta,
        };
        m.check()?;
        Ok(m)
    }

    pub fn angular(k: f64, length: f64, height: f64, theta_rest: f64) -> Result<Self> {
        let m = BristleModel::Angular {
            k,
            length,
            height,
            theta_rest,
        };
        m.check()?;
        Ok(m)
    }

    pub fn name(&self) -> &'static str {
        match self {
            BristleModel::Vertical { .. } => "vertical",
            BristleModel::Slanted { .. } => "slanted",
            BristleModel::Angular { .. } => "angular",
        }
    }

    /// Checks the parameter invariants that do not involve the profile.
    pub fn check(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        match *self {
            BristleModel::Vertical {
                k,
                rest_length,
                height,
            } => {
                positive("k", k)?;
                positive("L_rest", rest_length)?;
                positive("h", height)?;
                if rest_length == height {
                    return Err(Error::InvalidModel(
                        "vertical spring requires L_rest != h".into(),
                    ));
                }
            }
            BristleModel::Slanted {
                k,
                rest_length,
                height,
                theta,
            } => {
                positive("k", k)?;
                positive("L_rest", rest_length)?;
                positive("h", height)?;
                if !(theta > 0.0 && theta < FRAC_PI_2) {
                    return Err(Error::InvalidModel(format!(
                        "slanted spring requires 0 < theta < pi/2, got {theta}"
                    )));
                }
            }
            BristleModel::Angular {
                k,
                length,
                height,
                theta_rest,
            } => {
                positive("k", k)?;
                positive("L", length)?;
                positive("h", height)?;
                if length <= height {
                    return Err(Error::InvalidModel(format!(
                        "angular spring requires L > h, got L = {length}, h = {height}"
                    )));
                }
                let theta_lim = (height / length).acos();
                if !(theta_rest < theta_lim && theta_rest > -FRAC_PI_2) {
                    return Err(Error::InvalidModel(format!(
                        "angular spring requires theta_lim = {theta_lim} > theta_rest = {theta_rest} > -pi/2"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rod angle at contact with the flat limit surface (angular model only).
    pub fn theta_lim(&self) -> Option<f64> {
        match *self {
            BristleModel::Angular { length, height, .. } => Some((height / length).acos()),
            _ => None,
        }
    }

    /// The factor `a` in `g(p) = p + a w(p)` relating the contact point to the state.
    pub fn slope_factor(&self) -> f64 {
        match *self {
            BristleModel::Vertical { .. } => 0.0,
            BristleModel::Slanted { theta, .. } => -theta.tan(),
            BristleModel::Angular { length, height, .. } => height / base_leg(length, height),
        }
    }

    /// Energetic factor `α = F'(0)`.
    pub fn alpha(&self) -> f64 {
        match *self {
            BristleModel::Vertical {
                k,
                rest_length,
                height,
            } => k * (rest_length - height),
            BristleModel::Slanted {
                k,
                rest_length,
                height,
                theta,
            } => {
                let c = theta.cos();
                k / c * (rest_length - height / c)
            }
            BristleModel::Angular {
                k,
                length,
                height,
                theta_rest,
            } => {
                let theta_lim = (height / length).acos();
                k * (theta_lim - theta_rest) / base_leg(length, height)
            }
        }
    }

    /// Offset `c` in `z = u + c` between the spring end and the state
    /// coordinate. Metadata only; it never enters the dynamics.
    pub fn gap(&self) -> f64 {
        match *self {
            BristleModel::Vertical { .. } => 0.0,
            BristleModel::Slanted { height, theta, .. } => -height * theta.tan(),
            BristleModel::Angular { length, height, .. } => -base_leg(length, height),
        }
    }

    /// Admissibility of the model against the slope extrema of a profile.
    pub fn validate(&self, extrema: &DerivativeExtrema) -> AdmissibilityReport {
        let mut conditions = Vec::new();
        match *self {
            BristleModel::Vertical {
                rest_length,
                height,
                ..
            } => conditions.push(Condition::new(
                "L_rest != h",
                (rest_length - height).abs(),
                0.0,
            )),
            BristleModel::Slanted { theta, .. } => conditions.push(Condition::new(
                "omega_plus < cot(theta)",
                1.0 / theta.tan(),
                extrema.omega_plus,
            )),
            BristleModel::Angular { .. } => {
                let theta_lim = self.theta_lim().unwrap_or_default();
                conditions.push(Condition::new(
                    "-tan(theta_lim) < omega_minus",
                    extrema.omega_minus,
                    -theta_lim.tan(),
                ));
                conditions.push(Condition::new(
                    "omega_plus < cot(theta_lim)",
                    1.0 / theta_lim.tan(),
                    extrema.omega_plus,
                ));
            }
        }
        AdmissibilityReport { conditions }
    }

    /// Closed-form friction coefficients for this model on `profile`.
    pub fn coefficients(&self, profile: &SurfaceProfile) -> Result<FrictionCoefficients> {
        self.check()?;
        let extrema = profile.derivative_extrema()?;
        self.validate(&extrema).into_result()?;
        let alpha = self.alpha();
        if alpha == 0.0 {
            return Err(Error::ZeroTension);
        }
        let (mu_plus, mu_minus) =
            mu_from_omega(extrema.omega_plus, extrema.omega_minus, self.slope_factor())?;
        let (rho_plus, rho_minus) = friction_from_factors(alpha, mu_plus, mu_minus);
        Ok(FrictionCoefficients {
            alpha,
            mu_plus,
            mu_minus,
            rho_plus,
            rho_minus,
        })
    }

    /// Largest admissible ε for this model on `profile`; every geometric
    /// root stays on the monotone branch below it.
    pub fn validity_threshold(&self, profile: &SurfaceProfile) -> f64 {
        let m = profile.sup_norm();
        if m == 0.0 {
            return f64::INFINITY;
        }
        match *self {
            BristleModel::Vertical { height, .. } => 0.5 * height / m,
            BristleModel::Slanted { height, theta, .. } => {
                let omega_plus = profile
                    .derivative_extrema()
                    .map(|e| e.omega_plus)
                    .unwrap_or(0.0);
                0.5 * height * (1.0 - theta.tan() * omega_plus) / 2.0 / m
            }
            BristleModel::Angular { length, height, .. } => {
                let geometric = 0.5 * height.min(length - height) / m;
                // keep 1 + A'(y) w' > 0 for every reachable contact height
                let omega_minus = profile
                    .derivative_extrema()
                    .map(|e| e.omega_minus)
                    .unwrap_or(0.0);
                let reach = length / (1.0 + omega_minus * omega_minus).sqrt() - height;
                geometric.min(0.5 * reach / m)
            }
        }
    }
}

/// One admissibility inequality `lhs > rhs` with its margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub description: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
}

impl Condition {
    fn new(description: &'static str, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        Condition {
            description,
            lhs,
            rhs,
            margin,
            passed: margin > 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub conditions: Vec<Condition>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn into_result(self) -> Result<()> {
        match self.conditions.iter().find(|c| !c.passed) {
            None => Ok(()),
            Some(c) => Err(Error::Inadmissible(format!(
                "{} fails: {} vs {} (margin {})",
                c.description, c.lhs, c.rhs, c.margin
            ))),
        }
    }
}

pub fn validate(model: &BristleModel, extrema: &DerivativeExtrema) -> AdmissibilityReport {
    model.validate(extrema)
}

/// Limit friction data for one model/profile pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionCoefficients {
    pub alpha: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
}

pub fn coefficients(
    model: &BristleModel,
    profile: &SurfaceProfile,
) -> Result<FrictionCoefficients> {
    model.coefficients(profile)
}

/// Slope extrema of the perceived profile `w ∘ g⁻¹`, `g(p) = p + a w(p)`:
/// `μ± = ω± / (1 + a ω±)`.
pub fn mu_from_omega(omega_plus: f64, omega_minus: f64, a: f64) -> Result<(f64, f64)> {
    let err = Error::InadmissibleSlopeFactor {
        a,
        omega_plus,
        omega_minus,
    };
    if !(omega_plus > 0.0 && omega_minus < 0.0) {
        return Err(err);
    }
    let (dp, dm) = (1.0 + a * omega_plus, 1.0 + a * omega_minus);
    if !(dp > 0.0 && dm > 0.0) {
        return Err(err);
    }
    Ok((omega_plus / dp, omega_minus / dm))
}

/// Combines the energetic factor `α` with the geometric factors `μ±`.
///
/// `ρ±` are the extrema of `α 𝒲'`: for `α > 0` the orientation is kept, for
/// `α < 0` the roles of `μ+` and `μ-` swap, giving `ρ+ = α μ- > 0` and
/// `ρ- = α μ+ < 0`.
pub fn friction_from_factors(alpha: f64, mu_plus: f64, mu_minus: f64) -> (f64, f64) {
    if alpha > 0.0 {
        (alpha * mu_plus, alpha * mu_minus)
    } else {
        (alpha * mu_minus, alpha * mu_plus)
    }
}

fn check_slope_factor(profile: &SurfaceProfile, a: f64) -> Result<()> {
    if profile.is_flat() {
        return Ok(());
    }
    let e = profile.derivative_extrema()?;
    if 1.0 + a * e.omega_plus > 0.0 && 1.0 + a * e.omega_minus > 0.0 {
        Ok(())
    } else {
        Err(Error::InadmissibleSlopeFactor {
            a,
            omega_plus: e.omega_plus,
            omega_minus: e.omega_minus,
        })
    }
}

/// Solves `p + a w(p) = target` for `p`.
///
/// Uses the lift `g(p + 1) = g(p) + 1` so that only the fractional part of
/// the target is inverted; the result is exactly periodic in `target`.
fn invert_lift(profile: &SurfaceProfile, a: f64, target: f64) -> Result<f64> {
    if a == 0.0 || profile.is_flat() {
        return Ok(target);
    }
    let shift = target.floor();
    let frac = target - shift;
    let reach = a.abs() * profile.sup_norm() + 1e-12;
    let f = |p: f64| (p + a * profile.value(p) - frac, 1.0 + a * profile.slope(p));
    let guess = frac - a * profile.value(frac);
    safeguarded_newton(
        f,
        frac - reach,
        frac + reach,
        guess,
        INVERSION_TOL,
        INVERSION_MAX_ITER,
    )
    .map(|r| r.x + shift)
    .ok_or(Error::InversionFailure {
        target,
        iterations: INVERSION_MAX_ITER,
    })
}

/// The profile as experienced through the mediator: `W = w ∘ g⁻¹` with
/// `g(p) = p + a w(p)`, tabulated on a uniform grid over one period.
#[derive(Debug, Clone)]
pub struct PerceivedProfile {
    profile: SurfaceProfile,
    a: f64,
    grid: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PerceivedProfile {
    pub fn new(profile: &SurfaceProfile, a: f64) -> Result<Self> {
        Self::with_resolution(profile, a, EXTREMA_SCAN_POINTS)
    }

    pub fn with_resolution(profile: &SurfaceProfile, a: f64, points: usize) -> Result<Self> {
        check_slope_factor(profile, a)?;
        let mut out = PerceivedProfile {
            profile: profile.clone(),
            a,
            grid: Vec::with_capacity(points),
            values: Vec::with_capacity(points),
            slopes: Vec::with_capacity(points),
        };
        for i in 0..points {
            let z = i as f64 / points as f64;
            let p = out.inverse(z)?;
            out.grid.push(z);
            out.values.push(out.profile.value(p));
            out.slopes.push(out.slope_at_contact(p));
        }
        Ok(out)
    }

    pub fn slope_factor(&self) -> f64 {
        self.a
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn tabulated_values(&self) -> &[f64] {
        &self.values
    }

    pub fn tabulated_slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// `g⁻¹(z)`.
    pub fn inverse(&self, z: f64) -> Result<f64> {
        invert_lift(&self.profile, self.a, z)
    }

    fn slope_at_contact(&self, p: f64) -> f64 {
        let s = self.profile.slope(p);
        s / (1.0 + self.a * s)
    }

    /// `W(z)`.
    pub fn value(&self, z: f64) -> Result<f64> {
        Ok(self.profile.value(self.inverse(z)?))
    }

    /// `W'(z) = w'(p) / g'(p)` with `p = g⁻¹(z)`.
    pub fn slope(&self, z: f64) -> Result<f64> {
        Ok(self.slope_at_contact(self.inverse(z)?))
    }

    /// Extrema of `W'` from the table, refined by golden-section search.
    pub fn slope_extrema(&self) -> Result<(f64, f64)> {
        let h = 1.0 / self.grid.len() as f64;
        let refine = |sign: f64| -> Result<f64> {
            let signed: Vec<f64> = self.slopes.iter().map(|s| sign * s).collect();
            let mut best = f64::NEG_INFINITY;
            let mut failure = None;
            for i in periodic_local_maxima(&signed) {
                let z = self.grid[i];
                let (_, v) = golden_max(
                    |x| match self.slope(x) {
                        Ok(s) => sign * s,
                        Err(e) => {
                            failure = Some(e);
                            f64::NEG_INFINITY
                        }
                    },
                    z - h,
                    z + h,
                    1e-13,
                );
                best = best.max(v.max(signed[i]));
            }
            match failure {
                Some(e) => Err(e),
                None => Ok(sign * best),
            }
        };
        Ok((refine(1.0)?, refine(-1.0)?))
    }
}

/// Independent numerical route to `μ±`: invert `g`, tabulate `W'` and refine
/// its extrema. Agrees with [`mu_from_omega`] on admissible inputs.
pub fn perceived_extrema(profile: &SurfaceProfile, a: f64) -> Result<(f64, f64)> {
    PerceivedProfile::new(profile, a)?.slope_extrema()
}

/// `A(y) = sqrt(L² - (h - y)²) - sqrt(L² - h²)`, in cancellation-free form.
fn rod_reach(length: f64, height: f64, y: f64) -> f64 {
    let s0 = base_leg(length, height);
    let s = (length * length - (height - y) * (height - y)).sqrt();
    y * (2.0 * height - y) / (s + s0)
}

/// The wiggly potential of a model on a profile at a fixed scale ε.
///
/// Construction checks admissibility and the ε validity threshold once, so
/// evaluating the potential inside an integrator is cheap.
#[derive(Debug, Clone)]
pub struct WigglyPotential {
    model: BristleModel,
    profile: SurfaceProfile,
    epsilon: f64,
    a: f64,
}

impl WigglyPotential {
    pub fn new(model: BristleModel, profile: SurfaceProfile, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidScale(epsilon));
        }
        model.check()?;
        if !profile.is_flat() {
            model
                .validate(&profile.derivative_extrema()?)
                .into_result()?;
        }
        let threshold = model.validity_threshold(&profile);
        if epsilon >= threshold {
            return Err(Error::ScaleTooLarge { epsilon, threshold });
        }
        let a = model.slope_factor();
        Ok(WigglyPotential {
            model,
            profile,
            epsilon,
            a,
        })
    }

    pub fn model(&self) -> &BristleModel {
        &self.model
    }

    pub fn profile(&self) -> &SurfaceProfile {
        &self.profile
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `(V_ε(z), V_ε'(z))`.
    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        let eps = self.epsilon;
        let w = &self.profile;
        match self.model {
            BristleModel::Vertical {
                k,
                rest_length,
                height,
            } => {
                let y_scaled = z / eps;
                let y = eps * w.value(y_scaled);
                let stretch0 = rest_length - height;
                let stretch = stretch0 + y;
                let energy = 0.5 * k * (stretch * stretch - stretch0 * stretch0);
                Ok((energy, k * stretch * w.slope(y_scaled)))
            }
            BristleModel::Slanted {
                k,
                rest_length,
                height,
                theta,
            } => {
                let c = theta.cos();
                let p = invert_lift(w, self.a, z / eps)?;
                let y = eps * w.value(p);
                let slope = w.slope(p);
                let perceived_slope = slope / (1.0 + self.a * slope);
                let ext0 = rest_length - height / c;
                let ext = rest_length - (height - y) / c;
                let energy = 0.5 * k * (ext * ext - ext0 * ext0);
                Ok((energy, k / c * ext * perceived_slope))
            }
            BristleModel::Angular {
                k,
                length,
                height,
                theta_rest,
            } => {
                let p = self.invert_rod(z / eps)?;
                let y = eps * w.value(p);
                let slope = w.slope(p);
                let side = (length * length - (height - y) * (height - y)).sqrt();
                let reach_slope = (height - y) / side;
                let dz_dp = 1.0 + reach_slope * slope;
                if !(dz_dp > 0.0) || !side.is_finite() {
                    return Err(Error::Geometry(format!(
                        "contact lost its monotone branch at z = {z}"
                    )));
                }
                let theta = ((height - y) / length).acos();
                let theta_lim = (height / length).acos();
                let energy =
                    0.5 * k * ((theta - theta_rest).powi(2) - (theta_lim - theta_rest).powi(2));
                let force = k * (theta - theta_rest) / side * slope / dz_dp;
                Ok((energy, force))
            }
        }
    }

    pub fn force(&self, z: f64) -> Result<f64> {
        self.eval(z).map(|(_, f)| f)
    }

    pub fn energy(&self, z: f64) -> Result<f64> {
        self.eval(z).map(|(e, _)| e)
    }

    /// Solves `Z = P + A(ε w(P)) / ε` for the scaled contact point `P`.
    fn invert_rod(&self, target: f64) -> Result<f64> {
        let BristleModel::Angular { length, height, .. } = self.model else {
            unreachable!("rod inversion on a non-angular model")
        };
        let eps = self.epsilon;
        let w = &self.profile;
        if w.is_flat() {
            return Ok(target);
        }
        let shift = target.floor();
        let frac = target - shift;
        let m = w.sup_norm();
        let lo = frac - rod_reach(length, height, eps * m) / eps - 1e-12;
        let hi = frac - rod_reach(length, height, -eps * m) / eps + 1e-12;
        let f = |p: f64| {
            let y = eps * w.value(p);
            let side = (length * length - (height - y) * (height - y)).sqrt();
            (
                p + rod_reach(length, height, y) / eps - frac,
                1.0 + (height - y) / side * w.slope(p),
            )
        };
        let guess = frac - self.a * w.value(frac);
        safeguarded_newton(f, lo, hi, guess, INVERSION_TOL, INVERSION_MAX_ITER)
            .map(|r| r.x + shift)
            .ok_or_else(|| {
                Error::Geometry(format!("rod contact inversion failed at z/eps = {target}"))
            })
    }
}

/// Exact derivative `V_ε'(z)` of the mediator energy.
pub fn wiggly_force(
    model: &BristleModel,
    profile: &SurfaceProfile,
    epsilon: f64,
    z: f64,
) -> Result<f64> {
    WigglyPotential::new(*model, profile.clone(), epsilon)?.force(z)
}

/// `sqrt(L² - h²)` without cancellation for `h` close to `L`.
fn base_leg(length: f64, height: f64) -> f64 {
    ((length - height) * (length + height)).sqrt()
}

fn model_height(model: &BristleModel) -> f64 {
    match *model {
        BristleModel::Vertical { height, .. }
        | BristleModel::Slanted { height, .. }
        | BristleModel::Angular { height, .. } => height,
    }
}

/// Coefficients of one model in an angle sweep, with the numerical oracle for `μ±`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub angle: f64,
    pub coefficients: FrictionCoefficients,
    /// `(μ+, μ-)` from [`perceived_extrema`].
    pub oracle: (f64, f64),
}

/// Evaluates `make(angle)` on every angle and computes its coefficients both
/// in closed form and through the perceived profile.
pub fn angle_sweep<F>(make: F, angles: &[f64], profile: &SurfaceProfile) -> Result<Vec<SweepPoint>>
where
    F: Fn(f64) -> Result<BristleModel>,
{
    angles
        .iter()
        .map(|&angle| {
            let model = make(angle)?;
            Ok(SweepPoint {
                angle,
                coefficients: model.coefficients(profile)?,
                oracle: perceived_extrema(profile, model.slope_factor())?,
            })
        })
        .collect()
}

/// Friction with and against the nap when the rest angle flips with the
/// direction of motion.
pub fn nap_coefficients(mu_plus: f64, theta_lim: f64, theta_with: f64) -> Result<(f64, f64)> {
    if !(mu_plus > 0.0) {
        return Err(Error::Domain(format!(
            "mu_plus must be positive, got {mu_plus}"
        )));
    }
    if !(theta_with >= 0.0 && theta_with < theta_lim && theta_lim < FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "need 0 <= theta_with < theta_lim < pi/2, got theta_with = {theta_with}, theta_lim = {theta_lim}"
        )));
    }
    let scale = mu_plus / theta_lim.tan();
    Ok((
        scale * (theta_lim - theta_with),
        scale * (theta_lim + theta_with),
    ))
}

/// Axial tension in the rod while its tip slides on the flat limit surface
/// with friction `rho`; negative values mean compression.
pub fn axial_tension(model: &BristleModel, rho: f64) -> Result<f64> {
    match *model {
        BristleModel::Angular {
            k,
            length,
            theta_rest,
            ..
        } => {
            if !(length > model_height(model) && k > 0.0) {
                return Err(Error::InvalidModel(
                    "axial tension needs k > 0 and L > h".into(),
                ));
            }
            let theta_lim = model.theta_lim().unwrap_or_default();
            Ok(-(k / length) * (theta_lim - theta_rest) / theta_lim.tan() + rho / theta_lim.sin())
        }
        _ => Err(Error::Domain(format!(
            "axial tension is defined for the angular model only, got {}",
            model.name()
        ))),
    }
}
