//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by the friction laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scale: epsilon must be positive, got {0}")]
    InvalidScale(f64),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("degenerate profile: slope extrema ({omega_plus}, {omega_minus}) must straddle zero")]
    DegenerateProfile { omega_plus: f64, omega_minus: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("model is not admissible for this profile: {0}")]
    Inadmissible(String),

    #[error(
        "slope factor a = {a} violates 1 + a*omega > 0 for omega in [{omega_minus}, {omega_plus}]"
    )]
    InadmissibleSlopeFactor {
        a: f64,
        omega_plus: f64,
        omega_minus: f64,
    },

    #[error("zero tension: alpha = 0, the mediator exerts no force on the surface")]
    ZeroTension,

    #[error("inversion failed at target {target}: no convergence after {iterations} iterations")]
    InversionFailure { target: f64, iterations: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("epsilon = {epsilon} exceeds the geometric validity threshold {threshold}")]
    ScaleTooLarge { epsilon: f64, threshold: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("initial state {z0} outside the elastic strip [{lower}, {upper}]")]
    InvalidInitialState { z0: f64, lower: f64, upper: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidIntegrator(String),

    #[error("step size underflow at t = {t}, z = {z}: h = {h} (stiffness failure)")]
    StiffnessFailure { t: f64, z: f64, h: f64 },

    #[error("driving force {xi} left the elastic domain [{lower}, {upper}] at t = {t}")]
    OutsideElasticDomain {
        t: f64,
        xi: f64,
        lower: f64,
        upper: f64,
    },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
