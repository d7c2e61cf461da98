//! Dry friction from wiggly energies.
//!
//! A spring-driven slider is coupled to a periodically rough surface through
//! a bristle. As the roughness scale `ε` vanishes, the viscous gradient flow
//! of the wiggly energy converges to a rate-independent play operator whose
//! friction thresholds `ρ±` follow from the bristle geometry. This crate
//! computes those thresholds, integrates both evolutions, and checks the
//! limit passage numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod error;
pub mod io;
pub mod limit;
pub mod loading;
pub mod models;
pub mod ode;
pub mod profiles;
pub mod quadrature;
pub mod roots;
pub mod trajectory;
pub mod variational;
pub mod viscous;

pub use convergence::{
    fit_order, run_sweep, strip_diagnostics, StripDiagnostics, SweepFailure, SweepReport,
    SweepSetup,
};
pub use error::{Error, Result};
pub use limit::{
    dissipation_limit, elastic_strip, solve_limit, ConvexEnergy, CustomEnergy, LimitSystem,
    Quadratic,
};
pub use loading::{Load, LoadingProgram, Reparametrized, SpringLoad};
pub use models::{
    angle_sweep, axial_tension, coefficients, mu_from_omega, nap_coefficients, perceived_extrema,
    validate, wiggly_force, AdmissibilityReport, BristleModel, Condition, FrictionCoefficients,
    PerceivedProfile, SweepPoint, WigglyPotential,
};
pub use profiles::{
    derivative_extrema, eval_profile, scaled_profile, DerivativeExtrema, FourierTerm, Order,
    SurfaceProfile,
};
pub use trajectory::{uniform_grid, Trajectory};
pub use variational::{
    contact_set_member, de_giorgi_certificate, fenchel_residual, k_of_xi, legendre_conjugate_limit,
    Certificate, DissipationDensity, ElasticInterval, Extended, KFunction,
};
pub use viscous::{
    energy_balance_residual, energy_scale, integrate, IntegratorConfig, WigglySystem,
};
