//! Least-squares problems on spaces of probability measures.
//!
//! Given a tabulated forward map `G: Θ → R^n` and a data measure `ρ_y`, find
//!
//! ```text
//! ρ_x* = argmin_{ρ_x ∈ P(Θ)} D(G#ρ_x, ρ_y)
//! ```
//!
//! When `ρ_y` puts mass outside the range `R = G(Θ)` no `ρ_x` matches it
//! exactly, and the minimizer depends on `D`:
//!
//! - for a φ-divergence, `G#ρ_x*` is `ρ_y` conditioned on `R`, and the
//!   optimal value is `ν₁ φ(1/ν₁) + ν₀ φ(0)` with `ν₁ = ρ_y(R)`;
//! - for `W_p`, `G#ρ_x*` is `ρ_y` pushed through the nearest-point
//!   projection onto `R`.
//!
//! The crate provides both closed forms, an iterative mirror-descent solver
//! that does not know them, an exact transport LP with a duality
//! certificate, and a brute-force grid oracle, so the two statements can be
//! checked against each other numerically.
//!
//! All numerics are generic over [`Scalar`] (`f32`, `f64`); the aliases at
//! the crate root fix `f64`.

pub mod divergence;
pub mod error;
pub mod io;
pub mod measure;
pub mod scalar;
pub mod solver;
pub mod transport;

pub use divergence::{phi_divergence, predicted_phi_min, PhiGenerator};
pub use error::{Error, Result};
pub use measure::{
    conditional_restrict, dirac, left_inverse_pullback, make_measure, mass_in_range, pushforward, range_of,
    Atom, DiscreteMeasure, ForwardMap, Point,
};
pub use scalar::{Scalar, POINT_TOL, WEIGHT_TOL};
pub use solver::{
    bayes_variational_posterior, brute_force_oracle, solve_phi_closed_form, solve_phi_iterative, solve_wasserstein,
    OracleObjective, OracleResult, PhiObjective, SolveResult, SolveStatus, SolverOptions,
};
pub use transport::{
    predicted_wasserstein_min, project_point, projection_pushforward, wasserstein_by_vertex_enumeration,
    wasserstein_exact, Coupling, DualCertificate, GroundMetric, MetricKind, TransportResult,
};

pub type Point64 = measure::Point<f64>;
pub type Measure = measure::DiscreteMeasure<f64>;
pub type Map = measure::ForwardMap<f64>;
pub type Metric = transport::GroundMetric<f64>;
pub type Plan = transport::Coupling<f64>;
pub type Solution = solver::SolveResult<f64>;
pub type Options = solver::SolverOptions<f64>;

pub type Measure32 = measure::DiscreteMeasure<f32>;
pub type Map32 = measure::ForwardMap<f32>;
