//! End-to-end solvers for `argmin_{ρ_x} D(G#ρ_x, ρ_y)`.
//!
//! Every feasible pushforward is a measure on the range, and every measure
//! on the range is a pushforward (pull it back through the left inverse).
//! The solvers therefore work with weights on the range and pull the
//! optimum back to the domain at the end.
//!
//! - [`solve_phi_closed_form`]: the conditional restriction of `ρ_y` to the
//!   range, with objective `ν₁ φ(1/ν₁) + ν₀ φ(0)`.
//! - [`solve_phi_iterative`]: entropic mirror descent on the same objective,
//!   without using the closed form.
//! - [`solve_wasserstein`]: the pushforward of `ρ_y` under the nearest-point
//!   projection onto the range, checked against an exact transport solve.
//! - [`brute_force_oracle`]: exhaustive search over a simplex grid.

mod bayes;
mod mirror;
mod oracle;

use std::fmt;

use crate::divergence::{predicted_phi_min, PhiGenerator};
use crate::error::{Error, Result};
use crate::measure::{conditional_restrict, left_inverse_pullback, mass_in_range, DiscreteMeasure, ForwardMap};
use crate::scalar::Scalar;
use crate::transport::{predicted_wasserstein_min, projection_pushforward, wasserstein_exact, GroundMetric};

pub use bayes::{bayes_variational_posterior, variational_bayes_objective};
pub use mirror::{solve_phi_iterative, PhiObjective};
pub use oracle::{brute_force_oracle, OracleObjective, OracleResult, ORACLE_MAX_RANGE, ORACLE_MAX_STEPS};

/// Agreement required between the Wasserstein solver's objective and an
/// exact transport solve of its own pushforward against the data.
pub const WASSERSTEIN_SELF_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub max_iters: usize,
    /// Absolute objective change below which an iteration counts as stalled.
    pub tol: T,
    /// Initial mirror-descent step; halved on every rejected trial.
    pub step: T,
}

impl<T: Scalar> SolverOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidOptions("max_iters must be at least 1"));
        }
        if self.tol.is_nan() || self.tol <= T::zero() {
            return Err(Error::InvalidOptions("tol must be positive"));
        }
        if !self.step.is_finite() || self.step <= T::zero() {
            return Err(Error::InvalidOptions("step must be positive and finite"));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            max_iters: 10_000,
            tol: T::lit(1e-10),
            step: T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    /// No feasible point with finite objective exists.
    InfeasibleObjective,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::InfeasibleObjective => "infeasible_objective",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub rho_x_star: DiscreteMeasure<T>,
    pub pushforward_star: DiscreteMeasure<T>,
    pub objective: T,
    pub nu1: T,
    pub nu0: T,
    pub iterations: usize,
    /// Objective after every accepted iterate, starting from the initial point.
    pub objective_trace: Vec<T>,
    pub status: SolveStatus,
}

fn check_codomain<T: Scalar>(map: &ForwardMap<T>, rho_y: &DiscreteMeasure<T>) -> Result<()> {
    if map.codomain_dim() != rho_y.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.codomain_dim(),
            got: rho_y.dim(),
        });
    }
    Ok(())
}

/// φ-divergence minimizer in closed form: `G#ρ_x* = ρ_y(· | R)`.
pub fn solve_phi_closed_form<T: Scalar>(
    map: &ForwardMap<T>,
    rho_y: &DiscreteMeasure<T>,
    phi: PhiGenerator,
) -> Result<SolveResult<T>> {
    check_codomain(map, rho_y)?;
    let range = map.range();
    let (nu1, nu0) = mass_in_range(rho_y, range);
    let pushforward_star = conditional_restrict(rho_y, range)?;
    let rho_x_star = left_inverse_pullback(map, &pushforward_star)?;
    let objective = predicted_phi_min(phi, nu1)?;
    Ok(SolveResult {
        rho_x_star,
        pushforward_star,
        objective,
        nu1,
        nu0,
        iterations: 0,
        objective_trace: vec![objective],
        status: SolveStatus::Converged,
    })
}

/// Wasserstein minimizer in closed form: `G#ρ_x* = P_G # ρ_y`.
///
/// The returned objective is the predicted minimum; it is checked against
/// an exact LP solve between the pushforward and `ρ_y` and the call fails
/// with [`Error::Certificate`] if they disagree.
pub fn solve_wasserstein<T: Scalar>(
    map: &ForwardMap<T>,
    rho_y: &DiscreteMeasure<T>,
    metric: &GroundMetric<T>,
) -> Result<SolveResult<T>> {
    check_codomain(map, rho_y)?;
    let range = map.range();
    let (nu1, nu0) = mass_in_range(rho_y, range);
    let pushforward_star = projection_pushforward(rho_y, range, metric)?;
    let rho_x_star = left_inverse_pullback(map, &pushforward_star)?;
    let objective = predicted_wasserstein_min(rho_y, range, metric)?;

    let exact = wasserstein_exact(&pushforward_star, rho_y, metric)?;
    let tol = T::lit(WASSERSTEIN_SELF_CHECK_TOL).max(T::epsilon() * T::lit(1e4));
    if (exact.value - objective).abs() > tol {
        return Err(Error::Certificate(format!(
            "projection cost {objective} but transport solve gives {}",
            exact.value
        )));
    }

    Ok(SolveResult {
        rho_x_star,
        pushforward_star,
        objective,
        nu1,
        nu0,
        iterations: 0,
        objective_trace: vec![objective],
        status: SolveStatus::Converged,
    })
}
