//! Variational form of Bayes' rule, kept as a contrast to the pushforward
//! problem: the posterior minimizes `KL(ρ‖prior) + E_ρ[ℓ]` for a negative
//! log-likelihood `ℓ`, and the minimizer is `prior · e^{-ℓ}` normalized.

use crate::divergence::{phi_divergence_weights, PhiGenerator};
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::scalar::Scalar;

/// Closed-form minimizer of `KL(ρ‖prior) + Σ ℓ(x) ρ(x)`.
///
/// `neg_log_lik[i]` belongs to `prior.atoms()[i]`. Atoms whose posterior
/// mass underflows are dropped.
pub fn bayes_variational_posterior<T: Scalar>(
    prior: &DiscreteMeasure<T>,
    neg_log_lik: &[T],
) -> Result<DiscreteMeasure<T>> {
    if neg_log_lik.len() != prior.len() {
        return Err(Error::LengthMismatch(prior.len(), neg_log_lik.len()));
    }
    if neg_log_lik.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFinite);
    }
    let shift = neg_log_lik.iter().copied().fold(T::infinity(), T::min);
    let weights: Vec<T> = prior
        .weights()
        .zip(neg_log_lik)
        .map(|(w, &l)| w * (shift - l).exp())
        .collect();
    let total: T = weights.iter().copied().sum();
    if !total.is_finite() || total <= T::zero() {
        return Err(Error::DegenerateNormalizer);
    }
    DiscreteMeasure::new(prior.points().cloned().collect(), weights)
}

/// `KL(ρ‖prior) + Σ ℓ_i ρ_i` for `rho` given as weights on the prior's atoms.
pub fn variational_bayes_objective<T: Scalar>(rho: &[T], prior: &DiscreteMeasure<T>, neg_log_lik: &[T]) -> T {
    let prior_w: Vec<T> = prior.weights().collect();
    let kl = phi_divergence_weights(PhiGenerator::Kl, rho, &prior_w);
    kl + rho.iter().zip(neg_log_lik).map(|(r, l)| *r * *l).sum::<T>()
}
