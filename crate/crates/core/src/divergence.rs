//! φ-divergences between discrete measures.
//!
//! `D_φ(P‖Q) = Σ_{q>0} q φ(p/q) + φ'(∞) · P(q = 0)`, with the usual
//! extended-value conventions: `0 · φ(0/0) = 0`, and `∞ · 0 = 0` but
//! `∞ · (positive mass) = +∞`. Infinity is a regular return value, never NaN.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measure::{aligned_weights, DiscreteMeasure};
use crate::scalar::Scalar;

/// Convex generator `φ` with `φ(1) = 0`.
///
/// | name        | φ(t)          | φ(0⁺) | φ'(∞) |
/// |-------------|---------------|-------|-------|
/// | `kl`        | t ln t        | 0     | ∞     |
/// | `chi2`      | (t − 1)²      | 1     | ∞     |
/// | `tv`        | ½ \|t − 1\|   | ½     | ½     |
/// | `hellinger` | (√t − 1)²     | 1     | 1     |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhiGenerator {
    Kl,
    Chi2,
    Tv,
    Hellinger,
}

impl PhiGenerator {
    pub const ALL: [PhiGenerator; 4] = [
        PhiGenerator::Kl,
        PhiGenerator::Chi2,
        PhiGenerator::Tv,
        PhiGenerator::Hellinger,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PhiGenerator::Kl => "kl",
            PhiGenerator::Chi2 => "chi2",
            PhiGenerator::Tv => "tv",
            PhiGenerator::Hellinger => "hellinger",
        }
    }

    /// `φ(t)` for `t ≥ 0`; at `t = 0` this is the right limit.
    pub fn eval<T: Scalar>(self, t: T) -> T {
        if t <= T::zero() {
            return self.phi_at_zero();
        }
        match self {
            PhiGenerator::Kl => t * t.ln(),
            PhiGenerator::Chi2 => (t - T::one()).powi(2),
            PhiGenerator::Tv => T::lit(0.5) * (t - T::one()).abs(),
            PhiGenerator::Hellinger => (t.sqrt() - T::one()).powi(2),
        }
    }

    /// `lim_{t→0⁺} φ(t)`.
    pub fn phi_at_zero<T: Scalar>(self) -> T {
        match self {
            PhiGenerator::Kl => T::zero(),
            PhiGenerator::Chi2 | PhiGenerator::Hellinger => T::one(),
            PhiGenerator::Tv => T::lit(0.5),
        }
    }

    /// `lim_{t→∞} φ(t)/t`, possibly `+∞`.
    pub fn phi_prime_at_inf<T: Scalar>(self) -> T {
        match self {
            PhiGenerator::Kl | PhiGenerator::Chi2 => T::infinity(),
            PhiGenerator::Tv => T::lit(0.5),
            PhiGenerator::Hellinger => T::one(),
        }
    }

    /// `φ'(t)` for `t > 0`. For `tv` this is a subgradient (zero at `t = 1`).
    pub fn derivative<T: Scalar>(self, t: T) -> T {
        match self {
            PhiGenerator::Kl => t.ln() + T::one(),
            PhiGenerator::Chi2 => T::lit(2.0) * (t - T::one()),
            PhiGenerator::Tv => {
                if t > T::one() {
                    T::lit(0.5)
                } else if t < T::one() {
                    -T::lit(0.5)
                } else {
                    T::zero()
                }
            }
            PhiGenerator::Hellinger => T::one() - T::one() / t.sqrt(),
        }
    }

    /// Strict convexity, which is what makes the minimizer's pushforward unique.
    pub fn is_strictly_convex(self) -> bool {
        !matches!(self, PhiGenerator::Tv)
    }
}

impl fmt::Display for PhiGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhiGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kl" => Ok(PhiGenerator::Kl),
            "chi2" => Ok(PhiGenerator::Chi2),
            "tv" => Ok(PhiGenerator::Tv),
            "hellinger" => Ok(PhiGenerator::Hellinger),
            other => Err(Error::UnknownGenerator(other.to_string())),
        }
    }
}

/// `D_φ(p‖q)` for weight vectors already aligned on a common support.
pub fn phi_divergence_weights<T: Scalar>(phi: PhiGenerator, p: &[T], q: &[T]) -> T {
    let mut regular = T::zero();
    let mut singular = T::zero();
    for (&pi, &qi) in p.iter().zip(q) {
        if qi > T::zero() {
            regular = regular + qi * phi.eval(pi / qi);
        } else if pi > T::zero() {
            singular = singular + pi;
        }
    }
    let tail = if singular > T::zero() {
        singular * phi.phi_prime_at_inf()
    } else {
        T::zero()
    };
    (regular + tail).max(T::zero())
}

/// `D_φ(P‖Q)`, matching atoms with the crate-wide point predicate.
pub fn phi_divergence<T: Scalar>(
    phi: PhiGenerator,
    p: &DiscreteMeasure<T>,
    q: &DiscreteMeasure<T>,
) -> Result<T> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let (pw, qw) = aligned_weights(p, q);
    Ok(phi_divergence_weights(phi, &pw, &qw))
}

/// Optimal value `ν₁ φ(1/ν₁) + ν₀ φ(0)` of the φ-divergence problem when
/// `ν₁` of the data mass lies on the range.
pub fn predicted_phi_min<T: Scalar>(phi: PhiGenerator, nu1: T) -> Result<T> {
    if !(nu1 > T::zero() && nu1 <= T::one()) {
        return Err(Error::InvalidMass(nu1.as_f64()));
    }
    let nu0 = T::one() - nu1;
    Ok(nu1 * phi.eval(T::one() / nu1) + nu0 * phi.phi_at_zero())
}
