//! Exhaustive simplex-grid search, used to check the solvers independently.

use rayon::prelude::*;

use crate::divergence::{phi_divergence_weights, PhiGenerator};
use crate::error::{Error, Result};
use crate::measure::{find_point, DiscreteMeasure, ForwardMap};
use crate::scalar::Scalar;
use crate::transport::{wasserstein_exact, GroundMetric};

use super::check_codomain;

pub const ORACLE_MAX_RANGE: usize = 4;
pub const ORACLE_MAX_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleObjective<T> {
    Phi(PhiGenerator),
    Wasserstein(GroundMetric<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub best_pushforward: DiscreteMeasure<T>,
    pub best_value: T,
    /// Grid coordinates of the best point: weights are `counts / grid_steps`.
    pub best_counts: Vec<usize>,
    pub grid_steps: usize,
    pub evaluated: usize,
}

/// Compositions of `total` into `parts` nonnegative parts, lexicographic.
fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if parts == 1 {
        prefix.push(total);
        out(prefix);
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

struct Evaluator<'a, T> {
    map: &'a ForwardMap<T>,
    rho_y: &'a DiscreteMeasure<T>,
    objective: OracleObjective<T>,
    // φ path: data weights on the range points, and the divergence
    // contributed by the off-range atoms, which no candidate can change
    q_range: Vec<T>,
    off_range: T,
}

impl<T: Scalar> Evaluator<'_, T> {
    /// Objective at `weights` (one per range point). The φ-divergence is a
    /// sum over atoms, so only the range part is evaluated per grid point.
    fn value(&self, weights: &[T]) -> Result<T> {
        match self.objective {
            OracleObjective::Phi(phi) => Ok(phi_divergence_weights(phi, weights, &self.q_range) + self.off_range),
            OracleObjective::Wasserstein(metric) => {
                let candidate = DiscreteMeasure::new(self.map.range().to_vec(), weights.to_vec())?;
                Ok(wasserstein_exact(&candidate, self.rho_y, &metric)?.value)
            }
        }
    }
}

type Best<T> = Option<(T, Vec<usize>)>;

fn better<T: Scalar>(a: Best<T>, b: Best<T>) -> Best<T> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let a_wins = a.0 < b.0 || (a.0 == b.0 && a.1 <= b.1);
            Some(if a_wins { a } else { b })
        }
    }
}

/// Searches every weight vector on the range with resolution `1/grid_steps`
/// and returns the one with the smallest objective against `rho_y`.
///
/// Ties (including several `+∞` values) go to the lexicographically
/// smallest count vector, so the result does not depend on thread count.
pub fn brute_force_oracle<T: Scalar>(
    map: &ForwardMap<T>,
    rho_y: &DiscreteMeasure<T>,
    objective: OracleObjective<T>,
    grid_steps: usize,
) -> Result<OracleResult<T>> {
    check_codomain(map, rho_y)?;
    let k = map.range().len();
    if k > ORACLE_MAX_RANGE {
        return Err(Error::RangeTooLarge {
            size: k,
            limit: ORACLE_MAX_RANGE,
        });
    }
    if grid_steps == 0 || grid_steps > ORACLE_MAX_STEPS {
        return Err(Error::GridTooFine {
            steps: grid_steps,
            limit: ORACLE_MAX_STEPS,
        });
    }

    let q_range: Vec<T> = map.range().iter().map(|z| rho_y.weight_at(z)).collect();
    let q_off: Vec<T> = rho_y
        .atoms()
        .iter()
        .filter(|a| find_point(map.range(), &a.point).is_none())
        .map(|a| a.weight)
        .collect();
    let off_range = match objective {
        OracleObjective::Phi(phi) => phi_divergence_weights(phi, &vec![T::zero(); q_off.len()], &q_off),
        OracleObjective::Wasserstein(_) => T::zero(),
    };
    let eval = Evaluator {
        map,
        rho_y,
        objective,
        q_range,
        off_range,
    };
    let steps_t = T::from_usize(grid_steps).expect("grid size fits in scalar");

    let chunks: Vec<Result<(Best<T>, usize)>> = (0..=grid_steps)
        .into_par_iter()
        .map(|first| {
            let mut best: Best<T> = None;
            let mut count = 0;
            let mut failure = None;
            let mut weights = vec![T::zero(); k];
            let mut visit = |counts: &[usize]| {
                if failure.is_some() {
                    return;
                }
                for (w, &c) in weights.iter_mut().zip(counts) {
                    *w = T::from_usize(c).expect("count fits") / steps_t;
                }
                match eval.value(&weights) {
                    Ok(v) => {
                        count += 1;
                        let wins = match &best {
                            None => true,
                            Some((bv, bc)) => v < *bv || (v == *bv && counts < bc.as_slice()),
                        };
                        if wins {
                            best = Some((v, counts.to_vec()));
                        }
                    }
                    Err(e) => failure = Some(e),
                }
            };
            if k == 1 {
                if first == grid_steps {
                    visit(&[grid_steps]);
                }
            } else {
                let mut prefix = vec![first];
                compositions(grid_steps - first, k - 1, &mut prefix, &mut visit);
            }
            match failure {
                Some(e) => Err(e),
                None => Ok((best, count)),
            }
        })
        .collect();

    let mut best: Best<T> = None;
    let mut evaluated = 0;
    for chunk in chunks {
        let (b, n) = chunk?;
        best = better(best, b);
        evaluated += n;
    }
    let (best_value, best_counts) = best.expect("grid is nonempty");
    let weights: Vec<T> = best_counts
        .iter()
        .map(|&c| T::from_usize(c).expect("count fits") / steps_t)
        .collect();
    Ok(OracleResult {
        best_pushforward: DiscreteMeasure::new(map.range().to_vec(), weights)?,
        best_value,
        best_counts,
        grid_steps,
        evaluated,
    })
}
