//! Entropic mirror descent for `min_w D_φ(A w ‖ ρ_y)` over the simplex.

use crate::divergence::PhiGenerator;
use crate::error::{Error, Result};
use crate::measure::{left_inverse_pullback, mass_in_range, DiscreteMeasure, ForwardMap};
use crate::scalar::Scalar;

use super::{check_codomain, SolveResult, SolveStatus, SolverOptions};

/// Trials per iteration before the step is declared unable to descend.
const MAX_BACKTRACKS: usize = 60;

/// Consecutive stalled iterations required for convergence.
const STALL_WINDOW: usize = 5;

/// Weight kept on range points with no data mass under an infinite-slope
/// generator. Zero is below the 1e-14 barrier and keeps the objective finite.
const BARRIER_WEIGHT: f64 = 0.0;

/// `F(w) = D_φ(A w ‖ ρ_y)` for a tabulated map.
///
/// `w` is either a weight vector on the range (`*_range`) or on the domain
/// points of the map (`*_theta`); `A` is the 0/1 matrix sending each domain
/// point to its image. Data mass off the range enters as the constant
/// `ν₀ φ(0)`.
#[derive(Debug, Clone)]
pub struct PhiObjective<T> {
    phi: PhiGenerator,
    /// `ρ_y` mass at each range point.
    q: Vec<T>,
    nu1: T,
    nu0: T,
    image_index: Vec<usize>,
}

impl<T: Scalar> PhiObjective<T> {
    pub fn new(map: &ForwardMap<T>, rho_y: &DiscreteMeasure<T>, phi: PhiGenerator) -> Result<Self> {
        check_codomain(map, rho_y)?;
        let q: Vec<T> = map.range().iter().map(|z| rho_y.weight_at(z)).collect();
        let (nu1, nu0) = mass_in_range(rho_y, map.range());
        let image_index = (0..map.len()).map(|i| map.image_index(i)).collect();
        Ok(PhiObjective {
            phi,
            q,
            nu1,
            nu0,
            image_index,
        })
    }

    pub fn generator(&self) -> PhiGenerator {
        self.phi
    }

    /// `ρ_y` mass at each range point.
    pub fn data_on_range(&self) -> &[T] {
        &self.q
    }

    pub fn nu1(&self) -> T {
        self.nu1
    }

    pub fn value_range(&self, w: &[T]) -> T {
        let phi = self.phi;
        let mut total = self.nu0 * phi.phi_at_zero();
        for (&wi, &qi) in w.iter().zip(&self.q) {
            if qi > T::zero() {
                total = total + qi * phi.eval(wi / qi);
            } else if wi > T::zero() {
                total = total + wi * phi.phi_prime_at_inf();
            }
        }
        total
    }

    /// `∂F/∂w_z`; `+∞` where `ρ_y` has no mass and `φ'(∞) = ∞`.
    pub fn gradient_range(&self, w: &[T]) -> Vec<T> {
        let floor = T::min_positive_value();
        w.iter()
            .zip(&self.q)
            .map(|(&wi, &qi)| {
                if qi > T::zero() {
                    self.phi.derivative((wi / qi).max(floor))
                } else {
                    self.phi.phi_prime_at_inf()
                }
            })
            .collect()
    }

    /// `A w` for domain weights `w`.
    pub fn aggregate(&self, w_theta: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.q.len()];
        for (&wi, &r) in w_theta.iter().zip(&self.image_index) {
            out[r] = out[r] + wi;
        }
        out
    }

    pub fn value_theta(&self, w_theta: &[T]) -> T {
        self.value_range(&self.aggregate(w_theta))
    }

    /// `Aᵀ ∇F(A w)`.
    pub fn gradient_theta(&self, w_theta: &[T]) -> Vec<T> {
        let g = self.gradient_range(&self.aggregate(w_theta));
        self.image_index.iter().map(|&r| g[r]).collect()
    }
}

/// Minimizes the φ-divergence objective by multiplicative-weights mirror
/// descent with backtracking, without using the closed-form optimum.
///
/// Iterates live on the range. Range points without data mass are pinned
/// to zero for `kl` and `chi2`, whose objective is infinite there. A step is
/// accepted when the objective lies below the mirror-descent model
/// `F(w) + <∇F, w' - w> + KL(w'‖w)/η` and does not increase; the step doubles
/// after a first-trial acceptance and halves on every rejection. Hitting `max_iters` is reported
/// through [`SolveStatus::MaxIters`], not as an error.
pub fn solve_phi_iterative<T: Scalar>(
    map: &ForwardMap<T>,
    rho_y: &DiscreteMeasure<T>,
    phi: PhiGenerator,
    opts: &SolverOptions<T>,
) -> Result<SolveResult<T>> {
    opts.validate()?;
    if !phi.is_strictly_convex() {
        return Err(Error::NonSmoothGenerator(phi.name()));
    }
    let objective = PhiObjective::new(map, rho_y, phi)?;
    if objective.nu1.is_nan() || objective.nu1 <= T::zero() {
        return Err(Error::ZeroMassOnRange);
    }

    let pinned = phi.phi_prime_at_inf::<T>().is_infinite();
    let active: Vec<bool> = objective.q.iter().map(|&q| q > T::zero() || !pinned).collect();
    let n_active = active.iter().filter(|&&a| a).count();
    let start = T::one() / T::from_usize(n_active).expect("count fits in scalar");
    let mut w: Vec<T> = active
        .iter()
        .map(|&a| if a { start } else { T::lit(BARRIER_WEIGHT) })
        .collect();

    let mut value = objective.value_range(&w);
    let mut trace = vec![value];
    let mut step = opts.step;
    let max_step = opts.step * T::lit(1e6);
    let mut stalled = 0;
    let mut iterations = 0;
    let mut status = SolveStatus::MaxIters;
    let floor = T::min_positive_value();

    while iterations < opts.max_iters {
        let grad = objective.gradient_range(&w);
        let g_min = grad
            .iter()
            .zip(&active)
            .filter(|(_, &a)| a)
            .map(|(g, _)| *g)
            .fold(T::infinity(), T::min);

        let mut accepted = None;
        for trial in 0..MAX_BACKTRACKS {
            let mut cand: Vec<T> = w
                .iter()
                .zip(&grad)
                .zip(&active)
                .map(|((&wi, &gi), &a)| {
                    if a {
                        (wi * (-(step * (gi - g_min))).exp()).max(floor)
                    } else {
                        wi
                    }
                })
                .collect();
            let total: T = cand.iter().copied().sum();
            for c in &mut cand {
                *c = *c / total;
            }
            let cand_value = objective.value_range(&cand);
            // F(w') <= F(w) + <g, w' - w> + KL(w' || w) / step
            let mut model = value;
            for ((&ci, &wi), (&gi, &a)) in cand.iter().zip(&w).zip(grad.iter().zip(&active)) {
                if a {
                    model = model + gi * (ci - wi) + ci * (ci / wi).ln() / step;
                }
            }
            if cand_value <= value && cand_value <= model {
                accepted = Some((cand, cand_value, trial));
                break;
            }
            step = step * T::lit(0.5);
        }

        let Some((cand, cand_value, trial)) = accepted else {
            // no descent direction left at machine precision
            status = SolveStatus::Converged;
            break;
        };
        iterations += 1;
        let change = value - cand_value;
        w = cand;
        value = cand_value;
        trace.push(value);
        if trial == 0 {
            step = (step * T::lit(2.0)).min(max_step);
        }

        if change < opts.tol {
            stalled += 1;
            if stalled >= STALL_WINDOW {
                status = SolveStatus::Converged;
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let pushforward_star = map.range_measure(&w)?;
    let rho_x_star = left_inverse_pullback(map, &pushforward_star)?;
    Ok(SolveResult {
        rho_x_star,
        pushforward_star,
        objective: value,
        nu1: objective.nu1,
        nu0: objective.nu0,
        iterations,
        objective_trace: trace,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::predicted_phi_min;
    use crate::measure::{conditional_restrict, make_measure, pushforward, Point};

    fn p1(x: f64) -> Point<f64> {
        Point::scalar(x)
    }

    fn line(xs: &[f64], ws: &[f64]) -> DiscreteMeasure<f64> {
        make_measure(xs.iter().map(|&x| p1(x)).collect(), ws.to_vec()).unwrap()
    }

    fn identity_map() -> ForwardMap<f64> {
        ForwardMap::from_fn(vec![p1(0.0), p1(1.0)], |t| t.clone()).unwrap()
    }

    fn canonical_rho_y() -> DiscreteMeasure<f64> {
        line(&[0.0, 1.0, 2.0], &[0.3, 0.3, 0.4])
    }

    #[test]
    fn recovers_conditional_on_canonical_instance() {
        let opts = SolverOptions::default();
        for phi in [PhiGenerator::Kl, PhiGenerator::Chi2, PhiGenerator::Hellinger] {
            let res = solve_phi_iterative(&identity_map(), &canonical_rho_y(), phi, &opts).unwrap();
            assert_eq!(res.status, SolveStatus::Converged, "{phi}");
            let predicted = predicted_phi_min(phi, 0.6).unwrap();
            assert!((res.objective - predicted).abs() < 1e-8, "{phi}: {} vs {predicted}", res.objective);
            let target = line(&[0.0, 1.0], &[0.5, 0.5]);
            assert!(res.pushforward_star.tv_distance(&target) < 1e-6, "{phi}");
        }
    }

    #[test]
    fn chi_square_value_is_two_thirds() {
        let res = solve_phi_iterative(&identity_map(), &canonical_rho_y(), PhiGenerator::Chi2, &SolverOptions::default()).unwrap();
        assert!((res.objective - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn exact_match_converges_to_zero() {
        let map = ForwardMap::from_fn(vec![p1(-1.0), p1(0.0), p1(1.0)], |t| p1(t.coords()[0].powi(2))).unwrap();
        let uniform = line(&[-1.0, 0.0, 1.0], &[1.0, 1.0, 1.0]);
        let rho_y = pushforward(&map, &uniform).unwrap();
        let res = solve_phi_iterative(&map, &rho_y, PhiGenerator::Kl, &SolverOptions::default()).unwrap();
        assert!(res.objective.abs() < 1e-12);
        assert!(res.pushforward_star.tv_distance(&rho_y) < 1e-6);
    }

    #[test]
    fn range_points_without_data_are_emptied() {
        // range {0, 1, 2}; ρ_y has no mass at 2
        let map = ForwardMap::from_fn(vec![p1(0.0), p1(1.0), p1(2.0)], |t| t.clone()).unwrap();
        let rho_y = line(&[0.0, 1.0, 3.0], &[0.2, 0.5, 0.3]);
        let target = conditional_restrict(&rho_y, map.range()).unwrap();
        for phi in [PhiGenerator::Kl, PhiGenerator::Chi2, PhiGenerator::Hellinger] {
            let res = solve_phi_iterative(&map, &rho_y, phi, &SolverOptions::default()).unwrap();
            assert!(res.pushforward_star.tv_distance(&target) < 1e-6, "{phi}");
            assert!(res.pushforward_star.weight_at(&p1(2.0)) < 1e-14 || phi == PhiGenerator::Hellinger);
        }
    }

    #[test]
    fn trace_is_monotone() {
        let map = ForwardMap::from_fn(vec![p1(0.0), p1(1.0), p1(2.0)], |t| t.clone()).unwrap();
        let rho_y = line(&[0.0, 1.0, 2.0, 9.0], &[0.05, 0.15, 0.4, 0.4]);
        let res = solve_phi_iterative(&map, &rho_y, PhiGenerator::Chi2, &SolverOptions::default()).unwrap();
        for pair in res.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn rejects_tv_and_zero_mass() {
        let opts = SolverOptions::default();
        assert_eq!(
            solve_phi_iterative(&identity_map(), &canonical_rho_y(), PhiGenerator::Tv, &opts),
            Err(Error::NonSmoothGenerator("tv"))
        );
        let far = line(&[5.0], &[1.0]);
        assert_eq!(
            solve_phi_iterative(&identity_map(), &far, PhiGenerator::Kl, &opts),
            Err(Error::ZeroMassOnRange)
        );
    }

    #[test]
    fn max_iters_is_a_status_not_an_error() {
        let opts = SolverOptions { max_iters: 1, ..SolverOptions::default() };
        let map = ForwardMap::from_fn(vec![p1(0.0), p1(1.0), p1(2.0)], |t| t.clone()).unwrap();
        let rho_y = line(&[0.0, 1.0, 2.0, 9.0], &[0.05, 0.15, 0.4, 0.4]);
        let res = solve_phi_iterative(&map, &rho_y, PhiGenerator::Chi2, &opts).unwrap();
        assert_eq!(res.status, SolveStatus::MaxIters);
        assert_eq!(res.iterations, 1);
    }
}
