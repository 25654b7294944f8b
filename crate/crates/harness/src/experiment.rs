//! Runs every solver on a scenario and records how each result compares
//! with its closed-form prediction.

use std::time::Instant;

use pushmatch::io::Real;
use pushmatch::solver::{variational_bayes_objective, ORACLE_MAX_RANGE};
use pushmatch::{
    bayes_variational_posterior, brute_force_oracle, conditional_restrict, mass_in_range, phi_divergence,
    predicted_phi_min, predicted_wasserstein_min, projection_pushforward, solve_phi_closed_form, solve_phi_iterative,
    solve_wasserstein, wasserstein_by_vertex_enumeration, wasserstein_exact, DiscreteMeasure, GroundMetric,
    MetricKind, OracleObjective, Options, PhiGenerator, PhiObjective, Point,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CheckConfig, OracleConfig, Tolerances};
use crate::report::{MethodEntry, ScenarioRecord};
use crate::scenario::{generate_scenario, Scenario, ScenarioKind, ScenarioParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub solver: Options,
    /// Wasserstein exponents; the scenario's own exponent when empty.
    pub exponents: Vec<f64>,
    pub oracle: OracleConfig,
    /// Random range-supported candidates per exponent for the lower-bound
    /// check; 0 skips it.
    pub lower_bound_trials: usize,
    pub tolerances: Tolerances,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            solver: Options::default(),
            exponents: vec![1.0, 2.0],
            oracle: OracleConfig::default(),
            lower_bound_trials: 0,
            tolerances: Tolerances::default(),
        }
    }
}

fn timed(f: impl FnOnce() -> MethodEntry) -> MethodEntry {
    let start = Instant::now();
    let mut entry = f();
    entry.wall_time_ms = Real(start.elapsed().as_secs_f64() * 1e3);
    entry
}

fn metric_target(metric: &GroundMetric<f64>) -> String {
    format!("{}-p{}", metric.kind().name(), metric.p())
}

fn closed_form_entry(s: &Scenario, phi: PhiGenerator, nu1: f64, tol: &Tolerances) -> MethodEntry {
    let method = "phi_closed_form";
    match solve_phi_closed_form(&s.map, &s.rho_y, phi) {
        Err(e) if nu1 <= 0.0 => MethodEntry::new(method, phi.name())
            .status("infeasible")
            .expect("infeasible")
            .note(e.to_string()),
        Err(e) => MethodEntry::failed(method, phi.name(), e),
        Ok(res) => {
            let achieved = match phi_divergence(phi, &res.pushforward_star, &s.rho_y) {
                Ok(v) => v,
                Err(e) => return MethodEntry::failed(method, phi.name(), e),
            };
            let entry = MethodEntry::new(method, phi.name())
                .status(res.status.name())
                .values(achieved, res.objective)
                .symmetric_gap(tol.phi_value);
            if phi.is_strictly_convex() {
                let conditional = conditional_restrict(&s.rho_y, s.map.range()).expect("nu1 > 0");
                entry.mismatch(res.pushforward_star.tv_distance(&conditional), Some(tol.conditional_tv))
            } else {
                entry.note("minimizer not unique; identity check n/a")
            }
        }
    }
}

fn iterative_entry(s: &Scenario, phi: PhiGenerator, nu1: f64, opts: &ExperimentOptions) -> MethodEntry {
    let method = "phi_iterative";
    if !phi.is_strictly_convex() {
        return MethodEntry::skipped(method, phi.name(), "non-smooth generator");
    }
    let tol = &opts.tolerances;
    match solve_phi_iterative(&s.map, &s.rho_y, phi, &opts.solver) {
        Err(e) if nu1 <= 0.0 => MethodEntry::new(method, phi.name())
            .status("infeasible")
            .expect("infeasible")
            .note(e.to_string()),
        Err(e) => MethodEntry::failed(method, phi.name(), e),
        Ok(res) => {
            let predicted = predicted_phi_min(phi, nu1).expect("nu1 in (0, 1]");
            let conditional = conditional_restrict(&s.rho_y, s.map.range()).expect("nu1 > 0");
            let mut entry = MethodEntry::new(method, phi.name())
                .status(res.status.name())
                .values(res.objective, predicted)
                .symmetric_gap(tol.phi_value)
                .mismatch(res.pushforward_star.tv_distance(&conditional), Some(tol.conditional_tv));
            entry.iterations = Some(res.iterations);
            entry
        }
    }
}

fn oracle_phi_entry(s: &Scenario, phi: PhiGenerator, nu1: f64, opts: &ExperimentOptions) -> MethodEntry {
    let method = "oracle_phi";
    if nu1 <= 0.0 {
        return MethodEntry::skipped(method, phi.name(), "no data mass on the range");
    }
    let tol = &opts.tolerances;
    let steps = opts.oracle.phi_grid_steps;
    match brute_force_oracle(&s.map, &s.rho_y, OracleObjective::Phi(phi), steps) {
        Err(e) => MethodEntry::failed(method, phi.name(), e),
        Ok(res) => {
            let predicted = predicted_phi_min(phi, nu1).expect("nu1 in (0, 1]");
            // The grid can never beat the optimum. Only the piecewise-linear
            // generator is guaranteed to reach it within grid resolution.
            let max = (!phi.is_strictly_convex()).then_some(tol.oracle_phi_value);
            MethodEntry::new(method, phi.name())
                .status("converged")
                .values(res.best_value, predicted)
                .gap_bounds(Some(-tol.phi_value), max)
                .note(format!("grid_steps={steps} evaluated={}", res.evaluated))
        }
    }
}

fn wasserstein_entry(s: &Scenario, metric: &GroundMetric<f64>, tol: &Tolerances) -> MethodEntry {
    let method = "wasserstein";
    let target = metric_target(metric);
    let res = match solve_wasserstein(&s.map, &s.rho_y, metric) {
        Ok(r) => r,
        Err(e) => return MethodEntry::failed(method, target, e),
    };
    let exact = match wasserstein_exact(&res.pushforward_star, &s.rho_y, metric) {
        Ok(r) => r,
        Err(e) => return MethodEntry::failed(method, target, e),
    };
    let projection = match projection_pushforward(&s.rho_y, s.map.range(), metric) {
        Ok(p) => p,
        Err(e) => return MethodEntry::failed(method, target, e),
    };
    let predicted = match predicted_wasserstein_min(&s.rho_y, s.map.range(), metric) {
        Ok(p) => p,
        Err(e) => return MethodEntry::failed(method, target, e),
    };
    MethodEntry::new(method, target)
        .status(res.status.name())
        .values(exact.value, predicted)
        .symmetric_gap(tol.wasserstein_value)
        .mismatch(res.pushforward_star.tv_distance(&projection), Some(tol.projection_tv))
        .note(format!("duality_gap={:e}", exact.certificate.gap))
}

fn oracle_wasserstein_entry(s: &Scenario, metric: &GroundMetric<f64>, opts: &ExperimentOptions) -> MethodEntry {
    let method = "oracle_wasserstein";
    let target = metric_target(metric);
    let steps = opts.oracle.wasserstein_grid_steps;
    let predicted = match predicted_wasserstein_min(&s.rho_y, s.map.range(), metric) {
        Ok(p) => p,
        Err(e) => return MethodEntry::failed(method, target, e),
    };
    match brute_force_oracle(&s.map, &s.rho_y, OracleObjective::Wasserstein(*metric), steps) {
        Err(e) => MethodEntry::failed(method, target, e),
        Ok(res) => MethodEntry::new(method, target)
            .status("converged")
            .values(res.best_value, predicted)
            .gap_bounds(Some(-opts.tolerances.lower_bound_slack), None)
            .note(format!("grid_steps={steps} evaluated={}", res.evaluated)),
    }
}

/// Random probability measure on a random nonempty subset of `range`.
fn random_range_measure(rng: &mut ChaCha8Rng, range: &[Point<f64>]) -> DiscreteMeasure<f64> {
    loop {
        let weights: Vec<f64> = range
            .iter()
            .map(|_| if rng.gen_bool(0.7) { rng.gen_range(0.0..1.0) } else { 0.0 })
            .collect();
        if weights.iter().any(|&w| w > 1e-3) {
            return DiscreteMeasure::new(range.to_vec(), weights).expect("valid candidate");
        }
    }
}

fn lower_bound_entry(s: &Scenario, metric: &GroundMetric<f64>, trials: usize, tol: &Tolerances) -> MethodEntry {
    let method = "lower_bound";
    let target = metric_target(metric);
    let predicted = match predicted_wasserstein_min(&s.rho_y, s.map.range(), metric) {
        Ok(p) => p,
        Err(e) => return MethodEntry::failed(method, target, e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ metric.p().to_bits());
    let mut best = f64::INFINITY;
    for _ in 0..trials {
        let candidate = random_range_measure(&mut rng, s.map.range());
        match wasserstein_exact(&candidate, &s.rho_y, metric) {
            Ok(r) => best = best.min(r.value),
            Err(e) => return MethodEntry::failed(method, target, e),
        }
    }
    MethodEntry::new(method, target)
        .status("converged")
        .values(best, predicted)
        .gap_bounds(Some(-tol.lower_bound_slack), None)
        .note(format!("trials={trials}"))
}

/// Runs the closed-form and iterative φ solvers for every generator of the
/// scenario, the Wasserstein solver for every exponent, and the grid oracle
/// when the range is small. Solver errors become failed entries.
pub fn run_experiment(s: &Scenario, opts: &ExperimentOptions) -> ScenarioRecord {
    let range_size = s.map.range().len();
    let (nu1, nu0) = mass_in_range(&s.rho_y, s.map.range());
    let tol = &opts.tolerances;
    let oracle_fits = range_size <= opts.oracle.max_range.min(ORACLE_MAX_RANGE);
    let mut entries = Vec::new();

    for &phi in &s.generators {
        entries.push(timed(|| closed_form_entry(s, phi, nu1, tol)));
        entries.push(timed(|| iterative_entry(s, phi, nu1, opts)));
        if oracle_fits && opts.oracle.phi_grid_steps > 0 {
            entries.push(timed(|| oracle_phi_entry(s, phi, nu1, opts)));
        }
    }

    let metrics: Vec<Result<GroundMetric<f64>, String>> = if opts.exponents.is_empty() {
        vec![Ok(s.metric)]
    } else {
        opts.exponents
            .iter()
            .map(|&p| s.metric.with_exponent(p).map_err(|e| e.to_string()))
            .collect()
    };
    for metric in metrics {
        let metric = match metric {
            Ok(m) => m,
            Err(e) => {
                entries.push(MethodEntry::failed("wasserstein", s.metric.kind().name(), e));
                continue;
            }
        };
        entries.push(timed(|| wasserstein_entry(s, &metric, tol)));
        if oracle_fits && opts.oracle.wasserstein_grid_steps > 0 {
            entries.push(timed(|| oracle_wasserstein_entry(s, &metric, opts)));
        }
        if opts.lower_bound_trials > 0 {
            entries.push(timed(|| lower_bound_entry(s, &metric, opts.lower_bound_trials, tol)));
        }
    }

    ScenarioRecord {
        scenario: s.name.clone(),
        kind: s.kind.clone(),
        seed: s.seed,
        range_size,
        support_size: s.rho_y.len(),
        nu1: Some(Real(nu1)),
        nu0: Some(Real(nu0)),
        entries: entries.into_iter().map(MethodEntry::finish).collect(),
    }
}

fn aux_record(name: &str, seed: u64, entries: Vec<MethodEntry>) -> ScenarioRecord {
    ScenarioRecord {
        scenario: name.to_string(),
        kind: "check".to_string(),
        seed,
        range_size: 0,
        support_size: 0,
        nu1: None,
        nu0: None,
        entries: entries.into_iter().map(MethodEntry::finish).collect(),
    }
}

fn quarter_grid_measure(rng: &mut ChaCha8Rng, dim: usize, max_support: usize) -> DiscreteMeasure<f64> {
    // coarse coordinates make ties and degenerate bases common
    let k = rng.gen_range(1..=max_support);
    let points = (0..k)
        .map(|_| Point::new((0..dim).map(|_| f64::from(rng.gen_range(-8i32..=8)) / 4.0).collect()).expect("finite"))
        .collect();
    let weights = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    DiscreteMeasure::new(points, weights).expect("valid measure")
}

/// Duality certificates of the transport LP on random pairs, and agreement
/// with vertex enumeration where the supports are small enough.
pub fn lp_checks(seed: u64, checks: &CheckConfig, tol: &Tolerances) -> ScenarioRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c70);
    let mut entries = Vec::new();
    for i in 0..checks.lp_pairs {
        let dim = rng.gen_range(1..=3);
        let kind = if rng.gen_bool(0.5) { MetricKind::L2 } else { MetricKind::L1 };
        let p = if i % 2 == 0 { 1.0 } else { 2.0 };
        let metric = GroundMetric::new(kind, p).expect("p >= 1");
        let mu = quarter_grid_measure(&mut rng, dim, checks.lp_max_support);
        let nu = quarter_grid_measure(&mut rng, dim, checks.lp_max_support);
        let target = format!("pair-{i:03}");
        let start = Instant::now();
        let exact = match wasserstein_exact(&mu, &nu, &metric) {
            Ok(r) => r,
            Err(e) => {
                entries.push(MethodEntry::failed("lp_certificate", target, e));
                continue;
            }
        };
        let cert = &exact.certificate;
        let mut entry = MethodEntry::new("lp_certificate", target.clone())
            .status("converged")
            .values(cert.primal, cert.dual)
            .symmetric_gap(tol.duality_gap)
            .mismatch(cert.max_slackness, Some(tol.slackness))
            .note(format!("{}x{} {} mismatch=complementary slackness", mu.len(), nu.len(), metric_target(&metric)));
        entry.wall_time_ms = Real(start.elapsed().as_secs_f64() * 1e3);
        entries.push(entry);

        if mu.len() <= 4 && nu.len() <= 4 {
            let entry = timed(|| match wasserstein_by_vertex_enumeration(&mu, &nu, &metric) {
                Ok(v) => MethodEntry::new("vertex_enumeration", target.clone())
                    .status("converged")
                    .values(exact.value, v)
                    .symmetric_gap(tol.vertex_match),
                Err(e) => MethodEntry::failed("vertex_enumeration", target.clone(), e),
            });
            entries.push(entry);
        }
    }
    aux_record("check-lp", seed, entries)
}

/// Analytic gradient of the φ objective against central differences at
/// random interior points.
pub fn gradient_checks(seed: u64, checks: &CheckConfig, tol: &Tolerances) -> ScenarioRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6772);
    let mut entries = Vec::new();
    let h = 1e-6;
    for phi in PhiGenerator::ALL {
        for i in 0..checks.gradient_points {
            let target = format!("{}-{i:02}", phi.name());
            let params = ScenarioParams {
                m: rng.gen_range(1..=2),
                n: Some(rng.gen_range(1..=2)),
                theta_count: rng.gen_range(2..=10),
                ..ScenarioParams::default()
            };
            let entry = timed(|| {
                // in_support defaults to the whole range, so every range
                // point carries data mass and the objective is finite
                let s = match generate_scenario(ScenarioKind::RandomTabulated, &params, rng.gen()) {
                    Ok(s) => s,
                    Err(e) => return MethodEntry::failed("gradient_check", target.clone(), e),
                };
                let objective = match PhiObjective::new(&s.map, &s.rho_y, phi) {
                    Ok(o) => o,
                    Err(e) => return MethodEntry::failed("gradient_check", target.clone(), e),
                };
                let raw: Vec<f64> = (0..s.map.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
                let g = objective.gradient_theta(&w);
                let fd: Vec<f64> = (0..w.len())
                    .map(|k| {
                        let mut up = w.clone();
                        let mut down = w.clone();
                        up[k] += h;
                        down[k] -= h;
                        (objective.value_theta(&up) - objective.value_theta(&down)) / (2.0 * h)
                    })
                    .collect();
                let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
                let rel = norm(&diff) / norm(&g).max(1e-300);
                MethodEntry::new("gradient_check", target.clone())
                    .status("converged")
                    .values(norm(&g), norm(&fd))
                    .mismatch(rel, Some(tol.gradient_rel))
                    .note("objective=|analytic|, predicted=|finite difference|, mismatch=relative error")
            });
            entries.push(entry);
        }
    }
    aux_record("check-gradient", seed, entries)
}

/// The closed-form Bayes posterior against random perturbations of itself,
/// plus the two-atom uniform-prior example.
pub fn bayes_checks(seed: u64, checks: &CheckConfig, tol: &Tolerances) -> ScenarioRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6279);
    let mut entries = Vec::new();

    let example = timed(|| {
        let prior = DiscreteMeasure::new(vec![Point::scalar(0.0), Point::scalar(1.0)], vec![0.5, 0.5])
            .expect("valid prior");
        match bayes_variational_posterior(&prior, &[0.0, 3f64.ln()]) {
            Ok(post) => {
                let w: Vec<f64> = post.weights().collect();
                let err = (w[0] - 0.75).abs().max((w[1] - 0.25).abs());
                MethodEntry::new("bayes_example", "uniform-prior")
                    .status("converged")
                    .values(w[0], 0.75)
                    .symmetric_gap(tol.bayes_example)
                    .mismatch(err, Some(tol.bayes_example))
            }
            Err(e) => MethodEntry::failed("bayes_example", "uniform-prior", e),
        }
    });
    entries.push(example);

    for i in 0..checks.bayes_trials {
        let target = format!("trial-{i:03}");
        let k = rng.gen_range(2..=8);
        let points: Vec<Point<f64>> = (0..k).map(|j| Point::scalar(j as f64)).collect();
        let prior_w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let nll: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..3.0)).collect();
        let entry = timed(|| {
            let prior = DiscreteMeasure::new(points.clone(), prior_w.clone()).expect("valid prior");
            let post = match bayes_variational_posterior(&prior, &nll) {
                Ok(p) => p,
                Err(e) => return MethodEntry::failed("bayes_contrast", target.clone(), e),
            };
            let w: Vec<f64> = post.weights().collect();
            let best = variational_bayes_objective(&w, &prior, &nll);
            let mut rival = f64::INFINITY;
            for _ in 0..checks.bayes_perturbations {
                let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let t = rng.gen_range(0.01..0.5);
                let perturbed: Vec<f64> = w.iter().zip(&raw).map(|(a, b)| (1.0 - t) * a + t * b / total).collect();
                rival = rival.min(variational_bayes_objective(&perturbed, &prior, &nll));
            }
            MethodEntry::new("bayes_contrast", target.clone())
                .status("converged")
                .values(best, rival)
                .gap_bounds(None, Some(0.0))
                .note(format!("predicted=best of {} perturbations", checks.bayes_perturbations))
        });
        entries.push(entry);
    }
    aux_record("check-bayes", seed, entries)
}
