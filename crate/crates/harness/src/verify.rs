//! The seeded verification battery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{BatteryConfig, Config};
use crate::error::Result;
use crate::experiment::{bayes_checks, gradient_checks, lp_checks, run_experiment, ExperimentOptions};
use crate::report::Report;
use crate::scenario::{generate_scenario, reference_scenarios, Scenario, ScenarioKind, ScenarioParams};

/// Random parameters for one battery scenario, within the battery's size
/// limits on `|Θ|` and on the data support.
fn battery_params(kind: ScenarioKind, cfg: &BatteryConfig, rng: &mut ChaCha8Rng) -> ScenarioParams {
    let max_theta = cfg.max_theta;
    let mut p = ScenarioParams::default();
    match kind {
        ScenarioKind::LinearOverdetermined => {
            p.m = rng.gen_range(1..=2);
            p.n = Some(rng.gen_range(p.m + 1..=3));
            p.theta_count = rng.gen_range(2..=max_theta);
        }
        ScenarioKind::Quadratic => {
            if max_theta >= 9 && rng.gen_bool(0.3) {
                p.m = 2;
                p.half_width = 1;
            } else {
                p.m = 1;
                p.half_width = rng.gen_range(1..=((max_theta - 1) / 2).clamp(1, 4));
            }
            p.spacing = if rng.gen_bool(0.5) { 0.5 } else { 1.0 };
        }
        ScenarioKind::RandomTabulated => {
            p.m = rng.gen_range(1..=2);
            p.n = Some(rng.gen_range(1..=3));
            p.theta_count = rng.gen_range(2..=max_theta);
            p.range_size = Some(rng.gen_range(1..=p.theta_count.min(6)));
        }
    }
    let in_max = (cfg.max_support - 1).min(max_theta);
    p.in_support = Some(rng.gen_range(1..=in_max));
    let in_used = p.in_support.unwrap();
    p.out_support = rng.gen_range(1..=(cfg.max_support - in_used).min(4));
    p
}

/// The random part of the battery. Scenario `i` is named
/// `battery-{i:03}-{kind}`, so sorting by name keeps generation order.
pub fn battery(cfg: &BatteryConfig, seed: u64) -> Result<Vec<Scenario>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cfg.count)
        .map(|i| {
            let kind = cfg.kinds[i % cfg.kinds.len()];
            let params = battery_params(kind, cfg, &mut rng);
            let mut s = generate_scenario(kind, &params, rng.gen())?;
            s.name = format!("battery-{i:03}-{kind}");
            Ok(s)
        })
        .collect()
}

/// Every scenario the config asks for, with the config's generators and
/// metric applied. The flag says whether the lower-bound check runs.
pub fn scenarios(cfg: &Config) -> Result<Vec<(Scenario, bool)>> {
    let generators = cfg.generator_list()?;
    let kind = cfg.metric_kind()?;
    let mut out: Vec<(Scenario, bool)> = battery(&cfg.battery, cfg.seed)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i < cfg.lower_bound.scenarios))
        .collect();
    if cfg.reference_scenarios {
        out.extend(reference_scenarios().into_iter().map(|s| (s, false)));
    }
    for (i, spec) in cfg.scenarios.iter().enumerate() {
        let mut s = generate_scenario(spec.kind, &spec.params, spec.seed)?;
        s.name = spec.name.clone().unwrap_or_else(|| format!("custom-{i:03}-{}", spec.kind));
        out.push((s, false));
    }
    for (s, _) in &mut out {
        s.generators = generators.clone();
        s.metric = pushmatch::GroundMetric::new(kind, s.metric.p())?;
    }
    Ok(out)
}

/// Runs the battery and the scenario-independent checks. Scenarios run in
/// parallel on the current rayon pool; the report is sorted by scenario
/// name, so its content does not depend on scheduling.
pub fn verify_theorems(cfg: &Config) -> Result<Report> {
    cfg.validate()?;
    let base = ExperimentOptions {
        solver: cfg.solver.options(),
        exponents: cfg.exponents.clone(),
        oracle: cfg.oracle.clone(),
        lower_bound_trials: 0,
        tolerances: cfg.tolerances.clone(),
    };
    let with_bound = ExperimentOptions {
        lower_bound_trials: cfg.lower_bound.trials,
        ..base.clone()
    };
    let work = scenarios(cfg)?;
    let mut records: Vec<_> = work
        .par_iter()
        .map(|(s, bound)| run_experiment(s, if *bound { &with_bound } else { &base }))
        .collect();

    let checks = &cfg.checks;
    let tol = &cfg.tolerances;
    let (lp, (grad, bayes)) = rayon::join(
        || lp_checks(cfg.seed, checks, tol),
        || rayon::join(|| gradient_checks(cfg.seed, checks, tol), || bayes_checks(cfg.seed, checks, tol)),
    );
    records.extend([lp, grad, bayes].into_iter().filter(|r| !r.entries.is_empty()));

    let mut report = Report {
        seed: cfg.seed,
        records,
    };
    report.sort();
    Ok(report)
}

/// Exit code for a finished run: 0 when nothing failed, 1 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    if report.all_pass() {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_respects_size_limits() {
        let cfg = BatteryConfig::default();
        let scenarios = battery(&cfg, 42).unwrap();
        assert_eq!(scenarios.len(), 200);
        for s in &scenarios {
            assert!(s.map.len() <= cfg.max_theta, "{}", s.name);
            assert!(s.rho_y.len() <= cfg.max_support, "{}", s.name);
            let nu1 = s.nu1();
            assert!((0.3 - 1e-12..=0.9 + 1e-12).contains(&nu1), "{}: {nu1}", s.name);
        }
        let small = scenarios.iter().filter(|s| s.map.range().len() <= 4).count();
        assert!(small >= 40, "only {small} scenarios reach the oracle");
    }

    #[test]
    fn battery_depends_only_on_the_seed() {
        let cfg = BatteryConfig {
            count: 12,
            ..BatteryConfig::default()
        };
        assert_eq!(battery(&cfg, 5).unwrap(), battery(&cfg, 5).unwrap());
        assert_ne!(battery(&cfg, 5).unwrap(), battery(&cfg, 6).unwrap());
    }

    #[test]
    fn tv_only_config_skips_identity_checks() {
        let cfg = Config::from_json(
            r#"{"generators": ["tv"], "battery": {"count": 6}, "lower_bound": {"scenarios": 0},
                "checks": {"lp_pairs": 0, "gradient_points": 0, "bayes_trials": 0}}"#,
        )
        .unwrap();
        let report = verify_theorems(&cfg).unwrap();
        assert_eq!(exit_code(&report), 0);
        for (_, e) in report.entries() {
            if e.method == "phi_iterative" {
                assert_eq!(e.verdict, crate::report::Verdict::NotApplicable);
            }
            if e.method == "phi_closed_form" && e.status == "converged" {
                assert!(e.mismatch_tol.is_none());
                assert!(e.gap_min.is_some());
            }
        }
    }
}
