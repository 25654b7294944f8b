mod common;

use common::{random_instance, rng};
use pushmatch::{
    brute_force_oracle, conditional_restrict, predicted_phi_min, pushforward, solve_phi_closed_form,
    solve_phi_iterative, solve_wasserstein, wasserstein_exact, GroundMetric, OracleObjective, PhiGenerator,
    SolveStatus, SolverOptions,
};

const STRICT: [PhiGenerator; 3] = [PhiGenerator::Kl, PhiGenerator::Chi2, PhiGenerator::Hellinger];

#[test]
fn iterative_matches_closed_form_on_random_instances() {
    let mut r = rng(7);
    let opts = SolverOptions::default();
    let mut worst_tv: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for _ in 0..200 {
        let inst = random_instance(&mut r, 10, 12);
        let conditional = conditional_restrict(&inst.rho_y, inst.map.range()).unwrap();
        for phi in STRICT {
            let closed = solve_phi_closed_form(&inst.map, &inst.rho_y, phi).unwrap();
            let iter = solve_phi_iterative(&inst.map, &inst.rho_y, phi, &opts).unwrap();
            assert_eq!(iter.status, SolveStatus::Converged);
            let predicted = predicted_phi_min(phi, inst.nu1).unwrap();
            let tv = iter.pushforward_star.tv_distance(&closed.pushforward_star);
            let gap = (iter.objective - predicted).abs().max((closed.objective - predicted).abs());
            worst_tv = worst_tv.max(tv);
            worst_gap = worst_gap.max(gap);
            assert!(tv < 1e-6, "{phi}: tv {tv}");
            assert!(gap < 1e-8, "{phi}: gap {gap}");
            assert!(closed.pushforward_star.approx_eq(&conditional, 0.0));
            for pair in iter.objective_trace.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-12);
            }
            let pushed = pushforward(&inst.map, &iter.rho_x_star).unwrap();
            assert!(pushed.approx_eq(&iter.pushforward_star, 1e-9));
        }
    }
    eprintln!("worst tv {worst_tv:e}, worst value gap {worst_gap:e}");
}

#[test]
fn wasserstein_solver_matches_projection_on_random_instances() {
    let mut r = rng(8);
    for _ in 0..200 {
        let inst = random_instance(&mut r, 10, 12);
        for p in [1.0, 2.0] {
            let metric = GroundMetric::euclidean(p).unwrap();
            let res = solve_wasserstein(&inst.map, &inst.rho_y, &metric).unwrap();
            let exact = wasserstein_exact(&res.pushforward_star, &inst.rho_y, &metric).unwrap();
            assert!((exact.value - res.objective).abs() <= 1e-9);
        }
    }
}

#[test]
fn tv_value_matches_grid_oracle() {
    let mut r = rng(9);
    let mut checked = 0;
    while checked < 20 {
        let inst = random_instance(&mut r, 6, 8);
        if inst.map.range().len() > 4 {
            continue;
        }
        let predicted = predicted_phi_min(PhiGenerator::Tv, inst.nu1).unwrap();
        let oracle = brute_force_oracle(&inst.map, &inst.rho_y, OracleObjective::Phi(PhiGenerator::Tv), 200).unwrap();
        assert!(oracle.best_value >= predicted - 1e-12);
        assert!(oracle.best_value - predicted <= 5e-3, "{} vs {predicted}", oracle.best_value);
        checked += 1;
    }
}
