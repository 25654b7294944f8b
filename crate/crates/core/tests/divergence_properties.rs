mod common;

use common::{random_measure, rng};
use pushmatch::divergence::phi_divergence_weights;
use pushmatch::measure::aligned_weights;
use pushmatch::{phi_divergence, PhiGenerator};
use rand::Rng;

#[test]
fn divergences_are_nonnegative() {
    let mut r = rng(11);
    for _ in 0..1000 {
        let p = random_measure(&mut r, 1, 8);
        let q = random_measure(&mut r, 1, 8);
        for phi in PhiGenerator::ALL {
            let d = phi_divergence(phi, &p, &q).unwrap();
            assert!(d >= 0.0 && !d.is_nan(), "{phi}: {d}");
        }
    }
}

#[test]
fn strictly_convex_divergences_vanish_only_on_equality() {
    let mut r = rng(12);
    for _ in 0..200 {
        let p = random_measure(&mut r, 1, 6);
        let q = random_measure(&mut r, 1, 6);
        for phi in [PhiGenerator::Kl, PhiGenerator::Chi2, PhiGenerator::Hellinger] {
            assert!(phi_divergence(phi, &p, &p).unwrap().abs() < 1e-15);
            if p.tv_distance(&q) > 1e-6 {
                assert!(phi_divergence(phi, &p, &q).unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn convex_in_the_first_argument() {
    let mut r = rng(13);
    for _ in 0..500 {
        let p1 = random_measure(&mut r, 1, 6);
        let p2 = random_measure(&mut r, 1, 6);
        let q = random_measure(&mut r, 1, 6);
        let alpha = r.gen_range(0.0..=1.0);
        let mixed = p1.mix(&p2, alpha).unwrap();
        for phi in PhiGenerator::ALL {
            let lhs = phi_divergence(phi, &mixed, &q).unwrap();
            let rhs = alpha * phi_divergence(phi, &p1, &q).unwrap()
                + (1.0 - alpha) * phi_divergence(phi, &p2, &q).unwrap();
            if rhs.is_finite() {
                assert!(lhs <= rhs + 1e-9, "{phi}: {lhs} > {rhs}");
            }
        }
    }
}

#[test]
fn tv_generator_matches_direct_formula() {
    let mut r = rng(14);
    for _ in 0..1000 {
        let p = random_measure(&mut r, 2, 8);
        let q = random_measure(&mut r, 2, 8);
        let (pw, qw) = aligned_weights(&p, &q);
        let direct = 0.5 * pw.iter().zip(&qw).map(|(a, b)| (a - b).abs()).sum::<f64>();
        let via_phi = phi_divergence(PhiGenerator::Tv, &p, &q).unwrap();
        assert!((direct - via_phi).abs() <= 1e-12);
        assert!((p.tv_distance(&q) - direct).abs() <= 1e-15);
    }
}

#[test]
fn chi_square_grows_quadratically_under_perturbation() {
    let mut r = rng(15);
    for _ in 0..50 {
        let k = r.gen_range(2..8);
        let q: Vec<f64> = {
            let raw: Vec<f64> = (0..k).map(|_| r.gen_range(0.1..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        };
        let mut h: Vec<f64> = (0..k).map(|_| r.gen_range(-1.0..1.0)).collect();
        let mean = h.iter().sum::<f64>() / k as f64;
        h.iter_mut().for_each(|x| *x -= mean);
        let ratio = |eps: f64| {
            let p: Vec<f64> = q.iter().zip(&h).map(|(a, b)| a + eps * b).collect();
            phi_divergence_weights(PhiGenerator::Chi2, &p, &q) / (eps * eps)
        };
        let (r3, r4) = (ratio(1e-3), ratio(1e-4));
        assert!(((r3 - r4) / r4).abs() < 0.01, "{r3} vs {r4}");
    }
}
