#![allow(dead_code)]

use pushmatch::{DiscreteMeasure, ForwardMap, Point};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn p1(x: f64) -> Point<f64> {
    Point::scalar(x)
}

pub fn line(xs: &[f64], ws: &[f64]) -> DiscreteMeasure<f64> {
    pushmatch::make_measure(xs.iter().map(|&x| p1(x)).collect(), ws.to_vec()).unwrap()
}

pub fn random_point(rng: &mut Rng8, dim: usize) -> Point<f64> {
    // quarter-grid coordinates keep ties and exact matches common
    Point::new((0..dim).map(|_| f64::from(rng.gen_range(-8i32..=8)) / 4.0).collect()).unwrap()
}

pub fn random_measure(rng: &mut Rng8, dim: usize, max_support: usize) -> DiscreteMeasure<f64> {
    let k = rng.gen_range(1..=max_support);
    let points = (0..k).map(|_| random_point(rng, dim)).collect();
    let weights = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    DiscreteMeasure::new(points, weights).unwrap()
}

pub struct Instance {
    pub map: ForwardMap<f64>,
    pub rho_y: DiscreteMeasure<f64>,
    pub nu1: f64,
}

/// Random non-injective map with |Θ| <= max_theta and a data measure with
/// |supp| <= max_support and ν₁ drawn from [0.3, 0.9].
pub fn random_instance(rng: &mut Rng8, max_theta: usize, max_support: usize) -> Instance {
    let m = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=2);
    let theta_count = rng.gen_range(1..=max_theta);
    let pool_size = rng.gen_range(1..=theta_count);
    let pool: Vec<Point<f64>> = (0..pool_size)
        .map(|_| Point::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap())
        .collect();
    let mut thetas: Vec<Point<f64>> = Vec::new();
    while thetas.len() < theta_count {
        let t = Point::new((0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        if !thetas.iter().any(|s| s.approx_eq(&t)) {
            thetas.push(t);
        }
    }
    let pairs = thetas
        .into_iter()
        .map(|t| (t, pool.choose(rng).unwrap().clone()))
        .collect();
    let map = ForwardMap::new(pairs).unwrap();

    let range = map.range().to_vec();
    let nu1 = rng.gen_range(0.3..0.9);
    let n_in = rng.gen_range(1..=range.len().min(max_support - 1));
    let n_out = rng.gen_range(1..=(max_support - n_in));
    let inside: Vec<Point<f64>> = range.choose_multiple(rng, n_in).cloned().collect();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let in_w: Vec<f64> = (0..n_in).map(|_| rng.gen_range(0.05..1.0)).collect();
    let in_total: f64 = in_w.iter().sum();
    for (p, w) in inside.into_iter().zip(in_w) {
        points.push(p);
        weights.push(nu1 * w / in_total);
    }
    let out_w: Vec<f64> = (0..n_out).map(|_| rng.gen_range(0.05..1.0)).collect();
    let out_total: f64 = out_w.iter().sum();
    for w in out_w {
        let base = range.choose(rng).unwrap();
        let axis = rng.gen_range(0..n);
        let mut coords = base.coords().to_vec();
        coords[axis] += rng.gen_range(0.05..0.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = Point::new(coords).unwrap();
        assert!(!range.iter().any(|r| r.approx_eq(&p)));
        points.push(p);
        weights.push((1.0 - nu1) * w / out_total);
    }
    let rho_y = DiscreteMeasure::new(points, weights).unwrap();
    Instance { map, rho_y, nu1 }
}
