//! Seeded test instances: a tabulated forward map plus a data measure that
//! puts a known fraction of its mass on the map's range.

use std::fmt;
use std::str::FromStr;

use pushmatch::io::{MapFile, MeasureFile, Real};
use pushmatch::{mass_in_range, DiscreteMeasure, ForwardMap, GroundMetric, MetricKind, PhiGenerator, Point, POINT_TOL};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const MAX_DOMAIN_DIM: usize = 12;
pub const MAX_CODOMAIN_DIM: usize = 6;
pub const MAX_SUPPORT: usize = 64;
pub const NU1_RANGE: (f64, f64) = (0.3, 0.9);

/// Smallest displacement used to push an atom off the range.
const MIN_OFFSET: f64 = 0.05;
const MAX_OFFSET: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    LinearOverdetermined,
    Quadratic,
    RandomTabulated,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::LinearOverdetermined,
        ScenarioKind::Quadratic,
        ScenarioKind::RandomTabulated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::LinearOverdetermined => "linear_overdetermined",
            ScenarioKind::Quadratic => "quadratic",
            ScenarioKind::RandomTabulated => "random_tabulated",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::InvalidParams(format!("unknown scenario kind `{s}`")))
    }
}

/// Generation parameters. Which fields matter depends on the kind:
///
/// - `linear_overdetermined`: `m`, `n` (default `m + 1`), `theta_count`,
///   optional explicit `matrix` (`n` rows of `m` entries) and `thetas`;
/// - `quadratic`: `m`, `half_width`, `spacing`; `Θ` is the grid
///   `{-k, .., k}^m · spacing` and `n = m`;
/// - `random_tabulated`: `m`, `n` (default 1), `theta_count`, `range_size`.
///
/// Every kind uses `in_support`, `out_support` and `nu1` for the data measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub m: usize,
    pub n: Option<usize>,
    pub theta_count: usize,
    pub matrix: Option<Vec<Vec<f64>>>,
    pub thetas: Option<Vec<Vec<f64>>>,
    pub half_width: usize,
    pub spacing: f64,
    pub range_size: Option<usize>,
    /// Range points carrying data mass; clipped to `|R|`. Defaults to all of `R`.
    pub in_support: Option<usize>,
    pub out_support: usize,
    /// Drawn uniformly from `[0.3, 0.9]` when absent.
    pub nu1: Option<f64>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            m: 1,
            n: None,
            theta_count: 6,
            matrix: None,
            thetas: None,
            half_width: 1,
            spacing: 1.0,
            range_size: None,
            in_support: None,
            out_support: 2,
            nu1: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// A [`ScenarioKind`] name, or `reference` for the hand-built instances.
    pub kind: String,
    pub seed: u64,
    pub map: ForwardMap<f64>,
    pub rho_y: DiscreteMeasure<f64>,
    pub metric: GroundMetric<f64>,
    pub generators: Vec<PhiGenerator>,
}

impl Scenario {
    pub fn nu1(&self) -> f64 {
        mass_in_range(&self.rho_y, self.map.range()).0
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::InvalidParams(msg.into())
}

fn check_params(kind: ScenarioKind, p: &ScenarioParams) -> Result<()> {
    if p.m == 0 || p.m > MAX_DOMAIN_DIM {
        return Err(invalid(format!("m = {} outside 1..={MAX_DOMAIN_DIM}", p.m)));
    }
    if let Some(n) = p.n {
        if n == 0 || n > MAX_CODOMAIN_DIM {
            return Err(invalid(format!("n = {n} outside 1..={MAX_CODOMAIN_DIM}")));
        }
    }
    if p.theta_count == 0 || p.theta_count > MAX_SUPPORT {
        return Err(invalid(format!("theta_count = {} outside 1..={MAX_SUPPORT}", p.theta_count)));
    }
    if p.out_support == 0 {
        return Err(invalid("out_support must be at least 1"));
    }
    let in_support = p.in_support.unwrap_or(1);
    if in_support == 0 || in_support + p.out_support > MAX_SUPPORT {
        return Err(invalid(format!("data support must lie in 2..={MAX_SUPPORT}")));
    }
    if let Some(nu1) = p.nu1 {
        if !(NU1_RANGE.0..=NU1_RANGE.1).contains(&nu1) {
            return Err(invalid(format!("nu1 = {nu1} outside [0.3, 0.9]")));
        }
    }
    match kind {
        ScenarioKind::LinearOverdetermined => {
            let n = p.n.unwrap_or(p.m + 1);
            if n <= p.m {
                return Err(invalid(format!("overdetermined map needs n > m, got n = {n}, m = {}", p.m)));
            }
            if n > MAX_CODOMAIN_DIM {
                return Err(invalid(format!("n = {n} exceeds {MAX_CODOMAIN_DIM}")));
            }
        }
        ScenarioKind::Quadratic => {
            if p.m > MAX_CODOMAIN_DIM {
                return Err(invalid(format!("quadratic map has n = m = {} > {MAX_CODOMAIN_DIM}", p.m)));
            }
            if p.n.is_some_and(|n| n != p.m) {
                return Err(invalid("quadratic map needs n = m"));
            }
            if p.half_width == 0 {
                return Err(invalid("half_width must be at least 1"));
            }
            if !(p.spacing > 0.0 && p.spacing.is_finite()) {
                return Err(invalid("spacing must be positive"));
            }
            let side = 2 * p.half_width + 1;
            let size = (0..p.m).try_fold(1usize, |acc, _| acc.checked_mul(side));
            if size.is_none_or(|s| s > MAX_SUPPORT) {
                return Err(invalid(format!("grid with {side}^{} points exceeds {MAX_SUPPORT}", p.m)));
            }
        }
        ScenarioKind::RandomTabulated => {
            if let Some(r) = p.range_size {
                if r == 0 || r > p.theta_count {
                    return Err(invalid(format!("range_size = {r} outside 1..=theta_count")));
                }
            }
        }
    }
    Ok(())
}

fn point(coords: Vec<f64>) -> Result<Point<f64>> {
    Point::new(coords).map_err(|e| invalid(e.to_string()))
}

fn uniform_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// `count` random points of `[-1, 1]^dim`, pairwise distinguishable.
fn point_cloud(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Result<Vec<Point<f64>>> {
    let mut out: Vec<Point<f64>> = Vec::with_capacity(count);
    while out.len() < count {
        let p = point(uniform_point(rng, dim))?;
        if !out.iter().any(|q| q.approx_eq(&p)) {
            out.push(p);
        }
    }
    Ok(out)
}

fn linear_map(p: &ScenarioParams, rng: &mut ChaCha8Rng) -> Result<ForwardMap<f64>> {
    let (m, n) = (p.m, p.n.unwrap_or(p.m + 1));
    let a = match &p.matrix {
        Some(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != m) {
                return Err(invalid(format!("matrix must be {n} x {m}")));
            }
            rows.clone()
        }
        None => (0..n).map(|_| uniform_point(rng, m)).collect(),
    };
    let thetas = match &p.thetas {
        Some(ts) => {
            if ts.is_empty() || ts.len() > MAX_SUPPORT || ts.iter().any(|t| t.len() != m) {
                return Err(invalid(format!("thetas must be 1..={MAX_SUPPORT} points of dimension {m}")));
            }
            ts.iter().map(|t| point(t.clone())).collect::<Result<Vec<_>>>()?
        }
        None => point_cloud(rng, m, p.theta_count)?,
    };
    let pairs = thetas
        .into_iter()
        .map(|t| {
            let image = a
                .iter()
                .map(|row| row.iter().zip(t.coords()).map(|(x, y)| x * y).sum())
                .collect();
            Ok((t, point(image)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForwardMap::new(pairs)?)
}

fn quadratic_map(p: &ScenarioParams) -> Result<ForwardMap<f64>> {
    let k = p.half_width as i64;
    let axis: Vec<f64> = (-k..=k).map(|i| i as f64 * p.spacing).collect();
    let mut thetas: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..p.m {
        thetas = thetas
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut next = prefix.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    let thetas = thetas.into_iter().map(point).collect::<Result<Vec<_>>>()?;
    Ok(ForwardMap::from_fn(thetas, |t| {
        Point::new(t.coords().iter().map(|x| x * x).collect()).expect("finite grid")
    })?)
}

fn random_map(p: &ScenarioParams, rng: &mut ChaCha8Rng) -> Result<ForwardMap<f64>> {
    let n = p.n.unwrap_or(1);
    let range_size = p.range_size.unwrap_or(p.theta_count.div_ceil(2));
    let thetas = point_cloud(rng, p.m, p.theta_count)?;
    let pool = point_cloud(rng, n, range_size)?;
    let mut targets: Vec<usize> = (0..range_size).collect();
    targets.extend((range_size..p.theta_count).map(|_| rng.gen_range(0..range_size)));
    targets.shuffle(rng);
    let pairs = thetas
        .into_iter()
        .zip(targets)
        .map(|(t, j)| (t, pool[j].clone()))
        .collect();
    Ok(ForwardMap::new(pairs)?)
}

/// A point at least `MIN_OFFSET` away from `base` along one coordinate axis
/// and farther than `10 ε_pt` from every range point in each coordinate sense.
fn off_range_point(rng: &mut ChaCha8Rng, range: &[Point<f64>]) -> Result<Point<f64>> {
    let n = range[0].dim();
    for _ in 0..256 {
        let base = range.choose(rng).expect("nonempty range");
        let axis = rng.gen_range(0..n);
        let mut magnitude = rng.gen_range(MIN_OFFSET..=MAX_OFFSET);
        if rng.gen_bool(0.5) {
            magnitude = -magnitude;
        }
        let mut coords = base.coords().to_vec();
        coords[axis] += magnitude;
        let candidate = point(coords)?;
        let clear = range.iter().all(|r| {
            r.coords()
                .iter()
                .zip(candidate.coords())
                .any(|(a, b)| (a - b).abs() > 10.0 * POINT_TOL)
        });
        if clear {
            return Ok(candidate);
        }
    }
    Err(invalid("could not place an atom off the range"))
}

fn data_measure(p: &ScenarioParams, range: &[Point<f64>], rng: &mut ChaCha8Rng) -> Result<DiscreteMeasure<f64>> {
    let nu1 = p.nu1.unwrap_or_else(|| rng.gen_range(NU1_RANGE.0..=NU1_RANGE.1));
    let in_count = p.in_support.unwrap_or(range.len()).min(range.len());
    let inside: Vec<Point<f64>> = range.choose_multiple(rng, in_count).cloned().collect();
    let in_w: Vec<f64> = (0..in_count).map(|_| rng.gen_range(0.05..=1.0)).collect();
    let in_total: f64 = in_w.iter().sum();
    let out_w: Vec<f64> = (0..p.out_support).map(|_| rng.gen_range(0.05..=1.0)).collect();
    let out_total: f64 = out_w.iter().sum();

    let mut points = inside;
    let mut weights: Vec<f64> = in_w.iter().map(|w| nu1 * w / in_total).collect();
    for w in out_w {
        points.push(off_range_point(rng, range)?);
        weights.push((1.0 - nu1) * w / out_total);
    }
    Ok(DiscreteMeasure::new(points, weights)?)
}

/// Builds a scenario of the given kind. The seed fixes every random draw,
/// so equal inputs give identical scenarios.
pub fn generate_scenario(kind: ScenarioKind, params: &ScenarioParams, seed: u64) -> Result<Scenario> {
    check_params(kind, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = match kind {
        ScenarioKind::LinearOverdetermined => linear_map(params, &mut rng)?,
        ScenarioKind::Quadratic => quadratic_map(params)?,
        ScenarioKind::RandomTabulated => random_map(params, &mut rng)?,
    };
    let rho_y = data_measure(params, map.range(), &mut rng)?;
    Ok(Scenario {
        name: format!("{kind}-{seed:016x}"),
        kind: kind.name().to_string(),
        seed,
        map,
        rho_y,
        metric: GroundMetric::default(),
        generators: PhiGenerator::ALL.to_vec(),
    })
}

/// Hand-built instances with known answers: the canonical three-atom case,
/// data entirely on the range, and data entirely off it.
pub fn reference_scenarios() -> Vec<Scenario> {
    let p1 = |x: f64| Point::scalar(x);
    let line = |xs: &[f64], ws: &[f64]| {
        DiscreteMeasure::new(xs.iter().map(|&x| p1(x)).collect(), ws.to_vec()).expect("valid reference measure")
    };
    let identity = ForwardMap::from_fn(vec![p1(0.0), p1(1.0)], |t| t.clone()).expect("valid map");
    let square =
        ForwardMap::from_fn(vec![p1(-1.0), p1(0.0), p1(1.0)], |t| p1(t.coords()[0].powi(2))).expect("valid map");
    let make = |name: &str, map: ForwardMap<f64>, rho_y| Scenario {
        name: name.to_string(),
        kind: "reference".to_string(),
        seed: 0,
        map,
        rho_y,
        metric: GroundMetric::default(),
        generators: PhiGenerator::ALL.to_vec(),
    };
    vec![
        make("reference-canonical", identity.clone(), line(&[0.0, 1.0, 2.0], &[0.3, 0.3, 0.4])),
        make("reference-contained", square, line(&[0.0, 1.0], &[0.5, 0.5])),
        make("reference-disjoint", identity, line(&[3.0, 4.0], &[0.5, 0.5])),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub kind: String,
    pub p: Real,
}

/// On-disk form of a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub kind: String,
    pub seed: u64,
    pub metric: MetricFile,
    pub generators: Vec<String>,
    pub map: MapFile,
    pub rho_y: MeasureFile,
}

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            name: s.name.clone(),
            kind: s.kind.clone(),
            seed: s.seed,
            metric: MetricFile {
                kind: s.metric.kind().name().to_string(),
                p: Real(s.metric.p()),
            },
            generators: s.generators.iter().map(|g| g.name().to_string()).collect(),
            map: MapFile::from_map(&s.map),
            rho_y: MeasureFile::from_measure(&s.rho_y),
        }
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let kind: MetricKind = self.metric.kind.parse()?;
        let generators = self
            .generators
            .iter()
            .map(|g| g.parse())
            .collect::<pushmatch::Result<Vec<PhiGenerator>>>()?;
        let map = self.map.to_map()?;
        let rho_y = self.rho_y.to_measure()?;
        if map.codomain_dim() != rho_y.dim() {
            return Err(invalid(format!(
                "map codomain has dimension {} but rho_y has {}",
                map.codomain_dim(),
                rho_y.dim()
            )));
        }
        Ok(Scenario {
            name: self.name.clone(),
            kind: self.kind.clone(),
            seed: self.seed,
            map,
            rho_y,
            metric: GroundMetric::new(kind, self.metric.p.0)?,
            generators,
        })
    }
}
