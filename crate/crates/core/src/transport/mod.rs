//! Exact optimal transport between discrete measures and the projection onto
//! a discrete range.
//!
//! `W_p(μ, ν) = (min_{γ ∈ Γ(μ,ν)} Σ γ_ij d(x_i, y_j)^p)^{1/p}` is solved as a
//! transportation linear program by a primal simplex. Every solve returns
//! its dual potentials and is checked against them: dual feasibility,
//! duality gap and complementary slackness must all hold before a value is
//! handed back.

mod simplex;
mod vertex;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, Point};
use crate::scalar::Scalar;

pub use vertex::VERTEX_ENUMERATION_LIMIT;

/// Largest support accepted on either side of [`wasserstein_exact`].
pub const MAX_SUPPORT: usize = 512;

/// Duality gap allowed between primal and dual objectives (scaled by the
/// largest cost when that exceeds one).
pub const DUALITY_GAP_TOL: f64 = 1e-7;

/// Allowed `γ_ij (c_ij - u_i - v_j)` on any cell.
pub const SLACKNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MetricKind {
    #[default]
    L2,
    L1,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::L2 => "l2",
            MetricKind::L1 => "l1",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(MetricKind::L2),
            "l1" => Ok(MetricKind::L1),
            other => Err(Error::UnknownMetric(other.to_string())),
        }
    }
}

/// Ground distance `d` together with the transport exponent `p ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundMetric<T> {
    kind: MetricKind,
    p: T,
}

impl<T: Scalar> GroundMetric<T> {
    pub fn new(kind: MetricKind, p: T) -> Result<Self> {
        if !p.is_finite() || p < T::one() {
            return Err(Error::InvalidExponent(p.as_f64()));
        }
        Ok(GroundMetric { kind, p })
    }

    /// Euclidean distance with the given exponent.
    pub fn euclidean(p: T) -> Result<Self> {
        Self::new(MetricKind::L2, p)
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn with_exponent(&self, p: T) -> Result<Self> {
        Self::new(self.kind, p)
    }

    pub fn distance(&self, x: &Point<T>, y: &Point<T>) -> T {
        let diffs = x.coords().iter().zip(y.coords()).map(|(a, b)| *a - *b);
        match self.kind {
            MetricKind::L2 => diffs.map(|d| d * d).sum::<T>().sqrt(),
            MetricKind::L1 => diffs.map(|d| d.abs()).sum(),
        }
    }

    /// Transport cost `d(x, y)^p`.
    pub fn cost(&self, x: &Point<T>, y: &Point<T>) -> T {
        if self.p == T::one() {
            return self.distance(x, y);
        }
        if self.kind == MetricKind::L2 && self.p == T::lit(2.0) {
            return x
                .coords()
                .iter()
                .zip(y.coords())
                .map(|(a, b)| (*a - *b) * (*a - *b))
                .sum();
        }
        self.distance(x, y).powf(self.p)
    }

    fn root(&self, total_cost: T) -> T {
        let c = total_cost.max(T::zero());
        if self.p == T::one() {
            c
        } else {
            c.powf(T::one() / self.p)
        }
    }
}

impl Default for GroundMetric<f64> {
    fn default() -> Self {
        GroundMetric {
            kind: MetricKind::L2,
            p: 1.0,
        }
    }
}

/// Transport plan between the atoms of two measures.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    pub rows: Vec<Point<T>>,
    pub cols: Vec<Point<T>>,
    /// Dense `rows.len() x cols.len()` matrix, row-major.
    pub plan: Vec<Vec<T>>,
}

impl<T: Scalar> Coupling<T> {
    pub fn row_sums(&self) -> Vec<T> {
        self.plan.iter().map(|row| row.iter().copied().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols.len())
            .map(|j| self.plan.iter().map(|row| row[j]).sum())
            .collect()
    }

    /// Largest deviation of the marginals from `mu` and `nu`.
    pub fn marginal_error(&self, mu: &DiscreteMeasure<T>, nu: &DiscreteMeasure<T>) -> T {
        let rows = self.row_sums().into_iter().zip(mu.weights());
        let cols = self.col_sums().into_iter().zip(nu.weights());
        rows.chain(cols)
            .fold(T::zero(), |acc, (s, w)| acc.max((s - w).abs()))
    }
}

/// Dual potentials certifying an optimal plan.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub primal: T,
    pub dual: T,
    /// `|primal - dual|`.
    pub gap: T,
    /// `max(u_i + v_j - c_ij, 0)`; zero for the potentials stored here.
    pub max_dual_violation: T,
    /// `max γ_ij (c_ij - u_i - v_j)`.
    pub max_slackness: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult<T> {
    /// `W_p(μ, ν)`.
    pub value: T,
    /// Optimal LP objective `W_p^p`.
    pub cost: T,
    pub plan: Coupling<T>,
    pub certificate: DualCertificate<T>,
}

fn check_pair<T: Scalar>(mu: &DiscreteMeasure<T>, nu: &DiscreteMeasure<T>, limit: usize) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: nu.dim(),
        });
    }
    for size in [mu.len(), nu.len()] {
        if size > limit {
            return Err(Error::SupportTooLarge { size, limit });
        }
    }
    Ok(())
}

/// Row-major `d^p` between the atoms of `mu` (rows) and `nu` (columns).
pub fn cost_matrix<T: Scalar>(mu: &DiscreteMeasure<T>, nu: &DiscreteMeasure<T>, metric: &GroundMetric<T>) -> Vec<T> {
    mu.points()
        .flat_map(|x| nu.points().map(move |y| metric.cost(x, y)))
        .collect()
}

/// Exact `W_p(μ, ν)` with an optimal coupling and its dual certificate.
pub fn wasserstein_exact<T: Scalar>(
    mu: &DiscreteMeasure<T>,
    nu: &DiscreteMeasure<T>,
    metric: &GroundMetric<T>,
) -> Result<TransportResult<T>> {
    check_pair(mu, nu, MAX_SUPPORT)?;
    let a: Vec<T> = mu.weights().collect();
    let b: Vec<T> = nu.weights().collect();
    let cost = cost_matrix(mu, nu, metric);
    let (m, n) = (a.len(), b.len());
    let sol = simplex::solve(&a, &b, &cost)?;

    // Tighten column potentials so the dual is feasible to the last bit.
    let u = sol.u;
    let v: Vec<T> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| cost[i * n + j] - u[i])
                .fold(T::infinity(), T::min)
        })
        .collect();

    let mut primal = T::zero();
    let mut max_dual_violation = T::zero();
    let mut max_slackness = T::zero();
    for i in 0..m {
        for j in 0..n {
            let c = cost[i * n + j];
            let x = sol.plan[i * n + j];
            let reduced = c - u[i] - v[j];
            primal = primal + x * c;
            max_dual_violation = max_dual_violation.max(-reduced);
            max_slackness = max_slackness.max(x * reduced);
        }
    }
    let dual = a.iter().zip(&u).map(|(w, p)| *w * *p).sum::<T>()
        + b.iter().zip(&v).map(|(w, p)| *w * *p).sum::<T>();
    let gap = (primal - dual).abs();

    let scale = cost.iter().fold(T::one(), |acc, &c| acc.max(c));
    let tol_floor = T::epsilon() * T::lit(1e4);
    if gap > T::lit(DUALITY_GAP_TOL).max(tol_floor) * scale
        || max_slackness > T::lit(SLACKNESS_TOL).max(tol_floor) * scale
    {
        return Err(Error::Certificate(format!(
            "duality gap {gap}, complementary slackness {max_slackness}"
        )));
    }

    let plan = (0..m)
        .map(|i| sol.plan[i * n..(i + 1) * n].to_vec())
        .collect();
    Ok(TransportResult {
        value: metric.root(primal),
        cost: primal,
        plan: Coupling {
            rows: mu.points().cloned().collect(),
            cols: nu.points().cloned().collect(),
            plan,
        },
        certificate: DualCertificate {
            u,
            v,
            primal,
            dual,
            gap,
            max_dual_violation: max_dual_violation.max(T::zero()),
            max_slackness,
        },
    })
}

/// `W_p(μ, ν)` by enumerating every vertex of the transportation polytope.
///
/// Independent of the simplex solver; only for supports of at most
/// [`VERTEX_ENUMERATION_LIMIT`] atoms.
pub fn wasserstein_by_vertex_enumeration<T: Scalar>(
    mu: &DiscreteMeasure<T>,
    nu: &DiscreteMeasure<T>,
    metric: &GroundMetric<T>,
) -> Result<T> {
    check_pair(mu, nu, VERTEX_ENUMERATION_LIMIT)?;
    let a: Vec<T> = mu.weights().collect();
    let b: Vec<T> = nu.weights().collect();
    let (best, _) = vertex::min_cost_over_vertices(&a, &b, &cost_matrix(mu, nu, metric));
    Ok(metric.root(best))
}

/// Nearest point of `range` to `y`; ties go to the lexicographically smallest.
pub fn project_point<T: Scalar>(y: &Point<T>, range: &[Point<T>], metric: &GroundMetric<T>) -> Result<Point<T>> {
    let mut best: Option<(&Point<T>, T)> = None;
    for z in range {
        let d = metric.distance(z, y);
        best = match best {
            None => Some((z, d)),
            Some((b, bd)) if d < bd || (d == bd && z.lex_cmp(b).is_lt()) => Some((z, d)),
            keep => keep,
        };
    }
    best.map(|(z, _)| z.clone()).ok_or(Error::EmptyRange)
}

/// Pushforward of `rho_y` under [`project_point`].
pub fn projection_pushforward<T: Scalar>(
    rho_y: &DiscreteMeasure<T>,
    range: &[Point<T>],
    metric: &GroundMetric<T>,
) -> Result<DiscreteMeasure<T>> {
    let points = rho_y
        .points()
        .map(|y| project_point(y, range, metric))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(points, rho_y.weights().collect())
}

/// `(Σ_y ρ_y(y) d(y, P y)^p)^{1/p}`: the optimal Wasserstein objective.
pub fn predicted_wasserstein_min<T: Scalar>(
    rho_y: &DiscreteMeasure<T>,
    range: &[Point<T>],
    metric: &GroundMetric<T>,
) -> Result<T> {
    let mut total = T::zero();
    for atom in rho_y.atoms() {
        let z = project_point(&atom.point, range, metric)?;
        total = total + atom.weight * metric.cost(&atom.point, &z);
    }
    Ok(metric.root(total))
}
