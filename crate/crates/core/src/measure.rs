//! Finitely supported probability measures and tabulated forward maps.
//!
//! A [`DiscreteMeasure`] is a list of atoms (point, weight) whose weights sum
//! to one. Atoms are kept sorted lexicographically by coordinates, and two
//! points closer than [`POINT_TOL`] in every coordinate are the same atom.
//! Every membership test in the crate goes through [`Point::approx_eq`], so
//! "is this atom in the range" has a single meaning everywhere.
//!
//! A [`ForwardMap`] is a finite table `theta -> G(theta)`. Its range is the
//! deduplicated, sorted image set; that sorted order is the canonical order
//! used for tie-breaking downstream.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, POINT_TOL, WEIGHT_TOL};

/// A point of `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T>(Vec<T>);

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    /// One-dimensional point. Panics on a non-finite value.
    pub fn scalar(x: T) -> Self {
        Point::new(vec![x]).expect("finite scalar point")
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<T> {
        self.0
    }

    /// Same atom: equal dimension and every coordinate within [`POINT_TOL`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        let tol = T::lit(POINT_TOL);
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (*a - *b).abs() <= tol)
    }

    /// Lexicographic order on coordinates.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b) {
                Some(Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }
}

/// Index of the first point in `set` that is the same atom as `p`.
pub fn find_point<T: Scalar>(set: &[Point<T>], p: &Point<T>) -> Option<usize> {
    set.iter().position(|q| q.approx_eq(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub point: Point<T>,
    pub weight: T,
}

/// Finitely supported probability measure on `R^dim`.
///
/// Invariants: weights are positive and sum to one (to rounding), points are
/// pairwise distinct under [`Point::approx_eq`], atoms are sorted
/// lexicographically. Zero-weight atoms are dropped at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    dim: usize,
    atoms: Vec<Atom<T>>,
}

impl<T: Scalar> DiscreteMeasure<T> {
    /// Builds a measure from parallel lists of points and unnormalized weights.
    ///
    /// Weights in `[-1e-12, 0)` are clamped to zero, duplicate points are
    /// merged by adding their weights, and the result is renormalized unless it
    /// already sums to one up to rounding.
    pub fn new(points: Vec<Point<T>>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch(points.len(), weights.len()));
        }
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        let dim = points[0].dim();
        let mut entries = Vec::with_capacity(points.len());
        for (p, w) in points.into_iter().zip(weights) {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            if !w.is_finite() {
                return Err(Error::NonFinite);
            }
            if w < -T::lit(WEIGHT_TOL) {
                return Err(Error::NegativeWeight(w.as_f64()));
            }
            entries.push((p, w.max(T::zero())));
        }
        Self::assemble(dim, entries)
    }

    /// Unit mass at a single point.
    pub fn dirac(point: Point<T>) -> Self {
        DiscreteMeasure {
            dim: point.dim(),
            atoms: vec![Atom {
                point,
                weight: T::one(),
            }],
        }
    }

    /// Merges duplicates, drops zero weights, renormalizes and sorts.
    fn assemble(dim: usize, entries: Vec<(Point<T>, T)>) -> Result<Self> {
        let mut merged: Vec<Atom<T>> = Vec::with_capacity(entries.len());
        for (point, weight) in entries {
            match merged.iter_mut().find(|a| a.point.approx_eq(&point)) {
                Some(a) => a.weight = a.weight + weight,
                None => merged.push(Atom { point, weight }),
            }
        }
        let total: T = merged.iter().map(|a| a.weight).sum();
        if !total.is_finite() || total <= T::zero() {
            return Err(Error::InvalidTotalMass(total.as_f64()));
        }
        merged.retain(|a| a.weight > T::zero());
        // Weights that already sum to one up to summation rounding are kept
        // as given, so a measure read back from a file is bit-identical.
        let rounding = T::epsilon() * T::from_usize(merged.len() + 1).expect("atom count fits");
        if (total - T::one()).abs() > rounding {
            for a in &mut merged {
                a.weight = a.weight / total;
            }
        }
        merged.sort_by(|a, b| a.point.lex_cmp(&b.point));
        Ok(DiscreteMeasure { dim, atoms: merged })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point<T>> {
        self.atoms.iter().map(|a| &a.point)
    }

    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.atoms.iter().map(|a| a.weight)
    }

    pub fn total_mass(&self) -> T {
        self.weights().sum()
    }

    /// Weight of the atom at `p`, zero when `p` is not in the support.
    pub fn weight_at(&self, p: &Point<T>) -> T {
        self.atoms
            .iter()
            .find(|a| a.point.approx_eq(p))
            .map_or(T::zero(), |a| a.weight)
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Self, alpha: T) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(Error::InvalidMass(alpha.as_f64()));
        }
        let entries = self
            .atoms
            .iter()
            .map(|a| (a.point.clone(), alpha * a.weight))
            .chain(
                other
                    .atoms
                    .iter()
                    .map(|a| (a.point.clone(), (T::one() - alpha) * a.weight)),
            )
            .collect();
        Self::assemble(self.dim, entries)
    }

    /// Total variation distance `1/2 * sum |p - q|` over the union of supports.
    pub fn tv_distance(&self, other: &Self) -> T {
        let (p, q) = aligned_weights(self, other);
        let half = T::lit(0.5);
        half * p.iter().zip(&q).map(|(a, b)| (*a - *b).abs()).sum::<T>()
    }

    /// Same support (under the point predicate) and every weight within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let (p, q) = aligned_weights(self, other);
        self.dim == other.dim && p.iter().zip(&q).all(|(a, b)| (*a - *b).abs() <= tol)
    }
}

/// Weights of `p` and `q` on the union of their supports, in a shared order.
///
/// Atoms of `q` are matched to atoms of `p` with the artifact-wide point
/// predicate; unmatched atoms receive weight zero on the other side.
pub fn aligned_weights<T: Scalar>(
    p: &DiscreteMeasure<T>,
    q: &DiscreteMeasure<T>,
) -> (Vec<T>, Vec<T>) {
    let mut pw: Vec<T> = p.weights().collect();
    let mut qw = vec![T::zero(); pw.len()];
    for atom in q.atoms() {
        match p.atoms().iter().position(|a| a.point.approx_eq(&atom.point)) {
            Some(i) => qw[i] = qw[i] + atom.weight,
            None => {
                pw.push(T::zero());
                qw.push(atom.weight);
            }
        }
    }
    (pw, qw)
}

/// Tabulated forward map `theta_i -> G(theta_i)` together with its range.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardMap<T> {
    domain_dim: usize,
    codomain_dim: usize,
    thetas: Vec<Point<T>>,
    images: Vec<Point<T>>,
    range: Vec<Point<T>>,
    // range index of each theta
    image_index: Vec<usize>,
    // theta indices of each range point, ascending
    preimages: Vec<Vec<usize>>,
}

impl<T: Scalar> ForwardMap<T> {
    pub fn new(pairs: Vec<(Point<T>, Point<T>)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyMap);
        }
        let domain_dim = pairs[0].0.dim();
        let codomain_dim = pairs[0].1.dim();
        let mut thetas: Vec<Point<T>> = Vec::with_capacity(pairs.len());
        let mut images = Vec::with_capacity(pairs.len());
        for (i, (theta, image)) in pairs.into_iter().enumerate() {
            if theta.dim() != domain_dim {
                return Err(Error::DimensionMismatch {
                    expected: domain_dim,
                    got: theta.dim(),
                });
            }
            if image.dim() != codomain_dim {
                return Err(Error::DimensionMismatch {
                    expected: codomain_dim,
                    got: image.dim(),
                });
            }
            if find_point(&thetas, &theta).is_some() {
                return Err(Error::DuplicateTheta(i));
            }
            thetas.push(theta);
            images.push(image);
        }

        let mut range: Vec<Point<T>> = Vec::new();
        let mut first_index = Vec::with_capacity(images.len());
        for image in &images {
            let idx = match find_point(&range, image) {
                Some(k) => k,
                None => {
                    range.push(image.clone());
                    range.len() - 1
                }
            };
            first_index.push(idx);
        }
        let mut order: Vec<usize> = (0..range.len()).collect();
        order.sort_by(|&a, &b| range[a].lex_cmp(&range[b]));
        let mut rank = vec![0; range.len()];
        for (pos, &old) in order.iter().enumerate() {
            rank[old] = pos;
        }
        let range: Vec<Point<T>> = order.iter().map(|&k| range[k].clone()).collect();
        let image_index: Vec<usize> = first_index.iter().map(|&k| rank[k]).collect();
        let mut preimages = vec![Vec::new(); range.len()];
        for (theta_idx, &r) in image_index.iter().enumerate() {
            preimages[r].push(theta_idx);
        }

        Ok(ForwardMap {
            domain_dim,
            codomain_dim,
            thetas,
            images,
            range,
            image_index,
            preimages,
        })
    }

    /// Tabulates `f` on the given domain points.
    pub fn from_fn<F>(thetas: Vec<Point<T>>, f: F) -> Result<Self>
    where
        F: Fn(&Point<T>) -> Point<T>,
    {
        let pairs = thetas
            .into_iter()
            .map(|t| {
                let image = f(&t);
                (t, image)
            })
            .collect();
        Self::new(pairs)
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[Point<T>] {
        &self.thetas
    }

    pub fn images(&self) -> &[Point<T>] {
        &self.images
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Point<T>, &Point<T>)> {
        self.thetas.iter().zip(&self.images)
    }

    /// Deduplicated image set in lexicographic order.
    pub fn range(&self) -> &[Point<T>] {
        &self.range
    }

    /// Range index of the image of input `theta_idx`.
    pub fn image_index(&self, theta_idx: usize) -> usize {
        self.image_index[theta_idx]
    }

    /// Input indices mapping to range point `range_idx`, in input order.
    pub fn preimages(&self, range_idx: usize) -> &[usize] {
        &self.preimages[range_idx]
    }

    pub fn theta_index(&self, p: &Point<T>) -> Option<usize> {
        find_point(&self.thetas, p)
    }

    pub fn range_index(&self, p: &Point<T>) -> Option<usize> {
        find_point(&self.range, p)
    }

    /// Measure on the range with the given per-range-point weights.
    pub(crate) fn range_measure(&self, weights: &[T]) -> Result<DiscreteMeasure<T>> {
        DiscreteMeasure::new(self.range.clone(), weights.to_vec())
    }
}

/// Builds a measure; see [`DiscreteMeasure::new`].
pub fn make_measure<T: Scalar>(points: Vec<Point<T>>, weights: Vec<T>) -> Result<DiscreteMeasure<T>> {
    DiscreteMeasure::new(points, weights)
}

pub fn dirac<T: Scalar>(point: Point<T>) -> DiscreteMeasure<T> {
    DiscreteMeasure::dirac(point)
}

/// `G # rho_x`: each range point collects the mass of its preimages.
pub fn pushforward<T: Scalar>(
    map: &ForwardMap<T>,
    rho_x: &DiscreteMeasure<T>,
) -> Result<DiscreteMeasure<T>> {
    if rho_x.dim() != map.domain_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.domain_dim(),
            got: rho_x.dim(),
        });
    }
    let mut mass = vec![T::zero(); map.range().len()];
    for (i, atom) in rho_x.atoms().iter().enumerate() {
        let theta = map.theta_index(&atom.point).ok_or(Error::UnmappedAtom(i))?;
        let r = map.image_index(theta);
        mass[r] = mass[r] + atom.weight;
    }
    map.range_measure(&mass)
}

pub fn range_of<T: Scalar>(map: &ForwardMap<T>) -> Vec<Point<T>> {
    map.range().to_vec()
}

/// `(nu1, nu0)`: mass of `rho_y` on the range and off it. `nu0 = 1 - nu1`.
pub fn mass_in_range<T: Scalar>(rho_y: &DiscreteMeasure<T>, range: &[Point<T>]) -> (T, T) {
    let nu1: T = rho_y
        .atoms()
        .iter()
        .filter(|a| find_point(range, &a.point).is_some())
        .map(|a| a.weight)
        .sum();
    let nu1 = nu1.min(T::one());
    (nu1, T::one() - nu1)
}

/// Restriction of `rho_y` to the range, renormalized by `nu1`.
pub fn conditional_restrict<T: Scalar>(
    rho_y: &DiscreteMeasure<T>,
    range: &[Point<T>],
) -> Result<DiscreteMeasure<T>> {
    let (nu1, _) = mass_in_range(rho_y, range);
    if nu1.is_nan() || nu1 <= T::zero() {
        return Err(Error::ZeroMassOnRange);
    }
    let atoms: Vec<Atom<T>> = rho_y
        .atoms()
        .iter()
        .filter(|a| find_point(range, &a.point).is_some())
        .map(|a| Atom {
            point: a.point.clone(),
            weight: a.weight / nu1,
        })
        .collect();
    // Atoms are a sorted subset of a valid measure; only the scaling changed.
    Ok(DiscreteMeasure {
        dim: rho_y.dim(),
        atoms,
    })
}

/// Pulls a measure on the range back to the domain through the canonical
/// left inverse: each range atom goes entirely to its first preimage.
pub fn left_inverse_pullback<T: Scalar>(
    map: &ForwardMap<T>,
    rho_prime: &DiscreteMeasure<T>,
) -> Result<DiscreteMeasure<T>> {
    if rho_prime.dim() != map.codomain_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.codomain_dim(),
            got: rho_prime.dim(),
        });
    }
    let mut points = Vec::with_capacity(rho_prime.len());
    let mut weights = Vec::with_capacity(rho_prime.len());
    for (i, atom) in rho_prime.atoms().iter().enumerate() {
        let r = map.range_index(&atom.point).ok_or(Error::AtomOutsideRange(i))?;
        let theta = map.preimages(r)[0];
        points.push(map.thetas()[theta].clone());
        weights.push(atom.weight);
    }
    DiscreteMeasure::new(points, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(x: f64) -> Point<f64> {
        Point::scalar(x)
    }

    fn line(xs: &[f64], ws: &[f64]) -> DiscreteMeasure<f64> {
        make_measure(xs.iter().map(|&x| p1(x)).collect(), ws.to_vec()).unwrap()
    }

    fn square_map() -> ForwardMap<f64> {
        ForwardMap::from_fn(vec![p1(-1.0), p1(0.0), p1(1.0)], |t| {
            p1(t.coords()[0] * t.coords()[0])
        })
        .unwrap()
    }

    fn identity_map() -> ForwardMap<f64> {
        ForwardMap::from_fn(vec![p1(0.0), p1(1.0)], |t| t.clone()).unwrap()
    }

    #[test]
    fn make_measure_examples() {
        let m = line(&[0.0, 1.0, 2.0], &[0.3, 0.3, 0.4]);
        assert_eq!(m.len(), 3);
        assert!((m.total_mass() - 1.0).abs() < 1e-12);

        let m = line(&[0.0, 0.0, 1.0], &[0.2, 0.1, 0.7]);
        assert_eq!(m.len(), 2);
        assert!((m.weight_at(&p1(0.0)) - 0.3).abs() < 1e-15);
        assert!((m.weight_at(&p1(1.0)) - 0.7).abs() < 1e-15);

        let m = line(&[0.0, 1.0], &[2.0, 6.0]);
        assert_eq!(m.atoms()[0].weight, 0.25);
        assert_eq!(m.atoms()[1].weight, 0.75);
    }

    #[test]
    fn make_measure_errors() {
        assert_eq!(make_measure::<f64>(vec![], vec![]), Err(Error::EmptySupport));
        assert!(matches!(
            make_measure(vec![p1(0.0), p1(1.0)], vec![1.0, -0.1]),
            Err(Error::NegativeWeight(_))
        ));
        let two_d = Point::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            make_measure(vec![p1(0.0), two_d], vec![0.5, 0.5]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            make_measure(vec![p1(0.0)], vec![0.0]),
            Err(Error::InvalidTotalMass(_))
        ));
        // rounding noise is clamped, not rejected
        let m = make_measure(vec![p1(0.0), p1(1.0)], vec![1.0, -1e-13]).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn atoms_sorted_and_near_duplicates_merged() {
        let pts = vec![
            Point::new(vec![1.0, 0.0]).unwrap(),
            Point::new(vec![0.0, 5.0]).unwrap(),
            Point::new(vec![0.0, 5.0 + 1e-10]).unwrap(),
        ];
        let m = make_measure(pts, vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.atoms()[0].point.coords(), &[0.0, 5.0]);
        assert!((m.atoms()[0].weight - 0.75f64).abs() < 1e-15);
    }

    #[test]
    fn pushforward_examples() {
        let map = square_map();
        let uniform = line(&[-1.0, 0.0, 1.0], &[1.0, 1.0, 1.0]);
        let push = pushforward(&map, &uniform).unwrap();
        assert_eq!(push.len(), 2);
        assert!((push.weight_at(&p1(0.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((push.weight_at(&p1(1.0)) - 2.0 / 3.0).abs() < 1e-15);

        let rho = line(&[0.0, 1.0], &[0.2, 0.8]);
        assert_eq!(pushforward(&identity_map(), &rho).unwrap(), rho);

        let push = pushforward(&map, &dirac(p1(1.0))).unwrap();
        assert_eq!(push, dirac(p1(1.0)));
    }

    #[test]
    fn pushforward_rejects_unmapped_atoms() {
        let rho = line(&[0.0, 7.0], &[0.5, 0.5]);
        assert_eq!(pushforward(&square_map(), &rho), Err(Error::UnmappedAtom(1)));
    }

    #[test]
    fn range_examples() {
        assert_eq!(range_of(&square_map()), vec![p1(0.0), p1(1.0)]);
        assert_eq!(range_of(&identity_map()), vec![p1(0.0), p1(1.0)]);
        let diag = ForwardMap::from_fn(vec![p1(1.0), p1(0.0)], |t| {
            Point::new(vec![t.coords()[0], t.coords()[0]]).unwrap()
        })
        .unwrap();
        assert_eq!(
            range_of(&diag),
            vec![
                Point::new(vec![0.0, 0.0]).unwrap(),
                Point::new(vec![1.0, 1.0]).unwrap()
            ]
        );
        assert_eq!(square_map().preimages(1), &[0, 2]);
    }

    #[test]
    fn forward_map_errors() {
        assert_eq!(ForwardMap::<f64>::new(vec![]), Err(Error::EmptyMap));
        let dup = vec![(p1(0.0), p1(0.0)), (p1(1e-12), p1(1.0))];
        assert_eq!(ForwardMap::new(dup), Err(Error::DuplicateTheta(1)));
    }

    #[test]
    fn mass_in_range_examples() {
        let range = vec![p1(0.0), p1(1.0)];
        let (nu1, nu0) = mass_in_range(&line(&[0.0, 1.0, 2.0], &[0.3, 0.3, 0.4]), &range);
        assert!((nu1 - 0.6).abs() < 1e-15 && (nu0 - 0.4).abs() < 1e-15);
        assert_eq!(mass_in_range(&line(&[0.0, 1.0], &[0.5, 0.5]), &range), (1.0, 0.0));
        assert_eq!(mass_in_range(&line(&[3.0, 4.0], &[0.5, 0.5]), &range), (0.0, 1.0));
    }

    #[test]
    fn conditional_restrict_examples() {
        let range = vec![p1(0.0), p1(1.0)];
        let c = conditional_restrict(&line(&[0.0, 1.0, 2.0], &[0.3, 0.3, 0.4]), &range).unwrap();
        assert!(c.approx_eq(&line(&[0.0, 1.0], &[0.5, 0.5]), 1e-15));

        let inside = line(&[0.0, 1.0], &[0.1, 0.9]);
        assert!(conditional_restrict(&inside, &range).unwrap().approx_eq(&inside, 1e-15));

        let c = conditional_restrict(&line(&[0.0, 5.0], &[0.1, 0.9]), &[p1(0.0)]).unwrap();
        assert_eq!(c, dirac(p1(0.0)));

        assert_eq!(
            conditional_restrict(&line(&[5.0], &[1.0]), &range),
            Err(Error::ZeroMassOnRange)
        );
    }

    #[test]
    fn left_inverse_examples() {
        let map = square_map();
        let rho_prime = line(&[0.0, 1.0], &[1.0 / 3.0, 2.0 / 3.0]);
        let rho_x = left_inverse_pullback(&map, &rho_prime).unwrap();
        assert!(rho_x.approx_eq(&line(&[-1.0, 0.0], &[2.0 / 3.0, 1.0 / 3.0]), 1e-15));
        assert!(pushforward(&map, &rho_x).unwrap().approx_eq(&rho_prime, 1e-15));

        let rho = line(&[0.0, 1.0], &[0.4, 0.6]);
        assert_eq!(left_inverse_pullback(&identity_map(), &rho).unwrap(), rho);

        let unique = left_inverse_pullback(&map, &dirac(p1(0.0))).unwrap();
        assert_eq!(unique, dirac(p1(0.0)));

        assert_eq!(
            left_inverse_pullback(&map, &line(&[0.0, 4.0], &[0.5, 0.5])),
            Err(Error::AtomOutsideRange(1))
        );
    }

    #[test]
    fn dirac_examples() {
        let d = dirac(p1(0.0));
        assert_eq!(d.len(), 1);
        assert_eq!(d.atoms()[0].weight, 1.0);
        let d2 = dirac(Point::new(vec![1.0, 2.0]).unwrap());
        assert_eq!(d2.dim(), 2);
        let pushed = pushforward(&square_map(), &dirac(p1(-1.0))).unwrap();
        assert_eq!(pushed, dirac(p1(1.0)));
    }

    #[test]
    fn point_rejects_non_finite() {
        assert_eq!(Point::new(vec![f64::NAN]), Err(Error::NonFinite));
        assert_eq!(Point::<f64>::new(vec![]), Err(Error::ZeroDimension));
    }

    #[test]
    fn works_in_single_precision() {
        let m = make_measure(vec![Point::scalar(0.0f32), Point::scalar(1.0)], vec![1.0, 3.0]).unwrap();
        assert_eq!(m.atoms()[1].weight, 0.75f32);
    }
}
