//! Exhaustive vertex enumeration of the transportation polytope.
//!
//! Every vertex is the unique flow supported on some spanning tree of the
//! bipartite row/column graph. Enumerating all spanning trees of `K_{m,n}`
//! is only feasible for tiny supports, so this is an independent check on
//! the simplex solver rather than a production path.

use crate::scalar::Scalar;

/// Largest support size accepted on either side.
pub const VERTEX_ENUMERATION_LIMIT: usize = 5;

/// Minimum of `Σ c_ij x_ij` over all vertices of the polytope with row sums
/// `a` and column sums `b`, together with the number of feasible trees seen.
pub(crate) fn min_cost_over_vertices<T: Scalar>(a: &[T], b: &[T], cost: &[T]) -> (T, usize) {
    let (m, n) = (a.len(), b.len());
    let mut search = Search {
        m,
        n,
        a,
        b,
        cost,
        chosen: Vec::with_capacity(m + n - 1),
        best: T::infinity(),
        feasible: 0,
    };
    let parent: Vec<usize> = (0..m + n).collect();
    search.extend(0, &parent);
    (search.best, search.feasible)
}

struct Search<'a, T> {
    m: usize,
    n: usize,
    a: &'a [T],
    b: &'a [T],
    cost: &'a [T],
    chosen: Vec<usize>,
    best: T,
    feasible: usize,
}

fn root(parent: &[usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

impl<T: Scalar> Search<'_, T> {
    fn extend(&mut self, start: usize, parent: &[usize]) {
        let need = self.m + self.n - 1;
        if self.chosen.len() == need {
            self.evaluate();
            return;
        }
        let cells = self.m * self.n;
        for cell in start..cells {
            if cells - cell < need - self.chosen.len() {
                break;
            }
            let (i, j) = (cell / self.n, cell % self.n);
            let (ri, rj) = (root(parent, i), root(parent, self.m + j));
            if ri == rj {
                continue;
            }
            let mut next = parent.to_vec();
            next[ri] = rj;
            self.chosen.push(cell);
            self.extend(cell + 1, &next);
            self.chosen.pop();
        }
    }

    /// Solves the tree flow by peeling leaves; keeps it if nonnegative.
    fn evaluate(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut residual: Vec<T> = self.a.iter().chain(self.b).copied().collect();
        let mut degree = vec![0usize; m + n];
        for &c in &self.chosen {
            degree[c / n] += 1;
            degree[m + c % n] += 1;
        }
        let mut alive = vec![true; self.chosen.len()];
        let mut total = T::zero();
        let tol = T::lit(1e-12);
        for _ in 0..self.chosen.len() {
            let Some((k, leaf)) = self.chosen.iter().enumerate().find_map(|(k, &c)| {
                if !alive[k] {
                    return None;
                }
                let (r, col) = (c / n, m + c % n);
                if degree[r] == 1 {
                    Some((k, r))
                } else if degree[col] == 1 {
                    Some((k, col))
                } else {
                    None
                }
            }) else {
                return;
            };
            let c = self.chosen[k];
            let (r, col) = (c / n, m + c % n);
            let other = if leaf == r { col } else { r };
            let x = residual[leaf];
            if x < -tol {
                return;
            }
            residual[other] = residual[other] - x;
            residual[leaf] = T::zero();
            degree[r] -= 1;
            degree[col] -= 1;
            alive[k] = false;
            total = total + x.max(T::zero()) * self.cost[c];
        }
        self.feasible += 1;
        if total < self.best {
            self.best = total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_all_spanning_trees_of_k22() {
        // K_{2,2} has 4 spanning trees; with uniform marginals every one is feasible
        let (best, feasible) = min_cost_over_vertices(&[0.5, 0.5], &[0.5, 0.5], &[4.0, 1.0, 1.0, 4.0]);
        assert_eq!(feasible, 4);
        assert!((best - 1.0f64).abs() < 1e-15);
    }
}
