//! Transportation simplex (MODI / stepping-stone) on a dense cost matrix.
//!
//! The basis is a spanning tree of the bipartite row/column graph with
//! exactly `m + n - 1` cells, degenerate zero-flow cells included. Rows are
//! tree nodes `0..m`, columns are nodes `m..m+n`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Consecutive zero-step pivots after which entering cells are chosen by
/// smallest index instead of most negative reduced cost.
const DEGENERATE_STREAK: usize = 32;

#[derive(Debug, Clone)]
pub(crate) struct TransportSolution<T> {
    /// Row-major `m x n` plan.
    pub plan: Vec<T>,
    /// Row potentials; column potentials are recovered by the caller.
    pub u: Vec<T>,
}

struct Basis<T> {
    m: usize,
    n: usize,
    cells: Vec<(usize, usize)>,
    flow: Vec<T>,
    is_basic: Vec<bool>,
}

impl<T: Scalar> Basis<T> {
    /// North-west corner rule. Always yields a spanning tree: when a row and
    /// a column run out together only the row advances, leaving a zero cell.
    fn north_west(a: &[T], b: &[T]) -> Self {
        let (m, n) = (a.len(), b.len());
        let mut ra = a.to_vec();
        let mut rb = b.to_vec();
        let mut flow = vec![T::zero(); m * n];
        let mut is_basic = vec![false; m * n];
        let mut cells = Vec::with_capacity(m + n - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let x = ra[i].min(rb[j]).max(T::zero());
            flow[i * n + j] = x;
            is_basic[i * n + j] = true;
            cells.push((i, j));
            ra[i] = ra[i] - x;
            rb[j] = rb[j] - x;
            if i + 1 == m && j + 1 == n {
                break;
            }
            if j + 1 == n || (i + 1 < m && ra[i] <= rb[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        debug_assert_eq!(cells.len(), m + n - 1);
        Basis {
            m,
            n,
            cells,
            flow,
            is_basic,
        }
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        // node -> (neighbour node, index into cells)
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push((self.m + j, k));
            adj[self.m + j].push((i, k));
        }
        adj
    }

    /// Potentials with `u[0] = 0` and `u_i + v_j = c_ij` on every basic cell.
    fn potentials(&self, cost: &[T], adj: &[Vec<(usize, usize)>]) -> (Vec<T>, Vec<T>) {
        let (m, n) = (self.m, self.n);
        let mut u = vec![T::zero(); m];
        let mut v = vec![T::zero(); n];
        let mut seen = vec![false; m + n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(node) = queue.pop_front() {
            for &(next, _) in &adj[node] {
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                if node < m {
                    let j = next - m;
                    v[j] = cost[node * n + j] - u[node];
                } else {
                    let j = node - m;
                    u[next] = cost[next * n + j] - v[j];
                }
                queue.push_back(next);
            }
        }
        (u, v)
    }

    /// Basic cells on the tree path from column `j` to row `i`, starting at `j`.
    fn tree_path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let total = self.m + self.n;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; total];
        let mut seen = vec![false; total];
        let mut queue = VecDeque::from([i]);
        seen[i] = true;
        let target = self.m + j;
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &(next, k) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, k));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let (prev, k) = parent[node].expect("basis is a spanning tree");
            path.push(k);
            node = prev;
        }
        path
    }
}

/// Solves `min Σ c_ij x_ij` over the transportation polytope with row sums
/// `a` and column sums `b`. Both marginals must be positive and carry equal
/// total mass up to rounding.
pub(crate) fn solve<T: Scalar>(a: &[T], b: &[T], cost: &[T]) -> Result<TransportSolution<T>> {
    let (m, n) = (a.len(), b.len());
    assert_eq!(cost.len(), m * n, "cost matrix shape");
    assert!(m > 0 && n > 0, "empty marginal");

    let scale = cost.iter().fold(T::one(), |acc, &c| acc.max(c.abs()));
    let rc_tol = T::lit(1e-12) * scale;
    let max_pivots = 50 * m * n + 10_000;

    let mut basis = Basis::north_west(a, b);
    let mut pivots = 0;
    let mut degenerate_run = 0;

    loop {
        let adj = basis.adjacency();
        let (u, v) = basis.potentials(cost, &adj);

        let bland = degenerate_run >= DEGENERATE_STREAK;
        let mut entering: Option<(usize, usize)> = None;
        let mut best = -rc_tol;
        'scan: for i in 0..m {
            for j in 0..n {
                if basis.is_basic[i * n + j] {
                    continue;
                }
                let rc = cost[i * n + j] - u[i] - v[j];
                if rc < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = rc;
                }
            }
        }

        let Some((ei, ej)) = entering else {
            let plan = basis.flow.iter().map(|&x| x.max(T::zero())).collect();
            return Ok(TransportSolution { plan, u });
        };

        if pivots >= max_pivots {
            return Err(Error::Certificate(format!(
                "no optimal basis after {pivots} pivots"
            )));
        }

        let path = basis.tree_path(&adj, ei, ej);
        // path[0] touches column ej and loses flow; signs alternate from there
        let mut theta = T::infinity();
        let mut leaving = usize::MAX;
        for (pos, &k) in path.iter().enumerate().step_by(2) {
            let (i, j) = basis.cells[k];
            let x = basis.flow[i * n + j];
            let better = x < theta
                || (x == theta && bland && (i, j) < basis.cells[path[leaving]]);
            if leaving == usize::MAX || better {
                theta = x;
                leaving = pos;
            }
        }
        let theta = theta.max(T::zero());

        for (pos, &k) in path.iter().enumerate() {
            let (i, j) = basis.cells[k];
            let cell = &mut basis.flow[i * n + j];
            *cell = if pos % 2 == 0 { *cell - theta } else { *cell + theta };
        }
        basis.flow[ei * n + ej] = theta;

        let k_out = path[leaving];
        let (li, lj) = basis.cells[k_out];
        basis.flow[li * n + lj] = T::zero();
        basis.is_basic[li * n + lj] = false;
        basis.is_basic[ei * n + ej] = true;
        basis.cells[k_out] = (ei, ej);

        pivots += 1;
        if theta > T::zero() {
            degenerate_run = 0;
        } else {
            degenerate_run += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn north_west_is_spanning_under_simultaneous_exhaustion() {
        let basis = Basis::north_west(&[0.5, 0.5], &[0.5, 0.5]);
        assert_eq!(basis.cells.len(), 3);
        assert_eq!(basis.cells, vec![(0, 0), (1, 0), (1, 1)]);
    }

    #[test]
    fn solves_small_assignment() {
        // optimal is the anti-diagonal
        let cost = [4.0, 1.0, 1.0, 4.0];
        let sol = solve(&[0.5, 0.5], &[0.5, 0.5], &cost).unwrap();
        let value: f64 = sol.plan.iter().zip(&cost).map(|(x, c)| x * c).sum();
        assert!((value - 1.0).abs() < 1e-15);
        assert_eq!(sol.u[0], 0.0);
    }

    #[test]
    fn handles_single_row_and_column() {
        let sol = solve(&[1.0], &[0.2, 0.8], &[3.0, 5.0]).unwrap();
        assert_eq!(sol.plan, vec![0.2, 0.8]);
        let sol = solve(&[0.3, 0.7], &[1.0], &[1.0, 2.0]).unwrap();
        assert_eq!(sol.plan, vec![0.3, 0.7]);
    }
}
