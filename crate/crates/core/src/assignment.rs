//! Exact minimum-cost linear assignment.
//!
//! [`solve_assignment`] runs the shortest-augmenting-path Hungarian method in
//! `O(n^3)` and then walks the optimal face of the assignment polytope to
//! return the lexicographically smallest optimal permutation, so the result
//! does not depend on incidental choices inside the solver.

use std::collections::VecDeque;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Square matrix of finite costs.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix(Array2<f64>);

impl CostMatrix {
    pub fn new(costs: Array2<f64>) -> Result<Self> {
        let (rows, cols) = costs.dim();
        if rows != cols {
            return Err(Error::Input(format!(
                "cost matrix must be square, got {rows}x{cols}"
            )));
        }
        if let Some(((i, j), v)) = costs.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Input(format!("cost [{i}, {j}] = {v} is not finite")));
        }
        Ok(Self(costs))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("cost rows must all have length n".into()));
        }
        let flat = rows.iter().flatten().copied().collect();
        Self::new(Array2::from_shape_vec((n, n), flat).expect("checked shape"))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    /// `sum_i C[i, perm[i]]`, accumulated in row order.
    pub fn total(&self, perm: &[usize]) -> f64 {
        perm.iter()
            .enumerate()
            .map(|(i, &j)| self.0[[i, j]])
            .sum()
    }
}

/// Minimum-cost assignment of rows to columns. Among optimal permutations the
/// lexicographically smallest `perm` vector is returned.
pub fn solve_assignment(costs: &CostMatrix) -> (Permutation, f64) {
    let n = costs.n();
    if n == 0 {
        return (Permutation::identity(0), 0.0);
    }
    let (mut assign, u, v) = hungarian(costs.as_array());
    lexicographic_refinement(costs, &mut assign, &u, &v);
    let total = costs.total(&assign);
    (Permutation::from_vec_unchecked(assign), total)
}

/// Shortest augmenting path Hungarian method. Returns the row-to-column
/// assignment and the dual potentials, with reduced costs
/// `C[i, j] - u[i] - v[j] >= 0` (up to rounding) and equality on the assignment.
fn hungarian(c: &Array2<f64>) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = c.nrows();
    let c = c.as_slice().map(|s| s.to_vec()).unwrap_or_else(|| c.iter().copied().collect());
    // index 0 is a virtual column; real column j lives at j + 1
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![usize::MAX; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_slack = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for row in 0..n {
        owner[0] = row;
        let mut j0 = 0;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let ci = &c[i0 * n..(i0 + 1) * n];
            let ui = u[i0 + 1];
            let mut delta = f64::INFINITY;
            let mut j1 = usize::MAX;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = ci[j - 1] - ui - v[j];
                if cur < min_slack[j] {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j] + 1] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == usize::MAX {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[owner[j]] = j - 1;
    }
    (assign, u[1..].to_vec(), v[1..].to_vec())
}

/// Move to the lexicographically smallest optimal assignment.
///
/// Optimal assignments are exactly the perfect matchings that use only tight
/// edges of an optimal dual. Rows are fixed greedily in order: row `i` takes
/// the smallest tight column that still admits a perfect matching of the
/// unfixed rows, found as an alternating path. Tightness is judged with a
/// small tolerance, and every move is accepted only if the exactly evaluated
/// total does not increase.
fn lexicographic_refinement(costs: &CostMatrix, assign: &mut [usize], u: &[f64], v: &[f64]) {
    let c = costs.as_array();
    let n = assign.len();
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * (1.0 + scale);
    let tight = |i: usize, j: usize| c[[i, j]] - u[i] - v[j] <= tol;

    let mut owner = vec![0; n];
    for (i, &j) in assign.iter().enumerate() {
        owner[j] = i;
    }
    let mut total = costs.total(assign);

    for i in 0..n {
        let target = assign[i];
        for j in 0..target {
            if owner[j] <= i || !tight(i, j) {
                continue;
            }
            let Some(path) = alternating_path(owner[j], target, i, assign, &owner, &tight) else {
                continue;
            };
            let mut candidate = assign.to_vec();
            candidate[i] = j;
            let mut row = owner[j];
            for &col in &path {
                let next = owner[col];
                candidate[row] = col;
                row = next;
            }
            let candidate_total = costs.total(&candidate);
            if candidate_total <= total {
                assign.copy_from_slice(&candidate);
                for (r, &col) in assign.iter().enumerate() {
                    owner[col] = r;
                }
                total = candidate_total;
                break;
            }
        }
    }
}

/// Columns `c1, .., ck = target` such that `start -> c1`, `owner[c1] -> c2`,
/// .. are all tight and every row involved is greater than `fixed`.
fn alternating_path(
    start: usize,
    target: usize,
    fixed: usize,
    assign: &[usize],
    owner: &[usize],
    tight: &impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    let n = assign.len();
    if tight(start, target) {
        return Some(vec![target]);
    }
    // BFS over rows; parent[col] = row that reached col
    let mut parent = vec![usize::MAX; n];
    let mut seen_row = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen_row[start] = true;
    while let Some(r) = queue.pop_front() {
        for col in 0..n {
            if parent[col] != usize::MAX || col == assign[r] || !tight(r, col) {
                continue;
            }
            if col == target {
                parent[col] = r;
                let mut path = vec![target];
                let mut row = r;
                while row != start {
                    let col = assign[row];
                    path.push(col);
                    row = parent[col];
                }
                path.reverse();
                return Some(path);
            }
            let next = owner[col];
            if next <= fixed || seen_row[next] {
                continue;
            }
            parent[col] = r;
            seen_row[next] = true;
            queue.push_back(next);
        }
    }
    None
}

/// Exhaustive search over all `n!` permutations in lexicographic order,
/// keeping the first strict improvement. Limited to `n <= 10`.
pub fn brute_force_assignment(costs: &CostMatrix) -> Result<(Permutation, f64)> {
    let n = costs.n();
    if n > 10 {
        return Err(Error::Size(format!(
            "brute-force assignment is limited to n <= 10, got {n}"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_total = costs.total(&perm);
    while next_permutation(&mut perm) {
        let total = costs.total(&perm);
        if total < best_total {
            best_total = total;
            best.copy_from_slice(&perm);
        }
    }
    Ok((Permutation::from_vec_unchecked(best), best_total))
}

/// Advance to the next permutation in lexicographic order; false after the last.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
