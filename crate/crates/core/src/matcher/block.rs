//! Exhaustive search over block permutations of seed-contiguous matrices.
//!
//! With `n = d * m` and groups of `m` consecutive indices, conjugating by the
//! expansion `Q = Q~ (x) I_m` of a `d x d` permutation moves whole groups. The
//! Frobenius objective then only needs the `d^4` block inner products
//! `G[p, q, a, b] = sum_{s,t} M1[(p,s),(q,t)] * M2[(a,s),(b,t)]`, after which
//! each candidate costs `O(d^2)`.

use ndarray::Array2;

use crate::assignment::next_permutation;
use crate::error::{Error, Result};
use crate::graphon_model::ProbabilityMatrix;
use crate::permutation::Permutation;

/// Hard ceiling on the number of seed groups searched exhaustively.
pub const MAX_BLOCKS: usize = 10;

#[derive(Clone, Debug)]
pub struct BlockCostTensor {
    d: usize,
    g: Vec<f64>,
    norm_sq: f64,
}

impl BlockCostTensor {
    pub fn d(&self) -> usize {
        self.d
    }

    /// `G[p, q, a, b]`.
    pub fn get(&self, p: usize, q: usize, a: usize, b: usize) -> f64 {
        let d = self.d;
        self.g[((p * d + q) * d + a) * d + b]
    }

    /// `||Q M1 Q^T - M2||_F^2` for `Q = expand(sigma)`.
    pub fn cost(&self, sigma: &[usize]) -> f64 {
        let mut cross = 0.0;
        for (a, &sa) in sigma.iter().enumerate() {
            for (b, &sb) in sigma.iter().enumerate() {
                cross += self.get(sa, sb, a, b);
            }
        }
        self.norm_sq - 2.0 * cross
    }
}

fn block_dot(x: &Array2<f64>, y: &Array2<f64>, m: usize, blocks: [usize; 4]) -> f64 {
    let [p, q, a, b] = blocks;
    let mut acc = 0.0;
    for s in 0..m {
        let xr = x.row(p * m + s);
        let yr = y.row(a * m + s);
        for t in 0..m {
            acc += xr[q * m + t] * yr[b * m + t];
        }
    }
    acc
}

fn check_layout(m1: &ProbabilityMatrix, m2: &ProbabilityMatrix, d: usize) -> Result<usize> {
    let n = m1.n();
    if m2.n() != n {
        return Err(Error::Size(format!(
            "block search needs equal sizes, got {n} and {}",
            m2.n()
        )));
    }
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::Size(format!("{d} groups do not divide {n} nodes")));
    }
    Ok(n / d)
}

/// Precompute the block inner products in `O(d^2 n^2)`.
pub fn block_cost_tensor(
    m1: &ProbabilityMatrix,
    m2: &ProbabilityMatrix,
    d: usize,
) -> Result<BlockCostTensor> {
    let m = check_layout(m1, m2, d)?;
    let (x, y) = (m1.as_array(), m2.as_array());
    let mut g = vec![0.0; d * d * d * d];
    for p in 0..d {
        for q in 0..d {
            for a in 0..d {
                for b in 0..d {
                    g[((p * d + q) * d + a) * d + b] = block_dot(x, y, m, [p, q, a, b]);
                }
            }
        }
    }
    // same summation order as the cross term of the identity, so that equal
    // inputs give an exact zero
    let mut norm1 = 0.0;
    let mut norm2 = 0.0;
    for a in 0..d {
        for b in 0..d {
            norm1 += block_dot(x, x, m, [a, b, a, b]);
            norm2 += block_dot(y, y, m, [a, b, a, b]);
        }
    }
    Ok(BlockCostTensor {
        d,
        g,
        norm_sq: norm1 + norm2,
    })
}

/// Best permutation with `sigma[0] == first`, in lexicographic order.
fn best_with_prefix(tensor: &BlockCostTensor, first: usize) -> (f64, Vec<usize>) {
    let d = tensor.d;
    let mut rest: Vec<usize> = (0..d).filter(|&v| v != first).collect();
    let mut sigma = vec![first; d];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        sigma[1..].copy_from_slice(&rest);
        let cost = tensor.cost(&sigma);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, sigma.clone()));
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    best.expect("at least one permutation")
}

/// Exhaustive minimization of `||Q M1 Q^T - M2||_F^2` over all `d!` block
/// permutations. Exact comparisons; ties go to the lexicographically smallest
/// `sigma`. The returned cost is clamped at zero against rounding.
pub fn enumerate_block_permutation(
    m1: &ProbabilityMatrix,
    m2: &ProbabilityMatrix,
    d: usize,
    d_max: usize,
) -> Result<(Permutation, f64)> {
    let limit = d_max.min(MAX_BLOCKS);
    if d > limit {
        return Err(Error::Size(format!(
            "exhaustive block search over {d}! permutations exceeds the limit d <= {limit}"
        )));
    }
    let tensor = block_cost_tensor(m1, m2, d)?;
    let (sigma, cost) = search(&tensor);
    Ok((Permutation::from_vec_unchecked(sigma), cost.max(0.0)))
}

pub(crate) fn search(tensor: &BlockCostTensor) -> (Vec<usize>, f64) {
    let d = tensor.d;
    #[cfg(feature = "parallel")]
    let per_prefix: Vec<(f64, Vec<usize>)> = {
        use rayon::prelude::*;
        (0..d)
            .into_par_iter()
            .map(|f| best_with_prefix(tensor, f))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_prefix: Vec<(f64, Vec<usize>)> = (0..d).map(|f| best_with_prefix(tensor, f)).collect();

    // prefixes are visited in increasing order, so a strict comparison keeps
    // the lexicographically smallest optimum
    let mut best = per_prefix[0].clone();
    for cand in per_prefix.into_iter().skip(1) {
        if cand.0 < best.0 {
            best = cand;
        }
    }
    (best.1, best.0)
}

/// `perm[g * m + s] = q_tilde[g] * m + s`: group `g` moves wholesale to
/// group `q_tilde[g]`. Its matrix is `Q~ (x) I_m`.
pub fn expand_block_permutation(q_tilde: &Permutation, m: usize) -> Permutation {
    let perm = q_tilde
        .as_slice()
        .iter()
        .flat_map(|&g| (0..m).map(move |s| g * m + s))
        .collect();
    Permutation::from_vec_unchecked(perm)
}
