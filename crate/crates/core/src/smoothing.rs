//! Neighborhood smoothing of an adjacency matrix.
//!
//! Nodes `i` and `i'` are compared through the dissimilarity
//! `max_{k != i, i'} |<A_i - A_i', A_k>| / n`. Each node is then averaged with
//! the nodes whose dissimilarity to it falls below its lower empirical
//! `h`-quantile, where `h = min(1, C0 * sqrt(ln n / n))`.
//!
//! All intermediate quantities are integer counts, so the estimate is exactly
//! equivariant under node relabeling and independent of the row schedule.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon_model::{AdjacencyMatrix, ProbabilityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothingConfig {
    pub bandwidth_constant: f64,
    pub symmetrize: bool,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            bandwidth_constant: 1.0,
            symmetrize: true,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_constant > 0.0 && self.bandwidth_constant.is_finite()) {
            return Err(Error::Parameter(format!(
                "bandwidth constant {} must be positive",
                self.bandwidth_constant
            )));
        }
        Ok(())
    }

    /// Neighborhood quantile `h` for a network of `n` nodes.
    pub fn quantile(&self, n: usize) -> f64 {
        let n = n as f64;
        (self.bandwidth_constant * (n.ln() / n).sqrt()).min(1.0)
    }
}

fn check_size(a: &AdjacencyMatrix) -> Result<usize> {
    let n = a.n();
    if n < 3 {
        return Err(Error::Size(format!(
            "neighborhood smoothing needs at least 3 nodes, got {n}"
        )));
    }
    Ok(n)
}

/// Run `f(row_index, row)` over the rows of a row-major `n x width` buffer.
fn for_each_row<T, F>(buf: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        buf.par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        buf.chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
}

/// `S[i, k] = <A_i, A_k>`, the number of common neighbours.
fn common_neighbours(a: &AdjacencyMatrix) -> Vec<i32> {
    let n = a.n();
    let words = n.div_ceil(64);
    let mut bits = vec![0u64; n * words];
    for ((i, j), &v) in a.as_array().indexed_iter() {
        if v != 0 {
            bits[i * words + j / 64] |= 1 << (j % 64);
        }
    }
    let mut s = vec![0i32; n * n];
    for_each_row(&mut s, n, |i, row| {
        let ri = &bits[i * words..(i + 1) * words];
        for (k, out) in row.iter_mut().enumerate() {
            let rk = &bits[k * words..(k + 1) * words];
            *out = ri
                .iter()
                .zip(rk)
                .map(|(x, y)| (x & y).count_ones() as i32)
                .sum();
        }
    });
    s
}

fn max_abs_diff(a: &[i32], b: &[i32]) -> i32 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0, i32::max)
}

/// Integer numerators of the dissimilarity, row-major `n x n`.
fn dissimilarity_counts(a: &AdjacencyMatrix) -> Vec<i32> {
    let n = a.n();
    let s = common_neighbours(a);
    let mut d = vec![0i32; n * n];
    for_each_row(&mut d, n, |i, row| {
        let si = &s[i * n..(i + 1) * n];
        for (j, out) in row.iter_mut().enumerate().skip(i + 1) {
            let sj = &s[j * n..(j + 1) * n];
            *out = max_abs_diff(&si[..i], &sj[..i])
                .max(max_abs_diff(&si[i + 1..j], &sj[i + 1..j]))
                .max(max_abs_diff(&si[j + 1..], &sj[j + 1..]));
        }
    });
    for i in 0..n {
        for j in 0..i {
            d[i * n + j] = d[j * n + i];
        }
    }
    d
}

/// Pairwise node dissimilarity `max_{k not in {i, i'}} |<A_i - A_i', A_k>| / n`.
pub fn column_dissimilarity(a: &AdjacencyMatrix) -> Result<Array2<f64>> {
    let n = check_size(a)?;
    let d = dissimilarity_counts(a);
    let scale = n as f64;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| d[i * n + j] as f64 / scale))
}

/// Neighborhood-smoothing estimate of the edge-probability matrix.
pub fn estimate_probabilities(
    a: &AdjacencyMatrix,
    cfg: &SmoothingConfig,
) -> Result<ProbabilityMatrix> {
    cfg.validate()?;
    let n = check_size(a)?;
    let d = dissimilarity_counts(a);
    let h = cfg.quantile(n);
    // lower quantile: the rank-th smallest of the n - 1 off-diagonal values
    let rank = ((h * (n - 1) as f64).ceil() as usize).clamp(1, n - 1);
    let adj = a.as_array();
    let adj = adj.as_slice().expect("adjacency storage is contiguous");

    let mut raw = vec![0f64; n * n];
    for_each_row(&mut raw, n, |i, row| {
        let di = &d[i * n..(i + 1) * n];
        let mut others: Vec<i32> = di
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        let threshold = *others.select_nth_unstable(rank - 1).1;
        let mut sums = vec![0u32; n];
        let mut size = 0u32;
        for (j, &dij) in di.iter().enumerate() {
            if j == i || dij <= threshold {
                size += 1;
                for (acc, &v) in sums.iter_mut().zip(&adj[j * n..(j + 1) * n]) {
                    *acc += v as u32;
                }
            }
        }
        let size = size as f64;
        for (out, &s) in row.iter_mut().zip(&sums) {
            *out = s as f64 / size;
        }
    });

    let mut w = Array2::from_shape_vec((n, n), raw).expect("n x n buffer");
    if cfg.symmetrize {
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (w[[i, j]] + w[[j, i]]) / 2.0;
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
    }
    // without symmetrization the raw estimate is not symmetric in general
    Ok(ProbabilityMatrix::from_array_unchecked(w))
}

/// `(1/sqrt(n)) * max_k ||W_hat[., k] - W[., k]||_2`.
pub fn max_column_error(w_hat: &ProbabilityMatrix, w: &ProbabilityMatrix) -> Result<f64> {
    let n = w.n();
    if w_hat.n() != n {
        return Err(Error::Size(format!(
            "cannot compare {}x{0} and {n}x{n} matrices",
            w_hat.n()
        )));
    }
    let diff = w_hat.as_array() - w.as_array();
    let worst = diff
        .columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>())
        .fold(0.0, f64::max);
    Ok((worst / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon_model::{build_probability_matrix, sample_adjacency, sample_latents, Graphon};
    use crate::rng::stream;
    use crate::Permutation;
    use proptest::prelude::*;

    fn random_adjacency(n: usize, p: f64, seed: u64) -> AdjacencyMatrix {
        let w = ProbabilityMatrix::new(Array2::from_elem((n, n), p)).unwrap();
        sample_adjacency(&w, &mut stream(seed, "smoothing-test"))
    }

    /// Direct nested-loop evaluation over (i, i', k).
    fn dissimilarity_oracle(a: &AdjacencyMatrix) -> Array2<f64> {
        let a = a.as_array();
        let n = a.nrows();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for i2 in 0..n {
                if i == i2 {
                    continue;
                }
                let mut best = 0.0f64;
                for k in 0..n {
                    if k == i || k == i2 {
                        continue;
                    }
                    let mut dot = 0i64;
                    for l in 0..n {
                        dot += (a[[i, l]] as i64 - a[[i2, l]] as i64) * a[[k, l]] as i64;
                    }
                    best = best.max((dot.abs() as f64) / n as f64);
                }
                out[[i, i2]] = best;
            }
        }
        out
    }

    #[test]
    fn dissimilarity_matches_oracle_on_fixed_matrix() {
        let a = AdjacencyMatrix::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)]).unwrap();
        let fast = column_dissimilarity(&a).unwrap();
        let oracle = dissimilarity_oracle(&a);
        assert_eq!(fast, oracle);
        // one hand-checked entry: A_0 - A_3 = (0,0,0,0), so it vanishes
        assert_eq!(fast[[0, 3]], 0.0);
        assert_eq!(fast[[1, 0]], 0.25);
    }

    #[test]
    fn dissimilarity_matches_oracle_on_random_matrices() {
        for seed in 0..5 {
            let a = random_adjacency(13, 0.4, seed);
            assert_eq!(column_dissimilarity(&a).unwrap(), dissimilarity_oracle(&a));
        }
    }

    #[test]
    fn dissimilarity_basic_properties() {
        let a = random_adjacency(40, 0.3, 7);
        let d = column_dissimilarity(&a).unwrap();
        assert_eq!(d, d.t());
        assert!(d.iter().all(|&v| v >= 0.0));
        assert!(d.diag().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn requires_three_nodes() {
        let a = AdjacencyMatrix::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(column_dissimilarity(&a), Err(Error::Size(_))));
        assert!(matches!(
            estimate_probabilities(&a, &SmoothingConfig::default()),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn two_group_rows_are_recovered() {
        // complete bipartite graph between {0,2,4,6} and {1,3,5,7}: two distinct
        // rows, each shared by four nodes
        let mut edges = Vec::new();
        for i in (0..8).step_by(2) {
            for j in (1..8).step_by(2) {
                edges.push((i, j));
            }
        }
        let a = AdjacencyMatrix::from_edges(8, &edges).unwrap();
        // h = 0.5 * sqrt(ln 8 / 8) ~ 0.255, so the neighborhood is the own group
        let cfg = SmoothingConfig {
            bandwidth_constant: 0.5,
            symmetrize: true,
        };
        let w = estimate_probabilities(&a, &cfg).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let group_mean = (0..8)
                    .filter(|k| k % 2 == i % 2)
                    .map(|k| a.as_array()[[k, j]] as f64)
                    .sum::<f64>()
                    / 4.0;
                assert_eq!(w.as_array()[[i, j]], group_mean);
            }
        }
    }

    #[test]
    fn estimates_stay_in_unit_interval() {
        let a = random_adjacency(60, 0.2, 3);
        for cfg in [
            SmoothingConfig::default(),
            SmoothingConfig {
                bandwidth_constant: 3.0,
                symmetrize: false,
            },
        ] {
            let w = estimate_probabilities(&a, &cfg).unwrap();
            assert!(w.as_array().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn constant_graphon_error_rate() {
        let n = 500;
        let mut rng = stream(21, "ns");
        let lat = sample_latents(n, &mut rng).unwrap();
        let w = build_probability_matrix(&Graphon::constant(0.5).unwrap(), &lat).unwrap();
        let a = sample_adjacency(&w, &mut rng);
        let w_hat = estimate_probabilities(&a, &SmoothingConfig::default()).unwrap();
        let err = max_column_error(&w_hat, &w).unwrap();
        let bound = 3.0 * ((n as f64).ln() / n as f64).sqrt();
        assert!(err <= bound, "{err} > {bound}");
    }

    #[test]
    fn rejects_bad_bandwidth() {
        let a = random_adjacency(10, 0.5, 1);
        let cfg = SmoothingConfig {
            bandwidth_constant: 0.0,
            symmetrize: true,
        };
        assert!(matches!(estimate_probabilities(&a, &cfg), Err(Error::Parameter(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn estimate_is_relabeling_equivariant(seed in any::<u64>(), n in 3usize..40, p in 0.05f64..0.95) {
            let a = random_adjacency(n, p, seed);
            let pi = Permutation::random(n, &mut stream(seed, "pi"));
            let cfg = SmoothingConfig::default();
            let lhs = estimate_probabilities(&a.permuted(&pi).unwrap(), &cfg).unwrap();
            let rhs = pi.conjugate(estimate_probabilities(&a, &cfg).unwrap().as_array()).unwrap();
            prop_assert_eq!(lhs.as_array(), &rhs);
        }
    }
}
