//! Matching loss against the true probability matrices and a random baseline.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon_model::ProbabilityMatrix;
use crate::permutation::Permutation;

/// `(1/n) * ||P W1 P^T - W2||_F`.
pub fn matching_loss(
    p: &Permutation,
    w1: &ProbabilityMatrix,
    w2: &ProbabilityMatrix,
) -> Result<f64> {
    let n = w1.n();
    if w2.n() != n || p.len() != n {
        return Err(Error::Size(format!(
            "permutation of size {} with matrices of size {n} and {}",
            p.len(),
            w2.n()
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let (a, b) = (w1.as_array(), w2.as_array());
    let mut total = 0.0;
    for i in 0..n {
        let pi = p[i];
        let row = b.row(i);
        for (j, &target) in row.iter().enumerate() {
            let diff = a[[pi, p[j]]] - target;
            total += diff * diff;
        }
    }
    Ok(total.sqrt() / n as f64)
}

/// Loss of a matching next to reference points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchQuality {
    pub loss: f64,
    pub baseline_median: f64,
    pub identity_loss: f64,
}

impl MatchQuality {
    pub fn beats_baseline(&self) -> bool {
        self.loss < self.baseline_median
    }
}

/// Loss distribution of uniformly random matchings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineSummary {
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Loss of the identity matching, which is the ground truth when both
    /// networks share latent positions.
    pub identity_loss: f64,
    pub samples: usize,
}

/// Losses of `k` random permutations.
pub fn baseline_losses<R: Rng + ?Sized>(
    w1: &ProbabilityMatrix,
    w2: &ProbabilityMatrix,
    rng: &mut R,
    k: usize,
) -> Result<BaselineSummary> {
    if k == 0 {
        return Err(Error::Parameter("baseline needs at least one sample".into()));
    }
    let n = w1.n();
    let mut losses = (0..k)
        .map(|_| matching_loss(&Permutation::random(n, rng), w1, w2))
        .collect::<Result<Vec<_>>>()?;
    losses.sort_by(f64::total_cmp);
    let median = if k % 2 == 1 {
        losses[k / 2]
    } else {
        0.5 * (losses[k / 2 - 1] + losses[k / 2])
    };
    Ok(BaselineSummary {
        median,
        min: losses[0],
        max: losses[k - 1],
        identity_loss: matching_loss(&Permutation::identity(n), w1, w2)?,
        samples: k,
    })
}
