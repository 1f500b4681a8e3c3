//! One-dimensional empirical l2 Wasserstein distances and the latent-position
//! oracle matchings.
//!
//! In one dimension the optimal coupling between two equal-size empirical
//! measures pairs order statistics, so everything here reduces to sorting.
//! The oracle permutations need true latent positions and are therefore only
//! meaningful in simulation; the matching pipeline never calls them.

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// A finite scalar sample, viewed as the uniform empirical measure on its values.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample(Vec<f64>);

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("sample value {v} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn same_length(x: &EmpiricalSample, y: &EmpiricalSample) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Size(format!(
            "samples have different sizes {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::Size("samples are empty".into()));
    }
    Ok(x.len())
}

/// `(1/sqrt(m)) * ||sort(x) - sort(y)||_2`.
pub fn w2_distance(x: &EmpiricalSample, y: &EmpiricalSample) -> Result<f64> {
    let m = same_length(x, y)?;
    let sq: f64 = x
        .sorted()
        .iter()
        .zip(y.sorted())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sq / m as f64).sqrt())
}

/// Repeat every value `m` times, keeping copies of one value contiguous.
pub fn replicate_sample(s: &EmpiricalSample, m: usize) -> Result<EmpiricalSample> {
    if m == 0 {
        return Err(Error::Parameter("replication factor must be at least 1".into()));
    }
    Ok(EmpiricalSample(
        s.0.iter()
            .flat_map(|&v| std::iter::repeat_n(v, m))
            .collect(),
    ))
}

/// The permutation `sigma` minimizing `||x o sigma - y||_2`, where
/// `(x o sigma)[i] = x[sigma[i]]`: the `r`-th smallest `y` is paired with the
/// `r`-th smallest `x`. Ties are ordered by index.
pub fn oracle_latent_permutation(x: &EmpiricalSample, y: &EmpiricalSample) -> Result<Permutation> {
    let m = same_length(x, y)?;
    let order = |s: &EmpiricalSample| {
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| s.0[a].total_cmp(&s.0[b]));
        idx
    };
    let ox = order(x);
    let oy = order(y);
    let mut sigma = vec![0; m];
    for (&yi, &xi) in oy.iter().zip(&ox) {
        sigma[yi] = xi;
    }
    Ok(Permutation::from_vec_unchecked(sigma))
}

/// `||x o sigma - y||_2` for the permutation convention above.
pub fn coupling_cost(x: &EmpiricalSample, y: &EmpiricalSample, sigma: &Permutation) -> Result<f64> {
    same_length(x, y)?;
    if sigma.len() != x.len() {
        return Err(Error::Size("permutation and samples differ in size".into()));
    }
    Ok(y.0
        .iter()
        .enumerate()
        .map(|(i, &b)| (x.0[sigma[i]] - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Distance between the full latent sample and its `d`-point seed subsample
/// replicated `n / d` times. Requires `d | n`.
pub fn seed_sample_distance(latents: &[f64], seeds: &[usize]) -> Result<f64> {
    let n = latents.len();
    let d = seeds.len();
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::Precondition(format!(
            "seed count {d} must divide sample size {n}"
        )));
    }
    let full = EmpiricalSample::new(latents.to_vec())?;
    let seed_sample = EmpiricalSample::new(seeds.iter().map(|&i| latents[i]).collect())?;
    w2_distance(&full, &replicate_sample(&seed_sample, n / d)?)
}
