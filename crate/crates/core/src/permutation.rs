use std::fmt;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// A bijection on `{0, .., n-1}`.
///
/// The permutation matrix `P` of `perm` has `P[i, perm[i]] = 1`, so
/// `(P x)[i] = x[perm[i]]` and `(P M P^T)[i, j] = M[perm[i], perm[j]]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    perm: Vec<usize>,
}

impl Permutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Input(format!(
                    "{perm:?} is not a bijection on 0..{n}"
                )));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    pub(crate) fn from_vec_unchecked(perm: Vec<usize>) -> Self {
        debug_assert!(Self::new(perm.clone()).is_ok());
        Self { perm }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    /// A uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        Self { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Self { perm: inv }
    }

    /// The permutation whose matrix is `self · rhs`, i.e. `out[i] = rhs[self[i]]`.
    pub fn compose(&self, rhs: &Permutation) -> Result<Self> {
        if self.len() != rhs.len() {
            return Err(Error::Size(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                rhs.len()
            )));
        }
        Ok(Self {
            perm: self.perm.iter().map(|&p| rhs.perm[p]).collect(),
        })
    }

    /// Dense 0/1 matrix under the `P[i, perm[i]] = 1` convention.
    pub fn to_matrix(&self) -> Array2<f64> {
        let n = self.len();
        let mut m = Array2::zeros((n, n));
        for (i, &p) in self.perm.iter().enumerate() {
            m[[i, p]] = 1.0;
        }
        m
    }

    /// `P M P^T`, i.e. `out[i, j] = M[perm[i], perm[j]]`.
    pub fn conjugate<T: Clone>(&self, m: &Array2<T>) -> Result<Array2<T>> {
        let n = self.len();
        if m.dim() != (n, n) {
            return Err(Error::Size(format!(
                "permutation of size {n} applied to a {:?} matrix",
                m.dim()
            )));
        }
        Ok(Array2::from_shape_fn((n, n), |(i, j)| {
            m[[self.perm[i], self.perm[j]]].clone()
        }))
    }
}

impl std::ops::Index<usize> for Permutation {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.perm[i]
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.perm)
    }
}
