//! Graphons and the coupled two-network data-generating process.
//!
//! A pair of matchable networks is drawn by sampling latent positions `xi`
//! for the first network, coupling them to positions `eta` for the second,
//! evaluating the graphon on both to get probability matrices, and sampling
//! symmetric Bernoulli adjacency matrices from those.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

type GraphonFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum GraphonKind {
    Constant(f64),
    /// `(x + y) / 2`
    Gradient,
    /// `0.3 + 0.25 cos(pi x) cos(pi y)`
    Sinusoidal,
    /// Piecewise constant: `probabilities[a][b]` on the cell of block `a` by
    /// block `b`, where `boundaries` holds the interior cut points.
    Block {
        probabilities: Vec<Vec<f64>>,
        boundaries: Vec<f64>,
    },
    Custom(GraphonFn),
}

impl fmt::Debug for GraphonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphonKind::Constant(p) => write!(f, "Constant({p})"),
            GraphonKind::Gradient => write!(f, "Gradient"),
            GraphonKind::Sinusoidal => write!(f, "Sinusoidal"),
            GraphonKind::Block {
                probabilities,
                boundaries,
            } => f
                .debug_struct("Block")
                .field("probabilities", probabilities)
                .field("boundaries", boundaries)
                .finish(),
            GraphonKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A symmetric function on the open unit square with values in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct Graphon {
    kind: GraphonKind,
    /// `None` marks a piecewise graphon that is exempt from the Lipschitz check.
    lipschitz_bound: Option<f64>,
}

impl Graphon {
    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!(
                "constant graphon value {p} is outside [0, 1]"
            )));
        }
        Ok(Self {
            kind: GraphonKind::Constant(p),
            lipschitz_bound: Some(0.0),
        })
    }

    pub fn gradient() -> Self {
        Self {
            kind: GraphonKind::Gradient,
            lipschitz_bound: Some(0.5),
        }
    }

    pub fn sinusoidal() -> Self {
        Self {
            kind: GraphonKind::Sinusoidal,
            lipschitz_bound: Some(0.25 * PI),
        }
    }

    /// Block graphon with `k` blocks: `probabilities` is a symmetric `k x k`
    /// matrix in `[0, 1]` and `boundaries` holds `k - 1` strictly increasing
    /// cut points in `(0, 1)`.
    pub fn block(probabilities: Vec<Vec<f64>>, boundaries: Vec<f64>) -> Result<Self> {
        let k = probabilities.len();
        if k == 0 {
            return Err(Error::Parameter("block graphon needs at least one block".into()));
        }
        if probabilities.iter().any(|row| row.len() != k) {
            return Err(Error::Parameter("block probabilities must be square".into()));
        }
        for (a, row) in probabilities.iter().enumerate() {
            for (b, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Parameter(format!(
                        "block probability [{a}][{b}] = {p} is outside [0, 1]"
                    )));
                }
                if p != probabilities[b][a] {
                    return Err(Error::Parameter(format!(
                        "block probabilities are not symmetric at [{a}][{b}]"
                    )));
                }
            }
        }
        if boundaries.len() != k - 1 {
            return Err(Error::Parameter(format!(
                "{k} blocks need {} boundaries, got {}",
                k - 1,
                boundaries.len()
            )));
        }
        let mut prev = 0.0;
        for &b in &boundaries {
            if !(b > prev && b < 1.0) {
                return Err(Error::Parameter(
                    "block boundaries must be strictly increasing inside (0, 1)".into(),
                ));
            }
            prev = b;
        }
        Ok(Self {
            kind: GraphonKind::Block {
                probabilities,
                boundaries,
            },
            lipschitz_bound: None,
        })
    }

    /// Block graphon whose `k` blocks have equal latent mass `1/k`.
    pub fn equal_blocks(probabilities: Vec<Vec<f64>>) -> Result<Self> {
        let k = probabilities.len();
        let boundaries = (1..k).map(|b| b as f64 / k as f64).collect();
        Self::block(probabilities, boundaries)
    }

    /// A user-supplied graphon. Symmetry and range are the caller's
    /// responsibility; [`Graphon::check_grid`] verifies them numerically.
    pub fn custom<F>(f: F, lipschitz_bound: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(lipschitz_bound >= 0.0 && lipschitz_bound.is_finite()) {
            return Err(Error::Parameter(format!(
                "lipschitz bound {lipschitz_bound} must be finite and nonnegative"
            )));
        }
        Ok(Self {
            kind: GraphonKind::Custom(Arc::new(f)),
            lipschitz_bound: Some(lipschitz_bound),
        })
    }

    pub fn kind(&self) -> &GraphonKind {
        &self.kind
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    pub fn is_piecewise(&self) -> bool {
        self.lipschitz_bound.is_none()
    }

    /// `f(x, y)` for `x, y` in the open unit interval.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        for v in [x, y] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!(
                    "graphon argument {v} is outside (0, 1)"
                )));
            }
        }
        let value = self.eval_unchecked(x, y);
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain(format!(
                "graphon value {value} at ({x}, {y}) is outside [0, 1]"
            )));
        }
        Ok(value)
    }

    fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            GraphonKind::Constant(p) => *p,
            GraphonKind::Gradient => (x + y) / 2.0,
            GraphonKind::Sinusoidal => 0.3 + 0.25 * (PI * x).cos() * (PI * y).cos(),
            GraphonKind::Block {
                probabilities,
                boundaries,
            } => {
                let a = boundaries.partition_point(|&b| b <= x);
                let b = boundaries.partition_point(|&b| b <= y);
                probabilities[a][b]
            }
            GraphonKind::Custom(f) => f(x, y),
        }
    }

    /// Checks symmetry, range, and (for non-piecewise graphons) the declared
    /// Lipschitz bound on the `k x k` grid of cell midpoints.
    pub fn check_grid(&self, k: usize) -> Result<()> {
        let grid: Vec<f64> = (0..k).map(|i| (i as f64 + 0.5) / k as f64).collect();
        let mut values = Array2::zeros((k, k));
        for (i, &x) in grid.iter().enumerate() {
            for (j, &y) in grid.iter().enumerate() {
                values[[i, j]] = self.eval(x, y)?;
            }
        }
        for i in 0..k {
            for j in 0..i {
                if values[[i, j]] != values[[j, i]] {
                    return Err(Error::Domain(format!(
                        "graphon is not symmetric at ({}, {})",
                        grid[i], grid[j]
                    )));
                }
            }
        }
        let Some(bound) = self.lipschitz_bound else {
            return Ok(());
        };
        let step = 1.0 / k as f64;
        let neighbours = [(1, 0, step), (0, 1, step), (1, 1, 2.0 * step)];
        for i in 0..k {
            for j in 0..k {
                for &(di, dj, dist) in &neighbours {
                    let (i2, j2) = (i + di, j + dj);
                    if i2 >= k || j2 >= k {
                        continue;
                    }
                    let change = (values[[i, j]] - values[[i2, j2]]).abs();
                    if change > bound * dist * (1.0 + 1e-9) + 1e-12 {
                        return Err(Error::Domain(format!(
                            "graphon change {change} between grid cells ({i}, {j}) and ({i2}, {j2}) exceeds the Lipschitz bound {bound}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Latent node positions, each strictly inside `(0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentPositions(Vec<f64>);

impl LatentPositions {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| !(v > 0.0 && v < 1.0)) {
            return Err(Error::Domain(format!(
                "latent position {v} is outside (0, 1)"
            )));
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

    pub fn select(&self, indices: &[usize]) -> Self {
        Self(indices.iter().map(|&i| self.0[i]).collect())
    }
}

/// Dependence between the latent positions of the two networks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingMode {
    Identical,
    Independent,
    /// Gaussian copula with correlation `rho` between the shared positions and
    /// the coupled ones.
    ComonotoneNoise { rho: f64 },
}

pub fn sample_latents<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LatentPositions> {
    if n == 0 {
        return Err(Error::Size("cannot sample zero latent positions".into()));
    }
    Ok(LatentPositions((0..n).map(|_| rng.sample(Open01)).collect()))
}

/// Produce the second network's positions from the first's. Every mode keeps
/// the Uniform(0, 1) marginal.
pub fn couple_latents<R: Rng + ?Sized>(
    xi: &LatentPositions,
    mode: CouplingMode,
    rng: &mut R,
) -> Result<LatentPositions> {
    match mode {
        CouplingMode::Identical => Ok(xi.clone()),
        CouplingMode::Independent => sample_latents(xi.len(), rng),
        CouplingMode::ComonotoneNoise { rho } => {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::Parameter(format!(
                    "coupling correlation {rho} is outside [0, 1]"
                )));
            }
            if rho == 1.0 {
                return Ok(xi.clone());
            }
            if rho == 0.0 {
                return sample_latents(xi.len(), rng);
            }
            let normal = Normal::standard();
            let noise_scale = (1.0 - rho * rho).sqrt();
            let lo = f64::MIN_POSITIVE;
            let hi = 1.0 - f64::EPSILON / 2.0;
            let eta = xi
                .values()
                .iter()
                .map(|&x| {
                    let fresh: f64 = rng.sample(Open01);
                    let z = rho * normal.inverse_cdf(x) + noise_scale * normal.inverse_cdf(fresh);
                    normal.cdf(z).clamp(lo, hi)
                })
                .collect();
            Ok(LatentPositions(eta))
        }
    }
}

/// Symmetric edge-probability matrix with entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMatrix(Array2<f64>);

impl ProbabilityMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::Size(format!(
                "probability matrix must be square, got {rows}x{cols}"
            )));
        }
        for ((i, j), &v) in values.indexed_iter() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!(
                    "probability [{i}, {j}] = {v} is outside [0, 1]"
                )));
            }
            if j < i && v != values[[j, i]] {
                return Err(Error::Input(format!(
                    "probability matrix is not symmetric at [{i}, {j}]"
                )));
            }
        }
        Ok(Self(values))
    }

    pub(crate) fn from_array_unchecked(values: Array2<f64>) -> Self {
        Self(values)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<f64> {
        self.0
    }

    /// Principal submatrix on `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        Self(Array2::from_shape_fn((k, k), |(i, j)| {
            self.0[[indices[i], indices[j]]]
        }))
    }
}

/// Symmetric, hollow, binary adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix(Array2<u8>);

impl AdjacencyMatrix {
    pub fn new(values: Array2<u8>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::Size(format!(
                "adjacency matrix must be square, got {rows}x{cols}"
            )));
        }
        for ((i, j), &v) in values.indexed_iter() {
            if v > 1 {
                return Err(Error::Input(format!(
                    "adjacency entry [{i}, {j}] = {v} is not binary"
                )));
            }
            if i == j && v != 0 {
                return Err(Error::Input(format!("adjacency has a self-loop at {i}")));
            }
            if j < i && v != values[[j, i]] {
                return Err(Error::Input(format!(
                    "adjacency matrix is not symmetric at [{i}, {j}]"
                )));
            }
        }
        Ok(Self(values))
    }

    /// Undirected graph on `n` nodes from an edge list. Repeated edges are
    /// allowed; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut values = Array2::zeros((n, n));
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Input(format!(
                    "edge ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::Input(format!("self-loop at node {i}")));
            }
            values[[i, j]] = 1;
            values[[j, i]] = 1;
        }
        Ok(Self(values))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<u8> {
        &self.0
    }

    pub fn restrict(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        Self(Array2::from_shape_fn((k, k), |(i, j)| {
            self.0[[indices[i], indices[j]]]
        }))
    }

    /// Relabel nodes: node `i` of the result is node `perm[i]` of `self`.
    pub fn permuted(&self, perm: &crate::Permutation) -> Result<Self> {
        Ok(Self(perm.conjugate(&self.0)?))
    }

    pub fn edge_count(&self) -> usize {
        self.0.iter().map(|&v| v as usize).sum::<usize>() / 2
    }
}

/// `W[i, j] = f(latent_i, latent_j)`, diagonal included.
pub fn build_probability_matrix(
    graphon: &Graphon,
    latents: &LatentPositions,
) -> Result<ProbabilityMatrix> {
    let x = latents.values();
    let n = x.len();
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = graphon.eval(x[i], x[j])?;
            w[[i, j]] = v;
            w[[j, i]] = v;
        }
    }
    Ok(ProbabilityMatrix(w))
}

/// Independent Bernoulli edges on the upper triangle, mirrored, with an
/// empty diagonal. Draws are consumed in row-major upper-triangle order.
pub fn sample_adjacency<R: Rng + ?Sized>(
    w: &ProbabilityMatrix,
    rng: &mut R,
) -> AdjacencyMatrix {
    let n = w.n();
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let u: f64 = rng.random();
            if u < w.0[[i, j]] {
                a[[i, j]] = 1;
                a[[j, i]] = 1;
            }
        }
    }
    AdjacencyMatrix(a)
}
