//! Unseeded graph matching by random artificial seeds.
//!
//! The pipeline denoises both adjacency matrices, draws `d` random seed nodes
//! in each network, partitions every network into `d` equal groups around its
//! seeds with a balanced assignment, searches all `d!` ways of pairing the
//! groups of the two networks, and composes the three permutations into the
//! final node correspondence.
//!
//! Layout: a network aligned to its seeds is stored seed-contiguously, i.e.
//! slot `g * m + s` (with `m = n / d`) holds the `s`-th node of group `g`.

mod block;

use ndarray::Array2;
use rand::seq::index;
use rand::Rng;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

pub use block::{
    block_cost_tensor, enumerate_block_permutation, expand_block_permutation, BlockCostTensor,
    MAX_BLOCKS,
};

use crate::assignment::{solve_assignment, CostMatrix};
use crate::error::{Error, Result};
use crate::graphon_model::{AdjacencyMatrix, ProbabilityMatrix};
use crate::permutation::Permutation;
use crate::smoothing::{estimate_probabilities, SmoothingConfig};

/// Which of the two networks an object belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Network {
    First,
    Second,
}

/// Distinct seed node indices, in increasing order. Seed `g` labels group `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedSet {
    pub indices: Vec<usize>,
    pub network: Network,
}

impl SeedSet {
    pub fn new(indices: Vec<usize>, network: Network, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return Err(Error::Input(format!("seed {i} is outside 0..{n}")));
            }
            if seen[i] {
                return Err(Error::Input(format!("seed {i} is repeated")));
            }
            seen[i] = true;
        }
        Ok(Self { indices, network })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Number of artificial seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SeedCount {
    /// `clamp(round(C * ln n / ln ln n), 2, d_max)`
    #[default]
    Auto,
    Fixed(usize),
}

impl Serialize for SeedCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SeedCount::Auto => s.serialize_str("auto"),
            SeedCount::Fixed(d) => s.serialize_u64(*d as u64),
        }
    }
}

impl<'de> Deserialize<'de> for SeedCount {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = SeedCount;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("\"auto\" or a positive integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<SeedCount, E> {
                match v {
                    "auto" => Ok(SeedCount::Auto),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<SeedCount, E> {
                Ok(SeedCount::Fixed(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<SeedCount, E> {
                u64::try_from(v)
                    .map(|v| SeedCount::Fixed(v as usize))
                    .map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
            }
        }
        de.deserialize_any(Visitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatcherConfig {
    pub d: SeedCount,
    pub d_max: usize,
    pub d_constant: f64,
    /// Skip smoothing and match the true probability matrices (debugging and
    /// exact-recovery checks; see [`match_probabilities`]).
    pub use_oracle_probabilities: bool,
    /// Seed for [`match_graphs_seeded`]; the experiment harness derives its
    /// own streams instead.
    pub seed: u64,
    pub smoothing: SmoothingConfig,
    /// Fixed seed nodes for the two networks instead of random ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinned_seeds: Option<(Vec<usize>, Vec<usize>)>,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self {
            d: SeedCount::Auto,
            d_max: 9,
            d_constant: 1.0,
            use_oracle_probabilities: false,
            seed: 0,
            smoothing: SmoothingConfig::default(),
            pinned_seeds: None,
        }
    }
}

impl MatcherConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_BLOCKS).contains(&self.d_max) {
            return Err(Error::Parameter(format!(
                "d_max = {} must lie in 2..={MAX_BLOCKS}",
                self.d_max
            )));
        }
        if let SeedCount::Fixed(d) = self.d {
            if !(2..=self.d_max).contains(&d) {
                return Err(Error::Parameter(format!(
                    "d = {d} must lie in 2..={}",
                    self.d_max
                )));
            }
        }
        if !(self.d_constant > 0.0 && self.d_constant.is_finite()) {
            return Err(Error::Parameter(format!(
                "d_constant = {} must be positive",
                self.d_constant
            )));
        }
        if let Some((s1, s2)) = &self.pinned_seeds {
            if s1.len() != s2.len() {
                return Err(Error::Parameter("pinned seed sets differ in size".into()));
            }
            if !(2..=self.d_max).contains(&s1.len()) {
                return Err(Error::Parameter(format!(
                    "{} pinned seeds; need 2..={}",
                    s1.len(),
                    self.d_max
                )));
            }
        }
        self.smoothing.validate()
    }

    /// The seed count used for networks of `n` nodes.
    pub fn resolve_d(&self, n: usize) -> Result<usize> {
        self.validate()?;
        let d = if let Some((s1, _)) = &self.pinned_seeds {
            s1.len()
        } else {
            match self.d {
                SeedCount::Fixed(d) => d,
                SeedCount::Auto => auto_seed_count(n, self.d_constant, self.d_max),
            }
        };
        if d > n {
            return Err(Error::Size(format!("{d} seeds requested for {n} nodes")));
        }
        Ok(d)
    }
}

/// `clamp(round(c * ln n / ln ln n), 2, d_max)`, also capped at `n`.
pub fn auto_seed_count(n: usize, c: f64, d_max: usize) -> usize {
    let nf = n as f64;
    let raw = if nf.ln().ln() > 0.0 {
        (c * nf.ln() / nf.ln().ln()).round()
    } else {
        2.0
    };
    (raw as usize).clamp(2, d_max).min(n.max(2))
}

/// `d` distinct nodes drawn uniformly without replacement, sorted.
pub fn choose_seeds<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    network: Network,
    rng: &mut R,
) -> Result<SeedSet> {
    if d > n {
        return Err(Error::Size(format!("cannot choose {d} seeds from {n} nodes")));
    }
    if d < 2 {
        return Err(Error::Parameter(format!("need at least 2 seeds, got {d}")));
    }
    let mut indices = index::sample(rng, n, d).into_vec();
    indices.sort_unstable();
    Ok(SeedSet { indices, network })
}

/// Balanced assignment of the columns of `w_hat` to the replicated seed
/// columns.
///
/// Returns the permutation `P` minimizing `||W_hat P^T - W_hat[., seeds] R||_F`
/// (slot `t` of the result holds node `P[t]`, and slots `g*m..(g+1)*m` form
/// group `g`) together with the attained squared norm.
pub fn align_to_seeds(w_hat: &ProbabilityMatrix, seeds: &SeedSet) -> Result<(Permutation, f64)> {
    let n = w_hat.n();
    let d = seeds.len();
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::Precondition(format!(
            "{d} seeds do not divide {n} nodes; drop the remainder first"
        )));
    }
    if let Some(&bad) = seeds.indices.iter().find(|&&s| s >= n) {
        return Err(Error::Input(format!("seed {bad} is outside 0..{n}")));
    }
    let m = n / d;
    let w = w_hat.as_array();
    let mut dist = Array2::zeros((n, d));
    for (g, &seed) in seeds.indices.iter().enumerate() {
        let sc = w.column(seed);
        for j in 0..n {
            dist[[j, g]] = w
                .column(j)
                .iter()
                .zip(sc.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
    }
    let costs = CostMatrix::new(Array2::from_shape_fn((n, n), |(j, slot)| dist[[j, slot / m]]))?;
    let (node_to_slot, cost) = solve_assignment(&costs);
    Ok((node_to_slot.inverse(), cost))
}

/// `P M P^T`, i.e. `out[i, j] = M[perm[i], perm[j]]`.
pub fn apply_matching<T: Clone>(p: &Permutation, m: &Array2<T>) -> Result<Array2<T>> {
    p.conjugate(m)
}

/// Output of one run of the matching pipeline.
///
/// All permutations and seed indices live in the retained index space
/// `0..n_retained`; `retained.0[i]` (resp. `.1`) is the caller's node index of
/// retained node `i` in the first (second) network.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchResult {
    /// Final estimate: node `i` of the second network is matched to node
    /// `p_hat[i]` of the first.
    pub p_hat: Permutation,
    pub p1: Permutation,
    pub p2: Permutation,
    pub q_tilde: Permutation,
    pub seeds1: SeedSet,
    pub seeds2: SeedSet,
    pub d: usize,
    /// Squared Frobenius objective of the block search.
    pub enumeration_cost: f64,
    pub alignment_costs: (f64, f64),
    pub retained: (Vec<usize>, Vec<usize>),
    pub dropped: (Vec<usize>, Vec<usize>),
    /// Estimated probability matrices on the retained nodes.
    pub denoised: (ProbabilityMatrix, ProbabilityMatrix),
    pub loss: Option<f64>,
}

impl MatchResult {
    pub fn n_retained(&self) -> usize {
        self.p_hat.len()
    }

    /// Seed nodes in the caller's index space.
    pub fn seed_nodes(&self, network: Network) -> Vec<usize> {
        let (seeds, retained) = match network {
            Network::First => (&self.seeds1, &self.retained.0),
            Network::Second => (&self.seeds2, &self.retained.1),
        };
        seeds.indices.iter().map(|&s| retained[s]).collect()
    }

    /// Matched pairs `(node in first, node in second)` in the caller's index
    /// space.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n_retained())
            .map(|i| (self.retained.0[self.p_hat[i]], self.retained.1[i]))
            .collect()
    }

    /// Group index of every retained node (retained index space).
    pub fn groups(&self, network: Network) -> Vec<usize> {
        let p = match network {
            Network::First => &self.p1,
            Network::Second => &self.p2,
        };
        let m = self.n_retained() / self.d;
        let mut groups = vec![0; p.len()];
        for (slot, &node) in p.as_slice().iter().enumerate() {
            groups[node] = slot / m;
        }
        groups
    }

    /// Loss of `p_hat` against true probability matrices of the full
    /// networks, restricted to the retained nodes. Also stores it in `loss`.
    pub fn evaluate(&mut self, w1: &ProbabilityMatrix, w2: &ProbabilityMatrix) -> Result<f64> {
        let loss = crate::evaluation::matching_loss(
            &self.p_hat,
            &w1.restrict(&self.retained.0),
            &w2.restrict(&self.retained.1),
        )?;
        self.loss = Some(loss);
        Ok(loss)
    }
}

/// Nodes kept after removing `n mod d` nodes uniformly at random, avoiding
/// `protected` nodes.
fn drop_remainder<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    protected: &[usize],
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let extra = n % d;
    let candidates: Vec<usize> = (0..n).filter(|i| !protected.contains(i)).collect();
    if candidates.len() < extra {
        return Err(Error::Size("not enough unpinned nodes to drop".into()));
    }
    let mut dropped: Vec<usize> = index::sample(rng, candidates.len(), extra)
        .into_iter()
        .map(|k| candidates[k])
        .collect();
    dropped.sort_unstable();
    let retained = (0..n).filter(|i| dropped.binary_search(i).is_err()).collect();
    Ok((retained, dropped))
}

fn position_in(retained: &[usize], node: usize) -> Result<usize> {
    retained
        .binary_search(&node)
        .map_err(|_| Error::Input(format!("pinned seed {node} is not a retained node")))
}

/// Run the matching pipeline on two adjacency matrices of equal size.
///
/// Random draws are taken in a fixed order: remainder nodes of the first and
/// second network, then seeds of the first and second network.
pub fn match_graphs<R: Rng + ?Sized>(
    a1: &AdjacencyMatrix,
    a2: &AdjacencyMatrix,
    cfg: &MatcherConfig,
    rng: &mut R,
) -> Result<MatchResult> {
    if cfg.use_oracle_probabilities {
        return Err(Error::Precondition(
            "oracle-probability mode needs the true matrices; call match_probabilities".into(),
        ));
    }
    let n = equal_sizes(a1.n(), a2.n())?;
    let d = cfg.resolve_d(n)?;
    let (kept1, kept2) = retain(n, d, cfg, rng)?;
    let w1 = estimate_probabilities(&a1.restrict(&kept1.0), &cfg.smoothing)?;
    let w2 = estimate_probabilities(&a2.restrict(&kept2.0), &cfg.smoothing)?;
    match_denoised(w1, w2, d, kept1, kept2, cfg, rng)
}

/// The pipeline with the smoothing step replaced by known probability matrices.
pub fn match_probabilities<R: Rng + ?Sized>(
    w1: &ProbabilityMatrix,
    w2: &ProbabilityMatrix,
    cfg: &MatcherConfig,
    rng: &mut R,
) -> Result<MatchResult> {
    let n = equal_sizes(w1.n(), w2.n())?;
    let d = cfg.resolve_d(n)?;
    let (kept1, kept2) = retain(n, d, cfg, rng)?;
    let w1 = w1.restrict(&kept1.0);
    let w2 = w2.restrict(&kept2.0);
    match_denoised(w1, w2, d, kept1, kept2, cfg, rng)
}

/// [`match_graphs`] driven by a stream derived from `cfg.seed`.
pub fn match_graphs_seeded(
    a1: &AdjacencyMatrix,
    a2: &AdjacencyMatrix,
    cfg: &MatcherConfig,
) -> Result<MatchResult> {
    let mut rng = crate::rng::stream(cfg.seed, "match");
    match_graphs(a1, a2, cfg, &mut rng)
}

fn equal_sizes(n1: usize, n2: usize) -> Result<usize> {
    if n1 != n2 {
        return Err(Error::Size(format!(
            "networks have {n1} and {n2} nodes; use match_unequal"
        )));
    }
    if n1 < 3 {
        return Err(Error::Size(format!("need at least 3 nodes, got {n1}")));
    }
    Ok(n1)
}

type Kept = (Vec<usize>, Vec<usize>);

fn retain<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    cfg: &MatcherConfig,
    rng: &mut R,
) -> Result<(Kept, Kept)> {
    let (protect1, protect2) = match &cfg.pinned_seeds {
        Some((s1, s2)) => (s1.clone(), s2.clone()),
        None => (Vec::new(), Vec::new()),
    };
    Ok((
        drop_remainder(n, d, &protect1, rng)?,
        drop_remainder(n, d, &protect2, rng)?,
    ))
}

fn match_denoised<R: Rng + ?Sized>(
    w1: ProbabilityMatrix,
    w2: ProbabilityMatrix,
    d: usize,
    kept1: Kept,
    kept2: Kept,
    cfg: &MatcherConfig,
    rng: &mut R,
) -> Result<MatchResult> {
    let n = w1.n();
    let (seeds1, seeds2) = match &cfg.pinned_seeds {
        Some((s1, s2)) => {
            let map = |s: &[usize], kept: &[usize], net| -> Result<SeedSet> {
                let idx = s.iter().map(|&v| position_in(kept, v)).collect::<Result<_>>()?;
                SeedSet::new(idx, net, n)
            };
            (map(s1, &kept1.0, Network::First)?, map(s2, &kept2.0, Network::Second)?)
        }
        None => (
            choose_seeds(n, d, Network::First, rng)?,
            choose_seeds(n, d, Network::Second, rng)?,
        ),
    };

    let (p1, cost1) = align_to_seeds(&w1, &seeds1)?;
    let (p2, cost2) = align_to_seeds(&w2, &seeds2)?;
    let m1 = ProbabilityMatrix::from_array_unchecked(p1.conjugate(w1.as_array())?);
    let m2 = ProbabilityMatrix::from_array_unchecked(p2.conjugate(w2.as_array())?);
    let (q_tilde, enumeration_cost) = enumerate_block_permutation(&m1, &m2, d, cfg.d_max)?;
    let q = expand_block_permutation(&q_tilde, n / d);
    let p_hat = p2.inverse().compose(&q)?.compose(&p1)?;

    Ok(MatchResult {
        p_hat,
        p1,
        p2,
        q_tilde,
        seeds1,
        seeds2,
        d,
        enumeration_cost,
        alignment_costs: (cost1, cost2),
        retained: (kept1.0, kept2.0),
        dropped: (kept1.1, kept2.1),
        denoised: (w1, w2),
        loss: None,
    })
}

/// Where an unmatched node of the larger network was sent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extension {
    /// Node of the larger network.
    pub node: usize,
    /// Seed group of the larger network the node was clustered to.
    pub group: usize,
    /// A node of the smaller network in the corresponding group.
    pub partner: usize,
}

#[derive(Clone, Debug)]
pub struct UnequalMatch {
    /// Matching of the induced subnetwork; its indices refer to the caller's
    /// full networks.
    pub result: MatchResult,
    pub larger: Network,
    /// Nodes of the larger network that entered the subnetwork, sorted.
    pub subsample: Vec<usize>,
    /// One entry for every node of the larger network left out of the match.
    pub extension: Vec<Extension>,
}

/// Match networks of different sizes by subsampling the larger one.
///
/// Leftover nodes of the larger network join the seed group whose denoised
/// seed column is nearest in `l2`, and are paired with a node of the
/// corresponding group in the smaller network.
pub fn match_unequal<R: Rng + ?Sized>(
    a1: &AdjacencyMatrix,
    a2: &AdjacencyMatrix,
    cfg: &MatcherConfig,
    rng: &mut R,
) -> Result<UnequalMatch> {
    let (n1, n2) = (a1.n(), a2.n());
    if n1 == n2 {
        return Err(Error::Precondition(
            "networks have equal sizes; use match_graphs".into(),
        ));
    }
    if cfg.pinned_seeds.is_some() {
        return Err(Error::Parameter(
            "pinned seeds are not supported for unequal sizes".into(),
        ));
    }
    let (larger, big, small) = if n1 > n2 {
        (Network::First, a1, a2)
    } else {
        (Network::Second, a2, a1)
    };
    let mut subsample = index::sample(rng, big.n(), small.n()).into_vec();
    subsample.sort_unstable();
    let induced = big.restrict(&subsample);

    let mut result = match larger {
        Network::First => match_graphs(&induced, small, cfg, rng)?,
        Network::Second => match_graphs(small, &induced, cfg, rng)?,
    };
    // lift the larger network's retained/dropped indices to its full index space
    let lift = |v: &mut Vec<usize>| v.iter_mut().for_each(|i| *i = subsample[*i]);
    match larger {
        Network::First => {
            lift(&mut result.retained.0);
            lift(&mut result.dropped.0);
        }
        Network::Second => {
            lift(&mut result.retained.1);
            lift(&mut result.dropped.1);
        }
    }

    let w_big = estimate_probabilities(big, &cfg.smoothing)?;
    let w_big = w_big.as_array();
    let seed_cols = result.seed_nodes(larger);
    let (big_retained, small_retained) = match larger {
        Network::First => (&result.retained.0, &result.retained.1),
        Network::Second => (&result.retained.1, &result.retained.0),
    };
    let small_perm = match larger {
        Network::First => &result.p2,
        Network::Second => &result.p1,
    };
    let m = result.n_retained() / result.d;
    let q = &result.q_tilde;
    let q_inv = q.inverse();

    let mut extension = Vec::new();
    for node in 0..big.n() {
        if big_retained.binary_search(&node).is_ok() {
            continue;
        }
        let mut group = 0;
        let mut best = f64::INFINITY;
        for (g, &seed) in seed_cols.iter().enumerate() {
            let dist: f64 = w_big
                .column(node)
                .iter()
                .zip(w_big.column(seed).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if dist < best {
                best = dist;
                group = g;
            }
        }
        // second-network group a is paired with first-network group q[a]
        let partner_group = match larger {
            Network::First => q_inv[group],
            Network::Second => q[group],
        };
        let partner = small_retained[small_perm[partner_group * m]];
        extension.push(Extension {
            node,
            group,
            partner,
        });
    }

    Ok(UnequalMatch {
        result,
        larger,
        subsample,
        extension,
    })
}
