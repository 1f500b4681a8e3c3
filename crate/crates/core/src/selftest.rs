//! Fast oracle checks of the building blocks, run by `graphon-match selftest`.

use ndarray::Array2;
use rand::Rng;

use crate::assignment::{brute_force_assignment, next_permutation, solve_assignment, CostMatrix};
use crate::error::Result;
use crate::graphon_model::{sample_adjacency, ProbabilityMatrix};
use crate::matcher::{
    block_cost_tensor, enumerate_block_permutation, expand_block_permutation, match_probabilities,
    MatcherConfig,
};
use crate::permutation::Permutation;
use crate::rng::StreamSeed;
use crate::smoothing::column_dissimilarity;
use crate::wasserstein::{w2_distance, EmpiricalSample};

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Suite = fn(&StreamSeed) -> Result<std::result::Result<String, String>>;

const SUITES: [(&str, Suite); 5] = [
    ("assignment-vs-brute-force", assignment_suite),
    ("block-search-vs-direct", block_suite),
    ("dissimilarity-vs-loops", dissimilarity_suite),
    ("w2-vs-brute-force", wasserstein_suite),
    ("exact-recovery", recovery_suite),
];

/// Run every suite with streams derived from `seed`.
pub fn run_selftest(seed: u64) -> Vec<SuiteOutcome> {
    let root = StreamSeed::new(seed).child("selftest");
    SUITES
        .iter()
        .map(|(name, suite)| {
            let (passed, detail) = match suite(&root.child(name)) {
                Ok(Ok(d)) => (true, d),
                Ok(Err(d)) => (false, d),
                Err(e) => (false, e.to_string()),
            };
            SuiteOutcome {
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn symmetric_uniform<R: Rng>(n: usize, rng: &mut R) -> ProbabilityMatrix {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random();
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    ProbabilityMatrix::new(a).expect("entries in [0, 1]")
}

fn assignment_suite(seed: &StreamSeed) -> Result<std::result::Result<String, String>> {
    let mut rng = seed.rng();
    for case in 0..100 {
        let n = rng.random_range(2..=7);
        let costs = CostMatrix::new(Array2::from_shape_fn((n, n), |_| rng.random_range(0..5) as f64))?;
        let (p, c) = solve_assignment(&costs);
        let (q, b) = brute_force_assignment(&costs)?;
        if c != b || p != q {
            return Ok(Err(format!("case {case}: {p:?} ({c}) vs {q:?} ({b})")));
        }
    }
    Ok(Ok("100 integer cost matrices with ties".into()))
}

fn block_suite(seed: &StreamSeed) -> Result<std::result::Result<String, String>> {
    let mut rng = seed.rng();
    for case in 0..20 {
        let d = rng.random_range(2..=5);
        let n = 3 * d;
        let m1 = symmetric_uniform(n, &mut rng);
        let m2 = symmetric_uniform(n, &mut rng);
        let tensor = block_cost_tensor(&m1, &m2, d)?;
        let mut sigma: Vec<usize> = (0..d).collect();
        let mut best = f64::INFINITY;
        loop {
            let q = expand_block_permutation(&Permutation::new(sigma.clone())?, 3);
            let direct = (&q.conjugate(m1.as_array())? - m2.as_array()).mapv(|x| x * x).sum();
            if (tensor.cost(&sigma) - direct).abs() > 1e-9 * direct.max(1.0) {
                return Ok(Err(format!("case {case}: tensor cost differs at {sigma:?}")));
            }
            best = best.min(direct);
            if !next_permutation(&mut sigma) {
                break;
            }
        }
        let (_, found) = enumerate_block_permutation(&m1, &m2, d, 9)?;
        if (found - best).abs() > 1e-9 * best.max(1.0) {
            return Ok(Err(format!("case {case}: search found {found}, minimum {best}")));
        }
    }
    Ok(Ok("20 random instances, d in 2..=5".into()))
}

fn dissimilarity_suite(seed: &StreamSeed) -> Result<std::result::Result<String, String>> {
    let mut rng = seed.rng();
    for case in 0..5 {
        let n = 15;
        let a = sample_adjacency(&ProbabilityMatrix::new(Array2::from_elem((n, n), 0.4))?, &mut rng);
        let fast = column_dissimilarity(&a)?;
        let x = a.as_array().mapv(f64::from);
        for i in 0..n {
            for j in 0..n {
                let mut worst: f64 = 0.0;
                for k in (0..n).filter(|&k| k != i && k != j) {
                    let dot: f64 = (0..n).map(|l| (x[[i, l]] - x[[j, l]]) * x[[k, l]]).sum();
                    worst = worst.max(dot.abs());
                }
                if fast[[i, j]] != worst / n as f64 {
                    return Ok(Err(format!("case {case}: entry ({i}, {j}) differs")));
                }
            }
        }
    }
    Ok(Ok("5 random graphs on 15 nodes".into()))
}

fn wasserstein_suite(seed: &StreamSeed) -> Result<std::result::Result<String, String>> {
    let mut rng = seed.rng();
    for case in 0..10 {
        let x: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let mut p: Vec<usize> = (0..6).collect();
        let mut best = f64::INFINITY;
        loop {
            let c: f64 = (0..6).map(|i| (x[p[i]] - y[i]).powi(2)).sum();
            best = best.min((c / 6.0).sqrt());
            if !next_permutation(&mut p) {
                break;
            }
        }
        let w = w2_distance(&EmpiricalSample::new(x)?, &EmpiricalSample::new(y)?)?;
        if (w - best).abs() > 1e-12 {
            return Ok(Err(format!("case {case}: {w} vs {best}")));
        }
    }
    Ok(Ok("10 random pairs of size 6".into()))
}

fn recovery_suite(seed: &StreamSeed) -> Result<std::result::Result<String, String>> {
    let values = [
        [0.90, 0.10, 0.20, 0.30],
        [0.10, 0.70, 0.40, 0.15],
        [0.20, 0.40, 0.55, 0.05],
        [0.30, 0.15, 0.05, 0.35],
    ];
    let n = 32;
    let labels: Vec<usize> = (0..n).map(|i| (i * 5) % 4).collect();
    let w1 = ProbabilityMatrix::new(Array2::from_shape_fn((n, n), |(i, j)| {
        values[labels[i]][labels[j]]
    }))?;
    let relabel = Permutation::random(n, &mut seed.child("relabel").rng());
    let w2 = ProbabilityMatrix::new(relabel.conjugate(w1.as_array())?)?;
    let first = |label: &dyn Fn(usize) -> usize, b| (0..n).find(|&i| label(i) == b).expect("block is nonempty");
    let seeds1 = (0..4).map(|b| first(&|i| labels[i], b)).collect();
    let seeds2 = (0..4).map(|b| first(&|i| labels[relabel[i]], b)).collect();
    let cfg = MatcherConfig {
        use_oracle_probabilities: true,
        pinned_seeds: Some((seeds1, seeds2)),
        ..Default::default()
    };
    let mut result = match_probabilities(&w1, &w2, &cfg, &mut seed.child("match").rng())?;
    let loss = result.evaluate(&w1, &w2)?;
    if loss == 0.0 {
        Ok(Ok("4-block relabeling recovered with loss 0".into()))
    } else {
        Ok(Err(format!("loss {loss}")))
    }
}
