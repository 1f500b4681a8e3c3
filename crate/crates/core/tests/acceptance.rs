//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::Rng;

use graphon_match::assignment::{brute_force_assignment, solve_assignment, CostMatrix};
use graphon_match::graphon_model::{
    build_probability_matrix, sample_adjacency, sample_latents, Graphon, LatentPositions,
};
use graphon_match::harness::{parse_config, run_experiment_timed, write_records, ExperimentRecord};
use graphon_match::matcher::{
    block_cost_tensor, enumerate_block_permutation, expand_block_permutation, match_probabilities,
    MatcherConfig,
};
use graphon_match::rng::stream;
use graphon_match::smoothing::{estimate_probabilities, max_column_error, SmoothingConfig};
use graphon_match::wasserstein::{replicate_sample, w2_distance, EmpiricalSample};
use graphon_match::{Permutation, ProbabilityMatrix};

const ASSIGNMENT_LIMIT: Duration = Duration::from_secs(5);
const ENUMERATION_LIMIT: Duration = Duration::from_secs(10);
const ENUMERATION_RTOL: f64 = 1e-9;
const RECOVERY_LIMIT: Duration = Duration::from_secs(1);
const SMOOTHING_LIMIT: Duration = Duration::from_secs(300);
const SMOOTHING_CONSTANT: f64 = 3.0;
const SMOOTHING_MONOTONE_MIN: usize = 8;
const WASSERSTEIN_LIMIT: Duration = Duration::from_secs(30);
const WASSERSTEIN_SLOPE: (f64, f64) = (-0.75, -0.25);
const CONSISTENCY_LIMIT: Duration = Duration::from_secs(15 * 60);
const CONSISTENCY_MIN: usize = 9;
const TIME_RATIO_MAX: f64 = 10.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: usize, name: &str, outcome: &Outcome) {
    let tag = if outcome.passed { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id} {name}: {}", outcome.detail);
}

/// Lexicographic successor; false after the last permutation.
fn next_perm(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> ProbabilityMatrix {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random();
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    ProbabilityMatrix::new(a).unwrap()
}

fn assignment_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = stream(1, "acceptance-assignment");
    let mut disagreements = Vec::new();
    for case in 0..200 {
        let n = 2 + case % 6;
        // every other instance has small integer costs with many ties
        let costs = Array2::from_shape_fn((n, n), |_| {
            if case % 2 == 0 {
                rng.random::<f64>() * 10.0
            } else {
                rng.random_range(0..4) as f64
            }
        });
        let costs = CostMatrix::new(costs).unwrap();
        let (p, c) = solve_assignment(&costs);
        let (bp, bc) = brute_force_assignment(&costs).unwrap();

        // independent enumeration: strict improvement keeps the first optimum
        let a = costs.as_array();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = (f64::INFINITY, perm.clone());
        loop {
            let total: f64 = (0..n).map(|i| a[[i, perm[i]]]).sum();
            if total < best.0 {
                best = (total, perm.clone());
            }
            if !next_perm(&mut perm) {
                break;
            }
        }
        if c != bc || c != best.0 || p != bp || p.as_slice() != best.1.as_slice() {
            disagreements.push(case);
        }
    }
    let elapsed = started.elapsed();
    Outcome {
        passed: disagreements.is_empty() && elapsed < ASSIGNMENT_LIMIT,
        detail: format!(
            "{}/200 agree (cost and permutation), {:.2?} (limit {:?}); disagreeing cases {:?}",
            200 - disagreements.len(),
            elapsed,
            ASSIGNMENT_LIMIT,
            disagreements
        ),
    }
}

fn enumeration_exactness() -> Outcome {
    let started = Instant::now();
    let mut rng = stream(2, "acceptance-enumeration");
    let mut worst_tensor: f64 = 0.0;
    let mut worst_min: f64 = 0.0;
    for case in 0..50 {
        let d = 2 + case % 4;
        let n = 4 * d;
        let m1 = random_symmetric(n, &mut rng);
        let m2 = random_symmetric(n, &mut rng);
        let tensor = block_cost_tensor(&m1, &m2, d).unwrap();
        let mut sigma: Vec<usize> = (0..d).collect();
        let mut best = f64::INFINITY;
        loop {
            let q = expand_block_permutation(&Permutation::new(sigma.clone()).unwrap(), 4);
            let moved = q.conjugate(m1.as_array()).unwrap();
            let direct: f64 = moved
                .iter()
                .zip(m2.as_array().iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            worst_tensor = worst_tensor.max((tensor.cost(&sigma) - direct).abs() / direct);
            best = best.min(direct);
            if !next_perm(&mut sigma) {
                break;
            }
        }
        let (_, found) = enumerate_block_permutation(&m1, &m2, d, 9).unwrap();
        worst_min = worst_min.max((found - best).abs() / best);
    }
    let elapsed = started.elapsed();
    Outcome {
        passed: worst_tensor <= ENUMERATION_RTOL
            && worst_min <= ENUMERATION_RTOL
            && elapsed < ENUMERATION_LIMIT,
        detail: format!(
            "max relative error tensor-vs-direct {worst_tensor:.2e}, search-vs-minimum {worst_min:.2e} \
             (tolerance {ENUMERATION_RTOL:e}), {elapsed:.2?} (limit {ENUMERATION_LIMIT:?})"
        ),
    }
}

fn exact_recovery() -> Outcome {
    let started = Instant::now();
    let graphon = Graphon::equal_blocks(vec![
        vec![0.90, 0.10, 0.20, 0.30],
        vec![0.10, 0.70, 0.40, 0.15],
        vec![0.20, 0.40, 0.55, 0.05],
        vec![0.30, 0.15, 0.05, 0.35],
    ])
    .unwrap();
    let n = 200;
    // latent grid with exactly n/4 nodes per block, shuffled
    let shuffle = Permutation::random(n, &mut stream(3, "acceptance-grid"));
    let grid = LatentPositions::new((0..n).map(|i| (shuffle[i] as f64 + 0.5) / n as f64).collect()).unwrap();
    let block_of = |i: usize| (grid.values()[i] * 4.0) as usize;
    let w1 = build_probability_matrix(&graphon, &grid).unwrap();
    let relabel = Permutation::random(n, &mut stream(3, "acceptance-relabel"));
    let w2 = ProbabilityMatrix::new(relabel.conjugate(w1.as_array()).unwrap()).unwrap();
    let seeds1: Vec<usize> = (0..4).map(|b| (0..n).find(|&i| block_of(i) == b).unwrap()).collect();
    // blocks visited in a different order on the second network
    let seeds2: Vec<usize> = [2, 0, 3, 1]
        .iter()
        .map(|&b| (0..n).find(|&i| block_of(relabel[i]) == b).unwrap())
        .collect();
    let cfg = MatcherConfig {
        use_oracle_probabilities: true,
        pinned_seeds: Some((seeds1, seeds2)),
        ..Default::default()
    };
    let mut result = match_probabilities(&w1, &w2, &cfg, &mut stream(3, "acceptance-match")).unwrap();
    let loss = result.evaluate(&w1, &w2).unwrap();
    let elapsed = started.elapsed();
    Outcome {
        passed: loss == 0.0 && elapsed < RECOVERY_LIMIT,
        detail: format!(
            "loss {loss:e} (required exactly 0), block pairing {:?}, {elapsed:.2?} (limit {RECOVERY_LIMIT:?})",
            result.q_tilde.as_slice()
        ),
    }
}

fn smoothing_rate() -> Outcome {
    let started = Instant::now();
    let sizes = [200, 500, 1000, 2000];
    let graphon = Graphon::gradient();
    let cfg = SmoothingConfig::default();
    let mut stats = vec![vec![0.0; sizes.len()]; 10];
    for (r, row) in stats.iter_mut().enumerate() {
        for (k, &n) in sizes.iter().enumerate() {
            let mut rng = stream(400 + r as u64, &format!("acceptance-smoothing-{n}"));
            let xi = sample_latents(n, &mut rng).unwrap();
            let w = build_probability_matrix(&graphon, &xi).unwrap();
            let a = sample_adjacency(&w, &mut rng);
            let w_hat = estimate_probabilities(&a, &cfg).unwrap();
            row[k] = max_column_error(&w_hat, &w).unwrap();
        }
    }
    let monotone = stats
        .iter()
        .filter(|row| row.windows(2).all(|p| p[1] < p[0]))
        .count();
    let medians: Vec<f64> = (0..sizes.len())
        .map(|k| median(stats.iter().map(|row| row[k]).collect()))
        .collect();
    let n = 2000.0f64;
    let bound = SMOOTHING_CONSTANT * (n.ln() / n).sqrt();
    let elapsed = started.elapsed();
    Outcome {
        passed: monotone >= SMOOTHING_MONOTONE_MIN && medians[3] <= bound && elapsed < SMOOTHING_LIMIT,
        detail: format!(
            "monotone in {monotone}/10 replicates (need {SMOOTHING_MONOTONE_MIN}), medians {:?}, \
             n=2000 median {:.4} vs bound {bound:.4}, {elapsed:.2?} (limit {SMOOTHING_LIMIT:?})",
            medians.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(),
            medians[3]
        ),
    }
}

fn wasserstein_rate() -> Outcome {
    let started = Instant::now();
    let n = 4096;
    let ds = [16usize, 64, 256, 1024];
    let mut medians = Vec::new();
    for &d in &ds {
        let mut dists = Vec::new();
        for r in 0..50 {
            let mut rng = stream(500 + r, &format!("acceptance-w2-{d}"));
            let full: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let picks = rand::seq::index::sample(&mut rng, n, d);
            let seeds = EmpiricalSample::new(picks.iter().map(|i| full[i]).collect()).unwrap();
            let replicated = replicate_sample(&seeds, n / d).unwrap();
            dists.push(w2_distance(&EmpiricalSample::new(full).unwrap(), &replicated).unwrap());
        }
        medians.push(median(dists));
    }
    let xs: Vec<f64> = ds.iter().map(|&d| (d as f64).ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let elapsed = started.elapsed();
    Outcome {
        passed: (WASSERSTEIN_SLOPE.0..=WASSERSTEIN_SLOPE.1).contains(&slope)
            && elapsed < WASSERSTEIN_LIMIT,
        detail: format!(
            "log-log slope {slope:.3} (range {WASSERSTEIN_SLOPE:?}), medians {:?}, {elapsed:.2?} (limit {WASSERSTEIN_LIMIT:?})",
            medians.iter().map(|m| format!("{m:.5}")).collect::<Vec<_>>()
        ),
    }
}

const EXPERIMENT: &str = r#"{
    "graphon": "gradient",
    "n_grid": [200, 500, 1000, 2000],
    "coupling": "identical",
    "matcher": {"d": "auto", "d_max": 9},
    "replicates": 10,
    "baseline_k": 100,
    "master_seed": 20240601,
    "record_wall_time": false
}"#;

fn at(records: &[(ExperimentRecord, Duration)], n: usize) -> Vec<&(ExperimentRecord, Duration)> {
    records.iter().filter(|(r, _)| r.n == n).collect()
}

fn main() {
    let mut outcomes = Vec::new();
    let mut record = |id: usize, name: &str, outcome: Outcome| {
        report(id, name, &outcome);
        outcomes.push(outcome.passed);
    };
    record(1, "assignment oracle equivalence", assignment_oracle());
    record(2, "block enumeration exactness", enumeration_exactness());
    record(3, "exact recovery on block instances", exact_recovery());
    record(4, "smoothing rate", smoothing_rate());
    record(5, "Wasserstein seed rate", wasserstein_rate());

    let cfg = parse_config(EXPERIMENT).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let first = run_experiment_timed(&cfg).unwrap();
    let elapsed = started.elapsed();
    let first_records: Vec<ExperimentRecord> = first.iter().map(|(r, _)| r.clone()).collect();
    write_records(&first_records, &dir.path().join("first.csv")).unwrap();

    let small = at(&first, 200);
    let large = at(&first, 2000);
    let improved = small
        .iter()
        .zip(&large)
        .filter(|(s, l)| l.0.loss < s.0.loss)
        .count();
    let beats: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .map(|&n| (n, at(&first, n).iter().filter(|(r, _)| r.loss < r.baseline_median).count()))
        .collect();
    let median_loss: Vec<String> = cfg
        .n_grid
        .iter()
        .map(|&n| format!("{n}: {:.4}", median(at(&first, n).iter().map(|(r, _)| r.loss).collect())))
        .collect();
    record(
        6,
        "end-to-end consistency",
        Outcome {
            passed: improved >= CONSISTENCY_MIN
                && beats.iter().all(|&(_, b)| b >= CONSISTENCY_MIN)
                && elapsed < CONSISTENCY_LIMIT,
            detail: format!(
                "loss(2000) < loss(200) in {improved}/10 pairs, below baseline median per n {beats:?} \
                 (need {CONSISTENCY_MIN}), median loss {median_loss:?}, {elapsed:.2?} (limit {CONSISTENCY_LIMIT:?})"
            ),
        },
    );

    let median_time = |n| median(at(&first, n).iter().map(|(_, t)| t.as_secs_f64()).collect());
    let (t1000, t2000) = (median_time(1000), median_time(2000));
    let ratio = t2000 / t1000;
    record(
        7,
        "complexity guard",
        Outcome {
            passed: ratio <= TIME_RATIO_MAX,
            detail: format!(
                "median match_graphs time {t1000:.3}s at n=1000, {t2000:.3}s at n=2000, ratio {ratio:.2} (limit {TIME_RATIO_MAX})"
            ),
        },
    );

    let second: Vec<ExperimentRecord> = run_experiment_timed(&cfg)
        .unwrap()
        .into_iter()
        .map(|(r, _)| r)
        .collect();
    write_records(&second, &dir.path().join("second.csv")).unwrap();
    let a = std::fs::read(dir.path().join("first.csv")).unwrap();
    let b = std::fs::read(dir.path().join("second.csv")).unwrap();
    record(
        8,
        "determinism",
        Outcome {
            passed: !a.is_empty() && a == b,
            detail: format!(
                "two runs with master seed {} give {} and {} bytes, identical: {}",
                cfg.master_seed,
                a.len(),
                b.len(),
                a == b
            ),
        },
    );

    let passed = outcomes.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if passed != outcomes.len() {
        std::process::exit(1);
    }
}
