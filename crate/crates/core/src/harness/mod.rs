//! Simulation experiments over a grid of network sizes, with CSV output.
//!
//! Every `(n, replicate)` cell draws from its own stream derived from the
//! master seed and the cell labels, so records do not depend on the order in
//! which cells run.

mod adjacency;
mod config;
mod records;

use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub use adjacency::{format_edge_list, parse_dense, parse_edge_list, read_adjacency};
pub use config::{parse_config, ExperimentConfig, GraphonSpec, OUTPUT_DIR_ENV};
pub use records::{format_decimal, read_records, write_records, ExperimentRecord, HEADER};

use crate::error::{Error, Result};
use crate::evaluation::baseline_losses;
use crate::graphon_model::{
    build_probability_matrix, couple_latents, sample_adjacency, sample_latents, Graphon,
};
use crate::matcher::{match_graphs, match_probabilities};
use crate::rng::StreamSeed;
use crate::smoothing::max_column_error;
use crate::wasserstein::seed_sample_distance;

/// Stream for one cell; every random step of the cell draws from a child of it.
pub fn cell_seed(master_seed: u64, n: usize, replicate: usize) -> StreamSeed {
    StreamSeed::new(master_seed)
        .child(&format!("n={n}"))
        .child(&format!("replicate={replicate}"))
}

/// Run every cell of the grid. Records come back ordered by `n` (grid order)
/// and then replicate.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    Ok(run_experiment_timed(cfg)?.into_iter().map(|(r, _)| r).collect())
}

/// [`run_experiment`], also returning the measured matching time of every
/// cell whether or not `record_wall_time` is set.
pub fn run_experiment_timed(cfg: &ExperimentConfig) -> Result<Vec<(ExperimentRecord, Duration)>> {
    cfg.validate()?;
    let graphon = cfg.graphon.build()?;
    let cells: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.replicates).map(move |r| (n, r)))
        .collect();
    let run = |&(n, r): &(usize, usize)| {
        run_cell(cfg, &graphon, n, r).map_err(|e| Error::Cell {
            n,
            replicate: r,
            source: Box::new(e),
        })
    };
    #[cfg(feature = "parallel")]
    let records = cells.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let records = cells.iter().map(run).collect();
    records
}

/// [`run_experiment`] followed by [`write_records`] to
/// [`ExperimentConfig::output_path`].
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<(Vec<ExperimentRecord>, std::path::PathBuf)> {
    let records = run_experiment(cfg)?;
    let path = cfg.output_path();
    write_records(&records, &path)?;
    Ok((records, path))
}

pub fn run_cell(
    cfg: &ExperimentConfig,
    graphon: &Graphon,
    n: usize,
    replicate: usize,
) -> Result<(ExperimentRecord, Duration)> {
    let seed = cell_seed(cfg.master_seed, n, replicate);
    let xi = sample_latents(n, &mut seed.child("latents").rng())?;
    let eta = couple_latents(&xi, cfg.coupling, &mut seed.child("coupling").rng())?;
    let w1 = build_probability_matrix(graphon, &xi)?;
    let w2 = build_probability_matrix(graphon, &eta)?;
    let mut sampler = seed.child("adjacency").rng();
    let a1 = sample_adjacency(&w1, &mut sampler);
    let a2 = sample_adjacency(&w2, &mut sampler);

    let mut rng = seed.child("match").rng();
    let started = Instant::now();
    let mut result = if cfg.matcher.use_oracle_probabilities {
        match_probabilities(&w1, &w2, &cfg.matcher, &mut rng)?
    } else {
        match_graphs(&a1, &a2, &cfg.matcher, &mut rng)?
    };
    let elapsed = started.elapsed();

    let loss = result.evaluate(&w1, &w2)?;
    let w1_kept = w1.restrict(&result.retained.0);
    let w2_kept = w2.restrict(&result.retained.1);
    let baseline = baseline_losses(
        &w1_kept,
        &w2_kept,
        &mut seed.child("baseline").rng(),
        cfg.baseline_k,
    )?;
    let smoothing_err = if cfg.matcher.use_oracle_probabilities {
        None
    } else {
        let e1 = max_column_error(&result.denoised.0, &w1_kept)?;
        let e2 = max_column_error(&result.denoised.1, &w2_kept)?;
        Some(e1.max(e2))
    };
    let w2_seed = if cfg.diagnostics {
        let x1 = xi.select(&result.retained.0);
        let x2 = eta.select(&result.retained.1);
        let d1 = seed_sample_distance(x1.values(), &result.seeds1.indices)?;
        let d2 = seed_sample_distance(x2.values(), &result.seeds2.indices)?;
        Some(d1.max(d2))
    } else {
        None
    };
    let record = ExperimentRecord {
        n,
        d: result.d,
        replicate,
        loss,
        baseline_median: baseline.median,
        identity_loss: baseline.identity_loss,
        smoothing_err,
        w2_seed,
        wall_ms: if cfg.record_wall_time {
            elapsed.as_secs_f64() * 1e3
        } else {
            0.0
        },
        dropped: result.dropped.0.len(),
    };
    Ok((record, elapsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        parse_config(
            r#"{"graphon": "gradient", "n_grid": [40, 61], "replicates": 2, "master_seed": 3,
                "baseline_k": 20, "diagnostics": true, "record_wall_time": false}"#,
        )
        .unwrap()
    }

    #[test]
    fn one_record_per_cell_in_grid_order() {
        let records = run_experiment(&small_config()).unwrap();
        let cells: Vec<(usize, usize)> = records.iter().map(|r| (r.n, r.replicate)).collect();
        assert_eq!(cells, vec![(40, 0), (40, 1), (61, 0), (61, 1)]);
        for r in &records {
            assert_eq!(r.dropped, r.n % r.d);
            assert!(r.loss >= 0.0 && r.baseline_median >= 0.0);
            // the two networks drop their remainder nodes independently
            assert_eq!(r.identity_loss == 0.0, r.dropped == 0);
            assert!(r.smoothing_err.is_some() && r.w2_seed.is_some());
            assert_eq!(r.wall_ms, 0.0);
        }
    }

    #[test]
    fn cells_do_not_depend_on_the_grid() {
        let cfg = small_config();
        let graphon = cfg.graphon.build().unwrap();
        let (alone, _) = run_cell(&cfg, &graphon, 61, 1).unwrap();
        let mut reordered = cfg.clone();
        reordered.n_grid = vec![61];
        reordered.replicates = 2;
        let records = run_experiment(&reordered).unwrap();
        assert_eq!(records[1], alone);
        assert_eq!(run_experiment(&cfg).unwrap()[3], alone);
    }

    #[test]
    fn oracle_mode_has_no_smoothing_error() {
        let mut cfg = small_config();
        cfg.matcher.use_oracle_probabilities = true;
        let records = run_experiment(&cfg).unwrap();
        assert!(records.iter().all(|r| r.smoothing_err.is_none()));
    }

    #[test]
    fn cell_errors_carry_their_coordinates() {
        let mut cfg = small_config();
        cfg.coupling = crate::graphon_model::CouplingMode::ComonotoneNoise { rho: 2.0 };
        assert!(cfg.validate().is_err());
        let graphon = cfg.graphon.build().unwrap();
        assert!(run_cell(&cfg, &graphon, 40, 0).is_err());
    }
}
