use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon_model::{CouplingMode, Graphon};
use crate::matcher::MatcherConfig;

/// Output directory override for experiment records.
pub const OUTPUT_DIR_ENV: &str = "GRAPHON_MATCH_OUTPUT_DIR";

/// Graphon named in a configuration document.
///
/// `"gradient"`, `"sinusoidal"`, `{"constant": {"p": 0.3}}` or
/// `{"block": {"probabilities": [[..], ..], "boundaries": [..]}}`; block
/// boundaries default to equal latent mass per block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphonSpec {
    Gradient,
    Sinusoidal,
    Constant {
        p: f64,
    },
    Block {
        probabilities: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boundaries: Option<Vec<f64>>,
    },
}

impl GraphonSpec {
    pub fn build(&self) -> Result<Graphon> {
        match self {
            GraphonSpec::Gradient => Ok(Graphon::gradient()),
            GraphonSpec::Sinusoidal => Ok(Graphon::sinusoidal()),
            GraphonSpec::Constant { p } => Graphon::constant(*p),
            GraphonSpec::Block {
                probabilities,
                boundaries: Some(b),
            } => Graphon::block(probabilities.clone(), b.clone()),
            GraphonSpec::Block {
                probabilities,
                boundaries: None,
            } => Graphon::equal_blocks(probabilities.clone()),
        }
    }
}

fn default_coupling() -> CouplingMode {
    CouplingMode::Identical
}

fn default_baseline_k() -> usize {
    100
}

fn default_output() -> PathBuf {
    PathBuf::from("records.csv")
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graphon: GraphonSpec,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_coupling")]
    pub coupling: CouplingMode,
    #[serde(default)]
    pub matcher: MatcherConfig,
    pub replicates: usize,
    /// Random permutations per cell for the baseline median.
    #[serde(default = "default_baseline_k")]
    pub baseline_k: usize,
    pub master_seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Also record the Wasserstein distance between the latent positions and
    /// the replicated seed positions.
    #[serde(default)]
    pub diagnostics: bool,
    /// With `false`, `wall_ms` is written as 0 so that output files depend
    /// only on the configuration.
    #[serde(default = "default_true")]
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |path: &str, message: String| Error::Config {
            path: path.to_string(),
            message,
        };
        if self.n_grid.is_empty() {
            return Err(invalid("n_grid", "must list at least one network size".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 3) {
            return Err(invalid("n_grid", format!("network size {n} is below 3")));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1".into()));
        }
        if self.baseline_k == 0 {
            return Err(invalid("baseline_k", "must be at least 1".into()));
        }
        if self.matcher.pinned_seeds.is_some() {
            return Err(invalid(
                "matcher.pinned_seeds",
                "pinned seeds cannot be shared across a size grid".into(),
            ));
        }
        if let CouplingMode::ComonotoneNoise { rho } = self.coupling {
            if !(0.0..=1.0).contains(&rho) {
                return Err(invalid("coupling.comonotone_noise.rho", format!("{rho} is outside [0, 1]")));
            }
        }
        self.matcher
            .validate()
            .map_err(|e| invalid("matcher", e.to_string()))?;
        for &n in &self.n_grid {
            self.matcher
                .resolve_d(n)
                .map_err(|e| invalid("n_grid", e.to_string()))?;
        }
        self.graphon
            .build()
            .map_err(|e| invalid("graphon", e.to_string()))?;
        Ok(())
    }

    /// Where records are written: `output`, moved into the directory named by
    /// `GRAPHON_MATCH_OUTPUT_DIR` when that variable is set.
    pub fn output_path(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                let name = self.output.file_name().unwrap_or("records.csv".as_ref());
                PathBuf::from(dir).join(name)
            }
            _ => self.output.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse and validate a JSON configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::SeedCount;

    const MINIMAL: &str = r#"{"graphon": "gradient", "n_grid": [200], "replicates": 1, "master_seed": 7}"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.graphon, GraphonSpec::Gradient);
        assert_eq!(cfg.coupling, CouplingMode::Identical);
        assert_eq!(cfg.matcher, MatcherConfig::default());
        assert_eq!(cfg.baseline_k, 100);
        assert_eq!(cfg.output, PathBuf::from("records.csv"));
        assert!(!cfg.diagnostics);
        assert!(cfg.record_wall_time);
    }

    #[test]
    fn round_trip() {
        let doc = r#"{
            "graphon": {"block": {"probabilities": [[0.8, 0.1], [0.1, 0.6]]}},
            "n_grid": [100, 300],
            "coupling": {"comonotone_noise": {"rho": 0.9}},
            "matcher": {"d": 5, "smoothing": {"bandwidth_constant": 0.7}},
            "replicates": 3,
            "master_seed": 11,
            "diagnostics": true
        }"#;
        let cfg = parse_config(doc).unwrap();
        assert_eq!(cfg.matcher.d, SeedCount::Fixed(5));
        assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
        let minimal = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&minimal.to_json()).unwrap(), minimal);
    }

    #[test]
    fn errors_name_the_key() {
        let err = |doc: &str| match parse_config(doc) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        };
        assert_eq!(
            err(r#"{"graphon": "gradient", "n_grid": [], "replicates": 1, "master_seed": 7}"#),
            "n_grid"
        );
        assert_eq!(
            err(r#"{"graphon": "gradient", "n_grid": [9], "replicates": 0, "master_seed": 7}"#),
            "replicates"
        );
        assert_eq!(
            err(r#"{"graphon": "gradient", "n_grid": [9], "replicates": 1, "master_seed": 7, "matcher": {"dd": 3}}"#),
            "matcher.dd"
        );
        assert_eq!(
            err(r#"{"graphon": "gradient", "n_grid": [9], "replicates": 1, "master_seed": 7, "matcher": {"d": "many"}}"#),
            "matcher.d"
        );
        assert_eq!(
            err(r#"{"graphon": "gradient", "n_grid": [9], "replicates": 1, "master_seed": 7, "extra": 1}"#),
            "extra"
        );
        assert_eq!(
            err(r#"{"graphon": {"constant": {"p": 1.5}}, "n_grid": [9], "replicates": 1, "master_seed": 7}"#),
            "graphon"
        );
    }
}
