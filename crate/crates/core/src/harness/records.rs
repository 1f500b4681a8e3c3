use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column names of the records file, in order.
pub const HEADER: [&str; 10] = [
    "n",
    "d",
    "replicate",
    "loss",
    "baseline_median",
    "identity_loss",
    "smoothing_err",
    "w2_seed",
    "wall_ms",
    "dropped",
];

/// One experiment cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub d: usize,
    pub replicate: usize,
    pub loss: f64,
    pub baseline_median: f64,
    pub identity_loss: f64,
    /// Larger of the two networks' `(1/sqrt(n)) max_k ||W_hat_k - W_k||`;
    /// absent when smoothing is skipped.
    pub smoothing_err: Option<f64>,
    /// Larger of the two networks' seed-sample Wasserstein distances; only
    /// with diagnostics on.
    pub w2_seed: Option<f64>,
    pub wall_ms: f64,
    /// Nodes removed from each network so that `d` divides the size.
    pub dropped: usize,
}

impl ExperimentRecord {
    /// The record as it reads back from a file.
    pub fn rounded(&self) -> Self {
        let r = |x: f64| format_decimal(x).parse::<f64>().expect("formatted number parses");
        Self {
            loss: r(self.loss),
            baseline_median: r(self.baseline_median),
            identity_loss: r(self.identity_loss),
            smoothing_err: self.smoothing_err.map(r),
            w2_seed: self.w2_seed.map(r),
            wall_ms: r(self.wall_ms),
            ..self.clone()
        }
    }

    fn fields(&self) -> [String; 10] {
        let opt = |x: Option<f64>| x.map(format_decimal).unwrap_or_default();
        [
            self.n.to_string(),
            self.d.to_string(),
            self.replicate.to_string(),
            format_decimal(self.loss),
            format_decimal(self.baseline_median),
            format_decimal(self.identity_loss),
            opt(self.smoothing_err),
            opt(self.w2_seed),
            format_decimal(self.wall_ms),
            self.dropped.to_string(),
        ]
    }
}

/// Plain decimal rendering with 10 significant digits, e.g. `0.07042247468`.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.9e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if exp >= 9 {
        format!("{digits}{}", "0".repeat(exp as usize - 9))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

pub fn write_records(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| Error::io(path, e.into());
    out.write_record(HEADER).map_err(csv_err)?;
    for record in records {
        out.write_record(record.fields()).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let header = reader.headers().map_err(|e| Error::io(path, e.into()))?;
    if header.iter().ne(HEADER) {
        return Err(Error::Input(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header
        )));
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Input(format!("{} record {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentRecord {
        ExperimentRecord {
            n: 200,
            d: 3,
            replicate: 4,
            loss: 0.156258817694505,
            baseline_median: 0.2901,
            identity_loss: 0.0,
            smoothing_err: Some(0.0812345678901),
            w2_seed: None,
            wall_ms: 27.345957,
            dropped: 2,
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(0.0), "0");
        assert_eq!(format_decimal(0.5), "0.5000000000");
        assert_eq!(format_decimal(0.156258817694505), "0.1562588177");
        assert_eq!(format_decimal(1234.56789012345), "1234.567890");
        assert_eq!(format_decimal(0.000123456789012), "0.0001234567890");
        assert_eq!(format_decimal(98765432109876.0), "98765432110000");
        assert_eq!(format_decimal(-2.5), "-2.500000000");
        assert_eq!(format_decimal(9.99999999999), "10.00000000");
    }

    #[test]
    fn empty_file_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_records(&[], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "n,d,replicate,loss,baseline_median,identity_loss,smoothing_err,w2_seed,wall_ms,dropped\n"
        );
        assert!(read_records(&path).unwrap().is_empty());
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("r.csv");
        let record = sample();
        write_records(std::slice::from_ref(&record), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "200,3,4,0.1562588177,0.2901000000,0,0.08123456789,,27.34595700,2"
        );
        assert_eq!(read_records(&path).unwrap(), vec![record.rounded()]);
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let target = blocker.join("r.csv");
        match write_records(&[], &target) {
            Err(Error::Io { path, .. }) => assert!(path.starts_with(&blocker)),
            other => panic!("{other:?}"),
        }
    }
}
