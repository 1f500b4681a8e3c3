use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graphon_model::AdjacencyMatrix;

/// Read an adjacency matrix, choosing the format by extension: `.edges` is a
/// list of undirected `i j` pairs (0-indexed, `#` comments allowed, the node
/// count is one past the largest index) and `.csv` is a dense 0/1 matrix.
pub fn read_adjacency(path: &Path) -> Result<AdjacencyMatrix> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let located = |e: Error| Error::Input(format!("{}: {e}", path.display()));
    match ext {
        "edges" => parse_edge_list(&text).map_err(located),
        "csv" => parse_dense(&text).map_err(located),
        _ => Err(Error::Input(format!(
            "{}: expected a .edges or .csv file",
            path.display()
        ))),
    }
}

pub fn parse_edge_list(text: &str) -> Result<AdjacencyMatrix> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace().map(str::parse::<usize>);
        match (fields.next(), fields.next(), fields.next()) {
            (Some(Ok(i)), Some(Ok(j)), None) => edges.push((i, j)),
            _ => {
                return Err(Error::Input(format!(
                    "line {}: expected two node indices, got {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    let n = edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
    AdjacencyMatrix::from_edges(n, &edges)
}

pub fn parse_dense(text: &str) -> Result<AdjacencyMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (r, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::Input(format!("row {}: {e}", r + 1)))?;
        let values = row
            .iter()
            .map(|v| match v {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(Error::Input(format!("row {}: entry {other:?} is not 0 or 1", r + 1))),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push(values);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Input(format!("matrix with {n} rows is not square")));
    }
    let flat = rows.into_iter().flatten().collect();
    let a = Array2::from_shape_vec((n, n), flat).expect("shape checked");
    AdjacencyMatrix::new(a)
}

/// `i j` lines for every edge with `i < j`.
pub fn format_edge_list(a: &AdjacencyMatrix) -> String {
    let m = a.as_array();
    let mut out = String::new();
    for i in 0..a.n() {
        for j in i + 1..a.n() {
            if m[[i, j]] == 1 {
                out.push_str(&format!("{i} {j}\n"));
            }
        }
    }
    out
}
