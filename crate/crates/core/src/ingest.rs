//! Building flow matrices from raw records, synthetic generators, and the
//! CSV formats used to move matrices and records around.
//!
//! File formats (UTF-8, comma separated, header row, no quoting; lines
//! starting with `#` are ignored):
//!
//! * calls: `origin_id,destination_id,call_count`
//! * trajectories: `user_id,timestamp,location_id`
//! * matrix: one header row of subpopulation labels, then one row per origin

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{default_labels, FlowMatrix};

/// Aggregate number of calls placed from one subpopulation to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallAggregateRecord {
    #[serde(rename = "origin_id")]
    pub origin: usize,
    #[serde(rename = "destination_id")]
    pub destination: usize,
    pub call_count: u64,
}

/// One observation of a user at a subpopulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    #[serde(rename = "user_id")]
    pub user: String,
    pub timestamp: i64,
    #[serde(rename = "location_id")]
    pub location: usize,
}

fn normalize_counts(counts: Vec<Vec<u64>>) -> Result<FlowMatrix> {
    let n = counts.len();
    let rows = counts
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let total: u64 = row.iter().sum();
            if total == 0 {
                // no outgoing data: absorbing self-loop
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                r
            } else {
                row.iter().map(|&c| c as f64 / total as f64).collect()
            }
        })
        .collect();
    FlowMatrix::renormalized(default_labels(n), rows)
}

/// Call-probability matrix: calls from `i` to `j` over all calls from `i`.
pub fn build_calls_matrix(records: &[CallAggregateRecord], n: usize) -> Result<FlowMatrix> {
    let mut counts = vec![vec![0u64; n]; n];
    for (index, r) in records.iter().enumerate() {
        for id in [r.origin, r.destination] {
            if id >= n {
                return Err(Error::IdOutOfRange { index, id, n });
            }
        }
        counts[r.origin][r.destination] += r.call_count;
    }
    normalize_counts(counts)
}

/// Mobility matrix from per-user location sequences.
///
/// Every pair of consecutive records of the same user counts as one
/// transition, including stays at the same location. Records of different
/// users may be interleaved arbitrarily, but each user's records must appear
/// in strictly increasing time order. With `max_gap` set, consecutive records
/// further apart in time than `max_gap` do not form a transition.
pub fn build_mobility_matrix(
    records: &[TrajectoryRecord],
    n: usize,
    max_gap: Option<i64>,
) -> Result<FlowMatrix> {
    let mut counts = vec![vec![0u64; n]; n];
    let mut last: HashMap<&str, (i64, usize)> = HashMap::new();
    for (index, r) in records.iter().enumerate() {
        if r.location >= n {
            return Err(Error::IdOutOfRange {
                index,
                id: r.location,
                n,
            });
        }
        if let Some(&(t, from)) = last.get(r.user.as_str()) {
            if r.timestamp <= t {
                return Err(Error::UnsortedUser {
                    user: r.user.clone(),
                });
            }
            if max_gap.is_none_or(|g| r.timestamp - t <= g) {
                counts[from][r.location] += 1;
            }
        }
        last.insert(r.user.as_str(), (r.timestamp, r.location));
    }
    normalize_counts(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    Identity,
    Uniform,
    /// Node 0 draws half of every other row's off-diagonal mass.
    Hub,
    /// `diag_weight` on the diagonal, the rest spread by seeded draws.
    DiagonalDominant,
}

impl SynthKind {
    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Identity => "identity",
            SynthKind::Uniform => "uniform",
            SynthKind::Hub => "hub",
            SynthKind::DiagonalDominant => "diagonal-dominant",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SynthKind::Identity,
            SynthKind::Uniform,
            SynthKind::Hub,
            SynthKind::DiagonalDominant,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown synthetic matrix kind `{s}`")))
    }
}

/// Deterministic synthetic matrix generator for desk-scale experiments.
pub fn synth_matrix(kind: SynthKind, n: usize, diag_weight: f64, seed: u64) -> Result<FlowMatrix> {
    if n == 0 {
        return Err(Error::Config("synthetic matrix needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&diag_weight) {
        return Err(Error::Config("diag_weight must lie in [0, 1]".into()));
    }
    if n == 1 {
        return Ok(FlowMatrix::identity(1));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let off = 1.0 - diag_weight;
    let mut draw = |targets: &[usize], mass: f64, row: &mut [f64]| {
        let w: Vec<f64> = targets.iter().map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = w.iter().sum();
        for (&j, x) in targets.iter().zip(w) {
            row[j] += mass * x / total;
        }
    };
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        match kind {
            SynthKind::Identity => row[i] = 1.0,
            SynthKind::Uniform => row.iter_mut().for_each(|w| *w = 1.0 / n as f64),
            SynthKind::DiagonalDominant => {
                row[i] = diag_weight;
                let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                draw(&others, off, row);
            }
            SynthKind::Hub => {
                row[i] = diag_weight;
                if i == 0 {
                    let others: Vec<usize> = (1..n).collect();
                    draw(&others, off, row);
                } else {
                    let others: Vec<usize> = (1..n).filter(|&j| j != i).collect();
                    if others.is_empty() {
                        row[0] = off;
                    } else {
                        row[0] = off / 2.0;
                        draw(&others, off / 2.0, row);
                    }
                }
            }
        }
    }
    FlowMatrix::renormalized(default_labels(n), rows)
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .quoting(false)
        .from_reader(r)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Csv {
            path: path.to_path_buf(),
            source: e,
        },
        _ => Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: e.to_string(),
        },
    }
}

fn read_records<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv_reader(open(path)?);
    rdr.deserialize()
        .map(|r| r.map_err(|e| csv_error(path, e)))
        .collect()
}

pub fn read_call_records(path: &Path) -> Result<Vec<CallAggregateRecord>> {
    read_records(path)
}

pub fn read_trajectory_records(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    read_records(path)
}

/// Reads a matrix file as labels and dense rows, without validating them.
pub fn read_matrix_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv_reader(open(path)?);
    let labels: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("`{f}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((labels, rows))
}

/// Reads and validates a matrix file. Rows are taken as written: a file that
/// is not row-stochastic is rejected, not repaired.
pub fn read_matrix(path: &Path) -> Result<FlowMatrix> {
    let (labels, rows) = read_matrix_rows(path)?;
    FlowMatrix::new(labels, rows)
}

/// Writes a matrix in the format [`read_matrix`] reads. Every value is
/// printed in shortest round-trip form, so re-reading is exact.
pub fn write_matrix<W: Write>(out: &mut W, m: &FlowMatrix) -> std::io::Result<()> {
    writeln!(out, "{}", m.labels().join(","))?;
    for i in 0..m.n() {
        let line: Vec<String> = m.row(i).iter().map(|w| format!("{w}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
