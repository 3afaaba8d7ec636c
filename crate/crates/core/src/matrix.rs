//! Row-stochastic flow matrices.
//!
//! A [`FlowMatrix`] holds per-step transition probabilities between
//! subpopulations: `w[i][j]` is the probability that flow originating at `i`
//! ends up at `j`. The same type carries both the mobility matrix and the
//! calls matrix.

use crate::error::{Error, Result, Violation};

/// Absolute tolerance on row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    n: usize,
    labels: Vec<String>,
    weights: Vec<f64>,
    // nonzero entries per row, diagonal first, then ascending column
    sparse: Vec<Vec<(usize, f64)>>,
}

impl FlowMatrix {
    /// Builds a matrix from dense rows, rejecting anything that is not square
    /// and row-stochastic within [`ROW_SUM_TOLERANCE`].
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let violations = Self::check(&labels, &rows);
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        Ok(Self::from_valid(labels, rows))
    }

    /// Like [`FlowMatrix::new`] with labels `"0".."n-1"`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let labels = default_labels(rows.len());
        Self::new(labels, rows)
    }

    /// Divides every row by its sum before validating. Used on counting-based
    /// input where float division leaves rows a few ulps away from 1.
    pub fn renormalized(labels: Vec<String>, mut rows: Vec<Vec<f64>>) -> Result<Self> {
        for row in &mut rows {
            let sum: f64 = row.iter().sum();
            if sum > 0.0 && sum.is_finite() {
                row.iter_mut().for_each(|w| *w /= sum);
            }
        }
        Self::new(labels, rows)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_valid(default_labels(n), rows)
    }

    /// Lists every invariant the given labels and rows break.
    pub fn check(labels: &[String], rows: &[Vec<f64>]) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = rows.len();
        if n == 0 {
            out.push(Violation::new("matrix is empty"));
            return out;
        }
        if labels.len() != n {
            out.push(Violation::new(format!(
                "matrix has {n} rows but {} labels",
                labels.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                out.push(Violation::new(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
                continue;
            }
            if let Some(j) = row
                .iter()
                .position(|w| !w.is_finite() || *w < 0.0 || *w > 1.0)
            {
                out.push(Violation::new(format!(
                    "entry ({i}, {j}) = {} outside [0, 1]",
                    row[j]
                )));
            }
            let sum: f64 = row.iter().sum();
            if !((sum - 1.0).abs() <= ROW_SUM_TOLERANCE) {
                out.push(Violation::new(format!(
                    "row {i} not stochastic (sum = {sum})"
                )));
            }
        }
        out
    }

    fn from_valid(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let sparse = rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut entries = Vec::new();
                if row[i] > 0.0 {
                    entries.push((i, row[i]));
                }
                entries.extend(
                    row.iter()
                        .enumerate()
                        .filter(|&(j, &w)| j != i && w > 0.0)
                        .map(|(j, &w)| (j, w)),
                );
                entries
            })
            .collect();
        let weights = rows.into_iter().flatten().collect();
        FlowMatrix {
            n,
            labels,
            weights,
            sparse,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.weights.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Nonzero `(column, weight)` pairs of row `i`; the diagonal entry, when
    /// present, comes first.
    pub fn nonzeros(&self, i: usize) -> &[(usize, f64)] {
        &self.sparse[i]
    }

    /// Pushes a per-node quantity through the matrix: `out[i] = Σ_j w[j][i]·x[j]`.
    pub fn propagate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for &(i, w) in &self.sparse[j] {
                out[i] += w * xj;
            }
        }
        out
    }

    /// Returns a copy with new weights and the same labels.
    pub fn with_rows(&self, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.labels.clone(), rows)
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}
