//! Node centralities on a flow matrix viewed as a weighted digraph.
//!
//! Self-loops are ignored everywhere. Path-based kinds (closeness,
//! betweenness) use edge length `-ln w`, so the length of a path is minus the
//! log of the probability of following it step by step.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FlowMatrix;

/// Successive power-iteration vectors closer than this (max norm) stop the
/// iteration.
pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 100_000;

// Two path lengths closer than this (relative) count as equally short.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Degree,
    Closeness,
    Betweenness,
    Eigenvector,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 4] = [
        CentralityKind::Degree,
        CentralityKind::Closeness,
        CentralityKind::Betweenness,
        CentralityKind::Eigenvector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::Closeness => "closeness",
            CentralityKind::Betweenness => "betweenness",
            CentralityKind::Eigenvector => "eigenvector",
        }
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CentralityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CentralityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unsupported centrality kind `{s}`")))
    }
}

/// Scores for every node plus the induced ranking (descending score, ties by
/// ascending node index).
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityRanking {
    pub kind: CentralityKind,
    pub scores: Vec<f64>,
    pub ranked: Vec<usize>,
}

impl CentralityRanking {
    pub fn from_scores(kind: CentralityKind, scores: Vec<f64>) -> Self {
        let mut ranked: Vec<usize> = (0..scores.len()).collect();
        ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        CentralityRanking {
            kind,
            scores,
            ranked,
        }
    }

    /// 1-based rank of every node, indexed by node.
    pub fn ranks(&self) -> Vec<usize> {
        let mut out = vec![0; self.ranked.len()];
        for (pos, &node) in self.ranked.iter().enumerate() {
            out[node] = pos + 1;
        }
        out
    }
}

pub fn centrality(m: &FlowMatrix, kind: CentralityKind) -> Result<CentralityRanking> {
    centrality_of_weights(&m.rows(), kind)
}

/// Centrality on an arbitrary nonnegative square weight matrix. Path-based
/// kinds additionally need weights in `(0, 1]` to give nonnegative lengths.
pub fn centrality_of_weights(w: &[Vec<f64>], kind: CentralityKind) -> Result<CentralityRanking> {
    let scores = match kind {
        CentralityKind::Degree => degree(w),
        CentralityKind::Closeness => closeness(w),
        CentralityKind::Betweenness => betweenness(w),
        CentralityKind::Eigenvector => eigenvector(w)?.0,
    };
    Ok(CentralityRanking::from_scores(kind, scores))
}

pub fn top_k(r: &CentralityRanking, k: usize) -> Result<Vec<usize>> {
    let n = r.ranked.len();
    if k == 0 || k > n {
        return Err(Error::TopKOutOfRange { k, n });
    }
    Ok(r.ranked[..k].to_vec())
}

/// Weighted in-strength plus out-strength, self-loops excluded.
pub fn degree(w: &[Vec<f64>]) -> Vec<f64> {
    let n = w.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[i] += w[i][j];
                out[j] += w[i][j];
            }
        }
    }
    out
}

fn lengths(w: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
    w.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|&(j, &x)| j != i && x > 0.0)
                .map(|(j, &x)| (j, -x.ln()))
                .collect()
        })
        .collect()
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // min-heap on distance, then node index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

struct ShortestPaths {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    preds: Vec<Vec<usize>>,
    // settled nodes in nondecreasing distance
    order: Vec<usize>,
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> ShortestPaths {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    let mut settled = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    sigma[source] = 1.0;
    heap.push(Frontier(0.0, source));
    while let Some(Frontier(d, v)) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for &(x, len) in &adj[v] {
            if settled[x] {
                continue;
            }
            let alt = d + len;
            if dist[x].is_finite() && ties(alt, dist[x]) {
                sigma[x] += sigma[v];
                preds[x].push(v);
            } else if alt < dist[x] {
                dist[x] = alt;
                sigma[x] = sigma[v];
                preds[x].clear();
                preds[x].push(v);
                heap.push(Frontier(alt, x));
            }
        }
    }
    ShortestPaths {
        dist,
        sigma,
        preds,
        order,
    }
}

/// Harmonic closeness over outgoing shortest paths; unreachable nodes add 0.
pub fn closeness(w: &[Vec<f64>]) -> Vec<f64> {
    let adj = lengths(w);
    (0..w.len())
        .map(|s| {
            let sp = dijkstra(&adj, s);
            sp.dist
                .iter()
                .enumerate()
                .filter(|&(t, d)| t != s && d.is_finite())
                .map(|(_, &d)| 1.0 / d)
                .sum()
        })
        .collect()
}

/// Unnormalized betweenness over ordered source–target pairs (Brandes).
pub fn betweenness(w: &[Vec<f64>]) -> Vec<f64> {
    let n = w.len();
    let adj = lengths(w);
    let mut cb = vec![0.0; n];
    for s in 0..n {
        let sp = dijkstra(&adj, s);
        let mut delta = vec![0.0; n];
        for &x in sp.order.iter().rev() {
            for &v in &sp.preds[x] {
                delta[v] += sp.sigma[v] / sp.sigma[x] * (1.0 + delta[x]);
            }
            if x != s {
                cb[x] += delta[x];
            }
        }
    }
    cb
}

/// Dominant right eigenvector of `Aᵀ`, where `A` is `w` without its
/// diagonal, normalized to unit sum. Returns the vector and its eigenvalue.
///
/// Iterates `v ← (Aᵀ + I) v`; the shift leaves eigenvectors unchanged and
/// makes the Perron root strictly dominant on periodic graphs such as stars.
pub fn eigenvector(w: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let n = w.len();
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..POWER_MAX_ITERATIONS {
        let av = apply_transpose_offdiag(w, &v);
        let mut next: Vec<f64> = av.iter().zip(&v).map(|(a, b)| a + b).collect();
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if change <= POWER_TOLERANCE {
            let lambda = apply_transpose_offdiag(w, &v).iter().sum();
            return Ok((v, lambda));
        }
    }
    Err(Error::NoConvergence(POWER_MAX_ITERATIONS))
}

pub(crate) fn apply_transpose_offdiag(w: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut out = vec![0.0; n];
    for (i, row) in w.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if i != j {
                out[j] += x * v[i];
            }
        }
    }
    out
}
