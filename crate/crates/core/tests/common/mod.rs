//! Independent reference implementations and random instance generators
//! shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use metapop::ingest::{CallAggregateRecord, TrajectoryRecord};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- records

pub fn random_calls(rng: &mut TestRng, n: usize, max_records: usize) -> Vec<CallAggregateRecord> {
    let k = rng.random_range(0..=max_records);
    (0..k)
        .map(|_| CallAggregateRecord {
            origin: rng.random_range(0..n),
            destination: rng.random_range(0..n),
            call_count: rng.random_range(0..50),
        })
        .collect()
}

/// Per-user streams in increasing time, interleaved at random.
pub fn random_trajectories(rng: &mut TestRng, n: usize, max_records: usize) -> Vec<TrajectoryRecord> {
    let users = rng.random_range(1..=20);
    let total = rng.random_range(0..=max_records);
    let mut owner: Vec<usize> = (0..total).map(|_| rng.random_range(0..users)).collect();
    owner.shuffle(rng);
    let mut clock = vec![0i64; users];
    owner
        .into_iter()
        .map(|u| {
            clock[u] += rng.random_range(1..6);
            TrajectoryRecord {
                user: format!("u{u}"),
                timestamp: clock[u],
                location: rng.random_range(0..n),
            }
        })
        .collect()
}

fn normalize_tally(tally: &HashMap<(usize, usize), u64>, n: usize) -> Vec<Vec<f64>> {
    let mut out_total: HashMap<usize, u64> = HashMap::new();
    for (&(i, _), &c) in tally {
        *out_total.entry(i).or_default() += c;
    }
    (0..n)
        .map(|i| {
            let total = out_total.get(&i).copied().unwrap_or(0);
            (0..n)
                .map(|j| {
                    if total == 0 {
                        if i == j { 1.0 } else { 0.0 }
                    } else {
                        tally.get(&(i, j)).copied().unwrap_or(0) as f64 / total as f64
                    }
                })
                .collect()
        })
        .collect()
}

/// Tally of calls per ordered pair, divided by the origin's total.
pub fn calls_oracle(records: &[CallAggregateRecord], n: usize) -> Vec<Vec<f64>> {
    let mut tally = HashMap::new();
    for r in records {
        *tally.entry((r.origin, r.destination)).or_insert(0u64) += r.call_count;
    }
    normalize_tally(&tally, n)
}

/// Groups records by user, sorts each group by time and counts consecutive
/// pairs.
pub fn mobility_oracle(records: &[TrajectoryRecord], n: usize) -> Vec<Vec<f64>> {
    let mut by_user: BTreeMap<&str, Vec<(i64, usize)>> = BTreeMap::new();
    for r in records {
        by_user.entry(&r.user).or_default().push((r.timestamp, r.location));
    }
    let mut tally = HashMap::new();
    for seq in by_user.values_mut() {
        seq.sort();
        for pair in seq.windows(2) {
            *tally.entry((pair[0].1, pair[1].1)).or_insert(0u64) += 1;
        }
    }
    normalize_tally(&tally, n)
}

// ---------------------------------------------------------------- graphs

/// Row-stochastic, strongly connected (a directed cycle is always present),
/// every off-diagonal weight strictly inside (0, 1).
pub fn random_strong_digraph(rng: &mut TestRng, n: usize) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; n]; n];
    if n == 1 {
        w[0][0] = 1.0;
        return w;
    }
    for (i, row) in w.iter_mut().enumerate() {
        let diag: f64 = rng.random_range(0.3..0.9);
        let mut raw = vec![0.0; n];
        raw[(i + 1) % n] = rng.random_range(0.1..1.0);
        for (j, x) in raw.iter_mut().enumerate() {
            if j != i && j != (i + 1) % n && rng.random_bool(0.4) {
                *x = rng.random_range(0.1..1.0);
            }
        }
        let sum: f64 = raw.iter().sum();
        for j in 0..n {
            row[j] = (1.0 - diag) * raw[j] / sum;
        }
        row[i] = diag;
        let total: f64 = row.iter().sum();
        row[i] += 1.0 - total;
    }
    w
}

pub fn degree_oracle(w: &[Vec<f64>]) -> Vec<f64> {
    let n = w.len();
    (0..n)
        .map(|v| {
            let out: f64 = (0..n).filter(|&j| j != v).map(|j| w[v][j]).sum();
            let inn: f64 = (0..n).filter(|&j| j != v).map(|j| w[j][v]).sum();
            out + inn
        })
        .collect()
}

/// Every simple path from `s`, as (target, length, interior nodes).
fn simple_paths(w: &[Vec<f64>], s: usize) -> Vec<(usize, f64, Vec<usize>)> {
    fn dfs(
        w: &[Vec<f64>],
        at: usize,
        len: f64,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        out: &mut Vec<(usize, f64, Vec<usize>)>,
    ) {
        for next in 0..w.len() {
            if next == at || on_path[next] || w[at][next] <= 0.0 {
                continue;
            }
            let l = len - w[at][next].ln();
            out.push((next, l, path[1..].to_vec()));
            on_path[next] = true;
            path.push(next);
            dfs(w, next, l, path, on_path, out);
            path.pop();
            on_path[next] = false;
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; w.len()];
    on_path[s] = true;
    dfs(w, s, 0.0, &mut vec![s], &mut on_path, &mut out);
    out
}

/// Closeness and betweenness by enumerating every simple path.
pub fn path_oracles(w: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = w.len();
    let mut closeness = vec![0.0; n];
    let mut betweenness = vec![0.0; n];
    for s in 0..n {
        let paths = simple_paths(w, s);
        for t in (0..n).filter(|&t| t != s) {
            let to_t: Vec<_> = paths.iter().filter(|p| p.0 == t).collect();
            let Some(best) = to_t.iter().map(|p| p.1).min_by(f64::total_cmp) else {
                continue;
            };
            closeness[s] += 1.0 / best;
            let shortest: Vec<_> = to_t.iter().filter(|p| p.1 - best <= 1e-12 * best.max(1.0)).collect();
            for v in 0..n {
                let through = shortest.iter().filter(|p| p.2.contains(&v)).count();
                betweenness[v] += through as f64 / shortest.len() as f64;
            }
        }
    }
    (closeness, betweenness)
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Dominant eigenvector of `Aᵀ` (off-diagonal part), unit sum, from a high
/// power of `I + Aᵀ` built by repeated squaring.
pub fn eigen_oracle(w: &[Vec<f64>]) -> Vec<f64> {
    let n = w.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { w[j][i] }).collect())
        .collect();
    for _ in 0..64 {
        m = matmul(&m, &m);
        let max = m.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        m.iter_mut().flatten().for_each(|x| *x /= max);
    }
    let v: Vec<f64> = m.iter().map(|row| row.iter().sum()).collect();
    let total: f64 = v.iter().sum();
    v.iter().map(|x| x / total).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- dynamics

/// Row-stochastic matrix with random sparsity; rows may be pure self-loops.
pub fn random_stochastic(rng: &mut TestRng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let raw: Vec<f64> = (0..n)
                .map(|j| {
                    if i == j || rng.random_bool(0.5) {
                        rng.random_range(0.0..1.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            let sum: f64 = raw.iter().sum();
            let mut row: Vec<f64> = if sum > 0.0 {
                raw.iter().map(|x| x / sum).collect()
            } else {
                (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
            };
            let total: f64 = row.iter().sum();
            row[i] += 1.0 - total;
            if row[i] < 0.0 {
                row[i] = 0.0;
            }
            row
        })
        .collect()
}

pub fn random_unit(rng: &mut TestRng) -> f64 {
    rng.random_range(0.0..=1.0)
}

pub fn random_population(rng: &mut TestRng, n: usize, max: u64) -> Vec<u64> {
    (0..n).map(|_| rng.random_range(0..=max)).collect()
}
