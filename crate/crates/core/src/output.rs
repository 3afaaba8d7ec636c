//! CSV emission. Every file starts with a block of `# key: value` lines
//! naming the tool version, a hash of the inputs, and the random generator
//! and seed; nothing time- or host-dependent is written, so identical inputs
//! give byte-identical files.

use std::io::{self, Write};

use sha2::{Digest, Sha256};

use crate::centrality::CentralityRanking;
use crate::rng::RNG_ALGORITHM;
use crate::scenario::Scenario;
use crate::state::PopulationState;
use crate::stationarity::Stationarity;
use crate::sweep::{HeatmapRecord, R0Record};

pub const TOOL_VERSION: &str = concat!("metapop ", env!("CARGO_PKG_VERSION"));

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Header block of an output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub input_sha256: String,
    /// `None` for outputs that involve no randomness.
    pub seed: Option<u64>,
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(input_sha256: String, seed: Option<u64>) -> Self {
        Metadata {
            input_sha256,
            seed,
            extra: Vec::new(),
        }
    }

    pub fn for_scenario(s: &Scenario) -> Self {
        Metadata::new(s.content_hash(), Some(s.rng_seed())).with("engine", s.engine())
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    pub fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# tool: {TOOL_VERSION}")?;
        writeln!(w, "# input_sha256: {}", self.input_sha256)?;
        writeln!(w, "# rng: {RNG_ALGORITHM}")?;
        match self.seed {
            Some(s) => writeln!(w, "# seed: {s}")?,
            None => writeln!(w, "# seed: none")?,
        }
        for (k, v) in &self.extra {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(())
    }
}

/// A missing value is an empty field.
pub fn field<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `t,subpop,S,I,R,A,U`, one row per step and subpopulation.
pub fn write_trajectory<W: Write, S: PopulationState>(w: &mut W, labels: &[String], trajectory: &[S]) -> io::Result<()> {
    writeln!(w, "t,subpop,S,I,R,A,U")?;
    for (t, state) in trajectory.iter().enumerate() {
        for (k, label) in labels.iter().enumerate().take(state.n()) {
            let m = state.marginals(k);
            writeln!(w, "{t},{label},{},{},{},{},{}", m.s, m.i, m.r, m.a, m.u)?;
        }
    }
    Ok(())
}

/// `replica,i_inf,tau,stationary,r0`, one row per replica.
pub fn write_summary<W: Write>(w: &mut W, outcomes: &[Stationarity], r0: f64) -> io::Result<()> {
    writeln!(w, "replica,i_inf,tau,stationary,r0")?;
    for (r, o) in outcomes.iter().enumerate() {
        writeln!(w, "{r},{},{},{},{r0}", field(o.i_inf), field(o.tau), o.is_stationary())?;
    }
    Ok(())
}

/// The one-line run summary, `i_inf=<v>,tau=<t>`.
pub fn summary_line(o: &Stationarity) -> String {
    format!("i_inf={},tau={}", field(o.i_inf), field(o.tau))
}

pub fn write_heatmap<W: Write>(w: &mut W, records: &[HeatmapRecord]) -> io::Result<()> {
    writeln!(w, "omega,psi,xi,lambda,gamma,replica_mean_i_inf,replica_se_i_inf,tau,stationary")?;
    for r in records {
        let p = &r.params;
        let s = &r.summary;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            p.omega,
            p.psi,
            p.xi,
            p.lambda,
            p.gamma,
            field(s.mean_i_inf),
            field(s.se_i_inf),
            field(s.tau),
            s.stationary
        )?;
    }
    Ok(())
}

pub fn write_r0_curve<W: Write>(w: &mut W, records: &[R0Record]) -> io::Result<()> {
    writeln!(w, "r0,seeding,i_inf,tau,stationary")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.r0,
            r.seeding,
            field(r.summary.mean_i_inf),
            field(r.summary.tau),
            r.summary.stationary
        )?;
    }
    Ok(())
}

/// `node_id,score,rank` in rank order; rank 1 is the most central.
pub fn write_ranking<W: Write>(w: &mut W, labels: &[String], ranking: &CentralityRanking) -> io::Result<()> {
    writeln!(w, "node_id,score,rank")?;
    for (pos, &k) in ranking.ranked.iter().enumerate() {
        writeln!(w, "{},{},{}", labels[k], ranking.scores[k], pos + 1)?;
    }
    Ok(())
}
