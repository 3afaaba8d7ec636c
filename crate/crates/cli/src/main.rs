//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when the input is invalid, 2 on I/O failure
//! or bad usage.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use metapop::config::{load_config, ScenarioConfig};
use metapop::ingest::{
    build_calls_matrix, build_mobility_matrix, read_call_records, read_matrix, read_trajectory_records,
    synth_matrix, write_matrix, SynthKind,
};
use metapop::output::{
    sha256_hex, summary_line, write_heatmap, write_r0_curve, write_ranking, write_summary, write_trajectory,
    Metadata,
};
use metapop::sweep::{heatmap, r0_curve, spread_along};
use metapop::{
    centrality, deterministic, stochastic, validate_scenario, CentralityKind, Engine, Param, PopulationState,
    RunSummary, Scenario,
};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "metapop", version, about = "Metapopulation disease and awareness simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trajectory and summary.
    Run(RunArgs),
    /// Run the grid and r0 curve described by the scenario's [sweep] section.
    Sweep(RunArgs),
    /// Rank the subpopulations of a matrix by centrality.
    Centrality(CentralityArgs),
    /// Build a matrix file from call or trajectory records.
    BuildMatrix(BuildArgs),
    /// Write a synthetic matrix file.
    Synth(SynthArgs),
    /// Check a scenario file and report every problem found.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario's engine.
    #[arg(long)]
    engine: Option<Engine>,
    /// Stochastic replicas per run or sweep cell.
    #[arg(long)]
    replicas: Option<usize>,
    /// Overrides the scenario's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replicas and sweep cells.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CentralityArgs {
    /// Matrix file to rank.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    matrix: Option<PathBuf>,
    /// Rank the mobility matrix of this scenario instead.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory; one `centrality_<kind>.csv` per kind.
    #[arg(long)]
    out: PathBuf,
    /// Kinds to compute; all four by default.
    #[arg(long = "kind")]
    kinds: Vec<CentralityKind>,
}

#[derive(Args)]
struct BuildArgs {
    /// CSV `origin_id,destination_id,call_count`.
    #[arg(long, conflicts_with = "trajectories", required_unless_present = "trajectories")]
    calls: Option<PathBuf>,
    /// CSV `user_id,timestamp,location_id`.
    #[arg(long)]
    trajectories: Option<PathBuf>,
    /// Number of subpopulations.
    #[arg(long)]
    n: usize,
    /// Trajectory records further apart than this are not chained into a
    /// transition. Unlimited by default.
    #[arg(long)]
    max_gap: Option<i64>,
    /// Matrix file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    kind: SynthKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.9)]
    diag_weight: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matrix file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: PathBuf,
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<metapop::Error> for Failure {
    fn from(e: metapop::Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Io(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Centrality(a) => rank(a),
        Command::BuildMatrix(a) => build(a),
        Command::Synth(a) => synth(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Renders a file as metadata header plus body.
fn render(meta: &Metadata, body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    meta.write(&mut buf).expect("writing to memory");
    body(&mut buf).expect("writing to memory");
    buf
}

fn set_threads(threads: Option<usize>) -> Outcome {
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn load(a: &RunArgs) -> Result<(ScenarioConfig, Scenario), Failure> {
    let (cfg, base) = load_config(&a.scenario)?;
    let mut s = cfg.to_scenario(&base)?;
    if let Some(e) = a.engine {
        s = s.with_engine(e);
    }
    if let Some(seed) = a.seed {
        s = s.with_rng_seed(seed);
    }
    Ok((cfg, s))
}

fn run(a: RunArgs) -> Outcome {
    set_threads(a.threads)?;
    let (_, s) = load(&a)?;
    let replicas = a.replicas.unwrap_or(1).max(1);
    match s.engine() {
        Engine::Deterministic => {
            let summary = deterministic::run(&s)?;
            emit_runs(&a.out, &s, &[summary])
        }
        Engine::Stochastic => {
            let runs = (0..replicas as u64)
                .into_par_iter()
                .map(|r| stochastic::mc_run(&s, r))
                .collect::<Result<Vec<_>, _>>()?;
            emit_runs(&a.out, &s, &runs)
        }
    }
}

fn emit_runs<S: PopulationState>(out: &Path, s: &Scenario, runs: &[RunSummary<S>]) -> Outcome {
    let meta = Metadata::for_scenario(s).with("replicas", runs.len());
    for (r, run) in runs.iter().enumerate() {
        let name = if runs.len() == 1 {
            "trajectory.csv".to_string()
        } else {
            format!("trajectory_replica{r}.csv")
        };
        let bytes = render(&meta.clone().with("replica", r), |w| {
            write_trajectory(w, s.labels(), &run.trajectory)
        });
        write_file(&out.join(name), &bytes)?;
    }
    let outcomes: Vec<_> = runs.iter().map(|r| r.stationarity).collect();
    let bytes = render(&meta, |w| write_summary(w, &outcomes, s.params().r0()));
    write_file(&out.join("summary.csv"), &bytes)?;
    for (r, o) in outcomes.iter().enumerate() {
        if runs.len() == 1 {
            println!("{}", summary_line(o));
        } else {
            println!("replica={r},{}", summary_line(o));
        }
    }
    Ok(())
}

fn sweep(a: RunArgs) -> Outcome {
    set_threads(a.threads)?;
    let (cfg, s) = load(&a)?;
    let Some(sc) = cfg.sweep else {
        return Err(Failure::Invalid("scenario has no [sweep] section".into()));
    };
    let replicas = a.replicas.unwrap_or(sc.replicas);
    let mut grid = sc.grid();
    grid.replicas = replicas;
    let base = Metadata::for_scenario(&s).with("replicas", replicas);

    if !grid.axes.is_empty() {
        let pairs: Vec<Option<[f64; 2]>> = if sc.pairs.is_empty() {
            vec![None]
        } else {
            sc.pairs.iter().copied().map(Some).collect()
        };
        for pair in pairs {
            let (template, name) = match pair {
                None => (s.clone(), "heatmap.csv".to_string()),
                Some([lambda, gamma]) => {
                    let mut p = *s.params();
                    p.lambda = lambda;
                    p.gamma = gamma;
                    (s.with_params(p)?, format!("heatmap_lambda{lambda}_gamma{gamma}.csv"))
                }
            };
            let records = heatmap(&template, &grid)?;
            for (k, r) in records.iter().enumerate() {
                if let Some(e) = &r.error {
                    eprintln!("{name}: cell {k} failed: {e}");
                }
            }
            let p = template.params();
            let meta = base.clone().with("lambda", p.lambda).with("gamma", p.gamma);
            write_file(&a.out.join(&name), &render(&meta, |w| write_heatmap(w, &records)))?;
            let mut line = format!("{name}: {} cells", records.len());
            for param in [Param::Omega, Param::Psi, Param::Xi] {
                if grid.axes.iter().any(|ax| ax.params.contains(&param)) {
                    let _ = write!(line, ", i_inf spread along {param} = {}", spread_along(&records, param));
                }
            }
            println!("{line}");
        }
    }

    if let Some(r0) = &sc.r0 {
        let seedings: Vec<_> = if r0.seedings.is_empty() {
            vec![("scenario".to_string(), s.input().infection_seed.clone())]
        } else {
            r0.seedings.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
        };
        let records = r0_curve(&s, &r0.values, r0.gamma, &seedings, replicas)?;
        let meta = base.clone().with("gamma", r0.gamma);
        write_file(&a.out.join("r0_curve.csv"), &render(&meta, |w| write_r0_curve(w, &records)))?;
        println!("r0_curve.csv: {} rows", records.len());
    }
    Ok(())
}

fn rank(a: CentralityArgs) -> Outcome {
    let (m, hash) = match (&a.matrix, &a.scenario) {
        (Some(path), _) => (read_matrix(path)?, sha256_hex(&read_bytes(path)?)),
        (None, Some(path)) => {
            let (cfg, base) = load_config(path)?;
            let s = cfg.to_scenario(&base)?;
            (s.mobility().clone(), s.content_hash())
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let kinds = if a.kinds.is_empty() {
        CentralityKind::ALL.to_vec()
    } else {
        a.kinds.clone()
    };
    for kind in kinds {
        let ranking = centrality(&m, kind)?;
        let meta = Metadata::new(hash.clone(), None).with("centrality", kind);
        let bytes = render(&meta, |w| write_ranking(w, m.labels(), &ranking));
        write_file(&a.out.join(format!("centrality_{kind}.csv")), &bytes)?;
    }
    Ok(())
}

fn build(a: BuildArgs) -> Outcome {
    let (m, hash, source) = if let Some(path) = &a.calls {
        let records = read_call_records(path)?;
        (build_calls_matrix(&records, a.n)?, sha256_hex(&read_bytes(path)?), "calls")
    } else {
        let path = a.trajectories.as_ref().expect("clap requires one source");
        let records = read_trajectory_records(path)?;
        (
            build_mobility_matrix(&records, a.n, a.max_gap)?,
            sha256_hex(&read_bytes(path)?),
            "trajectories",
        )
    };
    let mut meta = Metadata::new(hash, None).with("source", source).with("n", a.n);
    if let Some(g) = a.max_gap {
        meta = meta.with("max_gap", g);
    }
    write_file(&a.out, &render(&meta, |w| write_matrix(w, &m)))
}

fn synth(a: SynthArgs) -> Outcome {
    let m = synth_matrix(a.kind, a.n, a.diag_weight, a.seed)?;
    let spec = format!("synth kind={} n={} diag_weight={} seed={}", a.kind, a.n, a.diag_weight, a.seed);
    let meta = Metadata::new(sha256_hex(spec.as_bytes()), Some(a.seed)).with("generator", spec);
    write_file(&a.out, &render(&meta, |w| write_matrix(w, &m)))
}

fn validate(a: ValidateArgs) -> Outcome {
    let (cfg, base) = load_config(&a.scenario)?;
    let input = cfg.to_input(&base)?;
    let violations = validate_scenario(&input);
    if violations.is_empty() {
        println!("OK");
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(Failure::Invalid(format!("{} violation(s)", violations.len())))
}
