use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use arbocount::estimator::{
    main_estimate, search_estimate, Config, EdgeStrategy, EstimatorError, ResultRecord,
};
use arbocount::exact::{count_cliques_exact, degeneracy};
use arbocount::exec::Exec;
use arbocount::generators::GenSpec;
use arbocount::graph::{read_edge_list, write_edge_list, Graph, QueryError, QuerySession};
use arbocount::reference::Scale;
use arbocount::rng::stream;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod sweep;
mod verify;

const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

/// Sublinear k-clique counting in bounded-arboricity graphs.
#[derive(Parser)]
#[command(name = "arbocount", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list plus a `.json` sidecar.
    Generate(GenerateArgs),
    /// Count k-cliques exactly.
    Exact(ExactArgs),
    /// Estimate the k-clique count through the query interface.
    Estimate(EstimateArgs),
    /// Check the exact weight machinery and the arboricity bounds.
    Verify(verify::VerifyArgs),
    /// Run every job of a JSON manifest and write one CSV row per run.
    Sweep(sweep::SweepArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// complete, wheel, cycle, star, path, petersen, incremental, planted,
    /// cliques or int.
    #[arg(long)]
    family: String,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    alpha: Option<usize>,
    /// Target clique count for `planted`.
    #[arg(long)]
    nk: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    /// Plant the clique (`planted` family).
    #[arg(long)]
    planted: bool,
    /// Number of disjoint cliques (`cliques` family).
    #[arg(long)]
    count: Option<usize>,
    /// Bit strings for `int`.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    /// Random intersecting positions for `int`.
    #[arg(long)]
    intersections: Option<usize>,
    #[arg(long, env = "ARBOCOUNT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExactArgs {
    graph: PathBuf,
    #[arg(short, long)]
    k: usize,
    /// Print a JSON object instead of the bare count.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EstimateArgs {
    graph: PathBuf,
    #[arg(short, long)]
    k: usize,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// Arboricity bound; defaults to the degeneracy of the input.
    #[arg(long)]
    alpha: Option<f64>,
    /// `paper`, `practical`, `practical:<threshold>,<samples>` or a factor.
    #[arg(long, default_value = "practical")]
    scale: Scale,
    #[arg(long, env = "ARBOCOUNT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = EdgeStrategy::ExactSidechannel)]
    m_strategy: EdgeStrategy,
    /// Run a single median estimate at this guess instead of the search.
    #[arg(long)]
    nk_guess: Option<f64>,
    /// Abort once this many raw queries have been made.
    #[arg(long)]
    queries_budget: Option<u64>,
    /// Include per-round and per-invocation detail.
    #[arg(long)]
    trace: bool,
    /// Also record the exact count.
    #[arg(long)]
    exact: bool,
    /// Run invocations one after another.
    #[arg(long)]
    sequential: bool,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Exit {
    code: u8,
    error: anyhow::Error,
}

impl Exit {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Exit {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }

    pub fn invariant(error: impl Into<anyhow::Error>) -> Self {
        Exit {
            code: EXIT_INVARIANT,
            error: error.into(),
        }
    }

    /// The report has already been printed.
    pub fn silent(code: u8) -> Self {
        Exit {
            code,
            error: anyhow::anyhow!(""),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Exact(a) => exact(a),
        Command::Estimate(a) => estimate(a),
        Command::Verify(a) => verify::run(a),
        Command::Sweep(a) => sweep::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit { code, error }) => {
            let msg = format!("{error:#}");
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

pub fn load(path: &Path) -> Result<Graph, Exit> {
    read_edge_list(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Exit::usage)
}

pub fn print_json<T: Serialize>(value: &T) -> Result<(), Exit> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(anyhow::Error::from)
        .and_then(|()| writeln!(out).map_err(anyhow::Error::from))
        .map_err(Exit::usage)
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, Exit> {
    value.ok_or_else(|| {
        Exit::usage(anyhow::anyhow!(
            "--{flag} is required for --family {family}"
        ))
    })
}

fn gen_spec(a: &GenerateArgs) -> Result<GenSpec, Exit> {
    let f = a.family.as_str();
    let size = || require(a.size, "size", f);
    Ok(match f {
        "complete" => GenSpec::Complete { size: size()? },
        "wheel" => GenSpec::Wheel { size: size()? },
        "cycle" => GenSpec::Cycle { size: size()? },
        "star" => GenSpec::Star { size: size()? },
        "path" => GenSpec::Path { size: size()? },
        "petersen" => GenSpec::Petersen,
        "incremental" => GenSpec::Incremental {
            n: require(a.n, "n", f)?,
            alpha: require(a.alpha, "alpha", f)?,
            seed: a.seed,
        },
        "planted" => GenSpec::Planted {
            n: require(a.n, "n", f)?,
            m: require(a.m, "m", f)?,
            alpha: require(a.alpha, "alpha", f)?,
            nk: require(a.nk, "nk", f)?,
            k: require(a.k, "k", f)?,
            planted: a.planted,
            seed: a.seed,
        },
        "cliques" => GenSpec::Cliques {
            count: require(a.count, "count", f)?,
            size: size()?,
            n: require(a.n, "n", f)?,
            m: require(a.m, "m", f)?,
            alpha: require(a.alpha, "alpha", f)?,
            seed: a.seed,
        },
        "int" => GenSpec::Int {
            n: require(a.n, "n", f)?,
            m: require(a.m, "m", f)?,
            alpha: require(a.alpha, "alpha", f)?,
            k: require(a.k, "k", f)?,
            x: a.x.clone(),
            y: a.y.clone(),
            intersections: a.intersections,
            seed: a.seed,
        },
        other => return Err(Exit::usage(anyhow::anyhow!("unknown family {other:?}"))),
    })
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema_version: u32,
    spec: &'a GenSpec,
    n: usize,
    m: usize,
    degeneracy: usize,
}

fn generate(a: GenerateArgs) -> Result<(), Exit> {
    let spec = gen_spec(&a)?;
    let g = spec.build().map_err(Exit::usage)?;
    let write = || -> anyhow::Result<()> {
        let mut file = io::BufWriter::new(fs::File::create(&a.output)?);
        write_edge_list(&g, &mut file)?;
        let sidecar = Sidecar {
            schema_version: arbocount::estimator::SCHEMA_VERSION,
            spec: &spec,
            n: g.vertex_count(),
            m: g.edge_count(),
            degeneracy: degeneracy(&g),
        };
        let mut path = a.output.clone().into_os_string();
        path.push(".json");
        fs::write(&path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
        Ok(())
    };
    write()
        .with_context(|| format!("writing {}", a.output.display()))
        .map_err(Exit::usage)
}

#[derive(Serialize)]
struct ExactRecord {
    n: usize,
    m: usize,
    k: usize,
    degeneracy: usize,
    count: u64,
}

fn exact(a: ExactArgs) -> Result<(), Exit> {
    if a.k == 0 {
        return Err(Exit::usage(anyhow::anyhow!("k must be at least 1")));
    }
    let g = load(&a.graph)?;
    let count = count_cliques_exact(&g, a.k);
    if a.json {
        print_json(&ExactRecord {
            n: g.vertex_count(),
            m: g.edge_count(),
            k: a.k,
            degeneracy: degeneracy(&g),
            count,
        })
    } else {
        println!("{count}");
        Ok(())
    }
}

/// One estimator run; the record carries the status, the error only the
/// exit code.
pub fn run_estimate(
    g: &Graph,
    cfg: &Config,
    seed: u64,
    nk_guess: Option<f64>,
    budget: Option<u64>,
    trace: bool,
) -> (ResultRecord, Option<EstimatorError>) {
    let mut record = ResultRecord::new(g.vertex_count(), cfg, seed);
    let mut session = QuerySession::new(g);
    if let Some(b) = budget {
        session = session.with_budget(b);
    }
    let mut rng = stream(seed);
    let outcome = match nk_guess {
        Some(guess) => {
            main_estimate(&mut session, cfg, guess, &mut rng).map(|m| record.fill_main(&m, trace))
        }
        None => search_estimate(&mut session, cfg, &mut rng).map(|s| record.fill_search(&s, trace)),
    };
    record.m_side_channel = session.used_side_channel();
    record.queries = session.stats();
    match outcome {
        Ok(()) => (record, None),
        Err(e) => {
            record.status = match e {
                EstimatorError::Query(QueryError::BudgetExceeded { .. }) => "budget_exceeded",
                EstimatorError::SampleLimit { .. } => "sample_limit",
                _ => "error",
            }
            .into();
            (record, Some(e))
        }
    }
}

fn estimate(a: EstimateArgs) -> Result<(), Exit> {
    let g = load(&a.graph)?;
    let alpha = a.alpha.unwrap_or_else(|| degeneracy(&g).max(1) as f64);
    let mut cfg = Config::new(a.k, alpha, a.eps, a.delta, a.scale);
    cfg.m_strategy = a.m_strategy;
    if a.sequential {
        cfg.exec = Exec::Sequential;
    }
    // Reject bad parameters before any work.
    arbocount::reference::Thresholds::compute(
        a.k,
        alpha,
        a.nk_guess.unwrap_or(1.0),
        a.eps,
        a.scale,
    )
    .map_err(Exit::usage)?;
    if !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(Exit::usage(anyhow::anyhow!("delta must lie in (0, 1)")));
    }
    let (mut record, err) = run_estimate(&g, &cfg, a.seed, a.nk_guess, a.queries_budget, a.trace);
    if a.exact {
        record.exact = Some(count_cliques_exact(&g, a.k));
    }
    print_json(&record)?;
    match err {
        None => Ok(()),
        Some(
            e @ (EstimatorError::Query(QueryError::BudgetExceeded { .. })
            | EstimatorError::SampleLimit { .. }),
        ) => {
            eprintln!("aborted: {e}");
            Err(Exit::silent(EXIT_BUDGET))
        }
        Some(EstimatorError::Params(e)) => Err(Exit::usage(e)),
        Some(e) => Err(Exit::invariant(e)),
    }
}
