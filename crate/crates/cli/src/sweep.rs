use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use arbocount::estimator::{Config, EdgeStrategy, EstimatorError};
use arbocount::exact::{count_cliques_exact, degeneracy};
use arbocount::exec::{map_indexed, Exec};
use arbocount::generators::GenSpec;
use arbocount::graph::{Graph, QueryError};
use arbocount::reference::Scale;
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::{run_estimate, Exit, EXIT_BUDGET, EXIT_INVARIANT, EXIT_USAGE};

/// Bumped whenever a column is added, removed or renamed.
pub const CSV_VERSION: u32 = 1;

#[derive(Args)]
pub struct SweepArgs {
    manifest: PathBuf,
    /// Overrides the manifest's `output`; stdout when neither is given.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Leave the wall-time column empty so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
    /// Run jobs one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub jobs: Vec<Job>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub graph: GenSpec,
    pub k: usize,
    #[serde(default = "quarter")]
    pub eps: f64,
    #[serde(default = "quarter")]
    pub delta: f64,
    /// Defaults to the degeneracy of the built graph.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "practical")]
    pub scale: String,
    #[serde(default)]
    pub m_strategy: EdgeStrategy,
    #[serde(default)]
    pub nk_guess: Option<f64>,
    #[serde(default)]
    pub queries_budget: Option<u64>,
}

fn quarter() -> f64 {
    0.25
}

fn practical() -> String {
    "practical".into()
}

#[derive(Serialize)]
struct Row {
    job: usize,
    rep: usize,
    family: &'static str,
    spec: String,
    n: usize,
    m: usize,
    k: usize,
    alpha: f64,
    eps: f64,
    delta: f64,
    scale: String,
    m_strategy: EdgeStrategy,
    nk_guess: Option<f64>,
    seed: u64,
    exact: u64,
    estimate: Option<f64>,
    rel_error: Option<f64>,
    status: String,
    degree: u64,
    neighbor: u64,
    pair: u64,
    raw_total: u64,
    distinct: u64,
    wall_ms: Option<u128>,
}

struct Prepared {
    graph: Graph,
    cfg: Config,
    exact: u64,
}

fn prepare(job: &Job) -> anyhow::Result<Prepared> {
    let graph = job.graph.build()?;
    let scale: Scale = job.scale.parse()?;
    let alpha = job
        .alpha
        .unwrap_or_else(|| degeneracy(&graph).max(1) as f64);
    arbocount::reference::Thresholds::compute(
        job.k,
        alpha,
        job.nk_guess.unwrap_or(1.0),
        job.eps,
        scale,
    )?;
    if !(job.delta > 0.0 && job.delta < 1.0) {
        anyhow::bail!("delta must lie in (0, 1)");
    }
    let mut cfg = Config::new(job.k, alpha, job.eps, job.delta, scale);
    cfg.m_strategy = job.m_strategy;
    cfg.exec = Exec::Sequential;
    let exact = count_cliques_exact(&graph, job.k);
    Ok(Prepared { graph, cfg, exact })
}

pub fn run(a: SweepArgs) -> Result<(), Exit> {
    let text = fs::read_to_string(&a.manifest)
        .with_context(|| format!("reading {}", a.manifest.display()))
        .map_err(Exit::usage)?;
    let manifest: Manifest = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", a.manifest.display()))
        .map_err(Exit::usage)?;
    let prepared = manifest
        .jobs
        .iter()
        .enumerate()
        .map(|(i, job)| prepare(job).with_context(|| format!("job {i}")))
        .collect::<anyhow::Result<Vec<_>>>()
        .map_err(Exit::usage)?;

    let reps = manifest.repetitions;
    let runs: Vec<(usize, usize)> = (0..manifest.jobs.len())
        .flat_map(|j| (0..reps).map(move |r| (j, r)))
        .collect();
    let exec = if a.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let results = map_indexed(exec, runs, |index, (j, rep)| {
        let (job, p) = (&manifest.jobs[j], &prepared[j]);
        let seed = manifest.seed_base + index as u64;
        let start = Instant::now();
        let (record, err) = run_estimate(
            &p.graph,
            &p.cfg,
            seed,
            job.nk_guess,
            job.queries_budget,
            false,
        );
        let wall = start.elapsed().as_millis();
        let rel_error = record
            .estimate
            .filter(|_| p.exact > 0)
            .map(|e| e / p.exact as f64 - 1.0);
        let row = Row {
            job: j,
            rep,
            family: job.graph.family(),
            spec: serde_json::to_string(&job.graph).expect("spec serializes"),
            n: p.graph.vertex_count(),
            m: p.graph.edge_count(),
            k: job.k,
            alpha: p.cfg.alpha,
            eps: job.eps,
            delta: job.delta,
            scale: record.scale.clone(),
            m_strategy: job.m_strategy,
            nk_guess: job.nk_guess,
            seed,
            exact: p.exact,
            estimate: record.estimate,
            rel_error,
            status: record.status.clone(),
            degree: record.queries.degree,
            neighbor: record.queries.neighbor,
            pair: record.queries.pair,
            raw_total: record.queries.raw_total,
            distinct: record.queries.distinct,
            wall_ms: (!a.deterministic).then_some(wall),
        };
        (row, err)
    });

    let output = a.output.or(manifest.output);
    let sink: Box<dyn Write> = match &output {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))
                .map_err(Exit::usage)?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let mut worst = None;
    let write = |mut sink: Box<dyn Write>| -> anyhow::Result<()> {
        writeln!(sink, "# arbocount sweep csv v{CSV_VERSION}")?;
        let mut csv = csv::Writer::from_writer(sink);
        for (row, err) in results {
            csv.serialize(row)?;
            if let Some(e) = err {
                let code = match e {
                    EstimatorError::Query(QueryError::BudgetExceeded { .. })
                    | EstimatorError::SampleLimit { .. } => EXIT_BUDGET,
                    EstimatorError::Params(_) => EXIT_USAGE,
                    _ => EXIT_INVARIANT,
                };
                worst = worst.max(Some(code));
            }
        }
        csv.flush()?;
        Ok(())
    };
    write(sink).map_err(Exit::usage)?;
    match worst {
        None => Ok(()),
        Some(code) => Err(Exit::silent(code)),
    }
}
