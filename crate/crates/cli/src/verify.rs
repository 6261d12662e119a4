use std::path::PathBuf;

use arbocount::exact::{arboricity_checks, count_cliques_exact, BoundCheck};
use arbocount::reference::{
    clamp_eps, exact_active_set, exact_weight, verify_good, verify_legal, GoodnessReport,
    LegalityReport, Scale, Thresholds, WeightTable,
};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::{load, print_json, Exit, EXIT_INVARIANT};

#[derive(Args)]
pub struct VerifyArgs {
    graph: PathBuf,
    #[arg(short, long)]
    k: usize,
    /// Clamped to `1/(2k²)`; defaults to the clamp.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value = "paper")]
    scale: Scale,
    /// Largest clique size for the arboricity bounds; defaults to `k`.
    #[arg(long)]
    max_t: Option<usize>,
    /// Damage the weight table before checking it.
    #[arg(long, value_enum)]
    corrupt: Option<Corruption>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Corruption {
    /// Assign a second ordering of an assigned clique.
    Duplicate,
    /// Give a vertex one unit more than its extensions carry.
    Telescoping,
}

#[derive(Serialize)]
struct GuessReport {
    nk_guess: f64,
    tau_hi: Vec<f64>,
    active_prefixes: usize,
    legality: LegalityReport,
    goodness: GoodnessReport,
}

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    pass: bool,
    n: usize,
    m: usize,
    k: usize,
    eps: f64,
    scale: String,
    n_k: u64,
    guesses: Vec<GuessReport>,
    bounds: Vec<BoundCheck>,
}

fn corrupt(wt: &mut WeightTable, how: Corruption) -> Result<(), Exit> {
    let k = wt.k();
    let (first, _) = wt
        .level(k)
        .into_iter()
        .next()
        .ok_or_else(|| Exit::usage(anyhow::anyhow!("no assigned clique to corrupt")))?;
    match how {
        Corruption::Duplicate => {
            let mut other = first.clone();
            other.swap(0, 1);
            for t in 1..=k {
                let w = wt.get(&other[..t]);
                wt.set(other[..t].to_vec(), w + 1);
            }
            wt.set_total(wt.total() + 1);
        }
        Corruption::Telescoping => {
            let w = wt.get(&first[..1]);
            wt.set(first[..1].to_vec(), w + 1);
        }
    }
    Ok(())
}

pub fn run(a: VerifyArgs) -> Result<(), Exit> {
    if a.k < 2 {
        return Err(Exit::usage(anyhow::anyhow!("k must be at least 2")));
    }
    let g = load(&a.graph)?;
    let eps = clamp_eps(a.eps.unwrap_or(1.0), a.k).map_err(Exit::usage)?;
    let n_k = count_cliques_exact(&g, a.k);
    let alpha = arbocount::exact::degeneracy(&g).max(1) as f64;

    let mut guesses = Vec::new();
    let mut tried = Vec::new();
    for guess in [n_k.max(1) as f64, (n_k as f64 / 4.0).ceil().max(1.0)] {
        if tried.contains(&guess) {
            continue;
        }
        tried.push(guess);
        let th = Thresholds::compute(a.k, alpha, guess, eps, a.scale).map_err(Exit::usage)?;
        let active = exact_active_set(&g, &th);
        let mut wt = exact_weight(&g, &active, a.k);
        if let Some(how) = a.corrupt {
            corrupt(&mut wt, how)?;
        }
        guesses.push(GuessReport {
            nk_guess: guess,
            tau_hi: th.tau_hi.clone(),
            active_prefixes: active.len(),
            legality: verify_legal(&wt, &g, a.k),
            goodness: verify_good(&wt, &th, eps, n_k),
        });
    }
    let bounds = arboricity_checks(&g, a.max_t.unwrap_or(a.k));
    let pass = guesses.iter().all(|r| r.legality.pass && r.goodness.pass())
        && bounds.iter().all(BoundCheck::holds);
    let report = Report {
        schema_version: arbocount::estimator::SCHEMA_VERSION,
        pass,
        n: g.vertex_count(),
        m: g.edge_count(),
        k: a.k,
        eps,
        scale: a.scale.to_string(),
        n_k,
        guesses,
        bounds,
    };
    print_json(&report)?;
    if pass {
        Ok(())
    } else {
        Err(Exit::silent(EXIT_INVARIANT))
    }
}
