use serde::{Deserialize, Serialize};

use super::{Config, EdgeStrategy, EstimateOutcome, MainOutcome, SearchOutcome, SearchRound};
use crate::graph::QueryStats;

pub const SCHEMA_VERSION: u32 = 1;

/// Machine-readable summary of one estimator run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    /// `ok`, `budget_exceeded` or `sample_limit`.
    pub status: String,
    pub n: usize,
    pub m_used: Option<f64>,
    pub m_strategy: EdgeStrategy,
    pub m_side_channel: bool,
    pub k: usize,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    pub scale: String,
    pub nk_guess_final: Option<f64>,
    pub estimate: Option<f64>,
    pub exact: Option<u64>,
    pub aborted_fraction: Option<f64>,
    pub queries: QueryStats,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<TraceRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Guesses tried by the search, empty for a fixed guess.
    pub rounds: Vec<SearchRound>,
    /// Approx-Cliques runs at the final guess.
    pub invocations: Vec<EstimateOutcome>,
}

impl ResultRecord {
    /// A record with no estimate yet, `status = "ok"`.
    pub fn new(n: usize, cfg: &Config, seed: u64) -> Self {
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            status: "ok".into(),
            n,
            m_used: None,
            m_strategy: cfg.m_strategy,
            m_side_channel: false,
            k: cfg.k,
            alpha: cfg.alpha,
            eps: cfg.eps,
            delta: cfg.delta,
            scale: cfg.scale.to_string(),
            nk_guess_final: None,
            estimate: None,
            exact: None,
            aborted_fraction: None,
            queries: QueryStats::default(),
            seed,
            trace: None,
        }
    }

    pub fn fill_main(&mut self, main: &MainOutcome, with_trace: bool) {
        self.m_used = Some(main.m_guess);
        self.nk_guess_final = Some(main.nk_guess);
        self.estimate = Some(main.value);
        self.aborted_fraction = Some(main.aborted_fraction);
        if with_trace {
            self.trace = Some(TraceRecord {
                rounds: Vec::new(),
                invocations: main.invocations.clone(),
            });
        }
    }

    pub fn fill_search(&mut self, search: &SearchOutcome, with_trace: bool) {
        if let Some(main) = &search.last {
            self.fill_main(main, with_trace);
        }
        self.estimate = Some(search.value);
        if let Some(t) = &mut self.trace {
            t.rounds = search.rounds.clone();
        }
    }
}
