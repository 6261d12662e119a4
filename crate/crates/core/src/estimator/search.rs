use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{
    approx_cliques, estimate_edges, median, ApproxParams, EdgeStrategy, EstimateOutcome,
    EstimatorError, IsActiveOracle, IsActiveParams, DEFAULT_MAX_SAMPLES,
};
use crate::exec::{map_indexed, Exec};
use crate::graph::{QuerySession, QueryStats};
use crate::reference::{Scale, Thresholds};
use crate::rng::{child_seeds, stream};

/// Everything but the guess.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub k: usize,
    pub alpha: f64,
    /// As requested; clamped to `1/(2k²)` where the algorithm uses it.
    pub eps: f64,
    pub delta: f64,
    pub scale: Scale,
    pub m_strategy: EdgeStrategy,
    pub abort_slack: f64,
    pub max_samples: u64,
    #[serde(skip, default)]
    pub exec: Exec,
}

impl Config {
    pub fn new(k: usize, alpha: f64, eps: f64, delta: f64, scale: Scale) -> Self {
        Config {
            k,
            alpha,
            eps,
            delta,
            scale,
            m_strategy: EdgeStrategy::default(),
            abort_slack: 4.0,
            max_samples: DEFAULT_MAX_SAMPLES,
            exec: Exec::default(),
        }
    }

    /// `⌈18 ln(2/δ)⌉` Approx-Cliques invocations per guess.
    pub fn repetitions(&self) -> usize {
        (18.0 * (2.0 / self.delta).ln()).ceil().max(1.0) as usize
    }

    /// `⌈12 ln(2n²/δ)⌉` edge-count estimates.
    pub fn edge_estimates(&self, n: usize) -> usize {
        let n = n.max(1) as f64;
        (12.0 * (2.0 * n * n / self.delta).ln()).ceil().max(1.0) as usize
    }

    fn check(&self) -> Result<(), crate::reference::ParamError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(crate::reference::ParamError::Delta(self.delta));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainOutcome {
    pub value: f64,
    pub nk_guess: f64,
    pub m_guess: f64,
    pub thresholds: Thresholds,
    pub invocations: Vec<EstimateOutcome>,
    pub aborted_fraction: f64,
    /// Distinct cliques passed to the activeness test, summed over invocations.
    pub oracle_evaluations: u64,
    pub queries: QueryStats,
}

/// Per-edge-estimate confidence; the median over many calls does the rest.
const EDGE_CALL_DELTA: f64 = 1.0 / 3.0;

/// The median of [`Config::repetitions`] Approx-Cliques runs at guess
/// `nk_guess`, each with its own memoized activeness test. Aborted runs
/// count as 0.
///
/// Runs execute on forks of `session` and are folded back in order, so the
/// result does not depend on [`Config::exec`].
pub fn main_estimate<R: RngCore + ?Sized>(
    session: &mut QuerySession<'_>,
    cfg: &Config,
    nk_guess: f64,
    rng: &mut R,
) -> Result<MainOutcome, EstimatorError> {
    cfg.check()?;
    let start = session.stats();
    let n = session.vertex_count();
    let th = Thresholds::compute(cfg.k, cfg.alpha, nk_guess, cfg.eps, cfg.scale)?;

    let m_guess = match cfg.m_strategy {
        EdgeStrategy::ExactSidechannel => {
            estimate_edges(session, cfg.delta, cfg.m_strategy, rng)?.value
        }
        EdgeStrategy::DegreeSampling => {
            let mut values = Vec::new();
            for _ in 0..cfg.edge_estimates(n) {
                values.push(estimate_edges(session, EDGE_CALL_DELTA, cfg.m_strategy, rng)?.value);
            }
            median(&values)
        }
    }
    .max(1.0);

    let approx = ApproxParams {
        n,
        k: cfg.k,
        alpha: cfg.alpha,
        eps: th.eps,
        delta: 1.0 / 6.0,
        nk_guess,
        m_guess,
        tau: th.tau_hi.clone(),
        scale: cfg.scale,
        abort_slack: cfg.abort_slack,
        max_samples: cfg.max_samples,
    };
    let activity = IsActiveParams {
        n,
        m_guess,
        delta: cfg.delta / 4.0,
        thresholds: th.clone(),
    };

    let q = cfg.repetitions();
    let jobs: Vec<_> = child_seeds(rng, q)
        .into_iter()
        .map(|seed| (session.fork(), seed))
        .collect();
    let results = map_indexed(cfg.exec, jobs, |_, (mut fork, seed)| {
        let mut rng = stream(seed);
        let mut oracle = IsActiveOracle::new(activity.clone(), cfg.max_samples);
        let out = approx_cliques(&mut fork, &approx, &mut oracle, &mut rng);
        (fork, out, oracle.evaluations())
    });

    let mut invocations = Vec::with_capacity(q);
    let mut first_err = None;
    let mut oracle_evaluations = 0;
    for (fork, out, evals) in results {
        session.absorb(fork);
        oracle_evaluations += evals;
        match out {
            Ok(o) => invocations.push(o),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_err {
        return Err(e);
    }

    let values: Vec<f64> = invocations.iter().map(|o| o.value.unwrap_or(0.0)).collect();
    let aborted = invocations.iter().filter(|o| o.aborted()).count();
    Ok(MainOutcome {
        value: median(&values),
        nk_guess,
        m_guess,
        thresholds: th,
        aborted_fraction: aborted as f64 / q as f64,
        invocations,
        oracle_evaluations,
        queries: session.stats().since(&start),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRound {
    pub nk_guess: f64,
    pub estimate: f64,
    pub aborted_fraction: f64,
    pub queries: QueryStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub value: f64,
    /// The guess whose estimate was accepted, if any.
    pub accepted_guess: Option<f64>,
    pub rounds: Vec<SearchRound>,
    /// The [`MainOutcome`] of the last round.
    pub last: Option<MainOutcome>,
    pub round_delta: f64,
}

impl SearchOutcome {
    pub fn final_guess(&self) -> Option<f64> {
        self.rounds.last().map(|r| r.nk_guess)
    }
}

/// Halving search: starting from `ñ = n^k`, runs [`main_estimate`] and
/// returns the first estimate that is at least its guess. Below `ñ = 1` the
/// last estimate is returned.
pub fn search_estimate<R: RngCore + ?Sized>(
    session: &mut QuerySession<'_>,
    cfg: &Config,
    rng: &mut R,
) -> Result<SearchOutcome, EstimatorError> {
    cfg.check()?;
    let n = session.vertex_count();
    let levels = (cfg.k as f64 * (n.max(1) as f64).log2()).ceil();
    let round_delta = cfg.delta / (2.0 * levels + 2.0);
    let round_cfg = Config {
        delta: round_delta,
        ..cfg.clone()
    };
    let mut out = SearchOutcome {
        value: 0.0,
        accepted_guess: None,
        rounds: Vec::new(),
        last: None,
        round_delta,
    };
    let mut guess = (n as f64).powi(cfg.k as i32);
    while guess >= 1.0 {
        let main = main_estimate(session, &round_cfg, guess, rng)?;
        out.value = main.value;
        out.rounds.push(SearchRound {
            nk_guess: guess,
            estimate: main.value,
            aborted_fraction: main.aborted_fraction,
            queries: main.queries,
        });
        out.last = Some(main);
        if out.value >= guess {
            out.accepted_guess = Some(guess);
            break;
        }
        guess /= 2.0;
    }
    Ok(out)
}
