//! The randomized estimator: Approx-Cliques over an activeness oracle, the
//! sampling-based activeness test, the repeated median estimate for a fixed
//! guess, and the halving search over guesses.

mod edges;
mod oracle;
mod record;
mod search;

pub use edges::{estimate_edges, EdgeEstimate, EdgeStrategy};
pub use oracle::{
    is_active, is_active_round, is_assigned, ActivityOracle, AllActive, FnOracle, IsActiveOracle,
    IsActiveParams, Round, SetOracle,
};
pub use record::{ResultRecord, TraceRecord, SCHEMA_VERSION};
pub use search::{main_estimate, search_estimate, Config, MainOutcome, SearchOutcome, SearchRound};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{QueryError, QuerySession, QueryStats, Vertex};
use crate::reference::{factorial, Scale};
use crate::sampler::{sample_set, CliqueSample, SampleError};

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("sample size {requested:.3e} at level {level} exceeds the configured limit")]
    SampleLimit { level: usize, requested: f64 },
    #[error(transparent)]
    Params(#[from] crate::reference::ParamError),
}

/// Default cap on any single sample size.
pub const DEFAULT_MAX_SAMPLES: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    /// Already clamped to `1/(2k²)`.
    pub eps: f64,
    pub delta: f64,
    pub nk_guess: f64,
    pub m_guess: f64,
    /// `τ_1..τ_k`, index `t - 1`.
    pub tau: Vec<f64>,
    pub scale: Scale,
    /// Stands in for `n_k / ñ_k` in the final-sample abort.
    pub abort_slack: f64,
    pub max_samples: u64,
}

impl ApproxParams {
    pub fn gamma(&self) -> f64 {
        self.eps / (2.0 * self.k as f64)
    }

    pub fn beta(&self) -> f64 {
        self.delta / (3.0 * self.k as f64)
    }

    /// `3 ln(2/β) / γ²` under the configured scale.
    pub fn multiplier(&self) -> f64 {
        self.scale.sample_multiplier(self.beta(), self.gamma())
    }

    pub fn tau(&self, t: usize) -> f64 {
        self.tau[t - 1]
    }

    /// `w̃_0 = (1 - ε/2) ñ_k`.
    pub fn initial_weight(&self) -> f64 {
        (1.0 - self.eps / 2.0) * self.nk_guess
    }

    /// Abort cut-off for `s_{t+1}`.
    pub fn sample_cut(&self, t: usize) -> f64 {
        let kf = factorial(self.k);
        4.0 * self.m_guess * self.alpha.powi(t as i32 - 1) * self.tau(t + 1) / self.nk_guess
            * kf
            * kf
            * self.multiplier()
            / self.beta().powi(t as i32)
    }

    /// Abort cut-off for `|R_k|`.
    pub fn final_cut(&self) -> f64 {
        let kf = factorial(self.k);
        self.abort_slack * kf * kf / self.beta().powi(self.k as i32)
            * self.tau(self.k)
            * 4.0
            * self.multiplier()
    }

    /// `s̃_1 ⋯ s̃_k / (d(R_0) ⋯ d(R_{k-1}))` for the real-valued sequence.
    pub fn telescoped_ratio(&self) -> f64 {
        self.tau(self.k) * self.multiplier()
            / ((1.0 - self.gamma()).powi(self.k as i32 - 1) * self.initial_weight())
    }

    fn validate(&self) -> Result<(), crate::reference::ParamError> {
        use crate::reference::ParamError;
        if self.k < 2 {
            return Err(ParamError::CliqueSize(self.k));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0 / (2.0 * (self.k * self.k) as f64) + 1e-15) {
            return Err(ParamError::Eps(self.eps));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ParamError::Delta(self.delta));
        }
        if self.nk_guess.is_nan() || self.nk_guess < 1.0 {
            return Err(ParamError::Guess(self.nk_guess));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abort {
    /// `s_{t+1}` over its cut-off.
    SampleSize { level: usize },
    /// `|R_k|` over its cut-off.
    FinalSize,
}

/// One level of an Approx-Cliques run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub t: usize,
    /// `s_t`.
    pub s: u64,
    /// `s_t` before rounding up, from the unrounded sequence.
    pub s_shadow: f64,
    /// `|R_t|`.
    pub size: usize,
    /// `d(R_t)`, absent at level `k`.
    pub degree_sum: Option<u64>,
    /// `w̃_t`, absent at level `k`.
    pub weight: Option<f64>,
    pub weight_shadow: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutcome {
    pub value: Option<f64>,
    pub abort: Option<Abort>,
    /// Number of sampled `k`-cliques found to be assigned.
    pub assigned: u64,
    pub trace: Vec<LevelTrace>,
    pub queries: QueryStats,
}

impl EstimateOutcome {
    pub fn aborted(&self) -> bool {
        self.abort.is_some()
    }

    /// `n · d(R_1)⋯d(R_{k-1}) / (s_1⋯s_k)` recomputed from the trace, if the
    /// run reached level `k`.
    pub fn normalizer(&self, n: usize, k: usize) -> Option<f64> {
        if self.trace.len() != k {
            return None;
        }
        let mut x = n as f64;
        for lt in &self.trace {
            x /= lt.s as f64;
            if lt.t > 1 {
                // d(R_{t-1}) lives on the previous entry.
                x *= self.trace[lt.t - 2].degree_sum? as f64;
            }
        }
        Some(x)
    }

    /// `Π s̃_t / Π d(R_{t-1})` from the trace, with `d(R_0) = n`.
    pub fn shadow_ratio(&self, n: usize) -> f64 {
        let mut x = 1.0 / n as f64;
        for (i, lt) in self.trace.iter().enumerate() {
            x *= lt.s_shadow;
            if i + 1 < self.trace.len() {
                x /= lt.degree_sum.unwrap_or(1) as f64;
            }
        }
        x
    }
}

/// Approx-Cliques. Samples `R_1` uniformly, extends it level by level with
/// [`sample_set`], and scales the number of assigned `k`-cliques in `R_k`.
///
/// A level with `d(R_t) = 0` ends the run with estimate 0.
pub fn approx_cliques<O, R>(
    session: &mut QuerySession<'_>,
    params: &ApproxParams,
    oracle: &mut O,
    rng: &mut R,
) -> Result<EstimateOutcome, EstimatorError>
where
    O: ActivityOracle + ?Sized,
    R: Rng + ?Sized,
{
    params.validate()?;
    let (n, k) = (params.n, params.k);
    let mult = params.multiplier();
    let gamma = params.gamma();
    let start = session.stats();
    let mut out = EstimateOutcome {
        value: None,
        abort: None,
        assigned: 0,
        trace: Vec::with_capacity(k),
        queries: QueryStats::default(),
    };
    let finish = |mut out: EstimateOutcome, session: &QuerySession<'_>| {
        out.queries = session.stats().since(&start);
        out
    };
    if n == 0 {
        out.value = Some(0.0);
        return Ok(finish(out, session));
    }

    let w0 = params.initial_weight();
    let s1_shadow = n as f64 * params.tau(1) / w0 * mult;
    let s1 = checked_size(s1_shadow.ceil(), 1, params.max_samples)?;
    let picks: Vec<Vertex> = (0..s1).map(|_| rng.random_range(0..n as Vertex)).collect();
    let mut r = CliqueSample::from_cliques(session, 1, picks.iter().map(std::slice::from_ref))?;

    let (mut w, mut w_shadow) = (w0, w0);
    let (mut d_prev, mut s_prev, mut s_prev_shadow) = (n as u64, s1, s1_shadow);
    let mut normalizer = n as f64 / s1 as f64;
    for t in 1..k {
        let d = r.total_degree();
        w = (1.0 - gamma) * w / d_prev as f64 * s_prev as f64;
        w_shadow = (1.0 - gamma) * w_shadow / d_prev as f64 * s_prev_shadow;
        out.trace.push(LevelTrace {
            t,
            s: s_prev,
            s_shadow: s_prev_shadow,
            size: r.len(),
            degree_sum: Some(d),
            weight: Some(w),
            weight_shadow: Some(w_shadow),
        });
        if d == 0 {
            out.value = Some(0.0);
            return Ok(finish(out, session));
        }
        let s_shadow = d as f64 * params.tau(t + 1) / w_shadow * mult;
        let s = (d as f64 * params.tau(t + 1) / w * mult).ceil();
        if s > params.sample_cut(t) {
            out.abort = Some(Abort::SampleSize { level: t + 1 });
            return Ok(finish(out, session));
        }
        let s = checked_size(s, t + 1, params.max_samples)?;
        r = match sample_set(session, &r, s, rng) {
            Ok(next) => next,
            Err(SampleError::Query(e)) => return Err(e.into()),
            Err(e) => unreachable!("positive degree sample: {e}"),
        };
        normalizer *= d as f64 / s as f64;
        (d_prev, s_prev, s_prev_shadow) = (d, s, s_shadow);
    }
    out.trace.push(LevelTrace {
        t: k,
        s: s_prev,
        s_shadow: s_prev_shadow,
        size: r.len(),
        degree_sum: None,
        weight: None,
        weight_shadow: None,
    });
    if r.len() as f64 > params.final_cut() {
        out.abort = Some(Abort::FinalSize);
        return Ok(finish(out, session));
    }
    for c in r.iter() {
        if is_assigned(session, c, oracle, rng)? {
            out.assigned += 1;
        }
    }
    out.value = Some(normalizer * out.assigned as f64);
    Ok(finish(out, session))
}

fn checked_size(s: f64, level: usize, max: u64) -> Result<u64, EstimatorError> {
    if s > max as f64 {
        Err(EstimatorError::SampleLimit {
            level,
            requested: s,
        })
    } else {
        Ok(s as u64)
    }
}

/// Median; the mean of the two middle values for even lengths. `NaN` for
/// an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}
