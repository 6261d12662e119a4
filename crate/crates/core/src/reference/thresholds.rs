use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("clique size k = {0} must be at least 2")]
    CliqueSize(usize),
    #[error("arboricity bound {0} must be at least 1")]
    Alpha(f64),
    #[error("clique-count guess {0} must be at least 1")]
    Guess(f64),
    #[error("approximation parameter eps = {0} must be positive")]
    Eps(f64),
    #[error("confidence parameter delta = {0} must lie in (0, 1)")]
    Delta(f64),
    #[error("invalid scale: {0}")]
    Scale(String),
}

/// Constant profile for thresholds and sample sizes.
///
/// `Uniform { factor }` keeps the analysis constants and multiplies every
/// sociability threshold below level `k`, and every `ln(·)/γ²` sample
/// multiplier, by `factor`. `factor = 1` is the literal setting, which is far
/// too large to run on anything but symbolic checks.
///
/// `Practical` drops the `k^{4k}`, `β^{-k}` and `γ^{-2}` prefactors: level
/// thresholds become `threshold · (k-2)! · α^{k-t}` (and `threshold · (k-2)!
/// · min(α^{k-1}, ñ^{(k-1)/k})` for vertices), and every `3 ln(2/β)/γ²`
/// multiplier becomes `samples`. The activeness vote compares estimates of
/// ordered extension counts, which grow with the orderings of the extension;
/// `(k-2)!` keeps the same vertices active across `k`. Abort and costliness cut-offs keep their `(k!)²`, `β` and `γ`
/// factors and scale with the multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Scale {
    Uniform { factor: f64 },
    Practical { threshold: f64, samples: f64 },
}

impl Scale {
    pub const PAPER: Scale = Scale::Uniform { factor: 1.0 };

    /// Desk-scale preset used by the accuracy runs.
    pub const fn practical() -> Scale {
        Scale::Practical {
            threshold: 48.0,
            samples: 4.0,
        }
    }

    pub fn uniform(factor: f64) -> Scale {
        Scale::Uniform { factor }
    }

    fn validate(self) -> Result<Self, ParamError> {
        let ok = match self {
            Scale::Uniform { factor } => factor.is_finite() && factor > 0.0,
            Scale::Practical { threshold, samples } => {
                threshold.is_finite() && threshold > 0.0 && samples.is_finite() && samples > 0.0
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(ParamError::Scale(self.to_string()))
        }
    }

    /// Stand-in for `3 ln(2/β) / γ²`.
    pub fn sample_multiplier(&self, beta: f64, gamma: f64) -> f64 {
        match *self {
            Scale::Uniform { factor } => factor * 3.0 * (2.0 / beta).ln() / (gamma * gamma),
            Scale::Practical { samples, .. } => samples,
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scale::Uniform { factor: 1.0 } => write!(f, "paper"),
            Scale::Uniform { factor } => write!(f, "{factor}"),
            Scale::Practical { threshold, samples } => {
                write!(f, "practical:{threshold},{samples}")
            }
        }
    }
}

/// Parses `paper`, `practical`, `practical:<threshold>,<samples>` or a bare
/// positive factor.
impl FromStr for Scale {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParamError::Scale(s.to_string());
        let scale = match s.trim() {
            "paper" => Scale::PAPER,
            "practical" => Scale::practical(),
            other => {
                if let Some(rest) = other.strip_prefix("practical:") {
                    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                    Scale::Practical {
                        threshold: a.trim().parse().map_err(|_| bad())?,
                        samples: b.trim().parse().map_err(|_| bad())?,
                    }
                } else {
                    Scale::Uniform {
                        factor: other.parse().map_err(|_| bad())?,
                    }
                }
            }
        };
        scale.validate()
    }
}

/// `ε` capped at `1/(2k²)`.
pub fn clamp_eps(eps: f64, k: usize) -> Result<f64, ParamError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(ParamError::Eps(eps));
    }
    Ok(eps.min(1.0 / (2.0 * (k * k) as f64)))
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Sociability thresholds and the `(γ, β)` constants used with them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub k: usize,
    pub alpha: f64,
    pub nk_guess: f64,
    /// Clamped approximation parameter.
    pub eps: f64,
    /// `ε / (8k·k!)`.
    pub gamma: f64,
    /// `1 / (6k)`.
    pub beta: f64,
    /// Upper thresholds, index `t - 1` for level `t`.
    pub tau_hi: Vec<f64>,
    /// Lower thresholds, same indexing.
    pub tau_lo: Vec<f64>,
    pub scale: Scale,
}

impl Thresholds {
    pub fn compute(
        k: usize,
        alpha: f64,
        nk_guess: f64,
        eps: f64,
        scale: Scale,
    ) -> Result<Thresholds, ParamError> {
        if k < 2 {
            return Err(ParamError::CliqueSize(k));
        }
        if alpha.is_nan() || alpha < 1.0 {
            return Err(ParamError::Alpha(alpha));
        }
        if nk_guess.is_nan() || nk_guess < 1.0 {
            return Err(ParamError::Guess(nk_guess));
        }
        let scale = scale.validate()?;
        let eps = clamp_eps(eps, k)?;
        let kf = k as f64;
        let gamma = eps / (8.0 * kf * factorial(k));
        let beta = 1.0 / (6.0 * kf);

        let vertex_term = alpha.powi(k as i32 - 1).min(nk_guess.powf((kf - 1.0) / kf));
        let mut tau_hi = Vec::with_capacity(k);
        for t in 1..k {
            let shape = if t == 1 {
                vertex_term
            } else {
                alpha.powi((k - t) as i32)
            };
            let prefactor = match scale {
                Scale::Uniform { factor } => {
                    let base = kf.powi(4 * k as i32) / (gamma * gamma);
                    let base = if t == 1 {
                        base
                    } else {
                        base / beta.powi(k as i32)
                    };
                    factor * base
                }
                Scale::Practical { threshold, .. } => threshold * factorial(k - 2),
            };
            tau_hi.push(prefactor * shape);
        }
        tau_hi.push(1.0);

        let lo_ratio = beta.powi(k as i32) / (4.0 * factorial(k).powi(2));
        let mut tau_lo: Vec<f64> = tau_hi[..k - 1].iter().map(|t| t * lo_ratio).collect();
        tau_lo.push(1.0);

        Ok(Thresholds {
            k,
            alpha,
            nk_guess,
            eps,
            gamma,
            beta,
            tau_hi,
            tau_lo,
            scale,
        })
    }

    /// `τ̄_t` for `t` in `1..=k`.
    pub fn hi(&self, t: usize) -> f64 {
        self.tau_hi[t - 1]
    }

    /// `τ̲_t` for `t` in `1..=k`.
    pub fn lo(&self, t: usize) -> f64 {
        self.tau_lo[t - 1]
    }
}
