use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{median, EstimatorError};
use crate::graph::{QuerySession, Vertex};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeStrategy {
    /// Reads the true `m` outside the query model. Costs no queries; the
    /// session is flagged.
    #[default]
    ExactSidechannel,
    /// `(n/2) ·` mean sampled degree, median over batches.
    DegreeSampling,
}

impl fmt::Display for EdgeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeStrategy::ExactSidechannel => "exact-sidechannel",
            EdgeStrategy::DegreeSampling => "degree-sampling",
        })
    }
}

impl FromStr for EdgeStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact-sidechannel" => Ok(EdgeStrategy::ExactSidechannel),
            "degree-sampling" => Ok(EdgeStrategy::DegreeSampling),
            other => Err(format!(
                "unknown edge strategy {other:?} (exact-sidechannel, degree-sampling)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEstimate {
    pub value: f64,
    pub strategy: EdgeStrategy,
}

/// One estimate of the edge count.
///
/// Degree sampling averages `⌈8√n⌉` uniform degree queries per batch over
/// `⌈12 ln(2/δ)⌉` batches and returns the median batch value.
pub fn estimate_edges<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    delta: f64,
    strategy: EdgeStrategy,
    rng: &mut R,
) -> Result<EdgeEstimate, EstimatorError> {
    let n = session.vertex_count();
    let value = match strategy {
        EdgeStrategy::ExactSidechannel => session.edge_count_side_channel() as f64,
        EdgeStrategy::DegreeSampling if n == 0 => 0.0,
        EdgeStrategy::DegreeSampling => {
            let batches = (12.0 * (2.0 / delta).ln()).ceil().max(1.0) as usize;
            let per_batch = (8.0 * (n as f64).sqrt()).ceil() as usize;
            let mut values = Vec::with_capacity(batches);
            for _ in 0..batches {
                let mut sum = 0u64;
                for _ in 0..per_batch {
                    sum += session.degree(rng.random_range(0..n as Vertex))? as u64;
                }
                values.push(n as f64 / 2.0 * sum as f64 / per_batch as f64);
            }
            median(&values)
        }
    };
    Ok(EdgeEstimate { value, strategy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rng::stream;

    #[test]
    fn sidechannel_is_exact_and_flagged() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut s = QuerySession::new(&g);
        let e =
            estimate_edges(&mut s, 0.1, EdgeStrategy::ExactSidechannel, &mut stream(0)).unwrap();
        assert_eq!(e.value, 3.0);
        assert!(s.used_side_channel());
        assert_eq!(s.raw_total(), 0);
    }

    #[test]
    fn regular_graph_sampling_is_exact() {
        let n = 40;
        let g = Graph::from_edges(n, (0..n as Vertex).map(|i| (i, (i + 1) % n as Vertex))).unwrap();
        let mut s = QuerySession::new(&g);
        let e = estimate_edges(&mut s, 0.1, EdgeStrategy::DegreeSampling, &mut stream(1)).unwrap();
        assert_eq!(e.value, 40.0);
        assert!(!s.used_side_channel());
    }

    #[test]
    fn star_within_factor_two_mostly() {
        let n = 10_000;
        let g = Graph::from_edges(n, (1..n as Vertex).map(|v| (0, v))).unwrap();
        let m = (n - 1) as f64;
        let good = (0..10)
            .filter(|&seed| {
                let mut s = QuerySession::new(&g);
                let e =
                    estimate_edges(&mut s, 0.1, EdgeStrategy::DegreeSampling, &mut stream(seed))
                        .unwrap();
                e.value >= m / 2.0 && e.value <= 2.0 * m
            })
            .count();
        assert!(good >= 9, "{good}/10");
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [EdgeStrategy::ExactSidechannel, EdgeStrategy::DegreeSampling] {
            assert_eq!(s.to_string().parse::<EdgeStrategy>().unwrap(), s);
        }
        assert!("guess".parse::<EdgeStrategy>().is_err());
    }
}
