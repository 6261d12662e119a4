use rand::Rng;
use rustc_hash::FxHashMap;

use super::EstimatorError;
use crate::graph::{QuerySession, Vertex};
use crate::reference::{ActiveSet, Thresholds};
use crate::sampler::{sample_set_into, CliqueSample, SampleError};

/// Membership oracle for an active set of ordered cliques of size `1..k-1`.
pub trait ActivityOracle {
    fn is_active<R: Rng + ?Sized>(
        &mut self,
        session: &mut QuerySession<'_>,
        ordered: &[Vertex],
        rng: &mut R,
    ) -> Result<bool, EstimatorError>;
}

/// Every ordered clique is active.
#[derive(Clone, Copy, Debug, Default)]
pub struct AllActive;

impl ActivityOracle for AllActive {
    fn is_active<R: Rng + ?Sized>(
        &mut self,
        _: &mut QuerySession<'_>,
        _: &[Vertex],
        _: &mut R,
    ) -> Result<bool, EstimatorError> {
        Ok(true)
    }
}

/// Answers from a precomputed set, typically the exact reference set.
#[derive(Clone, Copy, Debug)]
pub struct SetOracle<'a>(pub &'a ActiveSet);

impl ActivityOracle for SetOracle<'_> {
    fn is_active<R: Rng + ?Sized>(
        &mut self,
        _: &mut QuerySession<'_>,
        ordered: &[Vertex],
        _: &mut R,
    ) -> Result<bool, EstimatorError> {
        Ok(self.0.contains(ordered))
    }
}

/// Wraps a predicate on ordered cliques.
pub struct FnOracle<F>(pub F);

impl<F: FnMut(&[Vertex]) -> bool> ActivityOracle for FnOracle<F> {
    fn is_active<R: Rng + ?Sized>(
        &mut self,
        _: &mut QuerySession<'_>,
        ordered: &[Vertex],
        _: &mut R,
    ) -> Result<bool, EstimatorError> {
        Ok((self.0)(ordered))
    }
}

/// Whether `ordered` is the lexicographically first fully active ordering of
/// its vertex set.
///
/// Orderings are walked as a prefix tree in id order; a rejected prefix
/// skips every ordering below it, which leaves the answer unchanged.
pub fn is_assigned<O, R>(
    session: &mut QuerySession<'_>,
    ordered: &[Vertex],
    oracle: &mut O,
    rng: &mut R,
) -> Result<bool, EstimatorError>
where
    O: ActivityOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut sorted = ordered.to_vec();
    sorted.sort_unstable();
    let mut used = vec![false; sorted.len()];
    let mut prefix = Vec::with_capacity(sorted.len());
    let first = first_active(session, &sorted, &mut used, &mut prefix, oracle, rng)?;
    Ok(first.as_deref() == Some(ordered))
}

fn first_active<O, R>(
    session: &mut QuerySession<'_>,
    sorted: &[Vertex],
    used: &mut [bool],
    prefix: &mut Vec<Vertex>,
    oracle: &mut O,
    rng: &mut R,
) -> Result<Option<Vec<Vertex>>, EstimatorError>
where
    O: ActivityOracle + ?Sized,
    R: Rng + ?Sized,
{
    if prefix.len() == sorted.len() {
        return Ok(Some(prefix.clone()));
    }
    for i in 0..sorted.len() {
        if used[i] {
            continue;
        }
        prefix.push(sorted[i]);
        used[i] = true;
        let keep = prefix.len() == sorted.len() || oracle.is_active(session, prefix, rng)?;
        let found = if keep {
            first_active(session, sorted, used, prefix, oracle, rng)?
        } else {
            None
        };
        used[i] = false;
        prefix.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Inputs of the sampling-based activeness test that do not depend on the
/// clique being tested.
#[derive(Clone, Debug)]
pub struct IsActiveParams {
    pub n: usize,
    pub m_guess: f64,
    pub delta: f64,
    pub thresholds: Thresholds,
}

impl IsActiveParams {
    /// Number of voting rounds, `⌈12 ln(n^k/δ)⌉`.
    pub fn rounds(&self) -> u64 {
        let k = self.thresholds.k as f64;
        let ln_n = (self.n.max(1) as f64).ln();
        (12.0 * (k * ln_n - self.delta.ln())).ceil().max(1.0) as u64
    }

    fn multiplier(&self) -> f64 {
        let th = &self.thresholds;
        th.scale.sample_multiplier(th.beta, th.gamma)
    }

    /// Cut-off on `s_{t+1}` above which a round gives up on `I`.
    pub fn costly_cut(&self, t: usize) -> f64 {
        let th = &self.thresholds;
        let (beta, gamma) = (th.beta, th.gamma);
        // Equals 12 ln(1/β)/(β^k γ³) at the literal constants.
        let tail = 4.0 * self.multiplier() * (1.0 / beta).ln()
            / ((2.0 / beta).ln() * beta.powi(th.k as i32) * gamma);
        2.0 * self.m_guess * th.alpha.powi(t as i32 - 1) * th.hi(t + 1) / th.nk_guess * tail
    }
}

/// Outcome of one voting round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Round {
    /// `ĉ_k(I)` from the round's samples.
    Estimate(f64),
    /// The round stopped on the sample-size cut-off.
    Costly,
}

/// One round: estimates the number of ordered `k`-cliques extending `I`.
pub fn is_active_round<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    ordered: &[Vertex],
    params: &IsActiveParams,
    max_samples: u64,
    rng: &mut R,
) -> Result<Round, EstimatorError> {
    let th = &params.thresholds;
    let (i, k) = (ordered.len(), th.k);
    let mult = params.multiplier();
    let mut r = CliqueSample::from_cliques(session, i, [ordered])?;
    let mut next = CliqueSample::new(i + 1);
    let mut w = (1.0 - th.eps / 2.0) * th.hi(i);
    let mut ratio = 1.0;
    let (mut d_prev, mut s_prev) = (0u64, 0u64);
    for t in i..k {
        let d = r.total_degree();
        if d == 0 {
            return Ok(Round::Estimate(0.0));
        }
        if t > i {
            w = (1.0 - th.gamma) * w * s_prev as f64 / d_prev as f64;
        }
        let s = (d as f64 * th.hi(t + 1) / w * mult).ceil();
        if s > params.costly_cut(t) {
            return Ok(Round::Costly);
        }
        if s > max_samples as f64 {
            return Err(EstimatorError::SampleLimit {
                level: t + 1,
                requested: s,
            });
        }
        let s = s as u64;
        match sample_set_into(session, &r, s, rng, &mut next) {
            Ok(()) => std::mem::swap(&mut r, &mut next),
            Err(SampleError::Query(e)) => return Err(e.into()),
            Err(e) => unreachable!("positive degree sample: {e}"),
        }
        ratio *= d as f64 / s as f64;
        d_prev = d;
        s_prev = s;
    }
    Ok(Round::Estimate(ratio * r.len() as f64))
}

/// Majority vote over [`IsActiveParams::rounds`] rounds; a round votes for
/// active when its estimate is at most `τ̄_i / 4`.
///
/// Stops as soon as the majority is decided, which gives the same answer as
/// running every round.
pub fn is_active<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    ordered: &[Vertex],
    params: &IsActiveParams,
    max_samples: u64,
    rng: &mut R,
) -> Result<bool, EstimatorError> {
    let q = params.rounds();
    let cut = params.thresholds.hi(ordered.len()) / 4.0;
    // Active iff yes >= q/2.
    let need = q.div_ceil(2);
    let (mut yes, mut no) = (0u64, 0u64);
    while yes < need && no <= q - need {
        match is_active_round(session, ordered, params, max_samples, rng)? {
            Round::Estimate(c) if c <= cut => yes += 1,
            _ => no += 1,
        }
    }
    Ok(yes >= need)
}

/// [`is_active`] behind a memo: the first answer for each ordered clique is
/// reused for the lifetime of the oracle.
#[derive(Clone, Debug)]
pub struct IsActiveOracle {
    params: IsActiveParams,
    max_samples: u64,
    memo: FxHashMap<Vec<Vertex>, bool>,
    calls: u64,
}

impl IsActiveOracle {
    pub fn new(params: IsActiveParams, max_samples: u64) -> Self {
        IsActiveOracle {
            params,
            max_samples,
            memo: FxHashMap::default(),
            calls: 0,
        }
    }

    /// Number of distinct cliques tested so far.
    pub fn evaluations(&self) -> u64 {
        self.calls
    }
}

impl ActivityOracle for IsActiveOracle {
    fn is_active<R: Rng + ?Sized>(
        &mut self,
        session: &mut QuerySession<'_>,
        ordered: &[Vertex],
        rng: &mut R,
    ) -> Result<bool, EstimatorError> {
        if let Some(&a) = self.memo.get(ordered) {
            return Ok(a);
        }
        self.calls += 1;
        let a = is_active(session, ordered, &self.params, self.max_samples, rng)?;
        self.memo.insert(ordered.to_vec(), a);
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::reference::Scale;
    use crate::rng::stream;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn assigned<O: ActivityOracle>(g: &Graph, c: &[Vertex], o: &mut O) -> bool {
        let mut s = QuerySession::new(g);
        is_assigned(&mut s, c, o, &mut stream(0)).unwrap()
    }

    #[test]
    fn all_active_assigns_sorted_ordering() {
        let g = triangle();
        assert!(assigned(&g, &[0, 1, 2], &mut AllActive));
        for c in [[0, 2, 1], [1, 0, 2], [2, 1, 0]] {
            assert!(!assigned(&g, &c, &mut AllActive));
        }
    }

    #[test]
    fn rejected_min_vertex_moves_assignment() {
        let g = triangle();
        let mut o = FnOracle(|c: &[Vertex]| c != [0]);
        assert!(assigned(&g, &[1, 0, 2], &mut o));
        assert!(!assigned(&g, &[0, 1, 2], &mut o));
    }

    #[test]
    fn no_active_vertex_assigns_nothing() {
        let g = triangle();
        let mut o = FnOracle(|c: &[Vertex]| c.len() != 1);
        for c in [[0, 1, 2], [1, 0, 2], [2, 0, 1]] {
            assert!(!assigned(&g, &c, &mut o));
        }
    }

    #[test]
    fn prefix_tree_skips_rejected_subtrees() {
        let g = triangle();
        let mut seen = Vec::new();
        let mut o = FnOracle(|c: &[Vertex]| {
            seen.push(c.to_vec());
            c != [0]
        });
        assigned(&g, &[1, 0, 2], &mut o);
        // (0) is rejected once; (1) and (1,0) accept and end the walk.
        assert_eq!(seen, vec![vec![0], vec![1], vec![1, 0]]);
    }

    fn params(g: &Graph, k: usize, nk: f64, scale: Scale) -> IsActiveParams {
        IsActiveParams {
            n: g.vertex_count(),
            m_guess: g.edge_count() as f64,
            delta: 0.1,
            thresholds: Thresholds::compute(k, 2.0, nk, 0.1, scale).unwrap(),
        }
    }

    #[test]
    fn clique_free_extension_is_active() {
        // C_6 is triangle-free: every edge has c_3 = 0.
        let g = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        let p = params(&g, 3, 1.0, Scale::practical());
        let mut s = QuerySession::new(&g);
        let mut rng = stream(3);
        assert_eq!(
            is_active_round(&mut s, &[0, 1], &p, 1 << 20, &mut rng).unwrap(),
            Round::Estimate(0.0)
        );
        assert!(is_active(&mut s, &[0, 1], &p, 1 << 20, &mut rng).unwrap());
    }

    #[test]
    fn rounds_formula() {
        let g = Graph::empty(100);
        let p = params(&g, 3, 10.0, Scale::PAPER);
        let expected = (12.0 * (3.0 * 100f64.ln() + 10f64.ln())).ceil() as u64;
        assert_eq!(p.rounds(), expected);
    }

    #[test]
    fn costly_cut_matches_literal_formula() {
        let g = Graph::empty(50);
        let mut p = params(&g, 3, 10.0, Scale::PAPER);
        p.m_guess = 7.0;
        let th = &p.thresholds;
        let literal = 2.0 * p.m_guess * 2.0 * th.hi(3) / 10.0 * 12.0 * (1.0 / th.beta).ln()
            / (th.beta.powi(3) * th.gamma.powi(3));
        assert!((p.costly_cut(2) / literal - 1.0).abs() < 1e-9);
    }

    #[test]
    fn memo_reuses_first_answer() {
        let g = triangle();
        let p = params(&g, 3, 1.0, Scale::practical());
        let mut o = IsActiveOracle::new(p, 1 << 20);
        let mut s = QuerySession::new(&g);
        let mut rng = stream(9);
        let a = o.is_active(&mut s, &[0], &mut rng).unwrap();
        let raw = s.raw_total();
        assert_eq!(o.is_active(&mut s, &[0], &mut rng).unwrap(), a);
        assert_eq!(s.raw_total(), raw);
        assert_eq!(o.evaluations(), 1);
    }
}
