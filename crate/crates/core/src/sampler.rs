//! Degree-proportional sampling over multisets of ordered cliques.

use rand::Rng;
use thiserror::Error;

use crate::graph::{QueryError, QuerySession, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("sample has total degree 0")]
    Empty,
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// Walker/Vose alias table over positive integer weights: `O(n)`
/// construction, `O(1)` draws.
#[derive(Clone, Debug)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// `None` when every weight is zero.
    pub fn new(weights: &[usize]) -> Option<Self> {
        let n = weights.len();
        let sum: f64 = weights.iter().map(|&w| w as f64).sum();
        if sum == 0.0 {
            return None;
        }
        let mut prob: Vec<f64> = weights.iter().map(|&w| w as f64 * n as f64 / sum).collect();
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<u32>, Vec<u32>) =
            (0..n as u32).partition(|&i| prob[i as usize] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s as usize] = l;
            prob[l as usize] -= 1.0 - prob[s as usize];
            if prob[l as usize] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            prob[i as usize] = 1.0;
        }
        Some(AliasTable { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }

    /// Probability that [`AliasTable::sample`] returns `i`, read off the table.
    pub fn probability(&self, i: usize) -> f64 {
        let mut p = self.prob[i];
        for (j, &a) in self.alias.iter().enumerate() {
            if a as usize == i && j != i {
                p += 1.0 - self.prob[j];
            }
        }
        p / self.prob.len() as f64
    }
}

/// Samples with at most this many items are drawn from by binary search
/// over degree sums rather than through an [`AliasTable`].
const ALIAS_MIN_LEN: usize = 64;

/// A multiset `R_t` of ordered `t`-cliques with cached clique degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueSample {
    t: usize,
    items: Vec<Vertex>,
    degrees: Vec<usize>,
    min_vertex: Vec<Vertex>,
    /// Running degree sums; item `i` owns slots `ends[i-1]..ends[i]`.
    ends: Vec<u64>,
    total_degree: u64,
}

impl CliqueSample {
    pub fn new(t: usize) -> Self {
        assert!(t >= 1);
        CliqueSample {
            t,
            items: Vec::new(),
            degrees: Vec::new(),
            min_vertex: Vec::new(),
            ends: Vec::new(),
            total_degree: 0,
        }
    }

    /// Builds a sample from ordered cliques, querying every vertex degree.
    pub fn from_cliques<'a, I>(
        session: &mut QuerySession<'_>,
        t: usize,
        cliques: I,
    ) -> Result<Self, QueryError>
    where
        I: IntoIterator<Item = &'a [Vertex]>,
    {
        let mut out = CliqueSample::new(t);
        for c in cliques {
            assert_eq!(c.len(), t, "clique of the wrong size");
            debug_assert!(session.graph().is_clique(c));
            let (u, d) = min_degree(session, c)?;
            out.push(c, d, u);
        }
        Ok(out)
    }

    fn push(&mut self, clique: &[Vertex], degree: usize, min_vertex: Vertex) {
        self.items.extend_from_slice(clique);
        self.degrees.push(degree);
        self.min_vertex.push(min_vertex);
        self.total_degree += degree as u64;
        self.ends.push(self.total_degree);
    }

    fn clear(&mut self) {
        self.items.clear();
        self.degrees.clear();
        self.min_vertex.clear();
        self.ends.clear();
        self.total_degree = 0;
    }

    pub fn level(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// `d(R_t)`.
    pub fn total_degree(&self) -> u64 {
        self.total_degree
    }

    pub fn get(&self, i: usize) -> &[Vertex] {
        &self.items[i * self.t..(i + 1) * self.t]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn min_vertex(&self, i: usize) -> Vertex {
        self.min_vertex[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Vertex]> + '_ {
        self.items.chunks_exact(self.t)
    }

    /// Maps a slot in `0..d(R_t)` to its item and the 1-based neighbor
    /// index of the item's min-degree vertex. A uniform slot picks item `T`
    /// with probability `d(T)/d(R_t)` and then a uniform neighbor.
    pub fn slot(&self, x: u64) -> (usize, usize) {
        assert!(x < self.total_degree, "slot {x} out of range");
        let item = self.ends.partition_point(|&e| e <= x);
        let start = if item == 0 { 0 } else { self.ends[item - 1] };
        (item, (x - start) as usize + 1)
    }
}

/// Minimum-degree vertex of `clique` (smallest id on ties) via degree queries.
fn min_degree(
    session: &mut QuerySession<'_>,
    clique: &[Vertex],
) -> Result<(Vertex, usize), QueryError> {
    let mut best = (usize::MAX, Vertex::MAX);
    for &v in clique {
        best = best.min((session.degree(v)?, v));
    }
    Ok((best.1, best.0))
}

/// One trial of the extension step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    /// Index of the drawn item in the source sample.
    pub item: usize,
    /// Min-degree vertex of the drawn item.
    pub anchor: Vertex,
    /// The drawn neighbor of `anchor`.
    pub vertex: Vertex,
    /// Whether item + vertex is an ordered clique.
    pub accepted: bool,
}

/// Draws an item `T` with probability `d(T)/d(R_t)`, then a uniform
/// neighbor `v` of its min-degree vertex, and tests whether `(T, v)` is an
/// ordered clique. Each (item, neighbor) pair has probability `1/d(R_t)`.
///
/// `table`, when given, must be the sample's degree-weighted alias table.
pub fn draw_candidate<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    sample: &CliqueSample,
    table: Option<&AliasTable>,
    rng: &mut R,
) -> Result<Candidate, SampleError> {
    if sample.total_degree == 0 {
        return Err(SampleError::Empty);
    }
    let (item, j) = match table {
        Some(table) => {
            let item = table.sample(rng);
            (item, rng.random_range(1..=sample.degree(item)))
        }
        None => sample.slot(rng.random_range(0..sample.total_degree)),
    };
    let clique = sample.get(item);
    // Degrees are re-queried as in the procedure; the session dedups them.
    let (anchor, _) = min_degree(session, clique)?;
    let vertex = session.neighbor(anchor, j)?;
    let mut accepted = !clique.contains(&vertex);
    if accepted {
        for &w in clique {
            if w != anchor && !session.pair(w, vertex)? {
                accepted = false;
                break;
            }
        }
    }
    Ok(Candidate {
        item,
        anchor,
        vertex,
        accepted,
    })
}

/// Performs `s_next` independent trials and returns the accepted extensions
/// as `R_{t+1}`, which may hold fewer than `s_next` items.
pub fn sample_set<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    sample: &CliqueSample,
    s_next: u64,
    rng: &mut R,
) -> Result<CliqueSample, SampleError> {
    let mut out = CliqueSample::new(sample.level() + 1);
    sample_set_into(session, sample, s_next, rng, &mut out)?;
    Ok(out)
}

/// [`sample_set`] writing into `out`, which is cleared first.
pub fn sample_set_into<R: Rng + ?Sized>(
    session: &mut QuerySession<'_>,
    sample: &CliqueSample,
    s_next: u64,
    rng: &mut R,
    out: &mut CliqueSample,
) -> Result<(), SampleError> {
    if sample.total_degree == 0 {
        return Err(SampleError::Empty);
    }
    out.clear();
    out.t = sample.level() + 1;
    let table = if sample.len() > ALIAS_MIN_LEN {
        AliasTable::new(&sample.degrees)
    } else {
        None
    };
    for _ in 0..s_next {
        let c = draw_candidate(session, sample, table.as_ref(), rng)?;
        if !c.accepted {
            continue;
        }
        let dv = session.degree(c.vertex)?;
        let (d, u) = (sample.degree(c.item), c.anchor).min((dv, c.vertex));
        out.items.extend_from_slice(sample.get(c.item));
        out.items.push(c.vertex);
        out.degrees.push(d);
        out.min_vertex.push(u);
        out.total_degree += d as u64;
        out.ends.push(out.total_degree);
    }
    Ok(())
}
