//! Query accounting.
//!
//! Raw counters count every call. The distinct counter models an algorithm
//! that remembers every answer it has seen:
//!
//! * a degree query costs 1 the first time a vertex is asked about;
//! * a neighbor query costs 1 the first time an adjacency slot is read;
//! * a pair query is charged to the endpoint whose list is searched (the
//!   shorter one) and costs 1 the first time that partner is probed.
//!
//! Whatever is learned about a vertex's adjacency can also be learned by
//! reading its full list, so the slot and pair charges of a vertex `u` are
//! capped at `d(u)` in total. Hence `distinct <= n + 2m` always.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Graph, Vertex};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("neighbor index {index} out of range for vertex {v} of degree {degree}")]
    NeighborIndex {
        v: Vertex,
        index: usize,
        degree: usize,
    },
    #[error("pair query on a single vertex {0}")]
    SamePair(Vertex),
    #[error("query budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },
}

/// Snapshot of a session's counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub degree: u64,
    pub neighbor: u64,
    pub pair: u64,
    pub raw_total: u64,
    pub distinct: u64,
}

impl QueryStats {
    /// Counter growth since `earlier`, a snapshot of the same session.
    pub fn since(&self, earlier: &QueryStats) -> QueryStats {
        QueryStats {
            degree: self.degree - earlier.degree,
            neighbor: self.neighbor - earlier.neighbor,
            pair: self.pair - earlier.pair,
            raw_total: self.raw_total - earlier.raw_total,
            distinct: self.distinct - earlier.distinct,
        }
    }
}

#[derive(Clone, Debug)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Sets bit `i`, returning whether it was previously clear.
    #[inline]
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        fresh
    }
}

/// Raw-query cap shared by a session and all of its forks.
#[derive(Clone, Debug)]
struct Budget {
    limit: u64,
    spent: Arc<AtomicU64>,
}

/// Stateful query interface over a shared [`Graph`].
#[derive(Clone, Debug)]
pub struct QuerySession<'g> {
    graph: &'g Graph,
    degree_queries: u64,
    neighbor_queries: u64,
    pair_queries: u64,
    budget: Option<Budget>,
    seen_degree: BitSet,
    seen_slot: BitSet,
    seen_pair: FxHashSet<u64>,
    adjacency_cost: Vec<u32>,
    distinct_degree: u64,
    distinct_adjacency: u64,
    side_channel: bool,
}

impl<'g> QuerySession<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        QuerySession {
            graph,
            degree_queries: 0,
            neighbor_queries: 0,
            pair_queries: 0,
            budget: None,
            seen_degree: BitSet::new(graph.vertex_count()),
            seen_slot: BitSet::new(2 * graph.edge_count()),
            seen_pair: FxHashSet::default(),
            adjacency_cost: vec![0; graph.vertex_count()],
            distinct_degree: 0,
            distinct_adjacency: 0,
            side_channel: false,
        }
    }

    /// Caps the raw number of queries; the first query past the cap fails.
    /// Forks draw on the same cap, so it holds across parallel work.
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(Budget {
            limit: budget,
            spent: Arc::new(AtomicU64::new(self.raw_total())),
        });
        self
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget.as_ref().map(|b| b.limit)
    }

    pub(crate) fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Vertex count. `n` is part of the input in the query model.
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Fresh session over the same graph sharing our budget. Its counters
    /// start at zero; fold it back with [`QuerySession::absorb`].
    pub fn fork(&self) -> QuerySession<'g> {
        let mut child = QuerySession::new(self.graph);
        child.budget = self.budget.clone();
        child
    }

    /// Folds a forked session's counters and cache into this one.
    pub fn absorb(&mut self, other: QuerySession<'g>) {
        assert!(
            std::ptr::eq(self.graph, other.graph),
            "sessions over different graphs"
        );
        self.degree_queries += other.degree_queries;
        self.neighbor_queries += other.neighbor_queries;
        self.pair_queries += other.pair_queries;
        self.side_channel |= other.side_channel;

        for (mine, theirs) in self
            .seen_degree
            .words
            .iter_mut()
            .zip(&other.seen_degree.words)
        {
            let fresh = theirs & !*mine;
            self.distinct_degree += fresh.count_ones() as u64;
            *mine |= theirs;
        }
        let mut fresh_slots = Vec::new();
        for (wi, (mine, theirs)) in self
            .seen_slot
            .words
            .iter_mut()
            .zip(&other.seen_slot.words)
            .enumerate()
        {
            let mut fresh = theirs & !*mine;
            *mine |= theirs;
            while fresh != 0 {
                fresh_slots.push(wi * 64 + fresh.trailing_zeros() as usize);
                fresh &= fresh - 1;
            }
        }
        for slot in fresh_slots {
            self.charge(self.slot_owner(slot));
        }
        for key in other.seen_pair {
            if self.seen_pair.insert(key) {
                self.charge((key >> 32) as Vertex);
            }
        }
    }

    fn slot_owner(&self, slot: usize) -> Vertex {
        // Last vertex whose first slot is <= `slot` and whose list is non-empty.
        let (mut lo, mut hi) = (0usize, self.graph.vertex_count());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.graph.slot_offset(mid as Vertex) <= slot {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo as Vertex
    }

    #[inline]
    fn charge(&mut self, u: Vertex) {
        let cost = &mut self.adjacency_cost[u as usize];
        if (*cost as usize) < self.graph.degree(u) {
            self.distinct_adjacency += 1;
            *cost += 1;
        }
    }

    #[inline]
    fn spend(&mut self) -> Result<(), QueryError> {
        if let Some(b) = &self.budget {
            if b.spent.fetch_add(1, Ordering::Relaxed) >= b.limit {
                b.spent.fetch_sub(1, Ordering::Relaxed);
                return Err(QueryError::BudgetExceeded { budget: b.limit });
            }
        }
        Ok(())
    }

    #[inline]
    fn check_vertex(&self, v: Vertex) -> Result<(), QueryError> {
        let n = self.graph.vertex_count();
        if (v as usize) < n {
            Ok(())
        } else {
            Err(QueryError::VertexOutOfRange { v, n })
        }
    }

    /// Degree query.
    pub fn degree(&mut self, v: Vertex) -> Result<usize, QueryError> {
        self.check_vertex(v)?;
        self.spend()?;
        self.degree_queries += 1;
        if self.seen_degree.insert(v as usize) {
            self.distinct_degree += 1;
        }
        Ok(self.graph.degree(v))
    }

    /// Neighbor query: the `index`-th neighbor of `v` (1-based) in id order.
    pub fn neighbor(&mut self, v: Vertex, index: usize) -> Result<Vertex, QueryError> {
        self.check_vertex(v)?;
        let degree = self.graph.degree(v);
        if index == 0 || index > degree {
            return Err(QueryError::NeighborIndex { v, index, degree });
        }
        self.spend()?;
        self.neighbor_queries += 1;
        if self.seen_slot.insert(self.graph.slot_offset(v) + index - 1) {
            self.charge(v);
        }
        Ok(self.graph.neighbors(v)[index - 1])
    }

    /// Pair query: whether `(u, v)` is an edge.
    pub fn pair(&mut self, u: Vertex, v: Vertex) -> Result<bool, QueryError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(QueryError::SamePair(u));
        }
        self.spend()?;
        self.pair_queries += 1;
        let (a, b) = if self.graph.degree(u) <= self.graph.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        // Once `a` is charged its full degree, further keys change nothing,
        // here or after an absorb.
        if (self.adjacency_cost[a as usize] as usize) < self.graph.degree(a)
            && self.seen_pair.insert(((a as u64) << 32) | b as u64)
        {
            self.charge(a);
        }
        Ok(self.graph.neighbors(a).binary_search(&b).is_ok())
    }

    /// The true edge count, outside the query model. Marks the session so
    /// result records can flag it.
    pub fn edge_count_side_channel(&mut self) -> usize {
        self.side_channel = true;
        self.graph.edge_count()
    }

    pub fn used_side_channel(&self) -> bool {
        self.side_channel
    }

    pub fn raw_total(&self) -> u64 {
        self.degree_queries + self.neighbor_queries + self.pair_queries
    }

    pub fn distinct(&self) -> u64 {
        self.distinct_degree + self.distinct_adjacency
    }

    pub fn stats(&self) -> QueryStats {
        QueryStats {
            degree: self.degree_queries,
            neighbor: self.neighbor_queries,
            pair: self.pair_queries,
            raw_total: self.raw_total(),
            distinct: self.distinct(),
        }
    }
}
