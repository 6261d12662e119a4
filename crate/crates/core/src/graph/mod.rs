//! Immutable simple undirected graphs and the degree/neighbor/pair query model.
//!
//! [`Graph`] stores sorted adjacency in CSR form. Algorithms that play by the
//! query model never touch it directly; they go through a [`QuerySession`],
//! which answers the three query types and keeps the raw and deduplicated
//! query counts.

mod io;
mod session;

pub use io::{parse_edge_list, read_edge_list, write_edge_list};
pub use session::{QueryError, QuerySession, QueryStats};

use thiserror::Error;

/// Dense vertex identifier in `0..n`.
pub type Vertex = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex id {id} out of range for a graph on {n} vertices")]
    VertexOutOfRange { id: u64, n: usize },
    #[error("self-loop on vertex {0} is not allowed in a simple graph")]
    SelfLoop(Vertex),
    #[error("graph with {0} vertices exceeds the 32-bit vertex id space")]
    TooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Simple undirected graph with strictly increasing adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
}

impl Graph {
    /// Builds a graph from an edge list, collapsing duplicates and symmetrizing.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n > Vertex::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        let mut arcs = Vec::new();
        for (u, v) in edges {
            for id in [u, v] {
                if id as usize >= n {
                    return Err(GraphError::VertexOutOfRange { id: id as u64, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            arcs.push((u, v));
            arcs.push((v, u));
        }
        arcs.sort_unstable();
        arcs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.into_iter().map(|(_, v)| v).collect();
        Ok(Graph { offsets, targets })
    }

    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges. Query-model algorithms must not read this;
    /// they estimate it or take it through a flagged side channel.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Offset of `v`'s first adjacency slot in the flat arc array.
    #[inline]
    pub(crate) fn slot_offset(&self, v: Vertex) -> usize {
        self.offsets[v as usize]
    }

    /// Adjacency test by binary search on the shorter list.
    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        0..self.vertex_count() as Vertex
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// True when every vertex in `set` is adjacent to every other one.
    pub fn is_clique(&self, set: &[Vertex]) -> bool {
        set.iter().enumerate().all(|(i, &u)| {
            (u as usize) < self.vertex_count()
                && set[i + 1..].iter().all(|&v| u != v && self.has_edge(u, v))
        })
    }

    /// Disjoint union, with `other` relabeled to `n..n + other.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count() as Vertex;
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + shift, v + shift)));
        Graph::from_edges(self.vertex_count() + other.vertex_count(), edges)
            .expect("union of valid graphs is valid")
    }

    /// Same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        assert_eq!(perm.len(), self.vertex_count());
        let edges = self
            .edges()
            .map(|(u, v)| (perm[u as usize], perm[v as usize]));
        Graph::from_edges(self.vertex_count(), edges).expect("relabeling preserves validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn triangle_has_three_edges() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn isolated_vertices() {
        let g = Graph::from_edges(5, []).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 0);
        assert!(g.vertices().all(|v| g.degree(v) == 0));
    }

    #[test]
    fn rejects_out_of_range_and_loops() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(GraphError::VertexOutOfRange { id: 2, n: 2 })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(1, 1)]),
            Err(GraphError::SelfLoop(1))
        ));
    }

    #[test]
    fn edges_listed_once() {
        let g = triangle();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn union_shifts_ids() {
        let g = triangle().disjoint_union(&triangle());
        assert_eq!(g.vertex_count(), 6);
        assert!(g.has_edge(3, 5));
        assert!(!g.has_edge(2, 3));
    }
}
