//! Exact ground truth: degeneracy, k-clique counting and listing, and the
//! per-clique statistics the reference weight machinery is built on.
//!
//! Everything here reads the [`Graph`] directly and is not part of the query
//! model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("vertices {0:?} do not form a clique")]
    NotAClique(Vec<Vertex>),
}

/// Smallest-last elimination order and the degeneracy it certifies.
///
/// Repeatedly removes a vertex of minimum remaining degree (bucket queue,
/// `O(n + m)`). The degeneracy is the largest degree seen at removal time.
pub fn degeneracy_order(g: &Graph) -> (Vec<Vertex>, usize) {
    let n = g.vertex_count();
    let max_deg = g.max_degree();
    let mut deg: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    let mut buckets: Vec<Vec<Vertex>> = vec![Vec::new(); max_deg + 1];
    for v in g.vertices() {
        buckets[deg[v as usize]].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0;
    let mut cursor = 0;
    while order.len() < n {
        // Stale entries are skipped; a vertex may sit in several buckets.
        cursor = cursor.min(max_deg);
        let v = loop {
            match buckets[cursor].pop() {
                Some(v) if !removed[v as usize] && deg[v as usize] == cursor => break v,
                Some(_) => continue,
                None => cursor += 1,
            }
        };
        removed[v as usize] = true;
        degeneracy = degeneracy.max(cursor);
        order.push(v);
        for &w in g.neighbors(v) {
            let w = w as usize;
            if !removed[w] {
                deg[w] -= 1;
                buckets[deg[w]].push(w as Vertex);
                cursor = cursor.min(deg[w]);
            }
        }
    }
    (order, degeneracy)
}

/// Degeneracy of `g`; an upper bound on its arboricity.
pub fn degeneracy(g: &Graph) -> usize {
    degeneracy_order(g).1
}

/// Out-neighborhoods under the degeneracy orientation, each sorted by id.
/// Every out-degree is at most the degeneracy.
fn oriented(g: &Graph) -> Vec<Vec<Vertex>> {
    let (order, _) = degeneracy_order(g);
    let mut rank = vec![0usize; g.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        rank[v as usize] = i;
    }
    g.vertices()
        .map(|v| {
            g.neighbors(v)
                .iter()
                .copied()
                .filter(|&w| rank[w as usize] > rank[v as usize])
                .collect()
        })
        .collect()
}

fn intersect(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Calls `visit` on every `size`-subset of `candidates` (sorted ids, all
/// adjacent to the current prefix) that is a clique, extending `prefix`.
/// `adj` supplies the sorted list a vertex may extend towards.
fn extend_cliques<'a, A, F>(
    adj: &A,
    candidates: &[Vertex],
    size: usize,
    prefix: &mut Vec<Vertex>,
    visit: &mut F,
) where
    A: Fn(Vertex) -> &'a [Vertex],
    F: FnMut(&[Vertex]),
{
    if size == 0 {
        visit(prefix);
        return;
    }
    if candidates.len() < size {
        return;
    }
    for (i, &v) in candidates.iter().enumerate() {
        if candidates.len() - i < size {
            break;
        }
        let next = if size == 1 {
            Vec::new()
        } else {
            intersect(&candidates[i + 1..], adj(v))
        };
        prefix.push(v);
        extend_cliques(adj, &next, size - 1, prefix, visit);
        prefix.pop();
    }
}

/// Exact number of `k`-cliques, by recursive neighborhood intersection over
/// the degeneracy orientation.
pub fn count_cliques_exact(g: &Graph, k: usize) -> u64 {
    assert!(k >= 1, "clique size must be positive");
    match k {
        1 => return g.vertex_count() as u64,
        2 => return g.edge_count() as u64,
        _ => {}
    }
    let out = oriented(g);
    let mut total = 0u64;
    for v in g.vertices() {
        total += count_in(&out, &out[v as usize], k - 1);
    }
    total
}

fn count_in(out: &[Vec<Vertex>], candidates: &[Vertex], size: usize) -> u64 {
    if size == 1 {
        return candidates.len() as u64;
    }
    if candidates.len() < size {
        return 0;
    }
    candidates
        .iter()
        .map(|&u| {
            let next = intersect(candidates, &out[u as usize]);
            count_in(out, &next, size - 1)
        })
        .sum()
}

/// All `t`-cliques as ascending id vectors, in lexicographic order.
pub fn enumerate_cliques(g: &Graph, t: usize) -> Vec<Vec<Vertex>> {
    assert!(t >= 1, "clique size must be positive");
    let adj = |v: Vertex| g.neighbors(v);
    let mut found = Vec::new();
    let mut prefix = Vec::with_capacity(t);
    for v in g.vertices() {
        // Only larger neighbors, so each clique is produced once, sorted.
        let higher: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|&w| w > v).collect();
        prefix.push(v);
        extend_cliques(&adj, &higher, t - 1, &mut prefix, &mut |c| {
            found.push(c.to_vec())
        });
        prefix.pop();
    }
    found
}

/// Minimum-degree vertex of a clique (smallest id on ties) and its degree.
pub fn clique_degree(g: &Graph, clique: &[Vertex]) -> Result<(Vertex, usize), ExactError> {
    if clique.is_empty() || !g.is_clique(clique) {
        return Err(ExactError::NotAClique(clique.to_vec()));
    }
    Ok(min_degree_vertex(g, clique))
}

pub(crate) fn min_degree_vertex(g: &Graph, clique: &[Vertex]) -> (Vertex, usize) {
    clique
        .iter()
        .map(|&v| (g.degree(v), v))
        .min()
        .map(|(d, v)| (v, d))
        .expect("non-empty clique")
}

/// Exact participation statistics of a clique `T` of size `t`:
/// `c_k(T)` and, for `j` in `[t, k-1]`, `d(C_j(T))`, the summed degree of the
/// `j`-cliques containing `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueStats {
    pub t: usize,
    pub c_k: u64,
    pub degree_sums: BTreeMap<usize, u64>,
}

impl CliqueStats {
    pub fn degree_sum(&self, j: usize) -> u64 {
        self.degree_sums.get(&j).copied().unwrap_or(0)
    }
}

pub fn clique_stats(g: &Graph, clique: &[Vertex], k: usize) -> Result<CliqueStats, ExactError> {
    let t = clique.len();
    assert!(t <= k, "clique larger than k");
    if t == 0 || !g.is_clique(clique) {
        return Err(ExactError::NotAClique(clique.to_vec()));
    }
    let mut common: Vec<Vertex> = g.neighbors(clique[0]).to_vec();
    for &v in &clique[1..] {
        common = intersect(&common, g.neighbors(v));
    }
    let mut degree_sums = BTreeMap::new();
    let adj = |v: Vertex| g.neighbors(v);
    let mut prefix = Vec::with_capacity(k);
    let own = min_degree_vertex(g, clique).1;
    for j in t..k {
        let mut sum = 0u64;
        extend_cliques(&adj, &common, j - t, &mut prefix, &mut |extra| {
            let ext = extra
                .iter()
                .map(|&v| g.degree(v))
                .min()
                .unwrap_or(usize::MAX);
            sum += own.min(ext) as u64;
        });
        degree_sums.insert(j, sum);
    }
    let mut c_k = 0u64;
    extend_cliques(&adj, &common, k - t, &mut prefix, &mut |_| c_k += 1);
    Ok(CliqueStats {
        t,
        c_k,
        degree_sums,
    })
}

/// Which counting bound a [`BoundCheck`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `d(C_t) <= 2m·D^{t-1}`.
    DegreeSum,
    /// `t·n_t <= 2D·n_{t-1}`.
    CountRatio,
    /// `k!·n_k <= t!·n_t·(2D)^{k-t}`.
    CountChain,
}

/// One bound evaluated exactly, both sides multiplied out to integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: Bound,
    pub t: usize,
    /// Only set for [`Bound::CountChain`].
    pub k: Option<usize>,
    pub measured: u128,
    pub limit: u128,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.measured <= self.limit
    }

    /// `measured / limit`, 0 when both are 0.
    pub fn ratio(&self) -> f64 {
        if self.limit == 0 {
            if self.measured == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.measured as f64 / self.limit as f64
        }
    }
}

fn fact(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Evaluates the degree-sum and clique-count bounds for `t <= max_t` with
/// `D = degeneracy(g)` standing in for the arboricity.
pub fn arboricity_checks(g: &Graph, max_t: usize) -> Vec<BoundCheck> {
    let d = degeneracy(g) as u128;
    let m = g.edge_count() as u128;
    let counts: Vec<u128> = (0..=max_t)
        .map(|t| {
            if t == 0 {
                1
            } else {
                count_cliques_exact(g, t) as u128
            }
        })
        .collect();
    let mut out = Vec::new();
    for t in 1..=max_t {
        let sum: u128 = enumerate_cliques(g, t)
            .iter()
            .map(|c| min_degree_vertex(g, c).1 as u128)
            .sum();
        out.push(BoundCheck {
            bound: Bound::DegreeSum,
            t,
            k: None,
            measured: sum,
            limit: 2 * m * d.pow(t as u32 - 1),
        });
        if t >= 2 {
            out.push(BoundCheck {
                bound: Bound::CountRatio,
                t,
                k: None,
                measured: t as u128 * counts[t],
                limit: 2 * d * counts[t - 1],
            });
        }
    }
    for k in 2..=max_t {
        for t in 1..k {
            out.push(BoundCheck {
                bound: Bound::CountChain,
                t,
                k: Some(k),
                measured: fact(k) * counts[k],
                limit: fact(t) * counts[t] * (2 * d).pow((k - t) as u32),
            });
        }
    }
    out
}
