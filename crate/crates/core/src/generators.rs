//! Test-graph families of bounded degeneracy, including the two lower-bound
//! constructions (a planted clique on an α-regular bipartite scaffold, and
//! the set-intersection gadget).

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};
use crate::rng::stream;

#[derive(Debug, Error)]
pub enum GenError {
    #[error(
        "clique size w = {w} exceeds alpha = {alpha}; the planted family only covers \
         n_k <= C(alpha, k)"
    )]
    Regime { w: usize, alpha: usize },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn shape(msg: impl Into<String>) -> GenError {
    GenError::Shape(msg.into())
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Largest `w` with `C(w, k) <= target`.
pub fn planted_width(target: u64, k: usize) -> usize {
    assert!(k >= 1);
    let mut w = k - 1;
    while binomial(w + 1, k) <= target as u128 {
        w += 1;
    }
    w
}

/// Each new vertex joins `min(alpha, i)` distinct uniformly chosen earlier
/// vertices, so the degeneracy is at most `alpha`.
pub fn gen_incremental_degenerate(n: usize, alpha: usize, seed: u64) -> Result<Graph, GenError> {
    if alpha < 1 {
        return Err(shape("alpha must be at least 1"));
    }
    let mut rng = stream(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        for u in index::sample(&mut rng, v, alpha.min(v)) {
            edges.push((u as Vertex, v as Vertex));
        }
    }
    Ok(Graph::from_edges(n, edges)?)
}

/// Circulant α-regular bipartite graph: left `i` joins right `i..i+α` mod
/// `side`. Left ids start at `offset`, right ids at `offset + side`.
fn circulant_bipartite(offset: usize, side: usize, alpha: usize) -> Vec<(Vertex, Vertex)> {
    let mut edges = Vec::with_capacity(side * alpha);
    for i in 0..side {
        for j in 0..alpha {
            edges.push((
                (offset + i) as Vertex,
                (offset + side + (i + j) % side) as Vertex,
            ));
        }
    }
    edges
}

fn clique_edges(offset: usize, size: usize) -> impl Iterator<Item = (Vertex, Vertex)> {
    (offset..offset + size)
        .flat_map(move |u| (u + 1..offset + size).map(move |v| (u as Vertex, v as Vertex)))
}

fn scaffold_side(n: usize, m: usize, alpha: usize) -> Result<usize, GenError> {
    if alpha < 1 {
        return Err(shape("alpha must be at least 1"));
    }
    let side = m / alpha;
    if side < alpha && m > 0 {
        return Err(shape(format!(
            "m/alpha = {side} vertices per side cannot carry alpha = {alpha} distinct neighbors"
        )));
    }
    if 2 * side > n {
        return Err(shape(format!(
            "scaffold needs 2m/alpha = {} vertices but n = {n}",
            2 * side
        )));
    }
    Ok(side)
}

fn shuffled(g: Graph, seed: u64) -> Graph {
    let mut perm: Vec<Vertex> = (0..g.vertex_count() as Vertex).collect();
    perm.shuffle(&mut stream(seed));
    g.relabel(&perm)
}

/// `n` vertices holding an α-regular bipartite scaffold with `m/α` vertices
/// per side (isolated padding for the rest), plus `w` extra vertices that
/// form a clique when `planted` and an independent set otherwise, where `w`
/// is the largest width with `C(w, k) <= nk_target`. Ids are shuffled by
/// `seed`.
pub fn gen_planted_clique(
    n: usize,
    m: usize,
    alpha: usize,
    nk_target: u64,
    k: usize,
    planted: bool,
    seed: u64,
) -> Result<Graph, GenError> {
    let w = planted_width(nk_target, k);
    if w > alpha {
        return Err(GenError::Regime { w, alpha });
    }
    let side = scaffold_side(n, m, alpha)?;
    let mut edges = circulant_bipartite(0, side, alpha);
    if planted {
        edges.extend(clique_edges(n, w));
    }
    Ok(shuffled(Graph::from_edges(n + w, edges)?, seed))
}

/// `count` disjoint copies of `K_size` inside `n` vertices that also hold an
/// α-regular bipartite scaffold with `m/α` vertices per side. Ids are
/// shuffled by `seed`.
pub fn gen_disjoint_cliques(
    count: usize,
    size: usize,
    n: usize,
    m: usize,
    alpha: usize,
    seed: u64,
) -> Result<Graph, GenError> {
    let side = scaffold_side(n, m, alpha)?;
    let used = 2 * side + count * size;
    if used > n {
        return Err(shape(format!(
            "{count} cliques of size {size} and the scaffold need {used} vertices but n = {n}"
        )));
    }
    let mut edges = circulant_bipartite(0, side, alpha);
    for c in 0..count {
        edges.extend(clique_edges(2 * side + c * size, size));
    }
    Ok(shuffled(Graph::from_edges(n, edges)?, seed))
}

/// Set-intersection gadget.
///
/// With `N = m/α`, `x` and `y` are `N × α` bit grids (row-major). Parts
/// `A, A', B, B'` have `N` vertices, `S_1..S_{k-2}` have `α/k` vertices and
/// form a complete multipartite graph joined to all of `A ∪ B`, and `C` is
/// `n - N` isolated vertices. Cell `(i, j)` adds `(a_i, a'_{i+j})` and
/// `(b_{i+j}, b'_i)` when `x·y = 0`, and `(a_i, b_{i+j})` and
/// `(a'_{i+j}, b'_i)` when `x·y = 1`. Every intersecting cell yields
/// `(α/k)^{k-2}` k-cliques.
pub fn gen_int_construction(
    x: &[bool],
    y: &[bool],
    n: usize,
    m: usize,
    alpha: usize,
    k: usize,
) -> Result<Graph, GenError> {
    if k < 3 {
        return Err(shape("the construction needs k >= 3"));
    }
    if alpha == 0 || !alpha.is_multiple_of(k) {
        return Err(shape(format!(
            "alpha = {alpha} must be a positive multiple of k = {k}"
        )));
    }
    if !m.is_multiple_of(alpha) {
        return Err(shape(format!(
            "m = {m} must be a multiple of alpha = {alpha}"
        )));
    }
    if x.len() != m || y.len() != m {
        return Err(shape(format!(
            "x and y must have m = {m} bits, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let big = m / alpha;
    if big < alpha {
        return Err(shape(format!(
            "m/alpha = {big} must be at least alpha = {alpha}"
        )));
    }
    if n < big {
        return Err(shape(format!("n = {n} must be at least m/alpha = {big}")));
    }
    let part = alpha / k;
    let (a, a2, b, b2) = (0, big, 2 * big, 3 * big);
    let s0 = 4 * big;
    let total = s0 + (k - 2) * part + (n - big);
    let v = |base: usize, i: usize| (base + i % big) as Vertex;

    let mut edges = Vec::new();
    for i in 0..big {
        for j in 0..alpha {
            let cell = i * alpha + j;
            if x[cell] && y[cell] {
                edges.push((v(a, i), v(b, i + j)));
                edges.push((v(a2, i + j), v(b2, i)));
            } else {
                edges.push((v(a, i), v(a2, i + j)));
                edges.push((v(b, i + j), v(b2, i)));
            }
        }
    }
    let s = |p: usize, i: usize| (s0 + p * part + i) as Vertex;
    for p in 0..k - 2 {
        for i in 0..part {
            for q in p + 1..k - 2 {
                for j in 0..part {
                    edges.push((s(p, i), s(q, j)));
                }
            }
            for t in 0..big {
                edges.push((s(p, i), v(a, t)));
                edges.push((s(p, i), v(b, t)));
            }
        }
    }
    Ok(Graph::from_edges(total, edges)?)
}

/// Random `x, y` of `len` bits that intersect in exactly `r` positions.
pub fn int_inputs(len: usize, r: usize, seed: u64) -> (Vec<bool>, Vec<bool>) {
    assert!(r <= len);
    let mut rng = stream(seed);
    let mut x = vec![false; len];
    let mut y = vec![false; len];
    let hits = index::sample(&mut rng, len, r).into_vec();
    for i in 0..len {
        match rng.random_range(0..3) {
            0 => x[i] = true,
            1 => y[i] = true,
            _ => {}
        }
    }
    for i in hits {
        x[i] = true;
        y[i] = true;
    }
    (x, y)
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, clique_edges(0, n)).expect("valid")
}

/// Hub 0 joined to the cycle `1..=rim`.
pub fn wheel(rim: usize) -> Graph {
    assert!(rim >= 3);
    let edges = (1..=rim).flat_map(|i| [(0, i), (i, i % rim + 1)]);
    Graph::from_edges(rim + 1, edges.map(|(u, v)| (u as Vertex, v as Vertex))).expect("valid")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    Graph::from_edges(n, (0..n).map(|i| (i as Vertex, ((i + 1) % n) as Vertex))).expect("valid")
}

/// Center 0 with `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v as Vertex))).expect("valid")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| ((i - 1) as Vertex, i as Vertex))).expect("valid")
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::from_edges(10, outer.chain(spokes).chain(inner)).expect("valid")
}

/// Serializable description of a generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenSpec {
    Complete {
        size: usize,
    },
    Wheel {
        size: usize,
    },
    Cycle {
        size: usize,
    },
    Star {
        size: usize,
    },
    Path {
        size: usize,
    },
    Petersen,
    Incremental {
        n: usize,
        alpha: usize,
        seed: u64,
    },
    Planted {
        n: usize,
        m: usize,
        alpha: usize,
        nk: u64,
        k: usize,
        planted: bool,
        seed: u64,
    },
    Cliques {
        count: usize,
        size: usize,
        n: usize,
        m: usize,
        alpha: usize,
        seed: u64,
    },
    /// Either explicit `x`, `y` bit strings (`0`/`1` characters) or
    /// `intersections` random positions drawn from `seed`.
    Int {
        n: usize,
        m: usize,
        alpha: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intersections: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
}

fn parse_bits(s: &str) -> Result<Vec<bool>, GenError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(shape(format!(
                "bit strings hold only 0 and 1, found {other:?}"
            ))),
        })
        .collect()
}

impl GenSpec {
    pub fn build(&self) -> Result<Graph, GenError> {
        Ok(match *self {
            GenSpec::Complete { size } => complete(size),
            GenSpec::Wheel { size } if size >= 3 => wheel(size),
            GenSpec::Cycle { size } if size >= 3 => cycle(size),
            GenSpec::Wheel { .. } | GenSpec::Cycle { .. } => {
                return Err(shape("wheel and cycle need size >= 3"))
            }
            GenSpec::Star { size } => star(size),
            GenSpec::Path { size } => path(size),
            GenSpec::Petersen => petersen(),
            GenSpec::Incremental { n, alpha, seed } => gen_incremental_degenerate(n, alpha, seed)?,
            GenSpec::Planted {
                n,
                m,
                alpha,
                nk,
                k,
                planted,
                seed,
            } => gen_planted_clique(n, m, alpha, nk, k, planted, seed)?,
            GenSpec::Cliques {
                count,
                size,
                n,
                m,
                alpha,
                seed,
            } => gen_disjoint_cliques(count, size, n, m, alpha, seed)?,
            GenSpec::Int {
                n,
                m,
                alpha,
                k,
                ref x,
                ref y,
                intersections,
                seed,
            } => {
                let (x, y) = match (x, y, intersections) {
                    (Some(x), Some(y), None) => (parse_bits(x)?, parse_bits(y)?),
                    (None, None, Some(r)) if r <= m => int_inputs(m, r, seed),
                    (None, None, Some(r)) => {
                        return Err(shape(format!("{r} intersections exceed m = {m}")))
                    }
                    _ => return Err(shape("give either x and y, or intersections")),
                };
                gen_int_construction(&x, &y, n, m, alpha, k)?
            }
        })
    }

    /// Degeneracy bound the family guarantees, if any.
    pub fn degeneracy_bound(&self) -> Option<usize> {
        match *self {
            GenSpec::Complete { size } => Some(size.saturating_sub(1)),
            GenSpec::Wheel { .. } => Some(3),
            GenSpec::Cycle { .. } | GenSpec::Star { .. } | GenSpec::Path { .. } => Some(2),
            GenSpec::Petersen => Some(3),
            GenSpec::Incremental { alpha, .. } | GenSpec::Planted { alpha, .. } => Some(alpha),
            GenSpec::Cliques { size, alpha, .. } => Some(alpha.max(size.saturating_sub(1))),
            GenSpec::Int { alpha, .. } => Some(2 * alpha - 1),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            GenSpec::Complete { .. } => "complete",
            GenSpec::Wheel { .. } => "wheel",
            GenSpec::Cycle { .. } => "cycle",
            GenSpec::Star { .. } => "star",
            GenSpec::Path { .. } => "path",
            GenSpec::Petersen => "petersen",
            GenSpec::Incremental { .. } => "incremental",
            GenSpec::Planted { .. } => "planted",
            GenSpec::Cliques { .. } => "cliques",
            GenSpec::Int { .. } => "int",
        }
    }
}
