//! Exact versions of the objects the randomized estimator approximates:
//! sociability thresholds, sociable/costly classification, the active set,
//! and the assignment-derived weight function with its legality and
//! goodness checks.

mod thresholds;
mod weight;

pub use thresholds::{clamp_eps, ParamError, Scale, Thresholds};
pub use weight::{
    exact_weight, verify_good, verify_legal, GoodnessReport, LegalityReport, WeightTable,
};

pub(crate) use thresholds::factorial;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::exact::{clique_stats, enumerate_cliques, CliqueStats, ExactError};
use crate::graph::{Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sociability {
    /// `c_k(T) > τ̄_t`.
    Sociable,
    /// `c_k(T) <= τ̲_t`.
    NonSociable,
    /// In between, where either oracle answer is acceptable.
    Intermediate,
}

impl Sociability {
    pub fn from_count(c_k: u64, lo: f64, hi: f64) -> Sociability {
        let c = c_k as f64;
        if c > hi {
            Sociability::Sociable
        } else if c <= lo {
            Sociability::NonSociable
        } else {
            Sociability::Intermediate
        }
    }
}

pub fn classify_sociable(
    g: &Graph,
    clique: &[Vertex],
    th: &Thresholds,
) -> Result<Sociability, ExactError> {
    let t = clique.len();
    assert!((1..=th.k).contains(&t), "clique size outside [1, k]");
    let stats = clique_stats(g, clique, th.k)?;
    Ok(Sociability::from_count(stats.c_k, th.lo(t), th.hi(t)))
}

/// Whether some level `j` in `[i, k-1]` has `d(C_j(I)) / c_k(I)` above
/// `2m·α^{j-1} / (γ·ñ_k)`. Cliques in no `k`-clique are never costly.
pub fn is_costly(stats: &CliqueStats, m: usize, th: &Thresholds) -> bool {
    if stats.c_k == 0 {
        return false;
    }
    let c = stats.c_k as f64;
    (stats.t..th.k).any(|j| {
        let bound = 2.0 * m as f64 * th.alpha.powi(j as i32 - 1) / (th.gamma * th.nk_guess);
        stats.degree_sum(j) as f64 / c > bound
    })
}

pub fn classify_costly(g: &Graph, clique: &[Vertex], th: &Thresholds) -> Result<bool, ExactError> {
    assert!(
        (1..th.k).contains(&clique.len()),
        "costliness is defined for sizes 1..k-1"
    );
    let stats = clique_stats(g, clique, th.k)?;
    Ok(is_costly(&stats, g.edge_count(), th))
}

/// A set of ordered cliques of sizes below `k`. Ordered `k`-cliques are
/// always members.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActiveSet {
    k: usize,
    members: FxHashSet<Vec<Vertex>>,
}

impl ActiveSet {
    pub fn new(k: usize) -> Self {
        ActiveSet {
            k,
            members: FxHashSet::default(),
        }
    }

    /// Every ordered clique of size below `k`.
    pub fn everything(g: &Graph, k: usize) -> Self {
        let mut set = ActiveSet::new(k);
        for t in 1..k {
            for c in enumerate_cliques(g, t) {
                for_each_permutation(&c, |p| {
                    set.members.insert(p.to_vec());
                });
            }
        }
        set
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn contains(&self, ordered: &[Vertex]) -> bool {
        ordered.len() >= self.k || self.members.contains(ordered)
    }

    pub fn insert(&mut self, ordered: Vec<Vertex>) -> bool {
        assert!(
            ordered.len() < self.k,
            "k-level cliques are implicit members"
        );
        self.members.insert(ordered)
    }

    pub fn remove(&mut self, ordered: &[Vertex]) -> bool {
        self.members.remove(ordered)
    }

    /// Number of explicit members (sizes below `k`).
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in lexicographic order.
    pub fn sorted_members(&self) -> Vec<Vec<Vertex>> {
        let mut v: Vec<_> = self.members.iter().cloned().collect();
        v.sort();
        v
    }
}

/// Calls `f` on each permutation of `items` in lexicographic order of
/// positions (so in id order when `items` is sorted).
pub(crate) fn for_each_permutation<F: FnMut(&[Vertex])>(items: &[Vertex], mut f: F) {
    let mut perm = items.to_vec();
    perm.sort_unstable();
    loop {
        f(&perm);
        // Next permutation in lexicographic order.
        let Some(i) = (0..perm.len().saturating_sub(1))
            .rev()
            .find(|&i| perm[i] < perm[i + 1])
        else {
            return;
        };
        let j = (i + 1..perm.len())
            .rev()
            .find(|&j| perm[j] > perm[i])
            .unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Ordered cliques of size `1..k-1` whose underlying clique is neither
/// sociable nor costly (intermediate ones are kept), plus implicitly every
/// ordered `k`-clique.
pub fn exact_active_set(g: &Graph, th: &Thresholds) -> ActiveSet {
    let mut set = ActiveSet::new(th.k);
    let m = g.edge_count();
    for t in 1..th.k {
        for c in enumerate_cliques(g, t) {
            let stats = clique_stats(g, &c, th.k).expect("enumerated cliques are cliques");
            let sociable =
                Sociability::from_count(stats.c_k, th.lo(t), th.hi(t)) == Sociability::Sociable;
            if !sociable && !is_costly(&stats, m, th) {
                for_each_permutation(&c, |p| {
                    set.members.insert(p.to_vec());
                });
            }
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::count_cliques_exact;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(
            n,
            (0..n as Vertex).flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v))),
        )
        .unwrap()
    }

    #[test]
    fn permutations_in_lex_order() {
        let mut seen = Vec::new();
        for_each_permutation(&[2, 0, 1], |p| seen.push(p.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
    }

    #[test]
    fn sociability_cases() {
        let k4 = complete(4);
        let th = Thresholds::compute(3, 3.0, 4.0, 0.1, Scale::PAPER).unwrap();
        assert_eq!(
            classify_sociable(&k4, &[0, 1, 2], &th).unwrap(),
            Sociability::NonSociable
        );
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            classify_sociable(&path, &[1], &th).unwrap(),
            Sociability::NonSociable
        );
        assert_eq!(
            Sociability::from_count(5, 2.0, 8.0),
            Sociability::Intermediate
        );
        assert_eq!(Sociability::from_count(9, 2.0, 8.0), Sociability::Sociable);
        assert_eq!(
            Sociability::from_count(2, 2.0, 8.0),
            Sociability::NonSociable
        );
    }

    #[test]
    fn costliness_on_k4() {
        let k4 = complete(4);
        // Vertex of K_4, k = 3: d(C_1)/c_3 = 3/3 = 1 and d(C_2)/c_3 = 9/3 = 3.
        // With ñ = 1e9 the level-1 bound 2·6/(γ·1e9) is far below 1.
        let huge = Thresholds::compute(3, 3.0, 1e9, 0.5, Scale::PAPER).unwrap();
        assert!(classify_costly(&k4, &[0], &huge).unwrap());
        // With ñ = 1 the bounds are 12/γ and 36/γ with γ = 1/2592.
        let one = Thresholds::compute(3, 3.0, 1.0, 0.5, Scale::PAPER).unwrap();
        assert!(!classify_costly(&k4, &[0], &one).unwrap());
        // No triangles through an isolated edge: never costly.
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert!(!classify_costly(&edge, &[0], &huge).unwrap());
    }

    #[test]
    fn active_set_on_single_clique() {
        let k4 = complete(4);
        let th = Thresholds::compute(4, 3.0, 1.0, 0.1, Scale::PAPER).unwrap();
        let a = exact_active_set(&k4, &th);
        // C(4,t)·t! orderings for t = 1, 2, 3: 4 + 12 + 24.
        assert_eq!(a.len(), 40);
        assert!(a.contains(&[3, 1, 0, 2]));
        assert_eq!(a, ActiveSet::everything(&k4, 4));
    }

    #[test]
    fn tiny_vertex_threshold_deactivates_vertices() {
        let k4 = complete(4);
        let base = Thresholds::compute(3, 3.0, 4.0, 0.1, Scale::PAPER).unwrap();
        let factor = 0.5 / base.hi(1);
        let th = Thresholds::compute(3, 3.0, 4.0, 0.1, Scale::uniform(factor)).unwrap();
        assert!((th.hi(1) - 0.5).abs() < 1e-9);
        let a = exact_active_set(&k4, &th);
        assert!((0..4).all(|v| !a.contains(&[v])));
        let wt = exact_weight(&k4, &a, 3);
        assert_eq!(wt.total(), 0);
        assert_eq!(count_cliques_exact(&k4, 3), 4);
    }
}
