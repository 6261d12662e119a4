use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{for_each_permutation, ActiveSet, Thresholds};
use crate::exact::enumerate_cliques;
use crate::graph::{Graph, Vertex};

/// Nonzero weights of ordered cliques of sizes `1..=k`, plus `wt(V)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightTable {
    k: usize,
    weights: FxHashMap<Vec<Vertex>, u64>,
    total: u64,
}

impl WeightTable {
    pub fn new(k: usize) -> Self {
        WeightTable {
            k,
            weights: FxHashMap::default(),
            total: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, ordered: &[Vertex]) -> u64 {
        self.weights.get(ordered).copied().unwrap_or(0)
    }

    /// Overwrites one entry. `wt(V)` is left alone.
    pub fn set(&mut self, ordered: Vec<Vertex>, w: u64) {
        assert!((1..=self.k).contains(&ordered.len()));
        if w == 0 {
            self.weights.remove(&ordered);
        } else {
            self.weights.insert(ordered, w);
        }
    }

    pub fn set_total(&mut self, total: u64) {
        self.total = total;
    }

    /// `wt(V)`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Nonzero entries of size `t`, sorted.
    pub fn level(&self, t: usize) -> Vec<(Vec<Vertex>, u64)> {
        let mut out: Vec<_> = self
            .weights
            .iter()
            .filter(|(c, _)| c.len() == t)
            .map(|(c, &w)| (c.clone(), w))
            .collect();
        out.sort();
        out
    }

    /// Gives `ordered` and each of its prefixes one more unit.
    fn assign(&mut self, ordered: &[Vertex]) {
        for t in 1..=ordered.len() {
            *self.weights.entry(ordered[..t].to_vec()).or_insert(0) += 1;
        }
        self.total += 1;
    }
}

fn fully_active(active: &ActiveSet, ordered: &[Vertex]) -> bool {
    (1..ordered.len()).all(|t| active.contains(&ordered[..t]))
}

/// Every `k`-clique with a fully active ordering is assigned to the
/// lexicographically first one, which gets weight 1 along with its prefixes.
pub fn exact_weight(g: &Graph, active: &ActiveSet, k: usize) -> WeightTable {
    let mut table = WeightTable::new(k);
    for clique in enumerate_cliques(g, k) {
        let mut first = None;
        for_each_permutation(&clique, |p| {
            if first.is_none() && fully_active(active, p) {
                first = Some(p.to_vec());
            }
        });
        if let Some(p) = first {
            table.assign(&p);
        }
    }
    table
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegalityReport {
    pub pass: bool,
    pub n_k: u64,
    pub total: u64,
    pub entries_checked: usize,
    pub counterexample: Option<String>,
}

fn fmt_clique(c: &[Vertex]) -> String {
    let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Checks both legality conditions and `wt(V) <= n_k`; `wt(V)` must also
/// equal the sum of vertex weights.
pub fn verify_legal(wt: &WeightTable, g: &Graph, k: usize) -> LegalityReport {
    let n_k = crate::exact::count_cliques_exact(g, k);
    let mut report = LegalityReport {
        pass: true,
        n_k,
        total: wt.total(),
        entries_checked: wt.weights.len(),
        counterexample: None,
    };
    let fail = |report: &mut LegalityReport, msg: String| {
        report.pass = false;
        report.counterexample = Some(msg);
    };

    if let Some(bad) = wt
        .weights
        .keys()
        .filter(|c| !g.is_clique(c) || has_repeat(c))
        .min()
    {
        fail(
            &mut report,
            format!("{} is not an ordered clique", fmt_clique(bad)),
        );
        return report;
    }

    let mut owner: BTreeMap<Vec<Vertex>, Vec<Vertex>> = BTreeMap::new();
    for (c, w) in wt.level(k) {
        if w > 1 {
            fail(&mut report, format!("wt{} = {w} exceeds 1", fmt_clique(&c)));
            return report;
        }
        let mut key = c.clone();
        key.sort_unstable();
        if let Some(prev) = owner.insert(key, c.clone()) {
            fail(
                &mut report,
                format!(
                    "{} and {} both have weight 1",
                    fmt_clique(&prev),
                    fmt_clique(&c)
                ),
            );
            return report;
        }
    }

    for t in (1..k).rev() {
        let mut sums: BTreeMap<Vec<Vertex>, u64> = BTreeMap::new();
        for (c, w) in wt.level(t + 1) {
            *sums.entry(c[..t].to_vec()).or_insert(0) += w;
        }
        for (c, _) in wt.level(t) {
            sums.entry(c).or_insert(0);
        }
        for (c, s) in sums {
            let own = wt.get(&c);
            if own != s {
                fail(
                    &mut report,
                    format!("wt{} = {own} but its extensions sum to {s}", fmt_clique(&c)),
                );
                return report;
            }
        }
    }

    let vertex_sum: u64 = wt.level(1).iter().map(|(_, w)| w).sum();
    if vertex_sum != wt.total() {
        fail(
            &mut report,
            format!(
                "wt(V) = {} but vertex weights sum to {vertex_sum}",
                wt.total()
            ),
        );
    } else if wt.total() > n_k {
        fail(
            &mut report,
            format!("wt(V) = {} exceeds n_k = {n_k}", wt.total()),
        );
    }
    report
}

fn has_repeat(c: &[Vertex]) -> bool {
    let mut s = c.to_vec();
    s.sort_unstable();
    s.windows(2).any(|w| w[0] == w[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    /// Every entry of size `t` is at most `τ̄_t`.
    pub bounded: bool,
    /// `wt(V) >= (1 - ε/2) n_k`.
    pub large: bool,
    pub total: u64,
    pub required_total: f64,
    /// Largest `wt(T) / τ̄_t` over all entries.
    pub max_ratio: f64,
    pub violator: Option<String>,
}

impl GoodnessReport {
    pub fn pass(&self) -> bool {
        self.bounded && self.large
    }
}

pub fn verify_good(wt: &WeightTable, th: &Thresholds, eps: f64, n_k: u64) -> GoodnessReport {
    let mut max_ratio = 0.0f64;
    let mut violator: Option<(Vec<Vertex>, u64)> = None;
    let mut entries: Vec<_> = wt.weights.iter().collect();
    entries.sort();
    for (c, &w) in entries {
        let ratio = w as f64 / th.hi(c.len());
        if ratio > 1.0 && violator.is_none() {
            violator = Some((c.clone(), w));
        }
        max_ratio = max_ratio.max(ratio);
    }
    let required_total = (1.0 - eps / 2.0) * n_k as f64;
    GoodnessReport {
        bounded: violator.is_none(),
        large: wt.total() as f64 >= required_total,
        total: wt.total(),
        required_total,
        max_ratio,
        violator: violator.map(|(c, w)| {
            format!(
                "wt{} = {w} exceeds threshold {}",
                fmt_clique(&c),
                th.hi(c.len())
            )
        }),
    }
}
