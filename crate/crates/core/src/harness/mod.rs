//! Corpus enumeration and property checks.
//!
//! Every check returns [`CheckReport`] rows. A row is reproducible from its
//! instance id, property id and, for sampled checks, the seed.

mod bounds;
mod conjectures;
mod follow;

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fractional_game::GameError;
use crate::hypergraph::Hypergraph;

pub use bounds::check_bounds;
pub use conjectures::{check_conjectures, check_conjectures_on, check_continuation};
pub use follow::{follow_f_game, FollowOutcome, StallerAim};

pub const MAX_ENUM_N: usize = 6;
pub const MAX_ENUM_M: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("enumeration limits n <= {max_n}, m <= {max_m} exceed {MAX_ENUM_N} and {MAX_ENUM_M}")]
    LimitsTooLarge { max_n: usize, max_m: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Violation,
    /// A conjecture failed at grid resolution; rerun at a finer grid before
    /// reading anything into it.
    ApproximateViolation,
}

/// Values behind a verdict, plus a principal line when one exists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub transcript: Vec<String>,
}

impl Witness {
    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_transcript(mut self, moves: impl IntoIterator<Item = impl fmt::Display>) -> Self {
        self.transcript = moves.into_iter().map(|m| m.to_string()).collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub instance: String,
    pub property: String,
    pub status: Status,
    pub witness: Witness,
}

impl CheckReport {
    pub fn new(h: &Hypergraph, property: &str, status: Status, witness: Witness) -> Self {
        CheckReport { instance: h.id(), property: property.to_string(), status, witness }
    }

    /// Pass or violation according to `holds`.
    pub fn verdict(h: &Hypergraph, property: &str, holds: bool, witness: Witness) -> Self {
        let status = if holds { Status::Pass } else { Status::Violation };
        Self::new(h, property, status, witness)
    }

    /// Pass or approximate violation according to `holds`.
    pub fn conjecture(h: &Hypergraph, property: &str, holds: bool, witness: Witness) -> Self {
        let status = if holds { Status::Pass } else { Status::ApproximateViolation };
        Self::new(h, property, status, witness)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Sorts rows by instance then property, the stable report order.
pub fn sort_reports(rows: &mut [CheckReport]) {
    rows.sort_by(|a, b| (&a.instance, &a.property).cmp(&(&b.instance, &b.property)));
}

/// Per-property counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: BTreeMap<String, [usize; 3]>,
}

impl Summary {
    pub fn of(reports: &[CheckReport]) -> Self {
        let mut rows: BTreeMap<String, [usize; 3]> = BTreeMap::new();
        for r in reports {
            let counts = rows.entry(r.property.clone()).or_default();
            counts[r.status as usize] += 1;
        }
        Summary { rows }
    }

    pub fn violations(&self) -> usize {
        self.rows.values().map(|c| c[1]).sum()
    }

    pub fn approximate_violations(&self) -> usize {
        self.rows.values().map(|c| c[2]).sum()
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.keys().map(String::len).max().unwrap_or(8).max(8);
        writeln!(f, "{:<width$}  {:>8}  {:>9}  {:>11}", "property", "pass", "violation", "approx-viol")?;
        for (property, c) in &self.rows {
            writeln!(f, "{property:<width$}  {:>8}  {:>9}  {:>11}", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

/// All hypergraphs whose edges are distinct nonempty subsets of
/// `{0, …, max_n − 1}`, with between one and `max_m` edges.
///
/// The vertex count of each instance is one more than its largest vertex
/// index, so every `n ≤ max_n` appears. Edge sets are canonical (sorted
/// edges), so no two items share a signature; isomorphic copies are kept.
pub fn enumerate_hypergraphs(max_n: usize, max_m: usize) -> Result<impl Iterator<Item = Hypergraph>, HarnessError> {
    if max_n > MAX_ENUM_N || max_m > MAX_ENUM_M {
        return Err(HarnessError::LimitsTooLarge { max_n, max_m });
    }
    let masks: Vec<u32> = (1..(1u32 << max_n)).collect();
    Ok((1..=max_m.min(masks.len())).flat_map(move |k| {
        masks.clone().into_iter().combinations(k).map(|chosen| {
            let edges: Vec<Vec<usize>> = chosen
                .iter()
                .map(|&mask| (0..32).filter(|b| mask & (1 << b) != 0).collect())
                .collect();
            let n = chosen.iter().map(|&mask| 32 - mask.leading_zeros() as usize).max().unwrap_or(0);
            Hypergraph::new(n, edges).expect("masks are nonempty and in range")
        })
    }))
}

/// Like [`enumerate_hypergraphs`] but keeps only the first member of each
/// relabeling class.
pub fn enumerate_up_to_relabeling(
    max_n: usize,
    max_m: usize,
) -> Result<impl Iterator<Item = Hypergraph>, HarnessError> {
    let mut seen = std::collections::HashSet::new();
    Ok(enumerate_hypergraphs(max_n, max_m)?.filter(move |h| {
        let key = (0..h.n())
            .permutations(h.n())
            .map(|p| (h.n(), h.relabel(&p).signature()))
            .min()
            .expect("at least one permutation");
        seen.insert(key)
    }))
}

/// `K_{k,k²}` as a 2-uniform hypergraph: part `0..k` and part `k..k+k²`.
pub fn generate_complete_bipartite(k: usize) -> Hypergraph {
    assert!(k >= 1, "k must be positive");
    let big = k * k;
    let edges = (0..k).flat_map(|a| (k..k + big).map(move |b| vec![a, b])).collect();
    Hypergraph::new(k + big, edges).expect("valid bipartite graph")
}

/// `Some(k)` if `h` is `K_{k,k²}` up to relabeling.
pub(crate) fn complete_bipartite_parameter(h: &Hypergraph) -> Option<usize> {
    if !h.is_uniform(2) {
        return None;
    }
    let degree: Vec<usize> = h.incidence().iter().map(Vec::len).collect();
    let k = (1..=h.n()).find(|k| k + k * k == h.n())?;
    if h.m() != k * k * k {
        return None;
    }
    let small: Vec<usize> = (0..h.n()).filter(|&v| degree[v] == k * k).collect();
    if k == 1 {
        return Some(1);
    }
    if small.len() != k {
        return None;
    }
    let crosses = h
        .edges()
        .iter()
        .all(|e| small.contains(&e[0]) != small.contains(&e[1]));
    crosses.then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_hypergraphs(2, 3).unwrap().count(), 7);
        let ones: Vec<_> = enumerate_hypergraphs(1, 8).unwrap().collect();
        assert_eq!(ones, vec![Hypergraph::new(1, vec![vec![0]]).unwrap()]);
        // C(15,1) + C(15,2) + C(15,3) + C(15,4)
        assert_eq!(enumerate_hypergraphs(4, 4).unwrap().count(), 1940);
        assert!(matches!(enumerate_hypergraphs(7, 2), Err(HarnessError::LimitsTooLarge { .. })));
        assert!(matches!(enumerate_hypergraphs(3, 9), Err(HarnessError::LimitsTooLarge { .. })));
    }

    #[test]
    fn enumeration_contains_c4_and_distinct_signatures() {
        let all: Vec<_> = enumerate_hypergraphs(4, 4).unwrap().collect();
        assert!(all.iter().any(Hypergraph::is_c4));
        let sigs: std::collections::HashSet<_> = all.iter().map(|h| (h.n(), h.signature())).collect();
        assert_eq!(sigs.len(), all.len());
        assert!(all.iter().all(|h| h.n() <= 4 && h.m() <= 4));
    }

    #[test]
    fn relabeling_classes() {
        // Only {0},{0,1} and {1},{0,1} are relabelings of each other.
        let classes: Vec<_> = enumerate_up_to_relabeling(2, 3).unwrap().collect();
        assert_eq!(classes.len(), 6);
    }

    #[test]
    fn complete_bipartite() {
        let k1 = generate_complete_bipartite(1);
        assert_eq!(k1.edges(), &[vec![0, 1]]);
        let k2 = generate_complete_bipartite(2);
        assert_eq!((k2.n(), k2.m()), (6, 8));
        assert_eq!(complete_bipartite_parameter(&k2), Some(2));
        assert_eq!(complete_bipartite_parameter(&k2.relabel(&[5, 0, 1, 2, 3, 4])), Some(2));
        let c4 = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap();
        assert_eq!(complete_bipartite_parameter(&c4), None);
    }

    #[test]
    fn summary_counts() {
        let h = generate_complete_bipartite(1);
        let rows = vec![
            CheckReport::verdict(&h, "a", true, Witness::default()),
            CheckReport::verdict(&h, "a", false, Witness::default().with("x", 1)),
            CheckReport::conjecture(&h, "b", false, Witness::default()),
        ];
        let s = Summary::of(&rows);
        assert_eq!(s.rows["a"], [1, 1, 0]);
        assert_eq!((s.violations(), s.approximate_violations()), (1, 1));
        assert!(s.to_string().contains("approx-viol"));
    }
}
