//! Hypergraph and graph data model plus cover/load function semantics.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("edge {0} has no vertices")]
    EmptyEdge(usize),
    #[error("vertex {vertex} in edge {edge} is out of range for n = {n}")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("hypergraph has no edges")]
    NoEdges,
    #[error("edge {0} duplicates an earlier edge")]
    DuplicateEdge(usize),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value {value} at position {index} is outside [0, 1]")]
    OutOfUnitInterval { index: usize, value: String },
    #[error("graph edge {0} is a loop")]
    Loop(usize),
}

/// A finite hypergraph on vertices `0..n` with nonempty, duplicate-free edges.
///
/// Every edge is stored as a sorted vertex list. Edge order is the order of
/// first appearance in the input; duplicates are merged into the first copy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates and canonicalizes, silently merging duplicate edges.
    pub fn new(n: usize, raw_edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        Self::build(n, raw_edges, false)
    }

    /// Like [`Hypergraph::new`] but a duplicate edge is an error.
    pub fn new_strict(n: usize, raw_edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        Self::build(n, raw_edges, true)
    }

    fn build(n: usize, raw_edges: Vec<Vec<usize>>, strict: bool) -> Result<Self, HypergraphError> {
        let mut seen = HashSet::new();
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (i, mut edge) in raw_edges.into_iter().enumerate() {
            if edge.is_empty() {
                return Err(HypergraphError::EmptyEdge(i));
            }
            if let Some(&vertex) = edge.iter().find(|&&v| v >= n) {
                return Err(HypergraphError::VertexOutOfRange { edge: i, vertex, n });
            }
            edge.sort_unstable();
            edge.dedup();
            if seen.insert(edge.clone()) {
                edges.push(edge);
            } else if strict {
                return Err(HypergraphError::DuplicateEdge(i));
            }
        }
        if edges.is_empty() {
            return Err(HypergraphError::NoEdges);
        }
        Ok(Hypergraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &[usize] {
        &self.edges[index]
    }

    /// For every vertex, the indices of the edges containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                inc[v].push(e);
            }
        }
        inc
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    pub fn has_singleton_edge(&self) -> bool {
        self.edges.iter().any(|e| e.len() == 1)
    }

    /// `true` when this is the 4-cycle as a 2-uniform hypergraph on exactly four vertices.
    pub fn is_c4(&self) -> bool {
        if self.n != 4 || self.m() != 4 || !self.is_uniform(2) {
            return false;
        }
        // Four distinct pairs on four vertices, every vertex of degree 2: a 2-regular
        // simple graph on 4 vertices is necessarily the 4-cycle.
        self.incidence().iter().all(|inc| inc.len() == 2)
    }

    /// Sorted edge set, independent of edge order.
    pub fn signature(&self) -> Vec<Vec<usize>> {
        let mut sig = self.edges.clone();
        sig.sort();
        sig
    }

    /// Applies a vertex relabeling `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| perm[v]).collect())
            .collect();
        Hypergraph::new(self.n, edges).expect("relabeling preserves validity")
    }

    /// A stable textual id, e.g. `n4:0-1|1-2|2-3|0-3`.
    pub fn id(&self) -> String {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-"))
            .collect();
        format!("n{}:{}", self.n, edges.join("|"))
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for edge in &self.edges {
            write!(f, "e")?;
            for v in edge {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A simple undirected graph: no loops, no multi-edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, raw_edges: Vec<(usize, usize)>) -> Result<Self, HypergraphError> {
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for (i, (a, b)) in raw_edges.into_iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    return Err(HypergraphError::VertexOutOfRange { edge: i, vertex: v, n });
                }
            }
            if a == b {
                return Err(HypergraphError::Loop(i));
            }
            let pair = (a.min(b), a.max(b));
            if seen.insert(pair) {
                edges.push(pair);
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted open neighborhood of every vertex.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("valid cycle")
    }

    /// `K_{1,leaves}` with the center at vertex 0.
    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|l| (0, l)).collect()).expect("valid star")
    }
}

/// Per-vertex cumulative weights `t`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverFunction<T = Rational> {
    values: Vec<T>,
}

impl<T: Scalar> CoverFunction<T> {
    pub fn new(values: Vec<T>) -> Result<Self, HypergraphError> {
        check_unit_interval(&values)?;
        Ok(CoverFunction { values })
    }

    pub fn zeros(n: usize) -> Self {
        CoverFunction { values: vec![T::zero(); n] }
    }

    pub fn constant(n: usize, value: T) -> Result<Self, HypergraphError> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|t|`, the total weight.
    pub fn size(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc + v.clone())
    }

    /// Is every edge's unclamped weight sum at least one?
    pub fn is_fractional_transversal(&self, h: &Hypergraph) -> bool {
        self.values.len() == h.n()
            && h.edges().iter().all(|e| {
                let s = e.iter().fold(T::zero(), |acc, &v| acc + self.values[v].clone());
                T::one().approx_le(&s)
            })
    }
}

/// Per-edge loads `ℓ(E) = min{1, Σ_{v∈E} t(v)}`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LoadVector<T = Rational> {
    values: Vec<T>,
}

impl<T: Scalar> LoadVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self, HypergraphError> {
        check_unit_interval(&values)?;
        Ok(LoadVector { values })
    }

    pub fn zeros(m: usize) -> Self {
        LoadVector { values: vec![T::zero(); m] }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self ≤ other` pointwise.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.approx_le(b))
    }

    pub(crate) fn from_values_unchecked(values: Vec<T>) -> Self {
        LoadVector { values }
    }
}

fn check_unit_interval<T: Scalar>(values: &[T]) -> Result<(), HypergraphError> {
    for (index, v) in values.iter().enumerate() {
        if v.definitely_lt(&T::zero()) || v.definitely_gt(&T::one()) {
            return Err(HypergraphError::OutOfUnitInterval { index, value: v.to_string() });
        }
    }
    Ok(())
}

/// Load function of `t`: per edge, `min{1, Σ_{v∈E} t(v)}`.
pub fn load_of<T: Scalar>(h: &Hypergraph, t: &CoverFunction<T>) -> Result<LoadVector<T>, HypergraphError> {
    if t.len() != h.n() {
        return Err(HypergraphError::LengthMismatch { expected: h.n(), got: t.len() });
    }
    let values = h
        .edges()
        .iter()
        .map(|e| e.iter().fold(T::zero(), |acc, &v| acc + t.values[v].clone()).clamp_one())
        .collect();
    Ok(LoadVector { values })
}

/// `true` iff every load equals one.
pub fn is_fully_covered<T: Scalar>(loads: &LoadVector<T>) -> bool {
    loads.values.iter().all(|x| x.approx_eq(&T::one()))
}

/// Deletes every edge that strictly contains another edge.
///
/// This preserves `τ` and `τ*` but, in general, NOT the game values.
pub fn reduce_supersets(h: &Hypergraph) -> Hypergraph {
    let is_strict_superset = |big: &[usize], small: &[usize]| {
        big.len() > small.len() && small.iter().all(|v| big.binary_search(v).is_ok())
    };
    let kept: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .filter(|e| !h.edges().iter().any(|other| is_strict_superset(e, other)))
        .cloned()
        .collect();
    Hypergraph::new(h.n(), kept).expect("a minimal edge always survives")
}

/// Transversal number `τ` by brute force over vertex subsets in order of size.
///
/// Intended for small instances (n up to about 20).
pub fn transversal_number(h: &Hypergraph) -> usize {
    let masks: Vec<u64> = h
        .edges()
        .iter()
        .map(|e| e.iter().fold(0u64, |acc, &v| acc | (1 << v)))
        .collect();
    assert!(h.n() < 64, "transversal_number is a brute-force oracle for small n");
    let mut best = h.n();
    for subset in 0u64..(1u64 << h.n()) {
        let size = subset.count_ones() as usize;
        if size < best && masks.iter().all(|m| m & subset != 0) {
            best = size;
        }
    }
    best
}
