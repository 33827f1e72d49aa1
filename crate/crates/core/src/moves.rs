//! Move algebra: merging repeated vertices, the transposability criterion and
//! its permutation oracle, and rewriting a move into a transposable one that
//! leaves no edge with a smaller load.

use itertools::Itertools;
use thiserror::Error;

use crate::fractional_game::{is_legal_move, update, w_max, Legality, Move, Submove, Violation};
use crate::hypergraph::{load_of, CoverFunction, Hypergraph, HypergraphError, LoadVector};
use crate::scalar::Scalar;
use crate::{is_fully_covered, Rational};

/// Brute force refuses moves longer than this.
pub const MAX_BRUTEFORCE_SUBMOVES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move is illegal at submove {index}")]
    IllegalInput { index: usize },
    #[error("move repeats a vertex or has a zero-weight submove; normalize it first")]
    NotNormalized,
    #[error("{0} submoves exceed the brute-force limit of {MAX_BRUTEFORCE_SUBMOVES}")]
    TooManySubmoves(usize),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Hypergraph plus the cumulative cover before the move.
///
/// The transposability criterion is stated relative to `prior_cover`; loads
/// that exist without a cover counterpart cannot be expressed here.
#[derive(Debug, Clone)]
pub struct MoveContext<T = Rational> {
    h: Hypergraph,
    prior_cover: CoverFunction<T>,
    prior_loads: LoadVector<T>,
}

impl<T: Scalar> MoveContext<T> {
    pub fn new(h: Hypergraph, prior_cover: CoverFunction<T>) -> Result<Self, MoveError> {
        let prior_loads = load_of(&h, &prior_cover)?;
        Ok(MoveContext { h, prior_cover, prior_loads })
    }

    pub fn fresh(h: Hypergraph) -> Self {
        let n = h.n();
        Self::new(h, CoverFunction::zeros(n)).expect("zero cover has the right length")
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    pub fn prior_cover(&self) -> &CoverFunction<T> {
        &self.prior_cover
    }

    pub fn prior_loads(&self) -> &LoadVector<T> {
        &self.prior_loads
    }

    pub fn legality(&self, m: &Move<T>) -> Legality<T> {
        is_legal_move(&self.h, &self.prior_loads, m)
    }

    /// Loads after playing `m` from the prior loads.
    pub fn loads_after(&self, m: &Move<T>) -> LoadVector<T> {
        m.apply(&self.h, &self.prior_loads).expect("vertices validated by legality")
    }

    fn require_legal(&self, m: &Move<T>) -> Result<(), MoveError> {
        match self.legality(m) {
            Legality::Legal => Ok(()),
            Legality::Illegal { index, .. } => Err(MoveError::IllegalInput { index }),
        }
    }
}

/// Merges repeated vertices: every earlier occurrence is deleted and its
/// weight added to the last occurrence. Zero-weight submoves are dropped
/// first; a zero-weight occurrence can sit behind an edge that is already
/// full and could not absorb the merged weight. Same loads, still legal.
pub fn normalize_move<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> Result<Move<T>, MoveError> {
    ctx.require_legal(m)?;
    Ok(merge_repeats(m))
}

fn merge_repeats<T: Scalar>(m: &Move<T>) -> Move<T> {
    let mut out: Vec<Submove<T>> = Vec::with_capacity(m.len());
    for s in m.submoves.iter().filter(|s| s.weight.definitely_gt(&T::zero())) {
        let carried = match out.iter().position(|o| o.vertex == s.vertex) {
            Some(i) => out.remove(i).weight,
            None => T::zero(),
        };
        out.push(Submove::new(s.vertex, carried + s.weight.clone()));
    }
    Move::new(out)
}

fn require_normalized<T: Scalar>(m: &Move<T>) -> Result<(), MoveError> {
    let distinct = m.submoves.iter().map(|s| s.vertex).all_unique();
    let positive = m.submoves.iter().all(|s| s.weight.definitely_gt(&T::zero()));
    if distinct && positive {
        Ok(())
    } else {
        Err(MoveError::NotNormalized)
    }
}

/// Per-vertex totals of prior cover plus the move (unclamped).
fn cover_after<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> Vec<T> {
    let mut t = ctx.prior_cover.values().to_vec();
    for s in &m.submoves {
        t[s.vertex] = t[s.vertex].clone() + s.weight.clone();
    }
    t
}

fn criterion_holds<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> bool {
    let t = cover_after(ctx, m);
    let edge_sums: Vec<T> = ctx
        .h
        .edges()
        .iter()
        .map(|e| e.iter().fold(T::zero(), |acc, &v| acc + t[v].clone()))
        .collect();
    m.submoves.iter().all(|s| {
        ctx.h
            .edges()
            .iter()
            .zip(&edge_sums)
            .any(|(e, sum)| e.binary_search(&s.vertex).is_ok() && sum.approx_le(&T::one()))
    })
}

/// Every played vertex has an incident edge whose total cover after the
/// whole move is at most one.
pub fn is_transposable<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> Result<bool, MoveError> {
    ctx.require_legal(m)?;
    require_normalized(m)?;
    Ok(criterion_holds(ctx, m))
}

/// Definition check: every permutation of the submoves is legal.
pub fn is_transposable_bruteforce<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> Result<bool, MoveError> {
    if m.len() > MAX_BRUTEFORCE_SUBMOVES {
        return Err(MoveError::TooManySubmoves(m.len()));
    }
    let k = m.len();
    Ok((0..k).permutations(k).all(|perm| {
        let permuted = Move::new(perm.iter().map(|&i| m.submoves[i].clone()).collect());
        ctx.legality(&permuted).is_legal()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteStatus {
    /// The output is transposable.
    Complete,
    /// The iteration cap was hit before the move became transposable.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite<T = Rational> {
    pub mv: Move<T>,
    pub status: RewriteStatus,
    /// Number of sweep-and-redistribute rounds performed.
    pub iterations: usize,
}

/// Largest weight `s` would be legal with as the final submove of `m`.
fn weight_as_last<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>, index: usize) -> T {
    let s = &m.submoves[index];
    let mut loads = ctx.prior_loads.clone();
    for (i, other) in m.submoves.iter().enumerate() {
        if i != index {
            loads = update(&loads, &ctx.h, other.vertex, &other.weight).expect("validated vertex");
        }
    }
    T::min_of(s.weight.clone(), w_max(&ctx.h, &loads, &s.weight, s.vertex).expect("validated vertex"))
}

/// One sweep: rotate each submove to the end in turn and cut it to the
/// largest weight that is legal there.
fn sweep<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> Move<T> {
    let mut current = m.clone();
    for i in 0..current.len() {
        let w = weight_as_last(ctx, &current, i);
        current.submoves[i].weight = w;
    }
    current
        .submoves
        .retain(|s| s.weight.definitely_gt(&T::zero()));
    current
}

/// Spends up to `budget` on top of `m`, each vertex in index order taking
/// its maximum permitted weight.
fn redistribute<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>, budget: T) -> Move<T> {
    let mut loads = ctx.loads_after(m);
    let mut left = budget;
    let mut out = m.clone();
    for v in 0..ctx.h.n() {
        if left.approx_zero() {
            break;
        }
        let w = w_max(&ctx.h, &loads, &left, v).expect("vertex in range");
        if w.definitely_gt(&T::zero()) {
            loads = update(&loads, &ctx.h, v, &w).expect("vertex in range");
            left = left - w.clone();
            out.submoves.push(Submove::new(v, w));
        }
    }
    merge_repeats(&out)
}

/// Replaces a legal move by a legal transposable move after which no edge
/// has a smaller load. Freed weight goes to non-full edges by vertex order.
///
/// On grid inputs every non-final round raises the total load by at least
/// one grid step, so the cap of (denominator · m + 1) rounds derived from the
/// input is never hit; other inputs may end `Incomplete`.
pub fn make_transposable<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> Result<Rewrite<T>, MoveError> {
    ctx.require_legal(m)?;
    let total = m.total_weight();
    let mut current = merge_repeats(m);
    let cap = iteration_cap::<T>(ctx, m);
    let mut iterations = 0;
    while !criterion_holds(ctx, &current) {
        if iterations == cap {
            return Ok(Rewrite { mv: current, status: RewriteStatus::Incomplete, iterations });
        }
        iterations += 1;
        current = sweep(ctx, &current);
        let freed = total.clone() - current.total_weight();
        if freed.definitely_gt(&T::zero()) && !is_fully_covered(&ctx.loads_after(&current)) {
            current = redistribute(ctx, &current, freed);
        }
    }
    debug_assert!(ctx.legality(&current).is_legal());
    Ok(Rewrite { mv: current, status: RewriteStatus::Complete, iterations })
}

/// Bound on sweep rounds. Exact rationals get `q·m + 1` where `q` is a
/// common denominator of the inputs; floats get a fixed cap.
fn iteration_cap<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> usize {
    const FLOAT_CAP: usize = 1000;
    if !T::is_exact() {
        return FLOAT_CAP;
    }
    let values = ctx
        .prior_cover
        .values()
        .iter()
        .chain(ctx.prior_loads.values())
        .chain(m.submoves.iter().map(|s| &s.weight));
    let mut q: u128 = 1;
    for v in values {
        let d = denominator_of(v).unwrap_or(FLOAT_CAP as u128);
        q = num_integer::lcm(q, d).min(1 << 40);
    }
    (q as usize).saturating_mul(ctx.h.m()).saturating_add(1)
}

fn denominator_of<T: Scalar>(v: &T) -> Option<u128> {
    // Exact scalars render as `p` or `p/q`.
    let text = v.to_string();
    match text.split_once('/') {
        Some((_, q)) => q.trim().parse().ok(),
        None => Some(1),
    }
}

/// The first violated condition of an illegal move, for diagnostics.
pub fn explain_violation<T: Scalar>(ctx: &MoveContext<T>, m: &Move<T>) -> Option<(usize, Violation<T>)> {
    match ctx.legality(m) {
        Legality::Legal => None,
        Legality::Illegal { index, violation } => Some((index, violation)),
    }
}
