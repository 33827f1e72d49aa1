//! The fractional transversal game.
//!
//! Rule primitives ([`w_max`], [`update`], [`is_legal_move`],
//! [`greedy_complete`]) are generic over [`Scalar`]. The solver in
//! [`solver`] evaluates the structured game exactly with every weight a
//! multiple of `1/D`: each move is `n` decision rounds over the vertices in
//! index order followed by one greedy round, and the players minimize
//! (Edge-hitter) or maximize (Staller) the total weight spent.

mod solver;

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Hypergraph, LoadVector};
use crate::scalar::Scalar;
use crate::{Player, Rational};

pub use solver::{best_response, solve, MoveFamily, Policy, Slot, SlotKind, SolveResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("grid resolution must be between 1 and {max}, got {got}")]
    InvalidGrid { got: u32, max: u32 },
    #[error("preload value on edge {edge} is not a multiple of 1/{d}")]
    PreloadOffGrid { edge: usize, d: u32 },
    #[error("state is not on the 1/{d} grid: {what}")]
    StateOffGrid { what: String, d: u32 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("greedy order is not a permutation of the vertices")]
    InvalidOrder,
    #[error("schedule index {index} is past the last submove slot ({last})")]
    ScheduleIndexOutOfRange { index: usize, last: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Submove<T = Rational> {
    pub vertex: usize,
    pub weight: T,
}

impl<T> Submove<T> {
    pub fn new(vertex: usize, weight: T) -> Self {
        Submove { vertex, weight }
    }
}

/// A finite sequence of submoves. The full-weight rule is enforced by the
/// solver, not by this type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Move<T = Rational> {
    pub submoves: Vec<Submove<T>>,
}

impl<T: Scalar> Move<T> {
    pub fn new(submoves: Vec<Submove<T>>) -> Self {
        Move { submoves }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, T)>) -> Self {
        Move { submoves: pairs.into_iter().map(|(v, w)| Submove::new(v, w)).collect() }
    }

    pub fn total_weight(&self) -> T {
        self.submoves.iter().fold(T::zero(), |acc, s| acc + s.weight.clone())
    }

    pub fn len(&self) -> usize {
        self.submoves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.submoves.is_empty()
    }

    /// Loads after playing the move (order-independent).
    pub fn apply(&self, h: &Hypergraph, loads: &LoadVector<T>) -> Result<LoadVector<T>, GameError> {
        let mut out = loads.clone();
        for s in &self.submoves {
            out = update(&out, h, s.vertex, &s.weight)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Move<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .submoves
            .iter()
            .map(|s| format!("({}, {})", s.vertex, crate::format_rational(&s.weight)))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Kind of game instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Transversal,
    Domination,
    TotalDomination,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub h: Hypergraph,
    pub starter: Player,
    pub grid_d: u32,
    pub preload: Option<LoadVector>,
    pub variant: Variant,
    /// Vertex order of the greedy round; identity when `None`.
    pub greedy_order: Option<Vec<usize>>,
}

impl GameSpec {
    pub fn new(h: Hypergraph, starter: Player, grid_d: u32) -> Self {
        GameSpec { h, starter, grid_d, preload: None, variant: Variant::Transversal, greedy_order: None }
    }

    pub fn with_preload(mut self, preload: LoadVector) -> Self {
        self.preload = Some(preload);
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_greedy_order(mut self, order: Vec<usize>) -> Self {
        self.greedy_order = Some(order);
        self
    }

    /// Number of submove slots in one move, `n² + n`.
    pub fn slots_per_move(&self) -> usize {
        self.h.n() * (self.h.n() + 1)
    }

    /// Total number of submove slots `N = n·(n² + n)`.
    pub fn schedule_len(&self) -> usize {
        self.h.n() * self.slots_per_move()
    }

    /// Mover of the move containing slot `j`.
    pub fn mover_at(&self, j: usize) -> Player {
        let k = j / self.slots_per_move().max(1);
        if k.is_multiple_of(2) {
            self.starter
        } else {
            self.starter.other()
        }
    }

    /// Start state: preload (or zero loads), full budget, slot 0.
    pub fn initial_state(&self) -> GameState {
        GameState {
            loads: self.preload.clone().unwrap_or_else(|| LoadVector::zeros(self.h.m())),
            budget: Rational::one(),
            schedule_index: 0,
        }
    }
}

/// Position in the structured game.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState<T = Rational> {
    pub loads: LoadVector<T>,
    /// Remaining budget of the current move.
    pub budget: T,
    /// Index `j` of the next submove slot, in `[0, N]`.
    pub schedule_index: usize,
}

/// Maximum permitted weight `min{r, max{1 − x_E : E ∋ v}}`; zero for a
/// vertex lying in no edge.
pub fn w_max<T: Scalar>(h: &Hypergraph, loads: &LoadVector<T>, r: &T, vertex: usize) -> Result<T, GameError> {
    if vertex >= h.n() {
        return Err(GameError::VertexOutOfRange(vertex));
    }
    check_len(loads.len(), h.m())?;
    let slack = h
        .edges()
        .iter()
        .zip(loads.values())
        .filter(|(e, _)| e.binary_search(&vertex).is_ok())
        .map(|(_, x)| T::one() - x.clone())
        .fold(T::zero(), T::max_of);
    Ok(T::max_of(T::zero(), T::min_of(r.clone(), slack)))
}

/// Raises every edge through `vertex` by `w`, clamped at one.
pub fn update<T: Scalar>(loads: &LoadVector<T>, h: &Hypergraph, vertex: usize, w: &T) -> Result<LoadVector<T>, GameError> {
    if vertex >= h.n() {
        return Err(GameError::VertexOutOfRange(vertex));
    }
    check_len(loads.len(), h.m())?;
    let values = h
        .edges()
        .iter()
        .zip(loads.values())
        .map(|(e, x)| {
            if e.binary_search(&vertex).is_ok() {
                (x.clone() + w.clone()).clamp_one()
            } else {
                x.clone()
            }
        })
        .collect();
    Ok(LoadVector::from_values_unchecked(values))
}

fn check_len(got: usize, expected: usize) -> Result<(), GameError> {
    if got != expected {
        Err(GameError::LengthMismatch { expected, got })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation<T = Rational> {
    VertexOutOfRange,
    NegativeWeight,
    /// Cumulative weight of the move exceeds one.
    BudgetExceeded,
    /// No incident edge can absorb the whole weight; `max_permitted` is the
    /// largest weight that would have been absorbed.
    NoAbsorbingEdge { max_permitted: T },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Legality<T = Rational> {
    Legal,
    Illegal { index: usize, violation: Violation<T> },
}

impl<T> Legality<T> {
    pub fn is_legal(&self) -> bool {
        matches!(self, Legality::Legal)
    }

    pub fn violating_index(&self) -> Option<usize> {
        match self {
            Legality::Legal => None,
            Legality::Illegal { index, .. } => Some(*index),
        }
    }
}

/// Checks, submove by submove, that some incident edge absorbs the whole
/// weight at the running loads, and that the move stays within its unit
/// budget. Zero-weight submoves are skips and only need an incident edge.
pub fn is_legal_move<T: Scalar>(h: &Hypergraph, prior_loads: &LoadVector<T>, m: &Move<T>) -> Legality<T> {
    if prior_loads.len() != h.m() {
        return Legality::Illegal { index: 0, violation: Violation::VertexOutOfRange };
    }
    let mut loads = prior_loads.clone();
    let mut spent = T::zero();
    for (index, s) in m.submoves.iter().enumerate() {
        if s.vertex >= h.n() {
            return Legality::Illegal { index, violation: Violation::VertexOutOfRange };
        }
        if s.weight.definitely_lt(&T::zero()) {
            return Legality::Illegal { index, violation: Violation::NegativeWeight };
        }
        spent = spent + s.weight.clone();
        if spent.definitely_gt(&T::one()) {
            return Legality::Illegal { index, violation: Violation::BudgetExceeded };
        }
        let incident = || {
            h.edges()
                .iter()
                .zip(loads.values())
                .filter(|(e, _)| e.binary_search(&s.vertex).is_ok())
        };
        let absorbed = incident().any(|(_, x)| (x.clone() + s.weight.clone()).approx_le(&T::one()));
        if !absorbed {
            let max_permitted = incident().map(|(_, x)| T::one() - x.clone()).fold(T::zero(), T::max_of);
            return Legality::Illegal { index, violation: Violation::NoAbsorbingEdge { max_permitted } };
        }
        loads = update(&loads, h, s.vertex, &s.weight).expect("vertex checked");
    }
    Legality::Legal
}

/// Plays a greedy round: at every vertex of `order`, spend `w_max`.
///
/// The budget is decremented and not reset; `schedule_index` advances by
/// `order.len()`.
pub fn greedy_complete<T: Scalar>(h: &Hypergraph, state: &GameState<T>, order: &[usize]) -> Result<GameState<T>, GameError> {
    let mut loads = state.loads.clone();
    let mut budget = state.budget.clone();
    for &v in order {
        let w = w_max(h, &loads, &budget, v)?;
        if !w.is_zero() {
            loads = update(&loads, h, v, &w)?;
            budget = budget - w;
        }
    }
    Ok(GameState { loads, budget, schedule_index: state.schedule_index + order.len() })
}
