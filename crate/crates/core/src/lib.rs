//! Exact engine for the fractional transversal game on hypergraphs.
//!
//! Two players, Edge-hitter (minimizer) and Staller (maximizer), alternately
//! distribute a unit of weight per move over the vertices of a hypergraph
//! until every edge carries load one. The crate computes:
//!
//! * the fractional transversal number `τ*` with an exact simplex ([`lp`]),
//! * the integer game values `τ_g`, `τ_g′` ([`integer_game`]),
//! * exact game values of the fractional game with weights restricted to
//!   the grid `{0, 1/D, …, 1}`, with extractable optimal play
//!   ([`fractional_game`]),
//! * normalization and transposability rewriting of moves ([`moves`]),
//! * domination-game reductions ([`domination`]) and a property harness
//!   ([`harness`]).
//!
//! Code that only needs field arithmetic is generic over [`Scalar`]; the
//! aliases at the crate root pin the exact rational instantiation used by the
//! game solvers.

pub mod domination;
pub mod format;
pub mod fractional_game;
pub mod harness;
pub mod hypergraph;
pub mod integer_game;
pub mod lp;
pub mod moves;
pub mod scalar;

use serde::{Deserialize, Serialize};

pub use domination::{
    closed_neighborhood_hypergraph, domination_game_value, open_neighborhood_hypergraph,
    DominationVariant,
};
pub use fractional_game::{
    best_response, greedy_complete, is_legal_move, solve, update, w_max, GameError, GameSpec,
    GameState, Legality, Move, Policy, SolveResult, Submove, Variant,
};
pub use hypergraph::{
    is_fully_covered, load_of, reduce_supersets, transversal_number, CoverFunction, Graph,
    Hypergraph, HypergraphError, LoadVector,
};
pub use integer_game::{tau_g, IntGameResult};
pub use lp::{tau_star, tau_star_in, LpResult};
pub use scalar::{format_rational, parse_rational, Scalar};

/// Exact arbitrary-precision rational; every weight, load and game value.
pub type Rational = num_rational::BigRational;
/// Fixed-width exact rational, adequate for small instances.
pub type Rational64 = num_rational::Rational64;

pub type CoverF64 = CoverFunction<f64>;
pub type LoadsF64 = LoadVector<f64>;
pub type MoveF64 = Move<f64>;
pub type LpResultF64 = LpResult<f64>;
pub type LpResult64 = LpResult<Rational64>;

/// Shorthand for `p/q` as a [`Rational`].
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::from_ratio(numer, denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Player {
    EdgeHitter,
    Staller,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::EdgeHitter => Player::Staller,
            Player::Staller => Player::EdgeHitter,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::EdgeHitter => "edge-hitter",
            Player::Staller => "staller",
        })
    }
}
