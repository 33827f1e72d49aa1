//! Domination games as transversal games on neighborhood hypergraphs.
//!
//! A vertex set dominates a graph iff it meets every closed neighborhood
//! `N[v]`, and totally dominates it iff it meets every open neighborhood
//! `N(v)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fractional_game::{solve, GameError, GameSpec, Variant};
use crate::hypergraph::{Graph, Hypergraph, HypergraphError};
use crate::{Player, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominationVariant {
    Domination,
    TotalDomination,
}

impl DominationVariant {
    pub fn game_variant(self) -> Variant {
        match self {
            DominationVariant::Domination => Variant::Domination,
            DominationVariant::TotalDomination => Variant::TotalDomination,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominationError {
    #[error("vertex {0} is isolated, so it has an empty open neighborhood")]
    IsolatedVertex(usize),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// One edge `N[v]` per vertex, duplicates merged.
pub fn closed_neighborhood_hypergraph(g: &Graph) -> Hypergraph {
    let edges = g
        .neighbors()
        .into_iter()
        .enumerate()
        .map(|(v, mut nb)| {
            nb.push(v);
            nb
        })
        .collect();
    Hypergraph::new(g.n(), edges).expect("closed neighborhoods are nonempty")
}

/// One edge `N(v)` per vertex, duplicates merged.
pub fn open_neighborhood_hypergraph(g: &Graph) -> Result<Hypergraph, DominationError> {
    let nbs = g.neighbors();
    if let Some(v) = nbs.iter().position(Vec::is_empty) {
        return Err(DominationError::IsolatedVertex(v));
    }
    Ok(Hypergraph::new(g.n(), nbs)?)
}

pub fn neighborhood_hypergraph(g: &Graph, variant: DominationVariant) -> Result<Hypergraph, DominationError> {
    match variant {
        DominationVariant::Domination => Ok(closed_neighborhood_hypergraph(g)),
        DominationVariant::TotalDomination => open_neighborhood_hypergraph(g),
    }
}

/// Grid value of the fractional (total) domination game on `g`.
pub fn domination_game_value(
    g: &Graph,
    variant: DominationVariant,
    starter: Player,
    grid_d: u32,
) -> Result<Rational, DominationError> {
    let h = neighborhood_hypergraph(g, variant)?;
    let spec = GameSpec::new(h, starter, grid_d).with_variant(variant.game_variant());
    Ok(solve(&spec)?.value)
}
