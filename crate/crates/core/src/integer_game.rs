//! The integer transversal game: players alternately pick a vertex lying in
//! an uncovered edge until every edge is covered. Edge-hitter minimizes the
//! number of picks, Staller maximizes it.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;
use crate::Player;

/// Bit set over edge indices.
type EdgeSet = Box<[u64]>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntGameResult {
    /// Length of the game under optimal play.
    pub value: usize,
    /// Vertices chosen under optimal play, smallest index among ties.
    pub principal_line: Vec<usize>,
}

struct IntGame {
    words: usize,
    full: EdgeSet,
    incident: Vec<EdgeSet>,
    memo: HashMap<(EdgeSet, Player), usize>,
}

impl IntGame {
    fn new(h: &Hypergraph) -> Self {
        let words = h.m().div_ceil(64);
        let mut full = vec![0u64; words].into_boxed_slice();
        for e in 0..h.m() {
            full[e / 64] |= 1 << (e % 64);
        }
        let incident = h
            .incidence()
            .into_iter()
            .map(|edges| {
                let mut set = vec![0u64; words].into_boxed_slice();
                for e in edges {
                    set[e / 64] |= 1 << (e % 64);
                }
                set
            })
            .collect();
        IntGame { words, full, incident, memo: HashMap::new() }
    }

    /// Legal iff the vertex lies in some uncovered edge.
    fn legal(&self, covered: &[u64], v: usize) -> bool {
        self.incident[v].iter().zip(covered).any(|(i, c)| i & !c != 0)
    }

    fn play(&self, covered: &[u64], v: usize) -> EdgeSet {
        covered.iter().zip(self.incident[v].iter()).map(|(c, i)| c | i).collect()
    }

    fn value(&mut self, covered: &[u64], mover: Player) -> usize {
        if covered == &self.full[..] {
            return 0;
        }
        let key = (EdgeSet::from(covered), mover);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (best, _) = self.best_move(covered, mover);
        self.memo.insert(key, best);
        best
    }

    fn best_move(&mut self, covered: &[u64], mover: Player) -> (usize, usize) {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.incident.len() {
            if !self.legal(covered, v) {
                continue;
            }
            let next = self.play(covered, v);
            let value = 1 + self.value(&next, mover.other());
            let better = match (best, mover) {
                (None, _) => true,
                (Some((b, _)), Player::EdgeHitter) => value < b,
                (Some((b, _)), Player::Staller) => value > b,
            };
            if better {
                best = Some((value, v));
            }
        }
        best.expect("an uncovered edge always has a legal vertex")
    }
}

/// `τ_g` (Edge-hitter starts) or `τ_g′` (Staller starts).
pub fn tau_g(h: &Hypergraph, starter: Player) -> IntGameResult {
    let mut game = IntGame::new(h);
    let mut covered: EdgeSet = vec![0u64; game.words].into_boxed_slice();
    let value = game.value(&covered, starter);
    let mut principal_line = Vec::with_capacity(value);
    let mut mover = starter;
    while covered != game.full {
        let (_, v) = game.best_move(&covered, mover);
        principal_line.push(v);
        covered = game.play(&covered, v);
        mover = mover.other();
    }
    IntGameResult { value, principal_line }
}
