//! The capped Edge-hitter strategy: fix an optimal fractional transversal
//! `f` and, in every move, give each vertex in index order as much weight as
//! the rules, the budget and the cap `t(v) ≤ f(v)` allow.
//!
//! Staller plays every grid move (unit submoves of `1/D` while one fits,
//! then the forced greedy remainder) and is solved exhaustively. Positions
//! carry the full cover function because the cap depends on it.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::fractional_game::Move;
use crate::fractional_game::Submove;
use crate::hypergraph::Hypergraph;
use crate::{Player, Rational};

/// What Staller maximizes against the capped strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallerAim {
    /// Edge-hitter's own total spend `W`.
    HitterSpend,
    /// The total spend of both players.
    Total,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FollowOutcome {
    /// Weight spent by Edge-hitter.
    pub hitter: Rational,
    /// Weight spent by Staller.
    pub staller: Rational,
    /// Principal line, one entry per move.
    pub moves: Vec<Move>,
}

impl FollowOutcome {
    pub fn total(&self) -> Rational {
        &self.hitter + &self.staller
    }
}

struct Follow<'a> {
    h: &'a Hypergraph,
    inc: Vec<Vec<usize>>,
    f: &'a [Rational],
    unit: Rational,
    aim: StallerAim,
    memo: HashMap<(Vec<Rational>, Player), FollowOutcome>,
}

impl Follow<'_> {
    fn loads(&self, t: &[Rational]) -> Vec<Rational> {
        let one = Rational::one();
        self.h
            .edges()
            .iter()
            .map(|e| e.iter().fold(Rational::zero(), |acc, &v| acc + &t[v]).min(one.clone()))
            .collect()
    }

    fn slack(&self, loads: &[Rational], v: usize) -> Rational {
        self.inc[v]
            .iter()
            .map(|&e| Rational::one() - &loads[e])
            .max()
            .unwrap_or_else(Rational::zero)
    }

    fn covered(&self, t: &[Rational]) -> bool {
        self.loads(t).iter().all(|x| x.is_one())
    }

    fn hitter_move(&self, t: &[Rational]) -> (Vec<Rational>, Move) {
        let mut t = t.to_vec();
        let mut r = Rational::one();
        let mut submoves = Vec::new();
        for v in 0..self.h.n() {
            let cap = &self.f[v] - &t[v];
            let w = r.clone().min(self.slack(&self.loads(&t), v)).min(cap);
            if w > Rational::zero() {
                t[v] += &w;
                r -= &w;
                submoves.push(Submove::new(v, w));
            }
        }
        debug_assert!(r.is_zero() || self.covered(&t), "capped move stopped early");
        (t, Move::new(submoves))
    }

    fn staller_moves(&self, t: &[Rational]) -> Vec<(Vec<Rational>, Move)> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![(t.to_vec(), Rational::one(), Vec::<Submove>::new())];
        while let Some((t, r, line)) = stack.pop() {
            let loads = self.loads(&t);
            if r.is_zero() || loads.iter().all(|x| x.is_one()) {
                out.push((t, Move::new(line)));
                continue;
            }
            let mut stepped = false;
            if r >= self.unit {
                for v in 0..self.h.n() {
                    if self.slack(&loads, v) >= self.unit {
                        stepped = true;
                        let mut next = t.clone();
                        next[v] += &self.unit;
                        let r_next = &r - &self.unit;
                        if seen.insert((next.clone(), r_next.clone())) {
                            let mut l = line.clone();
                            l.push(Submove::new(v, self.unit.clone()));
                            stack.push((next, r_next, l));
                        }
                    }
                }
            }
            if !stepped {
                let (t, line) = self.greedy_finish(t, r, line);
                out.push((t, Move::new(line)));
            }
        }
        out
    }

    fn greedy_finish(&self, mut t: Vec<Rational>, mut r: Rational, mut line: Vec<Submove>) -> (Vec<Rational>, Vec<Submove>) {
        for v in 0..self.h.n() {
            let w = r.clone().min(self.slack(&self.loads(&t), v));
            if w > Rational::zero() {
                t[v] += &w;
                r -= &w;
                line.push(Submove::new(v, w));
            }
        }
        (t, line)
    }

    fn score(&self, o: &FollowOutcome) -> Rational {
        match self.aim {
            StallerAim::HitterSpend => o.hitter.clone(),
            StallerAim::Total => o.total(),
        }
    }

    fn play(&mut self, t: &[Rational], mover: Player) -> FollowOutcome {
        if self.covered(t) {
            return FollowOutcome { hitter: Rational::zero(), staller: Rational::zero(), moves: Vec::new() };
        }
        let key = (t.to_vec(), mover);
        if let Some(o) = self.memo.get(&key) {
            return o.clone();
        }
        let outcome = match mover {
            Player::EdgeHitter => {
                let (next, mv) = self.hitter_move(t);
                let mut rest = self.play(&next, Player::Staller);
                rest.hitter += mv.total_weight();
                rest.moves.insert(0, mv);
                rest
            }
            Player::Staller => {
                let mut best: Option<(Rational, FollowOutcome)> = None;
                for (next, mv) in self.staller_moves(t) {
                    let mut rest = self.play(&next, Player::EdgeHitter);
                    rest.staller += mv.total_weight();
                    rest.moves.insert(0, mv);
                    let s = self.score(&rest);
                    if best.as_ref().is_none_or(|(b, _)| s > *b) {
                        best = Some((s, rest));
                    }
                }
                best.expect("an uncovered position has a Staller move").1
            }
        };
        self.memo.insert(key, outcome.clone());
        outcome
    }
}

/// Plays the capped Edge-hitter strategy for cover `f` against a Staller who
/// maximizes `aim` over all `1/D` grid moves.
pub fn follow_f_game(h: &Hypergraph, f: &[Rational], starter: Player, grid_d: u32, aim: StallerAim) -> FollowOutcome {
    assert_eq!(f.len(), h.n(), "one cap per vertex");
    assert!(grid_d >= 1, "grid must be positive");
    let mut game = Follow {
        h,
        inc: h.incidence(),
        f,
        unit: Rational::new(1.into(), grid_d.into()),
        aim,
        memo: HashMap::new(),
    };
    game.play(&vec![Rational::zero(); h.n()], starter)
}
