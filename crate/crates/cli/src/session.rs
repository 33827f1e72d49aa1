//! Interactive play between a human and the engine.
//!
//! A session walks the same slot schedule as the solver. The human submits
//! `(vertex, weight)` pairs; each lands in the next slot of that vertex in
//! the current move, with the slots skipped on the way played as zero
//! (decision) or forced (greedy). The human's move ends once the budget is
//! spent, every edge is covered, or play reaches the greedy round, which is
//! then played out. The engine answers with its optimal move. Weights must
//! lie on the session grid `1/D`.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;

use fracgame::format::render_move;
use fracgame::fractional_game::{SlotKind, Violation};
use fracgame::{
    format_rational, is_fully_covered, is_legal_move, GameError, GameSpec, GameState, Legality, LoadVector, Move,
    Player, Policy, Rational, Submove,
};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("illegal submove: {}", .0.message)]
    IllegalSubmove(Box<Rejection>),
    #[error("it is not the human's turn")]
    NotHumanTurn,
    #[error("the game is over")]
    GameOver,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("cannot write replay file: {0}")]
    Replay(#[from] std::io::Error),
}

/// Why a submove was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// Short name of the violated condition.
    pub violation: &'static str,
    pub message: String,
    pub max_permitted: Option<Rational>,
    /// Nearest grid weights, for off-grid submissions.
    pub suggestions: Vec<Rational>,
}

fn illegal(violation: &'static str, message: String, max_permitted: Option<Rational>) -> SessionError {
    SessionError::IllegalSubmove(Box::new(Rejection { violation, message, max_permitted, suggestions: Vec::new() }))
}

/// A completed move and who made it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayedMove {
    pub player: Player,
    pub mv: Move,
}

/// Result of one accepted human submove.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmoveOutcome {
    /// Schedule index of the slot that took the submove.
    pub slot: usize,
    pub move_complete: bool,
    pub engine_reply: Option<Move>,
}

/// The engine's recommendation for the human.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hint {
    pub vertex: usize,
    pub weight: Rational,
    pub slot: usize,
    /// Set when the recommended submove falls in the greedy round.
    pub forced: bool,
}

pub struct Session {
    id: String,
    policy: Policy,
    human: Player,
    state: GameState,
    move_start: LoadVector,
    pending: Vec<Submove>,
    history: Vec<PlayedMove>,
    spent: Rational,
    replay: Option<PathBuf>,
}

impl Session {
    /// Starts a session: replays `opening`, then lets the engine move if it
    /// is its turn.
    pub fn new(
        id: String,
        spec: GameSpec,
        human: Player,
        opening: &[Move],
        replay: Option<PathBuf>,
    ) -> Result<Self, SessionError> {
        let policy = Policy::new(spec)?;
        let state = policy.spec().initial_state();
        let mut session = Session {
            id,
            move_start: state.loads.clone(),
            policy,
            human,
            state,
            pending: Vec::new(),
            history: Vec::new(),
            spent: Rational::zero(),
            replay,
        };
        if let Some(path) = &session.replay {
            std::fs::write(path, session.replay_header())?;
        }
        session.replay_opening(opening)?;
        session.engine_turn()?;
        Ok(session)
    }

    fn replay_header(&self) -> String {
        let spec = self.policy.spec();
        format!(
            "# session {} grid {} starter {} human {}\n",
            self.id, spec.grid_d, spec.starter, self.human
        )
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spec(&self) -> &GameSpec {
        self.policy.spec()
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn human(&self) -> Player {
        self.human
    }

    pub fn history(&self) -> &[PlayedMove] {
        &self.history
    }

    /// Nonzero submoves of the human's move in progress.
    pub fn pending(&self) -> &[Submove] {
        &self.pending
    }

    pub fn spent(&self) -> &Rational {
        &self.spent
    }

    pub fn is_over(&self) -> bool {
        is_fully_covered(&self.state.loads) || self.state.schedule_index >= self.spec().schedule_len()
    }

    pub fn mover(&self) -> Option<Player> {
        (!self.is_over()).then(|| self.spec().mover_at(self.state.schedule_index))
    }

    pub fn human_turn(&self) -> bool {
        self.mover() == Some(self.human)
    }

    /// Total spent so far plus the optimal remaining value.
    pub fn predicted_value(&mut self) -> Result<Rational, SessionError> {
        Ok(self.spent.clone() + self.policy.remaining_value(&self.state)?)
    }

    fn move_end(&self) -> usize {
        let spm = self.spec().slots_per_move();
        (self.state.schedule_index / spm + 1) * spm
    }

    fn record(&mut self, player: Player, mv: Move) -> Result<(), SessionError> {
        self.spent += mv.total_weight();
        if let Some(path) = &self.replay {
            let mut file = OpenOptions::new().append(true).open(path)?;
            write!(file, "# move {} {player}\n{}", self.history.len() + 1, render_move(&mv))?;
        }
        self.history.push(PlayedMove { player, mv });
        self.move_start = self.state.loads.clone();
        Ok(())
    }

    fn engine_move(&mut self) -> Result<Move, SessionError> {
        let (mv, next) = self.policy.complete_move(&self.state)?;
        self.state = next;
        self.record(self.human.other(), mv.clone())?;
        Ok(mv)
    }

    fn check_weight(&self, vertex: usize, weight: &Rational) -> Result<(), SessionError> {
        let n = self.spec().h.n();
        if vertex >= n {
            return Err(illegal("vertex-out-of-range", format!("vertex {vertex} is not in 0..{n}"), None));
        }
        if *weight < Rational::zero() {
            return Err(illegal("negative-weight", "weights must be nonnegative".into(), None));
        }
        let d = Rational::from_integer(self.spec().grid_d.into());
        let scaled = weight * &d;
        if !scaled.is_integer() {
            let below = scaled.floor() / &d;
            let above = scaled.ceil() / &d;
            let suggestions = [below, above].into_iter().filter(|w| *w <= Rational::one()).collect();
            return Err(SessionError::IllegalSubmove(Box::new(Rejection {
                violation: "off-grid",
                message: format!(
                    "{} is not a multiple of 1/{}",
                    format_rational(weight),
                    self.spec().grid_d
                ),
                max_permitted: None,
                suggestions,
            })));
        }
        let mut candidate = self.pending.clone();
        candidate.push(Submove::new(vertex, weight.clone()));
        let h = &self.spec().h;
        if let Legality::Illegal { violation, .. } = is_legal_move(h, &self.move_start, &Move::new(candidate)) {
            let r = &self.state.budget;
            return Err(match violation {
                Violation::BudgetExceeded => illegal(
                    "budget-exceeded",
                    format!("only {} of the move's budget is left", format_rational(r)),
                    Some(r.clone()),
                ),
                Violation::NoAbsorbingEdge { max_permitted } => {
                    let max = max_permitted.min(r.clone());
                    illegal(
                        "no-absorbing-edge",
                        format!("no edge at vertex {vertex} can absorb {}", format_rational(weight)),
                        Some(max),
                    )
                }
                Violation::VertexOutOfRange => illegal("vertex-out-of-range", "vertex out of range".into(), None),
                Violation::NegativeWeight => illegal("negative-weight", "negative weight".into(), None),
            });
        }
        Ok(())
    }

    /// Plays the remaining slots of the current move with forced weights:
    /// zero at decision slots and `w_max` in the greedy round.
    fn finish_move(&self, mut state: GameState, submoves: &mut Vec<Submove>) -> Result<GameState, SessionError> {
        let end = self.move_end();
        while state.schedule_index < end {
            if state.budget.is_zero() || is_fully_covered(&state.loads) {
                return Ok(GameState { loads: state.loads, budget: Rational::one(), schedule_index: end });
            }
            let slot = self.policy.slot(state.schedule_index)?;
            let w = match slot.kind {
                SlotKind::Decision => Rational::zero(),
                SlotKind::Greedy => self.policy.slot_w_max(&state)?,
            };
            if !w.is_zero() {
                submoves.push(Submove::new(slot.vertex, w.clone()));
            }
            state = self.policy.play_slot(&state, &w)?;
        }
        Ok(state)
    }

    /// Places a submove of the current mover; returns the slot index and
    /// whether the move is complete. On error the session is unchanged.
    fn place(&mut self, vertex: usize, weight: &Rational) -> Result<(usize, bool), SessionError> {
        self.check_weight(vertex, weight)?;
        let end = self.move_end();
        let mut state = self.state.clone();
        let mut submoves = self.pending.clone();
        let slot = loop {
            let slot = self.policy.slot(state.schedule_index)?;
            if slot.vertex == vertex {
                break slot;
            }
            let w = match slot.kind {
                SlotKind::Decision => Rational::zero(),
                SlotKind::Greedy => self.policy.slot_w_max(&state)?,
            };
            if !w.is_zero() {
                submoves.push(Submove::new(slot.vertex, w.clone()));
            }
            state = self.policy.play_slot(&state, &w)?;
            debug_assert!(state.schedule_index < end, "the greedy round visits every vertex");
        };
        let w_max = self.policy.slot_w_max(&state)?;
        if *weight > w_max {
            return Err(illegal(
                "exceeds-w-max",
                format!(
                    "{} exceeds the maximum permitted weight {} at vertex {vertex}",
                    format_rational(weight),
                    format_rational(&w_max)
                ),
                Some(w_max),
            ));
        }
        if slot.kind == SlotKind::Greedy && *weight != w_max {
            return Err(illegal(
                "forced-greedy-weight",
                format!("the greedy round forces weight {} at vertex {vertex}", format_rational(&w_max)),
                Some(w_max),
            ));
        }
        if !weight.is_zero() {
            submoves.push(Submove::new(vertex, weight.clone()));
        }
        state = self.policy.play_slot(&state, weight)?;

        let reached_greedy = state.schedule_index < end
            && self.policy.slot(state.schedule_index)?.kind == SlotKind::Greedy;
        let complete = state.schedule_index >= end
            || state.budget.is_zero()
            || is_fully_covered(&state.loads)
            || reached_greedy;
        if !complete {
            self.state = state;
            self.pending = submoves;
            return Ok((slot.index, false));
        }
        let mover = self.spec().mover_at(self.state.schedule_index);
        self.state = self.finish_move(state, &mut submoves)?;
        self.pending.clear();
        self.record(mover, Move::new(submoves))?;
        Ok((slot.index, true))
    }

    /// Replays `moves` from the current state under the session rules,
    /// alternating movers, before the engine takes over. Each move must
    /// complete: spend its whole budget or cover every edge.
    pub fn replay_opening(&mut self, moves: &[Move]) -> Result<(), SessionError> {
        if !self.history.is_empty() || !self.pending.is_empty() {
            return Err(SessionError::InvalidRequest("an opening can only be replayed at the start".into()));
        }
        for (k, mv) in moves.iter().enumerate() {
            if self.is_over() {
                return Err(SessionError::InvalidRequest(format!("opening move {} comes after the game ended", k + 1)));
            }
            let mut complete = false;
            for s in &mv.submoves {
                if complete {
                    return Err(SessionError::InvalidRequest(format!("opening move {} continues after it ended", k + 1)));
                }
                complete = self.place(s.vertex, &s.weight)?.1;
            }
            if !complete {
                return Err(SessionError::InvalidRequest(format!("opening move {} leaves budget unspent", k + 1)));
            }
        }
        Ok(())
    }

    /// Lets the engine move if it is its turn.
    pub fn engine_turn(&mut self) -> Result<Option<Move>, SessionError> {
        if self.mover() == Some(self.human.other()) {
            Ok(Some(self.engine_move()?))
        } else {
            Ok(None)
        }
    }

    /// Plays a human submove, and the engine's reply once the human's move
    /// is complete. On error the session is unchanged.
    pub fn submit(&mut self, vertex: usize, weight: &Rational) -> Result<SubmoveOutcome, SessionError> {
        if self.is_over() {
            return Err(SessionError::GameOver);
        }
        if !self.human_turn() {
            return Err(SessionError::NotHumanTurn);
        }
        let (slot, move_complete) = self.place(vertex, weight)?;
        let engine_reply = if move_complete { self.engine_turn()? } else { None };
        Ok(SubmoveOutcome { slot, move_complete, engine_reply })
    }

    /// First positive-weight submove along the optimal continuation of the
    /// human's move.
    pub fn hint(&mut self) -> Result<Hint, SessionError> {
        if self.is_over() {
            return Err(SessionError::GameOver);
        }
        if !self.human_turn() {
            return Err(SessionError::NotHumanTurn);
        }
        let end = self.move_end();
        let mut state = self.state.clone();
        while state.schedule_index < end {
            let best = self.policy.best_response(&state)?;
            let slot = self.policy.slot(state.schedule_index)?;
            if !best.weight.is_zero() {
                return Ok(Hint {
                    vertex: best.vertex,
                    weight: best.weight,
                    slot: slot.index,
                    forced: slot.kind == SlotKind::Greedy,
                });
            }
            state = self.policy.play_slot(&state, &best.weight)?;
        }
        unreachable!("an uncovered state with budget left has a positive forced weight in the greedy round")
    }
}

fn rationals(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubmoveView {
    pub vertex: usize,
    pub weight: String,
}

impl SubmoveView {
    pub fn of(s: &Submove) -> Self {
        SubmoveView { vertex: s.vertex, weight: format_rational(&s.weight) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveView {
    pub player: Option<Player>,
    pub submoves: Vec<SubmoveView>,
    pub total: String,
}

impl MoveView {
    pub fn of(player: Option<Player>, mv: &Move) -> Self {
        MoveView {
            player,
            submoves: mv.submoves.iter().map(SubmoveView::of).collect(),
            total: format_rational(&mv.total_weight()),
        }
    }
}

/// Wire form of a session; every rational is a `p/q` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
    pub grid: u32,
    pub starter: Player,
    pub human_role: Player,
    pub loads: Vec<String>,
    pub budget: String,
    pub schedule_index: usize,
    pub move_index: usize,
    pub mover: Option<Player>,
    pub human_turn: bool,
    pub spent: String,
    pub game_over: bool,
    pub predicted_value: String,
    pub current_move: Vec<SubmoveView>,
    pub history: Vec<MoveView>,
}

impl Session {
    pub fn view(&mut self) -> Result<SessionView, SessionError> {
        let predicted = self.predicted_value()?;
        let spec = self.spec();
        Ok(SessionView {
            id: self.id.clone(),
            n: spec.h.n(),
            edges: spec.h.edges().to_vec(),
            grid: spec.grid_d,
            starter: spec.starter,
            human_role: self.human,
            loads: rationals(self.state.loads.values()),
            budget: format_rational(&self.state.budget),
            schedule_index: self.state.schedule_index,
            move_index: self.state.schedule_index / spec.slots_per_move().max(1),
            mover: self.mover(),
            human_turn: self.human_turn(),
            spent: format_rational(&self.spent),
            game_over: self.is_over(),
            predicted_value: format_rational(&predicted),
            current_move: self.pending.iter().map(SubmoveView::of).collect(),
            history: self.history.iter().map(|p| MoveView::of(Some(p.player), &p.mv)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fracgame::{rat, solve, Hypergraph};

    fn c4() -> Hypergraph {
        Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap()
    }

    fn session(human: Player, starter: Player) -> Session {
        Session::new("t".into(), GameSpec::new(c4(), starter, 4), human, &[], None).unwrap()
    }

    #[test]
    fn engine_opens_when_it_starts() {
        let s = session(Player::Staller, Player::EdgeHitter);
        assert_eq!(s.history().len(), 1);
        assert!(s.human_turn());
        assert_eq!(s.spent(), &rat(1, 1));
    }

    #[test]
    fn rejected_submove_leaves_state() {
        let mut s = session(Player::EdgeHitter, Player::EdgeHitter);
        let before = s.state().clone();
        let err = s.submit(0, &rat(1, 3)).unwrap_err();
        match err {
            SessionError::IllegalSubmove(r) => {
                assert_eq!(r.violation, "off-grid");
                assert_eq!(r.suggestions, vec![rat(1, 4), rat(1, 2)]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(s.submit(9, &rat(1, 4)), Err(SessionError::IllegalSubmove(_))));
        assert_eq!(s.state(), &before);
    }

    #[test]
    fn partial_move_keeps_turn() {
        let mut s = session(Player::EdgeHitter, Player::EdgeHitter);
        let out = s.submit(0, &rat(1, 2)).unwrap();
        assert!(!out.move_complete);
        assert_eq!(s.pending().len(), 1);
        assert_eq!(s.state().budget, rat(1, 2));
        let err = s.submit(2, &rat(3, 4)).unwrap_err();
        assert!(matches!(&err, SessionError::IllegalSubmove(r) if r.violation == "budget-exceeded"), "{err:?}");
        let out = s.submit(2, &rat(1, 2)).unwrap();
        assert!(out.move_complete);
        assert!(out.engine_reply.is_some());
        assert_eq!(s.history()[0].mv, Move::from_pairs([(0, rat(1, 2)), (2, rat(1, 2))]));
    }

    #[test]
    fn following_hints_reaches_solve_value() {
        for (human, starter) in [
            (Player::Staller, Player::EdgeHitter),
            (Player::EdgeHitter, Player::EdgeHitter),
            (Player::Staller, Player::Staller),
        ] {
            let mut s = session(human, starter);
            while !s.is_over() {
                let hint = s.hint().unwrap();
                s.submit(hint.vertex, &hint.weight).unwrap();
            }
            let want = solve(&GameSpec::new(c4(), starter, 4)).unwrap().value;
            assert_eq!(s.spent(), &want);
        }
    }

    #[test]
    fn history_is_legal() {
        let mut s = session(Player::Staller, Player::EdgeHitter);
        s.submit(1, &rat(1, 2)).unwrap();
        s.submit(2, &rat(1, 2)).unwrap();
        let mut y = LoadVector::zeros(4);
        for played in s.history() {
            assert!(is_legal_move(&c4(), &y, &played.mv).is_legal());
            y = played.mv.apply(&c4(), &y).unwrap();
        }
        assert_eq!(&y, &s.state().loads);
    }
}
