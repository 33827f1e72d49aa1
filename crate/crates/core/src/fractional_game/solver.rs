//! Exact grid solver for the structured game.
//!
//! Loads and budgets are kept as integer multiples of `1/D`. Values at move
//! boundaries depend only on the load vector and the mover: every move that
//! does not finish the game spends exactly one unit of weight and no vertex
//! can receive more than one unit in total, so the game always ends within
//! the `n` moves of the schedule and the move counter never influences a
//! value. Boundary values are computed from the set of move outcomes, which
//! is the closure of the start loads under single-unit submoves (every grid
//! move normalizes to one that the `n` decision rounds can realize). Inside a
//! move, slot values follow the per-slot recursion of the structured game and
//! bottom out in the boundary values.

use std::fmt;

use fnv::{FnvHashMap, FnvHashSet};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::{GameError, GameSpec, GameState, Move, Submove};
use crate::hypergraph::LoadVector;
use crate::{Player, Rational};

/// Largest supported grid resolution.
pub const MAX_GRID: u32 = 4096;

type Loads = Box<[u16]>;

/// Which moves a player may make.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MoveFamily {
    /// Any legal grid move.
    #[default]
    Any,
    /// Moves whose every submove spends the largest legal weight.
    MaxWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Decision,
    Greedy,
}

/// The submove slot at a schedule index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub index: usize,
    pub mover: Player,
    pub vertex: usize,
    pub kind: SlotKind,
    /// Position inside the move, `0..n² + n`.
    pub position: usize,
}

fn player_index(p: Player) -> usize {
    match p {
        Player::EdgeHitter => 0,
        Player::Staller => 1,
    }
}

struct Grid {
    d: u16,
    n: usize,
    inc: Vec<Vec<usize>>,
    greedy_order: Vec<usize>,
}

impl Grid {
    fn slack(&self, y: &[u16], v: usize) -> u16 {
        self.inc[v].iter().map(|&e| self.d - y[e]).max().unwrap_or(0)
    }

    fn w_max(&self, y: &[u16], r: u16, v: usize) -> u16 {
        r.min(self.slack(y, v))
    }

    fn apply(&self, y: &[u16], v: usize, w: u16) -> Loads {
        let mut out: Loads = y.into();
        for &e in &self.inc[v] {
            out[e] = (out[e] + w).min(self.d);
        }
        out
    }

    fn covered(&self, y: &[u16]) -> bool {
        y.iter().all(|&x| x == self.d)
    }

    /// Every `(loads, spent)` a single move from `x` can end in.
    fn outcomes(&self, x: &[u16], family: MoveFamily) -> Vec<(Loads, u16)> {
        let mut seen: FnvHashSet<(Loads, u16)> = FnvHashSet::default();
        let mut stack = vec![(Loads::from(x), self.d)];
        seen.insert((Loads::from(x), self.d));
        let mut out = Vec::new();
        while let Some((y, r)) = stack.pop() {
            if r == 0 || self.covered(&y) {
                out.push((y, self.d - r));
                continue;
            }
            for v in 0..self.n {
                let w = match family {
                    MoveFamily::Any => u16::from(self.slack(&y, v) > 0),
                    MoveFamily::MaxWeight => self.w_max(&y, r, v),
                };
                if w == 0 {
                    continue;
                }
                let child = (self.apply(&y, v, w), r - w);
                if !seen.contains(&child) {
                    seen.insert(child.clone());
                    stack.push(child);
                }
            }
        }
        out
    }
}

/// Memoized optimal play for one game setup.
pub struct Policy {
    spec: GameSpec,
    grid: Grid,
    families: [MoveFamily; 2],
    start: Loads,
    boundary: FnvHashMap<Loads, [u16; 2]>,
    slots: FnvHashMap<(u8, u16, u16, Loads), u16>,
}

impl fmt::Debug for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Policy")
            .field("grid_d", &self.spec.grid_d)
            .field("starter", &self.spec.starter)
            .field("families", &self.families)
            .field("boundary_states", &self.boundary.len())
            .field("slot_states", &self.slots.len())
            .finish()
    }
}

/// Exact grid value, principal transcript and the policy that produced them.
#[derive(Debug)]
pub struct SolveResult {
    pub value: Rational,
    pub transcript: Vec<Move>,
    pub policy: Policy,
}

/// Solves the structured game on the `1/D` grid.
pub fn solve(spec: &GameSpec) -> Result<SolveResult, GameError> {
    let mut policy = Policy::new(spec.clone())?;
    let value = policy.value();
    let transcript = policy.transcript();
    Ok(SolveResult { value, transcript, policy })
}

/// Optimal weight for the slot at `state.schedule_index`.
pub fn best_response(spec: &GameSpec, state: &GameState) -> Result<Submove, GameError> {
    Policy::new(spec.clone())?.best_response(state)
}

fn to_units(value: &Rational, d: u32) -> Option<u16> {
    let scaled = value * Rational::from_integer(BigInt::from(d));
    if !scaled.is_integer() {
        return None;
    }
    scaled.to_integer().to_u16()
}

impl Policy {
    pub fn new(spec: GameSpec) -> Result<Policy, GameError> {
        Self::with_families(spec, MoveFamily::Any, MoveFamily::Any)
    }

    pub fn with_families(spec: GameSpec, hitter: MoveFamily, staller: MoveFamily) -> Result<Policy, GameError> {
        let d = spec.grid_d;
        if d == 0 || d > MAX_GRID {
            return Err(GameError::InvalidGrid { got: d, max: MAX_GRID });
        }
        let h = &spec.h;
        if (h.n() as u64) * u64::from(d) > u64::from(u16::MAX) {
            return Err(GameError::InvalidGrid { got: d, max: u32::from(u16::MAX) / h.n().max(1) as u32 });
        }
        let greedy_order = match &spec.greedy_order {
            None => (0..h.n()).collect(),
            Some(order) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != (0..h.n()).collect::<Vec<_>>() {
                    return Err(GameError::InvalidOrder);
                }
                order.clone()
            }
        };
        let start: Loads = match &spec.preload {
            None => vec![0u16; h.m()].into(),
            Some(pre) => {
                if pre.len() != h.m() {
                    return Err(GameError::LengthMismatch { expected: h.m(), got: pre.len() });
                }
                pre.values()
                    .iter()
                    .enumerate()
                    .map(|(edge, x)| to_units(x, d).ok_or(GameError::PreloadOffGrid { edge, d }))
                    .collect::<Result<Vec<_>, _>>()?
                    .into()
            }
        };
        let grid = Grid { d: d as u16, n: h.n(), inc: h.incidence(), greedy_order };
        Ok(Policy {
            spec,
            grid,
            families: [hitter, staller],
            start,
            boundary: FnvHashMap::default(),
            slots: FnvHashMap::default(),
        })
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    fn units_to_rational(&self, units: u64) -> Rational {
        Rational::new(BigInt::from(units), BigInt::from(self.spec.grid_d))
    }

    fn loads_to_rational(&self, y: &[u16]) -> LoadVector {
        LoadVector::new(y.iter().map(|&x| self.units_to_rational(u64::from(x))).collect())
            .expect("grid loads lie in [0, 1]")
    }

    /// Value of the whole game from the initial state.
    pub fn value(&mut self) -> Rational {
        let start = self.start.clone();
        let units = self.boundary_values(&start)[player_index(self.spec.starter)];
        self.units_to_rational(u64::from(units))
    }

    /// Remaining value when `mover` starts a fresh move at `loads`.
    pub fn move_start_value(&mut self, mover: Player, loads: &LoadVector) -> Result<Rational, GameError> {
        let y = self.loads_to_units(loads)?;
        let units = self.boundary_values(&y)[player_index(mover)];
        Ok(self.units_to_rational(u64::from(units)))
    }

    fn loads_to_units(&self, loads: &LoadVector) -> Result<Loads, GameError> {
        if loads.len() != self.spec.h.m() {
            return Err(GameError::LengthMismatch { expected: self.spec.h.m(), got: loads.len() });
        }
        let d = self.spec.grid_d;
        loads
            .values()
            .iter()
            .enumerate()
            .map(|(e, x)| {
                to_units(x, d).ok_or_else(|| GameError::StateOffGrid { what: format!("load of edge {e}"), d })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Into::into)
    }

    fn boundary_values(&mut self, x: &[u16]) -> [u16; 2] {
        if self.grid.covered(x) {
            return [0, 0];
        }
        if let Some(v) = self.boundary.get(x) {
            return *v;
        }
        let hitter_out = self.grid.outcomes(x, self.families[0]);
        let staller_out = if self.families[1] == self.families[0] {
            None
        } else {
            Some(self.grid.outcomes(x, self.families[1]))
        };
        let mut best_hitter = u16::MAX;
        for (y, spent) in &hitter_out {
            let v = spent + self.boundary_values(y)[1];
            best_hitter = best_hitter.min(v);
        }
        let mut best_staller = 0;
        for (y, spent) in staller_out.as_ref().unwrap_or(&hitter_out) {
            let v = spent + self.boundary_values(y)[0];
            best_staller = best_staller.max(v);
        }
        let values = [best_hitter, best_staller];
        self.boundary.insert(x.into(), values);
        values
    }

    fn slots_per_move(&self) -> usize {
        self.spec.slots_per_move()
    }

    fn slot_at_position(&self, position: usize) -> (usize, SlotKind) {
        let n = self.grid.n;
        if position / n < n {
            (position % n, SlotKind::Decision)
        } else {
            (self.grid.greedy_order[position % n], SlotKind::Greedy)
        }
    }

    /// Describes slot `j` of the schedule.
    pub fn slot(&self, j: usize) -> Result<Slot, GameError> {
        let last = self.spec.schedule_len();
        if j >= last {
            return Err(GameError::ScheduleIndexOutOfRange { index: j, last });
        }
        let position = j % self.slots_per_move();
        let (vertex, kind) = self.slot_at_position(position);
        Ok(Slot { index: j, mover: self.spec.mover_at(j), vertex, kind, position })
    }

    fn choices(&self, mover: Player, kind: SlotKind, w_max: u16) -> Vec<u16> {
        match (kind, self.families[player_index(mover)]) {
            (SlotKind::Greedy, _) => vec![w_max],
            (SlotKind::Decision, MoveFamily::Any) => (0..=w_max).collect(),
            (SlotKind::Decision, MoveFamily::MaxWeight) if w_max > 0 => vec![0, w_max],
            (SlotKind::Decision, MoveFamily::MaxWeight) => vec![0],
        }
    }

    /// Remaining value from slot `position` of a move by `mover`.
    fn slot_value(&mut self, mover: Player, position: usize, y: &[u16], r: u16) -> u16 {
        if self.grid.covered(y) {
            return 0;
        }
        if position == self.slots_per_move() || r == 0 {
            return self.boundary_values(y)[player_index(mover.other())];
        }
        let key = (player_index(mover) as u8, position as u16, r, Loads::from(y));
        if let Some(&v) = self.slots.get(&key) {
            return v;
        }
        let (_, value) = self.slot_choice(mover, position, y, r);
        self.slots.insert(key, value);
        value
    }

    /// Optimal `(weight, value)` at a slot; ties go to the smallest weight.
    fn slot_choice(&mut self, mover: Player, position: usize, y: &[u16], r: u16) -> (u16, u16) {
        let (vertex, kind) = self.slot_at_position(position);
        let w_max = self.grid.w_max(y, r, vertex);
        let mut best: Option<(u16, u16)> = None;
        for w in self.choices(mover, kind, w_max) {
            let next = self.grid.apply(y, vertex, w);
            let value = w + self.slot_value(mover, position + 1, &next, r - w);
            let better = match (best, mover) {
                (None, _) => true,
                (Some((_, b)), Player::EdgeHitter) => value < b,
                (Some((_, b)), Player::Staller) => value > b,
            };
            if better {
                best = Some((w, value));
            }
        }
        best.expect("at least one choice")
    }

    fn state_to_grid(&self, state: &GameState) -> Result<(Loads, u16, usize), GameError> {
        let y = self.loads_to_units(&state.loads)?;
        let d = self.spec.grid_d;
        let r = to_units(&state.budget, d)
            .filter(|&r| u32::from(r) <= d)
            .ok_or_else(|| GameError::StateOffGrid { what: "budget".into(), d })?;
        let last = self.spec.schedule_len();
        if state.schedule_index > last {
            return Err(GameError::ScheduleIndexOutOfRange { index: state.schedule_index, last });
        }
        Ok((y, r, state.schedule_index))
    }

    /// Optimal submove for the slot at `state.schedule_index`: argmin for
    /// Edge-hitter, argmax for Staller, the forced weight at greedy slots.
    pub fn best_response(&mut self, state: &GameState) -> Result<Submove, GameError> {
        let (y, r, j) = self.state_to_grid(state)?;
        let slot = self.slot(j)?;
        let (w, _) = if self.grid.covered(&y) {
            (0, 0)
        } else {
            self.slot_choice(slot.mover, slot.position, &y, r)
        };
        Ok(Submove::new(slot.vertex, self.units_to_rational(u64::from(w))))
    }

    /// Maximum permitted weight at the slot of `state`.
    pub fn slot_w_max(&self, state: &GameState) -> Result<Rational, GameError> {
        let (y, r, j) = self.state_to_grid(state)?;
        let slot = self.slot(j)?;
        Ok(self.units_to_rational(u64::from(self.grid.w_max(&y, r, slot.vertex))))
    }

    /// Value still to be spent from `state` under optimal play.
    pub fn remaining_value(&mut self, state: &GameState) -> Result<Rational, GameError> {
        let (y, r, j) = self.state_to_grid(state)?;
        if self.grid.covered(&y) || j == self.spec.schedule_len() {
            return Ok(Rational::zero());
        }
        let slot = self.slot(j)?;
        let units = self.slot_value(slot.mover, slot.position, &y, r);
        Ok(self.units_to_rational(u64::from(units)))
    }

    /// Plays `weight` in the slot of `state` and returns the next state.
    ///
    /// The budget resets to one after the last slot of a move.
    pub fn play_slot(&self, state: &GameState, weight: &Rational) -> Result<GameState, GameError> {
        let (y, r, j) = self.state_to_grid(state)?;
        let slot = self.slot(j)?;
        let d = self.spec.grid_d;
        let w = to_units(weight, d).ok_or_else(|| GameError::StateOffGrid { what: "weight".into(), d })?;
        let w_max = self.grid.w_max(&y, r, slot.vertex);
        if w > w_max || (slot.kind == SlotKind::Greedy && w != w_max) {
            return Err(GameError::StateOffGrid {
                what: format!("weight {} not permitted at slot {j} (max {w_max}/{d})", crate::format_rational(weight)),
                d,
            });
        }
        let next = self.grid.apply(&y, slot.vertex, w);
        let mut budget = r - w;
        if slot.position + 1 == self.slots_per_move() {
            budget = self.grid.d;
        }
        Ok(GameState {
            loads: self.loads_to_rational(&next),
            budget: self.units_to_rational(u64::from(budget)),
            schedule_index: j + 1,
        })
    }

    /// Plays optimal submoves from `state` to the end of the current move.
    ///
    /// Returns the nonzero submoves and the state at the start of the next
    /// move.
    pub fn complete_move(&mut self, state: &GameState) -> Result<(Move, GameState), GameError> {
        let (mut y, mut r, mut j) = self.state_to_grid(state)?;
        let first = self.slot(j)?;
        let spm = self.slots_per_move();
        let end = (j / spm + 1) * spm;
        let mut submoves = Vec::new();
        while j < end {
            if r == 0 || self.grid.covered(&y) {
                j = end;
                break;
            }
            let position = j % spm;
            let (w, _) = self.slot_choice(first.mover, position, &y, r);
            if w > 0 {
                let (vertex, _) = self.slot_at_position(position);
                submoves.push(Submove::new(vertex, self.units_to_rational(u64::from(w))));
                y = self.grid.apply(&y, vertex, w);
                r -= w;
            }
            j += 1;
        }
        let next = GameState {
            loads: self.loads_to_rational(&y),
            budget: Rational::one(),
            schedule_index: j,
        };
        Ok((Move::new(submoves), next))
    }

    /// Principal line from the initial state, one entry per move.
    pub fn transcript(&mut self) -> Vec<Move> {
        let mut state = self.spec.initial_state();
        let mut moves = Vec::new();
        let last = self.spec.schedule_len();
        while !crate::is_fully_covered(&state.loads) && state.schedule_index < last {
            let (mv, next) = self.complete_move(&state).expect("initial state is on the grid");
            moves.push(mv);
            state = next;
        }
        moves
    }

    /// Number of memoized boundary states.
    pub fn boundary_states(&self) -> usize {
        self.boundary.len()
    }
}
