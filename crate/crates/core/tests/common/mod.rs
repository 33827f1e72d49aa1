//! Fixtures and independent oracles shared by the integration tests. Nothing
//! here calls into the solver, simplex or move code of the library; the
//! oracles only borrow the plain data types.

#![allow(dead_code)]

use std::collections::HashMap;

use fracgame::{Graph, Hypergraph, Player};
use num_rational::Rational64;

pub type Q = Rational64;

pub fn q(p: i64, d: i64) -> Q {
    Q::new(p, d)
}

pub fn c4() -> Hypergraph {
    Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap()
}

/// C4 on 0..4 plus pendant vertices 4..8 completing each cycle edge to a
/// three-vertex edge.
pub fn modified_c4() -> Hypergraph {
    let mut edges = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
    edges.extend([vec![0, 1, 4], vec![1, 2, 5], vec![2, 3, 6], vec![3, 0, 7]]);
    Hypergraph::new(8, edges).unwrap()
}

pub fn k24() -> Hypergraph {
    let edges = (0..2).flat_map(|a| (2..6).map(move |b| vec![a, b])).collect();
    Hypergraph::new(6, edges).unwrap()
}

pub fn incidence(h: &Hypergraph) -> Vec<Vec<usize>> {
    (0..h.n())
        .map(|v| (0..h.m()).filter(|&e| h.edge(e).contains(&v)).collect())
        .collect()
}

/// Literal structured-game recursion: slots `j = 0..N`, `N = n(n² + n)`,
/// every state keyed by `(j, loads, r)` in grid units, anchor value zero at
/// `j = N`, budget back to one after the last slot of each move.
pub struct ScheduleOracle {
    n: usize,
    d: u32,
    starter: Player,
    inc: Vec<Vec<usize>>,
    memo: HashMap<(usize, Vec<u32>, u32), u32>,
}

impl ScheduleOracle {
    pub fn new(h: &Hypergraph, starter: Player, d: u32) -> Self {
        ScheduleOracle { n: h.n(), d, starter, inc: incidence(h), memo: HashMap::new() }
    }

    fn per_move(&self) -> usize {
        self.n * self.n + self.n
    }

    fn mover(&self, j: usize) -> Player {
        if (j / self.per_move()) % 2 == 0 {
            self.starter
        } else {
            match self.starter {
                Player::EdgeHitter => Player::Staller,
                Player::Staller => Player::EdgeHitter,
            }
        }
    }

    fn w_max(&self, x: &[u32], r: u32, v: usize) -> u32 {
        let slack = self.inc[v].iter().map(|&e| self.d - x[e]).max().unwrap_or(0);
        r.min(slack)
    }

    fn t(&mut self, j: usize, x: Vec<u32>, r: u32) -> u32 {
        if j == self.n * self.per_move() {
            return 0;
        }
        let key = (j, x.clone(), r);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let pos = j % self.per_move();
        let round = pos / self.n;
        let v = pos % self.n;
        let wm = self.w_max(&x, r, v);
        let last = pos + 1 == self.per_move();
        let eval = |w: u32, this: &mut Self| {
            let mut y = x.clone();
            for &e in &this.inc[v] {
                y[e] = (y[e] + w).min(this.d);
            }
            let r_next = if last { this.d } else { r - w };
            w + this.t(j + 1, y, r_next)
        };
        let value = if round == self.n {
            eval(wm, self)
        } else {
            let values: Vec<u32> = (0..=wm).map(|w| eval(w, self)).collect();
            match self.mover(j) {
                Player::EdgeHitter => *values.iter().min().unwrap(),
                Player::Staller => *values.iter().max().unwrap(),
            }
        };
        self.memo.insert(key, value);
        value
    }

    /// Game value from `loads` (grid units) as a fraction.
    pub fn value_from(&mut self, loads: Vec<u32>) -> Q {
        let d = self.d;
        q(i64::from(self.t(0, loads, d)), i64::from(d))
    }

    pub fn value(&mut self, m: usize) -> Q {
        self.value_from(vec![0; m])
    }
}

/// Unstructured grid minimax: a move is any sequence of legal submoves with
/// weights in `{1/D, …}` spending exactly one unit of weight, or less only
/// when it covers everything.
pub struct GridMinimax {
    d: u32,
    inc: Vec<Vec<usize>>,
    memo: HashMap<(Vec<u32>, u32, Player), u32>,
}

impl GridMinimax {
    pub fn new(h: &Hypergraph, d: u32) -> Self {
        GridMinimax { d, inc: incidence(h), memo: HashMap::new() }
    }

    /// Remaining value with `mover` holding budget `r` at loads `x`.
    fn value_at(&mut self, x: &[u32], r: u32, mover: Player) -> u32 {
        if x.iter().all(|&u| u == self.d) {
            return 0;
        }
        if r == 0 {
            let next = match mover {
                Player::EdgeHitter => Player::Staller,
                Player::Staller => Player::EdgeHitter,
            };
            return self.value_at(x, self.d, next);
        }
        let key = (x.to_vec(), r, mover);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best: Option<u32> = None;
        for v in 0..self.inc.len() {
            let slack = self.inc[v].iter().map(|&e| self.d - x[e]).max().unwrap_or(0);
            for w in 1..=slack.min(r) {
                let mut y = x.to_vec();
                for &e in &self.inc[v] {
                    y[e] = (y[e] + w).min(self.d);
                }
                let val = w + self.value_at(&y, r - w, mover);
                best = Some(match (best, mover) {
                    (None, _) => val,
                    (Some(b), Player::EdgeHitter) => b.min(val),
                    (Some(b), Player::Staller) => b.max(val),
                });
            }
        }
        let value = best.expect("an uncovered edge has a vertex with slack");
        self.memo.insert(key, value);
        value
    }

    pub fn value(&mut self, m: usize, starter: Player) -> Q {
        let d = self.d;
        q(i64::from(self.value_at(&vec![0; m], d, starter)), i64::from(d))
    }

    pub fn value_from(&mut self, loads: &[u32], starter: Player) -> Q {
        let d = self.d;
        q(i64::from(self.value_at(loads, d, starter)), i64::from(d))
    }
}

/// Integer game by plain game-tree search without memoization.
pub fn integer_game_tree(h: &Hypergraph, covered: &mut Vec<bool>, mover: Player) -> usize {
    if covered.iter().all(|&c| c) {
        return 0;
    }
    let mut best: Option<usize> = None;
    for v in 0..h.n() {
        let newly: Vec<usize> = (0..h.m()).filter(|&e| !covered[e] && h.edge(e).contains(&v)).collect();
        if newly.is_empty() {
            continue;
        }
        for &e in &newly {
            covered[e] = true;
        }
        let next = match mover {
            Player::EdgeHitter => Player::Staller,
            Player::Staller => Player::EdgeHitter,
        };
        let val = 1 + integer_game_tree(h, covered, next);
        for &e in &newly {
            covered[e] = false;
        }
        best = Some(match (best, mover) {
            (None, _) => val,
            (Some(b), Player::EdgeHitter) => b.min(val),
            (Some(b), Player::Staller) => b.max(val),
        });
    }
    best.expect("uncovered edge has a vertex")
}

/// `τ*` by enumerating every basic solution of
/// `{f : Σ_{v∈E} f(v) ≥ 1, 0 ≤ f ≤ 1}`: choose `n` constraints to hold with
/// equality, solve by Gaussian elimination, keep feasible points.
pub fn lp_by_vertices(h: &Hypergraph) -> Q {
    let n = h.n();
    let mut rows: Vec<(Vec<Q>, Q, bool)> = Vec::new(); // (a, b, is_ge): a·f ≥ b or a·f ≤ b
    for e in h.edges() {
        let mut a = vec![q(0, 1); n];
        for &v in e {
            a[v] = q(1, 1);
        }
        rows.push((a, q(1, 1), true));
    }
    for v in 0..n {
        let mut a = vec![q(0, 1); n];
        a[v] = q(1, 1);
        rows.push((a.clone(), q(0, 1), true));
        rows.push((a, q(1, 1), false));
    }
    let mut best: Option<Q> = None;
    for pick in subsets(rows.len(), n) {
        let a: Vec<Vec<Q>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Q> = pick.iter().map(|&i| rows[i].1).collect();
        let Some(f) = solve_square(a, b) else { continue };
        let feasible = rows.iter().all(|(a, b, ge)| {
            let s: Q = a.iter().zip(&f).map(|(x, y)| x * y).sum();
            if *ge {
                s >= *b
            } else {
                s <= *b
            }
        });
        if feasible {
            let size: Q = f.iter().sum();
            if best.is_none_or(|b| size < b) {
                best = Some(size);
            }
        }
    }
    best.expect("f = 1 is a basic feasible solution")
}

fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            go(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    go(0, len, k, &mut cur, &mut out);
    out
}

fn solve_square(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != q(0, 1))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r][col] != q(0, 1) {
                let factor = a[r][col] / a[col][col];
                for c in 0..n {
                    let delta = factor * a[col][c];
                    a[r][c] -= delta;
                }
                let delta = factor * b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Vertex sets of `g` (as bit masks) meeting every closed (or open)
/// neighborhood, straight from the adjacency lists.
pub fn dominating_masks(g: &Graph, total: bool) -> Vec<u32> {
    let n = g.n();
    let adjacent = |a: usize, b: usize| g.edges().iter().any(|&(x, y)| (x, y) == (a.min(b), a.max(b)));
    (0u32..(1 << n))
        .filter(|&s| {
            (0..n).all(|v| {
                let self_hit = !total && s & (1 << v) != 0;
                self_hit || (0..n).any(|u| u != v && s & (1 << u) != 0 && adjacent(u, v))
            })
        })
        .collect()
}

/// All simple graphs on `n` labeled vertices.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..(1 << pairs.len())).map(move |mask| {
        let edges = pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
        Graph::new(n, edges).unwrap()
    })
}

/// Legality of a move under the absorbing-edge rule, checked from scratch.
pub fn legal_from_scratch(h: &Hypergraph, prior: &[Q], moves: &[(usize, Q)]) -> bool {
    let mut sums: Vec<Q> = h.edges().iter().map(|e| e.iter().map(|&v| prior[v]).sum()).collect();
    let mut spent = q(0, 1);
    for &(v, w) in moves {
        spent += w;
        if spent > q(1, 1) {
            return false;
        }
        let ok = (0..h.m()).any(|e| h.edge(e).contains(&v) && sums[e].min(q(1, 1)) + w <= q(1, 1));
        if !ok {
            return false;
        }
        for e in 0..h.m() {
            if h.edge(e).contains(&v) {
                sums[e] += w;
            }
        }
    }
    true
}

/// Does every ordering of `moves` stay legal?
pub fn all_orders_legal(h: &Hypergraph, prior: &[Q], moves: &[(usize, Q)]) -> bool {
    fn permute(items: &mut Vec<(usize, Q)>, k: usize, check: &mut dyn FnMut(&[(usize, Q)]) -> bool) -> bool {
        if k == items.len() {
            return check(items);
        }
        for i in k..items.len() {
            items.swap(k, i);
            let ok = permute(items, k + 1, check);
            items.swap(k, i);
            if !ok {
                return false;
            }
        }
        true
    }
    let mut items = moves.to_vec();
    permute(&mut items, 0, &mut |order| legal_from_scratch(h, prior, order))
}

/// Converts between the library's big rationals and the oracles' fixed-width
/// ones.
pub fn to_q(r: &fracgame::Rational) -> Q {
    use num_traits::ToPrimitive;
    q(r.numer().to_i64().unwrap(), r.denom().to_i64().unwrap())
}

pub fn from_q(r: Q) -> fracgame::Rational {
    fracgame::rat(*r.numer(), *r.denom())
}

/// A random hypergraph, a prior cover on the `1/d` grid and a legal move.
#[derive(Debug, Clone)]
pub struct MoveCase {
    pub h: Hypergraph,
    pub d: u32,
    pub prior: Vec<Q>,
    pub moves: Vec<(usize, Q)>,
}

/// Builds a legal move submove by submove, each weight drawn from the grid
/// values the absorbing-edge rule allows. With `distinct`, vertices do not
/// repeat and weights are positive.
pub fn random_case(rng: &mut impl rand::Rng, max_k: usize, distinct: bool) -> MoveCase {
    loop {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=5);
        let edges: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let size = rng.gen_range(1..=n.min(3));
                rand::seq::index::sample(rng, n, size).into_vec()
            })
            .collect();
        let h = Hypergraph::new(n, edges).unwrap();
        let d = [2u32, 3, 4, 6][rng.gen_range(0..4)];
        let di = i64::from(d);
        let prior: Vec<Q> = (0..n).map(|_| q(rng.gen_range(0..=di / 2), di)).collect();
        let k = rng.gen_range(1..=max_k);
        let mut moves = Vec::new();
        let mut sums: Vec<Q> = h.edges().iter().map(|e| e.iter().map(|&v| prior[v]).sum()).collect();
        let mut budget = q(1, 1);
        for _ in 0..4 * k {
            if moves.len() == k {
                break;
            }
            let v = rng.gen_range(0..n);
            if distinct && moves.iter().any(|&(u, _)| u == v) {
                continue;
            }
            let slack = (0..h.m())
                .filter(|&e| h.edge(e).contains(&v))
                .map(|e| q(1, 1) - sums[e].min(q(1, 1)))
                .max();
            let Some(slack) = slack else { continue };
            let cap = (slack.min(budget) * q(di, 1)).floor().to_integer();
            let low = if distinct { 1 } else { 0 };
            if cap < low {
                continue;
            }
            let w = q(rng.gen_range(low..=cap), di);
            for e in 0..h.m() {
                if h.edge(e).contains(&v) {
                    sums[e] += w;
                }
            }
            budget -= w;
            moves.push((v, w));
        }
        if !moves.is_empty() {
            return MoveCase { h, d, prior, moves };
        }
    }
}

/// Loads after `moves`, computed directly.
pub fn loads_after(h: &Hypergraph, prior: &[Q], moves: &[(usize, Q)]) -> Vec<Q> {
    h.edges()
        .iter()
        .map(|e| {
            let base: Q = e.iter().map(|&v| prior[v]).sum();
            let added: Q = moves.iter().filter(|(v, _)| e.contains(v)).map(|&(_, w)| w).sum();
            (base + added).min(q(1, 1))
        })
        .collect()
}

/// Library move and context for a case.
pub fn library_case(case: &MoveCase) -> (fracgame::moves::MoveContext, fracgame::Move) {
    let prior = fracgame::CoverFunction::new(case.prior.iter().map(|&x| from_q(x)).collect()).unwrap();
    let ctx = fracgame::moves::MoveContext::new(case.h.clone(), prior).unwrap();
    let m = fracgame::Move::from_pairs(case.moves.iter().map(|&(v, w)| (v, from_q(w))));
    (ctx, m)
}

pub fn oracle_pairs(m: &fracgame::Move) -> Vec<(usize, Q)> {
    m.submoves.iter().map(|s| (s.vertex, to_q(&s.weight))).collect()
}
