//! Monotonicity in the preload and the integer-move conjectures, all at grid
//! resolution.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckReport, HarnessError, Witness};
use crate::format::render_values;
use crate::fractional_game::{GameSpec, MoveFamily, Policy};
use crate::hypergraph::{load_of, CoverFunction, Hypergraph, LoadVector};
use crate::{tau_g, Player, Rational};

/// Preload pairs sampled per instance when no count is given.
pub const DEFAULT_PRELOAD_SAMPLES: usize = 8;

fn units(u: u32, d: u32) -> Rational {
    Rational::new(BigInt::from(u), BigInt::from(d))
}

fn loads_from_units(y: &[u32], d: u32) -> LoadVector {
    LoadVector::new(y.iter().map(|&u| units(u, d)).collect()).expect("grid units lie in [0, D]")
}

fn rng_for(h: &Hypergraph, seed: u64) -> ChaCha8Rng {
    // Mix the instance id into the seed so rows do not depend on corpus order.
    let mix = h.id().bytes().fold(0xcbf2_9ce4_8422_2325u64, |acc, b| (acc ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ mix)
}

/// Samples `trials` preload pairs `ℓ ≤ ℓ′` on the `1/D` grid and checks
/// that the value never increases from `ℓ` to `ℓ′`, for both starters.
pub fn check_continuation(h: &Hypergraph, grid_d: u32, trials: usize, seed: u64) -> Result<Vec<CheckReport>, HarnessError> {
    let mut rng = rng_for(h, seed);
    let mut policy = Policy::new(GameSpec::new(h.clone(), Player::EdgeHitter, grid_d))?;
    let mut rows = Vec::with_capacity(2 * trials);
    for trial in 0..trials {
        let low: Vec<u32> = (0..h.m()).map(|_| rng.gen_range(0..=grid_d)).collect();
        let high: Vec<u32> = low.iter().map(|&u| rng.gen_range(u..=grid_d)).collect();
        let (l, l2) = (loads_from_units(&low, grid_d), loads_from_units(&high, grid_d));
        for starter in [Player::EdgeHitter, Player::Staller] {
            let a = policy.move_start_value(starter, &l)?;
            let b = policy.move_start_value(starter, &l2)?;
            rows.push(CheckReport::verdict(
                h,
                &format!("continuation-{}", if starter == Player::EdgeHitter { "e" } else { "s" }),
                a >= b,
                Witness::default()
                    .with("seed", seed)
                    .with("trial", trial)
                    .with("low", render_values(l.values()))
                    .with("high", render_values(l2.values()))
                    .with("value_low", crate::format_rational(&a))
                    .with("value_high", crate::format_rational(&b)),
            ));
        }
    }
    Ok(rows)
}

/// Conjecture checks over a corpus with the default sample count and seed 0.
pub fn check_conjectures(
    corpus: impl IntoIterator<Item = Hypergraph>,
    grid_d: u32,
) -> Result<Vec<CheckReport>, HarnessError> {
    let mut rows = Vec::new();
    for h in corpus {
        rows.extend(check_conjectures_on(&h, grid_d, DEFAULT_PRELOAD_SAMPLES, 0)?);
    }
    super::sort_reports(&mut rows);
    Ok(rows)
}

/// The three conjecture checks on one instance.
///
/// * `conj-grid-below-integer`: the grid value with Edge-hitter starting is
///   at most `τ_g`.
/// * `conj-integer-reply`: after every sequence of `2k − 1` weight-one
///   single-vertex moves, some weight-one move attains Staller's value.
/// * `conj-max-weight-staller`: restricting Staller to maximal-weight
///   submoves keeps both game values, from zero loads and from `samples`
///   loads induced by random grid cover functions.
pub fn check_conjectures_on(
    h: &Hypergraph,
    grid_d: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<CheckReport>, HarnessError> {
    let mut policy = Policy::new(GameSpec::new(h.clone(), Player::EdgeHitter, grid_d))?;
    let value = policy.value();
    let tg = tau_g(h, Player::EdgeHitter).value;
    let tg_r = Rational::from_integer(BigInt::from(tg));
    let mut rows = vec![CheckReport::conjecture(
        h,
        "conj-grid-below-integer",
        value <= tg_r,
        Witness::default()
            .with("grid", grid_d)
            .with("value_e", crate::format_rational(&value))
            .with("tau_g", tg),
    )];
    rows.push(integer_reply(h, grid_d, &mut policy)?);
    rows.push(max_weight_staller(h, grid_d, &mut policy, samples, seed)?);
    Ok(rows)
}

fn integer_reply(h: &Hypergraph, grid_d: u32, policy: &mut Policy) -> Result<CheckReport, HarnessError> {
    let inc = h.incidence();
    let mut frontier: BTreeSet<Vec<u32>> = BTreeSet::from([vec![0; h.m()]]);
    let play = |y: &[u32], v: usize| -> Option<Vec<u32>> {
        if !inc[v].iter().any(|&e| y[e] == 0) {
            return None;
        }
        let mut next = y.to_vec();
        for &e in &inc[v] {
            next[e] = grid_d;
        }
        Some(next)
    };
    let mut depth = 0;
    let mut checked = 0usize;
    while !frontier.is_empty() {
        // Edge-hitter's move followed by Staller's, so depth counts 2k − 1 moves.
        let after_hitter: BTreeSet<Vec<u32>> = frontier
            .iter()
            .flat_map(|y| (0..h.n()).filter_map(|v| play(y, v)).collect::<Vec<_>>())
            .filter(|y| y.iter().any(|&u| u < grid_d))
            .collect();
        depth += 1;
        for y in &after_hitter {
            let loads = loads_from_units(y, grid_d);
            let best = policy.move_start_value(Player::Staller, &loads)?;
            let mut integer_best: Option<Rational> = None;
            for v in 0..h.n() {
                if let Some(next) = play(y, v) {
                    let rest = policy.move_start_value(Player::EdgeHitter, &loads_from_units(&next, grid_d))?;
                    let candidate = Rational::one() + rest;
                    if integer_best.as_ref().is_none_or(|b| candidate > *b) {
                        integer_best = Some(candidate);
                    }
                }
            }
            checked += 1;
            let integer_best = integer_best.unwrap_or_else(Rational::zero);
            if integer_best != best {
                return Ok(CheckReport::conjecture(
                    h,
                    "conj-integer-reply",
                    false,
                    Witness::default()
                        .with("grid", grid_d)
                        .with("moves_before", depth)
                        .with("loads", render_values(loads.values()))
                        .with("staller_value", crate::format_rational(&best))
                        .with("best_integer_reply", crate::format_rational(&integer_best)),
                ));
            }
        }
        frontier = after_hitter
            .iter()
            .flat_map(|y| (0..h.n()).filter_map(|v| play(y, v)).collect::<Vec<_>>())
            .filter(|y| y.iter().any(|&u| u < grid_d))
            .collect();
        depth += 1;
    }
    Ok(CheckReport::conjecture(
        h,
        "conj-integer-reply",
        true,
        Witness::default().with("grid", grid_d).with("states", checked),
    ))
}

fn max_weight_staller(
    h: &Hypergraph,
    grid_d: u32,
    policy: &mut Policy,
    samples: usize,
    seed: u64,
) -> Result<CheckReport, HarnessError> {
    let mut restricted =
        Policy::with_families(GameSpec::new(h.clone(), Player::EdgeHitter, grid_d), MoveFamily::Any, MoveFamily::MaxWeight)?;
    let mut rng = rng_for(h, seed);
    let mut starts = vec![LoadVector::zeros(h.m())];
    for _ in 0..samples {
        let t: Vec<Rational> = (0..h.n()).map(|_| units(rng.gen_range(0..=grid_d), grid_d)).collect();
        let cover = CoverFunction::new(t).expect("grid values lie in [0, 1]");
        starts.push(load_of(h, &cover).expect("one value per vertex"));
    }
    for loads in &starts {
        for mover in [Player::EdgeHitter, Player::Staller] {
            let full = policy.move_start_value(mover, loads)?;
            let limited = restricted.move_start_value(mover, loads)?;
            if full != limited {
                return Ok(CheckReport::conjecture(
                    h,
                    "conj-max-weight-staller",
                    false,
                    Witness::default()
                        .with("grid", grid_d)
                        .with("seed", seed)
                        .with("mover", mover)
                        .with("loads", render_values(loads.values()))
                        .with("value", crate::format_rational(&full))
                        .with("max_weight_value", crate::format_rational(&limited)),
                ));
            }
        }
    }
    Ok(CheckReport::conjecture(
        h,
        "conj-max-weight-staller",
        true,
        Witness::default().with("grid", grid_d).with("seed", seed).with("starts", starts.len()),
    ))
}
