//! Bounds relating `τ*`, the integer game and the grid fractional game.

use num_bigint::BigInt;

use super::follow::{follow_f_game, StallerAim};
use super::{complete_bipartite_parameter, CheckReport, HarnessError, Witness};
use crate::fractional_game::{solve, GameSpec};
use crate::hypergraph::{transversal_number, Hypergraph};
use crate::{format_rational, tau_g, tau_star, Player, Rational};

fn int(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// All bound checks for one instance at grid resolution `grid_d`.
pub fn check_bounds(h: &Hypergraph, grid_d: u32) -> Result<Vec<CheckReport>, HarnessError> {
    let lp = tau_star(h);
    let ts = lp.value.clone();
    let two_ts = &ts * int(2);
    let e = solve(&GameSpec::new(h.clone(), Player::EdgeHitter, grid_d))?;
    let s = solve(&GameSpec::new(h.clone(), Player::Staller, grid_d))?;
    let ge = tau_g(h, Player::EdgeHitter).value;
    let gs = tau_g(h, Player::Staller).value;
    let base = Witness::default()
        .with("tau_star", format_rational(&ts))
        .with("grid", grid_d)
        .with("value_e", format_rational(&e.value))
        .with("value_s", format_rational(&s.value));
    let mut rows = Vec::new();

    rows.push(CheckReport::verdict(
        h,
        "frac-bounds-e",
        ts <= e.value && e.value < two_ts,
        base.clone().with_transcript(&e.transcript),
    ));
    rows.push(CheckReport::verdict(
        h,
        "frac-bounds-s",
        ts <= s.value && s.value < &two_ts + int(1),
        base.clone().with_transcript(&s.transcript),
    ));
    let gap = &e.value - &s.value;
    rows.push(CheckReport::verdict(h, "frac-start-gap", gap <= int(1) && -gap <= int(1), base.clone()));
    let int_w = Witness::default().with("tau_g", ge).with("tau_g_staller", gs);
    rows.push(CheckReport::verdict(h, "int-start-gap", ge.abs_diff(gs) <= 1, int_w.clone()));
    let tau = transversal_number(h);
    rows.push(CheckReport::verdict(h, "int-transversal-lower", tau <= ge, int_w.clone().with("tau", tau)));
    if !h.has_singleton_edge() && !h.is_c4() {
        let bound = 4 * (h.n() + h.m());
        rows.push(CheckReport::verdict(
            h,
            "four-elevenths",
            11 * ge <= bound,
            int_w.with("bound", format_rational(&Rational::new(BigInt::from(bound), BigInt::from(11)))),
        ));
    }
    if let Some(k) = complete_bipartite_parameter(h) {
        let lower = int(2 * k - 2);
        rows.push(CheckReport::verdict(
            h,
            "bipartite-tightness",
            e.value > lower && s.value >= &lower + int(1),
            base.clone().with("k", k),
        ));
    }

    let f = lp.certificate.values();
    for (starter, label) in [(Player::EdgeHitter, "e"), (Player::Staller, "s")] {
        let spend = follow_f_game(h, f, starter, grid_d, StallerAim::HitterSpend);
        rows.push(CheckReport::verdict(
            h,
            &format!("follow-f-spend-{label}"),
            spend.hitter <= ts,
            Witness::default()
                .with("tau_star", format_rational(&ts))
                .with("hitter", format_rational(&spend.hitter))
                .with("staller", format_rational(&spend.staller))
                .with_transcript(&spend.moves),
        ));
        let total = follow_f_game(h, f, starter, grid_d, StallerAim::Total);
        let cap = match starter {
            Player::EdgeHitter => two_ts.clone(),
            Player::Staller => &two_ts + int(1),
        };
        rows.push(CheckReport::verdict(
            h,
            &format!("follow-f-total-{label}"),
            total.total() < cap && total.hitter <= ts,
            Witness::default()
                .with("tau_star", format_rational(&ts))
                .with("hitter", format_rational(&total.hitter))
                .with("staller", format_rational(&total.staller))
                .with_transcript(&total.moves),
        ));
    }
    Ok(rows)
}
