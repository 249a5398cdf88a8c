//! Winning moves.
//!
//! Games with a closed form get a constructive move, checked against the
//! predicate before it is returned. If construction fails the engine
//! searches moves against the predicate, and as a last resort asks the
//! oracle. Games without a closed form go straight to the oracle.

mod algorithms;
mod path;
mod trace;

use serde::Serialize;

use crate::characterizations::{anchor_heights, closed_form, necklace_coverage, Coverage};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::position::{Move, Outcome, Position};
use crate::spec::{Family, GameSpec};

pub use algorithms::{
    case1_target, delta_alg, even_target, small_delta, two_delta, unit_adjust, SmallDeltaResult,
    TwoDeltaResult,
};
pub use path::path_target;
pub use trace::{AlgorithmTrace, TraceRow};

/// Candidate budget for the predicate search.
pub const SEARCH_CAP: u64 = 1_000_000;

/// How a move was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Constructive,
    PredicateSearch,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyMove {
    pub removals: Vec<u64>,
    #[serde(rename = "move")]
    pub mv: Move,
    pub target: Position,
    pub route: Route,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<AlgorithmTrace>,
}

/// `(n, k)` when the spec has the move sets of NN(n,k).
fn necklace_params(spec: &GameSpec) -> Option<(usize, usize)> {
    match spec.family() {
        Family::Necklace { n, k } | Family::Clasp { n, k, c: 2 } => Some((n, k)),
        Family::Circular { n: n @ (3 | 4), k: 2 } => Some((n, 2)),
        _ => None,
    }
}

type Target = (Vec<u64>, Vec<AlgorithmTrace>);

/// Target heights for NN(2l+1,l+1), or `None` for P-positions.
pub fn odd_target(heights: &[u64]) -> Result<Option<Target>> {
    let n = heights.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::Domain(format!("odd target needs odd n >= 3, got {n}")));
    }
    let ell = n / 2;
    // z = {a_1, c, b_l} preserves membership, so strip it first.
    let c = heights[0].min(heights[ell]).min(heights[n - 1]);
    let mut reduced = heights.to_vec();
    for v in [0, ell, n - 1] {
        reduced[v] -= c;
    }
    let (target, traces) = if reduced[0] == 0 {
        match path_target(&reduced[1..], ell + 1) {
            None => return Ok(None),
            Some(t) => (std::iter::once(0).chain(t).collect(), Vec::new()),
        }
    } else if reduced[n - 1] == 0 {
        match path_target(&reduced[..n - 1], ell + 1) {
            None => return Ok(None),
            Some(mut t) => {
                t.push(0);
                (t, Vec::new())
            }
        }
    } else if ell == 1 {
        (vec![0; 3], Vec::new())
    } else {
        let mut without: Vec<u64> = reduced.clone();
        without.remove(ell);
        match even_target(&without)? {
            None => return Ok(None),
            Some((mut t, traces)) => {
                t.insert(ell, 0);
                (t, traces)
            }
        }
    };
    let lifted = heights
        .iter()
        .zip(reduced.iter().zip(&target))
        .map(|(h, (r, t))| h - (r - t))
        .collect();
    Ok(Some((lifted, traces)))
}

/// Target heights for NN(n,k) with `ceil(n/2) < k < n` through the anchor game.
pub fn anchor_target(heights: &[u64], k: usize) -> Result<Option<Target>> {
    let n = heights.len();
    let ell = n - k;
    let anchored = anchor_heights(heights, ell)?;
    let Some((anchor_t, traces)) = odd_target(&anchored)? else {
        return Ok(None);
    };
    let mut target = heights.to_vec();
    target[..ell].copy_from_slice(&anchor_t[..ell]);
    target[n - ell..].copy_from_slice(&anchor_t[ell + 1..]);
    let mut center = anchored[ell] - anchor_t[ell];
    for h in &mut target[ell..n - ell] {
        let d = center.min(*h);
        *h -= d;
        center -= d;
    }
    Ok(Some((target, traces)))
}

/// Constructive target for a game with a closed form.
///
/// `Ok(None)` means the position is P. Errors mean the construction does
/// not apply; callers fall back to a search.
pub fn constructive_target(spec: &GameSpec, pos: &Position) -> Result<Option<Target>> {
    spec.check_position(pos)?;
    let h = pos.heights();
    if let Family::Path { n, k } = spec.family() {
        if k >= n.div_ceil(2) {
            return Ok(path_target(h, k).map(|t| (t, Vec::new())));
        }
    }
    let (n, k) = necklace_params(spec)
        .ok_or_else(|| Error::Domain(format!("no construction for {}", spec.family())))?;
    match necklace_coverage(n, k) {
        Coverage::SingleSet => Ok((!pos.is_terminal()).then(|| (vec![0; n], Vec::new()))),
        Coverage::SEll if n % 2 == 0 => even_target(h),
        Coverage::SEll => odd_target(h),
        Coverage::Anchor => anchor_target(h, k),
        Coverage::Open | Coverage::Excluded => {
            Err(Error::Domain(format!("no construction for {}", spec.family())))
        }
    }
}

fn is_p(spec: &GameSpec, pos: &Position) -> Result<bool> {
    match closed_form(spec, pos)? {
        Some(r) => Ok(r.holds),
        None => Err(Error::Domain("no closed form".into())),
    }
}

/// Checks a target: reachable by one legal move and P under the closed form.
fn finish(
    spec: &GameSpec,
    pos: &Position,
    target: Vec<u64>,
    route: Route,
    traces: Vec<AlgorithmTrace>,
) -> Result<Option<StrategyMove>> {
    let target = Position::new(target);
    let Some(removals) = pos.removal_to(&target) else {
        return Ok(None);
    };
    let Ok(mv) = spec.move_for_removals(removals.clone()) else {
        return Ok(None);
    };
    if !is_p(spec, &target)? {
        return Ok(None);
    }
    Ok(Some(StrategyMove {
        removals,
        mv,
        target,
        route,
        traces,
    }))
}

/// Searches every move set for a removal landing in the closed form's P set.
///
/// In the S_l games one stack of the move set is solved from A = B instead of
/// enumerated. Each move set gets at most [`SEARCH_CAP`] candidates.
pub fn predicate_search(spec: &GameSpec, pos: &Position) -> Result<Option<StrategyMove>> {
    let h = pos.heights();
    let n = h.len();
    let s_ell = necklace_params(spec)
        .map(|(n, k)| necklace_coverage(n, k) == Coverage::SEll)
        .unwrap_or(false);
    let ell = n / 2;
    let side = |v: usize| -> i64 {
        if v < ell {
            1
        } else if v >= n - ell {
            -1
        } else {
            0
        }
    };
    let balance: i64 = h.iter().enumerate().map(|(v, &x)| side(v) * x as i64).sum();
    for set in spec.move_sets() {
        let mut budget = SEARCH_CAP;
        let verts = set.vertices();
        let solved = if s_ell {
            verts.iter().position(|&v| side(v) != 0)
        } else {
            None
        };
        let free: Vec<usize> = verts
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != solved)
            .map(|(_, &v)| v)
            .collect();
        let mut removals = vec![0u64; n];
        loop {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let mut ok = true;
            if let Some(i) = solved {
                let v = verts[i];
                // new balance = balance - sum(side * removal) must be 0
                let rest: i64 = free.iter().map(|&u| side(u) * removals[u] as i64).sum();
                let need = (balance - rest) * side(v);
                if need < 0 || need as u64 > h[v] {
                    ok = false;
                } else {
                    removals[v] = need as u64;
                }
            }
            if ok && removals.iter().any(|&r| r > 0) {
                let target: Vec<u64> = h.iter().zip(&removals).map(|(a, r)| a - r).collect();
                if is_p(spec, &Position::new(target.clone()))? {
                    let found = finish(spec, pos, target, Route::PredicateSearch, Vec::new())?;
                    if found.is_some() {
                        return Ok(found);
                    }
                }
            }
            if let Some(i) = solved {
                removals[verts[i]] = 0;
            }
            // odometer over the free vertices
            let mut carried = true;
            for &u in &free {
                if removals[u] < h[u] {
                    removals[u] += 1;
                    carried = false;
                    break;
                }
                removals[u] = 0;
            }
            if carried {
                break;
            }
        }
    }
    Ok(None)
}

fn oracle_move(oracle: &Oracle, pos: &Position) -> Result<Option<StrategyMove>> {
    let Some(mv) = oracle.first_winning_move(pos)? else {
        return Ok(None);
    };
    let target = oracle.spec().apply_move(pos, &mv)?;
    Ok(Some(StrategyMove {
        removals: mv.removals.clone(),
        mv,
        target,
        route: Route::Oracle,
        traces: Vec::new(),
    }))
}

/// A winning move from `pos`, or `None` if `pos` is a P-position.
///
/// Without a closed form the oracle decides; a temporary one is built when
/// `oracle` is `None`. On reversal-symmetric games the move is computed on
/// the smaller of `pos` and its mirror, so mirrored positions get mirrored
/// moves.
pub fn winning_move(
    spec: &GameSpec,
    pos: &Position,
    oracle: Option<&Oracle>,
) -> Result<Option<StrategyMove>> {
    spec.check_position(pos)?;
    let mirrored = pos.mirror();
    if !spec.is_reversal_symmetric() || mirrored > *pos {
        return solve(spec, pos, oracle);
    }
    if mirrored == *pos {
        let found = solve(spec, pos, oracle)?;
        return match found {
            Some(m) if m.target.mirror() != m.target => {
                Ok(Some(symmetric_move(spec, pos, oracle, m.route)?.unwrap_or(m)))
            }
            other => Ok(other),
        };
    }
    let Some(found) = solve(spec, &mirrored, oracle)? else {
        return Ok(None);
    };
    let target = found.target.mirror();
    let removals = Position::new(found.removals).mirror().into_heights();
    let mv = spec.move_for_removals(removals.clone())?;
    Ok(Some(StrategyMove {
        removals,
        mv,
        target,
        route: found.route,
        traces: found.traces,
    }))
}

/// A move from a palindrome to a palindromic P-position, if there is one.
fn symmetric_move(
    spec: &GameSpec,
    pos: &Position,
    oracle: Option<&Oracle>,
    route: Route,
) -> Result<Option<StrategyMove>> {
    let n = pos.len();
    let h = pos.heights();
    let owned;
    let oracle = match oracle {
        Some(o) => o,
        None => {
            owned = Oracle::new(spec.clone());
            &owned
        }
    };
    for set in spec.move_sets() {
        let verts = set.vertices();
        // left halves of the mirrored pairs inside the set
        let free: Vec<usize> = verts
            .iter()
            .copied()
            .filter(|&v| v <= n - 1 - v && verts.contains(&(n - 1 - v)))
            .collect();
        if free.is_empty() {
            continue;
        }
        let mut removals = vec![0u64; n];
        let mut budget = SEARCH_CAP;
        loop {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let mut carried = true;
            for &u in &free {
                if removals[u] < h[u] {
                    removals[u] += 1;
                    removals[n - 1 - u] = removals[u];
                    carried = false;
                    break;
                }
                removals[u] = 0;
                removals[n - 1 - u] = 0;
            }
            if carried {
                break;
            }
            let target = Position::new(h.iter().zip(&removals).map(|(a, r)| a - r).collect());
            let p = match closed_form(spec, &target)? {
                Some(r) => r.holds,
                None => oracle.classify(&target)? == Outcome::P,
            };
            if p {
                let mv = spec.move_for_removals(removals.clone())?;
                return Ok(Some(StrategyMove {
                    removals,
                    mv,
                    target,
                    route,
                    traces: Vec::new(),
                }));
            }
        }
    }
    Ok(None)
}

fn solve(spec: &GameSpec, pos: &Position, oracle: Option<&Oracle>) -> Result<Option<StrategyMove>> {
    let with_oracle = |pos: &Position| match oracle {
        Some(o) => oracle_move(o, pos),
        None => oracle_move(&Oracle::new(spec.clone()), pos),
    };
    let Some(report) = closed_form(spec, pos)? else {
        return with_oracle(pos);
    };
    if report.holds {
        return Ok(None);
    }
    if let Ok(Some((target, traces))) = constructive_target(spec, pos) {
        if let Some(found) = finish(spec, pos, target, Route::Constructive, traces)? {
            return Ok(Some(found));
        }
    }
    if let Some(found) = predicate_search(spec, pos)? {
        return Ok(Some(found));
    }
    match with_oracle(pos)? {
        Some(found) => Ok(Some(found)),
        None => Err(Error::Inconsistent(format!(
            "closed form says N but the oracle finds no winning move from {pos}"
        ))),
    }
}

/// Outcome from the closed form when there is one, else from the oracle.
pub fn outcome(spec: &GameSpec, pos: &Position, oracle: &Oracle) -> Result<Outcome> {
    match closed_form(spec, pos)? {
        Some(r) if r.holds => Ok(Outcome::P),
        Some(_) => Ok(Outcome::N),
        None => oracle.classify(pos),
    }
}
