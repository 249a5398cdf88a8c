//! Constructive moves for NN(2l,l): the TwoDelta, Δ and δ algorithms, the
//! unit adjustment and the Case-1 endpoint table.
//!
//! Everything here works on raw heights of an even-length position with
//! `a_j = r[j-1]` and `b_j = r[l+j-1]`. `m` vectors are stored from `m_2`.

use crate::characterizations::DerivedQuantities;
use crate::error::{Error, Result};
use crate::position::Position;

use super::path::path_target;
use super::trace::{AlgorithmTrace, TraceRow};

fn even_heights(pos: &Position) -> Result<(Vec<u64>, usize)> {
    let n = pos.len();
    if n < 4 || n % 2 != 0 {
        return Err(Error::Domain(format!(
            "algorithm needs NN(2l,l) with l >= 2, got {n} stacks"
        )));
    }
    Ok((pos.heights().to_vec(), n / 2))
}

/// `m_j = min_{2<=i<=j} (s_i - goal)` for `j = 2..=last`.
fn prefix_mins(dq: &DerivedQuantities, goal: u64, last: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(last.saturating_sub(1));
    let mut acc = i64::MAX;
    for i in 2..=last {
        acc = acc.min(dq.s_at(i) as i64 - goal as i64);
        out.push(acc);
    }
    out
}

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(what()))
    }
}

#[derive(Debug, Clone)]
pub struct TwoDeltaResult {
    pub r: Position,
    pub delta_sum: i64,
    pub delta_me: i64,
    pub trace: AlgorithmTrace,
}

/// TwoDelta: plays on `a_l, a_{l-1}, ...` until Δ = 0 or δ = 0.
///
/// Requires A > B, s* > m and m > 0.
pub fn two_delta(pos: &Position) -> Result<TwoDeltaResult> {
    let (mut r, ell) = even_heights(pos)?;
    let dq = DerivedQuantities::of(&r)?;
    require(dq.delta_sum > 0, || {
        format!("two-delta needs A > B, got A={} B={}", dq.a_sum, dq.b_sum)
    })?;
    require(dq.delta_me > 0, || {
        format!("two-delta needs s* > m, got s*={} m={}", dq.s_star, dq.m)
    })?;
    require(dq.m > 0, || "two-delta needs m > 0".into())?;

    let mut big = dq.delta_sum;
    let mut mv = prefix_mins(&dq, dq.m, ell + 1);
    let mut small = mv[ell - 1];
    let mut trace = AlgorithmTrace::new("two-delta", ell);
    let mut row = TraceRow::new("");
    row.m = mv.clone();
    row.delta_sum = Some(big);
    row.delta_me = Some(small);
    row.r = Some(r.clone());
    trace.push(row);

    for j in (2..=ell).rev() {
        let d = (r[j - 1] as i64).min(big).min(mv[j - 2]);
        if d > 0 {
            r[j - 1] -= d as u64;
            big -= d;
            for m in &mut mv[..j - 1] {
                *m -= d;
            }
            small = small.min(mv[j - 2]);
            let mut row = TraceRow::new(j.to_string());
            row.d = Some(d as u64);
            row.m = mv[..j - 1].to_vec();
            row.delta_sum = Some(big);
            row.delta_me = Some(small);
            row.r = Some(r.clone());
            trace.push(row);
        }
        if big == 0 || small == 0 {
            return Ok(TwoDeltaResult {
                r: Position::new(r),
                delta_sum: big,
                delta_me: small,
                trace,
            });
        }
    }
    Err(Error::Inconsistent(format!(
        "two-delta ended with Δ={big} and δ={small} on {pos}"
    )))
}

/// Δ-Algorithm: A-side play left of the minimum window, then `a_1 <- s_{l+1}`.
///
/// Requires A > B and m = s*.
pub fn delta_alg(pos: &Position) -> Result<(Position, AlgorithmTrace)> {
    let (mut r, ell) = even_heights(pos)?;
    let dq = DerivedQuantities::of(&r)?;
    require(dq.delta_sum > 0, || {
        format!("delta algorithm needs A > B, got A={} B={}", dq.a_sum, dq.b_sum)
    })?;
    require(dq.delta_me == 0, || {
        format!("delta algorithm needs m = s*, got m={} s*={}", dq.m, dq.s_star)
    })?;

    let t = dq.t;
    let mut big = dq.delta_sum;
    let mut mv = prefix_mins(&dq, dq.s_star, t - 1);
    let mut trace = AlgorithmTrace::new("delta", ell);
    let mut row = TraceRow::new("");
    row.m = mv.clone();
    row.delta_sum = Some(big);
    row.r = Some(r.clone());
    trace.push(row);

    let mut j = t - 1;
    while big > 0 && j >= 2 {
        let d = (r[j - 1] as i64).min(big).min(mv[j - 2]);
        if d > 0 {
            r[j - 1] -= d as u64;
            big -= d;
            for m in &mut mv[..j - 1] {
                *m -= d;
            }
            let mut row = TraceRow::new(j.to_string());
            row.d = Some(d as u64);
            row.m = mv[..j - 1].to_vec();
            row.delta_sum = Some(big);
            row.r = Some(r.clone());
            trace.push(row);
        }
        j -= 1;
    }
    if big > 0 {
        let target = DerivedQuantities::of(&r)?.s_at(ell + 1);
        if target > r[0] {
            return Err(Error::Inconsistent(format!(
                "delta algorithm would raise a_1 from {} to {target}",
                r[0]
            )));
        }
        let mut row = TraceRow::new("a_1");
        row.d = Some(r[0] - target);
        r[0] = target;
        row.delta_sum = Some(0);
        row.r = Some(r.clone());
        trace.push(row);
    }
    Ok((Position::new(r), trace))
}

#[derive(Debug, Clone)]
pub struct SmallDeltaResult {
    pub r: Position,
    pub delta_me: i64,
    /// Flanks of the played block: `a_x` and `b_y`.
    pub x: usize,
    pub y: usize,
    pub trace: AlgorithmTrace,
}

/// δ-Algorithm: paired play on `a_x` and `b_y` until δ <= 1.
///
/// Requires A = B, s* > m and m > 0.
pub fn small_delta(pos: &Position) -> Result<SmallDeltaResult> {
    let (mut r, ell) = even_heights(pos)?;
    let dq = DerivedQuantities::of(&r)?;
    require(dq.se(), || {
        format!("delta algorithm needs A = B, got A={} B={}", dq.a_sum, dq.b_sum)
    })?;
    require(dq.delta_me > 0, || {
        format!("delta algorithm needs s* > m, got s*={} m={}", dq.s_star, dq.m)
    })?;
    require(dq.m > 0, || "delta algorithm needs m > 0".into())?;

    let mut mv = prefix_mins(&dq, dq.m, ell + 1);
    let mut small = mv[ell - 1];
    let mut trace = AlgorithmTrace::new("small-delta", ell);
    let mut row = TraceRow::new("");
    row.m = mv.clone();
    row.delta_me = Some(small);
    row.r = Some(r.clone());
    trace.push(row);

    let (mut x, mut y) = (ell, 1);
    let bi = |y: usize| ell + y - 1;
    while small > 1 && x >= 2 && y < ell {
        let d = r[x - 1].min(r[bi(y)]).min((small / 2) as u64);
        if d > 0 {
            r[x - 1] -= d;
            r[bi(y)] -= d;
            let d = d as i64;
            for m in &mut mv[..x - 1] {
                *m -= d;
            }
            let mut xrow = TraceRow::new(format!("x={x}"));
            xrow.d = Some(d as u64);
            xrow.m = mv[..x - 1].to_vec();
            trace.push(xrow);
            // windows holding both a_x and b_y lost 2d, so the running
            // minima are recomputed rather than patched
            mv = prefix_mins(&DerivedQuantities::of(&r)?, dq.m, ell + 1);
            small = mv[ell - 1];
            let mut yrow = TraceRow::new(format!("y={y}"));
            yrow.m_first = y + 2;
            yrow.m = mv[y..].to_vec();
            yrow.delta_me = Some(small);
            yrow.r = Some(r.clone());
            trace.push(yrow);
        }
        if r[x - 1] == 0 {
            x -= 1;
        }
        if r[bi(y)] == 0 {
            y += 1;
        }
    }
    Ok(SmallDeltaResult {
        r: Position::new(r),
        delta_me: small,
        x,
        y,
        trace,
    })
}

/// Final step when the δ-Algorithm stops at δ = 1.
///
/// With `t` the minimum window: if exactly one of `a_x`, `b_y` lies in it,
/// both drop by one; if both do, `a_{t-1}` and `b_y` drop by one.
pub fn unit_adjust(r: &Position, x: usize, y: usize) -> Result<Position> {
    let (mut h, ell) = even_heights(r)?;
    let dq = DerivedQuantities::of(&h)?;
    require(dq.delta_me == 1, || {
        format!("unit adjustment needs δ = 1, got {}", dq.delta_me)
    })?;
    require((1..=ell).contains(&x) && (1..=ell).contains(&y), || {
        format!("flanks x={x}, y={y} out of range")
    })?;
    let t = dq.t;
    // s_t covers stacks t..t+l-2
    let window = t..=t + ell - 2;
    let a_in = window.contains(&x);
    let b_in = window.contains(&(ell + y));
    let a_idx = match (a_in, b_in) {
        (true, false) | (false, true) => x - 1,
        (true, true) => t - 2,
        (false, false) => {
            return Err(Error::Domain(format!(
                "neither a_{x} nor b_{y} lies in the minimum window s_{t}"
            )))
        }
    };
    let b_idx = ell + y - 1;
    if h[a_idx] == 0 || h[b_idx] == 0 {
        return Err(Error::Domain(format!(
            "unit adjustment would empty a stack below zero at {} or {}",
            a_idx + 1,
            b_idx + 1
        )));
    }
    h[a_idx] -= 1;
    h[b_idx] -= 1;
    Ok(Position::new(h))
}

/// Case 1 (m >= s*): endpoint move, or `a_1 <- s*` followed by the Δ-Algorithm.
///
/// Requires A >= B and m >= s*, not both equalities.
pub fn case1_target(pos: &Position) -> Result<(Position, Vec<AlgorithmTrace>)> {
    let (mut r, ell) = even_heights(pos)?;
    let n = r.len();
    let dq = DerivedQuantities::of(&r)?;
    require(dq.delta_sum >= 0, || {
        format!("case 1 needs A >= B, got A={} B={}", dq.a_sum, dq.b_sum)
    })?;
    require(dq.delta_me <= 0, || {
        format!("case 1 needs m >= s*, got m={} s*={}", dq.m, dq.s_star)
    })?;
    require(!dq.in_s_ell(), || "case 1 needs a position outside S_ell".into())?;

    let mut big = dq.delta_sum as u64;
    let small = (-dq.delta_me) as u64;
    let m = dq.m;
    let s_star = dq.s_star;
    let mut trace = AlgorithmTrace::new("case-1", ell);
    let mut note = |label: &str, r: &[u64]| {
        let mut row = TraceRow::new(label);
        row.r = Some(r.to_vec());
        trace.push(row);
    };

    if r[0] > m && r[0] < m + big {
        // 1.3
        if small >= big {
            let big_prime = big + m - r[0];
            r[0] = s_star;
            r[n - 1] -= small - big_prime;
            note("1.3", &r);
            return Ok((Position::new(r), vec![trace]));
        }
        big -= r[0] - m;
        r[0] = m;
        note("1.3", &r);
    }
    if r[0] == m {
        // 1.1
        if small >= big {
            r[0] -= small;
            r[n - 1] -= small - big;
            note("1.1", &r);
            return Ok((Position::new(r), vec![trace]));
        }
        r[0] = s_star;
        note("1.1", &r);
        let (r, delta_trace) = delta_alg(&Position::new(r))?;
        return Ok((r, vec![trace, delta_trace]));
    }
    // 1.2: m = b_l and a_1 >= m + Δ
    r[0] -= big + small;
    r[n - 1] -= small;
    note("1.2", &r);
    Ok((Position::new(r), vec![trace]))
}

/// Winning target for NN(2l,l), or `None` for members of S_l.
pub fn even_target(heights: &[u64]) -> Result<Option<(Vec<u64>, Vec<AlgorithmTrace>)>> {
    let pos = Position::new(heights.to_vec());
    let (h, ell) = even_heights(&pos)?;
    let n = h.len();
    let dq = DerivedQuantities::of(&h)?;
    if dq.in_s_ell() {
        return Ok(None);
    }
    if dq.delta_sum < 0 {
        let mirrored: Vec<u64> = h.iter().rev().copied().collect();
        return Ok(even_target(&mirrored)?.map(|(mut t, mut traces)| {
            t.reverse();
            for tr in &mut traces {
                tr.algorithm.push_str(" (mirrored)");
            }
            (t, traces)
        }));
    }
    if dq.m == 0 {
        // an empty end stack leaves PathNim PN(2l-1,l) on the rest
        let target = if h[0] == 0 {
            let mut t = vec![0];
            t.extend(path_target(&h[1..], ell).ok_or_else(no_path_move)?);
            t
        } else {
            let mut t = path_target(&h[..n - 1], ell).ok_or_else(no_path_move)?;
            t.push(0);
            t
        };
        return Ok(Some((target, Vec::new())));
    }
    if dq.delta_me <= 0 {
        let (t, traces) = case1_target(&pos)?;
        return Ok(Some((t.into_heights(), traces)));
    }
    if dq.delta_sum == 0 {
        let (t, traces) = finish_small_delta(&pos, Vec::new())?;
        return Ok(Some((t, traces)));
    }
    let two = two_delta(&pos)?;
    let mut traces = vec![two.trace];
    let r = two.r;
    let rq = DerivedQuantities::of(r.heights())?;
    if rq.in_s_ell() {
        return Ok(Some((r.into_heights(), traces)));
    }
    if rq.delta_sum == 0 {
        let (t, traces) = finish_small_delta(&r, traces)?;
        return Ok(Some((t, traces)));
    }
    // δ(r) = 0 < Δ(r)
    if r.get(0) >= rq.m + rq.delta_sum as u64 {
        let mut t = r.into_heights();
        t[0] -= rq.delta_sum as u64;
        return Ok(Some((t, traces)));
    }
    let (t, delta_trace) = delta_alg(&r)?;
    traces.push(delta_trace);
    Ok(Some((t.into_heights(), traces)))
}

fn no_path_move() -> Error {
    Error::Inconsistent("no PathNim move from an N-position".into())
}

fn finish_small_delta(
    pos: &Position,
    mut traces: Vec<AlgorithmTrace>,
) -> Result<(Vec<u64>, Vec<AlgorithmTrace>)> {
    let sd = small_delta(pos)?;
    traces.push(sd.trace);
    let dq = DerivedQuantities::of(sd.r.heights())?;
    match dq.delta_me {
        0 => Ok((sd.r.into_heights(), traces)),
        1 => Ok((unit_adjust(&sd.r, sd.x, sd.y)?.into_heights(), traces)),
        other => Err(Error::Inconsistent(format!(
            "delta algorithm stopped with δ={other}"
        ))),
    }
}
