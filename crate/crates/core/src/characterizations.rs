//! Closed-form P-position predicates.
//!
//! Stack naming for the anchor games NN(2l,l) and NN(2l+1,l+1): the first l
//! stacks are `a_1..a_l`, the last l are `b_1..b_l`, and odd n has a center
//! stack `c` between them. Indices in [`DerivedQuantities`] follow that
//! 1-based naming so traces read like the usual tables.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::position::Position;
use crate::spec::{Family, GameSpec};

/// Quantities the S_l predicate is built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedQuantities {
    pub ell: usize,
    #[serde(rename = "A")]
    pub a_sum: u64,
    #[serde(rename = "B")]
    pub b_sum: u64,
    pub m: u64,
    /// `s_2..s_{l+1}`; `s[j]` is `s_{j+2}`.
    pub s: Vec<u64>,
    pub s_star: u64,
    /// Smallest index `i` (2-based, as in `s_i`) with `s_i = s*`.
    pub t: usize,
    /// `A - B`.
    #[serde(rename = "Delta")]
    pub delta_sum: i64,
    /// `s* - m`. Case-1 code reads the negation.
    #[serde(rename = "delta")]
    pub delta_me: i64,
}

impl DerivedQuantities {
    /// Computes everything from the heights of an n-stack anchor game, n >= 3.
    pub fn of(heights: &[u64]) -> Result<Self> {
        let n = heights.len();
        if n < 3 {
            return Err(Error::Domain(format!(
                "derived quantities need n >= 3, got {n}"
            )));
        }
        let ell = n / 2;
        let k = n.div_ceil(2);
        let a_sum = heights[..ell].iter().sum();
        let b_sum = heights[n - ell..].iter().sum();
        let m = heights[0].min(heights[n - 1]);
        let s: Vec<u64> = (0..ell)
            .map(|j| heights[j + 1..j + k].iter().sum())
            .collect();
        let mut dq = DerivedQuantities {
            ell,
            a_sum,
            b_sum,
            m,
            s,
            s_star: 0,
            t: 0,
            delta_sum: 0,
            delta_me: 0,
        };
        dq.refresh();
        Ok(dq)
    }

    fn refresh(&mut self) {
        let (j, &s_star) = self
            .s
            .iter()
            .enumerate()
            .min_by_key(|&(j, &v)| (v, j))
            .expect("l >= 1");
        self.s_star = s_star;
        self.t = j + 2;
        self.delta_sum = self.a_sum as i64 - self.b_sum as i64;
        self.delta_me = s_star as i64 - self.m as i64;
    }

    /// `s_i` for `2 <= i <= l+1`.
    pub fn s_at(&self, i: usize) -> u64 {
        self.s[i - 2]
    }

    /// Sum equation A = B.
    pub fn se(&self) -> bool {
        self.a_sum == self.b_sum
    }

    /// Minimum equation m = s*.
    pub fn me(&self) -> bool {
        self.m == self.s_star
    }

    pub fn in_s_ell(&self) -> bool {
        self.se() && self.me()
    }

    /// Updates in place after removing `d` tokens from 0-based stack `v`.
    ///
    /// `before` holds the heights prior to the removal.
    pub fn apply_decrement(&mut self, before: &[u64], v: usize, d: u64) -> Result<()> {
        let n = before.len();
        if v >= n || before[v] < d {
            return Err(Error::Domain(format!(
                "cannot remove {d} from stack {}",
                v + 1
            )));
        }
        let ell = self.ell;
        let k = n.div_ceil(2);
        if v < ell {
            self.a_sum -= d;
        }
        if v >= n - ell {
            self.b_sum -= d;
        }
        if v == 0 || v == n - 1 {
            let (first, last) = if v == 0 {
                (before[0] - d, before[n - 1])
            } else {
                (before[0], before[n - 1] - d)
            };
            self.m = first.min(last);
        }
        for (j, s) in self.s.iter_mut().enumerate() {
            if (j + 1..j + k).contains(&v) {
                *s -= d;
            }
        }
        self.refresh();
        Ok(())
    }
}

/// Outcome of evaluating one closed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredicateReport {
    pub predicate: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Labelled sub-conditions, for display.
    #[serde(skip)]
    pub checks: Vec<(String, bool)>,
}

impl PredicateReport {
    fn from_checks(predicate: &str, checks: Vec<(String, bool, String)>) -> Self {
        let failed: Vec<String> = checks
            .iter()
            .filter(|(_, ok, _)| !ok)
            .map(|(label, _, detail)| format!("{label}: {detail}"))
            .collect();
        PredicateReport {
            predicate: predicate.to_string(),
            holds: failed.is_empty(),
            witness: (!failed.is_empty()).then(|| failed.join("; ")),
            checks: checks.into_iter().map(|(l, ok, _)| (l, ok)).collect(),
        }
    }

    fn single(predicate: &str, holds: bool, witness: impl FnOnce() -> String) -> Self {
        PredicateReport {
            predicate: predicate.to_string(),
            holds,
            witness: (!holds).then(witness),
            checks: Vec::new(),
        }
    }
}

impl fmt::Display for PredicateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.checks.is_empty() {
            write!(f, "{}: {}", self.predicate, if self.holds { "holds" } else { "fails" })?;
        } else {
            let parts: Vec<String> = self
                .checks
                .iter()
                .map(|(l, ok)| format!("{l} {}", if *ok { "ok" } else { "fails" }))
                .collect();
            write!(f, "{}: {}", self.predicate, parts.join(", "))?;
        }
        if let Some(w) = &self.witness {
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

/// Anchor-game parameters `(n, k)` with `k = ceil(n/2)`, if the spec is one.
fn anchor_game(spec: &GameSpec) -> Option<usize> {
    let (n, k) = match spec.family() {
        Family::Necklace { n, k } | Family::Clasp { n, k, c: 2 } => (n, k),
        Family::Circular { n: 4, k: 2 } => (4, 2),
        Family::Circular { n: 3, k: 2 } => (3, 2),
        _ => return None,
    };
    (n >= 3 && k == n.div_ceil(2)).then_some(n)
}

/// Derived quantities of a position in NN(2l,l) or NN(2l+1,l+1).
pub fn derived_quantities(spec: &GameSpec, pos: &Position) -> Result<DerivedQuantities> {
    if anchor_game(spec).is_none() {
        return Err(Error::Domain(format!(
            "{} is not NN(n, ceil(n/2)) with n >= 3",
            spec.family()
        )));
    }
    spec.check_position(pos)?;
    DerivedQuantities::of(pos.heights())
}

/// S_l membership report from precomputed quantities.
pub fn s_ell_report(dq: &DerivedQuantities) -> PredicateReport {
    PredicateReport::from_checks(
        "S_ell",
        vec![
            (
                "SE".into(),
                dq.se(),
                format!("A={}, B={}", dq.a_sum, dq.b_sum),
            ),
            (
                "ME".into(),
                dq.me(),
                format!("m={}, s*={}", dq.m, dq.s_star),
            ),
        ],
    )
}

/// Membership in S_l: A = B and m = s*.
pub fn in_s_ell(spec: &GameSpec, pos: &Position) -> Result<PredicateReport> {
    Ok(s_ell_report(&derived_quantities(spec, pos)?))
}

fn require_necklace(spec: &GameSpec, want_k: impl Fn(usize) -> usize, min_n: usize) -> Result<usize> {
    match spec.family() {
        Family::Necklace { n, k } | Family::Clasp { n, k, c: 2 } if n >= min_n && k == want_k(n) => {
            Ok(n)
        }
        f => Err(Error::Domain(format!("predicate does not apply to {f}"))),
    }
}

/// NN(n,n-1): `p_1 = p_2 + ... + p_{n-1} = p_n`.
pub fn p_nn_n_minus_1(spec: &GameSpec, pos: &Position) -> Result<bool> {
    let n = require_necklace(spec, |n| n - 1, 3)?;
    spec.check_position(pos)?;
    let p = pos.heights();
    let mid: u64 = p[1..n - 1].iter().sum();
    Ok(p[0] == mid && mid == p[n - 1])
}

/// NN(n,n-2): `p_1 = p_3 + ... + p_{n-1}` and `p_n = p_2 + ... + p_{n-2}`.
pub fn p_nn_n_minus_2(spec: &GameSpec, pos: &Position) -> Result<bool> {
    let n = require_necklace(spec, |n| n - 2, 4)?;
    spec.check_position(pos)?;
    let p = pos.heights();
    let right: u64 = p[2..n - 1].iter().sum();
    let left: u64 = p[1..n - 2].iter().sum();
    Ok(p[0] == right && p[n - 1] == left)
}

/// PathNim with `k >= ceil(n/2)` on raw heights.
///
/// P iff a run of k-1 zeros splits the stacks into a non-empty prefix and a
/// non-empty suffix of equal sums, or n = k and everything is zero.
pub fn path_holds(heights: &[u64], k: usize) -> bool {
    let n = heights.len();
    if n == k {
        return heights.iter().all(|&h| h == 0);
    }
    let total: u64 = heights.iter().sum();
    let mut prefix = 0u64;
    for u in 1..=n - k {
        prefix += heights[u - 1];
        let zeros = heights[u..u + k - 1].iter().all(|&h| h == 0);
        if zeros && 2 * prefix == total {
            return true;
        }
    }
    false
}

/// PathNim PN(n,k) with `k >= ceil(n/2)`.
pub fn p_path(spec: &GameSpec, pos: &Position) -> Result<bool> {
    match spec.family() {
        Family::Path { n, k } if k >= n.div_ceil(2) => {
            spec.check_position(pos)?;
            Ok(path_holds(pos.heights(), k))
        }
        f => Err(Error::Domain(format!(
            "path predicate needs PN(n,k) with k >= ceil(n/2), got {f}"
        ))),
    }
}

/// CN(3,2): all equal. CN(4,2): `(a,b,a,b)`.
pub fn p_cn_small(spec: &GameSpec, pos: &Position) -> Result<bool> {
    let p = pos.heights();
    match spec.family() {
        Family::Circular { n: 3, k: 2 } => {
            spec.check_position(pos)?;
            Ok(p[0] == p[1] && p[1] == p[2])
        }
        Family::Circular { n: 4, k: 2 } => {
            spec.check_position(pos)?;
            Ok(p[0] == p[2] && p[1] == p[3])
        }
        f => Err(Error::Domain(format!(
            "small circular predicate needs CN(3,2) or CN(4,2), got {f}"
        ))),
    }
}

/// Merges stacks `l+1..n-l` of NN(n,n-l) into the center of NN(2l+1,l+1).
pub fn anchor_heights(heights: &[u64], ell: usize) -> Result<Vec<u64>> {
    let n = heights.len();
    if ell == 0 || 2 * ell >= n {
        return Err(Error::Domain(format!(
            "anchor reduction needs 1 <= l < n/2, got l={ell}, n={n}"
        )));
    }
    let mut out = Vec::with_capacity(2 * ell + 1);
    out.extend_from_slice(&heights[..ell]);
    out.push(heights[ell..n - ell].iter().sum());
    out.extend_from_slice(&heights[n - ell..]);
    Ok(out)
}

/// Which closed form covers NN(n,k), if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// k = ceil(n/2).
    SEll,
    /// ceil(n/2) < k < n, reduced to the anchor game.
    Anchor,
    /// k = n: one move set holding everything.
    SingleSet,
    /// k < ceil(n/2).
    Open,
    /// n = 2, outside every closed form.
    Excluded,
}

impl Coverage {
    pub fn solved(self) -> bool {
        matches!(self, Coverage::SEll | Coverage::Anchor | Coverage::SingleSet)
    }

    pub fn label(self) -> &'static str {
        match self {
            Coverage::SEll => "S",
            Coverage::Anchor => "A",
            Coverage::SingleSet => "1",
            Coverage::Open => ".",
            Coverage::Excluded => "-",
        }
    }
}

/// Coverage of NN(n,k) for `2 <= k <= n`.
pub fn necklace_coverage(n: usize, k: usize) -> Coverage {
    if n < 3 {
        Coverage::Excluded
    } else if k == n {
        Coverage::SingleSet
    } else if k == n.div_ceil(2) {
        Coverage::SEll
    } else if k > n.div_ceil(2) {
        Coverage::Anchor
    } else {
        Coverage::Open
    }
}

/// Dispatches to the closed form covering the spec, or `None` if unsolved.
pub fn closed_form(spec: &GameSpec, pos: &Position) -> Result<Option<PredicateReport>> {
    spec.check_position(pos)?;
    let p = pos.heights();
    let report = match spec.family() {
        Family::Necklace { n, k } | Family::Clasp { n, k, c: 2 } => match necklace_coverage(n, k) {
            Coverage::SEll => s_ell_report(&DerivedQuantities::of(p)?),
            Coverage::Anchor => {
                let anchored = anchor_heights(p, n - k)?;
                let mut r = s_ell_report(&DerivedQuantities::of(&anchored)?);
                r.predicate = "S_ell (anchor)".into();
                r
            }
            Coverage::SingleSet => PredicateReport::single("zero", pos.is_terminal(), || {
                format!("total={}", pos.total())
            }),
            Coverage::Open | Coverage::Excluded => return Ok(None),
        },
        Family::Path { .. } => match p_path(spec, pos) {
            Ok(holds) => PredicateReport::single("PathNim", holds, || {
                "no zero run splits the stacks into equal halves".into()
            }),
            Err(_) => return Ok(None),
        },
        Family::Circular { n, k: 2 } if n == 3 || n == 4 => {
            let holds = p_cn_small(spec, pos)?;
            PredicateReport::single("CN_small", holds, || {
                if n == 3 {
                    "stacks differ".into()
                } else {
                    "not of the form (a,b,a,b)".into()
                }
            })
        }
        _ => return Ok(None),
    };
    Ok(Some(report))
}

/// Name of the closed form `closed_form` would use, without a position.
pub fn closed_form_name(spec: &GameSpec) -> Option<&'static str> {
    match spec.family() {
        Family::Necklace { n, k } | Family::Clasp { n, k, c: 2 } => match necklace_coverage(n, k) {
            Coverage::SEll => Some("S_ell"),
            Coverage::Anchor => Some("S_ell (anchor)"),
            Coverage::SingleSet => Some("zero"),
            _ => None,
        },
        Family::Path { n, k } if k >= n.div_ceil(2) => Some("PathNim"),
        Family::Circular { n: 3 | 4, k: 2 } => Some("CN_small"),
        _ => None,
    }
}
