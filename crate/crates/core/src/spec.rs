//! Game specifications: a vertex count plus the maximal allowed move sets.
//!
//! Vertices are 0-based inside the crate. Everything that crosses a public
//! boundary as text or JSON (move-set listings, `Move::set`, descriptors) is
//! 1-based, matching the usual way these games are written down.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest stack height accepted unless a spec is configured otherwise.
pub const DEFAULT_HEIGHT_CAP: u64 = u32::MAX as u64;

/// Upper bound on the number of move sets a family constructor may produce.
const MAX_MOVE_SETS: usize = 100_000;

/// The family a spec was built from, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Arbitrary move sets.
    Generic,
    /// Plain Nim: every singleton is a move set.
    Nim { n: usize },
    /// Moore's k-Nim: every k-element subset.
    Moore { n: usize, k: usize },
    /// CircularNim CN(n,k): k consecutive vertices of an n-cycle.
    Circular { n: usize, k: usize },
    /// PathNim PN(n,k): k consecutive vertices of an n-path.
    Path { n: usize, k: usize },
    /// NecklaceNim NN(n,k): PathNim windows plus the clasp {1,n}.
    Necklace { n: usize, k: usize },
    /// NNg(n,k,c): PathNim windows plus PN(2(c-1),c) wrapped around the ends.
    Clasp { n: usize, k: usize, c: usize },
}

impl Family {
    /// Short tag used by the JSON descriptors and the CLI.
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Generic => "SET",
            Family::Nim { .. } => "NIM",
            Family::Moore { .. } => "MOORE",
            Family::Circular { .. } => "CN",
            Family::Path { .. } => "PN",
            Family::Necklace { .. } => "NN",
            Family::Clasp { .. } => "NNG",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Generic => write!(f, "SN"),
            Family::Nim { n } => write!(f, "Nim({n})"),
            Family::Moore { n, k } => write!(f, "Moore({n},{k})"),
            Family::Circular { n, k } => write!(f, "CN({n},{k})"),
            Family::Path { n, k } => write!(f, "PN({n},{k})"),
            Family::Necklace { n, k } => write!(f, "NN({n},{k})"),
            Family::Clasp { n, k, c } => write!(f, "NNg({n},{k},{c})"),
        }
    }
}

/// A set of vertices that may be played on together. Sorted, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveSet(Vec<usize>);

impl MoveSet {
    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &MoveSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// Vertex labels as written externally.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }
}

impl fmt::Display for MoveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "}}")
    }
}

/// A SetNim game: `n` stacks and the maximal move sets.
///
/// Move sets are pairwise incomparable and together cover every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameSpec {
    n: usize,
    move_sets: Vec<MoveSet>,
    family: Family,
    height_cap: u64,
}

impl GameSpec {
    /// Builds the move sets of a named family.
    pub fn build(family: Family) -> Result<Self> {
        let (n, sets) = match family {
            Family::Generic => {
                return Err(Error::Parameter(
                    "generic specs are built with GameSpec::generic".into(),
                ))
            }
            Family::Nim { n } => {
                require(n >= 1, "Nim needs n >= 1")?;
                (n, (0..n).map(|v| vec![v]).collect())
            }
            Family::Moore { n, k } => {
                require(n >= 1, "Moore needs n >= 1")?;
                require(k >= 1 && k <= n, "Moore needs 1 <= k <= n")?;
                require(
                    binomial_at_most(n, k, MAX_MOVE_SETS),
                    "Moore(n,k) has too many move sets",
                )?;
                (n, k_subsets(n, k))
            }
            Family::Circular { n, k } => {
                require(n >= 2, "CircularNim needs n >= 2")?;
                require(k >= 1 && k <= n, "CircularNim needs 1 <= k <= n")?;
                (n, (0..n).map(|i| (0..k).map(|d| (i + d) % n).collect()).collect())
            }
            Family::Path { n, k } => {
                require(n >= 1, "PathNim needs n >= 1")?;
                require(k >= 1 && k <= n, "PathNim needs 1 <= k <= n")?;
                (n, windows(n, k))
            }
            Family::Necklace { n, k } => {
                require(n >= 2, "NecklaceNim needs n >= 2")?;
                require(k >= 2 && k <= n, "NecklaceNim needs 2 <= k <= n")?;
                let mut sets = windows(n, k);
                sets.push(vec![0, n - 1]);
                (n, sets)
            }
            Family::Clasp { n, k, c } => {
                require(n >= 2, "NNg needs n >= 2")?;
                require(k >= 2 && k <= n, "NNg needs 2 <= k <= n")?;
                require(c >= 2 && c <= n / 2 + 1, "NNg needs 2 <= c <= floor(n/2)+1")?;
                let mut sets = windows(n, k);
                // the wrap-around path n-c+2, ..., n, 1, ..., c-1
                let wrap: Vec<usize> = (n + 1 - c..n).chain(0..c - 1).collect();
                for i in 0..=wrap.len() - c {
                    sets.push(wrap[i..i + c].to_vec());
                }
                (n, sets)
            }
        };
        Self::from_raw(n, sets, family)
    }

    /// Builds a spec from arbitrary 1-based move sets. Non-maximal sets are dropped.
    pub fn generic(n: usize, move_sets_one_based: &[Vec<usize>]) -> Result<Self> {
        require(n >= 1, "a game needs at least one vertex")?;
        let mut sets = Vec::with_capacity(move_sets_one_based.len());
        for set in move_sets_one_based {
            let mut converted = Vec::with_capacity(set.len());
            for &v in set {
                if v == 0 || v > n {
                    return Err(Error::Parameter(format!(
                        "vertex {v} out of range 1..={n}"
                    )));
                }
                converted.push(v - 1);
            }
            sets.push(converted);
        }
        Self::from_raw(n, sets, Family::Generic)
    }

    /// Builds a spec from 0-based move sets.
    pub(crate) fn from_raw(n: usize, sets: Vec<Vec<usize>>, family: Family) -> Result<Self> {
        let mut normalized: Vec<MoveSet> = Vec::with_capacity(sets.len());
        for mut set in sets {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::Parameter("empty move set".into()));
            }
            if let Some(&v) = set.iter().find(|&&v| v >= n) {
                return Err(Error::Parameter(format!(
                    "vertex {} out of range 1..={n}",
                    v + 1
                )));
            }
            normalized.push(MoveSet(set));
        }
        let move_sets = maximal(normalized);
        let mut covered = vec![false; n];
        for set in &move_sets {
            for &v in set.vertices() {
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::Parameter(format!(
                "vertex {} is not in any move set",
                v + 1
            )));
        }
        Ok(GameSpec {
            n,
            move_sets,
            family,
            height_cap: DEFAULT_HEIGHT_CAP,
        })
    }

    /// Same spec with a different stack-height cap.
    pub fn with_height_cap(mut self, cap: u64) -> Self {
        self.height_cap = cap;
        self
    }

    /// Re-tags the spec with the family whose move sets it has, if any.
    pub fn tagged(mut self) -> Self {
        if let Some(f) = self.identify() {
            self.family = f;
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn height_cap(&self) -> u64 {
        self.height_cap
    }

    pub fn move_sets(&self) -> &[MoveSet] {
        &self.move_sets
    }

    pub fn move_set(&self, index: usize) -> Option<&MoveSet> {
        self.move_sets.get(index)
    }

    /// Move sets as 1-based vertex lists.
    pub fn move_sets_one_based(&self) -> Vec<Vec<usize>> {
        self.move_sets.iter().map(MoveSet::one_based).collect()
    }

    /// True when both specs have the same vertex count and the same collection of move sets.
    pub fn same_move_sets(&self, other: &GameSpec) -> bool {
        self.n == other.n && sorted_sets(&self.move_sets) == sorted_sets(&other.move_sets)
    }

    /// True when reading the vertices backwards yields the same move sets.
    pub fn is_reversal_symmetric(&self) -> bool {
        let reversed: Vec<MoveSet> = self
            .move_sets
            .iter()
            .map(|s| {
                let mut v: Vec<usize> = s.0.iter().map(|&x| self.n - 1 - x).collect();
                v.sort_unstable();
                MoveSet(v)
            })
            .collect();
        sorted_sets(&reversed) == sorted_sets(&self.move_sets)
    }

    /// Relabels vertices: `order[new] = old` (0-based). The result is generic.
    pub fn relabel(&self, order: &[usize]) -> Result<GameSpec> {
        if order.len() != self.n {
            return Err(Error::Parameter("relabeling must list every vertex".into()));
        }
        let mut new_of_old = vec![usize::MAX; self.n];
        for (new, &old) in order.iter().enumerate() {
            if old >= self.n || new_of_old[old] != usize::MAX {
                return Err(Error::Parameter("relabeling is not a permutation".into()));
            }
            new_of_old[old] = new;
        }
        let sets = self
            .move_sets
            .iter()
            .map(|s| s.0.iter().map(|&v| new_of_old[v]).collect())
            .collect();
        GameSpec::from_raw(self.n, sets, Family::Generic)
    }

    /// Searches for a vertex order under which `self` has the move sets of `other`.
    ///
    /// Returns `order` with `order[new] = old`. Brute force, so limited to 9 vertices.
    pub fn find_isomorphism(&self, other: &GameSpec) -> Option<Vec<usize>> {
        if self.n != other.n || self.move_sets.len() != other.move_sets.len() || self.n > 9 {
            return None;
        }
        let target = sorted_sets(&other.move_sets);
        let mut order: Vec<usize> = (0..self.n).collect();
        loop {
            if let Ok(relabeled) = self.relabel(&order) {
                if sorted_sets(&relabeled.move_sets) == target {
                    return Some(order);
                }
            }
            if !next_permutation(&mut order) {
                return None;
            }
        }
    }

    /// Names a standard family with exactly these move sets, if one exists.
    pub fn identify(&self) -> Option<Family> {
        let n = self.n;
        let mut candidates = vec![Family::Nim { n }];
        candidates.extend((2..=n).map(|k| Family::Necklace { n, k }));
        candidates.extend((1..=n).map(|k| Family::Path { n, k }));
        if n >= 2 {
            candidates.extend((1..=n).map(|k| Family::Circular { n, k }));
        }
        candidates.into_iter().find(|f| {
            GameSpec::build(*f)
                .map(|s| s.same_move_sets(self))
                .unwrap_or(false)
        })
    }

    /// Like [`identify`](Self::identify) but up to relabeling; returns the order too.
    pub fn identify_up_to_relabeling(&self) -> Option<(Family, Vec<usize>)> {
        if let Some(f) = self.identify() {
            return Some((f, (0..self.n).collect()));
        }
        let n = self.n;
        let mut candidates: Vec<Family> = (1..=n).map(|k| Family::Path { n, k }).collect();
        candidates.extend((2..=n).map(|k| Family::Necklace { n, k }));
        if n >= 2 {
            candidates.extend((1..=n).map(|k| Family::Circular { n, k }));
        }
        candidates.into_iter().find_map(|f| {
            let spec = GameSpec::build(f).ok()?;
            self.find_isomorphism(&spec).map(|order| (f, order))
        })
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {} vertices: ", self.family, self.n)?;
        for (i, s) in self.move_sets.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(msg.to_string()))
    }
}

fn windows(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..=n - k).map(|i| (i..i + k).collect()).collect()
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // advance to the next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - k + i {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial_at_most(n: usize, k: usize, limit: usize) -> bool {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > limit as u128 {
            return false;
        }
    }
    true
}

/// Drops duplicates and sets contained in another set; keeps first-seen order.
pub(crate) fn maximal(sets: Vec<MoveSet>) -> Vec<MoveSet> {
    let mut kept: Vec<MoveSet> = Vec::with_capacity(sets.len());
    for (i, s) in sets.iter().enumerate() {
        let dominated = sets.iter().enumerate().any(|(j, other)| {
            if i == j {
                return false;
            }
            if s == other {
                // duplicate: keep the earliest copy only
                return j < i;
            }
            s.is_subset_of(other)
        });
        if !dominated {
            kept.push(s.clone());
        }
    }
    kept
}

fn sorted_sets(sets: &[MoveSet]) -> Vec<MoveSet> {
    let mut v = sets.to_vec();
    v.sort();
    v
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(spec: &GameSpec) -> Vec<Vec<usize>> {
        spec.move_sets_one_based()
    }

    #[test]
    fn necklace_small_cases() {
        let nn32 = GameSpec::build(Family::Necklace { n: 3, k: 2 }).unwrap();
        assert_eq!(sets(&nn32), vec![vec![1, 2], vec![2, 3], vec![1, 3]]);

        let nn42 = GameSpec::build(Family::Necklace { n: 4, k: 2 }).unwrap();
        assert_eq!(
            sets(&nn42),
            vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![1, 4]]
        );
        let cn42 = GameSpec::build(Family::Circular { n: 4, k: 2 }).unwrap();
        assert!(nn42.same_move_sets(&cn42));

        let nn53 = GameSpec::build(Family::Necklace { n: 5, k: 3 }).unwrap();
        assert_eq!(
            sets(&nn53),
            vec![vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 5], vec![1, 5]]
        );
    }

    #[test]
    fn clasp_dropped_when_inside_window() {
        let nn55 = GameSpec::build(Family::Necklace { n: 5, k: 5 }).unwrap();
        assert_eq!(sets(&nn55), vec![vec![1, 2, 3, 4, 5]]);
        let nn22 = GameSpec::build(Family::Necklace { n: 2, k: 2 }).unwrap();
        assert_eq!(sets(&nn22), vec![vec![1, 2]]);
    }

    #[test]
    fn clasp_family_with_c2_is_necklace() {
        for n in 3..=9 {
            for k in 2..=n {
                let a = GameSpec::build(Family::Clasp { n, k, c: 2 }).unwrap();
                let b = GameSpec::build(Family::Necklace { n, k }).unwrap();
                assert!(a.same_move_sets(&b), "NNg({n},{k},2)");
            }
        }
    }

    #[test]
    fn clasp_family_wraps() {
        // NNg(8,4,3): windows of 4 plus PN(4,3) on 7-8-1-2
        let g = GameSpec::build(Family::Clasp { n: 8, k: 4, c: 3 }).unwrap();
        let s = sets(&g);
        assert!(s.contains(&vec![1, 7, 8]));
        assert!(s.contains(&vec![1, 2, 8]));
        assert_eq!(s.len(), 7);
    }

    #[test]
    fn parameter_errors_name_the_bound() {
        let e = GameSpec::build(Family::Necklace { n: 1, k: 2 }).unwrap_err();
        assert!(e.to_string().contains("n >= 2"));
        let e = GameSpec::build(Family::Necklace { n: 5, k: 6 }).unwrap_err();
        assert!(e.to_string().contains("k <= n"));
        let e = GameSpec::build(Family::Clasp { n: 6, k: 3, c: 5 }).unwrap_err();
        assert!(e.to_string().contains("floor(n/2)+1"));
    }

    #[test]
    fn generic_prunes_and_checks_cover() {
        let g = GameSpec::generic(3, &[vec![1], vec![1, 2], vec![3]]).unwrap();
        assert_eq!(sets(&g), vec![vec![1, 2], vec![3]]);
        assert!(GameSpec::generic(3, &[vec![1, 2]]).is_err());
        assert!(GameSpec::generic(3, &[vec![1, 4]]).is_err());
    }

    #[test]
    fn families_are_maximal_and_covering() {
        let families = [
            Family::Nim { n: 4 },
            Family::Moore { n: 5, k: 3 },
            Family::Circular { n: 6, k: 3 },
            Family::Path { n: 7, k: 4 },
            Family::Necklace { n: 7, k: 4 },
            Family::Clasp { n: 9, k: 4, c: 4 },
        ];
        for f in families {
            let spec = GameSpec::build(f).unwrap();
            for (i, a) in spec.move_sets().iter().enumerate() {
                for (j, b) in spec.move_sets().iter().enumerate() {
                    if i != j {
                        assert!(!a.is_subset_of(b), "{f}: {a} inside {b}");
                    }
                }
            }
            let mut covered = vec![false; spec.n()];
            for s in spec.move_sets() {
                for &v in s.vertices() {
                    covered[v] = true;
                }
            }
            assert!(covered.iter().all(|c| *c), "{f}");
        }
    }

    #[test]
    fn identify_and_isomorphism() {
        let g = GameSpec::generic(4, &[vec![1, 2], vec![2, 3], vec![3, 4], vec![1, 4]]).unwrap();
        assert_eq!(g.identify(), Some(Family::Necklace { n: 4, k: 2 }));
        // path 1-3-2 is PN(3,2) after relabeling
        let h = GameSpec::generic(3, &[vec![1, 3], vec![3, 2]]).unwrap();
        assert_eq!(h.identify(), None);
        let (f, order) = h.identify_up_to_relabeling().unwrap();
        assert_eq!(f, Family::Path { n: 3, k: 2 });
        assert!(h
            .relabel(&order)
            .unwrap()
            .same_move_sets(&GameSpec::build(f).unwrap()));
    }

    #[test]
    fn reversal_symmetry() {
        assert!(GameSpec::build(Family::Necklace { n: 7, k: 3 })
            .unwrap()
            .is_reversal_symmetric());
        let g = GameSpec::generic(3, &[vec![1, 2], vec![3]]).unwrap();
        assert!(!g.is_reversal_symmetric());
    }
}
