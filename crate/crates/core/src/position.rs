//! Positions, moves and outcomes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spec::GameSpec;

/// Stack heights, one per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<u64>);

impl Position {
    pub fn new(heights: Vec<u64>) -> Self {
        Position(heights)
    }

    pub fn zeros(n: usize) -> Self {
        Position(vec![0; n])
    }

    pub fn heights(&self) -> &[u64] {
        &self.0
    }

    pub fn into_heights(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Height at a 0-based vertex.
    pub fn get(&self, v: usize) -> u64 {
        self.0[v]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// True iff every stack is empty.
    pub fn is_terminal(&self) -> bool {
        self.0.iter().all(|&h| h == 0)
    }

    /// Stacks in reverse order.
    pub fn mirror(&self) -> Position {
        Position(self.0.iter().rev().copied().collect())
    }

    /// Per-stack difference `self - other`, if `other <= self` everywhere.
    pub fn removal_to(&self, other: &Position) -> Option<Vec<u64>> {
        if self.len() != other.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Position {
    type Err = Error;

    /// Parses `4,20,0,0` (parentheses and spaces allowed).
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        if trimmed.trim().is_empty() {
            return Err(Error::Position("empty position".into()));
        }
        trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Position(format!("not a stack height: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Position)
    }
}

impl From<Vec<u64>> for Position {
    fn from(v: Vec<u64>) -> Self {
        Position(v)
    }
}

/// A move: which move set is played and how many tokens leave each stack.
///
/// `set_index` is 0-based internally and 1-based on the wire (`"set"`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MoveWire", into = "MoveWire")]
pub struct Move {
    pub set_index: usize,
    pub removals: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct MoveWire {
    set: usize,
    removals: Vec<u64>,
}

impl TryFrom<MoveWire> for Move {
    type Error = Error;

    fn try_from(w: MoveWire) -> Result<Self> {
        if w.set == 0 {
            return Err(Error::IllegalMove("move sets are numbered from 1".into()));
        }
        Ok(Move {
            set_index: w.set - 1,
            removals: w.removals,
        })
    }
}

impl From<Move> for MoveWire {
    fn from(m: Move) -> Self {
        MoveWire {
            set: m.set_index + 1,
            removals: m.removals,
        }
    }
}

impl Move {
    pub fn total(&self) -> u64 {
        self.removals.iter().sum()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "set {} removes {}", self.set_index + 1, Position(self.removals.clone()))
    }
}

/// Outcome class under normal play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// Previous player wins.
    P,
    /// Next player wins.
    N,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::P => "P",
            Outcome::N => "N",
        })
    }
}

impl GameSpec {
    /// Checks that `pos` has one stack per vertex and respects the height cap.
    pub fn check_position(&self, pos: &Position) -> Result<()> {
        if pos.len() != self.n() {
            return Err(Error::Position(format!(
                "expected {} stacks, got {}",
                self.n(),
                pos.len()
            )));
        }
        if let Some((i, h)) = pos
            .heights()
            .iter()
            .enumerate()
            .find(|(_, &h)| h > self.height_cap())
        {
            return Err(Error::Position(format!(
                "stack {} has height {h} above the cap {}",
                i + 1,
                self.height_cap()
            )));
        }
        Ok(())
    }

    /// Validates `mv` against `pos` without applying it.
    pub fn check_move(&self, pos: &Position, mv: &Move) -> Result<()> {
        self.check_position(pos)?;
        let set = self.move_set(mv.set_index).ok_or_else(|| {
            Error::IllegalMove(format!(
                "move set {} does not exist (spec has {})",
                mv.set_index + 1,
                self.move_sets().len()
            ))
        })?;
        if mv.removals.len() != self.n() {
            return Err(Error::IllegalMove(format!(
                "removal vector has length {}, expected {}",
                mv.removals.len(),
                self.n()
            )));
        }
        for (v, &r) in mv.removals.iter().enumerate() {
            if r > 0 && !set.contains(v) {
                return Err(Error::IllegalMove(format!(
                    "stack {} is outside move set {set}",
                    v + 1
                )));
            }
            if r > pos.get(v) {
                return Err(Error::IllegalMove(format!(
                    "removes {r} from stack {} which holds {}",
                    v + 1,
                    pos.get(v)
                )));
            }
        }
        if mv.total() == 0 {
            return Err(Error::IllegalMove(
                "a move must take at least one token".into(),
            ));
        }
        Ok(())
    }

    /// Applies a legal move.
    pub fn apply_move(&self, pos: &Position, mv: &Move) -> Result<Position> {
        self.check_move(pos, mv)?;
        Ok(Position(
            pos.heights()
                .iter()
                .zip(&mv.removals)
                .map(|(h, r)| h - r)
                .collect(),
        ))
    }

    /// Every legal move from `pos`, move set by move set.
    pub fn legal_moves<'a>(&'a self, pos: &'a Position) -> LegalMoves<'a> {
        LegalMoves {
            spec: self,
            pos,
            set_index: 0,
            odometer: None,
        }
    }

    /// The first move set (in spec order) that contains every vertex where `removals` is positive.
    pub fn move_for_removals(&self, removals: Vec<u64>) -> Result<Move> {
        if removals.len() != self.n() {
            return Err(Error::IllegalMove("removal vector has the wrong length".into()));
        }
        if removals.iter().all(|&r| r == 0) {
            return Err(Error::IllegalMove(
                "a move must take at least one token".into(),
            ));
        }
        let index = self
            .move_sets()
            .iter()
            .position(|set| {
                removals
                    .iter()
                    .enumerate()
                    .all(|(v, &r)| r == 0 || set.contains(v))
            })
            .ok_or_else(|| {
                Error::IllegalMove("changed stacks do not lie in a single move set".into())
            })?;
        Ok(Move {
            set_index: index,
            removals,
        })
    }
}

/// Iterator over legal moves; see [`GameSpec::legal_moves`].
pub struct LegalMoves<'a> {
    spec: &'a GameSpec,
    pos: &'a Position,
    set_index: usize,
    /// Removal amounts for the current move set's vertices.
    odometer: Option<Vec<u64>>,
}

impl Iterator for LegalMoves<'_> {
    type Item = Move;

    fn next(&mut self) -> Option<Move> {
        loop {
            let set = self.spec.move_set(self.set_index)?;
            let verts = set.vertices();
            let odo = self.odometer.get_or_insert_with(|| vec![0; verts.len()]);
            // odometer increment, first digit fastest; wrapping to all-zero ends the set
            let mut advanced = false;
            for (d, &v) in odo.iter_mut().zip(verts) {
                if *d < self.pos.get(v) {
                    *d += 1;
                    advanced = true;
                    break;
                }
                *d = 0;
            }
            if advanced {
                let mut removals = vec![0; self.spec.n()];
                for (&d, &v) in odo.iter().zip(verts) {
                    removals[v] = d;
                }
                return Some(Move {
                    set_index: self.set_index,
                    removals,
                });
            }
            self.set_index += 1;
            self.odometer = None;
        }
    }
}
