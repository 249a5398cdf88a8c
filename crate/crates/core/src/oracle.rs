//! Ground-truth outcome classification by exhaustive search.
//!
//! Two routes share one [`Oracle`]:
//!
//! * [`Oracle::classify`] runs a memoized depth-first search over an explicit
//!   work-list, so tall positions never hit the call-stack limit. Results go
//!   into a concurrent map that any number of threads may fill at once.
//! * [`Oracle::solve_box`] classifies every position with all heights `<= cap`
//!   bottom-up into a dense table, layer by layer in total token count. Each
//!   layer only reads smaller layers, so a layer is split across workers.

use std::collections::HashSet;
use std::io::{self, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::position::{Move, Outcome, Position};
use crate::spec::GameSpec;

/// Environment variable overriding the default budgets: `ENTRIES[,OPTIONS]`.
pub const BUDGET_ENV: &str = "NN_BUDGET";

/// Search limits. Exceeding either aborts with [`Error::Resource`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Memo entries (or dense-table cells).
    pub max_entries: usize,
    /// Generated options, summed over the oracle's lifetime.
    pub max_options: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_entries: 10_000_000,
            max_options: 1_000_000_000,
        }
    }
}

impl Budget {
    /// Parses `ENTRIES[,OPTIONS]`.
    pub fn parse(s: &str) -> Result<Budget> {
        let mut budget = Budget::default();
        let mut parts = s.split(',').map(str::trim);
        let bad = || Error::Parameter(format!("malformed budget {s:?}, expected ENTRIES[,OPTIONS]"));
        match parts.next() {
            Some(p) if !p.is_empty() => budget.max_entries = p.parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        }
        if let Some(p) = parts.next() {
            budget.max_options = p.parse().map_err(|_| bad())?;
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(budget)
    }

    /// Default budget, overridden by `NN_BUDGET` when set and well formed.
    pub fn from_env() -> Budget {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| Budget::parse(&s).ok())
            .unwrap_or_default()
    }
}

/// Counters describing the memo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
    pub options: u64,
}

/// One line of a sweep export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub pos: Vec<u64>,
    pub outcome: Outcome,
}

/// Memoized exhaustive classifier for one spec.
#[derive(Debug)]
pub struct Oracle {
    spec: GameSpec,
    cache: DashMap<Box<[u64]>, Outcome>,
    budget: Budget,
    mirror_canonical: bool,
    hits: AtomicU64,
    misses: AtomicU64,
    options: AtomicU64,
}

struct Frame {
    key: Box<[u64]>,
    options: Vec<Box<[u64]>>,
    next: usize,
}

impl Oracle {
    /// Oracle with the environment budget.
    pub fn new(spec: GameSpec) -> Self {
        Self::with_budget(spec, Budget::from_env())
    }

    pub fn with_budget(spec: GameSpec, budget: Budget) -> Self {
        Oracle {
            spec,
            cache: DashMap::new(),
            budget,
            mirror_canonical: false,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            options: AtomicU64::new(0),
        }
    }

    /// Keys the memo by the smaller of a position and its mirror image.
    ///
    /// Only valid for specs whose move sets are symmetric under reversal.
    pub fn with_mirror_canonicalization(mut self) -> Result<Self> {
        if !self.spec.is_reversal_symmetric() {
            return Err(Error::Domain(
                "mirror canonicalization needs a reversal-symmetric spec".into(),
            ));
        }
        self.mirror_canonical = true;
        Ok(self)
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn stats(&self) -> OracleStats {
        OracleStats {
            entries: self.cache.len(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            options: self.options.load(Ordering::Relaxed),
        }
    }

    fn key(&self, heights: &[u64]) -> Box<[u64]> {
        if self.mirror_canonical {
            let rev: Vec<u64> = heights.iter().rev().copied().collect();
            if rev.as_slice() < heights {
                return rev.into_boxed_slice();
            }
        }
        heights.to_vec().into_boxed_slice()
    }

    fn lookup(&self, key: &[u64]) -> Option<Outcome> {
        self.cache.get(key).map(|e| *e)
    }

    fn charge_options(&self, count: u64) -> Result<()> {
        let before = self.options.fetch_add(count, Ordering::Relaxed);
        if before + count > self.budget.max_options {
            return Err(Error::Resource(format!(
                "more than {} options generated",
                self.budget.max_options
            )));
        }
        Ok(())
    }

    /// Distinct option keys of a position.
    fn option_keys(&self, heights: &[u64]) -> Result<Vec<Box<[u64]>>> {
        let pos = Position::new(heights.to_vec());
        let mut seen: HashSet<Box<[u64]>> = HashSet::new();
        let mut generated = 0u64;
        for mv in self.spec.legal_moves(&pos) {
            generated += 1;
            let child: Vec<u64> = heights
                .iter()
                .zip(&mv.removals)
                .map(|(h, r)| h - r)
                .collect();
            seen.insert(self.key(&child));
        }
        self.charge_options(generated)?;
        Ok(seen.into_iter().collect())
    }

    /// P iff every option is N; the terminal position is P.
    pub fn classify(&self, pos: &Position) -> Result<Outcome> {
        self.spec.check_position(pos)?;
        let root = self.key(pos.heights());
        if let Some(o) = self.lookup(&root) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(o);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let mut stack = vec![Frame {
            options: self.option_keys(&root)?,
            key: root.clone(),
            next: 0,
        }];
        while let Some(top) = stack.last_mut() {
            let mut result = None;
            let mut descend = None;
            while top.next < top.options.len() {
                match self.lookup(&top.options[top.next]) {
                    Some(Outcome::P) => {
                        result = Some(Outcome::N);
                        break;
                    }
                    Some(Outcome::N) => top.next += 1,
                    None => {
                        descend = Some(top.options[top.next].clone());
                        break;
                    }
                }
            }
            if let Some(child) = descend {
                let options = self.option_keys(&child)?;
                stack.push(Frame {
                    key: child,
                    options,
                    next: 0,
                });
                continue;
            }
            let outcome = result.unwrap_or(Outcome::P);
            let frame = stack.pop().expect("non-empty stack");
            if self.cache.len() >= self.budget.max_entries {
                return Err(Error::Resource(format!(
                    "memo exceeds {} entries",
                    self.budget.max_entries
                )));
            }
            self.cache.insert(frame.key, outcome);
        }
        self.lookup(&root)
            .ok_or_else(|| Error::Inconsistent("root was not classified".into()))
    }

    /// Every legal move whose result is a P-position. Empty iff `pos` is P.
    pub fn winning_options(&self, pos: &Position) -> Result<Vec<Move>> {
        self.spec.check_position(pos)?;
        let mut out = Vec::new();
        for mv in self.spec.legal_moves(pos) {
            let child = self.spec.apply_move(pos, &mv)?;
            if self.classify(&child)? == Outcome::P {
                out.push(mv);
            }
        }
        Ok(out)
    }

    /// First winning move in legal-move order, if any.
    pub fn first_winning_move(&self, pos: &Position) -> Result<Option<Move>> {
        self.spec.check_position(pos)?;
        for mv in self.spec.legal_moves(pos) {
            let child = self.spec.apply_move(pos, &mv)?;
            if self.classify(&child)? == Outcome::P {
                return Ok(Some(mv));
            }
        }
        Ok(None)
    }

    /// All P-positions with every height `<= cap`, in lexicographic order.
    pub fn enumerate_p_positions(&self, cap: u64) -> Result<Vec<Position>> {
        Ok(self.solve_box(cap)?.p_positions())
    }

    /// Dense classification of the box `[0, cap]^n` using all rayon threads.
    pub fn solve_box(&self, cap: u64) -> Result<BoxTable> {
        self.solve_box_inner(cap)
    }

    /// Dense classification on a dedicated pool of `workers` threads.
    pub fn solve_box_with_workers(&self, cap: u64, workers: usize) -> Result<BoxTable> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
        pool.install(|| self.solve_box_inner(cap))
    }

    fn solve_box_inner(&self, cap: u64) -> Result<BoxTable> {
        let n = self.spec.n();
        if cap > self.spec.height_cap() {
            return Err(Error::Parameter(format!(
                "cap {cap} exceeds the spec's height cap {}",
                self.spec.height_cap()
            )));
        }
        let radix = cap + 1;
        let size = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(radix));
        let size = match size {
            Some(s) if s <= self.budget.max_entries as u64 => s as usize,
            _ => {
                return Err(Error::Resource(format!(
                    "box of {radix}^{n} positions exceeds {} entries",
                    self.budget.max_entries
                )))
            }
        };
        let mut strides = vec![1u64; n];
        for v in (0..n.saturating_sub(1)).rev() {
            strides[v] = strides[v + 1] * radix;
        }

        // bucket indices by total token count
        let max_sum = cap as usize * n;
        let mut layers: Vec<Vec<u32>> = vec![Vec::new(); max_sum + 1];
        let mut digits = vec![0u64; n];
        for idx in 0..size {
            let sum: u64 = digits.iter().sum();
            layers[sum as usize].push(idx as u32);
            for d in digits.iter_mut().rev() {
                if *d < cap {
                    *d += 1;
                    break;
                }
                *d = 0;
            }
        }

        let sets: Vec<Vec<usize>> = self
            .spec
            .move_sets()
            .iter()
            .map(|s| s.vertices().to_vec())
            .collect();
        let mut table = vec![Outcome::N; size];
        table[0] = Outcome::P;
        let examined = AtomicU64::new(0);
        for layer in layers.iter().skip(1) {
            let results: Vec<(u32, Outcome)> = layer
                .par_iter()
                .map_init(
                    || (vec![0u64; n], vec![0u64; n]),
                    |(digits, odo), &idx| {
                        decode(idx as u64, radix, digits);
                        let mut count = 0u64;
                        let found = has_p_option(
                            idx as u64, digits, &sets, &strides, &table, odo, &mut count,
                        );
                        examined.fetch_add(count, Ordering::Relaxed);
                        (idx, if found { Outcome::N } else { Outcome::P })
                    },
                )
                .collect();
            for (idx, o) in results {
                table[idx as usize] = o;
            }
            self.charge_options(examined.swap(0, Ordering::Relaxed))?;
        }
        Ok(BoxTable {
            n,
            cap,
            radix,
            strides,
            outcomes: table,
        })
    }

    /// Copies a dense table into the memo so later `classify` calls hit it.
    pub fn absorb(&self, table: &BoxTable) -> Result<()> {
        if table.n != self.spec.n() {
            return Err(Error::Domain("table belongs to a different spec".into()));
        }
        if self.cache.len() + table.len() > self.budget.max_entries {
            return Err(Error::Resource(format!(
                "memo exceeds {} entries",
                self.budget.max_entries
            )));
        }
        for (pos, o) in table.iter() {
            self.cache.insert(self.key(pos.heights()), o);
        }
        Ok(())
    }
}

fn decode(mut idx: u64, radix: u64, digits: &mut [u64]) {
    for d in digits.iter_mut().rev() {
        *d = idx % radix;
        idx /= radix;
    }
}

/// Whether some option of the position at `idx` is already marked P.
fn has_p_option(
    idx: u64,
    digits: &[u64],
    sets: &[Vec<usize>],
    strides: &[u64],
    table: &[Outcome],
    odo: &mut [u64],
    count: &mut u64,
) -> bool {
    for set in sets {
        let odo = &mut odo[..set.len()];
        odo.fill(0);
        let mut offset = 0u64;
        loop {
            let mut advanced = false;
            for (r, &v) in odo.iter_mut().zip(set) {
                if *r < digits[v] {
                    *r += 1;
                    offset += strides[v];
                    advanced = true;
                    break;
                }
                offset -= *r * strides[v];
                *r = 0;
            }
            if !advanced {
                break;
            }
            *count += 1;
            if table[(idx - offset) as usize] == Outcome::P {
                return true;
            }
        }
    }
    false
}

/// Outcomes of every position in `[0, cap]^n`, indexed lexicographically.
#[derive(Debug, Clone)]
pub struct BoxTable {
    n: usize,
    cap: u64,
    radix: u64,
    strides: Vec<u64>,
    outcomes: Vec<Outcome>,
}

impl BoxTable {
    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn index_of(&self, pos: &Position) -> Option<usize> {
        if pos.len() != self.n || pos.heights().iter().any(|&h| h > self.cap) {
            return None;
        }
        Some(
            pos.heights()
                .iter()
                .zip(&self.strides)
                .map(|(h, s)| h * s)
                .sum::<u64>() as usize,
        )
    }

    pub fn position_at(&self, idx: usize) -> Position {
        let mut digits = vec![0; self.n];
        decode(idx as u64, self.radix, &mut digits);
        Position::new(digits)
    }

    /// Outcome of a position inside the box.
    pub fn outcome(&self, pos: &Position) -> Option<Outcome> {
        self.index_of(pos).map(|i| self.outcomes[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Position, Outcome)> + '_ {
        self.outcomes
            .iter()
            .enumerate()
            .map(|(i, &o)| (self.position_at(i), o))
    }

    pub fn p_positions(&self) -> Vec<Position> {
        self.outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Outcome::P)
            .map(|(i, _)| self.position_at(i))
            .collect()
    }

    /// Writes `{"pos":[...],"outcome":"P"}` lines, optionally only P-positions.
    pub fn write_json_lines<W: Write>(&self, mut out: W, only_p: bool) -> io::Result<()> {
        for (pos, outcome) in self.iter() {
            if only_p && outcome != Outcome::P {
                continue;
            }
            let rec = SweepRecord {
                pos: pos.into_heights(),
                outcome,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
