//! Outcome-preserving reductions: zero, merge, subsume, anchor and invariance.
//!
//! Vertex labels inside [`ReductionStep`] are 1-based so a step serializes
//! exactly as the CLI prints it. Function arguments are 0-based like the
//! rest of the crate.

use serde::Serialize;

use crate::characterizations::anchor_heights;
use crate::error::{Error, Result};
use crate::position::Position;
use crate::spec::{Family, GameSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionKind {
    Zero,
    Merge,
    Subsume,
    Anchor,
    Invariance,
}

/// One step of a reduction pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub kind: ReductionKind,
    /// Deleted vertices (zero reduction).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub removed: Vec<usize>,
    /// Collapsed vertices (merge and anchor reduction).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub merged: Vec<usize>,
    /// `index_map[old - 1]` is the new label of `old`, or `None` if deleted.
    pub index_map: Vec<Option<usize>>,
    /// Move sets after the step.
    pub move_sets: Vec<Vec<usize>>,
    /// Position after the step, when one was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<u64>,
}

impl ReductionStep {
    fn new(kind: ReductionKind, index_map: Vec<Option<usize>>, spec: &GameSpec) -> Self {
        ReductionStep {
            kind,
            removed: Vec::new(),
            merged: Vec::new(),
            index_map,
            move_sets: spec.move_sets_one_based(),
            position: None,
            z: None,
            coefficient: None,
            sigma_min: None,
        }
    }

    /// Pushes a position forward through the step's vertex map.
    ///
    /// Merged heights add up; deleted vertices must be empty.
    pub fn map_position(&self, pos: &Position) -> Result<Position> {
        if pos.len() != self.index_map.len() {
            return Err(Error::Position(format!(
                "position has {} stacks, step expects {}",
                pos.len(),
                self.index_map.len()
            )));
        }
        let new_n = self.index_map.iter().flatten().max().copied().unwrap_or(0);
        let mut out = vec![0u64; new_n];
        for (old, target) in self.index_map.iter().enumerate() {
            match target {
                Some(new) => out[new - 1] += pos.get(old),
                None if pos.get(old) != 0 => {
                    return Err(Error::Domain(format!(
                        "stack {} is deleted but holds {}",
                        old + 1,
                        pos.get(old)
                    )))
                }
                None => {}
            }
        }
        Ok(Position::new(out))
    }
}

/// A reduced game and position together with the step that produced them.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub spec: GameSpec,
    pub position: Position,
    pub step: ReductionStep,
}

/// Images of the move sets under a vertex map, then maximal sets only.
fn image_spec(spec: &GameSpec, map: &[Option<usize>], new_n: usize) -> Result<GameSpec> {
    let sets: Vec<Vec<usize>> = spec
        .move_sets()
        .iter()
        .map(|s| s.vertices().iter().filter_map(|&v| map[v]).collect())
        .filter(|s: &Vec<usize>| !s.is_empty())
        .collect();
    Ok(GameSpec::from_raw(new_n, sets, Family::Generic)?
        .with_height_cap(spec.height_cap())
        .tagged())
}

/// Deletes every empty stack.
pub fn zero_reduce(spec: &GameSpec, pos: &Position) -> Result<Reduced> {
    let all: Vec<usize> = (0..spec.n()).collect();
    zero_reduce_subset(spec, pos, &all)
}

/// Deletes the empty stacks among `requested` (0-based).
pub fn zero_reduce_subset(spec: &GameSpec, pos: &Position, requested: &[usize]) -> Result<Reduced> {
    spec.check_position(pos)?;
    let n = spec.n();
    let mut drop = vec![false; n];
    for &v in requested {
        if v >= n {
            return Err(Error::Parameter(format!("vertex {} out of range 1..={n}", v + 1)));
        }
        drop[v] = pos.get(v) == 0;
    }
    if drop.iter().all(|&d| d) {
        return Err(Error::Domain(
            "zero reduction would delete every stack".into(),
        ));
    }
    let mut map = vec![None; n];
    let mut next = 0;
    for v in 0..n {
        if !drop[v] {
            map[v] = Some(next);
            next += 1;
        }
    }
    let reduced = image_spec(spec, &map, next)?;
    let heights = (0..n).filter(|&v| !drop[v]).map(|v| pos.get(v)).collect();
    let mut step = ReductionStep::new(
        ReductionKind::Zero,
        map.iter().map(|m| m.map(|x| x + 1)).collect(),
        &reduced,
    );
    step.removed = (0..n).filter(|&v| drop[v]).map(|v| v + 1).collect();
    let position = Position::new(heights);
    step.position = Some(position.heights().to_vec());
    Ok(Reduced {
        spec: reduced,
        position,
        step,
    })
}

/// Result of a merge: the reduced spec and the forward vertex map.
#[derive(Debug, Clone)]
pub struct Merge {
    pub spec: GameSpec,
    pub step: ReductionStep,
}

impl Merge {
    pub fn map(&self, pos: &Position) -> Result<Position> {
        self.step.map_position(pos)
    }
}

/// Collapses the vertices `c` (0-based) into one vertex placed at `min(c)`.
///
/// Every move set must contain all of `c` or none of it.
pub fn merge_reduce(spec: &GameSpec, c: &[usize]) -> Result<Merge> {
    let n = spec.n();
    let mut c = c.to_vec();
    c.sort_unstable();
    c.dedup();
    let Some(&first) = c.first() else {
        return Err(Error::Parameter("merge set is empty".into()));
    };
    if let Some(&v) = c.iter().find(|&&v| v >= n) {
        return Err(Error::Parameter(format!("vertex {} out of range 1..={n}", v + 1)));
    }
    for set in spec.move_sets() {
        let inside = c.iter().filter(|&&v| set.contains(v)).count();
        if inside != 0 && inside != c.len() {
            return Err(Error::Domain(format!(
                "move set {set} splits the merge set"
            )));
        }
    }
    let mut map = vec![None; n];
    let mut next = 0;
    for v in 0..n {
        if v == first || c.binary_search(&v).is_err() {
            map[v] = Some(next);
            next += 1;
        }
    }
    for &v in &c {
        map[v] = map[first];
    }
    let reduced = image_spec(spec, &map, next)?;
    let mut step = ReductionStep::new(
        ReductionKind::Merge,
        map.iter().map(|m| m.map(|x| x + 1)).collect(),
        &reduced,
    );
    step.merged = c.iter().map(|v| v + 1).collect();
    Ok(Merge {
        spec: reduced,
        step,
    })
}

/// Drops move sets contained in another (and duplicates). Labels pass through unchanged.
pub fn subsume(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let normalized: Vec<Vec<usize>> = sets
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for (i, s) in normalized.iter().enumerate() {
        let dominated = normalized.iter().enumerate().any(|(j, o)| {
            i != j && s.iter().all(|v| o.contains(v)) && (s != o || j < i)
        });
        if !dominated {
            kept.push(s.clone());
        }
    }
    kept
}

/// NN(n,n-l) with l < floor(n/2) to NN(2l+1,l+1): stacks l+1..n-l merge into the center.
pub fn anchor_reduce(spec: &GameSpec, pos: &Position) -> Result<Reduced> {
    let (n, k) = match spec.family() {
        Family::Necklace { n, k } | Family::Clasp { n, k, c: 2 } => (n, k),
        f => return Err(Error::Domain(format!("anchor reduction needs NN(n,k), got {f}"))),
    };
    let ell = n - k;
    if n < 4 || ell == 0 || ell >= n / 2 {
        return Err(Error::Domain(format!(
            "NN({n},{k}) is outside the anchor range 1 <= n-k < floor(n/2)"
        )));
    }
    spec.check_position(pos)?;
    let heights = anchor_heights(pos.heights(), ell)?;
    let reduced = GameSpec::build(Family::Necklace {
        n: 2 * ell + 1,
        k: ell + 1,
    })?
    .with_height_cap(spec.height_cap());
    let map: Vec<Option<usize>> = (0..n)
        .map(|v| {
            Some(if v < ell {
                v + 1
            } else if v < n - ell {
                ell + 1
            } else {
                v - (n - 2 * ell - 1) + 1
            })
        })
        .collect();
    let mut step = ReductionStep::new(ReductionKind::Anchor, map, &reduced);
    step.merged = (ell + 1..=n - ell).collect();
    step.position = Some(heights.clone());
    Ok(Reduced {
        spec: reduced,
        position: Position::new(heights),
        step,
    })
}

/// A 0/1 vector whose multiples leave S_l membership unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantVector {
    /// Subscript `i` of `z_i`.
    pub index: usize,
    pub bits: Vec<u8>,
}

impl InvariantVector {
    fn from_ones(index: usize, n: usize, ones: &[usize]) -> Self {
        let mut bits = vec![0; n];
        for &v in ones {
            bits[v] = 1;
        }
        InvariantVector { index, bits }
    }

    /// 0-based positions of the ones.
    pub fn ones(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

fn anchor_n(spec: &GameSpec) -> Result<usize> {
    match spec.family() {
        Family::Necklace { n, k } | Family::Clasp { n, k, c: 2 } if n >= 3 && k == n.div_ceil(2) => {
            Ok(n)
        }
        Family::Circular { n: n @ (3 | 4), k: 2 } => Ok(n),
        f => Err(Error::Domain(format!(
            "invariant vectors need NN(2l,l) or NN(2l+1,l+1), got {f}"
        ))),
    }
}

/// `z_2..z_l` with ones at `a_1, a_i, b_{i-1}, b_l`; odd n adds `z_{l+1}` on `a_1, c, b_l`.
pub fn invariant_vectors(spec: &GameSpec) -> Result<Vec<InvariantVector>> {
    let n = anchor_n(spec)?;
    Ok(invariant_vectors_for(n))
}

fn invariant_vectors_for(n: usize) -> Vec<InvariantVector> {
    let ell = n / 2;
    // b_j sits at 0-based index n - l + j - 1
    let b = |j: usize| n - ell + j - 1;
    let mut out: Vec<InvariantVector> = (2..=ell)
        .map(|i| InvariantVector::from_ones(i, n, &[0, i - 1, b(i - 1), b(ell)]))
        .collect();
    if n % 2 == 1 {
        out.push(InvariantVector::from_ones(ell + 1, n, &[0, ell, n - 1]));
    }
    out
}

/// Smallest stack among the ones of `z`.
pub fn indicator_min(z: &InvariantVector, pos: &Position) -> u64 {
    z.ones().into_iter().map(|v| pos.get(v)).min().unwrap_or(0)
}

/// `sum_{i=2..l} min(a_i, b_{i-1})`.
pub fn sigma_min(heights: &[u64]) -> u64 {
    let n = heights.len();
    let ell = n / 2;
    (2..=ell)
        .map(|i| heights[i - 1].min(heights[n - ell + i - 2]))
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReduction {
    pub position: Position,
    pub terms: Vec<(InvariantVector, u64)>,
    /// Only for even n.
    pub sigma_min: Option<u64>,
    pub steps: Vec<ReductionStep>,
}

/// Subtracts `im(z_i; p) * z_i` for each invariant vector in turn.
pub fn invariance_reduce(spec: &GameSpec, pos: &Position) -> Result<InvarianceReduction> {
    let n = anchor_n(spec)?;
    spec.check_position(pos)?;
    let sigma = (n % 2 == 0).then(|| sigma_min(pos.heights()));
    let identity: Vec<Option<usize>> = (1..=n).map(Some).collect();
    let mut current = pos.clone();
    let mut terms = Vec::new();
    let mut steps = Vec::new();
    for z in invariant_vectors_for(n) {
        let c = indicator_min(&z, &current);
        let mut heights = current.into_heights();
        for v in z.ones() {
            heights[v] -= c;
        }
        current = Position::new(heights);
        let mut step = ReductionStep::new(ReductionKind::Invariance, identity.clone(), spec);
        step.position = Some(current.heights().to_vec());
        step.z = Some(z.bits.clone());
        step.coefficient = Some(c);
        step.sigma_min = sigma;
        steps.push(step);
        terms.push((z, c));
    }
    Ok(InvarianceReduction {
        position: current,
        terms,
        sigma_min: sigma,
        steps,
    })
}

/// Zero reduction followed by merging vertices that lie in exactly the same move sets.
#[derive(Debug, Clone, Serialize)]
pub struct Pipeline {
    pub steps: Vec<ReductionStep>,
    #[serde(skip)]
    pub spec: GameSpec,
    pub position: Position,
    /// Family of the final move sets up to relabeling, with `order[new] = old` (1-based).
    pub identified: Option<(String, Vec<usize>)>,
}

pub fn reduce_pipeline(spec: &GameSpec, pos: &Position) -> Result<Pipeline> {
    let mut steps = Vec::new();
    let zero = zero_reduce(spec, pos)?;
    steps.push(zero.step);
    let mut spec = zero.spec;
    let mut position = zero.position;
    while let Some(class) = identical_class(&spec) {
        let merge = merge_reduce(&spec, &class)?;
        position = merge.map(&position)?;
        let mut step = merge.step;
        step.position = Some(position.heights().to_vec());
        steps.push(step);
        spec = merge.spec;
    }
    let identified = if spec.n() <= 9 {
        spec.identify_up_to_relabeling()
            .map(|(f, order)| (f.to_string(), order.iter().map(|v| v + 1).collect()))
    } else {
        spec.identify().map(|f| (f.to_string(), (1..=spec.n()).collect()))
    };
    Ok(Pipeline {
        steps,
        spec,
        position,
        identified,
    })
}

/// First class of at least two vertices sharing the same move-set membership.
fn identical_class(spec: &GameSpec) -> Option<Vec<usize>> {
    let signature = |v: usize| -> Vec<bool> {
        spec.move_sets().iter().map(|s| s.contains(v)).collect()
    };
    let sigs: Vec<Vec<bool>> = (0..spec.n()).map(signature).collect();
    (0..spec.n()).find_map(|v| {
        let class: Vec<usize> = (v..spec.n()).filter(|&u| sigs[u] == sigs[v]).collect();
        (class.len() > 1).then_some(class)
    })
}
