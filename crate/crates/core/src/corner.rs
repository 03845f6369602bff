//! Corner packings of large squares and dissection of the space they leave.
//!
//! A corner packing places squares one at a time so that a corner of each
//! new square coincides with a convex vertex of the uncovered region at that
//! moment. Placing a square this way adds at most two vertices to the
//! region, so after `k` squares it has at most `4 + 2k` vertices, and a
//! fixed sequence of `n` squares has at most `2^n (n+1)!` corner packings.

use std::collections::HashSet;

use thiserror::Error;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::geometry::{
    scan_grid_corners, uncovered_region, Bin, CellGrid, Corner, Packing, Placement, Point, Rect, RegionSet, Square,
};
use crate::oracle::{solve_exact, OracleError};
use crate::scalar::{common_denominator, Scalar};
use crate::schedule::ThresholdSchedule;
use crate::shelf::cut_to_shorter;

/// A partial corner packing with the convex vertices of its uncovered
/// region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerState {
    pub bin: Bin,
    pub placed: Vec<Placement>,
    corners: Vec<Corner>,
    vertices: usize,
}

impl CornerState {
    pub fn empty(bin: &Bin) -> Self {
        Self::from_placements(bin, Vec::new())
    }

    fn from_placements(bin: &Bin, placed: Vec<Placement>) -> Self {
        let rects: Vec<Rect> = placed.iter().map(Placement::rect).collect();
        let (corners, vertices) = CellGrid::new(&Rect::of_bin(bin), &rects).corner_scan();
        CornerState { bin: bin.clone(), placed, corners, vertices }
    }

    /// The uncovered region as polygons.
    pub fn region(&self) -> RegionSet {
        uncovered_region(&self.packing()).expect("corner states are feasible")
    }

    pub fn convex_vertices(&self) -> Vec<Corner> {
        self.corners.clone()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn packing(&self) -> Packing {
        Packing::new(self.bin.clone(), self.placed.clone())
    }

    pub fn covered_area(&self) -> Scalar {
        self.placed.iter().map(|p| p.square.area()).sum()
    }

    pub fn profit(&self) -> Scalar {
        self.placed.iter().map(|p| p.square.profit.clone()).sum()
    }

    /// `4 + 2k` bound on the region's vertex count.
    pub fn within_vertex_bound(&self) -> bool {
        self.vertices <= 4 + 2 * self.placed.len()
    }

    /// The state after anchoring `square` at `corner`, if it fits.
    pub fn place(&self, square: &Square, corner: &Corner) -> Option<CornerState> {
        let (x, y) = corner.anchor(&square.side);
        let new = Placement::new(square.clone(), x, y);
        let r = new.rect();
        if !Rect::of_bin(&self.bin).contains(&r) || self.placed.iter().any(|p| p.rect().overlaps(&r)) {
            return None;
        }
        let mut placed = self.placed.clone();
        placed.push(new);
        Some(Self::from_placements(&self.bin, placed))
    }

    /// Sorted placement encoding used for deduplication.
    fn key(&self) -> Vec<(String, Scalar, Scalar)> {
        self.packing().canonical_key()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CornerStats {
    /// Successful placements performed, before deduplication.
    pub raw_count: u64,
    /// Complete sequences (every item placed), before deduplication.
    pub raw_complete: u64,
    pub distinct_states: u64,
    /// States whose region exceeded `4 + 2k` vertices.
    pub vertex_violations: u64,
    pub max_vertices: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerEnumeration {
    pub states: Vec<CornerState>,
    pub stats: CornerStats,
}

/// `prod_{i=1..n} (4 + 2(i-1)) = 2^n (n+1)!`.
pub fn corner_sequence_bound(n: usize) -> u128 {
    (1..=n as u128).map(|i| 4 + 2 * (i - 1)).product()
}

/// Bound on placements made by [`corner_search`] on `n` items: every
/// ordered choice of `k` distinct items times the corner bound for `k`.
pub fn corner_search_bound(n: usize) -> u128 {
    let mut total = 0u128;
    let mut arrangements = 1u128;
    for k in 1..=n {
        arrangements *= (n - k + 1) as u128;
        total += arrangements * corner_sequence_bound(k);
    }
    total
}

fn record(stats: &mut CornerStats, state: &CornerState) {
    stats.max_vertices = stats.max_vertices.max(state.vertex_count());
    if !state.within_vertex_bound() {
        stats.vertex_violations += 1;
    }
}

/// Every corner packing of all of `items`, placed in the given order.
///
/// `raw_complete` counts complete sequences before deduplication; `states`
/// holds each distinct complete placement set once. Stops after `limit`
/// placements with `truncated` set.
pub fn corner_enumerate(items: &[Square], bin: &Bin, limit: u64) -> CornerEnumeration {
    let mut stats = CornerStats::default();
    let mut seen = HashSet::new();
    let mut states = Vec::new();
    let root = CornerState::empty(bin);
    record(&mut stats, &root);
    enumerate_in_order(items, &root, limit, &mut stats, &mut seen, &mut states);
    stats.distinct_states = states.len() as u64;
    CornerEnumeration { states, stats }
}

fn enumerate_in_order(
    items: &[Square],
    state: &CornerState,
    limit: u64,
    stats: &mut CornerStats,
    seen: &mut HashSet<Vec<(String, Scalar, Scalar)>>,
    out: &mut Vec<CornerState>,
) {
    let k = state.placed.len();
    if k == items.len() {
        stats.raw_complete += 1;
        if seen.insert(state.key()) {
            out.push(state.clone());
        }
        return;
    }
    for corner in state.convex_vertices() {
        if stats.raw_count >= limit {
            stats.truncated = true;
            return;
        }
        if let Some(next) = state.place(&items[k], &corner) {
            stats.raw_count += 1;
            record(stats, &next);
            enumerate_in_order(items, &next, limit, stats, seen, out);
        }
    }
}

/// Every distinct corner packing of every subset of `items`, in any order,
/// starting with the empty one. Packings that differ only by swapping
/// squares of equal side and profit count once. Stops once `limit` distinct
/// states exist.
pub fn corner_search(items: &[Square], bin: &Bin, limit: u64) -> CornerEnumeration {
    match IntFrame::new(items, bin) {
        Some(frame) => {
            let mut found = Vec::new();
            let stats = frame.search(limit, &mut |st| {
                found.push(frame.to_state(items, bin, st));
                true
            });
            CornerEnumeration { states: found, stats }
        }
        None => rational_search(items, bin, limit),
    }
}

/// [`corner_search`] in rational arithmetic, for inputs without a usable
/// integer lattice.
fn rational_search(items: &[Square], bin: &Bin, limit: u64) -> CornerEnumeration {
    let mut stats = CornerStats::default();
    let mut seen = HashSet::new();
    let root = CornerState::empty(bin);
    record(&mut stats, &root);
    seen.insert(Vec::new());
    let mut states = vec![root.clone()];
    search_all(items, &root, limit, &mut stats, &mut seen, &mut states);
    stats.distinct_states = states.len() as u64;
    CornerEnumeration { states, stats }
}

/// Largest lattice coordinate used by the integer search.
const MAX_LATTICE: i64 = 1 << 60;

/// Bin and sides as integers on the lattice `1/den`. Every corner packing
/// lives on this lattice since its coordinates are sums of sides.
struct IntFrame {
    den: Scalar,
    w: i64,
    h: i64,
    sides: Vec<i64>,
    /// Index of the first item with the same side and profit.
    kinds: Vec<usize>,
}

type IntCorner = (i64, i64, i8, i8);

#[derive(Clone)]
struct IntState {
    placed: Vec<(usize, i64, i64)>,
    corners: Vec<IntCorner>,
    vertices: usize,
}

impl IntFrame {
    fn new(items: &[Square], bin: &Bin) -> Option<Self> {
        let values = items.iter().map(|s| &s.side).chain([&bin.width, &bin.height]);
        let den = Scalar::from(common_denominator(values, &BigInt::from(MAX_LATTICE))?);
        let int = |v: &Scalar| -> Option<i64> { (v * &den).numer().to_i64().filter(|x| *x <= MAX_LATTICE) };
        let sides = items.iter().map(|s| int(&s.side)).collect::<Option<Vec<_>>>()?;
        let kinds = items
            .iter()
            .map(|s| items.iter().position(|t| t.side == s.side && t.profit == s.profit).expect("present"))
            .collect();
        Some(IntFrame { w: int(&bin.width)?, h: int(&bin.height)?, sides, kinds, den })
    }

    fn state(&self, placed: Vec<(usize, i64, i64)>) -> IntState {
        let mut xs = vec![0, self.w];
        let mut ys = vec![0, self.h];
        for &(i, x, y) in &placed {
            xs.extend([x, x + self.sides[i]]);
            ys.extend([y, y + self.sides[i]]);
        }
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();
        let mut free = vec![vec![true; ys.len() - 1]; xs.len() - 1];
        for &(i, x, y) in &placed {
            let s = self.sides[i];
            let (i0, i1) = (xs.binary_search(&x).unwrap(), xs.binary_search(&(x + s)).unwrap());
            let (j0, j1) = (ys.binary_search(&y).unwrap(), ys.binary_search(&(y + s)).unwrap());
            for col in &mut free[i0..i1] {
                col[j0..j1].fill(false);
            }
        }
        let (found, vertices) = scan_grid_corners(&free);
        let corners = found.into_iter().map(|(i, j, dx, dy)| (xs[i], ys[j], dx, dy)).collect();
        IntState { placed, corners, vertices }
    }

    fn place(&self, state: &IntState, item: usize, corner: &IntCorner) -> Option<(i64, i64)> {
        let s = self.sides[item];
        let &(cx, cy, dx, dy) = corner;
        let x = if dx > 0 { cx } else { cx - s };
        let y = if dy > 0 { cy } else { cy - s };
        if x < 0 || y < 0 || x + s > self.w || y + s > self.h {
            return None;
        }
        let clash = state.placed.iter().any(|&(j, px, py)| {
            let t = self.sides[j];
            x < px + t && px < x + s && y < py + t && py < y + s
        });
        (!clash).then_some((x, y))
    }

    fn key(&self, placed: &[(usize, i64, i64)]) -> Vec<(usize, i64, i64)> {
        let mut key: Vec<_> = placed.iter().map(|&(i, x, y)| (self.kinds[i], x, y)).collect();
        key.sort_unstable();
        key
    }

    fn to_state(&self, items: &[Square], bin: &Bin, st: &IntState) -> CornerState {
        let sc = |v: i64| Scalar::from_int(v) / &self.den;
        CornerState {
            bin: bin.clone(),
            placed: st.placed.iter().map(|&(i, x, y)| Placement::new(items[i].clone(), sc(x), sc(y))).collect(),
            corners: st
                .corners
                .iter()
                .map(|&(x, y, dx, dy)| Corner { point: Point { x: sc(x), y: sc(y) }, dx, dy })
                .collect(),
            vertices: st.vertices,
        }
    }

    /// Calls `visit` on every distinct state, the empty one first. States
    /// for which `visit` returns false are not extended.
    fn search(&self, limit: u64, visit: &mut dyn FnMut(&IntState) -> bool) -> CornerStats {
        let mut stats = CornerStats::default();
        let mut seen = HashSet::new();
        let root = self.state(Vec::new());
        seen.insert(Vec::new());
        if self.note(&root, &mut stats, visit) {
            self.recurse(&root, limit, &mut stats, &mut seen, visit);
        }
        stats.distinct_states = seen.len() as u64;
        stats
    }

    fn note(&self, st: &IntState, stats: &mut CornerStats, visit: &mut dyn FnMut(&IntState) -> bool) -> bool {
        stats.max_vertices = stats.max_vertices.max(st.vertices);
        if st.vertices > 4 + 2 * st.placed.len() {
            stats.vertex_violations += 1;
        }
        visit(st)
    }

    fn recurse(
        &self,
        state: &IntState,
        limit: u64,
        stats: &mut CornerStats,
        seen: &mut HashSet<Vec<(usize, i64, i64)>>,
        visit: &mut dyn FnMut(&IntState) -> bool,
    ) {
        let n = self.sides.len();
        let mut used = vec![false; n];
        for &(i, _, _) in &state.placed {
            used[i] = true;
        }
        let mut tried = vec![false; n];
        for item in 0..n {
            // squares with equal side and profit are interchangeable
            if used[item] || tried[self.kinds[item]] {
                continue;
            }
            tried[self.kinds[item]] = true;
            for corner in &state.corners {
                if seen.len() as u64 >= limit {
                    stats.truncated = true;
                    return;
                }
                let Some((x, y)) = self.place(state, item, corner) else { continue };
                let mut placed = state.placed.clone();
                placed.push((item, x, y));
                if !seen.insert(self.key(&placed)) {
                    continue;
                }
                stats.raw_count += 1;
                if placed.len() == n {
                    stats.raw_complete += 1;
                }
                let next = self.state(placed);
                if self.note(&next, stats, visit) {
                    self.recurse(&next, limit, stats, seen, visit);
                }
            }
        }
    }
}

/// The most profitable state [`corner_search`] reaches (the first one among
/// equals), without materializing the others. States whose fractional
/// knapsack bound over the free area cannot beat the best so far are not
/// extended.
pub(crate) fn corner_search_best(items: &[Square], bin: &Bin, limit: u64) -> (CornerState, CornerStats) {
    // dense squares first, so that a good incumbent appears early
    let mut sorted = items.to_vec();
    sorted.sort_by_key(|s| std::cmp::Reverse(s.density()));
    let items = &sorted[..];
    let Some(frame) = IntFrame::new(items, bin) else {
        let e = rational_search(items, bin, limit);
        let mut best = 0;
        for (i, s) in e.states.iter().enumerate() {
            if s.profit() > e.states[best].profit() {
                best = i;
            }
        }
        return (e.states[best].clone(), e.stats);
    };
    let mut by_density: Vec<usize> = (0..items.len()).collect();
    by_density.sort_by(|&a, &b| items[b].density().cmp(&items[a].density()));
    let bin_area = i128::from(frame.w) * i128::from(frame.h);
    let mut best: Option<(Scalar, IntState)> = None;
    let stats = frame.search(limit, &mut |st| {
        let profit: Scalar = st.placed.iter().map(|&(i, _, _)| &items[i].profit).sum();
        if best.as_ref().is_none_or(|(b, _)| profit > *b) {
            best = Some((profit.clone(), st.clone()));
        }
        let mut used = vec![false; items.len()];
        let mut free = bin_area;
        for &(i, _, _) in &st.placed {
            used[i] = true;
            free -= i128::from(frame.sides[i]).pow(2);
        }
        let mut bound = profit;
        for &i in by_density.iter().filter(|&&i| !used[i]) {
            let area = i128::from(frame.sides[i]).pow(2);
            if area <= free {
                free -= area;
                bound += &items[i].profit;
            } else {
                let frac = Scalar::from(BigInt::from(free)) / Scalar::from(BigInt::from(area));
                bound += &items[i].profit * frac;
                break;
            }
        }
        bound > best.as_ref().expect("set above").0
    });
    let (_, st) = best.expect("the empty state is visited");
    (frame.to_state(items, bin, &st), stats)
}

fn search_all(
    items: &[Square],
    state: &CornerState,
    limit: u64,
    stats: &mut CornerStats,
    seen: &mut HashSet<Vec<TypeKey>>,
    out: &mut Vec<CornerState>,
) {
    let used: HashSet<&str> = state.placed.iter().map(|p| p.square.id.as_str()).collect();
    let corners = state.convex_vertices();
    let mut tried: HashSet<(&Scalar, &Scalar)> = HashSet::new();
    for item in items.iter().filter(|s| !used.contains(s.id.as_str())) {
        // squares with equal side and profit are interchangeable
        if !tried.insert((&item.side, &item.profit)) {
            continue;
        }
        for corner in &corners {
            if out.len() as u64 >= limit {
                stats.truncated = true;
                return;
            }
            let (x, y) = corner.anchor(&item.side);
            let mut key = type_key(&state.placed);
            key.push((item.side.clone(), item.profit.clone(), x, y));
            key.sort();
            if seen.contains(&key) {
                continue;
            }
            let Some(next) = state.place(item, corner) else { continue };
            stats.raw_count += 1;
            if next.placed.len() == items.len() {
                stats.raw_complete += 1;
            }
            seen.insert(key);
            record(stats, &next);
            out.push(next.clone());
            search_all(items, &next, limit, stats, seen, out);
        }
    }
}

type TypeKey = (Scalar, Scalar, Scalar, Scalar);

/// Placement encoding that ignores ids: side, profit and position.
fn type_key(placed: &[Placement]) -> Vec<TypeKey> {
    let mut key: Vec<TypeKey> = placed
        .iter()
        .map(|p| (p.square.side.clone(), p.square.profit.clone(), p.x.clone(), p.y.clone()))
        .collect();
    key.sort();
    key
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DissectError {
    #[error("dissection handles at most 4 placed squares, got {0}")]
    TooManySquares(usize),
    #[error("placed squares cover {covered}, below the required {required}")]
    NotNearFull { covered: Scalar, required: Scalar },
    #[error("threshold for class {0} cannot be materialized")]
    Threshold(usize),
    #[error("block {width} x {height} is too small to keep and too large to drop")]
    UnclassifiableBlock { width: Scalar, height: Scalar },
}

/// Rectangular pieces of the uncovered region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSet {
    pub blocks: Vec<Rect>,
    pub dropped: Vec<Rect>,
}

impl BlockSet {
    pub fn bins(&self) -> Vec<Bin> {
        self.blocks.iter().map(Rect::as_bin).collect()
    }

    pub fn area(&self) -> Scalar {
        self.blocks.iter().chain(&self.dropped).map(Rect::area).sum()
    }
}

/// Cuts the uncovered region into rectangles, extending a cut from every
/// reflex vertex parallel to the longer side of the bin.
///
/// A square bin has no longer side; both directions are tried and the one
/// leaving more area in blocks at least `useful_side` thick wins (vertical on
/// ties).
pub fn partition_blocks(state: &CornerState, useful_side: &Scalar) -> Vec<Rect> {
    let rects: Vec<Rect> = state.placed.iter().map(Placement::rect).collect();
    let grid = CellGrid::new(&Rect::of_bin(&state.bin), &rects);
    if state.bin.height != state.bin.width {
        return grid.blocks(state.bin.height > state.bin.width);
    }
    let vertical = grid.blocks(true);
    let horizontal = grid.blocks(false);
    let useful = |blocks: &[Rect]| -> Scalar {
        blocks.iter().filter(|r| r.min_side() >= *useful_side).map(Rect::area).sum()
    };
    if useful(&horizontal) > useful(&vertical) {
        horizontal
    } else {
        vertical
    }
}

/// Dissection of a near-full corner packing of at most four large squares,
/// with class `drop_index` of `schedule` dropped.
///
/// A block is kept when its longer side is at least `delta`, the smallest
/// large side; any other block must be a sliver with shorter side at most
/// `delta^2` and is dropped.
pub fn dissect(state: &CornerState, schedule: &ThresholdSchedule, drop_index: usize) -> Result<BlockSet, DissectError> {
    if state.placed.len() > 4 {
        return Err(DissectError::TooManySquares(state.placed.len()));
    }
    let slack = schedule.rest_area_slack(drop_index).ok_or(DissectError::Threshold(drop_index))?;
    let delta = schedule.large_min_side(drop_index).ok_or(DissectError::Threshold(drop_index))?;
    let required = state.bin.area() - slack;
    let covered = state.covered_area();
    if covered < required {
        return Err(DissectError::NotNearFull { covered, required });
    }
    let small = schedule.small_max_side(drop_index).ok_or(DissectError::Threshold(drop_index))?;
    let sliver = delta.square();
    let mut blocks = Vec::new();
    let mut dropped = Vec::new();
    for r in partition_blocks(state, &small) {
        if r.max_side() >= delta {
            blocks.push(r);
        } else if r.min_side() <= sliver {
            dropped.push(r);
        } else {
            return Err(DissectError::UnclassifiableBlock { width: r.width(), height: r.height() });
        }
    }
    Ok(BlockSet { blocks, dropped })
}

/// Optima of `items` in a block and in the block stretched by `2 sigma`
/// along its height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceCheck {
    pub opt_wide: Scalar,
    pub opt_narrow: Scalar,
    /// Profit the cutting transform keeps when applied to the wide optimum.
    pub cut_profit: Scalar,
    pub holds: bool,
}

/// Checks `OPT(block) >= (1 - 4 sigma) OPT(stretched block)` for squares of
/// side at most `sigma`, where the block has height 1 and the stretched
/// block height `1 + 2 sigma`. `sigma` must be at most 1/4.
pub fn expand_and_cut_equivalence(
    width: &Scalar,
    items: &[Square],
    sigma: &Scalar,
    budget: u64,
) -> Result<EquivalenceCheck, OracleError> {
    let narrow = Bin { width: width.clone(), height: Scalar::one() };
    let wide = Bin {
        width: width.clone(),
        height: Scalar::one() + Scalar::from_int(2) * sigma,
    };
    let opt_wide = solve_exact(items, &wide, budget)?;
    let opt_narrow = solve_exact(items, &narrow, budget)?;
    let cut_profit = cut_to_shorter(&opt_wide.witness, &Scalar::one(), sigma)
        .map(|c| c.packing.profit())
        .unwrap_or_else(|_| Scalar::zero());
    let bound = (Scalar::one() - Scalar::from_int(4) * sigma) * &opt_wide.optimal_profit;
    Ok(EquivalenceCheck {
        holds: opt_narrow.optimal_profit >= bound,
        opt_wide: opt_wide.optimal_profit,
        opt_narrow: opt_narrow.optimal_profit,
        cut_profit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn sq(id: &str, side: &str) -> Square {
        Square::new(id, q(side), Scalar::one()).unwrap()
    }

    #[test]
    fn empty_enumeration_has_one_state() {
        let e = corner_enumerate(&[], &Bin::unit(), 1000);
        assert_eq!(e.states.len(), 1);
        assert_eq!(e.stats.raw_complete, 1);
        assert_eq!(e.states[0].vertex_count(), 4);
    }

    #[test]
    fn one_half_square_has_four_corner_packings() {
        let e = corner_enumerate(&[sq("a", "0.5")], &Bin::unit(), 1000);
        assert_eq!(e.stats.raw_complete, 4);
        assert_eq!(e.states.len(), 4);
        for s in &e.states {
            assert_eq!(s.vertex_count(), 6);
        }
    }

    #[test]
    fn two_squares_stay_within_the_sequence_bound() {
        let e = corner_enumerate(&[sq("a", "0.5"), sq("b", "0.4")], &Bin::unit(), 10_000);
        assert!(e.stats.raw_complete as u128 <= corner_sequence_bound(2));
        assert_eq!(corner_sequence_bound(2), 24);
        assert_eq!(e.stats.vertex_violations, 0);
    }

    #[test]
    fn bounds() {
        assert_eq!(corner_sequence_bound(0), 1);
        assert_eq!(corner_sequence_bound(3), 4 * 6 * 8);
        assert_eq!(corner_search_bound(1), 4);
        assert_eq!(corner_search_bound(2), 2 * 4 + 2 * 24);
    }

    #[test]
    fn search_covers_subsets() {
        let mut b = sq("b", "0.6");
        b.profit = q("2");
        let e = corner_search(&[sq("a", "0.6"), b], &Bin::unit(), 1000);
        // empty + four placements of each square; the two never fit together
        assert_eq!(e.states.len(), 9);
        assert!(!e.stats.truncated);
        // interchangeable squares count once
        let e = corner_search(&[sq("a", "0.6"), sq("b", "0.6")], &Bin::unit(), 1000);
        assert_eq!(e.states.len(), 5);
    }

    #[test]
    fn corner_l_dissects_into_two_blocks() {
        let schedule = ThresholdSchedule::scaled(q("1/8"), q("1/4"), 3).unwrap();
        let root = CornerState::empty(&Bin::unit());
        let corner = root.convex_vertices()[0].clone();
        let state = root.place(&sq("a", "0.9"), &corner).unwrap();
        let blocks = dissect(&state, &schedule, 2).unwrap();
        assert_eq!(blocks.blocks.len(), 2);
        assert!(blocks.dropped.is_empty());
        assert_eq!(blocks.area(), state.region().area);
    }

    #[test]
    fn dissect_requires_near_full_bin() {
        let schedule = ThresholdSchedule::scaled(q("1/8"), q("1/4"), 3).unwrap();
        let root = CornerState::empty(&Bin::unit());
        let corner = root.convex_vertices()[0].clone();
        let state = root.place(&sq("a", "0.5"), &corner).unwrap();
        assert!(matches!(dissect(&state, &schedule, 2), Err(DissectError::NotNearFull { .. })));
    }

    #[test]
    fn four_squares_leave_thin_blocks() {
        let schedule = ThresholdSchedule::scaled(q("1/8"), q("1/4"), 3).unwrap();
        let bin = Bin::unit();
        let pl = |id: &str, side: &str, x: &str, y: &str| Placement::new(sq(id, side), q(x), q(y));
        let placed = vec![
            pl("s1", "0.5", "0", "0"),
            pl("s2", "0.5", "0", "0.5"),
            pl("s3", "0.49", "0.51", "0"),
            pl("s4", "0.49", "0.51", "0.51"),
        ];
        let state = CornerState::from_placements(&bin, placed);
        assert!(state.packing().is_feasible());
        let blocks = dissect(&state, &schedule, 2).unwrap();
        assert_eq!(blocks.area(), state.region().area);
        let sides: Vec<(Scalar, Scalar)> = blocks.blocks.iter().map(|b| (b.width(), b.height())).collect();
        // horizontal cuts keep the full-width 0.02 strip in one piece
        assert_eq!(sides, vec![(q("0.01"), q("0.49")), (q("0.5"), q("0.02")), (q("0.01"), q("0.49"))]);
        assert!(blocks.dropped.is_empty());
    }

    #[test]
    fn expansion_check_on_small_items() {
        let items: Vec<Square> = (0..4).map(|i| sq(&format!("s{i}"), "1/4")).collect();
        let check = expand_and_cut_equivalence(&q("1/2"), &items, &q("1/4"), 1_000_000).unwrap();
        assert!(check.holds);
        assert_eq!(check.opt_narrow, q("4"));
        let none = expand_and_cut_equivalence(&q("1"), &[], &q("1/8"), 10).unwrap();
        assert!(none.holds);
    }

    #[test]
    fn corner_scan_agrees_with_traced_polygons() {
        let items = [sq("a", "0.5"), sq("b", "0.3"), sq("c", "0.25"), sq("d", "1/8")];
        let e = corner_search(&items, &Bin::new(q("1"), q("3/2")).unwrap(), 3000);
        assert!(e.states.len() > 100);
        for s in &e.states {
            let region = s.region();
            assert_eq!(s.convex_vertices(), region.convex_corners());
            assert_eq!(s.vertex_count(), region.vertex_count());
        }
    }

    #[test]
    fn lattice_and_rational_searches_agree() {
        let items = [sq("a", "0.5"), sq("b", "0.3"), sq("c", "0.3"), sq("d", "1/8")];
        let bin = Bin::new(q("1"), q("3/2")).unwrap();
        let fast = corner_search(&items, &bin, 100_000);
        let slow = rational_search(&items, &bin, 100_000);
        assert_eq!(fast.states, slow.states);
        assert_eq!(fast.stats, slow.stats);
    }
}
