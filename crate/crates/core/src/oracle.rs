//! Exhaustive optimal solver for small instances.
//!
//! Subsets are tried in order of decreasing profit; the first one that
//! packs is optimal. Feasibility of a subset is decided by a depth-first
//! search over normal positions: in any feasible packing every square can be
//! slid left and down until it touches the boundary, an obstacle or another
//! square, so each coordinate is either a container edge, an obstacle edge or
//! the far edge of another square. In such a packing the square that blocks
//! another one on the left or below has a strictly smaller `x + y + side`,
//! so placing squares in non-decreasing order of that key only ever needs the
//! edges of squares already placed.
//!
//! Coordinates are mapped onto an integer lattice first, so the search itself
//! runs on machine integers.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::corner::{corner_search_best, corner_search_bound};
use crate::geometry::{Bin, Packing, Placement, Rect, Square};
use crate::scalar::{common_denominator, Scalar};
use crate::shelf::greedy_append;

/// Largest instance the oracle accepts.
pub const MAX_ITEMS: usize = 16;
/// Default node budget per instance.
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Largest instance [`solve_exact_corner`] accepts.
pub const MAX_CORNER_ITEMS: usize = 8;

const MAX_COORD: i64 = 1 << 60;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the oracle handles at most {max} items, got {n}")]
    TooManyItems { n: usize, max: usize },
    #[error("node budget must be positive")]
    ZeroBudget,
    #[error("coordinates do not fit on a machine-integer lattice")]
    LatticeTooFine,
    #[error("the region has no container")]
    EmptyRegion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    /// `optimal_profit` is the optimum.
    Complete,
    /// The budget ran out; `optimal_profit` is only a lower bound.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// The optimum when complete, otherwise the best profit found.
    pub optimal_profit: Scalar,
    pub witness: Packing,
    pub nodes_explored: u64,
    pub status: OracleStatus,
}

impl OracleResult {
    pub fn is_complete(&self) -> bool {
        self.status == OracleStatus::Complete
    }
}

/// Free space for the oracle: the union of `containers` minus `obstacles`.
/// Every square must lie inside a single container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRegion {
    pub containers: Vec<Rect>,
    pub obstacles: Vec<Rect>,
}

impl OracleRegion {
    pub fn bin(bin: &Bin) -> Self {
        OracleRegion { containers: vec![Rect::of_bin(bin)], obstacles: Vec::new() }
    }

    /// The bin with the given rectangles already occupied.
    pub fn with_obstacles(bin: &Bin, obstacles: Vec<Rect>) -> Self {
        OracleRegion { containers: vec![Rect::of_bin(bin)], obstacles }
    }

    pub fn blocks(blocks: Vec<Rect>) -> Self {
        OracleRegion { containers: blocks, obstacles: Vec::new() }
    }

    /// Smallest bin anchored at the origin holding every container.
    fn bounding_bin(&self) -> Option<Bin> {
        let w = self.containers.iter().map(|r| r.x1.clone()).max()?;
        let h = self.containers.iter().map(|r| r.y1.clone()).max()?;
        Bin::new(w, h).ok()
    }
}

/// Optimal packing of a subset of `items` into `bin`.
pub fn solve_exact(items: &[Square], bin: &Bin, budget: u64) -> Result<OracleResult, OracleError> {
    solve_exact_in(items, &OracleRegion::bin(bin), budget)
}

/// Optimal packing of a subset of `items` into the free space of `region`.
pub fn solve_exact_in(items: &[Square], region: &OracleRegion, budget: u64) -> Result<OracleResult, OracleError> {
    if items.len() > MAX_ITEMS {
        return Err(OracleError::TooManyItems { n: items.len(), max: MAX_ITEMS });
    }
    if budget == 0 {
        return Err(OracleError::ZeroBudget);
    }
    let bin = region.bounding_bin().ok_or(OracleError::EmptyRegion)?;
    let lattice = Lattice::new(items, region)?;
    let mut search = Search {
        lattice: &lattice,
        budget,
        nodes: 0,
        cache: HashMap::new(),
        infeasible: Vec::new(),
    };

    let n = items.len();
    let free_area = lattice.free_area();
    let mut subsets: Vec<(Scalar, u32)> = (0u32..(1u32 << n))
        .map(|mask| (mask_profit(items, mask), mask))
        .collect();
    subsets.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| cmp_index_lists(a.1, b.1)));

    for (profit, mask) in subsets {
        if search.known_infeasible(mask) || lattice.area(mask) > free_area || !lattice.each_fits(mask) {
            continue;
        }
        match search.feasible(mask) {
            Ok(Some(positions)) => {
                let witness = lattice.witness(items, &bin, mask, &positions);
                return Ok(OracleResult {
                    optimal_profit: profit,
                    witness,
                    nodes_explored: search.nodes,
                    status: OracleStatus::Complete,
                });
            }
            Ok(None) => {}
            Err(Exhausted) => {
                let witness = fallback_witness(items, region, &bin, &lattice);
                return Ok(OracleResult {
                    optimal_profit: witness.profit(),
                    witness,
                    nodes_explored: search.nodes,
                    status: OracleStatus::Incomplete,
                });
            }
        }
    }
    unreachable!("the empty subset is always feasible")
}

/// Optimum over corner packings only. Every distinct corner packing of
/// every subset is visited once; `nodes_explored` counts the placements
/// that produced a new packing and never exceeds [`corner_search_bound`].
/// More than `limit` distinct packings make the result incomplete.
pub fn solve_exact_corner(items: &[Square], bin: &Bin, limit: u64) -> Result<OracleResult, OracleError> {
    if items.len() > MAX_CORNER_ITEMS {
        return Err(OracleError::TooManyItems { n: items.len(), max: MAX_CORNER_ITEMS });
    }
    if limit == 0 {
        return Err(OracleError::ZeroBudget);
    }
    let (best, stats) = corner_search_best(items, bin, limit);
    debug_assert!(stats.raw_count as u128 <= corner_search_bound(items.len()));
    let mut placements = best.placed.clone();
    placements.sort_by(|a, b| a.square.id.cmp(&b.square.id));
    Ok(OracleResult {
        optimal_profit: best.profit(),
        witness: Packing::new(bin.clone(), placements),
        nodes_explored: stats.raw_count,
        status: if stats.truncated { OracleStatus::Incomplete } else { OracleStatus::Complete },
    })
}

fn mask_profit(items: &[Square], mask: u32) -> Scalar {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, s)| s.profit.clone())
        .sum()
}

/// Compares two subsets as ascending index lists, lexicographically.
fn cmp_index_lists(a: u32, b: u32) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
        if ia != ib {
            return ia.cmp(&ib);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

/// Best packing found without the exhaustive search: the density greedy on
/// an obstacle-free region, or else the most profitable single square that
/// has room somewhere.
fn fallback_witness(items: &[Square], region: &OracleRegion, bin: &Bin, lattice: &Lattice) -> Packing {
    let mut best = Packing::empty(bin.clone());
    if region.obstacles.is_empty() {
        for c in &region.containers {
            let g = greedy_append(items, &[c.as_bin()], &Scalar::zero());
            let packing = g.packings.into_iter().next().expect("one bin");
            if packing.profit() > best.profit() {
                let moved = packing.placements.iter().map(|p| p.translated(&c.x0, &c.y0)).collect();
                best = Packing::new(bin.clone(), moved);
            }
        }
    }
    for (i, item) in items.iter().enumerate() {
        if item.profit <= best.profit() {
            continue;
        }
        let mut single = Search {
            lattice,
            budget: u64::MAX,
            nodes: 0,
            cache: HashMap::new(),
            infeasible: Vec::new(),
        };
        if let Ok(Some(pos)) = single.feasible(1 << i) {
            best = lattice.witness(items, bin, 1 << i, &pos);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct IRect {
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
}

impl IRect {
    fn overlaps(&self, x: i64, y: i64, s: i64) -> bool {
        x < self.x1 && self.x0 < x + s && y < self.y1 && self.y0 < y + s
    }

    fn holds(&self, x: i64, y: i64, s: i64) -> bool {
        self.x0 <= x && x + s <= self.x1 && self.y0 <= y && y + s <= self.y1
    }
}

struct Lattice {
    scale: Scalar,
    sides: Vec<i64>,
    containers: Vec<IRect>,
    obstacles: Vec<IRect>,
}

fn to_lattice(v: &Scalar, scale: &Scalar) -> Result<i64, OracleError> {
    let scaled = v * scale;
    let n: &BigInt = scaled.numer();
    match n.to_i64() {
        Some(x) if x.abs() <= MAX_COORD => Ok(x),
        _ => Err(OracleError::LatticeTooFine),
    }
}

impl Lattice {
    fn new(items: &[Square], region: &OracleRegion) -> Result<Self, OracleError> {
        let mut values: Vec<&Scalar> = items.iter().map(|s| &s.side).collect();
        for r in region.containers.iter().chain(&region.obstacles) {
            values.extend([&r.x0, &r.y0, &r.x1, &r.y1]);
        }
        let den = common_denominator(values, &BigInt::from(MAX_COORD)).ok_or(OracleError::LatticeTooFine)?;
        let scale = Scalar::from(den);
        let rect = |r: &Rect| -> Result<IRect, OracleError> {
            Ok(IRect {
                x0: to_lattice(&r.x0, &scale)?,
                y0: to_lattice(&r.y0, &scale)?,
                x1: to_lattice(&r.x1, &scale)?,
                y1: to_lattice(&r.y1, &scale)?,
            })
        };
        let sides = items.iter().map(|s| to_lattice(&s.side, &scale)).collect::<Result<_, _>>()?;
        let containers = region.containers.iter().map(rect).collect::<Result<_, _>>()?;
        let obstacles = region.obstacles.iter().map(rect).collect::<Result<_, _>>()?;
        Ok(Lattice { scale, sides, containers, obstacles })
    }

    fn area(&self, mask: u32) -> i128 {
        (0..self.sides.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.sides[i] as i128 * self.sides[i] as i128)
            .sum()
    }

    /// Area of the union of containers minus the obstacles.
    fn free_area(&self) -> i128 {
        let mut xs: Vec<i64> = Vec::new();
        let mut ys: Vec<i64> = Vec::new();
        for r in self.containers.iter().chain(&self.obstacles) {
            xs.extend([r.x0, r.x1]);
            ys.extend([r.y0, r.y1]);
        }
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();
        let mut total = 0i128;
        for wx in xs.windows(2) {
            for wy in ys.windows(2) {
                let inside = |r: &IRect| r.x0 <= wx[0] && wx[1] <= r.x1 && r.y0 <= wy[0] && wy[1] <= r.y1;
                if self.containers.iter().any(inside) && !self.obstacles.iter().any(inside) {
                    total += (wx[1] - wx[0]) as i128 * (wy[1] - wy[0]) as i128;
                }
            }
        }
        total
    }

    fn each_fits(&self, mask: u32) -> bool {
        (0..self.sides.len()).filter(|i| mask >> i & 1 == 1).all(|i| {
            let s = self.sides[i];
            self.containers.iter().any(|c| c.x1 - c.x0 >= s && c.y1 - c.y0 >= s)
        })
    }

    fn witness(&self, items: &[Square], bin: &Bin, mask: u32, positions: &[(usize, i64, i64)]) -> Packing {
        let mut placements: Vec<(usize, Placement)> = positions
            .iter()
            .map(|&(i, x, y)| {
                let sx = Scalar::from_int(x) / &self.scale;
                let sy = Scalar::from_int(y) / &self.scale;
                (i, Placement::new(items[i].clone(), sx, sy))
            })
            .collect();
        debug_assert_eq!(placements.len(), mask.count_ones() as usize);
        placements.sort_by_key(|(i, _)| *i);
        Packing::new(bin.clone(), placements.into_iter().map(|(_, p)| p).collect())
    }
}

struct Exhausted;

struct Search<'a> {
    lattice: &'a Lattice,
    budget: u64,
    nodes: u64,
    cache: HashMap<u32, bool>,
    /// Subsets proven not to pack; every superset is skipped.
    infeasible: Vec<u32>,
}

impl Search<'_> {
    fn known_infeasible(&self, mask: u32) -> bool {
        self.infeasible.iter().any(|&m| mask & m == m)
    }

    /// Positions for every item of `mask`, or `None` if they cannot all be
    /// packed. Before the full search, the subsets formed by the largest
    /// few squares are checked, since they are cheap to refute.
    fn feasible(&mut self, mask: u32) -> Result<Option<Vec<(usize, i64, i64)>>, Exhausted> {
        let mut order: Vec<usize> = (0..self.lattice.sides.len()).filter(|i| mask >> i & 1 == 1).collect();
        order.sort_by(|&a, &b| self.lattice.sides[b].cmp(&self.lattice.sides[a]).then(a.cmp(&b)));
        let mut prefix = 0u32;
        for &i in order.iter().take(order.len().saturating_sub(1)) {
            prefix |= 1 << i;
            if prefix.count_ones() < 2 {
                continue;
            }
            if self.decide(prefix)?.is_none() {
                return Ok(None);
            }
        }
        self.decide(mask)
    }

    fn decide(&mut self, mask: u32) -> Result<Option<Vec<(usize, i64, i64)>>, Exhausted> {
        if self.cache.get(&mask) == Some(&false) || self.known_infeasible(mask) {
            return Ok(None);
        }
        let mut placed = Vec::new();
        let found = self.dfs(mask, &mut placed, (i64::MIN, 0))?;
        self.cache.insert(mask, found);
        if found {
            Ok(Some(placed))
        } else {
            self.infeasible.push(mask);
            Ok(None)
        }
    }

    fn dfs(&mut self, remaining: u32, placed: &mut Vec<(usize, i64, i64)>, last: (i64, usize)) -> Result<bool, Exhausted> {
        if remaining == 0 {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Exhausted);
        }
        let lat = self.lattice;
        let mut xs: Vec<i64> = Vec::new();
        let mut ys: Vec<i64> = Vec::new();
        for c in &lat.containers {
            xs.push(c.x0);
            ys.push(c.y0);
        }
        for o in &lat.obstacles {
            xs.push(o.x1);
            ys.push(o.y1);
        }
        for &(i, x, y) in placed.iter() {
            xs.push(x + lat.sides[i]);
            ys.push(y + lat.sides[i]);
        }
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();

        let mut bits = remaining;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let s = lat.sides[j];
            // equal squares are interchangeable: place them in index order
            let twin_waiting = (0..j).any(|k| remaining >> k & 1 == 1 && lat.sides[k] == s);
            if twin_waiting {
                continue;
            }
            for &x in &xs {
                for &y in &ys {
                    if (x + y + s, j) <= last {
                        continue;
                    }
                    if !lat.containers.iter().any(|c| c.holds(x, y, s))
                        || lat.obstacles.iter().any(|o| o.overlaps(x, y, s))
                        || placed.iter().any(|&(i, px, py)| {
                            let t = lat.sides[i];
                            px < x + s && x < px + t && py < y + s && y < py + t
                        })
                    {
                        continue;
                    }
                    placed.push((j, x, y));
                    if self.dfs(remaining & !(1 << j), placed, (x + y + s, j))? {
                        return Ok(true);
                    }
                    placed.pop();
                }
            }
        }
        Ok(false)
    }
}
