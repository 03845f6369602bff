//! Algorithms A1 and A2.
//!
//! Both normalize the bin to `(1, h)` with `h >= 1`, split the squares into
//! size classes by the threshold schedule and, for every choice of a class
//! `L_i` to drop, treat the classes above it as large and those below as
//! small. A1 enumerates corner packings of the large squares, cuts the
//! remaining space into blocks and fills them with the density greedy. A2
//! runs A1 and additionally, for near-full packings of at most four large
//! squares, dissects the free space and packs the small squares with the
//! large-resource scheme.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::corner::{corner_search, dissect, partition_blocks, CornerState};
use crate::geometry::{Bin, Packing, Placement, Rect, Square};
use crate::ptas::{pack_large_resource, BinFamily, GuessStats, PtasConfig};
use crate::scalar::Scalar;
use crate::schedule::ThresholdSchedule;
use crate::shelf::greedy_append;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgoError {
    #[error("epsilon {epsilon} violates eps < 1/(2h + 2h^2) for h = {height}")]
    EpsilonGuard { epsilon: Scalar, height: Scalar },
    #[error("square `{id}` has side {side} > 1 after normalization")]
    SideTooLarge { id: String, side: Scalar },
}

/// Size classes `L_1 .. L_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition {
    pub epsilon: Scalar,
    pub k: usize,
    /// `P_0 = 1, P_1, ...`, as far as they can be materialized.
    pub boundaries: Vec<Scalar>,
    /// `classes[i - 1]` is `L_i`.
    pub classes: Vec<Vec<Square>>,
}

impl IntervalPartition {
    /// 1-based class of a side: `L_i` holds sides in `(P_i, P_{i-1}]`.
    /// Sides below every materialized boundary go to the next class.
    pub fn class_of(&self, side: &Scalar) -> usize {
        for (i, p) in self.boundaries.iter().enumerate().skip(1) {
            if side > p {
                return i;
            }
        }
        self.boundaries.len().min(self.k + 1)
    }

    /// Highest non-empty class index, or 0 when there are no squares.
    pub fn max_occupied(&self) -> usize {
        self.classes.iter().rposition(|c| !c.is_empty()).map_or(0, |i| i + 1)
    }

    /// Squares of the classes strictly above `L_i`.
    pub fn large(&self, i: usize) -> Vec<Square> {
        self.classes[..i - 1].iter().flatten().cloned().collect()
    }

    /// Squares of the classes strictly below `L_i`.
    pub fn small(&self, i: usize) -> Vec<Square> {
        self.classes[i.min(self.classes.len())..].iter().flatten().cloned().collect()
    }
}

pub fn partition_intervals(items: &[Square], schedule: &ThresholdSchedule) -> Result<IntervalPartition, AlgoError> {
    let k = schedule.k();
    let mut part = IntervalPartition {
        epsilon: schedule.epsilon().clone(),
        k,
        boundaries: schedule.boundaries(k),
        classes: vec![Vec::new(); k + 1],
    };
    for s in items {
        if s.side > Scalar::one() {
            return Err(AlgoError::SideTooLarge { id: s.id.clone(), side: s.side.clone() });
        }
        let c = part.class_of(&s.side);
        part.classes[c - 1].push(s.clone());
    }
    Ok(part)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgoConfig {
    pub schedule: ThresholdSchedule,
    /// Run even when the epsilon guard fails.
    pub override_guard: bool,
    /// Distinct corner states explored per dropped class.
    pub corner_state_limit: u64,
    /// More large squares than this are not enumerated.
    pub max_enum_large: usize,
    pub ptas: PtasConfig,
}

impl AlgoConfig {
    pub fn new(schedule: ThresholdSchedule) -> Self {
        AlgoConfig {
            schedule,
            override_guard: false,
            corner_state_limit: 2_000,
            max_enum_large: 8,
            ptas: PtasConfig::default(),
        }
    }

    pub fn with_override(mut self) -> Self {
        self.override_guard = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    /// The density greedy on all squares, no class dropped.
    Greedy,
    /// Five or more large squares placed, small squares appended greedily.
    A1ManyLarge,
    /// At most four large squares leaving room, small squares appended greedily.
    A1AreaSlack,
    /// Near-full corner packing, dissection and the large-resource scheme.
    A2Corner,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Greedy => "greedy",
            Branch::A1ManyLarge => "A1-many-large",
            Branch::A1AreaSlack => "A1-area-slack",
            Branch::A2Corner => "A2-corner",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub indices_tried: usize,
    pub corner_states: u64,
    pub corner_truncated: bool,
    /// Some index had too many large squares to enumerate.
    pub large_fallback: bool,
    pub vertex_violations: u64,
    pub dissections: u64,
    pub dissect_rejections: u64,
    /// States where the two near-full slacks disagree.
    pub slack_discrepancies: u64,
    /// Large-resource packings computed (blocks of equal sizes share one).
    pub ptas_runs: u64,
    pub ptas_fallbacks: u64,
    pub ptas: GuessStats,
    /// Squares too large for the bin, ignored.
    pub unfit_items: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    /// Dropped class, 0 for the plain greedy.
    pub chosen_index: usize,
    pub branch: Branch,
    pub profit: Scalar,
    pub packing: Packing,
    pub stats: RunStats,
}

/// Maps a bin to `(1, h)` with `h >= 1` and back.
struct Frame {
    transposed: bool,
    scale: Scalar,
}

impl Frame {
    fn new(bin: &Bin) -> Self {
        let transposed = bin.width > bin.height;
        let scale = bin.short_side().clone();
        Frame { transposed, scale }
    }

    fn bin(&self, bin: &Bin) -> Bin {
        let b = if self.transposed { bin.transposed() } else { bin.clone() };
        Bin { width: Scalar::one(), height: &b.height / &self.scale }
    }

    fn item(&self, s: &Square) -> Square {
        Square { side: &s.side / &self.scale, ..s.clone() }
    }

    fn restore(&self, packing: &Packing, bin: &Bin, originals: &[Square]) -> Packing {
        let placements = packing
            .placements
            .iter()
            .map(|p| {
                let sq = originals.iter().find(|o| o.id == p.square.id).expect("known square").clone();
                let (x, y) = (&p.x * &self.scale, &p.y * &self.scale);
                if self.transposed {
                    Placement::new(sq, y, x)
                } else {
                    Placement::new(sq, x, y)
                }
            })
            .collect();
        Packing::new(bin.clone(), placements)
    }
}

#[derive(Clone)]
struct Candidate {
    profit: Scalar,
    packing: Packing,
    branch: Branch,
    index: usize,
}

fn better(best: &Option<Candidate>, c: &Candidate) -> bool {
    debug_assert!(c.packing.is_feasible(), "infeasible candidate from {}", c.branch);
    best.as_ref().is_none_or(|b| c.profit > b.profit)
}

/// Translates packings of blocks into the bin and merges them with `base`.
fn merge(bin: &Bin, base: &[Placement], blocks: &[Rect], packings: Vec<Packing>) -> Packing {
    let mut placements = base.to_vec();
    for (r, p) in blocks.iter().zip(packings) {
        placements.extend(p.placements.iter().map(|pl| pl.translated(&r.x0, &r.y0)));
    }
    Packing::new(bin.clone(), placements)
}

/// Algorithm A1.
pub fn algorithm_a1(items: &[Square], bin: &Bin, config: &AlgoConfig) -> Result<RunReport, AlgoError> {
    run(items, bin, config, false).map(|(a1, _)| a1)
}

/// Algorithm A2. Its candidate set contains every candidate of A1.
pub fn algorithm_a2(items: &[Square], bin: &Bin, config: &AlgoConfig) -> Result<RunReport, AlgoError> {
    run(items, bin, config, true).map(|(_, a2)| a2)
}

/// A1 and A2 from one pass over the shared candidates.
pub fn algorithms_a1_a2(items: &[Square], bin: &Bin, config: &AlgoConfig) -> Result<(RunReport, RunReport), AlgoError> {
    run(items, bin, config, true)
}

fn run(
    items: &[Square],
    bin: &Bin,
    config: &AlgoConfig,
    corner_branch: bool,
) -> Result<(RunReport, RunReport), AlgoError> {
    let frame = Frame::new(bin);
    let unit_bin = frame.bin(bin);
    let schedule = &config.schedule;
    if !config.override_guard && !schedule.epsilon_guard_holds(&unit_bin.height) {
        return Err(AlgoError::EpsilonGuard {
            epsilon: schedule.epsilon().clone(),
            height: unit_bin.height.clone(),
        });
    }
    let mut stats = RunStats::default();
    let scaled: Vec<Square> = items
        .iter()
        .map(|s| frame.item(s))
        .filter(|s| {
            let fits = s.side <= Scalar::one();
            if !fits {
                stats.unfit_items += 1;
            }
            fits
        })
        .collect();
    let part = partition_intervals(&scaled, schedule)?;

    let mut best = Best::default();
    let g = greedy_append(&scaled, std::slice::from_ref(&unit_bin), &Scalar::zero());
    let packing = g.packings.into_iter().next().expect("one bin");
    best.both(Candidate { profit: packing.profit(), packing, branch: Branch::Greedy, index: 0 });

    let top = (part.max_occupied() + 1).min(part.k + 1);
    for i in 1..=top {
        stats.indices_tried += 1;
        let large = part.large(i);
        let small = part.small(i);
        let floor = schedule.small_max_side(i).unwrap_or_else(Scalar::zero);
        if large.len() > config.max_enum_large {
            stats.large_fallback = true;
            let mut both = large.clone();
            both.extend(small.iter().cloned());
            let g = greedy_append(&both, std::slice::from_ref(&unit_bin), &Scalar::zero());
            let packing = g.packings.into_iter().next().expect("one bin");
            let branch = if packing.len() >= 5 { Branch::A1ManyLarge } else { Branch::A1AreaSlack };
            best.both(Candidate { profit: packing.profit(), packing, branch, index: i });
            continue;
        }
        let search = corner_search(&large, &unit_bin, config.corner_state_limit);
        stats.corner_states += search.stats.distinct_states;
        stats.corner_truncated |= search.stats.truncated;
        stats.vertex_violations += search.stats.vertex_violations;
        let (mut greedy_cache, mut ptas_cache) = (FillCache::new(), FillCache::new());
        for state in &search.states {
            a1_fill(state, &small, &floor, i, &mut greedy_cache, &mut best);
            if corner_branch && i >= 2 {
                a2_fill(state, &small, i, config, &mut stats, &mut ptas_cache, &mut best);
            }
        }
    }

    let finish = |cand: Option<Candidate>, stats: RunStats| {
        let cand = cand.expect("the greedy candidate exists");
        let packing = frame.restore(&cand.packing, bin, items);
        debug_assert!(packing.is_feasible());
        RunReport { chosen_index: cand.index, branch: cand.branch, profit: packing.profit(), packing, stats }
    };
    let a1_stats = RunStats {
        dissections: 0,
        dissect_rejections: 0,
        slack_discrepancies: 0,
        ptas_runs: 0,
        ptas_fallbacks: 0,
        ptas: GuessStats::default(),
        ..stats.clone()
    };
    Ok((finish(best.a1, a1_stats), finish(best.a2, stats)))
}

/// Best A1 candidate and best A2 candidate; A2 sees every A1 candidate.
#[derive(Default)]
struct Best {
    a1: Option<Candidate>,
    a2: Option<Candidate>,
}

impl Best {
    fn both(&mut self, c: Candidate) {
        if better(&self.a2, &c) {
            self.a2 = Some(c.clone());
        }
        if better(&self.a1, &c) {
            self.a1 = Some(c);
        }
    }

    fn a2_only(&mut self, c: Candidate) {
        if better(&self.a2, &c) {
            self.a2 = Some(c);
        }
    }
}

/// Packings of the small squares keyed by the block dimensions they were
/// computed for. Mirror-image corner packings share their blocks' sizes.
type FillCache = HashMap<Vec<Bin>, Vec<Packing>>;

/// Blocks in a canonical order (larger area first) with their packings,
/// computed by `fill` unless cached.
fn fill_blocks(
    mut blocks: Vec<Rect>,
    cache: &mut FillCache,
    fill: impl FnOnce(&[Bin]) -> Vec<Packing>,
) -> (Vec<Rect>, Vec<Packing>) {
    blocks.sort_by(|a, b| {
        (b.area(), b.width(), b.height(), &a.x0, &a.y0).cmp(&(a.area(), a.width(), a.height(), &b.x0, &b.y0))
    });
    let bins: Vec<Bin> = blocks.iter().map(Rect::as_bin).collect();
    let packings = match cache.get(&bins) {
        Some(p) => p.clone(),
        None => {
            let p = fill(&bins);
            cache.insert(bins, p.clone());
            p
        }
    };
    (blocks, packings)
}

fn a1_fill(state: &CornerState, small: &[Square], floor: &Scalar, i: usize, cache: &mut FillCache, best: &mut Best) {
    let blocks = if small.is_empty() { Vec::new() } else { partition_blocks(state, floor) };
    let (blocks, packings) = fill_blocks(blocks, cache, |bins| greedy_append(small, bins, floor).packings);
    let packing = merge(&state.bin, &state.placed, &blocks, packings);
    let branch = if state.placed.len() >= 5 { Branch::A1ManyLarge } else { Branch::A1AreaSlack };
    best.both(Candidate { profit: packing.profit(), packing, branch, index: i });
}

fn a2_fill(
    state: &CornerState,
    small: &[Square],
    i: usize,
    config: &AlgoConfig,
    stats: &mut RunStats,
    cache: &mut FillCache,
    best: &mut Best,
) {
    let schedule = &config.schedule;
    if state.placed.len() > 4 {
        return;
    }
    let (Some(rest), Some(fact)) = (schedule.rest_area_slack(i), schedule.fact_slack(i)) else {
        return;
    };
    let covered = state.covered_area();
    let area = state.bin.area();
    let near_full = covered >= &area - &rest;
    if near_full != (covered >= &area - &fact) {
        stats.slack_discrepancies += 1;
    }
    if !near_full {
        return;
    }
    stats.dissections += 1;
    let blocks = match dissect(state, schedule, i) {
        Ok(b) => b,
        Err(err) => {
            log::debug!("dissection rejected: {err}");
            stats.dissect_rejections += 1;
            return;
        }
    };
    let (blocks, packings) = fill_blocks(blocks.blocks, cache, |bins| {
        let family = BinFamily::new(bins.to_vec(), schedule.epsilon().clone());
        let result = pack_large_resource(small, &family, &config.ptas);
        stats.ptas_runs += 1;
        if result.fallback {
            stats.ptas_fallbacks += 1;
        }
        add_guess_stats(&mut stats.ptas, &result.stats);
        result.packings
    });
    let packing = merge(&state.bin, &state.placed, &blocks, packings);
    best.a2_only(Candidate { profit: packing.profit(), packing, branch: Branch::A2Corner, index: i });
}

fn add_guess_stats(acc: &mut GuessStats, s: &GuessStats) {
    acc.opt_candidates += s.opt_candidates;
    acc.tuples += s.tuples;
    acc.tuple_space += &s.tuple_space;
    acc.distinct_selections += s.distinct_selections;
    acc.matrices += s.matrices;
    acc.accepted += s.accepted;
    acc.rejected += s.rejected;
    acc.sampled |= s.sampled;
    acc.truncated |= s.truncated;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn sq(id: &str, side: &str, profit: &str) -> Square {
        Square::new(id, q(side), q(profit)).unwrap()
    }

    fn scaled() -> AlgoConfig {
        AlgoConfig::new(ThresholdSchedule::scaled(q("1/8"), q("1/4"), 3).unwrap())
    }

    #[test]
    fn classes_follow_the_boundaries() {
        let s = ThresholdSchedule::paper(q("1/2")).unwrap();
        let part = partition_intervals(&[sq("a", "0.5", "1"), sq("b", "1/64", "1"), sq("c", "1/100", "1")], &s).unwrap();
        assert_eq!(part.k, 2);
        assert_eq!(part.boundaries[1], q("1/64"));
        assert_eq!(part.classes[0].len(), 1);
        assert_eq!(part.classes[1].len(), 2);
        assert_eq!(part.class_of(&q("1/2").pow(36)), 3);
        assert_eq!(part.max_occupied(), 2);
        assert!(partition_intervals(&[sq("x", "2", "1")], &s).is_err());
    }

    #[test]
    fn single_item_is_optimal() {
        for algo in [algorithm_a1, algorithm_a2] {
            let r = algo(&[sq("a", "0.7", "3")], &Bin::unit(), &scaled()).unwrap();
            assert_eq!(r.profit, q("3"));
            assert!(r.packing.is_feasible());
        }
    }

    #[test]
    fn oracle_example() {
        let items = [sq("a", "0.6", "10"), sq("b", "0.5", "6"), sq("c", "0.5", "6")];
        let a1 = algorithm_a1(&items, &Bin::unit(), &scaled()).unwrap();
        let a2 = algorithm_a2(&items, &Bin::unit(), &scaled()).unwrap();
        assert_eq!(a1.profit, q("12"));
        assert!(a2.profit >= a1.profit);
    }

    #[test]
    fn guard_is_enforced() {
        let bin = Bin::new(q("1"), q("2")).unwrap();
        assert!(matches!(algorithm_a1(&[], &bin, &scaled()), Err(AlgoError::EpsilonGuard { .. })));
        assert!(algorithm_a1(&[], &bin, &scaled().with_override()).is_ok());
    }

    #[test]
    fn wide_bins_are_normalized() {
        let bin = Bin::new(q("4"), q("2")).unwrap();
        let items = [sq("a", "2", "5"), sq("b", "1", "2"), sq("c", "1", "2"), sq("d", "1", "1")];
        let r = algorithm_a2(&items, &bin, &scaled().with_override()).unwrap();
        assert!(r.packing.is_feasible());
        assert_eq!(r.packing.bin, bin);
        assert_eq!(r.profit, q("10"));
    }

    #[test]
    fn near_full_corner_packing_uses_the_dissection_branch() {
        // a 7/8 square leaves an L of width 1/8 holding many tiny squares
        let mut items = vec![sq("big", "7/8", "100")];
        for i in 0..6 {
            items.push(sq(&format!("t{i}"), "1/64", "1"));
        }
        let r = algorithm_a2(&items, &Bin::unit(), &scaled()).unwrap();
        assert_eq!(r.profit, q("106"));
        assert!(r.stats.dissections > 0);
    }
}
