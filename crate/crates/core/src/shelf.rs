//! Level-oriented packing: NFDH, the density-ordered greedy that appends
//! items to a list of bins, and the slice-removal transform that shrinks a
//! packing of small squares to a narrower bin.

use std::cmp::Ordering;

use thiserror::Error;

use crate::geometry::{total_area, Bin, Packing, Placement, Square};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShelfError {
    #[error("square `{id}` has side {side}, above the allowed {limit}")]
    ItemTooLarge { id: String, side: Scalar, limit: Scalar },
    #[error("source width {width} exceeds (1 + 2 eps) times the target {target}")]
    SourceTooWide { width: Scalar, target: Scalar },
    #[error("epsilon {0} leaves no slice of width 4 eps (needs 0 < eps <= 1/4)")]
    EpsilonOutOfRange(Scalar),
}

/// One NFDH level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shelf {
    pub y_base: Scalar,
    pub height: Scalar,
    pub used_width: Scalar,
}

/// Output of a strip packing: placements in a strip of the given width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripResult {
    pub width: Scalar,
    pub placements: Vec<Placement>,
    pub shelves: Vec<Shelf>,
    /// Top of the highest shelf.
    pub used_height: Scalar,
    pub leftovers: Vec<Square>,
}

impl StripResult {
    pub fn profit(&self) -> Scalar {
        self.placements.iter().map(|p| p.square.profit.clone()).sum()
    }

    /// The placements as a packing of `bin`. The caller is responsible for
    /// the bin being at least `width x used_height`.
    pub fn into_packing(self, bin: Bin) -> Packing {
        Packing::new(bin, self.placements)
    }
}

/// Non-increasing side, ties by id.
pub(crate) fn by_side_desc(a: &Square, b: &Square) -> Ordering {
    b.side.cmp(&a.side).then_with(|| a.id.cmp(&b.id))
}

/// Non-increasing profit density, ties by id.
pub(crate) fn by_density_desc(a: &Square, b: &Square) -> Ordering {
    b.density().cmp(&a.density()).then_with(|| a.id.cmp(&b.id))
}

/// Next Fit Decreasing Height.
///
/// Items wider than the strip are returned as leftovers. With a height cap,
/// packing stops at the first level that would cross the cap and every
/// remaining item becomes a leftover.
pub fn nfdh(items: &[Square], width: &Scalar, height_cap: Option<&Scalar>) -> StripResult {
    let mut sorted: Vec<Square> = items.to_vec();
    sorted.sort_by(by_side_desc);

    let mut shelves: Vec<Shelf> = Vec::new();
    let mut placements = Vec::new();
    let mut leftovers = Vec::new();
    let mut iter = sorted.into_iter();
    while let Some(item) = iter.next() {
        if item.side > *width {
            leftovers.push(item);
            continue;
        }
        let fits_current = shelves
            .last()
            .is_some_and(|s| &s.used_width + &item.side <= *width);
        if !fits_current {
            let y_base = shelves
                .last()
                .map(|s| &s.y_base + &s.height)
                .unwrap_or_else(Scalar::zero);
            if height_cap.is_some_and(|cap| &y_base + &item.side > *cap) {
                leftovers.push(item);
                leftovers.extend(iter);
                break;
            }
            shelves.push(Shelf { y_base, height: item.side.clone(), used_width: Scalar::zero() });
        }
        let shelf = shelves.last_mut().expect("a shelf is open");
        placements.push(Placement::new(item.clone(), shelf.used_width.clone(), shelf.y_base.clone()));
        shelf.used_width += &item.side;
    }
    let used_height = shelves
        .last()
        .map(|s| &s.y_base + &s.height)
        .unwrap_or_else(Scalar::zero);
    StripResult { width: width.clone(), placements, shelves, used_height, leftovers }
}

/// `2 w(L) / width + max side`: the NFDH height guarantee for squares that
/// all fit the strip width.
pub fn nfdh_height_bound(items: &[Square], width: &Scalar) -> Scalar {
    let max_side = items.iter().map(|s| s.side.clone()).max().unwrap_or_else(Scalar::zero);
    Scalar::from_int(2) * total_area(items) / width + max_side
}

/// NFDH in an unbounded strip, standing in for an asymptotic strip-packing
/// scheme. Its height never exceeds [`nfdh_height_bound`].
pub fn strip_pack_bounded(items: &[Square], width: &Scalar) -> StripResult {
    let result = nfdh(items, width, None);
    debug_assert!({
        let packed: Vec<Square> = result.placements.iter().map(|p| p.square.clone()).collect();
        result.used_height <= nfdh_height_bound(&packed, width)
    });
    result
}

/// Result of [`greedy_append`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    /// One packing per input bin, in input order (empty for skipped bins).
    pub packings: Vec<Packing>,
    pub leftovers: Vec<Square>,
}

impl GreedyResult {
    pub fn profit(&self) -> Scalar {
        self.packings.iter().map(Packing::profit).sum()
    }
}

/// Density-ordered greedy over a list of bins.
///
/// For each bin with both dimensions at least `size_floor`, the longest
/// prefix of the remaining items (in density order) that NFDH fits entirely
/// into the bin is packed there and removed from the list.
pub fn greedy_append(items: &[Square], bins: &[Bin], size_floor: &Scalar) -> GreedyResult {
    let mut remaining: Vec<Square> = items.to_vec();
    remaining.sort_by(by_density_desc);
    let mut packings = Vec::with_capacity(bins.len());
    for bin in bins {
        if remaining.is_empty() || bin.width < *size_floor || bin.height < *size_floor {
            packings.push(Packing::empty(bin.clone()));
            continue;
        }
        let mut chosen = None;
        for m in (1..=remaining.len()).rev() {
            let attempt = nfdh(&remaining[..m], &bin.width, Some(&bin.height));
            if attempt.leftovers.is_empty() {
                chosen = Some((m, attempt));
                break;
            }
        }
        match chosen {
            Some((m, strip)) => {
                remaining.drain(..m);
                packings.push(strip.into_packing(bin.clone()));
            }
            None => packings.push(Packing::empty(bin.clone())),
        }
    }
    GreedyResult { packings, leftovers: remaining }
}

/// Outcome of [`cut_to_narrower`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    pub packing: Packing,
    /// Index of the slice whose contents were removed, if any cut was needed.
    pub removed_slice: Option<usize>,
    pub removed: Vec<Square>,
}

/// Shrinks a packing of squares with side at most `eps * target_width` from
/// a bin of width up to `(1 + 2 eps) * target_width` to width `target_width`.
///
/// The source bin is split into `floor(1/(4 eps))` vertical slices of width
/// `4 eps * target_width` (the last one takes the remainder). The squares
/// lying wholly inside the least profitable slice are removed, which opens a
/// gap of width at least `2 eps * target_width`; everything right of the gap
/// then slides left. The retained profit is at least
/// `(1 - 1/floor(1/(4 eps)))` times the original, i.e. `(1 - 4 eps)` when
/// `1/(4 eps)` is an integer.
pub fn cut_to_narrower(packing: &Packing, target_width: &Scalar, epsilon: &Scalar) -> Result<CutResult, ShelfError> {
    if !epsilon.is_positive() || *epsilon > Scalar::ratio(1, 4) {
        return Err(ShelfError::EpsilonOutOfRange(epsilon.clone()));
    }
    let limit = epsilon * target_width;
    if let Some(p) = packing.placements.iter().find(|p| p.square.side > limit) {
        return Err(ShelfError::ItemTooLarge {
            id: p.square.id.clone(),
            side: p.square.side.clone(),
            limit,
        });
    }
    let source_width = packing.bin.width.clone();
    let max_width = (Scalar::one() + Scalar::from_int(2) * epsilon) * target_width;
    if source_width > max_width {
        return Err(ShelfError::SourceTooWide { width: source_width, target: target_width.clone() });
    }
    let target_bin = Bin { width: target_width.clone(), height: packing.bin.height.clone() };
    let overflow = &source_width - target_width;
    if !overflow.is_positive() {
        return Ok(CutResult {
            packing: Packing::new(target_bin, packing.placements.clone()),
            removed_slice: None,
            removed: Vec::new(),
        });
    }

    let slices = (Scalar::from_int(4) * epsilon).recip().floor_u64() as usize;
    let slice_width = Scalar::from_int(4) * epsilon * target_width;
    let bounds = |k: usize| -> (Scalar, Scalar) {
        let lo = Scalar::from_int(k as i64) * &slice_width;
        let hi = if k + 1 == slices { source_width.clone() } else { &lo + &slice_width };
        (lo, hi)
    };
    let inside = |p: &Placement, lo: &Scalar, hi: &Scalar| p.x >= *lo && &p.x + &p.square.side <= *hi;

    let mut best: Option<(Scalar, usize)> = None;
    for k in 0..slices {
        let (lo, hi) = bounds(k);
        let profit: Scalar = packing
            .placements
            .iter()
            .filter(|p| inside(p, &lo, &hi))
            .map(|p| p.square.profit.clone())
            .sum();
        if best.as_ref().is_none_or(|(b, _)| profit < *b) {
            best = Some((profit, k));
        }
    }
    let (_, k) = best.expect("at least one slice");
    let (lo, hi) = bounds(k);
    let cut_at = &lo + &limit;
    let mut removed = Vec::new();
    let mut kept = Vec::new();
    for p in &packing.placements {
        if inside(p, &lo, &hi) {
            removed.push(p.square.clone());
        } else if p.x >= cut_at {
            kept.push(Placement::new(p.square.clone(), &p.x - &overflow, p.y.clone()));
        } else {
            kept.push(p.clone());
        }
    }
    Ok(CutResult { packing: Packing::new(target_bin, kept), removed_slice: Some(k), removed })
}

/// [`cut_to_narrower`] applied to the height instead of the width.
pub fn cut_to_shorter(packing: &Packing, target_height: &Scalar, epsilon: &Scalar) -> Result<CutResult, ShelfError> {
    let cut = cut_to_narrower(&packing.transposed(), target_height, epsilon)?;
    Ok(CutResult {
        packing: cut.packing.transposed(),
        removed_slice: cut.removed_slice,
        removed: cut.removed,
    })
}
