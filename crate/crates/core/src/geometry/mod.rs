//! Items, bins, placements and exact feasibility checks.
//!
//! Squares are closed; two placed squares may share boundary but never
//! interior. All coordinates are [`Scalar`]s with the bin origin at the
//! lower-left corner.

mod region;

pub use region::{uncovered_region, Corner, Point, RectilinearPolygon, RegionSet};
pub(crate) use region::{scan_grid_corners, CellGrid};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("square `{id}` has non-positive side {side}")]
    NonPositiveSide { id: String, side: Scalar },
    #[error("square `{id}` has negative profit {profit}")]
    NegativeProfit { id: String, profit: Scalar },
    #[error("bin dimensions must be positive, got {width} x {height}")]
    DegenerateBin { width: Scalar, height: Scalar },
    #[error("packing is infeasible: {0}")]
    Infeasible(Violation),
}

/// An item: an axis-aligned square with a profit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Square {
    pub id: String,
    pub side: Scalar,
    pub profit: Scalar,
}

impl Square {
    pub fn new(id: impl Into<String>, side: Scalar, profit: Scalar) -> Result<Self, GeometryError> {
        let id = id.into();
        if !side.is_positive() {
            return Err(GeometryError::NonPositiveSide { id, side });
        }
        if profit.is_negative() {
            return Err(GeometryError::NegativeProfit { id, profit });
        }
        Ok(Square { id, side, profit })
    }

    /// w(q): the area of the square.
    pub fn area(&self) -> Scalar {
        self.side.square()
    }

    /// p(q)/w(q).
    pub fn density(&self) -> Scalar {
        &self.profit / self.area()
    }

    pub fn scaled(&self, factor: &Scalar) -> Square {
        Square {
            id: self.id.clone(),
            side: &self.side * factor,
            profit: self.profit.clone(),
        }
    }
}

/// w(L): total area.
pub fn total_area<'a>(items: impl IntoIterator<Item = &'a Square>) -> Scalar {
    items.into_iter().map(Square::area).sum()
}

/// p(L): total profit.
pub fn total_profit<'a>(items: impl IntoIterator<Item = &'a Square>) -> Scalar {
    items.into_iter().map(|s| s.profit.clone()).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bin {
    pub width: Scalar,
    pub height: Scalar,
}

impl Bin {
    pub fn new(width: Scalar, height: Scalar) -> Result<Self, GeometryError> {
        if !width.is_positive() || !height.is_positive() {
            return Err(GeometryError::DegenerateBin { width, height });
        }
        Ok(Bin { width, height })
    }

    pub fn unit() -> Self {
        Bin { width: Scalar::one(), height: Scalar::one() }
    }

    pub fn area(&self) -> Scalar {
        &self.width * &self.height
    }

    pub fn long_side(&self) -> &Scalar {
        if self.height >= self.width {
            &self.height
        } else {
            &self.width
        }
    }

    pub fn short_side(&self) -> &Scalar {
        if self.height >= self.width {
            &self.width
        } else {
            &self.height
        }
    }

    pub fn transposed(&self) -> Bin {
        Bin { width: self.height.clone(), height: self.width.clone() }
    }

    pub fn fits(&self, square: &Square) -> bool {
        square.side <= self.width && square.side <= self.height
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub x0: Scalar,
    pub y0: Scalar,
    pub x1: Scalar,
    pub y1: Scalar,
}

impl Rect {
    pub fn new(x0: Scalar, y0: Scalar, x1: Scalar, y1: Scalar) -> Self {
        debug_assert!(x0 <= x1 && y0 <= y1);
        Rect { x0, y0, x1, y1 }
    }

    pub fn of_bin(bin: &Bin) -> Self {
        Rect::new(Scalar::zero(), Scalar::zero(), bin.width.clone(), bin.height.clone())
    }

    pub fn width(&self) -> Scalar {
        &self.x1 - &self.x0
    }

    pub fn height(&self) -> Scalar {
        &self.y1 - &self.y0
    }

    pub fn area(&self) -> Scalar {
        self.width() * self.height()
    }

    /// The rectangle as a standalone bin (offset dropped).
    pub fn as_bin(&self) -> Bin {
        Bin { width: self.width(), height: self.height() }
    }

    pub fn min_side(&self) -> Scalar {
        self.width().min(self.height())
    }

    pub fn max_side(&self) -> Scalar {
        self.width().max(self.height())
    }

    /// Interiors intersect.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.x0 <= other.x0 && other.x1 <= self.x1 && self.y0 <= other.y0 && other.y1 <= self.y1
    }

    pub fn intersection_area(&self, other: &Rect) -> Scalar {
        let w = self.x1.clone().min(other.x1.clone()) - self.x0.clone().max(other.x0.clone());
        let h = self.y1.clone().min(other.y1.clone()) - self.y0.clone().max(other.y0.clone());
        if w.is_positive() && h.is_positive() {
            w * h
        } else {
            Scalar::zero()
        }
    }

    pub fn transposed(&self) -> Rect {
        Rect::new(self.y0.clone(), self.x0.clone(), self.y1.clone(), self.x1.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub square: Square,
    pub x: Scalar,
    pub y: Scalar,
}

impl Placement {
    pub fn new(square: Square, x: Scalar, y: Scalar) -> Self {
        Placement { square, x, y }
    }

    pub fn rect(&self) -> Rect {
        Rect::new(
            self.x.clone(),
            self.y.clone(),
            &self.x + &self.square.side,
            &self.y + &self.square.side,
        )
    }

    pub fn translated(&self, dx: &Scalar, dy: &Scalar) -> Placement {
        Placement::new(self.square.clone(), &self.x + dx, &self.y + dy)
    }

    pub fn transposed(&self) -> Placement {
        Placement::new(self.square.clone(), self.y.clone(), self.x.clone())
    }
}

/// Squares positioned in a bin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub bin: Bin,
    pub placements: Vec<Placement>,
}

impl Packing {
    pub fn empty(bin: Bin) -> Self {
        Packing { bin, placements: Vec::new() }
    }

    pub fn new(bin: Bin, placements: Vec<Placement>) -> Self {
        Packing { bin, placements }
    }

    pub fn profit(&self) -> Scalar {
        self.placements.iter().map(|p| p.square.profit.clone()).sum()
    }

    pub fn area(&self) -> Scalar {
        self.placements.iter().map(|p| p.square.area()).sum()
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn squares(&self) -> impl Iterator<Item = &Square> {
        self.placements.iter().map(|p| &p.square)
    }

    pub fn check(&self) -> Result<(), Violation> {
        check_feasibility(self)
    }

    pub fn is_feasible(&self) -> bool {
        check_feasibility(self).is_ok()
    }

    pub fn transposed(&self) -> Packing {
        Packing::new(
            self.bin.transposed(),
            self.placements.iter().map(Placement::transposed).collect(),
        )
    }

    /// Placements sorted by `(id, x, y)`; the canonical identity of a packing.
    pub fn canonical_key(&self) -> Vec<(String, Scalar, Scalar)> {
        let mut key: Vec<_> = self
            .placements
            .iter()
            .map(|p| (p.square.id.clone(), p.x.clone(), p.y.clone()))
            .collect();
        key.sort();
        key
    }
}

/// First reason a packing is not feasible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NegativeCoordinate { index: usize, id: String },
    OutOfBin { index: usize, id: String },
    Overlap { first: usize, second: usize, first_id: String, second_id: String },
    DuplicateItem { first: usize, second: usize, id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeCoordinate { index, id } => {
                write!(f, "placement #{index} (`{id}`) has a negative coordinate")
            }
            Violation::OutOfBin { index, id } => {
                write!(f, "placement #{index} (`{id}`) extends outside the bin")
            }
            Violation::Overlap { first, second, first_id, second_id } => write!(
                f,
                "placements #{first} (`{first_id}`) and #{second} (`{second_id}`) overlap"
            ),
            Violation::DuplicateItem { first, second, id } => {
                write!(f, "item `{id}` is placed twice (#{first} and #{second})")
            }
        }
    }
}

/// Containment, pairwise interior-disjointness and single use of each item.
pub fn check_feasibility(packing: &Packing) -> Result<(), Violation> {
    let bin = Rect::of_bin(&packing.bin);
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (index, p) in packing.placements.iter().enumerate() {
        let id = p.square.id.clone();
        if p.x.is_negative() || p.y.is_negative() {
            return Err(Violation::NegativeCoordinate { index, id });
        }
        if !bin.contains(&p.rect()) {
            return Err(Violation::OutOfBin { index, id });
        }
        if let Some(&first) = seen.get(p.square.id.as_str()) {
            return Err(Violation::DuplicateItem { first, second: index, id });
        }
        seen.insert(&p.square.id, index);
    }
    let rects: Vec<Rect> = packing.placements.iter().map(Placement::rect).collect();
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            if rects[i].overlaps(&rects[j]) {
                return Err(Violation::Overlap {
                    first: i,
                    second: j,
                    first_id: packing.placements[i].square.id.clone(),
                    second_id: packing.placements[j].square.id.clone(),
                });
            }
        }
    }
    Ok(())
}
