//! Packing a maximum-profit subset of squares into a rectangular bin.
//!
//! The crate contains exact rational geometry, a brute-force optimal solver
//! for small instances, shelf (NFDH) packing primitives, the rounding and
//! guessing machinery for bins with large aspect ratio, corner packing with
//! region dissection, and the two approximation algorithms built from them:
//! [`algo::algorithm_a1`] and [`algo::algorithm_a2`].

pub mod algo;
pub mod corner;
pub mod format;
pub mod geometry;
pub mod harness;
pub mod oracle;
pub mod ptas;
pub mod render;
pub mod scalar;
pub mod schedule;
pub mod shelf;

pub use geometry::{Bin, Packing, Placement, Rect, Square};
pub use scalar::Scalar;
pub use schedule::ThresholdSchedule;
