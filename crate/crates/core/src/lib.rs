//! Tiling spaces of planar tilings: windows, patches, protopatches, the
//! general and adapted tiling metrics, finite local complexity evidence,
//! IP-sets, and search/verification of scaled pattern recurrence
//! certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod complexity;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod ipsets;
pub mod metrics;
pub mod recurrence;
pub mod render;
pub mod tiling;

pub use error::{Error, Result};
pub use geometry::{Isometry2, Segment, SegmentSet, Tolerances, Vec2};
pub use tiling::{CanonicalProtopatch, MatchMode, Patch, PlacedTile, Prototile, TilingWindow};
