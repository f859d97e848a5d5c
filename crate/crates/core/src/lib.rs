//! Exact arithmetic toolkit for number walls of sequences over prime fields.
//!
//! The crate has three layers:
//!
//! * [`field`], [`series`] and [`wall`] compute continued fractions and
//!   Toeplitz/Hankel determinant arrays ("number walls") of Laurent series
//!   prefixes, both by brute-force determinants and by the fast
//!   frame-relation recurrence, together with a frame-relation auditor.
//! * [`tmtiles`] and [`coding`] realise a 15-tile substitution system with a
//!   16-element symmetry group and its pixel coding, whose limit tiling
//!   reproduces the diagonally-aligned number wall of the Thue-Morse
//!   sequence.
//! * [`escape`] measures, in exact rational arithmetic, how much of a
//!   sequence's mass sits in deep zero runs (escape of mass), both for
//!   continued-fraction degree sequences and for wall columns.

pub mod coding;
pub mod error;
pub mod escape;
pub mod field;
pub mod grid;
pub mod pbm;
pub mod series;
pub mod tmtiles;
pub mod wall;

pub use error::Error;
pub use field::{FieldElem, PrimeField};
pub use grid::BitGrid;
pub use series::{CFExpansion, LaurentPrefix, Poly};
pub use tmtiles::{GElem, Tile, TileMat};
pub use wall::{DiagWall, FrameAuditReport, Wall};
