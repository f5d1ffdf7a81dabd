//! Spanning trees with low crossing number via LP relaxation and rounding.

pub mod error;
pub mod gen;
pub mod geom;
pub mod io;
pub mod lp;
pub mod num;
pub mod pipeline;
pub mod range_space;
pub mod rounding;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{HalfCount, Hyperplane, Point, PointSet, Side};
pub use range_space::{canonical_ranges, crossing_number, explicit_ranges, restrict, Range, RangeSpace};
