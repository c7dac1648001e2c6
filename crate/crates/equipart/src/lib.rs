//! Exact eight-partitions of finite point sets in R^3.
//!
//! Three planes form an eight-partition when every open octant they bound
//! contains at most one eighth of the points; the normal direction of the
//! first plane can be prescribed. This crate computes such partitions
//! exactly: all geometric decisions run on arbitrary-precision rationals.
//!
//! The pipeline splits the points into two colors at the median along the
//! prescribed direction, dualizes each color into a plane family, traces the
//! intersection curve of the two median levels of those arrangements, and
//! locates a pair of curve vertices whose signed co-classification counts
//! vanish by a winding-number bisection; the duals of those vertices are the
//! remaining two planes. Brute-force oracles, exact verification reports,
//! instance generators and a planar four-partition with a prescribed angle
//! bisector round out the toolbox.

pub mod error;
pub mod generate;
pub mod geom;
pub mod grid;
pub mod instance;
pub mod io;
pub mod levels;
pub mod oracle;
pub mod partition;
pub mod planar;
pub mod scalar;
pub mod search;
pub mod symbolic;

pub use error::{Error, Result};
pub use geom::{OrientedPlane, Point3};
pub use instance::{canonicalize, dualize, general_position_check, pad_and_perturb};
pub use levels::{trace, LevelCurve};
pub use partition::{eight_partition, verify, PartitionOptions, PartitionReport};
pub use planar::{four_partition_with_bisector, start_edge};
pub use scalar::Scalar;
pub use search::{pi_image, search, xy};
