//! Windowed chain complexes, homology, tensor calculus, cones, cubes and telescopes.

pub mod complex;
pub mod cube;
pub mod homology;
pub mod ops;
pub mod parse;
pub mod sym;

pub use complex::{ChainMap, DegreeWindow, WindowedComplex};
pub use cube::{cube_total_cofiber, cube_total_fiber, total_fiber_map, CubeDiagram};
pub use homology::{homology, induced_homology_map, HomologyReport, InducedMap};
pub use sym::SymmetricComplex;
pub use ops::{cone, direct_sum, hocofib, hofib, shift, telescope, tensor, truncate_nonneg};
