//! Brute-force reference: the block master equations integrated in a
//! truncated number basis, with every analytic quantity recomputed from the
//! resulting matrices.

pub mod block;
pub mod integrator;
pub mod measures;
pub mod operators;
pub mod validate;

pub use block::{default_dim, evolve_block, evolve_blocks, initial_matrix, BlockDensityMatrix, BlockKind, BlockSet, DimChoice, OracleConfig};
pub use measures::{chord_from_matrix, reduced_quantities, uhlmann_fidelity, ChordTable, ReducedQuantities};
pub use operators::{build_operators, Operators};
pub use validate::{compare_point, random_points, run_validation, ValidationPoint, ValidationReport};
