//! Tarski fixed points of order-preserving maps on finite integer box
//! lattices: solvers, uniqueness checks, supermodular games, and the
//! reductions that make uniqueness hard.

pub mod adversary;
pub mod error;
pub mod lattice;
pub mod lp;
pub mod oracle;
pub mod polytope;
pub mod rational;
pub mod sat;
pub mod solver;
pub mod supermodular;
pub mod uniqueness;

pub use error::{Error, Result, Violation, Witness};
pub use lattice::{BoxLattice, Comparison, Direction, OrderRelation, Point};
pub use oracle::{MonotoneOracle, QueryLog, Session};
pub use solver::{SolveOptions, SolveResult};
pub use uniqueness::UniquenessReport;
