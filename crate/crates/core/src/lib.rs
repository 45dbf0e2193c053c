//! Long-run average-cost Markov decision processes solved through linear
//! programs over occupation measures.
//!
//! The unconstrained problem is solved by [`occupation::solve_unconstrained`],
//! budget-constrained ones by [`constrained::solve_constrained`] and
//! lexicographic ones by [`constrained::lex_solve`]. Every solve comes with a
//! dual certificate that [`acoe`] turns into optimality-equation checks and a
//! greedy policy. [`oracles`] and [`simulation`] provide independent ground
//! truth, and [`report::verify_solution`] re-checks emitted documents without
//! solving anything.

pub mod acoe;
pub mod cli;
pub mod constrained;
pub mod fixtures;
mod linalg;
pub mod lp;
pub mod model;
pub mod occupation;
pub mod oracles;
pub mod report;
pub mod simulation;

pub use lp::Tolerances;
pub use model::FiniteMdp;
