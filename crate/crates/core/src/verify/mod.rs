//! Independent checks: the Kolmogorov fixed point, the transformed mild
//! representation, the non-uniqueness counterexample and a finite-difference
//! heat solver.

mod counterexample;
mod heat_fd;
mod kolmogorov;
mod representation;

pub use counterexample::{counterexample_residual, ResidualReport};
pub use heat_fd::{heat_fd_oracle, FdRow};
pub use kolmogorov::{solve_kolmogorov_picard, solve_kolmogorov_scalar, KolmogorovGrid, KolmogorovSolution};
pub use representation::{check_transformed_representation, RepresentationReport};
