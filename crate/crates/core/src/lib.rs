//! Uniform sampling of vectors that sum to one, under bounds, linear
//! constraints and polynomial constraints.
//!
//! * [`drs`]: the simplified Dirichlet-Rescale sampler for per-coordinate bounds.
//! * [`drsc`]: the constrained variant, uniform over the feasible region.
//! * [`tiling`]: exact audit showing where the simplified sampler is biased.
//! * [`gof`]: chi-squared uniformity test over a bin grid.

pub mod cli;
pub mod constraints;
pub mod drs;
pub mod drsc;
pub mod error;
pub mod geometry;
pub mod gof;
pub mod lp;
pub mod sampler;
pub mod simplex;
pub mod stats;
pub mod svg;
pub mod tiling;

pub use constraints::{ConstraintSet, LinearConstraint, Monomial, PolynomialConstraint, Predicate, Relation};
pub use drs::{drs_sample, BoundsSpec};
pub use drsc::{compute_thetas, drsc_sample, InducedSimplexFamily};
pub use error::{Error, Result};
pub use lp::{solve, LinearProgram, LpSolution, LpStatus};
pub use sampler::{sample_vectors, DrsSampler, DrscSampler, RejectionSampler, Sampler, SamplingStats};
pub use simplex::{rescale_to_standard, sample_flat_dirichlet, RegularSubSimplex, RngState, SimplexVector};
pub use tiling::TilingAudit;
