//! Exact symbolic computation for finite-rank Hom-Lie conformal algebras:
//! lambda-bracket calculus over sparse rational polynomials, axiom and module
//! checkers, conformal cohomology on truncated slices, Nijenhuis deformations,
//! and solvers for derivations, generalized derivations, centroids, and
//! quasicentroids.

pub mod algebra;
pub mod cohomology;
pub mod deformation;
pub mod derivations;
pub mod error;
pub mod generalized;
pub mod linalg;
pub mod poly;
pub mod samples;

pub use error::Error;
