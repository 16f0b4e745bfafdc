//! Spectral classification of indefinite Sturm-Liouville operators
//! `A = (sgn x)(-d²/dx² + q(x))` with finite-zone potentials.
//!
//! The library builds the polynomial quadruple `(P, Q, R, S)` with
//! `P·S − Q² = R` from band-structure data, evaluates the Weyl functions
//! `M±(λ)` and their difference `D = M+ − M−`, computes eigenvalues with
//! algebraic multiplicities, locates strong spectral singularities, decides
//! definitizability, and assembles a similarity verdict
//! (selfadjoint / normal / not similar). A numerical harness independently
//! cross-checks the resolvent and weighted-Hilbert-transform criteria.

pub mod bands;
pub mod classify;
pub mod cli;
pub mod criteria;
pub mod harness;
pub mod poly;
pub mod spectrum;
pub mod weyl;
