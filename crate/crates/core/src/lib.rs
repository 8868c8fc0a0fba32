//! Numerical index computations on tori and integer lattices.
//!
//! - [`grid`]: sampled matrix fields on `T^d`, spectral derivatives, quadrature.
//! - [`symbols`]: Bott projections, loops, homotopies and the builtin symbols.
//! - [`fedosov`]: winding numbers and the three-form index integral on `T³`.
//! - [`lattice`]: Fredholm indices of shift/multiplier operators on `ℤ` and `ℤ²`.
//! - [`scenarios`]: registry of named builtin symbols and operators.

#![forbid(unsafe_code)]

pub mod fedosov;
pub mod grid;
pub mod lattice;
pub mod scenarios;
pub mod symbols;

pub use num_complex::Complex64;
