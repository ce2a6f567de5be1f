//! Exact finite-field computations around the nearby cycles of the ramified
//! unitary local model of signature `(n-1, 1)`.
//!
//! Modules, bottom up: [`ffield`] (arithmetic in `F_q`), [`charsum`]
//! (quadratic-character Jacobi sums), [`quadric`] (point counts of diagonal
//! quadrics), [`hermitian`] (hermitian data and their residual quadrics),
//! [`localmodel`] (special-fiber enumeration and its blow-up), and
//! [`cohomology`] (weighted cohomology tables, spectral pages, stalks).

pub mod charsum;
pub mod cohomology;
pub mod error;
pub mod ffield;
pub mod hermitian;
pub mod localmodel;
pub mod quadric;
pub mod registry;

pub use error::{Error, Result};
pub use registry::Registry;
