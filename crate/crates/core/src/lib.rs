//! Generalized Tracy–Widom distributions `F_k(x; w_1, …, w_k)` for spiked
//! complex sample covariance matrices.
//!
//! Two independent routes are provided for every distribution:
//!
//! * [`fredholm`]: Nyström discretization of the Airy operator on `(x, ∞)`
//!   and the resolvent inner products that define `F_k` directly.
//! * [`painleve`]: the Hastings–McLeod solution of Painlevé II together with
//!   the Lax pair for `(f, g)`, giving closed-form and determinantal formulas.
//!
//! [`opuc`] holds the orthogonal-polynomials-on-the-unit-circle machinery
//! (Toeplitz determinants, the lattice operator representation and its
//! scaling limit), and [`models`] the last passage percolation / TASEP
//! simulators used to validate the limit laws by Monte Carlo.

pub mod error;
pub mod fredholm;
pub mod models;
pub mod opuc;
pub mod painleve;
pub mod special_functions;

pub(crate) mod series;

pub use error::{Error, Result};
