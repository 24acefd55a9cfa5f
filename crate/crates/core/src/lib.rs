//! Borel-transform calculus for nonlocal operators `f(∂_t)` with analytic
//! symbols.
//!
//! An entire function of exponential type is carried through its Borel
//! transform; applying `f(∂_t)` multiplies the Borel density by `f` under a
//! contour integral. On top of that sit a Riemann zeta engine for the
//! symbol `ζ(s² + h)`, argument-principle zero certification, a solver for
//! `f(∂_t)φ = g`, and the angular-contour limit for sources that are only
//! known through their Laplace transform.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the formulas in the numerical kernels.
#![allow(clippy::needless_range_loop)]

pub mod complex;
pub mod contours;
pub mod error;
pub mod exptype;
pub mod operator;
pub mod solver;
pub mod symbols;
pub mod zerofinder;
pub mod zetasolver;

pub use complex::C64;
pub use error::{Error, Result};
