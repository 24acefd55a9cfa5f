//! Oriented paths in the complex plane, Gauss–Legendre contour quadrature
//! and argument-principle zero counting.

mod path;
mod quadrature;
mod winding;

pub use path::{
    angular_arclength, angular_contour, circle, polygon, ray_breakpoints, rectangle, Contour, Segment,
    JOIN_TOL, RAY_GRADING_END,
};
pub use quadrature::{
    gauss_legendre, integrate, integrate_max_panel, Discretization, Integral, QuadratureConfig, Rule,
};
pub use winding::{count_zeros, count_zeros_with, winding_number, DEFAULT_SAMPLES, ZERO_ON_BOUNDARY};
