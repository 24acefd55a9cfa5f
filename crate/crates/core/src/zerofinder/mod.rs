//! Zeros of symbols: argument-principle scans, a certified catalogue of
//! ζ-zeros and the pullback to `ζ(s² + h)`.

mod catalog;
mod pullback;
mod scan;

pub use catalog::{
    build_zeta_catalog, CatalogZero, ZetaZeroCatalog, CATALOG_RESIDUAL_TOL, CATALOG_VERSION, MAX_CATALOG_SIZE,
};
pub use pullback::zeros_of_zeta_shifted;
pub use scan::{
    central_difference, difference_step, newton, scan_fn, scan_zeros, tight_count, ZeroMethod, ZeroRecord,
    MAX_JITTERS, RESIDUAL_TOL, TIGHT_HALF_SIDE,
};
