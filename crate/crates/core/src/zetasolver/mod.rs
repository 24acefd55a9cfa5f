//! `ζ(∂_t² + h)φ = g` for sources on the half-line known through their
//! Laplace transforms: truncated angular contours `κ_r`, the truncated pair
//! `(g_r, φ_r)`, residue corrections and the limit `r → ∞`.

mod limit;
mod pair;
mod source;

pub use limit::{check_source_recovery, f_infinity, in_sector, LimitReport, RecoveryReport};
pub use pair::{
    enclosing_contour, ResidueTerm, TruncatedPair, DEFAULT_DELTA, DEFAULT_PSI, DEFAULT_R_SCHEDULE, MIN_PSI,
    POLE_CLEARANCE,
};
pub use source::{make_source, LaplaceSource, SourceKind};
