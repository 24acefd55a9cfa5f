//! Entire functions of exponential type: exp-poly sums and truncated power
//! series, order and type estimates, the Borel transform, Polya
//! reconstruction and the P-transform of contour measures.

mod borel;
mod entire;
mod estimate;

pub use borel::{
    borel_exact, borel_series, default_polya_contour, p_transform, polya_reconstruct, BorelEval, BorelFn,
    ContourMeasure, SeriesEstimate, Singularity, SingularityKind,
};
pub(crate) use borel::bbox_center;
pub use entire::{EntireFn, ExpTerm, REPRESENTATION_TOL};
pub use estimate::{estimate_order, estimate_type, MIN_TERMS};
