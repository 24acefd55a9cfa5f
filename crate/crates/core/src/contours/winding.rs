use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;

use super::path::Contour;
use crate::complex::{is_finite, C64};
use crate::error::{Error, Result};

/// Relative threshold: `min |f| < ZERO_ON_BOUNDARY · max |f|` on the
/// boundary samples means a zero is (nearly) on the path.
pub const ZERO_ON_BOUNDARY: f64 = 1e-8;

/// Default number of uniform samples per segment.
pub const DEFAULT_SAMPLES: usize = 64;

const MAX_BISECTIONS: u32 = 40;

/// Number of zeros minus poles of `f` inside the closed contour, i.e. the
/// winding number of `f∘γ` about 0.
pub fn count_zeros<F>(f: F, path: &Contour) -> Result<i64>
where
    F: Fn(C64) -> C64 + Sync,
{
    count_zeros_with(f, path, DEFAULT_SAMPLES)
}

/// [`count_zeros`] with an explicit number of initial samples per segment.
pub fn count_zeros_with<F>(f: F, path: &Contour, samples: usize) -> Result<i64>
where
    F: Fn(C64) -> C64 + Sync,
{
    if !path.is_closed() {
        return Err(Error::InvalidContour("zero counting needs a closed contour".into()));
    }
    let samples = samples.max(4);
    struct Probe {
        z: C64,
        v: C64,
    }
    let mut turns = 0.0;
    let mut min_abs = f64::INFINITY;
    let mut max_abs: f64 = 0.0;
    let mut near = C64::new(0.0, 0.0);

    for seg in path.segments() {
        let params: Vec<f64> = (0..=samples).map(|k| k as f64 / samples as f64).collect();
        let probes: Vec<Probe> = params
            .par_iter()
            .map(|&u| {
                let z = seg.point(u);
                Probe { z, v: f(z) }
            })
            .collect();
        for p in &probes {
            if !is_finite(p.v) {
                return Err(Error::SingularityOnPath { point: p.z });
            }
        }
        for k in 0..samples {
            let (a, b) = (&probes[k], &probes[k + 1]);
            let mut track = |z: C64, v: C64| {
                let m = v.norm();
                if m < min_abs {
                    min_abs = m;
                    near = z;
                }
                max_abs = max_abs.max(m);
            };
            track(a.z, a.v);
            track(b.z, b.v);
            turns += arg_increment(&f, seg, params[k], params[k + 1], a.v, b.v, 0, &mut track)?;
        }
    }
    if min_abs < ZERO_ON_BOUNDARY * max_abs || min_abs == 0.0 {
        return Err(Error::ZeroOnBoundary { min: min_abs, max: max_abs, near });
    }
    Ok((turns / TAU).round() as i64)
}

/// Argument change of `f` between parameters `u0` and `u1` on `seg`,
/// bisecting any step whose principal increment exceeds π/2.
#[allow(clippy::too_many_arguments)]
fn arg_increment<F, T>(
    f: &F,
    seg: &super::path::Segment,
    u0: f64,
    u1: f64,
    v0: C64,
    v1: C64,
    depth: u32,
    track: &mut T,
) -> Result<f64>
where
    F: Fn(C64) -> C64,
    T: FnMut(C64, C64),
{
    let step = (v1 / v0).arg();
    if step.abs() <= FRAC_PI_2 {
        return Ok(step);
    }
    if depth >= MAX_BISECTIONS {
        // Cannot resolve: the function changes too fast, which only happens
        // right next to a zero or pole on the path.
        return Err(Error::ZeroOnBoundary { min: v0.norm().min(v1.norm()), max: f64::NAN, near: seg.point(u0) });
    }
    let um = 0.5 * (u0 + u1);
    let zm = seg.point(um);
    let vm = f(zm);
    if !is_finite(vm) {
        return Err(Error::SingularityOnPath { point: zm });
    }
    track(zm, vm);
    Ok(arg_increment(f, seg, u0, um, v0, vm, depth + 1, track)?
        + arg_increment(f, seg, um, u1, vm, v1, depth + 1, track)?)
}

/// Winding number of the closed contour about `p`.
pub fn winding_number(path: &Contour, p: C64) -> Result<i64> {
    count_zeros(|s| s - p, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::path::{circle, rectangle};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn circle_winding() {
        let unit = circle(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!(winding_number(&unit, c(0.0, 0.0)).unwrap(), 1);
        let off = circle(c(2.0, 0.0), 0.5).unwrap();
        assert_eq!(winding_number(&off, c(0.0, 0.0)).unwrap(), 0);
        assert_eq!(winding_number(&unit.reversed(), c(0.1, 0.2)).unwrap(), -1);
    }

    #[test]
    fn double_zero_counted_twice() {
        let b = rectangle(c(-1.0, -1.0), c(1.0, 1.0)).unwrap();
        assert_eq!(count_zeros(|s| s * s, &b).unwrap(), 2);
        assert_eq!(winding_number(&b, c(0.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn exponential_has_no_zeros() {
        for (ll, ur) in [(c(-3.0, -3.0), c(3.0, 3.0)), (c(0.0, 10.0), c(5.0, 40.0))] {
            let b = rectangle(ll, ur).unwrap();
            assert_eq!(count_zeros(|s| s.exp(), &b).unwrap(), 0);
        }
    }

    #[test]
    fn zero_on_boundary_detected() {
        let b = rectangle(c(-1.0, -1.0), c(1.0, 1.0)).unwrap();
        let err = count_zeros(|s| s - c(1.0, 0.0), &b).unwrap_err();
        assert!(matches!(err, Error::ZeroOnBoundary { .. }));
    }

    #[test]
    fn rapid_phase_is_resolved_by_bisection() {
        // e^{12 s} rotates by more than π/2 between samples on the vertical sides.
        let b = rectangle(c(-0.5, -6.0), c(0.5, 6.0)).unwrap();
        assert_eq!(count_zeros(|s| (s * 12.0).exp() * (s - c(0.1, 0.3)), &b).unwrap(), 1);
    }

    #[test]
    fn refinement_invariance() {
        let b = rectangle(c(-2.0, -2.0), c(2.0, 2.0)).unwrap();
        let f = |s: C64| (s * s - 1.0) * (s - c(0.5, 1.5)).powu(3);
        let a = count_zeros_with(f, &b, 16).unwrap();
        let d = count_zeros_with(f, &b, 32).unwrap();
        assert_eq!(a, 5);
        assert_eq!(a, d);
    }

    #[test]
    fn additivity_over_subboxes() {
        let f = |s: C64| (s - c(0.3, 0.2)) * (s - c(-0.6, 0.7)) * (s - c(0.8, -0.4)) * (s + c(0.5, 0.5));
        let parent = count_zeros(f, &rectangle(c(-1.0, -1.0), c(1.0, 1.0)).unwrap()).unwrap();
        let quads = [
            (c(-1.0, -1.0), c(0.05, 0.05)),
            (c(0.05, -1.0), c(1.0, 0.05)),
            (c(-1.0, 0.05), c(0.05, 1.0)),
            (c(0.05, 0.05), c(1.0, 1.0)),
        ];
        let sum: i64 = quads
            .iter()
            .map(|&(a, b)| count_zeros(f, &rectangle(a, b).unwrap()).unwrap())
            .sum();
        assert_eq!(parent, 4);
        assert_eq!(sum, parent);
    }

    #[test]
    fn open_contour_rejected() {
        let k = crate::contours::path::angular_contour(c(0.0, 0.0), 2.7, 0.1, 3.0).unwrap();
        assert!(count_zeros(|s| s, &k).is_err());
    }
}
