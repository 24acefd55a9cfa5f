use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{is_finite, C64};
use crate::contours::{count_zeros, rectangle};
use crate::error::{Error, Result};
use crate::symbols::SymbolSpec;

/// Attempts made when a zero sits on a cell boundary.
pub const MAX_JITTERS: usize = 5;

/// Half the side of the isolating box used to certify a refined zero.
pub const TIGHT_HALF_SIDE: f64 = 2.5e-4;

/// Largest residual `|f|` accepted at a reported zero.
pub const RESIDUAL_TOL: f64 = 1e-8;

const NEWTON_MAX_ITER: usize = 60;
const NEWTON_STOP: f64 = 1e-14;

/// How a zero was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroMethod {
    Pullback,
    Scan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    #[serde(with = "crate::complex::serde_pair")]
    pub location: C64,
    pub multiplicity: u32,
    pub residual: f64,
    pub method: ZeroMethod,
    #[serde(with = "crate::complex::serde_pair")]
    pub derivative_at_zero: C64,
}

/// Central-difference step at `s`.
pub fn difference_step(s: C64) -> f64 {
    1e-6 * s.norm().max(1.0)
}

/// `f'(s)` by central difference.
pub fn central_difference<F: Fn(C64) -> C64>(f: &F, s: C64) -> C64 {
    let h = difference_step(s);
    (f(s + h) - f(s - h)) / (2.0 * h)
}

/// Newton iteration `s ← s − m f/f'`, abandoned once it wanders further
/// than `reach` from the start. Returns the point with the smallest `|f|`.
pub fn newton<F: Fn(C64) -> C64>(f: &F, start: C64, multiplicity: u32, reach: f64) -> Option<C64> {
    let mut s = start;
    let mut best = (f64::INFINITY, start);
    for _ in 0..NEWTON_MAX_ITER {
        let v = f(s);
        if !is_finite(v) {
            return None;
        }
        if v.norm() < best.0 {
            best = (v.norm(), s);
        }
        if v.norm() == 0.0 {
            return Some(s);
        }
        let d = central_difference(f, s);
        if !is_finite(d) || d.norm() == 0.0 {
            break;
        }
        let step = multiplicity as f64 * v / d;
        s -= step;
        if !is_finite(s) || (s - start).norm() > reach {
            return None;
        }
        if step.norm() <= NEWTON_STOP * s.norm().max(1.0) {
            let v = f(s);
            if is_finite(v) && v.norm() < best.0 {
                best = (v.norm(), s);
            }
            return Some(best.1);
        }
    }
    best.0.is_finite().then_some(best.1)
}

/// Zero count in a square of half-side about `TIGHT_HALF_SIDE` around `s`,
/// retrying with other sizes if a zero lands on the boundary.
pub fn tight_count<F: Fn(C64) -> C64 + Sync>(f: &F, s: C64) -> Result<i64> {
    let mut last = None;
    for scale in [1.0, 1.23, 0.81, 1.57, 0.67] {
        let r = TIGHT_HALF_SIDE * scale;
        let d = C64::new(r, r);
        match count_zeros(f, &rectangle(s - d, s + d)?) {
            Ok(n) => return Ok(n),
            Err(e @ Error::ZeroOnBoundary { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn jitter(k: usize) -> (f64, f64) {
    const J: [(f64, f64); MAX_JITTERS] =
        [(0.0, 0.0), (0.0137, 0.0219), (-0.0191, 0.0113), (0.0263, -0.0171), (-0.0311, -0.0293)];
    J[k]
}

fn inside(p: C64, ll: C64, ur: C64) -> bool {
    let tol = 1e-9 * (ur - ll).norm();
    p.re >= ll.re - tol && p.re <= ur.re + tol && p.im >= ll.im - tol && p.im <= ur.im + tol
}

fn box_count<F: Fn(C64) -> C64 + Sync>(f: &F, ll: C64, ur: C64) -> Result<i64> {
    count_zeros(f, &rectangle(ll, ur)?)
}

type Cell = (C64, C64, i64);

/// Quadrisects a cell, moving the split point if a zero lies on a new edge.
fn split<F: Fn(C64) -> C64 + Sync>(f: &F, ll: C64, ur: C64, count: i64) -> Result<[Cell; 4]> {
    let size = ur - ll;
    let mut last = None;
    for k in 0..MAX_JITTERS {
        let (jx, jy) = jitter(k);
        let m = C64::new(ll.re + size.re * (0.5 + jx), ll.im + size.im * (0.5 + jy));
        let boxes = [
            (ll, m),
            (C64::new(m.re, ll.im), C64::new(ur.re, m.im)),
            (C64::new(ll.re, m.im), C64::new(m.re, ur.im)),
            (m, ur),
        ];
        let counts: Vec<Result<i64>> = boxes.par_iter().map(|&(a, b)| box_count(f, a, b)).collect();
        match counts.into_iter().collect::<Result<Vec<i64>>>() {
            Ok(c) if c.iter().sum::<i64>() == count => {
                return Ok([
                    (boxes[0].0, boxes[0].1, c[0]),
                    (boxes[1].0, boxes[1].1, c[1]),
                    (boxes[2].0, boxes[2].1, c[2]),
                    (boxes[3].0, boxes[3].1, c[3]),
                ]);
            }
            Ok(c) => last = Some(format!("sub-cell counts {c:?} do not add up to {count}")),
            Err(Error::ZeroOnBoundary { near, .. }) => last = Some(format!("zero on a cell edge near {near}")),
            Err(e) => return Err(e),
        }
    }
    Err(Error::ScanFailure(format!(
        "cell [{ll}, {ur}]: {} after {MAX_JITTERS} jitters",
        last.unwrap_or_default()
    )))
}

fn record<F: Fn(C64) -> C64>(f: &F, s: C64, multiplicity: u32) -> ZeroRecord {
    ZeroRecord {
        location: s,
        multiplicity,
        residual: f(s).norm(),
        method: ZeroMethod::Scan,
        derivative_at_zero: central_difference(f, s),
    }
}

fn process<F: Fn(C64) -> C64 + Sync>(f: &F, cell: Cell, depth: u32, max_depth: u32) -> Result<Vec<ZeroRecord>> {
    let (ll, ur, count) = cell;
    if count <= 0 {
        return Ok(Vec::new());
    }
    let m = count as u32;
    let centroid = 0.5 * (ll + ur);
    let diag = (ur - ll).norm();
    if let Some(s) = newton(f, centroid, m, 2.0 * diag) {
        if inside(s, ll, ur) && tight_count(f, s).ok() == Some(count) {
            return Ok(vec![record(f, s, m)]);
        }
    }
    if depth >= max_depth {
        if count == 1 {
            return Err(Error::ScanFailure(format!("Newton did not converge in cell [{ll}, {ur}]")));
        }
        log::warn!("depth limit reached with {count} zeros in [{ll}, {ur}]");
        return Ok(vec![record(f, centroid, m)]);
    }
    let children = split(f, ll, ur, count)?;
    let parts: Vec<Result<Vec<ZeroRecord>>> =
        children.par_iter().map(|&c| process(f, c, depth + 1, max_depth)).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Zeros of `f` in the box `[lower_left, upper_right]` by recursive
/// quadrisection and argument-principle counts.
pub fn scan_fn<F>(f: F, lower_left: C64, upper_right: C64, max_depth: u32) -> Result<Vec<ZeroRecord>>
where
    F: Fn(C64) -> C64 + Sync,
{
    rectangle(lower_left, upper_right)?;
    let size = upper_right - lower_left;
    let mut root = None;
    for k in 0..MAX_JITTERS {
        let (jx, jy) = jitter(k);
        let d = C64::new(jx * size.re, jy * size.im) * 0.1;
        let (ll, ur) = (lower_left - d, upper_right + d);
        match box_count(&f, ll, ur) {
            Ok(n) => {
                root = Some((ll, ur, n));
                break;
            }
            Err(Error::ZeroOnBoundary { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let Some(root) = root else {
        return Err(Error::ScanFailure(format!("zero on the boundary of [{lower_left}, {upper_right}] persists")));
    };
    if root.2 < 0 {
        return Err(Error::ScanFailure("negative count: the box contains a pole".into()));
    }
    let mut out: Vec<ZeroRecord> = Vec::new();
    for r in process(&f, root, 0, max_depth)? {
        if !out.iter().any(|o| (o.location - r.location).norm() < 1e-8) {
            out.push(r);
        }
    }
    Ok(out)
}

/// [`scan_fn`] for a symbol, refusing boxes that contain its poles.
pub fn scan_zeros(f: &SymbolSpec, lower_left: C64, upper_right: C64, max_depth: u32) -> Result<Vec<ZeroRecord>> {
    if let Some(p) = f.poles().iter().find(|p| inside(**p, lower_left, upper_right)) {
        return Err(Error::ScanFailure(format!("box contains the pole {p} of {}", f.label())));
    }
    scan_fn(|s| f.value_or_nan(s), lower_left, upper_right, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::zeta::zeta_or_nan;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn simple_quadratic() {
        let mut z = scan_fn(|s| s * s - 1.0, c(-2.0, -2.0), c(2.0, 2.0), 8).unwrap();
        z.sort_by(|a, b| a.location.re.total_cmp(&b.location.re));
        assert_eq!(z.len(), 2);
        assert!((z[0].location + 1.0).norm() < 1e-12 && (z[1].location - 1.0).norm() < 1e-12);
        assert!(z.iter().all(|r| r.multiplicity == 1 && r.residual <= RESIDUAL_TOL));
        assert!((z[1].derivative_at_zero - 2.0).norm() < 1e-8);
    }

    #[test]
    fn triple_zero() {
        let i = c(0.0, 1.0);
        let z = scan_fn(|s| (s - i).powi(3), c(-0.5, 0.5), c(0.5, 1.5), 8).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].multiplicity, 3);
        assert!((z[0].location - i).norm() < 1e-4);
    }

    #[test]
    fn first_zeta_zeros() {
        let mut z = scan_fn(zeta_or_nan, c(0.0, 10.0), c(1.0, 30.0), 12).unwrap();
        z.sort_by(|a, b| a.location.im.total_cmp(&b.location.im));
        let t: Vec<f64> = z.iter().map(|r| r.location.im).collect();
        assert_eq!(t.len(), 3);
        for (got, want) in t.iter().zip([14.1347, 21.0220, 25.0109]) {
            assert!((got - want).abs() < 1e-4);
        }
        for r in &z {
            assert!(r.residual <= 1e-10);
            // a further Newton step barely moves the point
            let again = newton(&zeta_or_nan, r.location, 1, 1.0).unwrap();
            assert!((again - r.location).norm() < 1e-10);
        }
    }

    #[test]
    fn pole_in_box_is_refused() {
        let f = SymbolSpec::reciprocal();
        assert!(matches!(scan_zeros(&f, c(-1.0, -1.0), c(1.0, 1.0), 4), Err(Error::ScanFailure(_))));
    }
}
