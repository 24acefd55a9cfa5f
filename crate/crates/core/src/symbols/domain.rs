use std::fmt;
use std::sync::Arc;

use crate::complex::C64;
use crate::contours::{Contour, Segment};

/// Distance below which a point counts as lying on an excluded ray.
pub const ON_RAY_TOL: f64 = 1e-12;

/// Samples per segment used when checking that a contour stays in a domain.
const PATH_SAMPLES: usize = 512;

/// A closed ray `{start + ρ e^{iθ} : ρ ≥ 0}` removed from the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub start: C64,
    pub angle: f64,
}

impl Ray {
    pub fn new(start: C64, angle: f64) -> Self {
        Ray { start, angle }
    }

    fn local(&self, p: C64) -> C64 {
        (p - self.start) * C64::from_polar(1.0, -self.angle)
    }

    pub fn distance(&self, p: C64) -> f64 {
        let q = self.local(p);
        if q.re >= 0.0 {
            q.im.abs()
        } else {
            q.norm()
        }
    }

    /// Whether the chord `[a, b]` meets the ray.
    pub fn crosses(&self, a: C64, b: C64) -> bool {
        let (qa, qb) = (self.local(a), self.local(b));
        if qa.im == qb.im {
            return qa.im.abs() <= ON_RAY_TOL && qa.re.max(qb.re) >= 0.0;
        }
        if qa.im.signum() == qb.im.signum() && qa.im.abs() > ON_RAY_TOL && qb.im.abs() > ON_RAY_TOL {
            return false;
        }
        let u = qa.im / (qa.im - qb.im);
        qa.re + u * (qb.re - qa.re) >= -ON_RAY_TOL
    }
}

#[derive(Clone)]
pub enum DomainKind {
    /// The plane with closed rays removed. `h` records the shift when the
    /// rays come from `ζ(s² + h)`.
    PlaneMinusRays { rays: Vec<Ray>, h: Option<f64> },
    PlaneMinusPoint { point: C64 },
    /// `Re s > bound`.
    HalfPlane { bound: f64 },
    /// Open disc.
    Ball { center: C64, radius: f64 },
    Whole,
    Custom { label: String, runge: bool, test: Arc<dyn Fn(C64) -> bool + Send + Sync> },
}

/// The holomorphy domain `Ω` of a symbol.
#[derive(Clone)]
pub struct DomainDescriptor {
    pub kind: DomainKind,
}

impl fmt::Debug for DomainDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DomainDescriptor({})", self.describe())
    }
}

impl DomainDescriptor {
    pub fn new(kind: DomainKind) -> Self {
        DomainDescriptor { kind }
    }

    pub fn whole() -> Self {
        Self::new(DomainKind::Whole)
    }

    pub fn plane_minus_point(point: C64) -> Self {
        Self::new(DomainKind::PlaneMinusPoint { point })
    }

    pub fn half_plane(bound: f64) -> Self {
        Self::new(DomainKind::HalfPlane { bound })
    }

    pub fn ball(center: C64, radius: f64) -> Self {
        Self::new(DomainKind::Ball { center, radius })
    }

    pub fn rays(rays: Vec<Ray>) -> Self {
        Self::new(DomainKind::PlaneMinusRays { rays, h: None })
    }

    pub fn custom(
        label: impl Into<String>,
        runge: bool,
        test: impl Fn(C64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self::new(DomainKind::Custom { label: label.into(), runge, test: Arc::new(test) })
    }

    pub fn contains(&self, p: C64) -> bool {
        if !(p.re.is_finite() && p.im.is_finite()) {
            return false;
        }
        match &self.kind {
            DomainKind::PlaneMinusRays { rays, .. } => rays.iter().all(|r| r.distance(p) > ON_RAY_TOL),
            DomainKind::PlaneMinusPoint { point } => (p - point).norm() > ON_RAY_TOL,
            DomainKind::HalfPlane { bound } => p.re > *bound,
            DomainKind::Ball { center, radius } => (p - center).norm() < *radius,
            DomainKind::Whole => true,
            DomainKind::Custom { test, .. } => test(p),
        }
    }

    /// Simply connected domains, where `f(∂_t)` does not depend on the
    /// choice of contour.
    pub fn is_runge(&self) -> bool {
        match &self.kind {
            DomainKind::PlaneMinusPoint { .. } => false,
            DomainKind::Custom { runge, .. } => *runge,
            _ => true,
        }
    }

    /// Distance from `p` to the complement, when it has a simple closed form.
    pub fn boundary_distance(&self, p: C64) -> Option<f64> {
        match &self.kind {
            DomainKind::PlaneMinusRays { rays, .. } => {
                Some(rays.iter().map(|r| r.distance(p)).fold(f64::INFINITY, f64::min))
            }
            DomainKind::PlaneMinusPoint { point } => Some((p - point).norm()),
            DomainKind::HalfPlane { bound } => Some((p.re - bound).max(0.0)),
            DomainKind::Ball { center, radius } => Some((radius - (p - center).norm()).max(0.0)),
            DomainKind::Whole => Some(f64::INFINITY),
            DomainKind::Custom { .. } => None,
        }
    }

    /// Whether every point of the contour lies in the domain: sampled
    /// membership plus an exact crossing test against excluded rays.
    pub fn contains_path(&self, path: &Contour) -> bool {
        for seg in path.segments() {
            let mut prev = seg.start();
            if !self.contains(prev) {
                return false;
            }
            let n = match seg {
                Segment::Line { .. } if !matches!(self.kind, DomainKind::Custom { .. }) => 1,
                _ => PATH_SAMPLES,
            };
            for k in 1..=n {
                let p = seg.point(k as f64 / n as f64);
                if !self.contains(p) {
                    return false;
                }
                if let DomainKind::PlaneMinusRays { rays, .. } = &self.kind {
                    if rays.iter().any(|r| r.crosses(prev, p)) {
                        return false;
                    }
                }
                if let DomainKind::PlaneMinusPoint { point } = self.kind {
                    let d = p - prev;
                    let u = (((point - prev) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                    if (prev + d * u - point).norm() <= ON_RAY_TOL {
                        return false;
                    }
                }
                prev = p;
            }
            // Chords of an arc can miss a ray the arc itself touches; the
            // arc bulges by at most r(1 − cos(Δθ/2)).
            if let (Segment::Arc { radius, sweep, .. }, DomainKind::PlaneMinusRays { rays, .. }) = (seg, &self.kind) {
                let sag = radius * (1.0 - (0.5 * sweep.abs() / n as f64).cos());
                let min_dist = (0..=n)
                    .map(|k| seg.point(k as f64 / n as f64))
                    .flat_map(|p| rays.iter().map(move |r| r.distance(p)))
                    .fold(f64::INFINITY, f64::min);
                if min_dist <= 2.0 * sag {
                    return false;
                }
            }
        }
        true
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            DomainKind::PlaneMinusRays { rays, h } => {
                let list: Vec<String> = rays
                    .iter()
                    .map(|r| format!("ray from {} at angle {:.6}", r.start, r.angle))
                    .collect();
                match h {
                    Some(h) => format!("plane minus {} (h = {h})", list.join(", ")),
                    None => format!("plane minus {}", list.join(", ")),
                }
            }
            DomainKind::PlaneMinusPoint { point } => format!("plane minus {{{point}}}"),
            DomainKind::HalfPlane { bound } => format!("half-plane Re s > {bound}"),
            DomainKind::Ball { center, radius } => format!("disc |s - {center}| < {radius}"),
            DomainKind::Whole => "whole plane".into(),
            DomainKind::Custom { label, .. } => format!("custom domain {label}"),
        }
    }
}

/// Holomorphy domain of `ζ(s² + h)`.
///
/// * `h > 1`: rays `Re s ≥ 0, Im s = ±√(h−1)` starting at the poles;
/// * `h < 1`: rays `Im s ≥ 0, Re s = ±√(1−h)`;
/// * `h = 1`: the closed positive real axis, origin included.
pub fn omega_for_h(h: f64) -> DomainDescriptor {
    let rays = if h > 1.0 {
        let c = (h - 1.0).sqrt();
        vec![Ray::new(C64::new(0.0, c), 0.0), Ray::new(C64::new(0.0, -c), 0.0)]
    } else if h < 1.0 {
        let c = (1.0 - h).sqrt();
        let up = std::f64::consts::FRAC_PI_2;
        vec![Ray::new(C64::new(c, 0.0), up), Ray::new(C64::new(-c, 0.0), up)]
    } else {
        vec![Ray::new(C64::new(0.0, 0.0), 0.0)]
    };
    DomainDescriptor::new(DomainKind::PlaneMinusRays { rays, h: Some(h) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::{circle, rectangle};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn regimes_exclude_their_rays() {
        let o = omega_for_h(2.0);
        assert!(!o.contains(c(5.0, 1.0)));
        assert!(o.contains(c(-1.0, 1.0)));
        assert!(!o.contains(c(0.0, 1.0)) && !o.contains(c(0.0, -1.0)));
        assert!(o.contains(c(5.0, 1.0 + 1e-6)));

        let o = omega_for_h(0.75);
        assert!(!o.contains(c(0.5, 3.0)) && !o.contains(c(-0.5, 0.0)));
        assert!(o.contains(c(0.5, -0.1)));

        let o = omega_for_h(1.0);
        assert!(!o.contains(c(0.0, 0.0)) && !o.contains(c(2.0, 0.0)));
        assert!(o.contains(c(-2.0, 0.0)));
    }

    #[test]
    fn membership_matches_definition_on_random_probes() {
        let mut state = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for &h in &[3.0, 0.19] {
            let o = omega_for_h(h);
            let a = (h - 1.0).abs().sqrt();
            for _ in 0..100 {
                // snap half the probes onto the critical lines
                let mut p = c(-4.0 + 8.0 * next(), -4.0 + 8.0 * next());
                let snap = next() < 0.5;
                if snap {
                    if h > 1.0 {
                        p.im = a.copysign(p.im);
                    } else {
                        p.re = a.copysign(p.re);
                    }
                }
                let excluded = if h > 1.0 {
                    p.re >= 0.0 && (p.im.abs() - a).abs() == 0.0
                } else {
                    p.im >= 0.0 && (p.re.abs() - a).abs() == 0.0
                };
                assert_eq!(o.contains(p), !excluded, "h = {h}, p = {p}");
            }
        }
    }

    #[test]
    fn contour_crossing_detected() {
        let o = omega_for_h(2.0);
        assert!(o.contains_path(&circle(c(0.0, 0.0), 0.9).unwrap()));
        assert!(!o.contains_path(&circle(c(0.0, 0.0), 1.1).unwrap()));
        assert!(o.contains_path(&rectangle(c(1.8, -0.2), c(2.2, 0.2)).unwrap()));
        assert!(!o.contains_path(&rectangle(c(1.8, -0.2), c(2.2, 1.2)).unwrap()));
        // a box around a pole necessarily meets the ray starting there
        assert!(!o.contains_path(&rectangle(c(-1.0, 0.5), c(0.5, 1.5)).unwrap()));
        assert!(o.contains_path(&rectangle(c(-1.0, 0.5), c(-0.1, 1.5)).unwrap()));
        let punctured = DomainDescriptor::plane_minus_point(c(0.0, 0.0));
        assert!(!punctured.is_runge());
        assert!(punctured.contains_path(&circle(c(0.0, 0.0), 1.0).unwrap()));
    }
}
