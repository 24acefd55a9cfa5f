use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::complex::C64;
use crate::error::{Error, Result};

/// Endpoint matching tolerance, scaled by `max(1, |p|)`.
pub const JOIN_TOL: f64 = 1e-12;

/// A smooth arc parametrized over `u ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// Circular arc `center + radius·e^{i(start + u·sweep)}`; the sign of
    /// `sweep` carries the direction.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, u: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * u,
            Segment::Arc { center, radius, start, sweep } => {
                center + C64::from_polar(radius, start + u * sweep)
            }
        }
    }

    /// `dγ/du`
    pub fn derivative(&self, u: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => {
                C64::new(0.0, sweep) * C64::from_polar(radius, start + u * sweep)
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, sweep } => Segment::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }

    /// The piece of this segment over `[u0, u1]`, reparametrized to `[0, 1]`.
    pub fn sub(&self, u0: f64, u1: f64) -> Segment {
        match *self {
            Segment::Line { .. } => Segment::Line { from: self.point(u0), to: self.point(u1) },
            Segment::Arc { center, radius, start, sweep } => Segment::Arc {
                center,
                radius,
                start: start + u0 * sweep,
                sweep: (u1 - u0) * sweep,
            },
        }
    }

    fn is_degenerate(&self) -> bool {
        match *self {
            Segment::Line { from, to } => (to - from).norm() <= JOIN_TOL * from.norm().max(1.0),
            Segment::Arc { radius, sweep, .. } => {
                !(radius > 0.0) || !(sweep.abs() > 0.0) || !radius.is_finite() || !sweep.is_finite()
            }
        }
    }
}

/// An oriented, piecewise-smooth path built from lines and circular arcs.
/// Immutable once constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    label: String,
    closed: bool,
    segments: Vec<Segment>,
}

fn close_enough(a: C64, b: C64) -> bool {
    (a - b).norm() <= JOIN_TOL * a.norm().max(b.norm()).max(1.0)
}

impl Contour {
    pub fn new(label: impl Into<String>, segments: Vec<Segment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidGeometry("contour has no segments".into()));
        }
        for (k, seg) in segments.iter().enumerate() {
            if seg.is_degenerate() {
                return Err(Error::InvalidGeometry(format!("segment {k} is degenerate")));
            }
        }
        for (k, pair) in segments.windows(2).enumerate() {
            if !close_enough(pair[0].end(), pair[1].start()) {
                return Err(Error::InvalidGeometry(format!(
                    "segment {k} ends at {} but segment {} starts at {}",
                    pair[0].end(),
                    k + 1,
                    pair[1].start()
                )));
            }
        }
        if closed && !close_enough(segments[segments.len() - 1].end(), segments[0].start()) {
            return Err(Error::InvalidGeometry("closed contour does not return to its start".into()));
        }
        Ok(Contour { label: label.into(), closed, segments })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> C64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> C64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn reversed(&self) -> Contour {
        Contour {
            label: format!("reversed({})", self.label),
            closed: self.closed,
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Contour {
        self.label = label.into();
        self
    }

    /// Minimum distance from `p` to the path, estimated on a fine sampling.
    pub fn distance_to(&self, p: C64) -> f64 {
        let mut best = f64::INFINITY;
        for seg in &self.segments {
            match *seg {
                Segment::Line { from, to } => {
                    let d = to - from;
                    let u = (((p - from) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                    best = best.min((from + d * u - p).norm());
                }
                Segment::Arc { .. } => {
                    const SAMPLES: usize = 256;
                    for k in 0..=SAMPLES {
                        best = best.min((seg.point(k as f64 / SAMPLES as f64) - p).norm());
                    }
                }
            }
        }
        best
    }

    /// Largest modulus reached on the path (sampled for arcs).
    pub fn max_modulus(&self) -> f64 {
        let mut best: f64 = 0.0;
        for seg in &self.segments {
            match *seg {
                Segment::Line { from, to } => best = best.max(from.norm()).max(to.norm()),
                Segment::Arc { center, radius, .. } => best = best.max(center.norm() + radius),
            }
        }
        best
    }
}

/// Positively oriented circle, split into four quarter arcs.
pub fn circle(center: C64, radius: f64) -> Result<Contour> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidGeometry(format!("circle radius must be positive, got {radius}")));
    }
    let segments = (0..4)
        .map(|k| Segment::Arc { center, radius, start: k as f64 * FRAC_PI_2, sweep: FRAC_PI_2 })
        .collect();
    Contour::new(format!("circle({center}, {radius})"), segments, true)
}

/// Positively oriented boundary of the box `[ll.re, ur.re] × [ll.im, ur.im]`.
pub fn rectangle(lower_left: C64, upper_right: C64) -> Result<Contour> {
    if !(upper_right.re > lower_left.re && upper_right.im > lower_left.im) {
        return Err(Error::InvalidGeometry(format!(
            "rectangle corners {lower_left} and {upper_right} do not span a box"
        )));
    }
    let lr = C64::new(upper_right.re, lower_left.im);
    let ul = C64::new(lower_left.re, upper_right.im);
    let segments = vec![
        Segment::Line { from: lower_left, to: lr },
        Segment::Line { from: lr, to: upper_right },
        Segment::Line { from: upper_right, to: ul },
        Segment::Line { from: ul, to: lower_left },
    ];
    Contour::new(format!("rectangle({lower_left}, {upper_right})"), segments, true)
}

/// Closed polygon through `points` (in order, not repeating the first).
pub fn polygon(label: impl Into<String>, points: &[C64]) -> Result<Contour> {
    if points.len() < 3 {
        return Err(Error::InvalidGeometry("polygon needs at least three vertices".into()));
    }
    let segments = (0..points.len())
        .map(|k| Segment::Line { from: points[k], to: points[(k + 1) % points.len()] })
        .collect();
    Contour::new(label, segments, true)
}

/// Radius beyond which ray panels have constant length.
pub const RAY_GRADING_END: f64 = 5.0;
/// Initial ray panel length at the arc.
const RAY_FIRST_PANEL: f64 = 0.25;
/// Growth rate of panel length with distance along the ray.
const RAY_GRADING_RATE: f64 = 0.5;

/// Breakpoints `δ = ρ_0 < ρ_1 < … < ρ_m = r` along a ray of the angular
/// contour. Panel length grows like `e^{0.5(ρ-δ)}` up to radius 5, then
/// stays at 5 with breakpoints on multiples of 5, so contours with the same
/// `δ` and radii `r1 < r2` share every panel below `r1` when `r1` is a
/// multiple of 5.
pub fn ray_breakpoints(delta: f64, r: f64) -> Vec<f64> {
    let mut pts = vec![delta];
    let mut rho = delta;
    while rho < RAY_GRADING_END {
        let step = RAY_FIRST_PANEL * (RAY_GRADING_RATE * (rho - delta)).exp();
        let next = rho + step;
        // Avoid a sliver before the uniform zone.
        rho = if next > RAY_GRADING_END - 0.5 * step { RAY_GRADING_END } else { next };
        pts.push(rho);
    }
    loop {
        let next = rho + RAY_GRADING_END;
        if next >= r {
            break;
        }
        rho = next;
        pts.push(rho);
    }
    pts.retain(|&p| p < r);
    pts.push(r);
    pts
}

/// The truncated angular contour: a ray inbound at angle `-ψ` from radius
/// `r` to `δ`, the arc of radius `δ` through angle 0, and a ray outbound at
/// angle `+ψ` back to radius `r`, all relative to `vertex`.
pub fn angular_contour(vertex: C64, psi: f64, delta: f64, r: f64) -> Result<Contour> {
    if !(psi > FRAC_PI_2 && psi <= PI) {
        return Err(Error::InvalidAngle { psi, range: "(π/2, π]" });
    }
    if !(delta > 0.0 && delta < r) || !r.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "angular contour needs 0 < δ < r, got δ = {delta}, r = {r}"
        )));
    }
    let breaks = ray_breakpoints(delta, r);
    let down = C64::from_polar(1.0, -psi);
    let up = C64::from_polar(1.0, psi);
    let mut segments = Vec::with_capacity(2 * breaks.len() + 1);
    for w in breaks.windows(2).rev() {
        segments.push(Segment::Line { from: vertex + down * w[1], to: vertex + down * w[0] });
    }
    segments.push(Segment::Arc { center: vertex, radius: delta, start: -psi, sweep: 2.0 * psi });
    for w in breaks.windows(2) {
        segments.push(Segment::Line { from: vertex + up * w[0], to: vertex + up * w[1] });
    }
    Contour::new(format!("kappa(psi={psi}, delta={delta}, r={r})"), segments, false)
}

/// Arclength of an angular contour, `2(r − δ) + 2ψδ`.
pub fn angular_arclength(psi: f64, delta: f64, r: f64) -> f64 {
    2.0 * (r - delta) + 2.0 * psi * delta
}

// ---------------------------------------------------------------------------
// JSON encoding

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SegmentKind {
    Line,
    Arc,
}

#[derive(Serialize, Deserialize)]
struct SegmentRepr {
    kind: SegmentKind,
    from: [f64; 2],
    to: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ContourRepr {
    label: String,
    closed: bool,
    segments: Vec<SegmentRepr>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl Serialize for Contour {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let segments = self
            .segments
            .iter()
            .map(|seg| match *seg {
                Segment::Line { from, to } => SegmentRepr {
                    kind: SegmentKind::Line,
                    from: pair(from),
                    to: pair(to),
                    center: None,
                    radius: None,
                    start_angle: None,
                    sweep: None,
                },
                Segment::Arc { center, radius, start, sweep } => SegmentRepr {
                    kind: SegmentKind::Arc,
                    from: pair(seg.start()),
                    to: pair(seg.end()),
                    center: Some(pair(center)),
                    radius: Some(radius),
                    start_angle: Some(start),
                    sweep: Some(sweep),
                },
            })
            .collect();
        ContourRepr { label: self.label.clone(), closed: self.closed, segments }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Contour {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ContourRepr::deserialize(d)?;
        let mut segments = Vec::with_capacity(repr.segments.len());
        for s in repr.segments {
            let seg = match s.kind {
                SegmentKind::Line => Segment::Line { from: unpair(s.from), to: unpair(s.to) },
                SegmentKind::Arc => {
                    let center = unpair(s.center.ok_or_else(|| D::Error::missing_field("center"))?);
                    let from = unpair(s.from);
                    let to = unpair(s.to);
                    let radius = s.radius.unwrap_or_else(|| (from - center).norm());
                    let start = s.start_angle.unwrap_or_else(|| (from - center).arg());
                    let sweep = match s.sweep {
                        Some(w) => w,
                        None => {
                            // Without an explicit sweep, take the counter-clockwise
                            // arc; equal endpoints mean a full turn.
                            let mut w = (to - center).arg() - start;
                            while w <= 0.0 {
                                w += TAU;
                            }
                            w
                        }
                    };
                    let arc = Segment::Arc { center, radius, start, sweep };
                    if !close_enough(arc.start(), from) || !close_enough(arc.end(), to) {
                        return Err(D::Error::custom("arc endpoints inconsistent with center/radius/angles"));
                    }
                    arc
                }
            };
            segments.push(seg);
        }
        Contour::new(repr.label, segments, repr.closed).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_closed_and_positive() {
        let c = circle(C64::new(0.0, 0.0), 1.0).unwrap();
        assert!(c.is_closed());
        assert!((c.length() - TAU).abs() < 1e-14);
        // positively oriented: the first quarter moves up from (1, 0)
        assert!(c.segments()[0].derivative(0.0).im > 0.0);
    }

    #[test]
    fn circle_rejects_bad_radius() {
        assert!(matches!(circle(C64::new(0.0, 0.0), 0.0), Err(Error::InvalidGeometry(_))));
        assert!(matches!(circle(C64::new(0.0, 0.0), -1.0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn rectangle_rejects_degenerate_box() {
        assert!(rectangle(C64::new(0.0, 0.0), C64::new(0.0, 1.0)).is_err());
        assert!(rectangle(C64::new(0.0, 1.0), C64::new(1.0, 1.0)).is_err());
        assert!(rectangle(C64::new(1.0, 1.0), C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn angular_contour_endpoints_and_length() {
        let psi = 7.0 * PI / 8.0;
        let k = angular_contour(C64::new(0.0, 0.0), psi, 0.1, 5.0).unwrap();
        assert!((k.start() - C64::from_polar(5.0, -psi)).norm() < 1e-13);
        assert!((k.end() - C64::from_polar(5.0, psi)).norm() < 1e-13);
        assert!((k.length() - angular_arclength(psi, 0.1, 5.0)).abs() < 1e-12);
        assert!(!k.is_closed());
    }

    #[test]
    fn angular_contour_rejects_bad_angle() {
        for psi in [1.0, FRAC_PI_2, PI + 0.01] {
            assert!(matches!(
                angular_contour(C64::new(0.0, 0.0), psi, 0.1, 5.0),
                Err(Error::InvalidAngle { .. })
            ));
        }
        assert!(angular_contour(C64::new(0.0, 0.0), 2.5, 1.0, 0.5).is_err());
    }

    #[test]
    fn shorter_kappa_is_subpath_of_longer() {
        let psi = 0.875 * PI;
        let short = angular_contour(C64::new(0.0, 0.0), psi, 0.1, 10.0).unwrap();
        let long = angular_contour(C64::new(0.0, 0.0), psi, 0.1, 40.0).unwrap();
        let n_short = short.segments().len();
        let n_long = long.segments().len();
        // Middle (arc-adjacent) segments coincide exactly.
        let extra = (n_long - n_short) / 2;
        assert_eq!(&long.segments()[extra..extra + n_short], short.segments());
    }

    #[test]
    fn ray_breakpoints_are_increasing_and_aligned() {
        let b = ray_breakpoints(0.1, 80.0);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*b.last().unwrap(), 80.0);
        for r in [10.0, 20.0, 40.0] {
            assert!(b.contains(&r));
        }
        let short = ray_breakpoints(0.1, 3.0);
        assert_eq!(*short.last().unwrap(), 3.0);
    }

    #[test]
    fn discontinuous_segments_rejected() {
        let segs = vec![
            Segment::Line { from: C64::new(0.0, 0.0), to: C64::new(1.0, 0.0) },
            Segment::Line { from: C64::new(1.0, 1e-6), to: C64::new(2.0, 0.0) },
        ];
        assert!(Contour::new("bad", segs, false).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = angular_contour(C64::new(0.5, 0.0), 2.7, 0.2, 7.0).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Contour = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        let circ = circle(C64::new(1.0, -1.0), 2.0).unwrap();
        let back: Contour = serde_json::from_str(&serde_json::to_string(&circ).unwrap()).unwrap();
        assert_eq!(back, circ);
    }

    #[test]
    fn json_arc_without_angles() {
        let text = r#"{"label":"half","closed":false,"segments":[
            {"kind":"arc","from":[1,0],"to":[-1,0],"center":[0,0]}]}"#;
        let c: Contour = serde_json::from_str(text).unwrap();
        assert!((c.length() - PI).abs() < 1e-12);
    }

    #[test]
    fn reversal_swaps_endpoints() {
        let k = angular_contour(C64::new(0.0, 0.0), 2.6, 0.1, 6.0).unwrap();
        let r = k.reversed();
        assert!((r.start() - k.end()).norm() < 1e-14);
        assert!((r.end() - k.start()).norm() < 1e-14);
    }
}
