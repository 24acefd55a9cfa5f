use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{inv_two_pi_i, is_finite, C64};
use crate::contours::{circle, integrate, winding_number, Contour, Discretization, Integral, QuadratureConfig, Rule};
use crate::error::{Error, Result};
use crate::symbols::gamma::ln_factorial;

use super::entire::EntireFn;
use super::estimate::estimate_type;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    Pole { order: u32 },
    Branch,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    #[serde(with = "crate::complex::serde_pair")]
    pub location: C64,
    pub kind: SingularityKind,
}

pub type BorelEval = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// An analytic function vanishing at infinity, known off a declared
/// singular set: isolated points and, optionally, a curve carrying a
/// Cauchy-transform density.
#[derive(Clone)]
pub struct BorelFn {
    eval: BorelEval,
    singularities: Vec<Singularity>,
    support: Option<Contour>,
    conjugate_diagram_radius: f64,
}

impl fmt::Debug for BorelFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BorelFn")
            .field("singularities", &self.singularities)
            .field("support", &self.support.as_ref().map(|c| c.label().to_string()))
            .field("conjugate_diagram_radius", &self.conjugate_diagram_radius)
            .finish()
    }
}

/// Points at which [`BorelFn::check`] probes decay at infinity.
const DECAY_PROBE: f64 = 1e6;

impl BorelFn {
    pub fn new(
        eval: impl Fn(C64) -> C64 + Send + Sync + 'static,
        singularities: Vec<Singularity>,
        support: Option<Contour>,
    ) -> Self {
        let mut radius = singularities.iter().map(|s| s.location.norm()).fold(0.0, f64::max);
        if let Some(c) = &support {
            radius = radius.max(c.max_modulus());
        }
        BorelFn { eval: Arc::new(eval), singularities, support, conjugate_diagram_radius: radius }
    }

    /// `(1/2πi) ∫_support density(ω) / (w − ω) dω`, frozen on a fixed
    /// discretization with panels no longer than `max_panel`.
    pub fn cauchy_transform<F>(support: Contour, density: F, max_panel: f64, level: u32) -> Result<Self>
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let disc = Discretization::with_max_panel(&support, 32, Rule::GaussLegendre, max_panel, level);
        let values: Vec<C64> = disc.nodes.iter().map(|&s| density(s)).collect();
        if let Some(k) = values.iter().position(|v| !is_finite(*v)) {
            return Err(Error::SingularityOnPath { point: disc.nodes[k] });
        }
        let weighted: Vec<C64> = values.iter().zip(&disc.weights).map(|(v, w)| v * w * inv_two_pi_i()).collect();
        let nodes = disc.nodes;
        let eval = move |z: C64| {
            let mut total = C64::new(0.0, 0.0);
            for (w, s) in weighted.iter().zip(&nodes) {
                total += w / (z - s);
            }
            total
        };
        Ok(Self::new(eval, vec![], Some(support)))
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.eval)(z)
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    pub fn support(&self) -> Option<&Contour> {
        self.support.as_ref()
    }

    pub fn conjugate_diagram_radius(&self) -> f64 {
        self.conjugate_diagram_radius
    }

    /// Points a Polya contour must enclose: the isolated singularities and
    /// a sampling of the support curve.
    pub fn enclosure_points(&self) -> Vec<C64> {
        let mut pts: Vec<C64> = self.singularities.iter().map(|s| s.location).collect();
        if let Some(c) = &self.support {
            for seg in c.segments() {
                for k in 0..=8 {
                    pts.push(seg.point(k as f64 / 8.0));
                }
            }
        }
        pts
    }

    /// Finite away from the singular set and small at infinity.
    pub fn check(&self) -> Result<()> {
        let r = self.conjugate_diagram_radius + 1.0;
        for k in 0..16 {
            let z = C64::from_polar(r, k as f64 * std::f64::consts::TAU / 16.0 + 0.1);
            if !is_finite(self.eval(z)) {
                return Err(Error::InvalidFunction(format!("Borel function not finite at {z}")));
            }
        }
        for k in 0..8 {
            let z = C64::from_polar(DECAY_PROBE, k as f64 * std::f64::consts::TAU / 8.0);
            let v = self.eval(z);
            if !(v.norm() < 1e-3) {
                return Err(Error::InvalidFunction(format!("Borel function does not vanish at infinity: |B({z})| = {}", v.norm())));
            }
        }
        Ok(())
    }
}

/// `B(φ)(z) = Σ_k Σ_d p_{k,d} d! / (z − λ_k)^{d+1}`.
pub fn borel_exact(f: &EntireFn) -> Result<BorelFn> {
    if !f.has_terms() {
        return Err(Error::InvalidFunction("exact Borel transform needs the term representation".into()));
    }
    f.validate()?;
    let terms: Vec<(C64, Vec<C64>)> = f
        .terms
        .iter()
        .map(|t| {
            let mut fact = 1.0;
            let scaled = t
                .poly
                .iter()
                .enumerate()
                .map(|(d, p)| {
                    if d > 0 {
                        fact *= d as f64;
                    }
                    p * fact
                })
                .collect();
            (t.lambda, scaled)
        })
        .collect();
    let singularities = f
        .terms
        .iter()
        .map(|t| Singularity { location: t.lambda, kind: SingularityKind::Pole { order: t.poly.len() as u32 } })
        .collect();
    let eval = move |z: C64| {
        let mut total = C64::new(0.0, 0.0);
        for (lambda, coeffs) in &terms {
            let inv = (z - lambda).inv();
            let mut pow = inv;
            for c in coeffs {
                total += c * pow;
                pow *= inv;
            }
        }
        total
    };
    Ok(BorelFn::new(eval, singularities, None))
}

/// A truncated series value with its remainder estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEstimate {
    #[serde(with = "crate::complex::serde_pair")]
    pub value: C64,
    pub remainder: f64,
}

/// `Σ a_n n! / z^{n+1}` for `|z| > 1.1 σ̂`.
pub fn borel_series(series: &[C64], z: C64) -> Result<SeriesEstimate> {
    let sigma = estimate_type(series)?;
    if !(z.norm() > 1.1 * sigma) {
        return Err(Error::OutsideDomain {
            point: z,
            reason: format!("Borel series converges only for |z| > {:.6} (1.1 × estimated type)", 1.1 * sigma),
        });
    }
    let ln_z = z.ln();
    let mut value = C64::new(0.0, 0.0);
    let mut last = 0.0;
    for (n, a) in series.iter().enumerate() {
        if *a == C64::new(0.0, 0.0) {
            continue;
        }
        let log_mag = ln_factorial(n) - (n as f64 + 1.0) * ln_z;
        let term = a * log_mag.exp();
        value += term;
        last = term.norm();
    }
    // geometric tail with ratio σ̂/|z| beyond the last retained term
    let q = sigma / z.norm();
    Ok(SeriesEstimate { value, remainder: last * q / (1.0 - q) })
}

fn check_enclosure(points: &[C64], gamma: &Contour) -> Result<()> {
    if !gamma.is_closed() {
        return Err(Error::InvalidContour(format!("{} is not closed", gamma.label())));
    }
    for &p in points {
        let w = winding_number(gamma, p).map_err(|_| {
            Error::InvalidContour(format!("{} passes through the singularity {p}", gamma.label()))
        })?;
        if w != 1 {
            return Err(Error::InvalidContour(format!(
                "{} winds {w} times around the singularity {p}; it must enclose it once",
                gamma.label()
            )));
        }
    }
    Ok(())
}

/// `φ(z) = (1/2πi) ∮_γ e^{sz} B(s) ds`.
pub fn polya_reconstruct(b: &BorelFn, gamma: &Contour, z: C64, cfg: &QuadratureConfig) -> Result<Integral> {
    check_enclosure(&b.enclosure_points(), gamma)?;
    Ok(integrate(|s| (s * z).exp() * b.eval(s), gamma, cfg)?.scaled(inv_two_pi_i()))
}

/// Default Polya contour for `f`: a circle about the centre of the
/// exponents' bounding box with radius `1.25 ρ + 0.5`, `ρ` the largest
/// distance from the centre to an exponent. Series-only functions use the
/// origin and their type.
pub fn default_polya_contour(f: &EntireFn) -> Result<Contour> {
    let (center, spread) = if f.has_terms() {
        let c = bbox_center(f.terms.iter().map(|t| t.lambda));
        (c, f.terms.iter().map(|t| (t.lambda - c).norm()).fold(0.0, f64::max))
    } else {
        (C64::new(0.0, 0.0), f.type_bound()?)
    };
    circle(center, 1.25 * spread + 0.5)
}

pub(crate) fn bbox_center(points: impl Iterator<Item = C64>) -> C64 {
    let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in points {
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    if !lo.re.is_finite() {
        return C64::new(0.0, 0.0);
    }
    (lo + hi) * 0.5
}

/// A complex measure `density(s) ds/(2πi)` on a contour.
#[derive(Clone)]
pub struct ContourMeasure {
    pub support: Contour,
    density: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
}

impl fmt::Debug for ContourMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContourMeasure({})", self.support.label())
    }
}

impl ContourMeasure {
    pub fn new(support: Contour, density: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Result<Self> {
        let m = ContourMeasure { support, density: Arc::new(density) };
        let disc = Discretization::new(&m.support, 8, Rule::GaussLegendre, 0);
        if let Some(s) = disc.nodes.iter().find(|s| !is_finite(m.density(**s))) {
            return Err(Error::SingularityOnPath { point: *s });
        }
        Ok(m)
    }

    pub fn density(&self, s: C64) -> C64 {
        (self.density)(s)
    }

    /// `‖μ‖ = ∫ |density| |ds| / (2π)`.
    pub fn total_variation(&self, cfg: &QuadratureConfig) -> Result<f64> {
        let disc = Discretization::new(&self.support, cfg.nodes_per_segment, cfg.rule, 2);
        let mut total = 0.0;
        for (s, w) in disc.nodes.iter().zip(&disc.weights) {
            total += self.density(*s).norm() * w.norm();
        }
        Ok(total / std::f64::consts::TAU)
    }
}

/// `𝒫(μ)(z) = ∫ e^{sz} dμ(s)`.
pub fn p_transform(mu: &ContourMeasure, z: C64, cfg: &QuadratureConfig) -> Result<Integral> {
    Ok(integrate(|s| (s * z).exp() * mu.density(s), &mu.support, cfg)?.scaled(inv_two_pi_i()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exptype::ExpTerm;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn exact_transforms() {
        let lam = c(0.5, -0.3);
        let b = borel_exact(&EntireFn::exp(lam)).unwrap();
        let z = c(2.0, 1.0);
        assert!((b.eval(z) - (z - lam).inv()).norm() < 1e-15);
        let b = borel_exact(&EntireFn::polyexp(vec![c(0.0, 0.0), c(1.0, 0.0)], lam)).unwrap();
        assert!((b.eval(z) - (z - lam).powi(-2)).norm() < 1e-15);
        assert_eq!(b.singularities()[0].kind, SingularityKind::Pole { order: 2 });
        let one = borel_exact(&EntireFn::exp(c(0.0, 0.0))).unwrap();
        assert!((one.eval(z) - z.inv()).norm() < 1e-16);
        b.check().unwrap();
    }

    #[test]
    fn series_transform() {
        let e = EntireFn::exp(c(1.0, 0.0)).taylor(64);
        let v = borel_series(&e, c(3.0, 0.0)).unwrap();
        assert!((v.value - c(0.5, 0.0)).norm() < 1e-15 + v.remainder);
        let mut zed = vec![c(0.0, 0.0); 16];
        zed[1] = c(1.0, 0.0);
        assert!((borel_series(&zed, c(2.0, 0.0)).unwrap().value - c(0.25, 0.0)).norm() < 1e-16);
        // cos: z/(z² + 1), oracle by partial fractions
        let cs = EntireFn::cos(c(1.0, 0.0)).taylor(64);
        let v = borel_series(&cs, c(2.0, 0.0)).unwrap();
        assert!((v.value - c(0.4, 0.0)).norm() < 1e-12);
        assert!(matches!(borel_series(&e, c(1.05, 0.0)), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn polya_examples() {
        let b = borel_exact(&EntireFn::exp(c(0.5, 0.0))).unwrap();
        let v = polya_reconstruct(&b, &circle(c(0.0, 0.0), 1.5).unwrap(), c(1.0, 0.0), &cfg()).unwrap();
        assert!((v.value - c(0.5f64.exp(), 0.0)).norm() < 1e-12);
        let zz = BorelFn::new(|s| s.powi(-2), vec![Singularity { location: c(0.0, 0.0), kind: SingularityKind::Pole { order: 2 } }], None);
        let t = c(0.7, -0.2);
        let v = polya_reconstruct(&zz, &circle(c(0.3, 0.0), 2.0).unwrap(), t, &cfg()).unwrap();
        assert!((v.value - t).norm() < 1e-13);
    }

    #[test]
    fn polya_rejects_bad_contours() {
        let b = borel_exact(&EntireFn::exp(c(2.0, 0.0))).unwrap();
        let small = circle(c(0.0, 0.0), 1.0).unwrap();
        assert!(matches!(polya_reconstruct(&b, &small, c(1.0, 0.0), &cfg()), Err(Error::InvalidContour(_))));
        let through = circle(c(0.0, 0.0), 2.0).unwrap();
        assert!(matches!(polya_reconstruct(&b, &through, c(1.0, 0.0), &cfg()), Err(Error::InvalidContour(_))));
        let reversed = circle(c(0.0, 0.0), 3.0).unwrap().reversed();
        assert!(polya_reconstruct(&b, &reversed, c(1.0, 0.0), &cfg()).is_err());
    }

    #[test]
    fn roundtrip_mixed_function() {
        // (1 + 2z) e^{−z} + e^{2iz}; direct evaluation is the oracle
        let f = EntireFn::from_terms(vec![
            ExpTerm::new(vec![c(1.0, 0.0), c(2.0, 0.0)], c(-1.0, 0.0)),
            ExpTerm::new(vec![c(1.0, 0.0)], c(0.0, 2.0)),
        ])
        .unwrap();
        let b = borel_exact(&f).unwrap();
        let gamma = default_polya_contour(&f).unwrap();
        for k in 0..10 {
            let z = C64::from_polar(0.2 * k as f64, 0.7 * k as f64);
            let v = polya_reconstruct(&b, &gamma, z, &cfg()).unwrap();
            let exact = f.eval(z);
            assert!((v.value - exact).norm() <= 1e-9 * exact.norm(), "z = {z}");
        }
    }

    #[test]
    fn cauchy_transform_of_rational_density() {
        // density 1/(ω − λ) on a circle around λ: the Cauchy transform outside is 1/(w − λ)
        let lam = c(0.2, 0.1);
        let support = circle(c(0.0, 0.0), 1.0).unwrap();
        let b = BorelFn::cauchy_transform(support, move |w| (w - lam).inv(), 0.5, 1).unwrap();
        let w = c(2.5, -1.0);
        assert!((b.eval(w) - (w - lam).inv()).norm() < 1e-13);
        b.check().unwrap();
        let gamma = circle(c(0.0, 0.0), 2.0).unwrap();
        let v = polya_reconstruct(&b, &gamma, c(1.0, 1.0), &cfg()).unwrap();
        assert!((v.value - (lam * c(1.0, 1.0)).exp()).norm() < 1e-11);
    }

    #[test]
    fn p_transform_examples_and_bound() {
        let lam = c(0.7, -0.4);
        let support = circle(c(0.0, 0.0), lam.norm() + 1.0).unwrap();
        let mu = ContourMeasure::new(support.clone(), move |s| (s - lam).inv()).unwrap();
        let z = c(1.3, 0.5);
        let v = p_transform(&mu, z, &cfg()).unwrap();
        assert!((v.value - (lam * z).exp()).norm() < 1e-12);
        let zero = ContourMeasure::new(support.clone(), |_| c(0.0, 0.0)).unwrap();
        assert_eq!(p_transform(&zero, z, &cfg()).unwrap().value, c(0.0, 0.0));
        let tv = mu.total_variation(&cfg()).unwrap();
        let r = support.max_modulus();
        for zz in [c(2.0, 0.0), c(-3.0, 1.0), c(0.0, 5.0)] {
            let val = p_transform(&mu, zz, &cfg()).unwrap().value;
            assert!(val.norm() <= (r * zz.norm()).exp() * tv);
        }
    }
}
