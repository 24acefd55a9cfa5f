use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{Contour, Segment};
use crate::complex::{is_finite, C64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    GaussLegendre,
    Trapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub nodes_per_segment: usize,
    pub rule: Rule,
    /// Relative change between successive refinements that counts as converged.
    pub refine_until: f64,
    /// Number of panel doublings allowed after the base level.
    pub max_refinements: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes_per_segment: 32,
            rule: Rule::GaussLegendre,
            refine_until: 1e-10,
            max_refinements: 7,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_segment < 4 {
            return Err(Error::InvalidGeometry(format!(
                "nodes_per_segment must be at least 4, got {}",
                self.nodes_per_segment
            )));
        }
        if !(self.refine_until > 0.0) {
            return Err(Error::InvalidGeometry("refine_until must be positive".into()));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.refine_until = tol;
        self
    }
}

type Rule1d = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss–Legendre nodes and weights on `[0, 1]`, cached per order.
pub fn gauss_legendre(n: usize) -> Rule1d {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule1d>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1, 1] → [0, 1], ascending
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wt;
        w[n - 1 - i] = 0.5 * wt;
    }
    (x, w)
}

fn trapezoid(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / (n - 1) as f64;
    let x = (0..n).map(|k| k as f64 * h).collect();
    let w = (0..n)
        .map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h })
        .collect();
    (x, w)
}

/// A frozen node/weight set on a contour: `∫_γ f(s) ds ≈ Σ w_k f(s_k)`.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub nodes: Vec<C64>,
    /// Complex weights, already including `γ'(u)`.
    pub weights: Vec<C64>,
}

impl Discretization {
    /// Splits every segment into `2^level` equal panels of `n` nodes.
    pub fn new(path: &Contour, n: usize, rule: Rule, level: u32) -> Self {
        Self::build(path, n, rule, |_| 1usize << level)
    }

    /// Splits every segment into enough equal panels that none is longer
    /// than `max_len`, then applies `2^level` further splits.
    pub fn with_max_panel(path: &Contour, n: usize, rule: Rule, max_len: f64, level: u32) -> Self {
        Self::build(path, n, rule, |seg| {
            let base = (seg.length() / max_len).ceil().max(1.0) as usize;
            base << level
        })
    }

    fn build(path: &Contour, n: usize, rule: Rule, panels_for: impl Fn(&Segment) -> usize) -> Self {
        let (x, w) = match rule {
            Rule::GaussLegendre => {
                let r = gauss_legendre(n);
                (r.0.clone(), r.1.clone())
            }
            Rule::Trapezoid => trapezoid(n),
        };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for seg in path.segments() {
            let panels = panels_for(seg);
            let h = 1.0 / panels as f64;
            for p in 0..panels {
                let u0 = p as f64 * h;
                for (xi, wi) in x.iter().zip(&w) {
                    let u = u0 + h * xi;
                    nodes.push(seg.point(u));
                    weights.push(seg.derivative(u) * (h * wi));
                }
            }
        }
        Discretization { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Evaluates `density` at every node (in parallel) and returns the
    /// weighted sum together with `Σ |w f|`. The reduction runs in node
    /// order so results are bit-stable.
    pub fn apply<F>(&self, density: F) -> Result<(C64, f64)>
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let values: Vec<C64> = if self.nodes.len() >= 64 {
            self.nodes.par_iter().map(|&s| density(s)).collect()
        } else {
            self.nodes.iter().map(|&s| density(s)).collect()
        };
        self.sum(&values)
    }

    /// Weighted sum of precomputed node values.
    pub fn sum(&self, values: &[C64]) -> Result<(C64, f64)> {
        let mut total = C64::new(0.0, 0.0);
        let mut mass = 0.0;
        for ((v, w), s) in values.iter().zip(&self.weights).zip(&self.nodes) {
            if !is_finite(*v) {
                return Err(Error::SingularityOnPath { point: *s });
            }
            let term = v * w;
            total += term;
            mass += term.norm();
        }
        Ok((total, mass))
    }
}

/// A converged contour integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    #[serde(with = "crate::complex::serde_pair")]
    pub value: C64,
    /// `|I_k − I_{k−1}|` for the last refinement.
    pub error_estimate: f64,
    /// `Σ |w f|` at the final level; scales the roundoff floor.
    pub mass: f64,
    pub nodes: usize,
    pub level: u32,
}

impl Integral {
    /// The same integral multiplied by a constant (e.g. `1/(2πi)`).
    pub fn scaled(self, c: C64) -> Integral {
        let m = c.norm();
        Integral { value: self.value * c, error_estimate: self.error_estimate * m, mass: self.mass * m, ..self }
    }
}

/// Roundoff floor multiplier: differences below `ROUNDOFF · ε · mass` count as converged.
const ROUNDOFF: f64 = 64.0;

/// `∫_path density(s) ds` (no `1/(2πi)` factor), refined by panel doubling
/// until successive levels agree to `cfg.refine_until` relative, or to the
/// roundoff floor of the integrand's absolute mass.
pub fn integrate<F>(density: F, path: &Contour, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(C64) -> C64 + Sync,
{
    integrate_with(density, cfg, |level| {
        Discretization::new(path, cfg.nodes_per_segment, cfg.rule, level)
    })
}

/// As [`integrate`], with base panels capped at `max_len`.
pub fn integrate_max_panel<F>(
    density: F,
    path: &Contour,
    cfg: &QuadratureConfig,
    max_len: f64,
) -> Result<Integral>
where
    F: Fn(C64) -> C64 + Sync,
{
    integrate_with(density, cfg, |level| {
        Discretization::with_max_panel(path, cfg.nodes_per_segment, cfg.rule, max_len, level)
    })
}

fn integrate_with<F, D>(density: F, cfg: &QuadratureConfig, disc: D) -> Result<Integral>
where
    F: Fn(C64) -> C64 + Sync,
    D: Fn(u32) -> Discretization,
{
    cfg.validate()?;
    let first = disc(0);
    let (mut prev, _) = first.apply(&density)?;
    let mut last = None;
    for level in 1..=cfg.max_refinements.max(1) {
        let d = disc(level);
        let (value, mass) = d.apply(&density)?;
        let diff = (value - prev).norm();
        let out = Integral { value, error_estimate: diff, mass, nodes: d.len(), level };
        if diff <= cfg.refine_until * value.norm() || diff <= ROUNDOFF * f64::EPSILON * mass {
            return Ok(out);
        }
        prev = value;
        last = Some(out);
    }
    let last = last.expect("at least one refinement");
    Err(Error::NoConvergence { best: last.value, estimate: last.error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::path::{angular_contour, circle, rectangle};
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = &*gauss_legendre(8);
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        // degree 15 is exact for 8 nodes
        let i: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((i - 1.0 / 16.0).abs() < 1e-15);
        let (x5, _) = &*gauss_legendre(5);
        assert!((x5[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cauchy_integral_of_reciprocal() {
        let cfg = QuadratureConfig::default();
        let i = integrate(|s| 1.0 / s, &circle(c(0.0, 0.0), 1.0).unwrap(), &cfg).unwrap();
        let v = i.value * crate::complex::inv_two_pi_i();
        assert!((v - c(1.0, 0.0)).norm() < 1e-13, "{v}");
    }

    #[test]
    fn analytic_integrand_vanishes() {
        let cfg = QuadratureConfig::default();
        let i = integrate(|s| s * s, &circle(c(0.0, 0.0), 1.0).unwrap(), &cfg).unwrap();
        assert!(i.value.norm() < 1e-14);
        let r = integrate(|s| s.exp(), &rectangle(c(-1.0, -2.0), c(3.0, 1.0)).unwrap(), &cfg).unwrap();
        assert!(r.value.norm() < 1e-12 * r.mass.max(1.0));
    }

    #[test]
    fn residue_at_one() {
        // e^s/(s-1) on |s| = 2; residue oracle gives e.
        let cfg = QuadratureConfig::default();
        let i = integrate(|s| s.exp() / (s - 1.0), &circle(c(0.0, 0.0), 2.0).unwrap(), &cfg).unwrap();
        let v = i.value * crate::complex::inv_two_pi_i();
        assert!((v - c(E, 0.0)).norm() < 1e-12, "{v}");
        // doubling nodes leaves the value stable
        let cfg64 = QuadratureConfig { nodes_per_segment: 64, ..cfg };
        let j = integrate(|s| s.exp() / (s - 1.0), &circle(c(0.0, 0.0), 2.0).unwrap(), &cfg64).unwrap();
        assert!((j.value - i.value).norm() < 1e-10);
    }

    #[test]
    fn trapezoid_rule_also_converges() {
        let cfg = QuadratureConfig { rule: Rule::Trapezoid, nodes_per_segment: 16, ..Default::default() };
        let i = integrate(|s| 1.0 / s, &circle(c(0.0, 0.0), 1.0).unwrap(), &cfg).unwrap();
        assert!((i.value - c(0.0, 2.0 * PI)).norm() < 1e-9);
    }

    #[test]
    fn singularity_on_path_reported() {
        let cfg = QuadratureConfig { nodes_per_segment: 5, ..Default::default() };
        // GL with an odd node count puts a node at the midpoint of each panel.
        let seg = rectangle(c(-1.0, -1.0), c(1.0, 1.0)).unwrap();
        let err = integrate(|s| 1.0 / (s - c(0.0, -1.0)), &seg, &cfg).unwrap_err();
        assert!(matches!(err, Error::SingularityOnPath { .. }));
    }

    #[test]
    fn no_convergence_carries_best_estimate() {
        let cfg = QuadratureConfig { max_refinements: 1, refine_until: 1e-15, ..Default::default() };
        // Pole very close to the path.
        let err = integrate(|s| 1.0 / (s - c(1.0 + 1e-4, 0.0)), &circle(c(0.0, 0.0), 1.0).unwrap(), &cfg)
            .unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }

    #[test]
    fn reversal_negates() {
        let cfg = QuadratureConfig::default();
        let k = angular_contour(c(0.0, 0.0), 2.7, 0.1, 6.0).unwrap();
        let f = |s: C64| (s * 0.7).exp() / s;
        let a = integrate(f, &k, &cfg).unwrap().value;
        let b = integrate(f, &k.reversed(), &cfg).unwrap().value;
        assert!((a + b).norm() < 1e-13 * a.norm());
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig { nodes_per_segment: 3, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig { refine_until: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
