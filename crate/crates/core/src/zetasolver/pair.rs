use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::source::LaplaceSource;
use crate::complex::{inv_two_pi_i, C64};
use crate::contours::{angular_contour, integrate, ray_breakpoints, Contour, QuadratureConfig, Segment};
use crate::error::{Error, Result};
use crate::exptype::BorelFn;
use crate::operator::{apply_borel, inadmissible};
use crate::symbols::SymbolSpec;
use crate::zerofinder::ZeroRecord;

/// Default half-angle of the angular contour.
pub const DEFAULT_PSI: f64 = 7.0 * PI / 8.0;
/// Default arc radius.
pub const DEFAULT_DELTA: f64 = 0.1;
/// Default truncation radii.
pub const DEFAULT_R_SCHEDULE: [f64; 4] = [10.0, 20.0, 40.0, 80.0];
/// Smallest half-angle accepted by the solver.
pub const MIN_PSI: f64 = 3.0 * PI / 4.0;
/// Required clearance between `κ_r` and the symbol's poles and cuts.
pub const POLE_CLEARANCE: f64 = 0.05;

const MAX_DELTA_HALVINGS: u32 = 10;
const MAX_OFFSET: f64 = 0.5;
const DISTANCE_SAMPLES: usize = 64;

/// Residue correction `c_j e^{τ_j z}` at a simple zero `τ_j` of `ζ(s²+h)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueTerm {
    #[serde(with = "crate::complex::serde_pair")]
    pub tau: C64,
    /// `ζ_j`, the derivative of `ζ(s²+h)` at `τ_j`.
    #[serde(with = "crate::complex::serde_pair")]
    pub zeta_j: C64,
    #[serde(with = "crate::complex::serde_pair")]
    pub c: C64,
}

/// Sampled points of a contour.
fn samples(path: &Contour) -> impl Iterator<Item = C64> + '_ {
    path.segments()
        .iter()
        .flat_map(|seg| (0..=DISTANCE_SAMPLES).map(move |k| seg.point(k as f64 / DISTANCE_SAMPLES as f64)))
}

/// Distance from `path` to the poles of `f` and the complement of its domain.
fn clearance(f: &SymbolSpec, path: &Contour) -> f64 {
    samples(path)
        .map(|p| {
            let cut = f.omega().boundary_distance(p).unwrap_or(f64::INFINITY);
            f.poles().iter().map(|q| (p - q).norm()).fold(cut, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Closed contour at distance `d` around `κ_r`: the boundary of the union of
/// the disc of radius `δ + d` and strips of half-width `d` about both rays.
pub fn enclosing_contour(psi: f64, delta: f64, r: f64, d: f64) -> Result<Contour> {
    let u = C64::from_polar(1.0, psi);
    let ub = u.conj();
    let i = C64::new(0.0, 1.0);
    let rr = delta + d;
    let t0 = (delta * delta + 2.0 * delta * d).sqrt();
    let beta = (d / rr).asin();
    let alpha = psi - beta;
    // inner offset lines meet on the negative real axis at parameter t_i
    let t_i = -d * psi.cos() / psi.sin();
    let meet = t_i * u - d * i * u;
    let inner_start = if meet.norm() > rr { t_i } else { t0 };
    if inner_start >= r || t0 >= r {
        return Err(Error::InvalidGeometry(format!("offset {d} is too large for a contour of radius {r}")));
    }
    let line = |dir: C64, off: C64, a: f64, b: f64| -> Vec<Segment> {
        let mut pts = vec![a];
        pts.extend(ray_breakpoints(delta, r).into_iter().filter(|&t| t > a.min(b) && t < a.max(b)));
        pts.push(b);
        if a > b {
            pts.sort_by(|x, y| y.total_cmp(x));
        } else {
            pts.sort_by(|x, y| x.total_cmp(y));
        }
        pts.windows(2).map(|w| Segment::Line { from: w[0] * dir + off, to: w[1] * dir + off }).collect()
    };
    let mut segs = vec![Segment::Arc { center: C64::new(0.0, 0.0), radius: rr, start: -alpha, sweep: 2.0 * alpha }];
    // upper ray: outer side, cap, inner side
    segs.extend(line(u, -d * i * u, t0, r));
    segs.push(Segment::Arc { center: r * u, radius: d, start: psi - FRAC_PI_2, sweep: PI });
    segs.extend(line(u, d * i * u, r, inner_start));
    if inner_start == t0 {
        segs.push(Segment::Arc {
            center: C64::new(0.0, 0.0),
            radius: rr,
            start: psi + beta,
            sweep: 2.0 * PI - 2.0 * (psi + beta),
        });
    }
    // lower ray: inner side, cap, outer side
    segs.extend(line(ub, -d * i * ub, inner_start, r));
    segs.push(Segment::Arc { center: r * ub, radius: d, start: -psi - FRAC_PI_2, sweep: PI });
    segs.extend(line(ub, d * i * ub, r, t0));
    Contour::new(format!("enclosing(kappa(psi={psi}, delta={delta}, r={r}), d={d})"), segs, true)
}

/// The truncated angular problem at radius `r`: `κ_r`, `g_r` and the
/// particular solution `φ_r` of `ζ(∂_t² + h) φ_r = g_r`.
#[derive(Clone)]
pub struct TruncatedPair {
    pub source: LaplaceSource,
    pub h: f64,
    pub psi: f64,
    pub delta: f64,
    pub r: f64,
    pub kappa: Contour,
    symbol: SymbolSpec,
}

impl TruncatedPair {
    /// Validates the parameters. `δ` is halved, with a warning, until `κ_r`
    /// clears the poles `±i√(h−1)` by [`POLE_CLEARANCE`].
    pub fn new(source: &LaplaceSource, h: f64, psi: f64, delta: f64, r: f64) -> Result<Self> {
        if !(h > 1.0) {
            return Err(Error::Unsupported(format!("angular-contour solver needs h > 1, got {h}")));
        }
        if !(psi > MIN_PSI && psi <= source.max_angle()) || !source.allows_angle(psi) {
            return Err(Error::InvalidAngle {
                psi,
                range: "(3π/4, ψ(g)], with ψ < π for sources with a branch cut",
            });
        }
        let symbol = SymbolSpec::zeta_shifted(h)?;
        let mut d = delta;
        for _ in 0..=MAX_DELTA_HALVINGS {
            let kappa = angular_contour(C64::new(0.0, 0.0), psi, d, r)?;
            if symbol.omega().contains_path(&kappa) && clearance(&symbol, &kappa) >= POLE_CLEARANCE {
                if d != delta {
                    log::warn!("δ reduced from {delta} to {d} to keep κ_r clear of the poles of ζ(s²+{h})");
                }
                return Ok(TruncatedPair { source: source.clone(), h, psi, delta: d, r, kappa, symbol });
            }
            d *= 0.5;
        }
        Err(Error::InvalidGeometry(format!(
            "κ_r stays within {POLE_CLEARANCE} of the poles ±i√{} for every δ ≤ {delta}; choose a smaller ψ",
            h - 1.0
        )))
    }

    pub fn symbol(&self) -> &SymbolSpec {
        &self.symbol
    }

    fn integral(&self, density: impl Fn(C64) -> C64 + Sync, cfg: &QuadratureConfig) -> Result<C64> {
        Ok(integrate(density, &self.kappa, cfg)?.value * inv_two_pi_i())
    }

    fn check_sector(&self, z: C64) {
        if z.norm() > 0.0 && z.arg().abs() >= self.psi - FRAC_PI_2 {
            log::warn!("z = {z} is outside the sector |arg z| < ψ − π/2; the ray integrals may not converge");
        }
    }

    /// `g_r(z) = ∫_{κ_r} e^{zs} ℒ(g)(s) ds/(2πi)`.
    pub fn g_r(&self, z: C64, cfg: &QuadratureConfig) -> Result<C64> {
        self.check_sector(z);
        self.integral(|s| (z * s).exp() * self.source.laplace(s), cfg)
    }

    /// `φ_r(z) = ∫_{κ_r} e^{zs} ℒ(g)(s)/ζ(s²+h) ds/(2πi)`.
    pub fn phi_r(&self, z: C64, cfg: &QuadratureConfig) -> Result<C64> {
        self.check_sector(z);
        self.integral(|s| (z * s).exp() * self.source.laplace(s) / self.symbol.value_or_nan(s), cfg)
    }

    /// Borel transform of `g_r` off `κ_r`: `∫_{κ_r} ℒ(g)(ω)/(z−ω) dω/(2πi)`.
    pub fn borel_g(&self, z: C64, cfg: &QuadratureConfig) -> Result<C64> {
        self.integral(|w| self.source.laplace(w) / (z - w), cfg)
    }

    /// Moments `a_n = ∫_{κ_r} s^n ℒ(g)(s) ds/(2πi)`, i.e. `g_r^{(n)}(0)`.
    pub fn moments(&self, n_max: usize, cfg: &QuadratureConfig) -> Result<Vec<C64>> {
        (0..=n_max).map(|n| self.integral(|s| s.powu(n as u32) * self.source.laplace(s), cfg)).collect()
    }

    /// Offset used for the enclosing contour: half the clearance of `κ_r`,
    /// at most 0.5.
    pub fn enclosing_offset(&self) -> f64 {
        (0.5 * clearance(&self.symbol, &self.kappa)).min(MAX_OFFSET)
    }

    /// A closed contour around `κ_r` inside `Ω`, leaving the poles outside.
    pub fn enclosing(&self) -> Result<Contour> {
        let mut d = self.enclosing_offset();
        let probes = [self.kappa.start(), C64::new(self.delta, 0.0), self.kappa.end()];
        for _ in 0..5 {
            if let Ok(c) = enclosing_contour(self.psi, self.delta, self.r, d) {
                if inadmissible(&self.symbol, &c, &probes, true).is_none() {
                    return Ok(c);
                }
            }
            d *= 0.5;
        }
        Err(Error::InvalidGeometry("no enclosing contour around κ_r stays inside Ω".into()))
    }

    /// Borel data of `φ_r`: the Cauchy transform of `ℒ(g)/ζ(s²+h)` on `κ_r`.
    pub fn borel_phi(&self, gamma: &Contour) -> Result<BorelFn> {
        let panel = (0.5 * gamma.distance_to(C64::new(self.delta, 0.0)).min(self.enclosing_offset())).min(0.25);
        let src = self.source.clone();
        let f = self.symbol.clone();
        BorelFn::cauchy_transform(self.kappa.clone(), move |s| src.laplace(s) / f.value_or_nan(s), panel, 0)
    }

    /// `|ζ(∂_t²+h) φ_r − g_r|` at each `t`, with the operator applied by
    /// contour integration of `φ_r`'s Borel data around `κ_r`.
    pub fn truncated_residuals(&self, ts: &[C64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
        let gamma = self.enclosing()?;
        let b = self.borel_phi(&gamma)?;
        ts.iter()
            .map(|&t| {
                let lhs = apply_borel(&self.symbol, &b, t, Some(&gamma), cfg)?.value;
                Ok((lhs - self.g_r(t, cfg)?).norm())
            })
            .collect()
    }

    /// `ζ(∂_t²+h) φ_r (t)` through the Borel data.
    pub fn apply_symbol(&self, ts: &[C64], cfg: &QuadratureConfig) -> Result<Vec<C64>> {
        let gamma = self.enclosing()?;
        let b = self.borel_phi(&gamma)?;
        ts.iter().map(|&t| Ok(apply_borel(&self.symbol, &b, t, Some(&gamma), cfg)?.value)).collect()
    }

    /// Residue corrections for certified simple zeros:
    /// `c_j = (1/ζ_j) ∫_{κ_r} ℒ(g)(ω)/(τ_j − ω) dω/(2πi)`.
    pub fn residue_terms(&self, zeros: &[ZeroRecord], cfg: &QuadratureConfig) -> Result<Vec<ResidueTerm>> {
        zeros
            .iter()
            .map(|z| {
                if z.multiplicity != 1 {
                    return Err(Error::MultiplicityUnsupported { tau: z.location, multiplicity: z.multiplicity });
                }
                if self.kappa.distance_to(z.location) < 1e-6 {
                    return Err(Error::Pinch { zero: z.location });
                }
                let c = self.borel_g(z.location, cfg)? / z.derivative_at_zero;
                Ok(ResidueTerm { tau: z.location, zeta_j: z.derivative_at_zero, c })
            })
            .collect()
    }

    /// `φ_r(z) + Σ c_j e^{τ_j z}`.
    pub fn phi_general(&self, z: C64, terms: &[ResidueTerm], cfg: &QuadratureConfig) -> Result<C64> {
        Ok(self.phi_r(z, cfg)? + terms.iter().map(|t| t.c * (t.tau * z).exp()).sum::<C64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::winding_number;
    use crate::zetasolver::make_source;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn enclosing_contour_shapes() {
        for (psi, delta, d) in [(DEFAULT_PSI, 0.1, 0.45), (0.8 * PI, 0.1, 0.05), (0.99 * PI, 0.2, 0.3)] {
            let c = enclosing_contour(psi, delta, 10.0, d).unwrap();
            let kappa = angular_contour(C64::new(0.0, 0.0), psi, delta, 10.0).unwrap();
            for seg in kappa.segments() {
                assert_eq!(winding_number(&c, seg.point(0.5)).unwrap(), 1);
            }
            let dist = (0..200).map(|k| c.segments()[k % c.segments().len()].point(0.37)).map(|p| kappa.distance_to(p));
            assert!(dist.fold(f64::INFINITY, f64::min) > 0.99 * d);
        }
    }

    #[test]
    fn parameter_validation() {
        let one = make_source("one").unwrap();
        assert!(matches!(TruncatedPair::new(&one, 1.0, DEFAULT_PSI, 0.1, 10.0), Err(Error::Unsupported(_))));
        assert!(matches!(TruncatedPair::new(&one, 2.0, 0.7 * PI, 0.1, 10.0), Err(Error::InvalidAngle { .. })));
        let half = make_source("power:0.5").unwrap();
        assert!(TruncatedPair::new(&half, 2.0, PI, 0.1, 10.0).is_err());
        // poles at ±0.1i sit on the default arc
        let p = TruncatedPair::new(&one, 1.01, DEFAULT_PSI, 0.1, 10.0).unwrap();
        assert!(p.delta <= 0.05);
    }

    #[test]
    fn source_one_recovery_and_nesting() {
        let one = make_source("one").unwrap();
        let a = TruncatedPair::new(&one, 2.0, DEFAULT_PSI, 0.1, 20.0).unwrap();
        let b = TruncatedPair::new(&one, 2.0, DEFAULT_PSI, 0.1, 40.0).unwrap();
        let t = C64::new(1.0, 0.0);
        assert!((a.g_r(t, &cfg()).unwrap() - 1.0).norm() < 1e-6);
        // stubs between radii 20 and 40 on both rays
        let stubs = |s: f64| {
            let up = C64::from_polar(1.0, DEFAULT_PSI);
            let f = |w: C64| (t * w).exp() / w;
            let seg_up = Contour::new("up", vec![Segment::Line { from: 20.0 * up, to: 40.0 * up }], false).unwrap();
            let seg_dn =
                Contour::new("dn", vec![Segment::Line { from: 40.0 * up.conj(), to: 20.0 * up.conj() }], false).unwrap();
            s * (integrate(f, &seg_up, &cfg()).unwrap().value + integrate(f, &seg_dn, &cfg()).unwrap().value)
                * inv_two_pi_i()
        };
        let diff = b.g_r(t, &cfg()).unwrap() - a.g_r(t, &cfg()).unwrap();
        assert!((diff - stubs(1.0)).norm() < 1e-10);
    }

    #[test]
    fn truncated_equation_holds() {
        let one = make_source("one").unwrap();
        let p = TruncatedPair::new(&one, 2.0, DEFAULT_PSI, 0.1, 10.0).unwrap();
        let ts = [C64::new(0.5, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)];
        let res = p.truncated_residuals(&ts, &cfg()).unwrap();
        assert!(res.iter().all(|&r| r <= 1e-5), "{res:?}");
    }

    #[test]
    fn residue_terms_for_trivial_pullbacks() {
        use crate::contours::circle;
        use crate::zerofinder::{zeros_of_zeta_shifted, ZetaZeroCatalog};
        let one = make_source("one").unwrap();
        let p = TruncatedPair::new(&one, 3.0, DEFAULT_PSI, 0.1, 3.0).unwrap();
        let cat = ZetaZeroCatalog::build(1).unwrap();
        let zeros = zeros_of_zeta_shifted(3.0, 3.0, &cat).unwrap();
        let terms = p.residue_terms(&zeros, &cfg()).unwrap();
        assert_eq!(terms.len(), zeros.len());
        for t in &terms {
            // conjugate zero carries the conjugate coefficient
            let partner = terms.iter().find(|q| (q.tau - t.tau.conj()).norm() < 1e-12).unwrap();
            assert!((partner.c - t.c.conj()).norm() < 1e-9 * t.c.norm().max(1.0));
            // residue of 𝔅(g_r)(s) e^{sz}/ζ(s²+h) at τ by a small contour integral
            let z = C64::new(0.7, 0.0);
            let ring = circle(t.tau, 0.05).unwrap();
            let via_contour = integrate(
                |s| p.borel_g(s, &cfg()).unwrap() * (s * z).exp() / p.symbol().value_or_nan(s),
                &ring,
                &cfg(),
            )
            .unwrap()
            .value
                * inv_two_pi_i();
            assert!((via_contour - t.c * (t.tau * z).exp()).norm() < 1e-7 * t.c.norm().max(1e-3));
        }
        let p10 = TruncatedPair::new(&one, 10.0, DEFAULT_PSI, 0.1, 1.5).unwrap();
        let none = zeros_of_zeta_shifted(10.0, 1.5, &cat).unwrap();
        assert!(p10.residue_terms(&none, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn moments_give_type_near_r() {
        use crate::exptype::estimate_type;
        let one = make_source("one").unwrap();
        for r in [10.0, 20.0] {
            let p = TruncatedPair::new(&one, 2.0, DEFAULT_PSI, 0.1, r).unwrap();
            let a = p.moments(64, &cfg()).unwrap();
            let mut fact = 1.0;
            let series: Vec<C64> = a
                .iter()
                .enumerate()
                .map(|(n, v)| {
                    if n > 0 {
                        fact *= n as f64;
                    }
                    v / fact
                })
                .collect();
            let tau = estimate_type(&series).unwrap();
            assert!(tau >= 0.8 * r && tau <= 1.2 * r, "r = {r}: type {tau}");
            assert!((series[0] - p.g_r(C64::new(0.0, 0.0), &cfg()).unwrap()).norm() < 1e-12);
        }
    }
}
