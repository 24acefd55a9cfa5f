//! Linear nonlocal equations `f(∂_t)φ = g`: a particular solution from
//! `𝔅(g)/f`, the homogeneous basis `t^j e^{s_k t}` from the zeros of `f`,
//! and residual-checked assembly of the general solution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{inv_two_pi_i, C64};
use crate::contours::{circle, count_zeros, integrate, Contour, QuadratureConfig};
use crate::error::{Error, Result};
use crate::exptype::{borel_exact, polya_reconstruct, BorelFn, EntireFn, ExpTerm};
use crate::operator::{
    apply, apply_borel, candidate_contours, check_singularities_in_domain, inadmissible, term_circles,
    ContourPlan, ContourStrategy,
};
use crate::symbols::{Family, SymbolSpec};
use crate::zerofinder::{newton, scan_zeros, zeros_of_zeta_shifted, ZeroRecord, ZetaZeroCatalog, RESIDUAL_TOL};

/// Smallest `|f|` allowed on the particular-solution contour.
pub const MIN_SYMBOL_ON_CONTOUR: f64 = 1e-6;

/// Residual tolerance for an assembled solution.
pub const SOLUTION_TOL: f64 = 1e-7;

/// Points per segment when checking `|f|` along a contour.
const SYMBOL_SAMPLES: usize = 64;

/// Cauchy-transform panel length for the particular solution's Borel data.
const BOREL_PANEL: f64 = 0.25;

/// Distance at which a zero counts as lying on the ball boundary.
const BOUNDARY_TOL: f64 = 1e-12;

fn min_symbol_on(f: &SymbolSpec, gamma: &Contour) -> f64 {
    gamma
        .segments()
        .iter()
        .flat_map(|seg| (0..SYMBOL_SAMPLES).map(move |k| seg.point(k as f64 / SYMBOL_SAMPLES as f64)))
        .map(|s| f.value_or_nan(s).norm())
        .fold(f64::INFINITY, |a, b| if b.is_nan() { 0.0 } else { a.min(b) })
}

/// Contour usable for `𝔅(g)/f`: admissible for `f`, clear of its zeros and
/// enclosing none of them.
fn zero_free(f: &SymbolSpec, gamma: &Contour, singular: &[C64]) -> bool {
    inadmissible(f, gamma, singular, true).is_none()
        && min_symbol_on(f, gamma) > MIN_SYMBOL_ON_CONTOUR
        && count_zeros(|s| f.value_or_nan(s), gamma).ok() == Some(0)
}

/// Contour plan for the particular solution of `f(∂_t)φ = g`.
pub fn particular_plan(f: &SymbolSpec, g: &EntireFn) -> Result<ContourPlan> {
    if !g.has_terms() {
        return Err(Error::InvalidFunction("the right-hand side needs the term representation".into()));
    }
    let singular: Vec<C64> = g.terms.iter().map(|t| t.lambda).collect();
    check_singularities_in_domain(f, &singular)?;
    let all: Vec<usize> = (0..singular.len()).collect();
    if let Some((c, strategy)) = candidate_contours(&singular).into_iter().find(|(c, _)| zero_free(f, c, &singular)) {
        return Ok(ContourPlan { strategy, pieces: vec![(c, all)] });
    }
    let mut pieces = Vec::new();
    for (k, &p) in singular.iter().enumerate() {
        match term_circles(p).find(|c| zero_free(f, c, &[p])) {
            Some(c) => pieces.push((c, vec![k])),
            None => {
                let zero = newton(&|s| f.value_or_nan(s), p, 1, 0.5).unwrap_or(p);
                return Err(Error::Pinch { zero });
            }
        }
    }
    Ok(ContourPlan { strategy: ContourStrategy::PerTerm, pieces })
}

/// `φ(t) = (1/2πi) ∫_γ e^{tη} 𝔅(g)(η)/f(η) dη` on a fixed plan.
#[derive(Clone)]
pub struct ParticularSolution {
    symbol: SymbolSpec,
    rhs: EntireFn,
    plan: ContourPlan,
    parts: Vec<(BorelFn, Contour)>,
}

impl ParticularSolution {
    pub fn new(f: &SymbolSpec, g: &EntireFn) -> Result<Self> {
        let plan = particular_plan(f, g)?;
        let mut parts = Vec::new();
        for (gamma, idx) in &plan.pieces {
            let b = borel_exact(&EntireFn::sum_of(idx.iter().map(|&k| g.terms[k].clone()).collect()))?;
            parts.push((b, gamma.clone()));
        }
        Ok(ParticularSolution { symbol: f.clone(), rhs: g.clone(), plan, parts })
    }

    pub fn plan(&self) -> &ContourPlan {
        &self.plan
    }

    pub fn rhs(&self) -> &EntireFn {
        &self.rhs
    }

    pub fn value(&self, t: C64, cfg: &QuadratureConfig) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for (b, gamma) in &self.parts {
            let f = &self.symbol;
            let i = integrate(|s| (s * t).exp() * b.eval(s) / f.value_or_nan(s), gamma, cfg)?;
            total += i.value * inv_two_pi_i();
        }
        Ok(total)
    }

    /// Borel data of the solution, `𝔅(φ)(z) = (1/2πi)∫_γ 𝔅(g)(η)/(f(η)(z−η)) dη`,
    /// one Cauchy transform per contour piece.
    pub fn borel(&self) -> Result<Vec<BorelFn>> {
        self.parts
            .iter()
            .map(|(b, gamma)| {
                let f = self.symbol.clone();
                let b = b.clone();
                BorelFn::cauchy_transform(gamma.clone(), move |s| b.eval(s) / f.value_or_nan(s), BOREL_PANEL, 1)
            })
            .collect()
    }

    /// The value through Polya reconstruction of [`Self::borel`] on circles
    /// enclosing each support with margin `margin`.
    pub fn value_via_polya(&self, t: C64, margin: f64, cfg: &QuadratureConfig) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for ((_, gamma), b) in self.parts.iter().zip(self.borel()?) {
            let pts = b.enclosure_points();
            let center = pts.iter().sum::<C64>() / pts.len() as f64;
            let r = pts.iter().map(|p| (p - center).norm()).fold(0.0, f64::max) + margin;
            debug_assert!(gamma.is_closed());
            total += polya_reconstruct(&b, &circle(center, r)?, t, cfg)?.value;
        }
        Ok(total)
    }
}

/// Value of the particular solution at `t`.
pub fn solve_particular(f: &SymbolSpec, g: &EntireFn, t: C64, cfg: &QuadratureConfig) -> Result<C64> {
    ParticularSolution::new(f, g)?.value(t, cfg)
}

/// `(s_k, m_k)`: a zero of the symbol and its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousMode {
    #[serde(with = "crate::complex::serde_pair")]
    pub s: C64,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Basis {
    pub modes: Vec<HomogeneousMode>,
    /// Zeros on `|s| = τ`, excluded by the strict inequality.
    #[serde(with = "crate::complex::serde_pair::vec")]
    pub boundary_zeros: Vec<C64>,
}

impl Basis {
    /// Number of independent monomials `t^j e^{s_k t}`.
    pub fn dimension(&self) -> usize {
        self.modes.iter().map(|m| m.multiplicity as usize).sum()
    }

    /// Every monomial `t^j e^{s_k t}` with `j < m_k`, in mode order.
    pub fn monomials(&self) -> Vec<EntireFn> {
        let mut out = Vec::new();
        for m in &self.modes {
            for j in 0..m.multiplicity as usize {
                let mut poly = vec![C64::new(0.0, 0.0); j + 1];
                poly[j] = C64::new(1.0, 0.0);
                out.push(EntireFn::polyexp(poly, m.s));
            }
        }
        out
    }
}

/// Homogeneous modes with `|s_k| < τ` from certified zeros.
pub fn homogeneous_basis(f: &SymbolSpec, tau: f64, zeros: &[ZeroRecord]) -> Result<Basis> {
    let mut modes = Vec::new();
    let mut boundary_zeros = Vec::new();
    for z in zeros {
        let v = f.evaluate(z.location).map(|v| v.norm()).unwrap_or(f64::NAN);
        if !(z.residual <= RESIDUAL_TOL && v <= RESIDUAL_TOL) || z.multiplicity == 0 {
            return Err(Error::CertificationRequired {
                at: z.location,
                reason: format!("|f| = {v:e} at the recorded zero"),
            });
        }
        let r = z.location.norm();
        if (r - tau).abs() <= BOUNDARY_TOL * tau.max(1.0) {
            boundary_zeros.push(z.location);
        } else if r < tau {
            modes.push(HomogeneousMode { s: z.location, multiplicity: z.multiplicity });
        }
    }
    Ok(Basis { modes, boundary_zeros })
}

/// Certified zeros of `f` in the ball `|s| < τ`: by pullback through the
/// catalogue for shifted zeta symbols, by a box scan otherwise.
pub fn zeros_in_ball(f: &SymbolSpec, tau: f64, catalog: Option<&ZetaZeroCatalog>) -> Result<Vec<ZeroRecord>> {
    match f.family() {
        Family::ZetaShifted { h } => {
            let owned;
            let cat = match catalog {
                Some(c) => c,
                None => {
                    owned = ZetaZeroCatalog::build_to_height(tau * tau)?;
                    &owned
                }
            };
            zeros_of_zeta_shifted(*h, tau, cat)
        }
        _ => {
            let r = tau * (1.0 + 1e-3);
            let z = scan_zeros(f, C64::new(-r, -r), C64::new(r, r), 16)?;
            Ok(z.into_iter().filter(|z| z.location.norm() <= tau * (1.0 + BOUNDARY_TOL)).collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    #[serde(with = "crate::complex::serde_pair::vec")]
    pub grid: Vec<C64>,
    pub residuals: Vec<f64>,
    pub max: f64,
    pub tolerance: f64,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.max <= self.tolerance
    }
}

/// Homogeneous mode with its polynomial `p_k` (ascending coefficients).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousTerm {
    #[serde(flatten)]
    pub mode: HomogeneousMode,
    #[serde(with = "crate::complex::serde_pair::vec")]
    pub coeffs: Vec<C64>,
}

/// Particular solution, homogeneous terms and the residual check.
#[derive(Clone)]
pub struct SolutionBundle {
    pub particular: Option<ParticularSolution>,
    pub homogeneous: Vec<HomogeneousTerm>,
    pub basis: Basis,
    pub residual_report: ResidualReport,
}

impl SolutionBundle {
    /// Homogeneous part as an exp-poly function.
    pub fn homogeneous_fn(&self) -> EntireFn {
        EntireFn::sum_of(
            self.homogeneous
                .iter()
                .filter(|h| h.coeffs.iter().any(|c| c.norm() > 0.0))
                .map(|h| ExpTerm::new(h.coeffs.clone(), h.mode.s))
                .collect(),
        )
    }

    pub fn eval(&self, t: C64, cfg: &QuadratureConfig) -> Result<C64> {
        let p = match &self.particular {
            Some(p) => p.value(t, cfg)?,
            None => C64::new(0.0, 0.0),
        };
        Ok(p + self.homogeneous_fn().eval(t))
    }

    pub fn homogeneous_dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Serializable summary.
    pub fn report(&self) -> BundleReport {
        BundleReport {
            particular: self.particular.as_ref().map(|p| ParticularReport {
                strategy: p.plan.strategy,
                contours: p.plan.labels(),
            }),
            homogeneous: self.homogeneous.clone(),
            homogeneous_dimension: self.homogeneous_dimension(),
            boundary_zeros: self.basis.boundary_zeros.clone(),
            residual_report: self.residual_report.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticularReport {
    pub strategy: ContourStrategy,
    pub contours: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleReport {
    pub particular: Option<ParticularReport>,
    pub homogeneous: Vec<HomogeneousTerm>,
    pub homogeneous_dimension: usize,
    #[serde(with = "crate::complex::serde_pair::vec")]
    pub boundary_zeros: Vec<C64>,
    pub residual_report: ResidualReport,
}

/// `max |f(∂_t)φ − g|` on the grid, with `f(∂_t)` applied by contour
/// integration to the particular solution's Borel data and to the
/// homogeneous terms.
fn residuals(
    f: &SymbolSpec,
    g: &EntireFn,
    particular: Option<&ParticularSolution>,
    homogeneous: &EntireFn,
    grid: &[C64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let borel = match particular {
        Some(p) => p.borel()?,
        None => Vec::new(),
    };
    grid.par_iter()
        .map(|&t| {
            let mut lhs = C64::new(0.0, 0.0);
            for b in &borel {
                lhs += apply_borel(f, b, t, None, cfg)?.value;
            }
            if homogeneous.has_terms() {
                lhs += apply(f, homogeneous, t, None, cfg)?.value;
            }
            let rhs = if g.has_terms() { g.eval(t) } else { C64::new(0.0, 0.0) };
            Ok((lhs - rhs).norm())
        })
        .collect()
}

/// General solution with the given homogeneous coefficients (one list per
/// mode, at most `m_k` entries each; an empty outer list means all zero).
pub fn assemble(
    f: &SymbolSpec,
    g: &EntireFn,
    basis: &Basis,
    free_coefficients: &[Vec<C64>],
    grid: &[C64],
    cfg: &QuadratureConfig,
) -> Result<SolutionBundle> {
    if !free_coefficients.is_empty() && free_coefficients.len() != basis.modes.len() {
        return Err(Error::Shape(format!(
            "{} coefficient lists for {} homogeneous modes",
            free_coefficients.len(),
            basis.modes.len()
        )));
    }
    let mut homogeneous = Vec::new();
    for (k, mode) in basis.modes.iter().enumerate() {
        let coeffs = free_coefficients.get(k).cloned().unwrap_or_default();
        if coeffs.len() > mode.multiplicity as usize {
            return Err(Error::Shape(format!(
                "mode {} has multiplicity {} but {} coefficients were given",
                mode.s,
                mode.multiplicity,
                coeffs.len()
            )));
        }
        homogeneous.push(HomogeneousTerm { mode: *mode, coeffs });
    }
    let particular = if g.has_terms() { Some(ParticularSolution::new(f, g)?) } else { None };
    let mut bundle = SolutionBundle {
        particular,
        homogeneous,
        basis: basis.clone(),
        residual_report: ResidualReport { grid: grid.to_vec(), residuals: vec![], max: 0.0, tolerance: SOLUTION_TOL },
    };
    let res = residuals(f, g, bundle.particular.as_ref(), &bundle.homogeneous_fn(), grid, cfg)?;
    bundle.residual_report.max = res.iter().copied().fold(0.0, f64::max);
    bundle.residual_report.residuals = res;
    if !bundle.residual_report.passed() {
        log::warn!("residual {:e} exceeds {:e}", bundle.residual_report.max, SOLUTION_TOL);
    }
    Ok(bundle)
}

/// `n` equispaced real points on `[a, b]`.
pub fn real_grid(a: f64, b: f64, n: usize) -> Vec<C64> {
    if n <= 1 {
        return vec![C64::new(a, 0.0)];
    }
    (0..n).map(|k| C64::new(a + (b - a) * k as f64 / (n - 1) as f64, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::zeta;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn cubic() -> SymbolSpec {
        // s²(s − 1) = −s² + s³
        SymbolSpec::parse("poly:0,0,-1,1").unwrap()
    }

    #[test]
    fn eigen_division() {
        let f = SymbolSpec::parse("poly:-3,1").unwrap();
        let v = solve_particular(&f, &EntireFn::exp(c(1.0, 0.0)), c(0.7, 0.0), &cfg()).unwrap();
        assert!((v + 0.5 * 0.7f64.exp()).norm() < 1e-12);
        let z = SymbolSpec::zeta_shifted(2.0).unwrap();
        let v = solve_particular(&z, &EntireFn::exp(c(0.3, 0.0)), c(1.0, 0.0), &cfg()).unwrap();
        let expect = 0.3f64.exp() / zeta(c(2.09, 0.0)).unwrap();
        assert!((v - expect).norm() < 1e-12);
    }

    #[test]
    fn resonance_is_a_pinch() {
        let f = SymbolSpec::parse("poly:-1,1").unwrap();
        let err = solve_particular(&f, &EntireFn::exp(c(1.0, 0.0)), c(0.0, 0.0), &cfg()).unwrap_err();
        assert!(matches!(err, Error::Pinch { zero } if (zero - 1.0).norm() < 1e-8));
    }

    #[test]
    fn polynomial_rhs_residual() {
        let f = SymbolSpec::parse("poly:1,0,1").unwrap();
        let g = EntireFn::polyexp(vec![c(1.0, 0.0), c(1.0, 0.0)], c(2.0, 0.0));
        let bundle = assemble(&f, &g, &Basis { modes: vec![], boundary_zeros: vec![] }, &[], &real_grid(0.0, 2.0, 21), &cfg())
            .unwrap();
        assert!(bundle.residual_report.max <= 1e-8, "{}", bundle.residual_report.max);
        // closed form: φ = e^{2t}((1+t)/5 − 4/25)
        let t = c(1.3, 0.0);
        let exact = (2.0 * t).exp() * ((1.0 + t) / 5.0 - 4.0 / 25.0);
        assert!((bundle.eval(t, &cfg()).unwrap() - exact).norm() < 1e-11);
        let p = bundle.particular.as_ref().unwrap();
        assert!((p.value_via_polya(t, 0.5, &cfg()).unwrap() - exact).norm() < 1e-9);
    }

    #[test]
    fn cubic_basis_and_assembly() {
        let f = cubic();
        let zeros = zeros_in_ball(&f, 2.0, None).unwrap();
        let basis = homogeneous_basis(&f, 2.0, &zeros).unwrap();
        assert_eq!(basis.dimension(), 3);
        let mut modes = basis.modes.clone();
        modes.sort_by(|a, b| a.s.re.total_cmp(&b.s.re));
        assert_eq!(modes[0].multiplicity, 2);
        assert!(modes[0].s.norm() < 1e-6 && (modes[1].s - 1.0).norm() < 1e-10);
        let basis = Basis { modes, boundary_zeros: vec![] };
        let coeffs = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0)]];
        let zero = EntireFn::sum_of(vec![]);
        let grid = real_grid(0.0, 2.0, 11);
        let b = assemble(&f, &zero, &basis, &coeffs, &grid, &cfg()).unwrap();
        assert!(b.residual_report.max <= 1e-9, "{}", b.residual_report.max);
        let t = c(0.8, 0.0);
        let v = b.eval(t, &cfg()).unwrap();
        assert!((v - (1.0 + 2.0 * t + 3.0 * t.exp())).norm() < 1e-5);
        let bad = vec![vec![c(1.0, 0.0); 3], vec![]];
        assert!(matches!(assemble(&f, &zero, &basis, &bad, &grid, &cfg()), Err(Error::Shape(_))));
    }

    #[test]
    fn zeta_shifted_bases() {
        let f = SymbolSpec::zeta_shifted(10.0).unwrap();
        assert!(homogeneous_basis(&f, 1.0, &zeros_in_ball(&f, 1.0, None).unwrap()).unwrap().modes.is_empty());
        let f = SymbolSpec::zeta_shifted(3.0).unwrap();
        let basis = homogeneous_basis(&f, 2.5, &zeros_in_ball(&f, 2.5, None).unwrap()).unwrap();
        assert_eq!(basis.dimension(), 2);
        assert!(basis.modes.iter().all(|m| (m.s.norm() - 5f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn uncertified_zero_is_rejected() {
        let f = cubic();
        let fake = ZeroRecord {
            location: c(0.5, 0.0),
            multiplicity: 1,
            residual: 0.0,
            method: crate::zerofinder::ZeroMethod::Scan,
            derivative_at_zero: c(0.0, 0.0),
        };
        assert!(matches!(homogeneous_basis(&f, 2.0, &[fake]), Err(Error::CertificationRequired { .. })));
    }
}
