//! `f(∂_t)` on functions of exponential type, by the contour definition
//! `(1/2πi)∫_γ e^{st} f(s) B(φ)(s) ds` and by the infinite-order series
//! `Σ a_k φ^{(k)}(t)`.

use serde::{Deserialize, Serialize};

use crate::complex::{inv_two_pi_i, C64};
use crate::contours::{circle, integrate, rectangle, winding_number, Contour, QuadratureConfig};
use crate::error::{Error, Result};
use crate::exptype::{bbox_center, borel_exact, BorelFn, EntireFn};
use crate::symbols::{SymbolSpec, TaylorData};

/// Minimum distance between an automatic contour and a pole of the symbol.
pub const POLE_CLEARANCE: f64 = 0.05;

/// Margin of the rectangle fallback around the singularity bounding box.
pub const RECTANGLE_MARGIN: f64 = 0.2;

/// Margins tried, in order, for the centred circle.
const CIRCLE_MARGINS: [f64; 3] = [0.5, 0.25, 0.1];

/// Radii tried, in order, for per-term circles.
const TERM_RADII: [f64; 6] = [0.5, 0.25, 0.1, 0.05, 0.02, 0.01];

/// Relative increment below which the series stops.
pub const SERIES_STOP: f64 = 1e-12;

/// How the integration contour was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourStrategy {
    Caller,
    Circle,
    Rectangle,
    /// One contour per exp-poly term, combined by linearity.
    PerTerm,
}

/// Contours for an application: each piece integrates the listed terms.
#[derive(Clone, Debug)]
pub struct ContourPlan {
    pub strategy: ContourStrategy,
    pub pieces: Vec<(Contour, Vec<usize>)>,
}

impl ContourPlan {
    pub fn labels(&self) -> Vec<String> {
        self.pieces.iter().map(|(c, _)| c.label().to_string()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Application {
    #[serde(with = "crate::complex::serde_pair")]
    pub value: C64,
    pub error_estimate: f64,
    pub strategy: ContourStrategy,
    pub contours: Vec<String>,
}

/// Why `gamma` is not admissible for `f` and the given singular points.
/// Automatic contours must also keep clear of the symbol's poles and leave
/// them outside; a caller contour may wind around points removed from Ω.
pub(crate) fn inadmissible(f: &SymbolSpec, gamma: &Contour, singular: &[C64], automatic: bool) -> Option<String> {
    if !gamma.is_closed() {
        return Some("contour is not closed".into());
    }
    if !f.omega().contains_path(gamma) {
        return Some(format!("contour leaves Ω ({})", f.omega().describe()));
    }
    for &p in singular {
        match winding_number(gamma, p) {
            Ok(1) => {}
            Ok(w) => return Some(format!("winds {w} times around singularity {p}")),
            Err(_) => return Some(format!("passes through singularity {p}")),
        }
    }
    if !automatic {
        return None;
    }
    for &p in f.poles() {
        let d = gamma.distance_to(p);
        if d <= POLE_CLEARANCE {
            return Some(format!("passes within {d:.3e} of the pole {p}"));
        }
        match winding_number(gamma, p) {
            Ok(0) => {}
            _ => return Some(format!("encloses the pole {p}")),
        }
    }
    None
}

pub(crate) fn check_singularities_in_domain(f: &SymbolSpec, singular: &[C64]) -> Result<()> {
    if let Some(p) = singular.iter().find(|p| !f.omega().contains(**p)) {
        return Err(Error::DomainObstruction {
            singularity: *p,
            reason: format!("lies outside Ω = {}", f.omega().describe()),
        });
    }
    if !f.omega().is_runge() {
        return Err(Error::DomainObstruction {
            singularity: singular.first().copied().unwrap_or_default(),
            reason: format!(
                "Ω = {} is not a Runge domain, so the result depends on the contour; supply one explicitly",
                f.omega().describe()
            ),
        });
    }
    Ok(())
}

/// Candidate single contours around `singular` in order of preference:
/// circles about the centre of their bounding box, then a rectangle
/// hugging them.
pub(crate) fn candidate_contours(singular: &[C64]) -> Vec<(Contour, ContourStrategy)> {
    let center = bbox_center(singular.iter().copied());
    let spread = singular.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
    let mut out: Vec<(Contour, ContourStrategy)> = CIRCLE_MARGINS
        .iter()
        .filter_map(|m| circle(center, 1.25 * spread + m).ok().map(|c| (c, ContourStrategy::Circle)))
        .collect();
    let (mut lo, mut hi) = (singular[0], singular[0]);
    for p in singular {
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let m = C64::new(RECTANGLE_MARGIN, RECTANGLE_MARGIN);
    if let Ok(r) = rectangle(lo - m, hi + m) {
        out.push((r, ContourStrategy::Rectangle));
    }
    out
}

/// Circles about a single point, largest first.
pub(crate) fn term_circles(p: C64) -> impl Iterator<Item = Contour> {
    TERM_RADII.into_iter().filter_map(move |rho| circle(p, rho).ok())
}

/// First admissible candidate contour, if any.
fn enclosing_contour(f: &SymbolSpec, singular: &[C64]) -> Option<(Contour, ContourStrategy)> {
    candidate_contours(singular).into_iter().find(|(c, _)| inadmissible(f, c, singular, true).is_none())
}

/// Automatic contour selection for `f(∂_t)φ`.
pub fn plan_contour(f: &SymbolSpec, phi: &EntireFn) -> Result<ContourPlan> {
    if !phi.has_terms() {
        return Err(Error::InvalidFunction("automatic contours need the term representation".into()));
    }
    let singular: Vec<C64> = phi.terms.iter().map(|t| t.lambda).collect();
    check_singularities_in_domain(f, &singular)?;
    let all: Vec<usize> = (0..singular.len()).collect();
    if let Some((c, strategy)) = enclosing_contour(f, &singular) {
        return Ok(ContourPlan { strategy, pieces: vec![(c, all)] });
    }
    log::warn!("no single admissible contour for {}; splitting by term", f.label());
    let mut pieces = Vec::new();
    for (k, &p) in singular.iter().enumerate() {
        let found = term_circles(p).find(|c| inadmissible(f, c, &[p], true).is_none());
        match found {
            Some(c) => pieces.push((c, vec![k])),
            None => {
                return Err(Error::DomainObstruction {
                    singularity: p,
                    reason: "no circle about it stays in Ω and away from the symbol's poles".into(),
                })
            }
        }
    }
    Ok(ContourPlan { strategy: ContourStrategy::PerTerm, pieces })
}

/// Checks a caller contour and wraps it in a plan.
pub fn caller_plan(f: &SymbolSpec, phi: &EntireFn, gamma: &Contour) -> Result<ContourPlan> {
    let singular: Vec<C64> = phi.terms.iter().map(|t| t.lambda).collect();
    if let Some(reason) = inadmissible(f, gamma, &singular, false) {
        return Err(Error::InvalidContour(format!("{}: {reason}", gamma.label())));
    }
    Ok(ContourPlan { strategy: ContourStrategy::Caller, pieces: vec![(gamma.clone(), (0..singular.len()).collect())] })
}

/// `(1/2πi) ∫_γ e^{st} f(s) B(s) ds`.
fn contour_apply(f: &SymbolSpec, b: &BorelFn, gamma: &Contour, t: C64, cfg: &QuadratureConfig) -> Result<(C64, f64)> {
    let i = integrate(|s| (s * t).exp() * f.value_or_nan(s) * b.eval(s), gamma, cfg)?.scaled(inv_two_pi_i());
    Ok((i.value, i.error_estimate))
}

/// Applies `f(∂_t)` following a precomputed plan.
pub fn apply_with_plan(
    f: &SymbolSpec,
    phi: &EntireFn,
    plan: &ContourPlan,
    t: C64,
    cfg: &QuadratureConfig,
) -> Result<Application> {
    let mut value = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for (gamma, idx) in &plan.pieces {
        let part = if idx.len() == phi.terms.len() {
            phi.clone()
        } else {
            EntireFn::sum_of(idx.iter().map(|&k| phi.terms[k].clone()).collect())
        };
        let (v, e) = contour_apply(f, &borel_exact(&part)?, gamma, t, cfg)?;
        value += v;
        err += e;
    }
    Ok(Application { value, error_estimate: err, strategy: plan.strategy, contours: plan.labels() })
}

/// `f(∂_t)φ(t)` by the contour definition. Without `gamma`, a contour is
/// chosen automatically (see [`plan_contour`]).
pub fn apply(
    f: &SymbolSpec,
    phi: &EntireFn,
    t: C64,
    gamma: Option<&Contour>,
    cfg: &QuadratureConfig,
) -> Result<Application> {
    let plan = match gamma {
        Some(g) => caller_plan(f, phi, g)?,
        None => plan_contour(f, phi)?,
    };
    apply_with_plan(f, phi, &plan, t, cfg)
}

/// `f(∂_t)` on a function given by Borel data. Without `gamma` the
/// centred-circle / rectangle chain is tried around the declared singular set.
pub fn apply_borel(
    f: &SymbolSpec,
    b: &BorelFn,
    t: C64,
    gamma: Option<&Contour>,
    cfg: &QuadratureConfig,
) -> Result<Application> {
    let singular = b.enclosure_points();
    let (gamma, strategy) = match gamma {
        Some(g) => {
            if let Some(reason) = inadmissible(f, g, &singular, false) {
                return Err(Error::InvalidContour(format!("{}: {reason}", g.label())));
            }
            (g.clone(), ContourStrategy::Caller)
        }
        None => {
            check_singularities_in_domain(f, &singular)?;
            enclosing_contour(f, &singular).ok_or_else(|| Error::DomainObstruction {
                singularity: singular[0],
                reason: "no single admissible contour encloses the singular set".into(),
            })?
        }
    };
    let (value, error_estimate) = contour_apply(f, b, &gamma, t, cfg)?;
    Ok(Application { value, error_estimate, strategy, contours: vec![gamma.label().to_string()] })
}

/// `f(λ)`, the multiplier with `f(∂_t) e^{λt} = f(λ) e^{λt}`.
pub fn apply_eigen(f: &SymbolSpec, lambda: C64) -> Result<C64> {
    f.evaluate_in_domain(lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesApplication {
    #[serde(with = "crate::complex::serde_pair")]
    pub value: C64,
    pub last_increment: f64,
    pub terms_used: usize,
}

/// `Σ_k a_k φ^{(k)}(t)` for Taylor data at the origin. Every exponent of
/// `φ` must lie inside the Taylor disc.
pub fn apply_series(taylor: &TaylorData, phi: &EntireFn, t: C64) -> Result<SeriesApplication> {
    if taylor.center != C64::new(0.0, 0.0) {
        return Err(Error::Unsupported("series application needs Taylor data centred at 0".into()));
    }
    if !phi.has_terms() {
        return Err(Error::InvalidFunction("series application needs the term representation".into()));
    }
    for term in &phi.terms {
        let d = term.lambda.norm();
        if d >= taylor.radius {
            return Err(Error::DiscViolation { distance: d, radius: taylor.radius });
        }
    }
    let mut value = C64::new(0.0, 0.0);
    let mut last = 0.0;
    let mut used = 0;
    for (k, a) in taylor.coeffs.iter().enumerate() {
        used = k + 1;
        if *a == C64::new(0.0, 0.0) {
            continue;
        }
        let inc = a * phi.derivative(k, t);
        value += inc;
        last = inc.norm();
        if last < SERIES_STOP * value.norm() {
            break;
        }
    }
    Ok(SeriesApplication { value, last_increment: last, terms_used: used })
}

/// Non-continuity of `1/∂_t` on `ℂ ∖ {0}`: for `φ_n = e^{iz/n} − e^{−iz/n}`
/// returns `(sup_{|z|≤1} |φ_n|, |f(∂_t)φ_n(0)|)` with contours around
/// `±i/n` that leave 0 outside.
pub fn noncontinuity_witness(n: u32, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidFunction("witness index must be at least 1".into()));
    }
    let nf = n as f64;
    let lam = C64::new(0.0, 1.0 / nf);
    let phi = EntireFn::sum_of(vec![
        crate::exptype::ExpTerm::new(vec![C64::new(1.0, 0.0)], lam),
        crate::exptype::ExpTerm::new(vec![C64::new(-1.0, 0.0)], -lam),
    ]);
    let f = SymbolSpec::reciprocal();
    let rho = 0.5 / nf;
    let plan = ContourPlan {
        strategy: ContourStrategy::Caller,
        pieces: vec![(circle(lam, rho)?, vec![0]), (circle(-lam, rho)?, vec![1])],
    };
    let out = apply_with_plan(&f, &phi, &plan, C64::new(0.0, 0.0), cfg)?;
    // maximum modulus principle: the sup over the disc is on its boundary
    let sup = (0..1024)
        .map(|k| phi.eval(C64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 1024.0)).norm())
        .fold(0.0, f64::max);
    Ok((sup, out.value.norm()))
}
