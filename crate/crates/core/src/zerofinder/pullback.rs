use super::catalog::ZetaZeroCatalog;
use super::scan::{central_difference, tight_count, ZeroMethod, ZeroRecord, RESIDUAL_TOL};
use crate::complex::C64;
use crate::error::{Error, Result};
use crate::symbols::zeta_shifted;

/// Checks that no uncatalogued nontrivial zero can satisfy `|w − h| < τ²`.
fn check_coverage(h: f64, tau: f64, catalog: &ZetaZeroCatalog) -> Result<()> {
    let t = catalog.covered_height;
    if t >= tau * tau {
        return Ok(());
    }
    // nearest point of the critical strip above the covered height
    let dx = if h < 0.0 { -h } else if h > 1.0 { h - 1.0 } else { 0.0 };
    if dx.hypot(t) < tau * tau {
        return Err(Error::IncompleteCatalog(format!(
            "zeros with |w − {h}| < {} may lie above the covered height {t}",
            tau * tau
        )));
    }
    Ok(())
}

/// Zeros of `ζ(s² + h)` with `|s| < τ`, pulled back from ζ-zeros `w` via
/// `s = ±√(w − h)` and re-certified against the composed function.
pub fn zeros_of_zeta_shifted(h: f64, tau: f64, catalog: &ZetaZeroCatalog) -> Result<Vec<ZeroRecord>> {
    if !(tau > 0.0) || !h.is_finite() {
        return Err(Error::InvalidGeometry(format!("radius must be positive and h finite (τ = {tau}, h = {h})")));
    }
    check_coverage(h, tau, catalog)?;
    let r2 = tau * tau;
    let mut targets: Vec<C64> = Vec::new();
    // trivial zeros −2, −4, …
    let mut n = 1;
    while (-2.0 * n as f64 - h).abs() < r2 || -2.0 * (n as f64) > h {
        let w = C64::new(-2.0 * n as f64, 0.0);
        if (w - h).norm() < r2 {
            targets.push(w);
        }
        n += 1;
    }
    for w in catalog.nontrivial() {
        for w in [w, w.conj()] {
            if (w - h).norm() < r2 {
                targets.push(w);
            }
        }
    }
    let f = |s: C64| zeta_shifted(s, h).unwrap_or(C64::new(f64::NAN, f64::NAN));
    let mut out = Vec::new();
    for w in targets {
        let root = (w - h).sqrt();
        let branches: Vec<C64> = if root.norm() == 0.0 { vec![root] } else { vec![root, -root] };
        for s in branches {
            let count = tight_count(&f, s)?;
            let expected = if root.norm() == 0.0 { 2 } else { 1 };
            if count != expected {
                return Err(Error::CertificationFailure {
                    at: s,
                    reason: format!("isolating box holds {count} zeros of ζ(s²+{h}), expected {expected}"),
                });
            }
            let residual = f(s).norm();
            if !(residual <= RESIDUAL_TOL) {
                return Err(Error::CertificationFailure { at: s, reason: format!("residual {residual:e}") });
            }
            out.push(ZeroRecord {
                location: s,
                multiplicity: count as u32,
                residual,
                method: ZeroMethod::Pullback,
                derivative_at_zero: central_difference(&f, s),
            });
        }
    }
    out.sort_by(|a, b| {
        a.location.norm().total_cmp(&b.location.norm()).then(a.location.arg().total_cmp(&b.location.arg()))
    });
    Ok(out)
}
