//! Analytic symbols `f` on their domains `Ω`: the Riemann zeta function,
//! the shifted symbol `ζ(s² + h)`, Dirichlet series, and generic user
//! symbols.

mod dirichlet;
mod domain;
pub mod gamma;
mod spec;
pub mod zeta;

use crate::complex::C64;
use crate::contours::{circle, Discretization, Rule};
use crate::error::{Error, Result};

pub use dirichlet::{dirichlet_l, dirichlet_series, SeriesValue, COEFF_LIMIT, MAX_TERMS};
pub use domain::{omega_for_h, DomainDescriptor, DomainKind, Ray, ON_RAY_TOL};
pub use gamma::gamma;
pub use spec::{Family, SymbolFn, SymbolSpec, TaylorData};
pub use zeta::zeta;

/// `|s² + h − 1|` below which `zeta_shifted` reports the pole.
pub const SHIFTED_POLE_TOL: f64 = 1e-12;

/// Largest Taylor order accepted by [`taylor_zeta_shifted`].
pub const MAX_TAYLOR_ORDER: usize = 64;

/// `ζ(s² + h)`.
pub fn zeta_shifted(s: C64, h: f64) -> Result<C64> {
    let w = s * s + h;
    if (w - 1.0).norm() < SHIFTED_POLE_TOL {
        return Err(Error::Pole { symbol: format!("zeta-shifted:h={h}"), at: s });
    }
    zeta(w)
}

/// Taylor coefficients `a_0 … a_K` of `ζ(s² + h)` at 0, from Cauchy
/// integrals over `|s| = ρ`. Odd coefficients vanish by symmetry and are set
/// to exactly zero.
pub fn taylor_zeta_shifted(h: f64, order: usize, rho: f64) -> Result<TaylorData> {
    if !(h > 1.0) {
        return Err(Error::Unsupported(format!("Taylor data of ζ(s²+h) needs h > 1, got {h}")));
    }
    if order > MAX_TAYLOR_ORDER {
        return Err(Error::InvalidFunction(format!("Taylor order {order} exceeds {MAX_TAYLOR_ORDER}")));
    }
    let limit = (h - 1.0).sqrt();
    if !(rho > 0.0) {
        return Err(Error::InvalidGeometry(format!("Taylor radius must be positive, got {rho}")));
    }
    if rho >= limit {
        return Err(Error::RadiusTooLarge { radius: rho, limit });
    }
    let path = circle(C64::new(0.0, 0.0), rho)?;
    let coeffs_at = |level: u32| -> Result<Vec<C64>> {
        let disc = Discretization::new(&path, 32, Rule::GaussLegendre, level);
        let values: Vec<C64> = disc
            .nodes
            .iter()
            .map(|&s| zeta_shifted(s, h))
            .collect::<Result<_>>()?;
        let mut out = vec![C64::new(0.0, 0.0); order + 1];
        for (k, a) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                continue;
            }
            let weighted: Vec<C64> = values
                .iter()
                .zip(&disc.nodes)
                .map(|(v, s)| v * s.powi(-(k as i32) - 1))
                .collect();
            *a = disc.sum(&weighted)?.0 * crate::complex::inv_two_pi_i();
        }
        Ok(out)
    };
    let coarse = coeffs_at(2)?;
    let fine = coeffs_at(3)?;
    let scale = fine[0].norm();
    for (k, (a, b)) in coarse.iter().zip(&fine).enumerate() {
        // coefficients decay like ρ^{-k}; compare against that envelope
        let envelope = scale * rho.powi(-(k as i32));
        if (a - b).norm() > 1e-10 * envelope {
            return Err(Error::NoConvergence { best: *b, estimate: (a - b).norm() });
        }
    }
    Ok(TaylorData { center: C64::new(0.0, 0.0), coeffs: fine, radius: limit })
}
