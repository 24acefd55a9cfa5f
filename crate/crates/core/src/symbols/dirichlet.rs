//! Dirichlet L-series and general Dirichlet series, summed directly in the
//! half-plane of absolute convergence.

use crate::complex::C64;
use crate::error::{Error, Result};

use super::zeta::BERNOULLI_OVER_FACTORIAL;

/// Largest admissible coefficient modulus for [`dirichlet_series`].
pub const COEFF_LIMIT: f64 = 1e6;

/// Term cap for [`dirichlet_series`].
pub const MAX_TERMS: usize = 1 << 22;

/// `Σ_{k≥0} (a + k m)^{-s}` by Euler–Maclaurin, `Re s > 1`.
fn residue_class_sum(s: C64, a: f64, m: f64) -> C64 {
    let n = 20 + s.im.abs().ceil() as usize;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (a + k as f64 * m).ln()).exp();
    }
    // tail from x = N of f(x) = (a + x m)^{-s}
    let x = a + n as f64 * m;
    let fx = (-s * x.ln()).exp();
    sum += fx * x / (m * (s - 1.0)) + fx * 0.5;
    // f^{(2j−1)}(N) = (−s)(−s−1)…(−s−2j+2) m^{2j−1} x^{−s−2j+1}
    let mut deriv = -s * m * fx / x;
    for (j, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let k = (2 * j) as f64;
            deriv *= (-s - (k - 1.0)) * (-s - k) * (m * m) / (x * x);
        }
        sum -= deriv * b;
    }
    sum
}

/// `L(s, χ) = Σ χ(n) n^{−s}` for a character given by its values
/// `χ(1), …, χ(m)` on one period. Only `Re s > 1` is implemented.
pub fn dirichlet_l(s: C64, chi: &[C64]) -> Result<C64> {
    if s.re <= 1.0 {
        return Err(Error::OutsideDomain {
            point: s,
            reason: "Dirichlet L-series are only implemented for Re s > 1".into(),
        });
    }
    if chi.is_empty() {
        return Err(Error::InvalidFunction("character table is empty".into()));
    }
    let m = chi.len() as f64;
    let mut total = C64::new(0.0, 0.0);
    for (k, &c) in chi.iter().enumerate() {
        if c != C64::new(0.0, 0.0) {
            total += c * residue_class_sum(s, (k + 1) as f64, m);
        }
    }
    Ok(total)
}

/// Compensated summation step: keeps roundoff from millions of small
/// terms below the tail bound.
fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    *comp += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
    *sum = t;
}

/// A truncated Dirichlet series with its tail bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    /// `sup |a_n| · N^{1−σ} / (σ − 1)`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// `F(s) = Σ a_n n^{−s}` for bounded coefficients and `Re s > 1`. Terms are
/// added until the tail bound drops below `tol` or [`MAX_TERMS`] is hit.
pub fn dirichlet_series<A>(s: C64, a: A, tol: f64) -> Result<SeriesValue>
where
    A: Fn(usize) -> C64,
{
    let sigma = s.re;
    if sigma <= 1.0 {
        return Err(Error::OutsideDomain {
            point: s,
            reason: "bounded-coefficient Dirichlet series need Re s > 1".into(),
        });
    }
    let mut value = C64::new(0.0, 0.0);
    let mut comp = C64::new(0.0, 0.0);
    let mut sup: f64 = 0.0;
    let mut n = 1usize;
    loop {
        let an = a(n);
        let mag = an.norm();
        if !mag.is_finite() || mag > COEFF_LIMIT {
            return Err(Error::InvalidSequence(format!("|a_{n}| = {mag:e} exceeds {COEFF_LIMIT:e}")));
        }
        sup = sup.max(mag);
        if mag > 0.0 {
            let term = an * (-s * (n as f64).ln()).exp();
            neumaier_add(&mut value.re, &mut comp.re, term.re);
            neumaier_add(&mut value.im, &mut comp.im, term.im);
        }
        let tail = sup * (n as f64).powf(1.0 - sigma) / (sigma - 1.0);
        if (n >= 16 && tail < tol) || n >= MAX_TERMS {
            return Ok(SeriesValue { value: value + comp, tail_bound: tail, terms: n });
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::zeta::zeta;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn trivial_character_is_zeta() {
        for s in [c(3.0, 0.0), c(1.5, 7.0), c(2.2, -30.0)] {
            let l = dirichlet_l(s, &[c(1.0, 0.0)]).unwrap();
            assert!((l - zeta(s).unwrap()).norm() < 1e-12, "{s}");
        }
    }

    #[test]
    fn catalan_constant() {
        // oracle: alternating series Σ (−1)^k/(2k+1)², averaged partial sums
        let mut partial = 0.0;
        let mut prev = 0.0;
        for k in 0..200_000 {
            prev = partial;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            partial += sign / ((2 * k + 1) as f64).powi(2);
        }
        let oracle = 0.5 * (partial + prev);
        let chi = [c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)];
        let l = dirichlet_l(c(2.0, 0.0), &chi).unwrap();
        assert!((l.re - oracle).abs() < 1e-10 && l.im.abs() < 1e-14);
        assert!((l.re - 0.915_965_594_177_219).abs() < 1e-12);
    }

    #[test]
    fn zero_character_and_domain() {
        assert_eq!(dirichlet_l(c(2.0, 1.0), &[c(0.0, 0.0); 3]).unwrap(), c(0.0, 0.0));
        assert!(matches!(dirichlet_l(c(1.0, 3.0), &[c(1.0, 0.0)]), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn general_series_identities() {
        let z = dirichlet_series(c(3.0, 0.0), |_| c(1.0, 0.0), 1e-12).unwrap();
        assert!((z.value - zeta(c(3.0, 0.0)).unwrap()).norm() <= z.tail_bound + 1e-14);

        let eta = dirichlet_series(c(2.0, 0.0), |n| c(if n % 2 == 1 { 1.0 } else { -1.0 }, 0.0), 1e-12).unwrap();
        assert_eq!(eta.terms, MAX_TERMS);
        assert!((eta.value.re - PI * PI / 12.0).abs() < 1e-12);
    }

    #[test]
    fn almost_periodic_series_is_stable() {
        let alpha = 0.5 * (1.0 + 5f64.sqrt());
        let a = |n: usize| C64::from_polar(1.0, std::f64::consts::TAU * n as f64 * alpha);
        let coarse = dirichlet_series(c(3.0, 0.0), a, 1e-8).unwrap();
        let fine = dirichlet_series(c(3.0, 0.0), a, 1e-12).unwrap();
        assert!(fine.terms >= 2 * coarse.terms);
        assert!((coarse.value - fine.value).norm() < 1e-8);
    }

    #[test]
    fn unbounded_coefficients_rejected() {
        let err = dirichlet_series(c(3.0, 0.0), |n| c((n as f64).powi(8), 0.0), 1e-10).unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
    }
}
