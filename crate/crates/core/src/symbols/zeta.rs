//! Riemann zeta on the complex plane.
//!
//! `Re s ≥ 1/2` (and a small disc about the origin) is summed by
//! Euler–Maclaurin with twelve Bernoulli corrections; the rest of the plane
//! goes through the functional equation
//! `ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s)`, assembled in log form so
//! that large imaginary parts neither overflow nor underflow.

use std::f64::consts::PI;

use super::gamma::ln_gamma_right as ln_gamma;
use crate::complex::{C64, I};
use crate::error::{Error, Result};

/// `B_{2k} / (2k)!` for `k = 1..=12`.
pub(crate) const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2.432_902_008_176_64e18,
    854_513.0 / 138.0 / 1.124_000_727_777_607_7e21,
    -236_364_091.0 / 2730.0 / 6.204_484_017_332_394e23,
];

/// Distance from `s = 1` inside which `zeta` reports the pole.
pub const POLE_TOL: f64 = 1e-14;

/// Target size of the last Euler–Maclaurin correction.
const TAIL_TARGET: f64 = 1e-17;

/// Leading-term count for `Re s ≥ 1/2`: `max(20, ⌈|Im s|⌉ + 20)`, reduced
/// when the real part is large enough that fewer terms already reach the
/// tail target.
fn em_terms(s: C64) -> usize {
    let cap = 20usize.max(s.im.abs().ceil() as usize + 20);
    let k = BERNOULLI_OVER_FACTORIAL.len();
    let log_poch: f64 = (0..(2 * k - 1)).map(|j| (s + j as f64).norm().ln()).sum();
    let log_b = BERNOULLI_OVER_FACTORIAL[k - 1].abs().ln();
    let mut n = 2usize;
    while n < cap {
        let ln_n = (n as f64).ln();
        let last = log_b + log_poch - (s.re + (2 * k) as f64 - 1.0) * ln_n;
        // the integral tail N^{1−s}/(s−1) is already exact; the neglected
        // remainder is of the order of the last correction
        if last < TAIL_TARGET.ln() {
            return n;
        }
        n *= 2;
    }
    cap
}

/// Euler–Maclaurin sum; valid for `Re s > −23`.
pub fn zeta_euler_maclaurin(s: C64) -> C64 {
    let n = em_terms(s);
    let mut sum = C64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    sum += n_pow * nf / (s - 1.0) + n_pow * 0.5;
    // B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut poch = s;
    let mut power = n_pow / nf;
    let inv_n2 = 1.0 / (nf * nf);
    for (k, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let j = (2 * k) as f64;
            poch *= (s + (j - 1.0)) * (s + j);
            power *= inv_n2;
        }
        sum += poch * power * b;
    }
    sum
}

/// `ln sin(w)` on a branch suitable for exponentiation, stable for large `|Im w|`.
fn ln_sin(w: C64) -> C64 {
    if w.im > 20.0 {
        // sin w = e^{−iw}(1 − e^{2iw}) / (−2i)
        -I * w - (-2.0 * I).ln() + (1.0 - (2.0 * I * w).exp()).ln()
    } else if w.im < -20.0 {
        // sin w = e^{iw}(1 − e^{−2iw}) / (2i)
        I * w - (2.0 * I).ln() + (1.0 - (-2.0 * I * w).exp()).ln()
    } else {
        w.sin().ln()
    }
}

/// `2^s π^{s−1} sin(πs/2) Γ(1−s)`, the factor relating `ζ(s)` to `ζ(1−s)`.
pub fn functional_factor(s: C64) -> C64 {
    let log = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_sin(s * (PI / 2.0)) + ln_gamma(1.0 - s);
    log.exp()
}

/// Riemann zeta function.
pub fn zeta(s: C64) -> Result<C64> {
    if (s - 1.0).norm() < POLE_TOL {
        return Err(Error::Pole { symbol: "zeta".into(), at: s });
    }
    if s.im == 0.0 && s.re < 0.0 && s.re % 2.0 == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    // Near the origin the reflection would multiply 0 by the pole at 1.
    if s.re >= 0.5 || s.norm() < 0.25 {
        Ok(zeta_euler_maclaurin(s))
    } else {
        Ok(functional_factor(s) * zeta_euler_maclaurin(1.0 - s))
    }
}

/// `ζ(s)` with the pole mapped to a non-finite value, for use as a density.
pub fn zeta_or_nan(s: C64) -> C64 {
    zeta(s).unwrap_or(C64::new(f64::NAN, f64::NAN))
}
