use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pair::TruncatedPair;
use super::source::LaplaceSource;
use crate::complex::{inv_two_pi_i, C64};
use crate::contours::{integrate, Contour, QuadratureConfig, Segment};
use crate::error::{Error, Result};

/// Whether `z` lies in the sector `|arg z| < ψ − π/2` where `f_∞` is defined.
pub fn in_sector(psi: f64, z: C64) -> bool {
    z.norm() > 0.0 && z.arg().abs() < psi - FRAC_PI_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub radii: Vec<f64>,
    #[serde(with = "crate::complex::serde_pair::vec")]
    pub values: Vec<C64>,
    /// `|φ_{r_{k+1}} − φ_{r_k}|`, from the ray stubs between the radii.
    pub gaps: Vec<f64>,
    /// Fitted `−d ln(gap)/dr` over the schedule, if the gaps allow a fit.
    pub decay_rate: Option<f64>,
    #[serde(with = "crate::complex::serde_pair")]
    pub value: C64,
    pub converged_at: f64,
}

fn validate_schedule(r_schedule: &[f64], delta: f64) -> Result<()> {
    if r_schedule.len() < 2 || r_schedule.windows(2).any(|w| w[0] >= w[1]) || r_schedule[0] <= delta {
        return Err(Error::InvalidGeometry(format!(
            "r schedule must be strictly increasing, above δ = {delta}, with at least two radii: {r_schedule:?}"
        )));
    }
    Ok(())
}

/// `∫` of `density` over both ray pieces of `κ_{r2} ∖ κ_{r1}`, over `2πi`.
fn stub_integral(
    density: impl Fn(C64) -> C64 + Sync,
    psi: f64,
    r1: f64,
    r2: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    let up = C64::from_polar(1.0, psi);
    let dn = up.conj();
    let stub = |segs: Vec<Segment>| Contour::new("stub", segs, false);
    let n = ((r2 - r1) / 5.0).ceil().max(1.0) as usize;
    let piece = |dir: C64, inbound: bool| -> Result<Contour> {
        let pts: Vec<f64> = (0..=n).map(|k| r1 + (r2 - r1) * k as f64 / n as f64).collect();
        let mut segs: Vec<Segment> =
            pts.windows(2).map(|w| Segment::Line { from: dir * w[0], to: dir * w[1] }).collect();
        if inbound {
            segs = segs.iter().rev().map(Segment::reversed).collect();
        }
        stub(segs)
    };
    let a = integrate(&density, &piece(dn, true)?, cfg)?.value;
    let b = integrate(&density, &piece(up, false)?, cfg)?.value;
    Ok((a + b) * inv_two_pi_i())
}

/// Least-squares slope of `−ln gap` against the upper radius of each gap.
fn decay_rate(radii: &[f64], gaps: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        radii[1..].iter().zip(gaps).filter(|(_, g)| **g > 0.0).map(|(r, g)| (*r, -g.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `f_∞(z) = ∫_{κ_∞} e^{sz} ℒ(g)(s)/ζ(s²+h) ds/(2πi)` as the limit of
/// `φ_r(z)` along `r_schedule`, accepted once a gap drops below `tol`.
#[allow(clippy::too_many_arguments)]
pub fn f_infinity(
    source: &LaplaceSource,
    h: f64,
    psi: f64,
    delta: f64,
    z: C64,
    r_schedule: &[f64],
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<LimitReport> {
    if !in_sector(psi, z) {
        return Err(Error::OutsideDomain {
            point: z,
            reason: format!("f_∞ is defined on |arg z| < ψ − π/2 = {:.6}", psi - FRAC_PI_2),
        });
    }
    validate_schedule(r_schedule, delta)?;
    let pairs = r_schedule
        .iter()
        .map(|&r| TruncatedPair::new(source, h, psi, delta, r))
        .collect::<Result<Vec<_>>>()?;
    let values = pairs.par_iter().map(|p| p.phi_r(z, cfg)).collect::<Result<Vec<C64>>>()?;
    let f = pairs[0].symbol().clone();
    let gaps = r_schedule
        .par_windows(2)
        .map(|w| {
            let d = stub_integral(|s| (s * z).exp() * source.laplace(s) / f.value_or_nan(s), psi, w[0], w[1], cfg)?;
            Ok(d.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let rate = decay_rate(r_schedule, &gaps);
    match gaps.iter().position(|&g| g < tol) {
        Some(k) => Ok(LimitReport {
            radii: r_schedule.to_vec(),
            value: values[k + 1],
            converged_at: r_schedule[k + 1],
            values,
            gaps,
            decay_rate: rate,
        }),
        None => Err(Error::ScheduleExhausted { tol, last_gap: *gaps.last().unwrap(), values }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub radii: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// `max_t |g_r(t) − g(t)|` for each radius.
    pub errors: Vec<f64>,
    pub max_error: f64,
    pub monotone: bool,
}

/// How well `g_r` reproduces `g` on the grid as `r` grows.
pub fn check_source_recovery(
    source: &LaplaceSource,
    psi: f64,
    delta: f64,
    t_grid: &[f64],
    r_schedule: &[f64],
    cfg: &QuadratureConfig,
) -> Result<RecoveryReport> {
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::OutsideDomain {
            point: C64::new(t_grid.iter().copied().find(|t| !(*t > 0.0)).unwrap_or(0.0), 0.0),
            reason: "source recovery is checked on t > 0".into(),
        });
    }
    validate_schedule(r_schedule, delta)?;
    // g_r does not involve the symbol; any h > 1 gives the same κ_r
    let errors = r_schedule
        .par_iter()
        .map(|&r| {
            let p = TruncatedPair::new(source, 1.0 + 1e6, psi, delta, r)?;
            t_grid.iter().try_fold(0.0f64, |m, &t| {
                Ok(m.max((p.g_r(C64::new(t, 0.0), cfg)? - source.g(t)).norm()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RecoveryReport {
        radii: r_schedule.to_vec(),
        t_grid: t_grid.to_vec(),
        max_error: *errors.last().unwrap(),
        monotone: errors.windows(2).all(|w| w[1] <= w[0]),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zetasolver::{make_source, DEFAULT_DELTA, DEFAULT_PSI, DEFAULT_R_SCHEDULE};
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn limit_converges_geometrically() {
        let one = make_source("one").unwrap();
        let z = C64::new(1.0, 0.0);
        let rep = f_infinity(&one, 2.0, DEFAULT_PSI, DEFAULT_DELTA, z, &DEFAULT_R_SCHEDULE, 1e-12, &cfg()).unwrap();
        assert!(rep.gaps[2] < rep.gaps[1] && rep.gaps[1] < rep.gaps[0]);
        let rate = rep.decay_rate.unwrap();
        assert!(rate > 0.5, "{rate}");
        let bad = f_infinity(&one, 2.0, DEFAULT_PSI, DEFAULT_DELTA, C64::new(-1.0, 0.0), &DEFAULT_R_SCHEDULE, 1e-12, &cfg());
        assert!(matches!(bad, Err(Error::OutsideDomain { .. })));
        let short = f_infinity(&one, 2.0, DEFAULT_PSI, DEFAULT_DELTA, z, &[10.0, 20.0], 1e-30, &cfg());
        assert!(matches!(short, Err(Error::ScheduleExhausted { .. })));
    }

    #[test]
    fn angle_independence() {
        let one = make_source("one").unwrap();
        let z = C64::new(1.0, 0.0);
        let a = f_infinity(&one, 2.0, 0.8 * PI, DEFAULT_DELTA, z, &DEFAULT_R_SCHEDULE, 1e-10, &cfg()).unwrap();
        let b = f_infinity(&one, 2.0, 0.9 * PI, DEFAULT_DELTA, z, &DEFAULT_R_SCHEDULE, 1e-10, &cfg()).unwrap();
        assert!((a.value - b.value).norm() < 1e-6);
    }

    #[test]
    fn recovery_of_constant_and_linear_sources() {
        let grid = [0.5, 1.0, 2.0];
        let one = make_source("one").unwrap();
        let rep = check_source_recovery(&one, DEFAULT_PSI, DEFAULT_DELTA, &grid, &DEFAULT_R_SCHEDULE, &cfg()).unwrap();
        assert!(rep.max_error <= 0.01 && rep.monotone, "{rep:?}");
        let lin = make_source("power:1").unwrap();
        let rep = check_source_recovery(&lin, DEFAULT_PSI, DEFAULT_DELTA, &[1.0], &DEFAULT_R_SCHEDULE, &cfg()).unwrap();
        assert!(rep.max_error <= 0.02);
    }
}
