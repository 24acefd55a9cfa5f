use std::fs;
use std::path::{Path, PathBuf};

use borelcalc_core::complex::parse_complex;
use borelcalc_core::contours::QuadratureConfig;
use borelcalc_core::exptype::{borel_exact, borel_series, default_polya_contour, polya_reconstruct, EntireFn};
use borelcalc_core::operator::{apply_series, apply_with_plan, plan_contour};
use borelcalc_core::solver::{assemble, homogeneous_basis, zeros_in_ball, BundleReport};
use borelcalc_core::symbols::{taylor_zeta_shifted, Family, SymbolSpec};
use borelcalc_core::zerofinder::ZetaZeroCatalog;
use borelcalc_core::zetasolver::{
    check_source_recovery, f_infinity, make_source, RecoveryReport, DEFAULT_DELTA, DEFAULT_PSI, DEFAULT_R_SCHEDULE,
};
use borelcalc_core::{Error, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{ApplyArgs, BorelArgs, CatalogArgs, RecoverArgs, SolveArgs, ZerosArgs, ZetaSolveArgs};
use crate::grid::{check_schedule, parse_grid, parse_real_grid};
use crate::report::{Report, Table};
use crate::CliError;

pub const CATALOG_ENV: &str = "BORELCALC_CATALOG";
pub const DEFAULT_TAYLOR_ORDER: usize = 32;
pub const DEFAULT_SOLVE_GRID: &str = "0:2:0.1";
pub const DEFAULT_ZETA_TOL: f64 = 1e-6;

/// One evaluated point: where, what, and how far off it may be.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointValue {
    #[serde(with = "borelcalc_core::complex::serde_pair")]
    pub at: C64,
    #[serde(with = "borelcalc_core::complex::serde_pair")]
    pub value: C64,
    pub error_estimate: f64,
}

fn point_table(points: &[PointValue], axis: &'static str) -> Table {
    let (re, im): (&'static str, &'static str) =
        if axis == "t" { ("t_re", "t_im") } else { ("z_re", "z_im") };
    let mut table = Table::new(vec![re, im, "value_re", "value_im", "error"]);
    for p in points {
        table.push(vec![p.at.re, p.at.im, p.value.re, p.value.im, p.error_estimate]);
    }
    table
}

fn required<T: Clone>(v: &Option<T>, flag: &'static str) -> Result<T, CliError> {
    v.clone().ok_or(CliError::Missing(flag))
}

/// Spec strings are user input: parse failures are usage errors.
fn parse_input<T>(r: borelcalc_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        Error::Parse(m) => CliError::usage(m),
        other => CliError::Domain(other),
    })
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn borel(args: &BorelArgs, cfg: &QuadratureConfig) -> Result<Report, CliError> {
    let f = parse_input(EntireFn::parse(&required(&args.function, "--fn")?))?;
    let zs = parse_grid(&required(&args.z, "--z")?)?;
    let mut points = Vec::with_capacity(zs.len());
    let diagnostics;
    if args.reconstruct.unwrap_or(false) {
        let b = borel_exact(&f)?;
        let gamma = default_polya_contour(&f)?;
        let mut deviation = 0.0f64;
        for &z in &zs {
            let r = polya_reconstruct(&b, &gamma, z, cfg)?;
            if f.has_terms() {
                deviation = deviation.max((r.value - f.eval(z)).norm());
            }
            points.push(PointValue { at: z, value: r.value, error_estimate: r.error_estimate });
        }
        diagnostics = json!({"mode": "reconstruct", "contour": gamma.label(), "max_deviation": deviation});
    } else if f.has_terms() {
        let b = borel_exact(&f)?;
        let radius = b.conjugate_diagram_radius();
        for &z in &zs {
            let v = b.eval(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::OutsideDomain { point: z, reason: "singularity of the Borel transform".into() }.into());
            }
            points.push(PointValue { at: z, value: v, error_estimate: 0.0 });
        }
        diagnostics = json!({"mode": "exact", "singularity_radius": radius});
    } else {
        let series = f.series.as_deref().unwrap_or_default();
        for &z in &zs {
            let e = borel_series(series, z)?;
            points.push(PointValue { at: z, value: e.value, error_estimate: e.remainder });
        }
        diagnostics = json!({"mode": "series"});
    }
    Ok(Report { results: to_json(&points), diagnostics, table: point_table(&points, "z") })
}

fn series_taylor(symbol: &SymbolSpec, order: usize) -> Result<borelcalc_core::symbols::TaylorData, CliError> {
    if let Some(t) = symbol.taylor() {
        return Ok(t.clone());
    }
    match symbol.family() {
        Family::ZetaShifted { h } if *h > 1.0 => Ok(taylor_zeta_shifted(*h, order, 0.5 * (h - 1.0).sqrt())?),
        _ => Err(Error::Unsupported(format!("no Taylor data for symbol {}", symbol.label())).into()),
    }
}

pub fn apply(args: &ApplyArgs, cfg: &QuadratureConfig) -> Result<Report, CliError> {
    let symbol = parse_input(SymbolSpec::parse(&required(&args.symbol, "--symbol")?))?;
    let phi = parse_input(EntireFn::parse(&required(&args.function, "--fn")?))?;
    let ts = parse_grid(&required(&args.t, "--t")?)?;
    let mut points = Vec::with_capacity(ts.len());
    let diagnostics;
    if args.series.unwrap_or(false) {
        let taylor = series_taylor(&symbol, args.taylor_order.unwrap_or(DEFAULT_TAYLOR_ORDER))?;
        let mut terms = 0;
        for &t in &ts {
            let s = apply_series(&taylor, &phi, t)?;
            terms = terms.max(s.terms_used);
            points.push(PointValue { at: t, value: s.value, error_estimate: s.last_increment });
        }
        diagnostics = json!({"method": "series", "taylor_radius": taylor.radius, "terms_used": terms});
    } else {
        let plan = plan_contour(&symbol, &phi)?;
        for &t in &ts {
            let a = apply_with_plan(&symbol, &phi, &plan, t, cfg)?;
            points.push(PointValue { at: t, value: a.value, error_estimate: a.error_estimate });
        }
        diagnostics = json!({"method": "contour", "strategy": plan.strategy, "contours": plan.labels()});
    }
    Ok(Report { results: to_json(&points), diagnostics, table: point_table(&points, "t") })
}

/// Catalogue from `--catalog` or the environment: loaded if the file
/// exists, otherwise built to `height` and saved there.
fn resolve_catalog(flag: Option<&Path>, height: f64) -> Result<Option<ZetaZeroCatalog>, CliError> {
    let path = match flag {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CATALOG_ENV).map(PathBuf::from),
    };
    let Some(path) = path else { return Ok(None) };
    if path.exists() {
        return Ok(Some(ZetaZeroCatalog::load(&path)?));
    }
    let mut cat = ZetaZeroCatalog::build_to_height(height)?;
    cat.save(&path)?;
    log::info!("built catalogue of {} zeros at {}", cat.len(), path.display());
    Ok(Some(cat))
}

fn catalog_for(symbol: &SymbolSpec, tau: f64, flag: Option<&Path>) -> Result<Option<ZetaZeroCatalog>, CliError> {
    match symbol.family() {
        Family::ZetaShifted { .. } => resolve_catalog(flag, tau * tau),
        _ => Ok(None),
    }
}

fn positive(v: f64, flag: &str) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::usage(format!("{flag} must be positive, got {v}")))
    }
}

pub fn zeros(args: &ZerosArgs) -> Result<Report, CliError> {
    let symbol = parse_input(SymbolSpec::parse(&required(&args.symbol, "--symbol")?))?;
    let tau = positive(required(&args.radius, "--radius")?, "--radius")?;
    let catalog = catalog_for(&symbol, tau, args.catalog.as_deref())?;
    let records = zeros_in_ball(&symbol, tau, catalog.as_ref())?;
    let mut table = Table::new(vec!["re", "im", "multiplicity", "residual"]);
    for r in &records {
        table.push(vec![r.location.re, r.location.im, r.multiplicity as f64, r.residual]);
    }
    let total: u32 = records.iter().map(|r| r.multiplicity).sum();
    let diagnostics = json!({
        "count": records.len(),
        "total_multiplicity": total,
        "catalog_height": catalog.as_ref().map(|c| c.covered_height),
    });
    Ok(Report { results: to_json(&records), diagnostics, table })
}

/// Coefficient literal in a `--homog-coeffs` file: `"a+bi"`, a number, or `[re, im]`.
#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffLiteral {
    Text(String),
    Real(f64),
    Pair([f64; 2]),
}

pub fn read_coefficients(path: &Path) -> Result<Vec<Vec<C64>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Domain(e.into()))?;
    let raw: Vec<Vec<CoeffLiteral>> = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: expected a list of coefficient lists: {e}", path.display())))?;
    raw.into_iter()
        .map(|mode| {
            mode.into_iter()
                .map(|c| match c {
                    CoeffLiteral::Text(s) => parse_input(parse_complex(&s)),
                    CoeffLiteral::Real(x) => Ok(C64::new(x, 0.0)),
                    CoeffLiteral::Pair([re, im]) => Ok(C64::new(re, im)),
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResults {
    pub bundle: BundleReport,
    /// `φ(t)` on the grid; the error column is the pointwise residual.
    pub solution: Vec<PointValue>,
}

pub fn solve(args: &SolveArgs, cfg: &QuadratureConfig) -> Result<Report, CliError> {
    let symbol = parse_input(SymbolSpec::parse(&required(&args.symbol, "--symbol")?))?;
    let rhs = required(&args.rhs, "--rhs")?;
    let g = if rhs.trim() == "zero" { EntireFn::default() } else { parse_input(EntireFn::parse(&rhs))? };
    let tau = positive(required(&args.radius, "--radius")?, "--radius")?;
    let grid = parse_grid(args.grid.as_deref().unwrap_or(DEFAULT_SOLVE_GRID))?;
    let coeffs = match &args.homog_coeffs {
        Some(p) => read_coefficients(p)?,
        None => Vec::new(),
    };
    let catalog = catalog_for(&symbol, tau, args.catalog.as_deref())?;
    let zeros = zeros_in_ball(&symbol, tau, catalog.as_ref())?;
    let basis = homogeneous_basis(&symbol, tau, &zeros)?;
    let bundle = assemble(&symbol, &g, &basis, &coeffs, &grid, cfg)?;
    let report = bundle.report();
    let mut solution = Vec::with_capacity(grid.len());
    for (k, &t) in grid.iter().enumerate() {
        let value = bundle.eval(t, cfg)?;
        solution.push(PointValue { at: t, value, error_estimate: report.residual_report.residuals[k] });
    }
    let diagnostics = json!({
        "homogeneous_dimension": report.homogeneous_dimension,
        "max_residual": report.residual_report.max,
        "residual_passed": bundle.residual_report.passed(),
    });
    let table = point_table(&solution, "t");
    Ok(Report { results: to_json(&SolveResults { bundle: report, solution }), diagnostics, table })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub t: f64,
    #[serde(with = "borelcalc_core::complex::serde_pair")]
    pub value: C64,
    /// Gap between the last two radii used.
    pub error_estimate: f64,
    pub converged_at: f64,
    pub gaps: Vec<f64>,
    pub decay_rate: Option<f64>,
}

fn schedule(r: &Option<Vec<f64>>) -> Result<Vec<f64>, CliError> {
    let r = r.clone().unwrap_or_else(|| DEFAULT_R_SCHEDULE.to_vec());
    check_schedule(&r)?;
    Ok(r)
}

pub fn zeta_solve(args: &ZetaSolveArgs, cfg: &QuadratureConfig) -> Result<Report, CliError> {
    let h = required(&args.h, "--h")?;
    let source = parse_input(make_source(&required(&args.source, "--source")?))?;
    let ts = parse_real_grid(&required(&args.t, "--t")?)?;
    if h.is_nan() || h <= 1.0 {
        return Err(Error::Unsupported("h ≤ 1 unsupported in zeta-solve".into()).into());
    }
    let psi = args.psi.unwrap_or(DEFAULT_PSI);
    let delta = args.delta.unwrap_or(DEFAULT_DELTA);
    let radii = schedule(&args.r_schedule)?;
    let tol = args.tol.unwrap_or(DEFAULT_ZETA_TOL);
    let mut points = Vec::with_capacity(ts.len());
    for &t in &ts {
        let rep = f_infinity(&source, h, psi, delta, C64::new(t, 0.0), &radii, tol, cfg)?;
        let k = rep.radii.iter().position(|&r| r == rep.converged_at).unwrap_or(1);
        points.push(LimitPoint {
            t,
            value: rep.value,
            error_estimate: rep.gaps[k - 1],
            converged_at: rep.converged_at,
            gaps: rep.gaps,
            decay_rate: rep.decay_rate,
        });
    }
    let mut table = Table::new(vec!["t", "value_re", "value_im", "converged_at", "error"]);
    for p in &points {
        table.push(vec![p.t, p.value.re, p.value.im, p.converged_at, p.error_estimate]);
    }
    let diagnostics = json!({"source": source.name(), "psi": psi, "delta": delta, "r_schedule": radii, "tol": tol});
    Ok(Report { results: to_json(&points), diagnostics, table })
}

pub fn recover(args: &RecoverArgs, cfg: &QuadratureConfig) -> Result<Report, CliError> {
    let source = parse_input(make_source(&required(&args.source, "--source")?))?;
    let ts = parse_real_grid(&required(&args.t, "--t")?)?;
    let psi = args.psi.unwrap_or(DEFAULT_PSI);
    let delta = args.delta.unwrap_or(DEFAULT_DELTA);
    let radii = schedule(&args.r_schedule)?;
    let rep: RecoveryReport = check_source_recovery(&source, psi, delta, &ts, &radii, cfg)?;
    let mut table = Table::new(vec!["r", "error"]);
    for (r, e) in rep.radii.iter().zip(&rep.errors) {
        table.push(vec![*r, *e]);
    }
    let diagnostics = json!({"source": source.name(), "max_error": rep.max_error, "monotone": rep.monotone});
    Ok(Report { results: to_json(&rep), diagnostics, table })
}

pub fn catalog(args: &CatalogArgs) -> Result<Report, CliError> {
    let path = args.catalog.clone().or_else(|| std::env::var_os(CATALOG_ENV).map(PathBuf::from));
    let (cat, action) = match (args.count, &path) {
        (Some(n), _) => {
            let mut cat = ZetaZeroCatalog::build(n)?;
            if let Some(p) = &path {
                cat.save(p)?;
            }
            (cat, "built")
        }
        (None, Some(p)) => (ZetaZeroCatalog::load(p)?, "verified"),
        (None, None) => return Err(CliError::Missing("--count or --catalog")),
    };
    let mut table = Table::new(vec!["real_part", "ordinate", "residual"]);
    for z in &cat.zeros {
        table.push(vec![z.real_part, z.ordinate, z.residual]);
    }
    let diagnostics = json!({"action": action, "count": cat.len(), "covered_height": cat.covered_height});
    Ok(Report { results: to_json(&cat), diagnostics, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn apply_results_roundtrip_through_json() {
        let args = ApplyArgs {
            symbol: Some("poly:0,1".into()),
            function: Some("exp:2".into()),
            t: Some("0:1:0.5".into()),
            ..Default::default()
        };
        let rep = apply(&args, &QuadratureConfig::default()).unwrap();
        let text = serde_json::to_string(&rep.results).unwrap();
        let back: Vec<PointValue> = serde_json::from_str(&text).unwrap();
        let original: Vec<PointValue> = serde_json::from_value(rep.results.clone()).unwrap();
        assert_eq!(back, original);
        for p in &back {
            let exact = 2.0 * (2.0 * p.at).exp();
            assert!((p.value - exact).norm() <= 1e-9 * exact.norm());
        }
    }

    #[test]
    fn coefficient_file_accepts_all_literal_forms() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"[["1+2i", 3], [[0.5, -1]], []]"#).unwrap();
        let c = read_coefficients(file.path()).unwrap();
        assert_eq!(c, vec![vec![C64::new(1.0, 2.0), C64::new(3.0, 0.0)], vec![C64::new(0.5, -1.0)], vec![]]);
    }

    #[test]
    fn solve_reports_the_polynomial_example() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        // modes are sorted by the scan; find them first
        let symbol = SymbolSpec::parse("poly:0,0,-1,1").unwrap();
        let zeros = zeros_in_ball(&symbol, 2.0, None).unwrap();
        let coeffs: Vec<Value> = zeros
            .iter()
            .map(|z| if z.location.norm() < 0.5 { json!([1, 2]) } else { json!([3]) })
            .collect();
        write!(file, "{}", Value::Array(coeffs)).unwrap();
        let args = SolveArgs {
            symbol: Some("poly:0,0,-1,1".into()),
            rhs: Some("zero".into()),
            radius: Some(2.0),
            homog_coeffs: Some(file.path().to_path_buf()),
            ..Default::default()
        };
        let rep = solve(&args, &QuadratureConfig::default()).unwrap();
        let res: SolveResults = serde_json::from_value(rep.results).unwrap();
        assert_eq!(res.bundle.homogeneous_dimension, 3);
        assert_eq!(res.solution.len(), 21);
        for p in &res.solution {
            let t = p.at.re;
            let exact = 1.0 + 2.0 * t + 3.0 * t.exp();
            assert!((p.value - exact).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn zeta_solve_refuses_small_shift() {
        let args = ZetaSolveArgs {
            h: Some(0.5),
            source: Some("one".into()),
            t: Some("1".into()),
            ..Default::default()
        };
        let err = zeta_solve(&args, &QuadratureConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("h ≤ 1 unsupported in zeta-solve"));
    }
}
