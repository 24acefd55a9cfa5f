use borelcalc_core::complex::parse_complex;
use borelcalc_core::C64;

use crate::CliError;

/// Parses `start:stop:step` (stop included up to rounding) or a comma list
/// of complex literals.
pub fn parse_grid(spec: &str) -> Result<Vec<C64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(CliError::usage("grid is empty"));
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        1 => spec
            .split(',')
            .map(|p| parse_complex(p).map_err(|e| CliError::usage(format!("grid point: {e}"))))
            .collect(),
        3 => {
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad grid bound `{s}` in `{spec}`")))
            };
            let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if h.is_nan() || h <= 0.0 || !a.is_finite() || !b.is_finite() {
                return Err(CliError::usage(format!("grid `{spec}` needs finite bounds and a positive step")));
            }
            if b < a {
                return Err(CliError::usage(format!("grid `{spec}` is empty")));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize + 1;
            if n > 1_000_000 {
                return Err(CliError::usage(format!("grid `{spec}` has too many points")));
            }
            Ok((0..n).map(|k| C64::new(a + k as f64 * h, 0.0)).collect())
        }
        _ => Err(CliError::usage(format!("grid `{spec}` is neither start:stop:step nor a list"))),
    }
}

/// Real grid points; rejects complex entries.
pub fn parse_real_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    parse_grid(spec)?
        .into_iter()
        .map(|z| {
            if z.im == 0.0 {
                Ok(z.re)
            } else {
                Err(CliError::usage(format!("grid point {z} must be real")))
            }
        })
        .collect()
}

pub fn check_schedule(r: &[f64]) -> Result<(), CliError> {
    if r.is_empty() || r.windows(2).any(|w| w[0] >= w[1]) || r.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(CliError::usage(format!("r schedule must be positive and strictly increasing, got {r:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_includes_stop() {
        let g = parse_grid("0:3:0.1").unwrap();
        assert_eq!(g.len(), 31);
        assert!((g[30].re - 3.0).abs() < 1e-12);
        assert_eq!(parse_grid("1").unwrap(), vec![C64::new(1.0, 0.0)]);
    }

    #[test]
    fn lists_take_complex_literals() {
        let g = parse_grid("1+2i,-0.5,3i").unwrap();
        assert_eq!(g, vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, 3.0)]);
        assert!(parse_real_grid("1,2i").is_err());
    }

    #[test]
    fn malformed_grids_are_usage_errors() {
        for bad in ["", "1:2", "0:1:0", "2:1:0.5", "a:b:c"] {
            assert_eq!(parse_grid(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
        assert!(check_schedule(&[10.0, 10.0]).is_err());
        assert!(check_schedule(&[10.0, 20.0]).is_ok());
    }
}
