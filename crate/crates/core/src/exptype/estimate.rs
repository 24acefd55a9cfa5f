//! Order and type of an entire function from its Taylor coefficients.

use crate::complex::C64;
use crate::error::{Error, Result};
use crate::symbols::gamma::ln_factorial;

/// Smallest usable series length.
pub const MIN_TERMS: usize = 9;

/// `(n, ln|φ^{(n)}(0)|)` for nonzero coefficients in the window `[N/2, N]`.
fn window(series: &[C64]) -> Result<Vec<(usize, f64)>> {
    if series.len() < MIN_TERMS {
        return Err(Error::DegenerateFunction(format!(
            "need at least {MIN_TERMS} coefficients, got {}",
            series.len()
        )));
    }
    if series.iter().all(|a| *a == C64::new(0.0, 0.0)) {
        return Err(Error::DegenerateFunction("all coefficients vanish".into()));
    }
    let n_max = series.len() - 1;
    Ok((n_max / 2..=n_max)
        .filter(|&n| n >= 2 && series[n] != C64::new(0.0, 0.0))
        .map(|n| (n, ln_factorial(n) + series[n].norm().ln()))
        .collect())
}

/// Order `ρ = (1 − limsup ln|φ^{(n)}(0)| / (n ln n))^{-1}`.
///
/// The ratio `R(n) = ln|φ^{(n)}(0)|/(n ln n)` approaches its limit like
/// `1/ln n`, far too slowly to read off at `N = 64`. The window values are
/// fitted by `A + B/ln n + C/n` in least squares and the intercept `A` is
/// taken as the limit. Polynomials give 0; `A ≥ 1` gives infinity.
pub fn estimate_order(series: &[C64]) -> Result<f64> {
    let pts = window(series)?;
    if pts.is_empty() {
        return Ok(0.0);
    }
    let rows: Vec<([f64; 3], f64)> = pts
        .iter()
        .map(|&(n, l)| {
            let ln_n = (n as f64).ln();
            ([1.0, 1.0 / ln_n, 1.0 / n as f64], l / (n as f64 * ln_n))
        })
        .collect();
    let limit = if rows.len() >= 3 {
        least_squares_intercept(&rows)
    } else {
        rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max)
    };
    if limit >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (1.0 - limit))
}

/// Type `σ = limsup |φ^{(n)}(0)|^{1/n}`, the maximum over the window.
pub fn estimate_type(series: &[C64]) -> Result<f64> {
    let pts = window(series)?;
    Ok(pts.iter().map(|&(n, l)| (l / n as f64).exp()).fold(0.0, f64::max))
}

/// Intercept of the least-squares fit through the normal equations.
fn least_squares_intercept(rows: &[([f64; 3], f64)]) -> f64 {
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (x, y) in rows {
        for i in 0..3 {
            atb[i] += x[i] * y;
            for j in 0..3 {
                ata[i][j] += x[i] * x[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&ata[i]);
        m[i][3] = atb[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][3] - s) / m[i][i];
    }
    x[0]
}
