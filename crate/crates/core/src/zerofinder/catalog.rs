use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scan::{newton, scan_fn, tight_count, TIGHT_HALF_SIDE};
use crate::complex::C64;
use crate::contours::{count_zeros, rectangle};
use crate::error::{Error, Result};
use crate::symbols::zeta::zeta_or_nan;

/// Evaluator fingerprint stored with every catalogue; a mismatch on load
/// means the cached zeros came from a different ζ implementation.
pub const CATALOG_VERSION: &str =
    "borelcalc-zeta-catalog/1 zeta=euler-maclaurin(b12)+reflection gamma=lanczos(g=607/128,n=15)";

/// Desk-scale limit on the catalogue size.
pub const MAX_CATALOG_SIZE: usize = 100;

/// Largest `|ζ|` accepted at a catalogued zero.
pub const CATALOG_RESIDUAL_TOL: f64 = 1e-10;

const STRIP: (f64, f64) = (-0.25, 1.25);
const STRIP_START: f64 = 1.0;
const STRIP_STEP: f64 = 10.0;
const SCAN_DEPTH: u32 = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogZero {
    pub ordinate: f64,
    pub real_part: f64,
    /// Isolating box `[re_lo, im_lo, re_hi, im_hi]`.
    #[serde(rename = "box")]
    pub bounds: [f64; 4],
    pub residual: f64,
}

impl CatalogZero {
    pub fn location(&self) -> C64 {
        C64::new(self.real_part, self.ordinate)
    }

    fn certify(&self) -> Result<()> {
        let [a, b, c, d] = self.bounds;
        let n = count_zeros(zeta_or_nan, &rectangle(C64::new(a, b), C64::new(c, d))?)?;
        if n != 1 {
            return Err(Error::CertificationFailure {
                at: self.location(),
                reason: format!("isolating box holds {n} zeros"),
            });
        }
        let r = zeta_or_nan(self.location()).norm();
        if r.is_nan() || r > CATALOG_RESIDUAL_TOL {
            return Err(Error::CertificationFailure { at: self.location(), reason: format!("|ζ| = {r:e}") });
        }
        Ok(())
    }
}

/// Certified prefix of the nontrivial zeros of ζ in the upper half plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaZeroCatalog {
    pub version: String,
    /// Every nontrivial zero with `0 < Im ≤ covered_height` is listed.
    pub covered_height: f64,
    pub zeros: Vec<CatalogZero>,
    #[serde(skip)]
    path: Option<PathBuf>,
}

/// Refines a scan hit and builds its certified entry.
fn certified_entry(s: C64) -> Result<CatalogZero> {
    let s = newton(&zeta_or_nan, s, 1, 1e-3).unwrap_or(s);
    if tight_count(&zeta_or_nan, s)? != 1 {
        return Err(Error::CertificationFailure { at: s, reason: "not a simple zero".into() });
    }
    if (s.re - 0.5).abs() > 1e-8 {
        return Err(Error::CertificationFailure { at: s, reason: "refined zero is off the critical line".into() });
    }
    let d = TIGHT_HALF_SIDE;
    let entry = CatalogZero {
        ordinate: s.im,
        real_part: s.re,
        bounds: [s.re - d, s.im - d, s.re + d, s.im + d],
        residual: zeta_or_nan(s).norm(),
    };
    entry.certify()?;
    Ok(entry)
}

/// Scans the strip upwards in boxes until `done(found, top)` holds.
fn scan_strip(done: impl Fn(usize, f64) -> bool) -> Result<(Vec<CatalogZero>, f64)> {
    let mut zeros = Vec::new();
    let mut bottom = STRIP_START;
    loop {
        let top = bottom + STRIP_STEP;
        let mut hits = scan_fn(zeta_or_nan, C64::new(STRIP.0, bottom), C64::new(STRIP.1, top), SCAN_DEPTH)?;
        hits.sort_by(|a, b| a.location.im.total_cmp(&b.location.im));
        // the root box may be jittered slightly; keep each zero in one box only
        for h in hits.into_iter().filter(|h| h.location.im > bottom && h.location.im <= top) {
            if h.multiplicity != 1 {
                return Err(Error::CertificationFailure { at: h.location, reason: "multiple zero".into() });
            }
            zeros.push(certified_entry(h.location)?);
        }
        log::debug!("catalogue scan up to {top}: {} zeros", zeros.len());
        if done(zeros.len(), top) {
            return Ok((zeros, top));
        }
        bottom = top;
    }
}

impl ZetaZeroCatalog {
    /// The first `n` nontrivial zeros.
    pub fn build(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_CATALOG_SIZE {
            return Err(Error::Unsupported(format!("catalogue size must be in 1..={MAX_CATALOG_SIZE}, got {n}")));
        }
        let (mut zeros, top) = scan_strip(|k, _| k >= n)?;
        let covered = if zeros.len() > n { 0.5 * (zeros[n - 1].ordinate + zeros[n].ordinate) } else { top };
        zeros.truncate(n);
        Ok(Self::from_parts(zeros, covered))
    }

    /// Every nontrivial zero with ordinate up to `height`.
    pub fn build_to_height(height: f64) -> Result<Self> {
        let (mut zeros, top) = scan_strip(|k, top| top >= height || k > MAX_CATALOG_SIZE)?;
        if top < height {
            return Err(Error::Unsupported(format!("height {height} needs more than {MAX_CATALOG_SIZE} zeros")));
        }
        zeros.retain(|z| z.ordinate <= top);
        Ok(Self::from_parts(zeros, top))
    }

    fn from_parts(zeros: Vec<CatalogZero>, covered_height: f64) -> Self {
        ZetaZeroCatalog { version: CATALOG_VERSION.to_string(), covered_height, zeros, path: None }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Nontrivial zeros in the upper half plane.
    pub fn nontrivial(&self) -> impl Iterator<Item = C64> + '_ {
        self.zeros.iter().map(CatalogZero::location)
    }

    pub fn save(&mut self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        self.path = Some(path.to_path_buf());
        Ok(())
    }

    /// Loads and re-certifies every entry.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cat: ZetaZeroCatalog = serde_json::from_str(&fs::read_to_string(path)?)?;
        if cat.version != CATALOG_VERSION {
            return Err(Error::StaleCatalog(format!(
                "{} was written by \"{}\", current evaluator is \"{CATALOG_VERSION}\"",
                path.display(),
                cat.version
            )));
        }
        if cat.zeros.windows(2).any(|w| w[0].ordinate >= w[1].ordinate) {
            return Err(Error::StaleCatalog("ordinates are not strictly increasing".into()));
        }
        if cat.zeros.last().is_some_and(|z| z.ordinate > cat.covered_height) {
            return Err(Error::StaleCatalog("a zero lies above the covered height".into()));
        }
        for z in &cat.zeros {
            z.certify()?;
        }
        cat.path = Some(path.to_path_buf());
        Ok(cat)
    }
}

/// Builds the first `n` zeros and optionally writes them to `persist`.
pub fn build_zeta_catalog(n: usize, persist: Option<&Path>) -> Result<ZetaZeroCatalog> {
    let mut cat = ZetaZeroCatalog::build(n)?;
    if let Some(p) = persist {
        cat.save(p)?;
    }
    Ok(cat)
}
