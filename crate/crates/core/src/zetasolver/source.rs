use std::f64::consts::PI;

use crate::complex::C64;
use crate::error::{Error, Result};
use crate::symbols::gamma;

/// A registry source `g` on `[0, ∞)` with a closed-form Laplace transform.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    /// `g ≡ 1`, `ℒ(g) = 1/s`.
    One,
    /// `g = t^ν`, `ℒ(g) = Γ(ν+1)/s^{ν+1}`.
    Power(f64),
}

impl SourceKind {
    fn g(&self, t: f64) -> f64 {
        match *self {
            SourceKind::One => 1.0,
            SourceKind::Power(nu) => t.powf(nu),
        }
    }

    fn laplace(&self, s: C64) -> C64 {
        match *self {
            SourceKind::One => s.inv(),
            SourceKind::Power(nu) => gamma(C64::new(nu + 1.0, 0.0)) * (-(nu + 1.0) * s.ln()).exp(),
        }
    }

    /// Whether `ℒ(g)` has a branch cut along the negative real axis.
    fn has_branch(&self) -> bool {
        matches!(*self, SourceKind::Power(nu) if nu.fract() != 0.0)
    }
}

/// A linear combination of registry sources, all with first singularity 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceSource {
    name: String,
    parts: Vec<(f64, SourceKind)>,
}

impl LaplaceSource {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn g(&self, t: f64) -> f64 {
        self.parts.iter().map(|(c, k)| c * k.g(t)).sum()
    }

    pub fn laplace(&self, s: C64) -> C64 {
        self.parts.iter().map(|(c, k)| *c * k.laplace(s)).sum()
    }

    /// Location of the first singularity of `ℒ(g)`.
    pub fn first_singularity(&self) -> C64 {
        C64::new(0.0, 0.0)
    }

    /// Largest admissible half-angle of the angular contour. Branch cuts run
    /// along the negative real axis, so the contour rays must stay off it.
    pub fn max_angle(&self) -> f64 {
        PI
    }

    pub fn allows_angle(&self, psi: f64) -> bool {
        if self.parts.iter().any(|(_, k)| k.has_branch()) {
            psi < PI
        } else {
            psi <= PI
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &LaplaceSource, b: f64) -> LaplaceSource {
        let mut parts: Vec<(f64, SourceKind)> = self.parts.iter().map(|(c, k)| (a * c, k.clone())).collect();
        parts.extend(other.parts.iter().map(|(c, k)| (b * c, k.clone())));
        LaplaceSource { name: format!("{a}*({})+{b}*({})", self.name, other.name), parts }
    }
}

fn parse_one(name: &str) -> Result<SourceKind> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (name.trim(), None),
    };
    let number = |a: Option<&str>| -> Result<f64> {
        a.ok_or_else(|| Error::Parse(format!("source `{head}` needs a parameter")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("source `{name}`: {e}")))
    };
    match head {
        "one" => Ok(SourceKind::One),
        "power" => {
            let nu = number(arg)?;
            if !(nu > -1.0) || !nu.is_finite() {
                return Err(Error::Parse(format!("power source needs ν > −1, got {nu}")));
            }
            Ok(if nu == 0.0 { SourceKind::One } else { SourceKind::Power(nu) })
        }
        "expdecay" => {
            let b = number(arg)?;
            Err(Error::Normalization(format!(
                "ℒ(e^(-{b}t)) = 1/(s+{b}) has its first singularity at {} instead of 0; shifting is not implemented",
                -b
            )))
        }
        other => Err(Error::Parse(format!("unknown source `{other}` (expected one, power:ν, expdecay:b)"))),
    }
}

/// Registry lookup: `one`, `power:ν`, `expdecay:b` (rejected), or a sum of
/// these joined by `+`.
pub fn make_source(name: &str) -> Result<LaplaceSource> {
    let parts = name.split('+').map(|p| parse_one(p).map(|k| (1.0, k))).collect::<Result<Vec<_>>>()?;
    if parts.is_empty() {
        return Err(Error::Parse("empty source name".into()));
    }
    Ok(LaplaceSource { name: name.trim().to_string(), parts })
}
