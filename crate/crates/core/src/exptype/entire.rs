use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex::{parse_complex, C64, I};
use crate::error::{Error, Result};

/// Agreement required between the two representations of an [`EntireFn`].
pub const REPRESENTATION_TOL: f64 = 1e-8;

/// `p(z) e^{λz}` with ascending polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    #[serde(with = "crate::complex::serde_pair::vec")]
    pub poly: Vec<C64>,
    #[serde(with = "crate::complex::serde_pair")]
    pub lambda: C64,
}

impl ExpTerm {
    pub fn new(poly: Vec<C64>, lambda: C64) -> Self {
        ExpTerm { poly, lambda }
    }

    pub fn degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    fn poly_at(&self, z: C64) -> C64 {
        self.poly.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `d^k/dz^k [p(z) e^{λz}] = Σ_j C(k,j) λ^{k−j} p^{(j)}(z) e^{λz}`.
    pub fn derivative(&self, k: usize, z: C64) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        let mut binom = 1.0;
        let mut dpoly = self.poly.clone();
        for j in 0..=k.min(self.degree()) {
            if j > 0 {
                binom *= (k - j + 1) as f64 / j as f64;
                dpoly = dpoly.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
            }
            let pj = dpoly.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c);
            total += pj * self.lambda.powu((k - j) as u32) * binom;
        }
        total * (self.lambda * z).exp()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.poly_at(z) * (self.lambda * z).exp()
    }
}

/// An entire function of exponential type: a finite exp-poly sum, a
/// truncated power series, or both.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EntireFn {
    #[serde(default)]
    pub terms: Vec<ExpTerm>,
    #[serde(default, with = "crate::complex::serde_pair::option_vec", skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<C64>>,
    #[serde(rename = "type", default, with = "type_decl")]
    pub declared_type: Option<f64>,
}

mod type_decl {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Known(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(t) => Repr::Known(*t).serialize(s),
            None => Repr::Text("unknown".into()).serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            Some(Repr::Known(t)) => Ok(Some(t)),
            Some(Repr::Text(t)) if t == "unknown" => Ok(None),
            Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("type must be a number or \"unknown\", got {t:?}"))),
            None => Ok(None),
        }
    }
}

impl EntireFn {
    /// Term representation; exponents must be pairwise distinct.
    pub fn from_terms(terms: Vec<ExpTerm>) -> Result<Self> {
        let f = EntireFn { terms, series: None, declared_type: None };
        f.validate()?;
        Ok(f)
    }

    /// Truncated power series `a_0 + a_1 z + … + a_N z^N`.
    pub fn from_series(coeffs: Vec<C64>, declared_type: Option<f64>) -> Result<Self> {
        let f = EntireFn { terms: vec![], series: Some(coeffs), declared_type };
        f.validate()?;
        Ok(f)
    }

    pub fn exp(lambda: C64) -> Self {
        EntireFn { terms: vec![ExpTerm::new(vec![C64::new(1.0, 0.0)], lambda)], series: None, declared_type: None }
    }

    pub fn polyexp(poly: Vec<C64>, lambda: C64) -> Self {
        EntireFn { terms: vec![ExpTerm::new(poly, lambda)], series: None, declared_type: None }
    }

    /// `sin(a z) = (e^{iaz} − e^{−iaz}) / (2i)`.
    pub fn sin(a: C64) -> Self {
        let c = 0.5 * -I;
        Self::sum_of(vec![ExpTerm::new(vec![c], I * a), ExpTerm::new(vec![-c], -I * a)])
    }

    /// `cos(a z) = (e^{iaz} + e^{−iaz}) / 2`.
    pub fn cos(a: C64) -> Self {
        let c = C64::new(0.5, 0.0);
        Self::sum_of(vec![ExpTerm::new(vec![c], I * a), ExpTerm::new(vec![c], -I * a)])
    }

    /// Collects terms, merging equal exponents and dropping zero polynomials.
    pub fn sum_of(terms: Vec<ExpTerm>) -> Self {
        let mut merged: Vec<ExpTerm> = Vec::new();
        for t in terms {
            if let Some(m) = merged.iter_mut().find(|m| m.lambda == t.lambda) {
                if m.poly.len() < t.poly.len() {
                    m.poly.resize(t.poly.len(), C64::new(0.0, 0.0));
                }
                for (a, b) in m.poly.iter_mut().zip(&t.poly) {
                    *a += b;
                }
            } else {
                merged.push(t);
            }
        }
        for m in &mut merged {
            while m.poly.len() > 1 && m.poly.last() == Some(&C64::new(0.0, 0.0)) {
                m.poly.pop();
            }
        }
        merged.retain(|m| m.poly.iter().any(|c| *c != C64::new(0.0, 0.0)));
        EntireFn { terms: merged, series: None, declared_type: None }
    }

    /// `α f + β g` on the term representations.
    pub fn linear_combination(alpha: C64, f: &EntireFn, beta: C64, g: &EntireFn) -> Self {
        let scale = |t: &ExpTerm, c: C64| ExpTerm::new(t.poly.iter().map(|p| p * c).collect(), t.lambda);
        let terms = f.terms.iter().map(|t| scale(t, alpha)).chain(g.terms.iter().map(|t| scale(t, beta))).collect();
        Self::sum_of(terms)
    }

    pub fn with_series(mut self, coeffs: Vec<C64>) -> Result<Self> {
        self.series = Some(coeffs);
        self.validate()?;
        Ok(self)
    }

    pub fn with_type(mut self, tau: f64) -> Result<Self> {
        self.declared_type = Some(tau);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() && self.series.is_none() {
            return Err(Error::InvalidFunction("entire function has neither terms nor series".into()));
        }
        for (i, a) in self.terms.iter().enumerate() {
            if a.poly.is_empty() {
                return Err(Error::InvalidFunction(format!("term {i} has an empty polynomial")));
            }
            if !crate::complex::is_finite(a.lambda) || a.poly.iter().any(|c| !crate::complex::is_finite(*c)) {
                return Err(Error::InvalidFunction(format!("term {i} has non-finite data")));
            }
            if self.terms[..i].iter().any(|b| b.lambda == a.lambda) {
                return Err(Error::InvalidFunction(format!("exponent {} appears twice", a.lambda)));
            }
        }
        if let Some(tau) = self.declared_type {
            if !(tau >= 0.0) {
                return Err(Error::InvalidFunction(format!("declared type {tau} is negative")));
            }
            if !self.terms.is_empty() && tau < self.max_lambda() {
                return Err(Error::InvalidFunction(format!(
                    "declared type {tau} is below max |λ| = {}",
                    self.max_lambda()
                )));
            }
        }
        if let (false, Some(series)) = (self.terms.is_empty(), &self.series) {
            for z in probe_points() {
                let a = self.eval_terms(z);
                let b = horner(series, z);
                if (a - b).norm() > REPRESENTATION_TOL * a.norm().max(1e-300) && (a - b).norm() > REPRESENTATION_TOL {
                    return Err(Error::InvalidFunction(format!(
                        "term and series representations disagree at {z}: {a} vs {b}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn has_terms(&self) -> bool {
        !self.terms.is_empty()
    }

    /// `max_k |λ_k|` over the term representation.
    pub fn max_lambda(&self) -> f64 {
        self.terms.iter().map(|t| t.lambda.norm()).fold(0.0, f64::max)
    }

    /// Declared type, else `max |λ_k|`, else the series estimate.
    pub fn type_bound(&self) -> Result<f64> {
        if let Some(t) = self.declared_type {
            return Ok(t);
        }
        if self.has_terms() {
            return Ok(self.max_lambda());
        }
        let series = self.series.as_ref().expect("validated");
        super::estimate_type(series)
    }

    fn eval_terms(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn eval(&self, z: C64) -> C64 {
        if self.has_terms() {
            self.eval_terms(z)
        } else {
            self.series.as_ref().map_or(C64::new(0.0, 0.0), |c| horner(c, z))
        }
    }

    /// Sum of term magnitudes `Σ |p_k(z) e^{λ_k z}|`: the scale against which
    /// evaluation roundoff is measured.
    pub fn magnitude_scale(&self, z: C64) -> f64 {
        if self.has_terms() {
            self.terms.iter().map(|t| t.eval(z).norm()).sum()
        } else {
            self.series.iter().flatten().enumerate().map(|(n, a)| a.norm() * z.norm().powi(n as i32)).sum()
        }
    }

    /// `φ^{(k)}(z)`.
    pub fn derivative(&self, k: usize, z: C64) -> C64 {
        if self.has_terms() {
            return self.terms.iter().map(|t| t.derivative(k, z)).sum();
        }
        let series: &[C64] = self.series.as_deref().unwrap_or(&[]);
        let mut total = C64::new(0.0, 0.0);
        for n in (k..series.len()).rev() {
            let falling: f64 = ((n - k + 1)..=n).map(|m| m as f64).product();
            total = total * z + series[n] * falling;
        }
        total
    }

    /// Taylor coefficients `a_0 … a_N` at 0.
    pub fn taylor(&self, n_max: usize) -> Vec<C64> {
        if !self.has_terms() {
            let mut s = self.series.clone().unwrap_or_default();
            s.resize(n_max + 1, C64::new(0.0, 0.0));
            return s;
        }
        let mut out = vec![C64::new(0.0, 0.0); n_max + 1];
        for t in &self.terms {
            // λ^m / m!
            let mut pow = vec![C64::new(1.0, 0.0); n_max + 1];
            for m in 1..=n_max {
                pow[m] = pow[m - 1] * t.lambda / m as f64;
            }
            for (d, &p) in t.poly.iter().enumerate() {
                for n in d..=n_max {
                    out[n] += p * pow[n - d];
                }
            }
        }
        out
    }

    /// Parses `exp:λ`, `polyexp:c0,c1,…@λ`, `sin[:a]`, `cos[:a]`, `one`,
    /// `json:path`, joined by `;` into a sum.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (head, arg) = match part.split_once(':') {
                Some((h, a)) => (h, Some(a)),
                None => (part, None),
            };
            let f = match (head, arg) {
                ("exp", Some(a)) => Self::exp(parse_complex(a)?),
                ("one", None) => Self::exp(C64::new(0.0, 0.0)),
                ("sin", a) => Self::sin(a.map(parse_complex).transpose()?.unwrap_or(C64::new(1.0, 0.0))),
                ("cos", a) => Self::cos(a.map(parse_complex).transpose()?.unwrap_or(C64::new(1.0, 0.0))),
                ("polyexp", Some(a)) => {
                    let (poly, lambda) = a
                        .split_once('@')
                        .ok_or_else(|| Error::Parse(format!("polyexp needs `coeffs@λ`, got `{a}`")))?;
                    let poly = poly.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                    Self::polyexp(poly, parse_complex(lambda)?)
                }
                ("json", Some(path)) => {
                    let f = Self::from_json_file(Path::new(path))?;
                    if !f.has_terms() {
                        if spec.contains(';') {
                            return Err(Error::Parse("series-only functions cannot be summed".into()));
                        }
                        return Ok(f);
                    }
                    f
                }
                _ => return Err(Error::Parse(format!("unknown function spec `{part}`"))),
            };
            terms.extend(f.terms);
        }
        if terms.is_empty() {
            return Err(Error::Parse(format!("empty function spec `{spec}`")));
        }
        let f = Self::sum_of(terms);
        if f.terms.is_empty() {
            return Err(Error::Parse(format!("function spec `{spec}` sums to zero")));
        }
        Ok(f)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let f: EntireFn = serde_json::from_str(&text)?;
        f.validate()?;
        Ok(f)
    }
}

pub(crate) fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// 16 fixed pseudo-random points in the closed unit disc.
fn probe_points() -> impl Iterator<Item = C64> {
    let mut state = 0x853c_49e6_748f_ea9b_u64;
    (0..16).map(move |_| {
        let mut next = || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        C64::from_polar(next().sqrt(), std::f64::consts::TAU * next())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn derivatives_of_polyexp() {
        // (1 + 2z) e^{-z}: f' = (2 - 1 - 2z) e^{-z} = (1 - 2z) e^{-z}
        let f = EntireFn::polyexp(vec![c(1.0, 0.0), c(2.0, 0.0)], c(-1.0, 0.0));
        let z = c(0.3, -0.7);
        let expect = (1.0 - 2.0 * z) * (-z).exp();
        assert!((f.derivative(1, z) - expect).norm() < 1e-15);
        // f'' = (-2 - 1 + 2z) e^{-z}
        assert!((f.derivative(2, z) - (2.0 * z - 3.0) * (-z).exp()).norm() < 1e-14);
        assert_eq!(f.derivative(0, z), f.eval(z));
    }

    #[test]
    fn trig_constructors() {
        let z = c(0.4, 0.2);
        assert!((EntireFn::sin(c(1.0, 0.0)).eval(z) - z.sin()).norm() < 1e-15);
        assert!((EntireFn::cos(c(2.0, 0.0)).eval(z) - (2.0 * z).cos()).norm() < 1e-15);
        assert!((EntireFn::sin(c(1.0, 0.0)).derivative(1, c(0.0, 0.0)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn taylor_and_series_agree() {
        let f = EntireFn::sum_of(vec![
            ExpTerm::new(vec![c(1.0, 0.0), c(2.0, 0.0)], c(-1.0, 0.0)),
            ExpTerm::new(vec![c(1.0, 0.0)], c(0.0, 2.0)),
        ]);
        let coeffs = f.taylor(40);
        let g = f.clone().with_series(coeffs.clone()).unwrap();
        let s = EntireFn::from_series(coeffs, None).unwrap();
        for z in [c(0.5, 0.5), c(-1.0, 0.2)] {
            assert!((s.eval(z) - g.eval(z)).norm() < 1e-13);
            assert!((s.derivative(2, z) - g.derivative(2, z)).norm() < 1e-11);
        }
        // a mismatched series is rejected
        assert!(f.with_series(vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn invariants_enforced() {
        let dup = vec![ExpTerm::new(vec![c(1.0, 0.0)], c(1.0, 0.0)), ExpTerm::new(vec![c(2.0, 0.0)], c(1.0, 0.0))];
        assert!(EntireFn::from_terms(dup.clone()).is_err());
        assert_eq!(EntireFn::sum_of(dup).terms[0].poly, vec![c(3.0, 0.0)]);
        assert!(EntireFn::exp(c(3.0, 0.0)).with_type(2.0).is_err());
        assert!(EntireFn::exp(c(3.0, 4.0)).with_type(5.0).is_ok());
    }

    #[test]
    fn parse_and_json_roundtrip() {
        let f = EntireFn::parse("exp:2;polyexp:1,2@-1;cos:1").unwrap();
        assert_eq!(f.terms.len(), 4);
        let z = c(0.3, 0.1);
        let expect = (2.0 * z).exp() + (1.0 + 2.0 * z) * (-z).exp() + z.cos();
        assert!((f.eval(z) - expect).norm() < 1e-14);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"type\":\"unknown\""));
        let back: EntireFn = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(EntireFn::parse("exp").is_err());
        assert!(EntireFn::parse("exp:1;exp:1").is_ok());
        assert!(EntireFn::parse("").is_err());
    }
}
