use std::fmt;
use std::sync::Arc;

use crate::complex::{parse_complex, C64};
use crate::error::{Error, Result};

use super::dirichlet::dirichlet_l;
use super::domain::{omega_for_h, DomainDescriptor, Ray};
use super::zeta::zeta;
use super::zeta_shifted;

pub type SymbolFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

/// Which built-in family a symbol belongs to; lets callers use structure
/// (polynomial roots, zero pullback) that a black-box evaluator hides.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Ascending coefficients `c_0 + c_1 s + …`.
    Polynomial(Vec<C64>),
    Exp,
    Reciprocal,
    Zeta,
    ZetaShifted { h: f64 },
    DirichletL { chi: Vec<C64> },
    Custom,
}

/// Taylor expansion `Σ a_k (s − center)^k`, valid for `|s − center| < radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorData {
    pub center: C64,
    pub coeffs: Vec<C64>,
    pub radius: f64,
}

/// An analytic symbol `f` on its domain `Ω`.
#[derive(Clone)]
pub struct SymbolSpec {
    label: String,
    eval: SymbolFn,
    omega: DomainDescriptor,
    poles: Vec<C64>,
    taylor: Option<TaylorData>,
    family: Family,
}

impl fmt::Debug for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolSpec")
            .field("label", &self.label)
            .field("omega", &self.omega)
            .field("poles", &self.poles)
            .field("family", &self.family)
            .finish()
    }
}

impl SymbolSpec {
    /// A user symbol. Poles must lie outside `omega`.
    pub fn custom(
        label: impl Into<String>,
        omega: DomainDescriptor,
        poles: Vec<C64>,
        eval: impl Fn(C64) -> Result<C64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let label = label.into();
        if let Some(p) = poles.iter().find(|p| omega.contains(**p)) {
            return Err(Error::InvalidFunction(format!("pole {p} of {label} lies inside its domain")));
        }
        Ok(SymbolSpec { label, eval: Arc::new(eval), omega, poles, taylor: None, family: Family::Custom })
    }

    /// `c_0 + c_1 s + … + c_n s^n`.
    pub fn polynomial(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidFunction("polynomial needs at least one coefficient".into()));
        }
        let cs = coeffs.clone();
        let eval = move |s: C64| Ok(cs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c));
        let label = format!(
            "poly:{}",
            coeffs.iter().map(|c| format_complex(*c)).collect::<Vec<_>>().join(",")
        );
        let taylor = TaylorData { center: C64::new(0.0, 0.0), coeffs: coeffs.clone(), radius: f64::INFINITY };
        Ok(SymbolSpec {
            label,
            eval: Arc::new(eval),
            omega: DomainDescriptor::whole(),
            poles: vec![],
            taylor: Some(taylor),
            family: Family::Polynomial(coeffs),
        })
    }

    /// `e^s`.
    pub fn exp() -> Self {
        SymbolSpec {
            label: "exp".into(),
            eval: Arc::new(|s: C64| Ok(s.exp())),
            omega: DomainDescriptor::whole(),
            poles: vec![],
            taylor: None,
            family: Family::Exp,
        }
    }

    /// `1/s` on `ℂ ∖ {0}`, the standard non-Runge example.
    pub fn reciprocal() -> Self {
        SymbolSpec {
            label: "recip".into(),
            eval: Arc::new(|s: C64| {
                if s == C64::new(0.0, 0.0) {
                    Err(Error::Pole { symbol: "recip".into(), at: s })
                } else {
                    Ok(s.inv())
                }
            }),
            omega: DomainDescriptor::plane_minus_point(C64::new(0.0, 0.0)),
            poles: vec![C64::new(0.0, 0.0)],
            taylor: None,
            family: Family::Reciprocal,
        }
    }

    /// `ζ(s)` on the plane slit along `[1, ∞)`.
    pub fn zeta() -> Self {
        SymbolSpec {
            label: "zeta".into(),
            eval: Arc::new(zeta),
            omega: DomainDescriptor::rays(vec![Ray::new(C64::new(1.0, 0.0), 0.0)]),
            poles: vec![C64::new(1.0, 0.0)],
            taylor: None,
            family: Family::Zeta,
        }
    }

    /// `ζ(s² + h)` on [`omega_for_h`].
    pub fn zeta_shifted(h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InvalidFunction(format!("shift h = {h} is not finite")));
        }
        let poles = if h > 1.0 {
            let c = (h - 1.0).sqrt();
            vec![C64::new(0.0, c), C64::new(0.0, -c)]
        } else if h < 1.0 {
            let c = (1.0 - h).sqrt();
            vec![C64::new(c, 0.0), C64::new(-c, 0.0)]
        } else {
            vec![C64::new(0.0, 0.0)]
        };
        Ok(SymbolSpec {
            label: format!("zeta-shifted:h={h}"),
            eval: Arc::new(move |s| zeta_shifted(s, h)),
            omega: omega_for_h(h),
            poles,
            taylor: None,
            family: Family::ZetaShifted { h },
        })
    }

    /// `L(s, χ)` on `Re s > 1`.
    pub fn dirichlet_l(chi: Vec<C64>) -> Result<Self> {
        if chi.is_empty() {
            return Err(Error::InvalidFunction("character table is empty".into()));
        }
        let label = format!(
            "dirichlet-l:mod={},chi={}",
            chi.len(),
            chi.iter().map(|c| format_complex(*c)).collect::<Vec<_>>().join(",")
        );
        let table = chi.clone();
        Ok(SymbolSpec {
            label,
            eval: Arc::new(move |s| dirichlet_l(s, &table)),
            omega: DomainDescriptor::half_plane(1.0),
            poles: vec![],
            taylor: None,
            family: Family::DirichletL { chi },
        })
    }

    /// Parses a CLI symbol name: `poly:c0,c1,…` (ascending powers), `exp`,
    /// `recip`, `zeta`, `zeta-shifted:h=…`, `dirichlet-l:mod=m,chi=…`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        let (head, args) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let no_args = |s: Self| match args {
            None => Ok(s),
            Some(_) => Err(Error::Parse(format!("symbol `{head}` takes no parameters"))),
        };
        match head {
            "exp" => no_args(Self::exp()),
            "recip" => no_args(Self::reciprocal()),
            "zeta" => no_args(Self::zeta()),
            "poly" => {
                let args = args.ok_or_else(|| Error::Parse("poly needs coefficients".into()))?;
                let coeffs = args.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                Self::polynomial(coeffs)
            }
            "zeta-shifted" => {
                let args = args.ok_or_else(|| Error::Parse("zeta-shifted needs h=…".into()))?;
                let h = args
                    .strip_prefix("h=")
                    .ok_or_else(|| Error::Parse(format!("expected h=…, got `{args}`")))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad shift `{args}`: {e}")))?;
                Self::zeta_shifted(h)
            }
            "dirichlet-l" => {
                let args = args.ok_or_else(|| Error::Parse("dirichlet-l needs mod=…,chi=…".into()))?;
                let rest = args
                    .strip_prefix("mod=")
                    .ok_or_else(|| Error::Parse(format!("expected mod=…, got `{args}`")))?;
                let (m, chi) = rest
                    .split_once(",chi=")
                    .ok_or_else(|| Error::Parse(format!("expected ,chi=… in `{args}`")))?;
                let m: usize = m.parse().map_err(|e| Error::Parse(format!("bad modulus `{m}`: {e}")))?;
                let chi = chi.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                if chi.len() != m {
                    return Err(Error::Parse(format!("character table has {} values for modulus {m}", chi.len())));
                }
                Self::dirichlet_l(chi)
            }
            other => Err(Error::Parse(format!("unknown symbol `{other}`"))),
        }
    }

    pub fn with_taylor(mut self, taylor: TaylorData) -> Self {
        self.taylor = Some(taylor);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn omega(&self) -> &DomainDescriptor {
        &self.omega
    }

    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    pub fn taylor(&self) -> Option<&TaylorData> {
        self.taylor.as_ref()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn evaluate(&self, s: C64) -> Result<C64> {
        (self.eval)(s)
    }

    /// Errors become NaN, which quadrature reports as a singularity on the path.
    pub fn value_or_nan(&self, s: C64) -> C64 {
        self.evaluate(s).unwrap_or(C64::new(f64::NAN, f64::NAN))
    }

    /// Evaluates at a point of `Ω`, rejecting points outside.
    pub fn evaluate_in_domain(&self, s: C64) -> Result<C64> {
        if !self.omega.contains(s) {
            return Err(Error::OutsideDomain {
                point: s,
                reason: format!("not in the domain of {} ({})", self.label, self.omega.describe()),
            });
        }
        self.evaluate(s)
    }
}

fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}
