//! Command-line arguments. Each command's flags double as its JSON
//! configuration: a `--config` file supplies defaults and flags override it.

use std::fs;
use std::path::{Path, PathBuf};

use borelcalc_core::contours::QuadratureConfig;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::report::Format;
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "borelcalc", version, about = "Borel-transform calculus for operators f(∂_t) with analytic symbols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Borel transform of an exp-poly function, or its Polya reconstruction.
    Borel(BorelArgs),
    /// Apply f(∂_t) to a function on a grid.
    Apply(ApplyArgs),
    /// Solve f(∂_t)φ = g and check the residual.
    Solve(SolveArgs),
    /// Certified zeros of a symbol in a ball.
    Zeros(ZerosArgs),
    /// Limit solution of ζ(∂_t² + h)φ = J for a Laplace-transformable source.
    ZetaSolve(ZetaSolveArgs),
    /// How well the truncated source g_r reproduces g.
    Recover(RecoverArgs),
    /// Build or verify a catalogue of ζ zeros.
    Catalog(CatalogArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Borel(_) => "borel",
            Command::Apply(_) => "apply",
            Command::Solve(_) => "solve",
            Command::Zeros(_) => "zeros",
            Command::ZetaSolve(_) => "zeta-solve",
            Command::Recover(_) => "recover",
            Command::Catalog(_) => "catalog",
        }
    }
}

/// Options shared by every command.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Common {
    /// JSON file with default values for any of this command's options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// `-` for stdout, `json`/`csv` for stdout in that format, or a file path.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Quadrature nodes per contour segment.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Relative change between refinements accepted as converged.
    #[arg(long)]
    pub quad_tol: Option<f64>,
    #[arg(long)]
    pub max_refinements: Option<u32>,
}

impl Common {
    pub fn quadrature(&self) -> Result<QuadratureConfig, CliError> {
        let mut q = QuadratureConfig::default();
        if let Some(n) = self.nodes {
            q.nodes_per_segment = n;
        }
        if let Some(t) = self.quad_tol {
            q.refine_until = t;
        }
        if let Some(m) = self.max_refinements {
            q.max_refinements = m;
        }
        q.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(q)
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BorelArgs {
    /// Function spec, e.g. `exp:2;polyexp:0,1@-1+i`.
    #[arg(long = "fn")]
    #[serde(rename = "fn")]
    pub function: Option<String>,
    /// Evaluation points (`start:stop:step` or a list of `a+bi`).
    #[arg(long)]
    pub z: Option<String>,
    /// Reconstruct φ(z) from its Borel transform instead.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub reconstruct: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ApplyArgs {
    /// Symbol name, e.g. `zeta-shifted:h=2`, `poly:1,0,-2`, `exp`.
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long = "fn")]
    #[serde(rename = "fn")]
    pub function: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    /// Use the Taylor series of the symbol instead of a contour.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub series: Option<bool>,
    /// Taylor order for `--series`.
    #[arg(long)]
    pub taylor_order: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveArgs {
    #[arg(long)]
    pub symbol: Option<String>,
    /// Right-hand side g as a function spec; `zero` for the homogeneous equation.
    #[arg(long)]
    pub rhs: Option<String>,
    /// Type bound τ: homogeneous modes with |s| < τ are kept.
    #[arg(long)]
    pub radius: Option<f64>,
    /// JSON file: one coefficient list per homogeneous mode.
    #[arg(long)]
    pub homog_coeffs: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ZerosArgs {
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ZetaSolveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Source name: `one`, `power:ν`, or a `+`-joined sum.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub r_schedule: Option<Vec<f64>>,
    #[arg(long)]
    pub t: Option<String>,
    /// Gap between successive radii accepted as converged.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RecoverArgs {
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub r_schedule: Option<Vec<f64>>,
    #[arg(long)]
    pub t: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CatalogArgs {
    /// Number of zeros to build; without it an existing catalogue is verified.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// Overlays the flags that were set onto the `--config` file, if any.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = config else {
        return serde_json::from_value(to_value(flags)).map_err(|e| CliError::usage(e.to_string()));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut base: Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("config {} is not a JSON object: {e}", path.display())))?;
    base.remove("command");
    if let Value::Object(set) = to_value(flags) {
        base.extend(set.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(base))
        .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("argument structs serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_override_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"command": "apply", "symbol": "exp", "fn": "exp:1", "t": "0:1:0.5", "nodes": 48}}"#).unwrap();
        let flags = ApplyArgs { function: Some("exp:2".into()), ..Default::default() };
        let merged = merge(&flags, Some(file.path())).unwrap();
        assert_eq!(merged.symbol.as_deref(), Some("exp"));
        assert_eq!(merged.function.as_deref(), Some("exp:2"));
        assert_eq!(merged.t.as_deref(), Some("0:1:0.5"));
        assert_eq!(merged.common.nodes, Some(48));
    }

    #[test]
    fn bad_config_is_a_usage_error() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "[1, 2]").unwrap();
        let err = merge(&ApplyArgs::default(), Some(file.path())).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = merge(&ApplyArgs::default(), Some(Path::new("/nonexistent/cfg.json"))).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn quadrature_overrides_are_validated() {
        let c = Common { nodes: Some(2), ..Default::default() };
        assert!(c.quadrature().is_err());
        let c = Common { nodes: Some(48), quad_tol: Some(1e-12), ..Default::default() };
        let q = c.quadrature().unwrap();
        assert_eq!((q.nodes_per_segment, q.refine_until), (48, 1e-12));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
