//! Run configuration: TOML primary, JSON accepted as alternate. Validation
//! errors name the offending field so batch users can fix files without
//! reading source.

use crate::assembly::{constant_fn, CoefficientSet, SpatialFn};
use crate::error::{Error, Result};
use crate::mms::{make_manufactured_case, PRESET_NAMES};
use crate::system::Formulation;
use crate::timestep::Scheme;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Interval { n: usize },
    Square { n: usize },
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Interval { .. } => 1,
            Geometry::Square { .. } => 2,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Geometry::Interval { n } | Geometry::Square { n } => *n,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierMesh {
    #[default]
    Matching,
    Independent {
        m: usize,
        #[serde(default)]
        offset: f64,
    },
}

/// Diffusion field: a constant or a named profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaSpec {
    Constant(f64),
    Named(String),
}

impl KappaSpec {
    pub fn build(&self) -> Result<SpatialFn> {
        match self {
            KappaSpec::Constant(c) => {
                if !c.is_finite() || *c <= 0.0 {
                    return Err(Error::Config {
                        field: "coefficients.kappa".into(),
                        message: format!("diffusion must be positive, got {c}"),
                    });
                }
                Ok(constant_fn(*c))
            }
            KappaSpec::Named(name) => match name.as_str() {
                "unit" => Ok(constant_fn(1.0)),
                "one_plus_x" => Ok(std::sync::Arc::new(|x: [f64; 2]| 1.0 + x[0])),
                other => Err(Error::Config {
                    field: "coefficients.kappa".into(),
                    message: format!("unknown diffusion profile `{other}` (try a number, \"unit\", or \"one_plus_x\")"),
                }),
            },
        }
    }

    /// Lower bound of the diffusion field on the unit domains.
    pub fn lower_bound(&self) -> f64 {
        match self {
            KappaSpec::Constant(c) => *c,
            // both named profiles are >= 1 on [0, 1]^d
            KappaSpec::Named(_) => 1.0,
        }
    }

    fn constant_value(&self) -> Option<f64> {
        match self {
            KappaSpec::Constant(c) => Some(*c),
            KappaSpec::Named(n) if n == "unit" => Some(1.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Coefficients {
    pub kappa: KappaSpec,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
}

impl Coefficients {
    pub fn build(&self) -> Result<CoefficientSet> {
        CoefficientSet::new(
            self.kappa.build()?,
            self.kappa.lower_bound(),
            constant_fn(self.alpha),
            self.beta,
        )
    }
}

fn default_outputs_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Outputs {
    #[serde(default = "default_outputs_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            directory: default_outputs_dir(),
            formats: default_formats(),
        }
    }
}

fn default_data() -> String {
    "zero".into()
}

/// Environment variable overriding `outputs.directory`.
pub const OUTPUT_DIR_ENV: &str = "PDAE_FEM_OUTPUT_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub formulation: Formulation,
    pub geometry: Geometry,
    #[serde(default)]
    pub multiplier_mesh: MultiplierMesh,
    pub coefficients: Coefficients,
    /// Manufactured preset id, or "zero" for homogeneous data.
    #[serde(default = "default_data")]
    pub data: String,
    pub scheme: Scheme,
    pub tau: f64,
    pub t_end: f64,
    #[serde(default)]
    pub outputs: Outputs,
    /// Mesh refinement parameters for `study` and `infsup`.
    #[serde(default)]
    pub study_levels: Vec<usize>,
}

impl RunConfig {
    /// Output directory after applying the environment override.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.outputs.directory.clone(),
        }
    }

    pub fn wants_format(&self, fmt: &str) -> bool {
        self.outputs.formats.iter().any(|f| f == fmt)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |field: &str, message: String| Error::Config {
            field: field.into(),
            message,
        };
        if self.geometry.n() < 2 {
            return Err(cfg_err(
                "geometry.n",
                format!("need at least 2 cells, got {}", self.geometry.n()),
            ));
        }
        match self.formulation {
            Formulation::Wentzell => {
                if self.coefficients.beta != 0.0 {
                    return Err(cfg_err(
                        "coefficients.beta",
                        format!(
                            "wentzell formulation requires beta = 0, got {}",
                            self.coefficients.beta
                        ),
                    ));
                }
            }
            Formulation::Nonlocal => {
                if self.coefficients.beta <= 0.0 {
                    return Err(cfg_err(
                        "coefficients.beta",
                        format!(
                            "nonlocal formulation requires beta > 0, got {}",
                            self.coefficients.beta
                        ),
                    ));
                }
                if self.geometry.dim() != 2 {
                    return Err(cfg_err("geometry", "beta>0 requires square".into()));
                }
            }
            Formulation::HomogeneousDirichlet | Formulation::DirichletPdae => {
                if !matches!(self.multiplier_mesh, MultiplierMesh::Matching) {
                    return Err(cfg_err(
                        "multiplier_mesh",
                        "independent multiplier meshes only apply to the coupled formulations"
                            .into(),
                    ));
                }
            }
        }
        if let MultiplierMesh::Independent { m, .. } = self.multiplier_mesh {
            if m < 2 {
                return Err(cfg_err(
                    "multiplier_mesh.m",
                    format!("need at least 2 multiplier segments, got {m}"),
                ));
            }
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(cfg_err(
                "tau",
                format!("step size must be positive, got {}", self.tau),
            ));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(cfg_err(
                "t_end",
                format!("final time must be positive, got {}", self.t_end),
            ));
        }
        if self.alpha_negative() {
            return Err(cfg_err(
                "coefficients.alpha",
                format!(
                    "boundary reaction must be nonnegative, got {}",
                    self.coefficients.alpha
                ),
            ));
        }
        self.coefficients.kappa.build()?;
        if self.data != "zero" {
            let case = make_manufactured_case(&self.data).map_err(|e| Error::Config {
                field: "data".into(),
                message: e.to_string(),
            })?;
            if case.formulation != self.formulation {
                return Err(cfg_err(
                    "data",
                    format!(
                        "preset {} belongs to the {:?} formulation, config says {:?}",
                        self.data, case.formulation, self.formulation
                    ),
                ));
            }
            if case.dim != self.geometry.dim() {
                return Err(cfg_err(
                    "data",
                    format!(
                        "preset {} is {}-dimensional, geometry is {}-dimensional",
                        self.data,
                        case.dim,
                        self.geometry.dim()
                    ),
                ));
            }
            if self.coefficients.kappa.constant_value() != Some(1.0)
                || self.coefficients.alpha != (case.coeffs.alpha)([0.0, 0.0])
                || self.coefficients.beta != case.coeffs.beta
            {
                return Err(cfg_err(
                    "coefficients",
                    format!(
                        "preset {} fixes kappa = 1, alpha = {}, beta = {}",
                        self.data,
                        (case.coeffs.alpha)([0.0, 0.0]),
                        case.coeffs.beta
                    ),
                ));
            }
        }
        Ok(())
    }

    fn alpha_negative(&self) -> bool {
        self.coefficients.alpha < 0.0
    }
}

/// Parse a config file, dispatching on the extension (`.json` is the
/// alternate format; everything else is read as TOML).
pub fn load_config(path: &Path) -> Result<(RunConfig, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        field: "config".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let cfg: RunConfig = if path.extension().and_then(|e| e.to_str()) == Some("json") {
        serde_json::from_str(&text).map_err(|e| Error::Config {
            field: "config".into(),
            message: format!("JSON parse error: {e}"),
        })?
    } else {
        toml::from_str(&text).map_err(|e| Error::Config {
            field: "config".into(),
            message: format!("TOML parse error: {e}"),
        })?
    };
    cfg.validate()?;
    Ok((cfg, text))
}

/// Stable catalog listing for `list-presets`.
pub fn preset_catalog() -> String {
    let mut out = String::from("manufactured presets:\n");
    for name in PRESET_NAMES {
        let case = make_manufactured_case(name).expect("catalog entry");
        let geom = match case.dim {
            1 => "interval",
            _ => "square",
        };
        out.push_str(&format!(
            "  {name}  ({:?} formulation, {geom}, alpha = {}, beta = {})\n",
            case.formulation,
            (case.coeffs.alpha)([0.0, 0.0]),
            case.coeffs.beta,
        ));
    }
    out.push_str("geometries: interval(n), square(n)\n");
    out
}
