//! JSON run configuration with unit-suffixed keys.
//!
//! ```json
//! {
//!   "environment": { "gravity_m_per_s2": 9.81, "water_depth_m": "deep" },
//!   "flap": { "inertia_dry_kg_m2": 1.0e7, "stiffness_Nm_per_rad": 4.375e6 },
//!   "coefficients": {
//!     "analytic": { "added_inertia_kg_m2": 0.0, "damping_Nms_per_rad": 1.0e6,
//!                   "alpha": 0.05, "epsilon": 0.1 }
//!   },
//!   "excitation": { "transfer_file": "transfer.csv", "back_flap_eta": 0.1 },
//!   "pto": { "damping_Nms_per_rad": 5.0e5, "included_in_damping": true },
//!   "output_dir": "out"
//! }
//! ```
//!
//! `coefficients` holds exactly one of `analytic` or `table_file`.
//! Relative file paths resolve against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{FlapProperties, IntegrationConfig};
use crate::energy::PtoModel;
use crate::error::{Error, Result};
use crate::forcing::ExcitationTransfer;
use crate::hydro::{CoefficientSource, CoefficientTable, CouplingKernel, Environment, HydroCoefficients};
use crate::model::Model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCoefficients {
    #[serde(flatten)]
    pub base: HydroCoefficientsInput,
    #[serde(flatten)]
    pub kernel: CouplingKernel,
}

/// Diagonal coefficients of the analytic source. Coupling comes from the
/// kernel, so it is not configurable here.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroCoefficientsInput {
    pub added_inertia_kg_m2: f64,
    pub damping_Nms_per_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientConfig {
    TableFile(PathBuf),
    Analytic(AnalyticCoefficients),
}

/// Wave-to-torque transfer: a CSV file, inline values, or (both absent) the
/// constant reference transfer.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods_s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_Nm_per_m: Option<Vec<f64>>,
    #[serde(default = "default_eta")]
    pub back_flap_eta: f64,
}

fn default_eta() -> f64 {
    ExcitationTransfer::DEFAULT_ETA
}

impl Default for ExcitationConfig {
    fn default() -> Self {
        ExcitationConfig {
            transfer_file: None,
            periods_s: None,
            gamma_Nm_per_m: None,
            back_flap_eta: default_eta(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub environment: Environment,
    pub flap: FlapProperties,
    pub coefficients: CoefficientConfig,
    #[serde(default)]
    pub excitation: ExcitationConfig,
    /// Defaults to half the analytic damping; required with a table source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pto: Option<PtoModel>,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Reserved; the simulation core is deterministic and never reads it.
    #[serde(default)]
    pub random_seed: u64,
    /// Directory relative paths resolve against. Set by [`RunConfig::from_path`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// The reference model as a config, with the transfer given inline.
    pub fn reference() -> Self {
        let m = Model::reference();
        let (base, kernel) = match m.coefficients {
            CoefficientSource::Analytic { base, kernel } => (base, kernel),
            CoefficientSource::Table(_) => unreachable!("reference model is analytic"),
        };
        RunConfig {
            environment: m.env,
            flap: m.flap,
            coefficients: CoefficientConfig::Analytic(AnalyticCoefficients {
                base: HydroCoefficientsInput {
                    added_inertia_kg_m2: base.added_inertia,
                    damping_Nms_per_rad: base.damping,
                },
                kernel,
            }),
            excitation: ExcitationConfig {
                transfer_file: None,
                periods_s: Some(m.transfer.periods().to_vec()),
                gamma_Nm_per_m: Some(m.transfer.values().to_vec()),
                back_flap_eta: m.transfer.eta,
            },
            pto: Some(m.pto),
            integration: m.integration,
            output_dir: default_output_dir(),
            random_seed: 0,
            base_dir: PathBuf::new(),
        }
    }

    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    /// Loads every referenced file and builds a validated [`Model`].
    pub fn to_model(&self) -> Result<Model> {
        let coefficients = match &self.coefficients {
            CoefficientConfig::TableFile(p) => {
                CoefficientSource::Table(CoefficientTable::from_path(&self.resolve(p))?)
            }
            CoefficientConfig::Analytic(a) => CoefficientSource::Analytic {
                base: HydroCoefficients::uncoupled(
                    a.base.added_inertia_kg_m2,
                    a.base.damping_Nms_per_rad,
                ),
                kernel: a.kernel,
            },
        };

        let x = &self.excitation;
        let transfer = match (&x.transfer_file, &x.periods_s, &x.gamma_Nm_per_m) {
            (Some(p), None, None) => ExcitationTransfer::from_path(&self.resolve(p), x.back_flap_eta)?,
            (None, Some(p), Some(g)) => ExcitationTransfer::new(p.clone(), g.clone(), x.back_flap_eta)?,
            (None, None, None) => {
                let r = ExcitationTransfer::reference();
                ExcitationTransfer::new(r.periods().to_vec(), r.values().to_vec(), x.back_flap_eta)?
            }
            _ => {
                return Err(Error::invalid(
                    "excitation takes either transfer_file or both periods_s and gamma_Nm_per_m",
                ))
            }
        };

        let pto = match (self.pto, &self.coefficients) {
            (Some(p), _) => p,
            (None, CoefficientConfig::Analytic(a)) => {
                PtoModel::share_of(a.base.damping_Nms_per_rad, 0.5)
            }
            (None, CoefficientConfig::TableFile(_)) => {
                return Err(Error::invalid("a table coefficient source needs an explicit pto"))
            }
        };

        let model = Model {
            env: self.environment,
            flap: self.flap,
            coefficients,
            transfer,
            pto,
            integration: self.integration,
        };
        model.validate()?;
        Ok(model)
    }
}
