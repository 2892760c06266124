use std::path::Path;

use serde::{Deserialize, Serialize};

use super::measure::{BrokenPower, MeasureSpec, TabulatedMeasure};
use super::LevyModel;
use crate::error::{LevyError, Result};

/// On-disk model description (TOML).
///
/// ```toml
/// sigma = 0.0
/// gamma = 0.0
/// centered = true
///
/// [measure]
/// kind = "factorized"
/// c_u = 2.0
/// c_d = 1.0
/// profile = { knee = 1.0, b_small = 0.3, b_large = 0.5 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub centered: bool,
    #[serde(default = "MeasureConfig::none")]
    pub measure: MeasureConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureConfig {
    None,
    Stable { alpha: f64, c_u: f64, c_d: f64 },
    Factorized { c_u: f64, c_d: f64, profile: BrokenPower },
    Tabulated { z: Vec<f64>, density: Vec<f64> },
}

impl MeasureConfig {
    fn none() -> Self {
        MeasureConfig::None
    }

    fn to_spec(&self) -> Result<MeasureSpec> {
        Ok(match self {
            MeasureConfig::None => MeasureSpec::None,
            MeasureConfig::Stable { alpha, c_u, c_d } => MeasureSpec::Stable {
                alpha: *alpha,
                c_u: *c_u,
                c_d: *c_d,
            },
            MeasureConfig::Factorized { c_u, c_d, profile } => MeasureSpec::Factorized {
                c_u: *c_u,
                c_d: *c_d,
                profile: *profile,
            },
            MeasureConfig::Tabulated { z, density } => {
                MeasureSpec::Tabulated(TabulatedMeasure::new(z.clone(), density.clone())?)
            }
        })
    }

    fn from_spec(spec: &MeasureSpec) -> Self {
        match spec {
            MeasureSpec::None => MeasureConfig::None,
            MeasureSpec::Stable { alpha, c_u, c_d } => MeasureConfig::Stable {
                alpha: *alpha,
                c_u: *c_u,
                c_d: *c_d,
            },
            MeasureSpec::Factorized { c_u, c_d, profile } => MeasureConfig::Factorized {
                c_u: *c_u,
                c_d: *c_d,
                profile: *profile,
            },
            MeasureSpec::Tabulated(t) => MeasureConfig::Tabulated {
                z: t.z.clone(),
                density: t.density.clone(),
            },
        }
    }
}

impl ModelConfig {
    pub fn from_model(model: &LevyModel) -> Self {
        ModelConfig {
            sigma: model.sigma(),
            gamma: model.gamma(),
            centered: model.is_centered(),
            measure: MeasureConfig::from_spec(model.measure()),
        }
    }

    pub fn build(&self) -> Result<LevyModel> {
        let spec = self.measure.to_spec()?;
        if self.centered {
            LevyModel::centered(self.sigma, spec)
        } else {
            LevyModel::new(self.sigma, self.gamma, spec)
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| LevyError::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LevyError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LevyError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

impl LevyModel {
    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        cfg.build()
    }

    /// A preset name or the path of a model file.
    pub fn from_arg(arg: &str) -> Result<Self> {
        match preset(arg) {
            Ok(m) => Ok(m),
            Err(_) if Path::new(arg).exists() => ModelConfig::load(Path::new(arg))?.build(),
            Err(e) => Err(LevyError::Config(format!(
                "'{arg}' is neither a readable model file nor a preset ({e})"
            ))),
        }
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "brownian",
    "stable-sym-1.2",
    "stable-sym-1.5",
    "stable-sym-1.8",
    "stable-specneg-1.5",
    "factorized-beta0.4-0.6",
    "factorized-asym-1.5",
];

/// Built-in models. `stable-sym-A` and `stable-specneg-A` accept any
/// `A ∈ (1, 2)` and are normalized so that `Re ψ(1) = 1`.
pub fn preset(name: &str) -> Result<LevyModel> {
    if name == "brownian" {
        return LevyModel::brownian(1.0);
    }
    if let Some(a) = name.strip_prefix("stable-sym-") {
        return LevyModel::stable_unit(parse_alpha(a)?, 0.0);
    }
    if let Some(a) = name.strip_prefix("stable-specneg-") {
        return LevyModel::stable_unit(parse_alpha(a)?, -1.0);
    }
    let factorized = |c_u: f64, c_d: f64, b_small: f64, b_large: f64| {
        LevyModel::centered(
            0.0,
            MeasureSpec::Factorized {
                c_u,
                c_d,
                profile: BrokenPower {
                    knee: 1.0,
                    b_small,
                    b_large,
                },
            },
        )
    };
    match name {
        "factorized-beta0.4-0.6" => factorized(0.6, 0.5, 0.4, 0.6),
        "factorized-asym-1.5" => factorized(2.0, 1.0, 0.3, 0.5),
        _ => Err(LevyError::Config(format!("unknown preset '{name}'"))),
    }
}

fn parse_alpha(s: &str) -> Result<f64> {
    let a: f64 = s
        .parse()
        .map_err(|_| LevyError::Config(format!("cannot parse stability index '{s}'")))?;
    if !(a > 1.0 && a < 2.0) {
        return Err(LevyError::Config(format!("stability index must lie in (1, 2), got {a}")));
    }
    Ok(a)
}

pub fn list_models() -> String {
    let describe = |n: &str| match n {
        "brownian" => "sigma = 1, no jumps (psi = xi^2)",
        "stable-sym-1.2" | "stable-sym-1.5" | "stable-sym-1.8" => "symmetric strictly stable, Re psi(1) = 1",
        "stable-specneg-1.5" => "spectrally negative stable, centered, Re psi(1) = 1",
        "factorized-beta0.4-0.6" => "f(z)/z^2 jumps, broken power f with exponents 0.4 / 0.6, c_u = 0.6, c_d = 0.5, centered",
        "factorized-asym-1.5" => "f(z)/z^2 jumps, index 1.5 at the origin, c_u = 2, c_d = 1, centered",
        _ => "",
    };
    let mut out = String::new();
    for n in PRESET_NAMES {
        out.push_str(&format!("{n:<24} {}\n", describe(n)));
    }
    out.push_str("stable-sym-<A>, stable-specneg-<A> accept any A in (1, 2)\n");
    out
}
