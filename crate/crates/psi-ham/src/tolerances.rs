//! Versioned budget file. The built-in copy is `tolerances.toml` at the crate
//! root; `PSI_HAM_TOLERANCES` names a replacement.

use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const ENV_VAR: &str = "PSI_HAM_TOLERANCES";
pub const SUPPORTED_VERSION: u32 = 1;
const BUILTIN: &str = include_str!("../tolerances.toml");

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub version: u32,
    pub residual: ResidualTol,
    pub oracle: OracleTol,
    pub resum: ResumTol,
    pub initial_condition: IcTol,
    pub mittag_leffler: MlTol,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualTol {
    pub nodes: usize,
    pub sup_norm: f64,
    pub classical_sup_norm: f64,
    pub order_factor: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleTol {
    pub coefficient: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResumTol {
    pub pointwise: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcTol {
    pub max_deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlTol {
    pub erfc_identity: f64,
    pub exponential: f64,
}

impl Tolerances {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN, "<builtin>").expect("built-in tolerance file is valid")
    }

    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let err = |message: String| CliError::Tolerances {
            path: origin.to_string(),
            message,
        };
        let t: Tolerances = toml::from_str(text).map_err(|e| err(e.to_string()))?;
        if t.version != SUPPORTED_VERSION {
            return Err(err(format!(
                "version {} is not supported (expected {SUPPORTED_VERSION})",
                t.version
            )));
        }
        let budgets = [
            t.residual.sup_norm,
            t.residual.classical_sup_norm,
            t.residual.order_factor,
            t.oracle.coefficient,
            t.resum.pointwise,
            t.initial_condition.max_deviation,
            t.mittag_leffler.erfc_identity,
            t.mittag_leffler.exponential,
        ];
        if budgets.iter().any(|b| !(*b > 0.0 && b.is_finite())) || t.residual.nodes < 2 {
            return Err(err("budgets must be positive and finite, nodes at least 2".into()));
        }
        Ok(t)
    }

    /// The file named by `PSI_HAM_TOLERANCES`, else the built-in copy.
    pub fn load() -> CliResult<Self> {
        match std::env::var_os(ENV_VAR) {
            Some(path) => {
                let shown = path.to_string_lossy().into_owned();
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::Tolerances {
                    path: shown.clone(),
                    message: e.to_string(),
                })?;
                Self::parse(&text, &shown)
            }
            None => Ok(Self::builtin()),
        }
    }

    /// Residual budget for a problem of order `alpha`.
    pub fn residual_budget(&self, alpha: f64) -> f64 {
        if alpha == 1.0 {
            self.residual.classical_sup_norm
        } else {
            self.residual.sup_norm
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_values() {
        let t = Tolerances::builtin();
        assert_eq!(t.version, 1);
        assert_eq!(t.residual.nodes, 2048);
        assert_eq!(t.residual.sup_norm, 5e-3);
        assert_eq!(t.oracle.coefficient, 1e-12);
        assert_eq!(t.residual_budget(1.0), 1e-6);
    }

    #[test]
    fn rejects_other_versions_and_unknown_keys() {
        let bumped = BUILTIN.replace("version = 1", "version = 2");
        assert!(Tolerances::parse(&bumped, "x").is_err());
        let extra = format!("{BUILTIN}\n[extra]\nk = 1\n");
        assert!(Tolerances::parse(&extra, "x").is_err());
    }
}
