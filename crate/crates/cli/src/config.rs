use std::fs;
use std::path::{Path, PathBuf};

use bcs_core::boundary3d::BoundaryCondition;
use bcs_core::potentials::PotentialSpec;
use bcs_core::Dimension;
use clap::Subcommand;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Values and derivatives at zero of t1..t4 and m3.
    Table1,
    /// m3(x; 1) on an evenly spaced grid.
    M3Profile,
    /// Sign of the integral of V against m3, optionally over a sweep in mu.
    Criterion,
    /// Critical temperature of the translation-invariant problem per coupling.
    Tc0,
    /// Low-temperature growth of the D_T quadratic form in d = 1, 2.
    DtGrowth,
    /// Angular-momentum eigenvalues of V restricted to the Fermi sphere.
    VmuSpectrum,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::M3Profile => "m3-profile",
            Self::Criterion => "criterion",
            Self::Tc0 => "tc0",
            Self::DtGrowth => "dt-growth",
            Self::VmuSpectrum => "vmu-spectrum",
        }
    }
}

/// Contents of a `--config` file. Every field is optional; each command
/// reads the ones it needs and fills in documented defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub potential: Option<PotentialSpec>,
    pub mu: Option<f64>,
    pub mu_sweep: Option<Vec<f64>>,
    pub bc: Option<BoundaryCondition>,
    pub lambdas: Option<Vec<f64>>,
    pub temperatures: Option<Vec<f64>>,
    pub x_max: Option<f64>,
    pub step: Option<f64>,
    pub l_max: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Json { source, .. } => CliError::Json {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|source| CliError::Json {
            path: PathBuf::from("<config>"),
            source,
        })
    }

    pub fn potential_or_default(&self) -> PotentialSpec {
        self.potential.clone().unwrap_or(PotentialSpec::Gaussian {
            a: 1.0,
            ell: 1.0,
            d: Dimension::Three,
        })
    }

    pub fn mu_or_default(&self) -> Result<f64, CliError> {
        positive("mu", self.mu.unwrap_or(1.0))
    }
}

pub(crate) fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

pub(crate) fn non_empty<'a>(name: &str, xs: Option<&'a Vec<f64>>) -> Result<&'a [f64], CliError> {
    match xs {
        Some(v) if !v.is_empty() => {
            for &x in v {
                positive(name, x)?;
            }
            Ok(v)
        }
        _ => Err(CliError::Config(format!("{name} must be a non-empty list"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse(r#"{"mu": 1.0, "lamda": [0.5]}"#).is_err());
        let cfg = RunConfig::parse(
            r#"{"potential": {"kind": "gaussian", "a": 1.0, "ell": 1.0, "d": 3}, "bc": "neumann"}"#,
        )
        .unwrap();
        assert_eq!(cfg.bc, Some(BoundaryCondition::Neumann));
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.mu_or_default().unwrap(), 1.0);
        assert!(matches!(cfg.potential_or_default(), PotentialSpec::Gaussian { .. }));
        assert!(non_empty("lambdas", Some(&vec![])).is_err());
        assert!(non_empty("lambdas", Some(&vec![0.5, -1.0])).is_err());
    }
}
