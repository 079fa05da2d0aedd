//! Run configuration: a TOML document fully describing one invocation.
//!
//! ```toml
//! command = "measure"
//! preset = "D1"          # or a [params] table
//! seed = 7
//! out = "out/measure.jsonl"
//! cache_dir = ".unrect-cache"
//!
//! [functional]
//! preset = "F1"
//!
//! [options]
//! level = 6
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use unrect_core::construction::Functional;
use unrect_core::params::{ParamsDoc, SequenceRuleDoc};
use unrect_core::rat::parse_rat;
use unrect_core::{ParameterSet, DEFAULT_BUDGET};

use crate::error::CliError;

pub const BUDGET_ENV: &str = "UNRECT_BUDGET";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<SequenceRuleDoc>,
}

impl FunctionalDoc {
    pub fn to_functional(&self) -> Result<Functional, CliError> {
        match (self.preset.as_deref(), &self.rule) {
            (Some("F1") | None, None) if self.a0.is_none() && self.scale.is_none() => Ok(Functional::f1()),
            (Some("identity"), None) => Ok(Functional::identity()),
            (Some(other), None) => Err(CliError::config(format!("unknown functional preset {other:?}"))),
            (Some(_), Some(_)) => Err(CliError::config("functional: give either preset or rule, not both")),
            (None, rule) => {
                let rule = rule
                    .as_ref()
                    .ok_or_else(|| CliError::config("functional: missing [functional.rule]"))?
                    .to_rule()?;
                let a0 = parse_rat(self.a0.as_deref().unwrap_or("0/1"))?;
                let scale = parse_rat(self.scale.as_deref().unwrap_or("1/1"))?;
                Ok(Functional::new(self.id.clone().unwrap_or_else(|| "custom".into()), a0, scale, rule))
            }
        }
    }
}

/// Command-specific settings; unused keys are ignored by other commands.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Truncation level `N`; defaults to `n_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    /// `evaluate`: parameter values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<String>>,
    /// `scan`: explicit `[p, q]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<[String; 2]>>,
    /// `scan`: points per side of the square when no list is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_grid: Option<i64>,
    /// `diagnose`: which check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// `diagnose`: levels involved (event sets, secants, covering).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_kind: Option<String>,
    /// Extra CSV artifact (curve vertices or PL pieces).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// `"D1"` or `"D2"`, used when no `[params]` table is present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsDoc>,
    #[serde(default)]
    pub functional: FunctionalDoc,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    /// Adds wall-clock times to records, which makes output nondeterministic.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub options: Options,
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self, CliError> {
        toml::from_str(s).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn parameter_set(&self) -> Result<ParameterSet, CliError> {
        match (&self.params, self.preset.as_deref()) {
            (Some(_), Some(_)) => Err(CliError::config("give either preset or [params], not both")),
            (Some(doc), None) => Ok(doc.to_params()?),
            (None, None | Some("D1")) => Ok(ParameterSet::d1()),
            (None, Some("D2")) => Ok(ParameterSet::d2()),
            (None, Some(other)) => Err(CliError::config(format!("unknown preset {other:?}"))),
        }
    }

    /// Piece budget: the environment override, then the config, then the default.
    pub fn budget(&self) -> Result<u64, CliError> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("{BUDGET_ENV}={v:?} is not a count"))),
            Err(_) => Ok(self.budget.unwrap_or(DEFAULT_BUDGET)),
        }
    }

    /// Everything that determines the records of a run, in canonical form.
    ///
    /// Output paths, the cache location and the budget are excluded: the
    /// budget only decides whether a run finishes, not what it produces.
    pub fn cache_key_material(&self, command: &str) -> Result<String, CliError> {
        let params = self.parameter_set()?;
        let mut key = BTreeMap::new();
        key.insert("command", serde_json::to_value(command).unwrap());
        key.insert("params", serde_json::to_value(params.to_doc()).unwrap());
        key.insert("functional", serde_json::to_value(&self.functional).unwrap());
        key.insert("seed", serde_json::to_value(self.seed).unwrap());
        let mut options = self.options.clone();
        options.csv = None;
        key.insert("options", serde_json::to_value(options).unwrap());
        Ok(serde_json::to_string(&key).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults_to_d1_and_f1() {
        let c = RunConfig::from_toml("command = \"measure\"").unwrap();
        assert_eq!(c.parameter_set().unwrap(), ParameterSet::d1());
        assert_eq!(c.functional.to_functional().unwrap(), Functional::f1());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("comand = \"measure\"").is_err());
    }

    #[test]
    fn explicit_functional() {
        let c = RunConfig::from_toml(
            r#"
            [functional]
            id = "g"
            a0 = "1/3"
            [functional.rule]
            kind = "geometric"
            a = "1/2"
            r = "1/2"
            "#,
        )
        .unwrap();
        let f = c.functional.to_functional().unwrap();
        assert_eq!(f.id, "g");
        assert_eq!(f.coeff(0).unwrap(), parse_rat("1/3").unwrap());
    }
}
