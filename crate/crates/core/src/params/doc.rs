//! Structured-text form of a [`ParameterSet`].
//!
//! Rationals are always `"p/q"` strings. Example:
//!
//! ```toml
//! n_max = 8
//! model = "L2"
//! sqrt_precision_bits = 64
//!
//! [alpha]
//! kind = "harmonic"
//! a = "1/2"
//!
//! [m]
//! kind = "linear"
//! c = 2
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, parse_rat};

use super::{MRule, Model, ParameterSet, SequenceRule, DEFAULT_SQRT_BITS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceRuleDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_l1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_l2sq: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MRuleDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub alpha: SequenceRuleDoc,
    pub m: MRuleDoc,
    pub n_max: usize,
    pub model: String,
    #[serde(default = "default_bits")]
    pub sqrt_precision_bits: u32,
}

fn default_bits() -> u32 {
    DEFAULT_SQRT_BITS
}

fn field<'a>(v: &'a Option<String>, kind: &str, key: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::Parse(format!("sequence kind {kind:?} needs key {key:?}")))
}

impl SequenceRuleDoc {
    pub fn to_rule(&self) -> Result<SequenceRule> {
        let opt = |v: &Option<String>| v.as_deref().map(parse_rat).transpose();
        let rule = match self.kind.as_str() {
            "harmonic" => SequenceRule::harmonic(parse_rat(field(&self.a, &self.kind, "a")?)?),
            "inverse_square" => {
                SequenceRule::inverse_square(parse_rat(field(&self.a, &self.kind, "a")?)?)
            }
            "geometric" => SequenceRule::geometric(
                parse_rat(field(&self.a, &self.kind, "a")?)?,
                parse_rat(field(&self.r, &self.kind, "r")?)?,
            ),
            "explicit" => SequenceRule::Explicit {
                values: self
                    .values
                    .as_ref()
                    .ok_or_else(|| Error::Parse("explicit sequence needs \"values\"".into()))?
                    .iter()
                    .map(|s| parse_rat(s))
                    .collect::<Result<_>>()?,
                tail_l1: opt(&self.tail_l1)?,
                tail_l2sq: opt(&self.tail_l2sq)?,
            },
            other => return Err(Error::Parse(format!("unknown sequence kind {other:?}"))),
        };
        rule.check_nonnegative()?;
        Ok(rule)
    }

    pub fn from_rule(rule: &SequenceRule) -> Self {
        let mut doc = SequenceRuleDoc {
            kind: rule.kind_name().to_string(),
            a: None,
            r: None,
            values: None,
            tail_l1: None,
            tail_l2sq: None,
        };
        match rule {
            SequenceRule::Harmonic { a } | SequenceRule::InverseSquare { a } => {
                doc.a = Some(fmt_rat(a))
            }
            SequenceRule::Geometric { a, r } => {
                doc.a = Some(fmt_rat(a));
                doc.r = Some(fmt_rat(r));
            }
            SequenceRule::Explicit {
                values,
                tail_l1,
                tail_l2sq,
            } => {
                doc.values = Some(values.iter().map(fmt_rat).collect());
                doc.tail_l1 = tail_l1.as_ref().map(fmt_rat);
                doc.tail_l2sq = tail_l2sq.as_ref().map(fmt_rat);
            }
        }
        doc
    }
}

impl MRuleDoc {
    pub fn to_rule(&self) -> Result<MRule> {
        let c = || {
            self.c
                .ok_or_else(|| Error::Parse(format!("m kind {:?} needs key \"c\"", self.kind)))
        };
        match self.kind.as_str() {
            "linear" => Ok(MRule::Linear { c: c()? }),
            "constant" => Ok(MRule::Constant { c: c()? }),
            "explicit" => Ok(MRule::Explicit {
                values: self
                    .values
                    .clone()
                    .ok_or_else(|| Error::Parse("explicit m needs \"values\"".into()))?,
            }),
            other => Err(Error::Parse(format!("unknown m kind {other:?}"))),
        }
    }

    pub fn from_rule(rule: &MRule) -> Self {
        match rule {
            MRule::Linear { c } => MRuleDoc {
                kind: "linear".into(),
                c: Some(*c),
                values: None,
            },
            MRule::Constant { c } => MRuleDoc {
                kind: "constant".into(),
                c: Some(*c),
                values: None,
            },
            MRule::Explicit { values } => MRuleDoc {
                kind: "explicit".into(),
                c: None,
                values: Some(values.clone()),
            },
        }
    }
}

impl ParamsDoc {
    pub fn to_params(&self) -> Result<ParameterSet> {
        let model = match self.model.as_str() {
            "L1" | "l1" => Model::L1,
            "L2" | "l2" => Model::L2,
            other => return Err(Error::Parse(format!("unknown model {other:?}"))),
        };
        Ok(
            ParameterSet::new(self.alpha.to_rule()?, self.m.to_rule()?, self.n_max, model)?
                .with_sqrt_bits(self.sqrt_precision_bits),
        )
    }
}

impl ParameterSet {
    pub fn to_doc(&self) -> ParamsDoc {
        ParamsDoc {
            alpha: SequenceRuleDoc::from_rule(&self.alpha),
            m: MRuleDoc::from_rule(&self.m),
            n_max: self.n_max,
            model: self.model.name().to_string(),
            sqrt_precision_bits: self.sqrt_bits,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let doc: ParamsDoc = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        doc.to_params()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_doc()).expect("parameter documents always serialize")
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_round_trips_through_toml() {
        let p = ParameterSet::d1();
        let s = p.to_toml_string();
        assert!(s.contains("a = \"1/2\""), "{s}");
        assert_eq!(ParameterSet::from_toml_str(&s).unwrap(), p);
    }

    #[test]
    fn reads_hand_written_document() {
        let s = r#"
            n_max = 10
            model = "L1"
            [alpha]
            kind = "geometric"
            a = "1/2"
            r = "1/2"
            [m]
            kind = "constant"
            c = 2
        "#;
        let p = ParameterSet::from_toml_str(s).unwrap();
        assert_eq!(p, ParameterSet::d2());
    }

    #[test]
    fn rejects_floats_and_unknown_kinds() {
        let s = r#"
            n_max = 2
            model = "L2"
            [alpha]
            kind = "harmonic"
            a = 0.5
            [m]
            kind = "linear"
            c = 2
        "#;
        assert!(ParameterSet::from_toml_str(s).is_err());
        let s = s.replace("a = 0.5", "a = \"1/2\"").replace("linear", "cubic");
        assert!(ParameterSet::from_toml_str(&s).is_err());
    }
}
