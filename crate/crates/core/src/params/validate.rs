use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, int, Enclosure, Rat};

use super::{Model, ParameterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    OddM,
    NonIntegerAlphaM,
    NormViolated,
    NotCertifiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    Failed,
    /// The constraint does not apply to this model.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Set when `status == Failed`.
    pub failure: Option<FailureKind>,
    pub detail: String,
    /// Exact margin by which a norm condition holds (`bound - upper`).
    pub slack: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub model: &'static str,
    pub n_max: usize,
    pub checks: Vec<Check>,
    /// `K^2`, when certifiable.
    pub k_squared: Option<Enclosure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Failed)
    }

    pub fn failures(&self) -> Vec<FailureKind> {
        self.checks.iter().filter_map(|c| c.failure).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn passed(name: &'static str, detail: String, slack: Option<Rat>) -> Check {
    Check {
        name,
        status: CheckStatus::Passed,
        failure: None,
        detail,
        slack: slack.as_ref().map(fmt_rat),
    }
}

fn failed(name: &'static str, kind: FailureKind, detail: String) -> Check {
    Check {
        name,
        status: CheckStatus::Failed,
        failure: Some(kind),
        detail,
        slack: None,
    }
}

/// Checks every parameter constraint up to `n_max`.
///
/// Norm conditions are certified from exact partial sums up to `n_max`
/// plus closed-form tail enclosures; an uncertifiable tail is its own
/// failure kind rather than a violation.
pub fn validate(params: &ParameterSet) -> Result<ValidationReport> {
    if params.n_max < 1 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let mut checks = Vec::new();

    let odd: Vec<usize> = (1..=params.n_max).filter(|&n| params.m(n) % 2 == 1).collect();
    checks.push(if odd.is_empty() {
        passed("m_even", format!("m_1..m_{} all even", params.n_max), None)
    } else {
        failed(
            "m_even",
            FailureKind::OddM,
            format!("odd m_n at n = {odd:?} (m_{} = {})", odd[0], params.m(odd[0])),
        )
    });

    // Integrality is the hypothesis of the density lemma, which only the
    // unrectifiable (l2) instance uses.
    checks.push(match params.model {
        Model::L1 => Check {
            name: "alpha_m_integer",
            status: CheckStatus::Skipped,
            failure: None,
            detail: "not required in the l1 model".into(),
            slack: None,
        },
        Model::L2 => {
            let bad: Vec<usize> = (1..=params.n_max)
                .filter(|&n| !(params.alpha(n) * int(params.m(n))).is_integer())
                .collect();
            if bad.is_empty() {
                passed("alpha_m_integer", "alpha_n m_n integral for all n".into(), None)
            } else {
                let n = bad[0];
                failed(
                    "alpha_m_integer",
                    FailureKind::NonIntegerAlphaM,
                    format!(
                        "alpha_{n} m_{n} = {} is not an integer (all offenders: {bad:?})",
                        fmt_rat(&(params.alpha(n) * int(params.m(n))))
                    ),
                )
            }
        }
    });

    let mut k_squared = None;
    match params.model {
        Model::L2 => match params.alpha.l2sq_norm(params.n_max) {
            Ok(sq) => {
                checks.push(strict_below("alpha_l2_below_one", &sq, &Rat::one(), "||alpha||_2^2"));
                let k2 = Enclosure::new(Rat::one() + &sq.lo, Rat::one() + &sq.hi);
                checks.push(strict_below("k_below_two", &k2, &int(4), "K^2"));
                k_squared = Some(k2);
            }
            Err(e) => {
                checks.push(failed("alpha_l2_below_one", FailureKind::NotCertifiable, e.to_string()));
                checks.push(failed("k_below_two", FailureKind::NotCertifiable, e.to_string()));
            }
        },
        Model::L1 => match params.alpha.l1_norm(params.n_max) {
            Ok(s) => {
                checks.push(strict_below("alpha_l1_below_one", &s, &Rat::one(), "||alpha||_1"));
                let lo = Rat::one() + &s.lo;
                let hi = Rat::one() + &s.hi;
                k_squared = Some(Enclosure::new(&lo * &lo, &hi * &hi));
            }
            Err(e @ Error::NotCertifiable { .. }) if is_divergent(params) => {
                checks.push(failed("alpha_l1_below_one", FailureKind::NormViolated, e.to_string()));
            }
            Err(e) => {
                checks.push(failed("alpha_l1_below_one", FailureKind::NotCertifiable, e.to_string()));
            }
        },
    }

    Ok(ValidationReport {
        model: params.model.name(),
        n_max: params.n_max,
        checks,
        k_squared,
    })
}

/// Harmonic and expanding geometric rules diverge in l1; that is a
/// violation, not a missing certificate.
fn is_divergent(params: &ParameterSet) -> bool {
    use super::SequenceRule::*;
    match &params.alpha {
        Harmonic { a } => !a.is_zero(),
        Geometric { a, r } => !a.is_zero() && r >= &Rat::one(),
        _ => false,
    }
}

fn strict_below(name: &'static str, e: &Enclosure, bound: &Rat, what: &str) -> Check {
    if &e.hi < bound {
        passed(
            name,
            format!("{what} in {e} < {}", fmt_rat(bound)),
            Some(bound - &e.hi),
        )
    } else if &e.lo >= bound {
        failed(
            name,
            FailureKind::NormViolated,
            format!("{what} in {e}, not below {}", fmt_rat(bound)),
        )
    } else {
        failed(
            name,
            FailureKind::NotCertifiable,
            format!("{what} in {e} straddles {}", fmt_rat(bound)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{MRule, SequenceRule};
    use crate::rat::rat;

    #[test]
    fn d1_passes_with_tight_k() {
        let r = validate(&ParameterSet::d1()).unwrap();
        assert!(r.passed(), "{r:#?}");
        let k2 = r.k_squared.unwrap();
        assert!(k2.lo > rat(141, 100) && k2.hi < rat(142, 100));
        // partial(8) + tail <= pi^2/24 + slack, and the tail bound is below 1/32
        let tail = SequenceRule::harmonic(rat(1, 2)).tail_l2sq(8).unwrap();
        assert!(tail.hi <= rat(1, 32));
    }

    #[test]
    fn d2_passes_with_exact_l1_norm() {
        let p = ParameterSet::d2();
        let r = validate(&p).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert_eq!(p.alpha.l1_norm(p.n_max).unwrap(), Enclosure::exact(rat(1, 2)));
        assert_eq!(r.check("alpha_l1_below_one").unwrap().slack.as_deref(), Some("1/2"));
        assert_eq!(r.check("alpha_m_integer").unwrap().status, CheckStatus::Skipped);
    }

    #[test]
    fn odd_multiplier_flips_only_parity() {
        let mut m: Vec<u64> = (1..=8).map(|n| 2 * n).collect();
        m[2] = 3;
        // keep alpha_n m_n integral: alpha_3 = 1/3
        let mut alpha: Vec<Rat> = (1..=8).map(|n| rat(1, 2 * n)).collect();
        alpha[2] = rat(1, 3);
        let p = ParameterSet::new(
            SequenceRule::Explicit {
                values: alpha,
                tail_l1: None,
                tail_l2sq: Some(rat(1, 32)),
            },
            MRule::Explicit { values: m },
            8,
            Model::L2,
        )
        .unwrap();
        let r = validate(&p).unwrap();
        assert_eq!(r.failures(), vec![FailureKind::OddM]);
    }

    #[test]
    fn non_integer_product_flips_only_integrality() {
        let p = ParameterSet::new(
            SequenceRule::harmonic(rat(1, 3)),
            MRule::Linear { c: 2 },
            4,
            Model::L2,
        )
        .unwrap();
        assert_eq!(validate(&p).unwrap().failures(), vec![FailureKind::NonIntegerAlphaM]);
    }

    #[test]
    fn large_norm_is_violation() {
        let p = ParameterSet::new(
            SequenceRule::harmonic(int(1)),
            MRule::Linear { c: 2 },
            4,
            Model::L2,
        )
        .unwrap();
        // ||alpha||^2 = pi^2/6 > 1 but K^2 < 4 still holds
        assert_eq!(validate(&p).unwrap().failures(), vec![FailureKind::NormViolated]);
    }

    #[test]
    fn explicit_without_tail_is_not_certifiable() {
        let p = ParameterSet::new(
            SequenceRule::Explicit {
                values: (1..=4).map(|n| rat(1, 2 * n)).collect(),
                tail_l1: None,
                tail_l2sq: None,
            },
            MRule::Linear { c: 2 },
            4,
            Model::L2,
        )
        .unwrap();
        let f = validate(&p).unwrap().failures();
        assert!(f.iter().all(|k| *k == FailureKind::NotCertifiable) && !f.is_empty());
    }

    #[test]
    fn harmonic_in_l1_is_violation() {
        let p = ParameterSet::new(
            SequenceRule::harmonic(rat(1, 2)),
            MRule::Linear { c: 2 },
            4,
            Model::L1,
        )
        .unwrap();
        assert_eq!(validate(&p).unwrap().failures(), vec![FailureKind::NormViolated]);
    }
}
