use num::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{int, is_nonneg, rat, Enclosure, Rat};

/// Terms summed exactly before a power tail switches to integral bounds.
const EXACT_TAIL_TERMS: usize = 16;

/// Rule producing a nonnegative rational sequence `term(1), term(2), ...`.
///
/// Signs are carried separately (see [`crate::construction::Functional`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceRule {
    /// `a / n`
    Harmonic { a: Rat },
    /// `a * r^n`
    Geometric { a: Rat, r: Rat },
    /// `a / n^2`
    InverseSquare { a: Rat },
    /// Finitely many listed terms plus trusted bounds on what follows them.
    Explicit {
        values: Vec<Rat>,
        tail_l1: Option<Rat>,
        tail_l2sq: Option<Rat>,
    },
}

impl SequenceRule {
    pub fn harmonic(a: Rat) -> Self {
        SequenceRule::Harmonic { a }
    }

    pub fn geometric(a: Rat, r: Rat) -> Self {
        SequenceRule::Geometric { a, r }
    }

    pub fn inverse_square(a: Rat) -> Self {
        SequenceRule::InverseSquare { a }
    }

    pub fn zero() -> Self {
        SequenceRule::Geometric {
            a: Rat::zero(),
            r: Rat::zero(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SequenceRule::Harmonic { .. } => "harmonic",
            SequenceRule::Geometric { .. } => "geometric",
            SequenceRule::InverseSquare { .. } => "inverse_square",
            SequenceRule::Explicit { .. } => "explicit",
        }
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        let ok = match self {
            SequenceRule::Harmonic { a } | SequenceRule::InverseSquare { a } => is_nonneg(a),
            SequenceRule::Geometric { a, r } => is_nonneg(a) && is_nonneg(r),
            SequenceRule::Explicit {
                values,
                tail_l1,
                tail_l2sq,
            } => {
                values.iter().all(is_nonneg)
                    && tail_l1.iter().all(is_nonneg)
                    && tail_l2sq.iter().all(is_nonneg)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "{} sequence has a negative term or bound",
                self.kind_name()
            )))
        }
    }

    /// The `n`-th term, `n >= 1`.
    pub fn term(&self, n: usize) -> Result<Rat> {
        if n == 0 {
            return Err(Error::Precondition("sequence terms start at n = 1".into()));
        }
        let nn = int(n as u64);
        Ok(match self {
            SequenceRule::Harmonic { a } => a / nn,
            SequenceRule::Geometric { a, r } => a * pow(r, n as u64),
            SequenceRule::InverseSquare { a } => a / (&nn * &nn),
            SequenceRule::Explicit { values, .. } => values.get(n - 1).cloned().ok_or_else(|| {
                Error::NotCertifiable {
                    what: "explicit sequence",
                    reason: format!("term {n} requested but only {} listed", values.len()),
                }
            })?,
        })
    }

    pub fn terms(&self, n: usize) -> Result<Vec<Rat>> {
        (1..=n).map(|k| self.term(k)).collect()
    }

    pub fn partial_sum(&self, n: usize) -> Result<Rat> {
        let mut s = Rat::zero();
        for k in 1..=n {
            s += self.term(k)?;
        }
        Ok(s)
    }

    pub fn partial_sq_sum(&self, n: usize) -> Result<Rat> {
        let mut s = Rat::zero();
        for k in 1..=n {
            let t = self.term(k)?;
            s += &t * &t;
        }
        Ok(s)
    }

    /// Enclosure of `sum_{k > n} term(k)`.
    pub fn tail_l1(&self, n: usize) -> Result<Enclosure> {
        match self {
            SequenceRule::Harmonic { a } => {
                if a.is_zero() {
                    Ok(Enclosure::exact(Rat::zero()))
                } else {
                    Err(Error::NotCertifiable {
                        what: "harmonic l1 tail",
                        reason: "the series diverges".into(),
                    })
                }
            }
            SequenceRule::Geometric { a, r } => {
                if a.is_zero() {
                    return Ok(Enclosure::exact(Rat::zero()));
                }
                if r >= &Rat::one() {
                    return Err(Error::NotCertifiable {
                        what: "geometric l1 tail",
                        reason: "ratio is not below 1".into(),
                    });
                }
                Ok(Enclosure::exact(a * pow(r, n as u64 + 1) / (Rat::one() - r)))
            }
            SequenceRule::InverseSquare { a } => Ok(scale(a, &inverse_power_tail(n, 2))),
            SequenceRule::Explicit {
                values, tail_l1, ..
            } => explicit_tail(values, tail_l1.as_ref(), n, false, "explicit l1 tail"),
        }
    }

    /// Enclosure of `sum_{k > n} term(k)^2`.
    pub fn tail_l2sq(&self, n: usize) -> Result<Enclosure> {
        match self {
            SequenceRule::Harmonic { a } => Ok(scale(&(a * a), &inverse_power_tail(n, 2))),
            SequenceRule::Geometric { a, r } => {
                if a.is_zero() {
                    return Ok(Enclosure::exact(Rat::zero()));
                }
                let r2 = r * r;
                if r2 >= Rat::one() {
                    return Err(Error::NotCertifiable {
                        what: "geometric l2 tail",
                        reason: "ratio is not below 1".into(),
                    });
                }
                Ok(Enclosure::exact(a * a * pow(&r2, n as u64 + 1) / (Rat::one() - r2)))
            }
            SequenceRule::InverseSquare { a } => Ok(scale(&(a * a), &inverse_power_tail(n, 4))),
            SequenceRule::Explicit {
                values, tail_l2sq, ..
            } => explicit_tail(values, tail_l2sq.as_ref(), n, true, "explicit l2 tail"),
        }
    }

    /// Upper bound on `sup_{k > n} term(k)`.
    pub fn tail_sup(&self, n: usize) -> Result<Rat> {
        let next = int(n as u64 + 1);
        match self {
            SequenceRule::Harmonic { a } => Ok(a / next),
            SequenceRule::InverseSquare { a } => Ok(a / (&next * &next)),
            SequenceRule::Geometric { a, r } => {
                if r > &Rat::one() && !a.is_zero() {
                    Err(Error::NotCertifiable {
                        what: "geometric sup",
                        reason: "terms grow without bound".into(),
                    })
                } else {
                    Ok(a * pow(r, n as u64 + 1))
                }
            }
            SequenceRule::Explicit { values, .. } => {
                // Each unlisted term is bounded by the whole l1 tail.
                let beyond = self.tail_l1(values.len().max(n))?.hi;
                Ok(values
                    .iter()
                    .skip(n)
                    .cloned()
                    .chain(std::iter::once(beyond))
                    .max()
                    .expect("nonempty"))
            }
        }
    }

    /// Enclosure of the full l1 norm, using exact terms up to `n`.
    pub fn l1_norm(&self, n: usize) -> Result<Enclosure> {
        let p = self.partial_sum(n)?;
        let t = self.tail_l1(n)?;
        Ok(Enclosure::new(&p + t.lo, p + t.hi))
    }

    /// Enclosure of the full squared l2 norm, using exact terms up to `n`.
    pub fn l2sq_norm(&self, n: usize) -> Result<Enclosure> {
        let p = self.partial_sq_sum(n)?;
        let t = self.tail_l2sq(n)?;
        Ok(Enclosure::new(&p + t.lo, p + t.hi))
    }
}

pub(crate) fn pow(r: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    let mut base = r.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

fn scale(a: &Rat, e: &Enclosure) -> Enclosure {
    Enclosure::new(a * &e.lo, a * &e.hi)
}

/// Encloses `sum_{k > n} k^-p` for `p >= 2`.
///
/// The first [`EXACT_TAIL_TERMS`] terms are summed exactly; for the rest,
/// convexity of `x^-p` gives the midpoint upper bound `int_{m+1/2}^inf`
/// and the trapezoid lower bound `int_{m+1}^inf + (m+1)^-p / 2`.
fn inverse_power_tail(n: usize, p: u32) -> Enclosure {
    let m = n + EXACT_TAIL_TERMS;
    let head = (n + 1..=m).fold(Rat::zero(), |acc, k| acc + Rat::one() / pow(&int(k as u64), p as u64));
    let pm1 = int(p as u64 - 1);
    let next = int(m as u64 + 1);
    let mid = int(m as u64) + rat(1, 2);
    let hi = Rat::one() / (&pm1 * pow(&mid, p as u64 - 1));
    let lo = Rat::one() / (&pm1 * pow(&next, p as u64 - 1)) + Rat::one() / (int(2) * pow(&next, p as u64));
    Enclosure::new(&head + lo, head + hi)
}

fn explicit_tail(
    values: &[Rat],
    beyond: Option<&Rat>,
    n: usize,
    squared: bool,
    what: &'static str,
) -> Result<Enclosure> {
    let beyond = beyond.ok_or_else(|| Error::NotCertifiable {
        what,
        reason: "no tail bound supplied".into(),
    })?;
    let listed: Rat = values
        .iter()
        .skip(n)
        .map(|v| if squared { v * v } else { v.clone() })
        .fold(Rat::zero(), |acc, v| acc + v);
    Ok(Enclosure::new(listed.clone(), listed + beyond))
}

/// Smallest `k >= from` with `f(k) <= bound`, assuming `f` nonincreasing.
pub(crate) fn first_index_below(
    from: usize,
    bound: &Rat,
    limit: usize,
    f: impl Fn(usize) -> Result<Rat>,
) -> Result<Option<usize>> {
    if f(from)? <= *bound {
        return Ok(Some(from));
    }
    let mut lo = from;
    let mut hi = from.max(1);
    loop {
        hi = hi.saturating_mul(2).min(limit);
        if f(hi)? <= *bound {
            break;
        }
        if hi == limit {
            return Ok(None);
        }
        lo = hi;
    }
    // f(lo) > bound >= f(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid)? <= *bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tail(rule: &SequenceRule, n: usize, upto: usize, squared: bool) -> Rat {
        (n + 1..=upto)
            .map(|k| {
                let t = rule.term(k).unwrap();
                if squared {
                    &t * &t
                } else {
                    t
                }
            })
            .fold(Rat::zero(), |a, b| a + b)
    }

    #[test]
    fn harmonic_terms() {
        let r = SequenceRule::harmonic(rat(1, 2));
        assert_eq!(r.term(1).unwrap(), rat(1, 2));
        assert_eq!(r.term(4).unwrap(), rat(1, 8));
        assert!(r.tail_l1(3).is_err());
    }

    #[test]
    fn geometric_tails_are_closed_form() {
        let r = SequenceRule::geometric(rat(1, 2), rat(1, 2));
        assert_eq!(r.tail_l1(0).unwrap(), Enclosure::exact(rat(1, 2)));
        assert_eq!(r.tail_l1(2).unwrap(), Enclosure::exact(rat(1, 8)));
        // 1/4 * (1/4) / (3/4)
        assert_eq!(r.tail_l2sq(0).unwrap(), Enclosure::exact(rat(1, 12)));
    }

    #[test]
    fn inverse_power_tails_bracket_long_partial_sums() {
        for rule in [
            SequenceRule::harmonic(rat(1, 2)),
            SequenceRule::inverse_square(rat(1, 4)),
        ] {
            for n in [0usize, 1, 3, 8] {
                let e = rule.tail_l2sq(n).unwrap();
                // finite partial tail is a lower bound of the infinite one
                let partial = brute_tail(&rule, n, n + 400, true);
                assert!(partial <= e.hi, "{rule:?} n={n}");
                assert!(e.lo <= e.hi);
            }
        }
        let f = SequenceRule::inverse_square(rat(1, 4));
        for n in [0usize, 2, 6] {
            let e = f.tail_l1(n).unwrap();
            let partial = brute_tail(&f, n, n + 2000, false);
            assert!(partial <= e.hi);
            // the missing part of the partial sum is below 1/(4 (n+2000))
            assert!(e.lo <= partial + rat(1, 4 * (n as i64 + 2000)));
        }
    }

    #[test]
    fn explicit_rules_need_bounds() {
        let r = SequenceRule::Explicit {
            values: vec![rat(1, 4), rat(1, 8)],
            tail_l1: None,
            tail_l2sq: Some(rat(0, 1)),
        };
        assert!(matches!(r.tail_l1(0), Err(Error::NotCertifiable { .. })));
        assert_eq!(r.tail_l2sq(0).unwrap().hi, rat(5, 64));
        assert!(r.term(3).is_err());
    }

    #[test]
    fn first_index_below_finds_minimum() {
        let f = |k: usize| Ok(rat(100, k as i64 + 1));
        assert_eq!(first_index_below(1, &rat(1, 1), 1 << 20, f).unwrap(), Some(99));
        assert_eq!(first_index_below(1, &rat(0, 1), 1000, f).unwrap(), None);
    }
}
