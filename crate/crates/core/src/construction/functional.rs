use num::{One, Signed, Zero};

use crate::error::Result;
use crate::params::SequenceRule;
use crate::rat::{rat, Enclosure, Rat};

/// A linear functional seen through its values on the coordinate vectors:
/// `coeff(0) = a0` and `coeff(n) = scale * rule.term(n)` for `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functional {
    pub id: String,
    pub a0: Rat,
    pub scale: Rat,
    pub rule: SequenceRule,
}

impl Functional {
    pub fn new(id: impl Into<String>, a0: Rat, scale: Rat, rule: SequenceRule) -> Self {
        Functional {
            id: id.into(),
            a0,
            scale,
            rule,
        }
    }

    /// `a0 = 1/2`, `coeff(n) = 1/(4 n^2)`.
    pub fn f1() -> Self {
        Functional::new("F1", rat(1, 2), Rat::one(), SequenceRule::inverse_square(rat(1, 4)))
    }

    /// Evaluation of the first coordinate only.
    pub fn identity() -> Self {
        Functional::new("identity", Rat::one(), Rat::one(), SequenceRule::zero())
    }

    pub fn coeff(&self, n: usize) -> Result<Rat> {
        if n == 0 {
            Ok(self.a0.clone())
        } else {
            Ok(&self.scale * self.rule.term(n)?)
        }
    }

    pub fn coeffs(&self, level: usize) -> Result<Vec<Rat>> {
        (0..=level).map(|n| self.coeff(n)).collect()
    }

    /// Enclosure of `sum_{n > level} |coeff(n)|`.
    pub fn tail_l1(&self, level: usize) -> Result<Enclosure> {
        if self.scale.is_zero() {
            return Ok(Enclosure::exact(Rat::zero()));
        }
        let t = self.rule.tail_l1(level)?;
        let s = self.scale.abs();
        Ok(Enclosure::new(&t.lo * &s, &t.hi * &s))
    }

    /// The functional `(x, y) -> p x + q y` on the planar shadow
    /// `t -> (t, sum_{n >= 1} coeff(n) f_n(t))`.
    pub fn planar(&self, p: &Rat, q: &Rat) -> Functional {
        Functional {
            id: format!("{}@({},{})", self.id, crate::rat::fmt_rat(p), crate::rat::fmt_rat(q)),
            a0: p.clone(),
            scale: q * &self.scale,
            rule: self.rule.clone(),
        }
    }
}
