//! Construction parameters: the coefficient sequence, the grid
//! multipliers, derived grid sizes and the certified norm conditions.

mod blocks;
mod doc;
mod grid;
mod sequence;
mod validate;

pub use blocks::{block_partition, Block, BlockPartition};
pub use doc::{MRuleDoc, ParamsDoc, SequenceRuleDoc};
pub use grid::{cell_of, grid_cells, GridCell, Half};
pub use sequence::SequenceRule;
pub(crate) use sequence::first_index_below;
pub use validate::{validate, Check, CheckStatus, FailureKind, ValidationReport};

use num::{BigInt, One, ToPrimitive};

use crate::error::{Error, Result};
use crate::rat::{int, rat, Enclosure, Rat};

pub const DEFAULT_SQRT_BITS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Model {
    L1,
    L2,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::L1 => "L1",
            Model::L2 => "L2",
        }
    }
}

/// Rule for the grid multipliers `m_n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MRule {
    /// `m_n = c n`
    Linear { c: u64 },
    /// `m_n = c`
    Constant { c: u64 },
    Explicit { values: Vec<u64> },
}

impl MRule {
    pub fn get(&self, n: usize) -> Result<u64> {
        match self {
            MRule::Linear { c } => c
                .checked_mul(n as u64)
                .ok_or_else(|| Error::InvalidParams(format!("m_{n} overflows"))),
            MRule::Constant { c } => Ok(*c),
            MRule::Explicit { values } => values.get(n.wrapping_sub(1)).copied().ok_or_else(|| {
                Error::InvalidParams(format!("m_{n} requested but only {} listed", values.len()))
            }),
        }
    }
}

/// A validated-shape set of construction parameters.
///
/// `alpha_0 = 1` is implicit. Grid sizes `M_n` are precomputed up to
/// `n_max`. Whether the norm and parity conditions hold is reported by
/// [`validate`], not enforced here, so broken instances can still be
/// inspected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSet {
    pub alpha: SequenceRule,
    pub m: MRule,
    pub n_max: usize,
    pub model: Model,
    pub sqrt_bits: u32,
    ms: Vec<u64>,
    big_ms: Vec<BigInt>,
    alphas: Vec<Rat>,
}

impl ParameterSet {
    pub fn new(alpha: SequenceRule, m: MRule, n_max: usize, model: Model) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParams("n_max must be at least 1".into()));
        }
        alpha.check_nonnegative()?;
        let mut ms = vec![1u64];
        let mut big_ms = vec![BigInt::one()];
        let mut alphas = vec![Rat::one()];
        for n in 1..=n_max {
            let mn = m.get(n)?;
            if mn == 0 {
                return Err(Error::InvalidParams(format!("m_{n} must be positive")));
            }
            ms.push(mn);
            let next = &big_ms[n - 1] * mn;
            big_ms.push(next);
            alphas.push(alpha.term(n)?);
        }
        Ok(ParameterSet {
            alpha,
            m,
            n_max,
            model,
            sqrt_bits: DEFAULT_SQRT_BITS,
            ms,
            big_ms,
            alphas,
        })
    }

    pub fn with_sqrt_bits(mut self, bits: u32) -> Self {
        self.sqrt_bits = bits;
        self
    }

    /// Unrectifiable default: `alpha_n = 1/(2n)`, `m_n = 2n`, depth 8, l2.
    pub fn d1() -> Self {
        ParameterSet::new(
            SequenceRule::harmonic(rat(1, 2)),
            MRule::Linear { c: 2 },
            8,
            Model::L2,
        )
        .expect("default instance")
    }

    /// Rectifiable default: `alpha_n = 2^-(n+1)`, `m_n = 2`, depth 10, l1.
    pub fn d2() -> Self {
        ParameterSet::new(
            SequenceRule::geometric(rat(1, 2), rat(1, 2)),
            MRule::Constant { c: 2 },
            10,
            Model::L1,
        )
        .expect("default instance")
    }

    /// Same sequence and grids, different truncation depth.
    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        let mut p = ParameterSet::new(self.alpha.clone(), self.m.clone(), n_max, self.model)?;
        p.sqrt_bits = self.sqrt_bits;
        Ok(p)
    }

    pub fn check_level(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(Error::LevelOutOfRange {
                level: n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    /// `alpha_n`, with `alpha_0 = 1`.
    pub fn alpha(&self, n: usize) -> &Rat {
        &self.alphas[n]
    }

    pub fn alphas(&self) -> &[Rat] {
        &self.alphas
    }

    /// `m_n` for `1 <= n <= n_max`.
    pub fn m(&self, n: usize) -> u64 {
        self.ms[n]
    }

    /// `M_n = m_1 ... m_n`, `M_0 = 1`.
    pub fn grid_size(&self, n: usize) -> &BigInt {
        &self.big_ms[n]
    }

    pub fn grid_size_u64(&self, n: usize) -> Result<u64> {
        self.check_level(n)?;
        self.big_ms[n].to_u64().ok_or_else(|| Error::LevelTooFine {
            level: n,
            count: self.big_ms[n].to_string(),
        })
    }

    pub fn grid_sizes_u64(&self, n: usize) -> Result<Vec<u64>> {
        (0..=n).map(|k| self.grid_size_u64(k)).collect()
    }

    pub fn grid_rat(&self, n: usize) -> Rat {
        Rat::from_integer(self.big_ms[n].clone())
    }

    /// Enclosure of `K^2`, the squared sup of `||sum c_n x_n||` over `|c_n| <= 1`.
    ///
    /// In the l2 coordinate model this is `1 + ||alpha||_2^2`; in the l1
    /// model it is `(1 + ||alpha||_1)^2`.
    pub fn k_squared(&self) -> Result<Enclosure> {
        match self.model {
            Model::L2 => {
                let s = self.alpha.l2sq_norm(self.n_max)?;
                Ok(Enclosure::new(Rat::one() + s.lo, Rat::one() + s.hi))
            }
            Model::L1 => {
                let s = self.alpha.l1_norm(self.n_max)?;
                let lo = Rat::one() + s.lo;
                let hi = Rat::one() + s.hi;
                Ok(Enclosure::new(&lo * &lo, &hi * &hi))
            }
        }
    }

    pub fn k_enclosure(&self) -> Result<Enclosure> {
        Ok(self.k_squared()?.sqrt(self.sqrt_bits))
    }

    /// Upper bound on the model norm of `sum_{n > level} c_n x_n` when
    /// `|c_n| <= 1/(2 M_n)`, i.e. the part of a point dropped by truncation.
    pub fn truncation_tail(&self, level: usize) -> Result<Enclosure> {
        self.check_doubling_beyond(level)?;
        // alpha_n <= s and M_n >= M_level 2^(n - level) for n > level
        let s = self.alpha.tail_sup(level)?;
        let big = self.grid_rat(level);
        Ok(match self.model {
            Model::L1 => Enclosure::new(Rat::from_integer(0.into()), &s / (int(2) * &big)),
            Model::L2 => {
                let sq = &s * &s / (int(12) * &big * &big);
                Enclosure::new(Rat::from_integer(0.into()), crate::rat::sqrt_enclosure(&sq, self.sqrt_bits).hi)
            }
        })
    }
}

impl ParameterSet {
    /// The tail bounds assume `m_n >= 2` for every `n > level`.
    fn check_doubling_beyond(&self, level: usize) -> Result<()> {
        let listed_ok = (level + 1..=self.n_max).all(|n| self.ms[n] >= 2);
        let rule_ok = match &self.m {
            MRule::Linear { c } => *c >= 1,
            MRule::Constant { c } => *c >= 2,
            MRule::Explicit { .. } => false,
        };
        if listed_ok && rule_ok {
            Ok(())
        } else {
            Err(Error::NotCertifiable {
                what: "truncation tail",
                reason: "grid multipliers beyond the truncation are not known to be >= 2".into(),
            })
        }
    }
}
