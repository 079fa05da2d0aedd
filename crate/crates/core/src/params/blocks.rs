use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::{int, pow2, sqrt_enclosure, Enclosure, Rat};

use super::{first_index_below, SequenceRule};

/// Blocks longer than this get their squared norm from tail differences
/// instead of an exact partial sum.
const EXACT_BLOCK_LEN: usize = 1024;
/// Terms summed exactly when enclosing the full norm.
const NORM_PREFIX: usize = 32;

/// One consecutive index block `start..=end` of the partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub sq_norm: Enclosure,
    /// Upper bound on `sum_{k > end} alpha_k^2`.
    #[serde(with = "crate::rat::rat_str")]
    pub tail_sq_upper: Rat,
    /// `delta^2 4^-(m-1)` for block `m`.
    #[serde(with = "crate::rat::rat_str")]
    pub threshold_sq: Rat,
}

/// A finite prefix of the block partition together with the inequality
/// chain certifying `sum_m ||alpha|A_m||_2 < sqrt(1 + eps) ||alpha||_2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockPartition {
    #[serde(with = "crate::rat::rat_str")]
    pub eps: Rat,
    pub bits: u32,
    #[serde(with = "crate::rat::rat_str")]
    pub delta: Rat,
    pub norm_sq: Enclosure,
    pub blocks: Vec<Block>,
    /// Bound on the norms of all blocks after the listed ones.
    #[serde(with = "crate::rat::rat_str")]
    pub remainder: Rat,
    /// Upper bound on the sum of all block norms.
    #[serde(with = "crate::rat::rat_str")]
    pub total_upper: Rat,
    /// The sequence has no mass after the last block.
    pub exhausted: bool,
}

/// Greedy block partition of `alpha` with geometric tail thresholds.
///
/// `delta` is a rational lower bound of `(sqrt(1+eps) - 1) ||alpha|| / 4`.
/// Block 1 is the shortest prefix whose tail has l2 norm at most `delta`;
/// block `m` is the shortest next segment whose tail has norm at most
/// `delta 2^-(m-1)`. The norms of all blocks then sum to at most
/// `||alpha|| + 2 delta`.
pub fn block_partition(
    alpha: &SequenceRule,
    eps: &Rat,
    bits: u32,
    max_blocks: usize,
) -> Result<BlockPartition> {
    if eps <= &Rat::zero() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    if max_blocks == 0 {
        return Err(Error::Precondition("at least one block is required".into()));
    }
    let prefix = match alpha {
        SequenceRule::Explicit { values, .. } => values.len().min(NORM_PREFIX),
        _ => NORM_PREFIX,
    };
    let norm_sq = alpha.l2sq_norm(prefix)?;
    let delta = delta_for(eps, &norm_sq, bits)?;
    let limit = search_limit(alpha);

    let mut blocks: Vec<Block> = Vec::new();
    let mut exhausted = false;
    for m in 0..max_blocks {
        let start = blocks.last().map_or(1, |b| b.end + 1);
        let threshold_sq = &delta * &delta / Rat::from_integer(pow2(2 * m as u32));
        let end = first_index_below(start, &threshold_sq, limit, |k| Ok(alpha.tail_l2sq(k)?.hi))?
            .ok_or_else(|| Error::NotCertifiable {
                what: "block partition",
                reason: format!("no prefix of the sequence reaches tail threshold {threshold_sq}"),
            })?;
        let tail_sq_upper = alpha.tail_l2sq(end)?.hi;
        blocks.push(Block {
            start,
            end,
            sq_norm: block_sq_norm(alpha, start, end)?,
            tail_sq_upper: tail_sq_upper.clone(),
            threshold_sq,
        });
        if tail_sq_upper.is_zero() {
            exhausted = true;
            break;
        }
    }

    let remainder = if exhausted {
        Rat::zero()
    } else {
        // blocks m > J each have norm <= delta 2^-(m-2)
        let j = blocks.len() as u32;
        &delta * int(4) / Rat::from_integer(pow2(j))
    };
    let total_upper = blocks
        .iter()
        .map(|b| sqrt_enclosure(&b.sq_norm.hi, bits).hi)
        .fold(Rat::zero(), |a, b| a + b)
        + &remainder;

    let partition = BlockPartition {
        eps: eps.clone(),
        bits,
        delta,
        norm_sq,
        blocks,
        remainder,
        total_upper,
        exhausted,
    };
    partition.verify(alpha).map_err(|e| Error::NotCertifiable {
        what: "block partition",
        reason: e,
    })?;
    Ok(partition)
}

impl BlockPartition {
    /// Re-derives every inequality of the certificate from `alpha`.
    pub fn verify(&self, alpha: &SequenceRule) -> Result<(), String> {
        let err = |e: Error| e.to_string();
        if self.delta <= Rat::zero() {
            return Err("delta must be positive".into());
        }
        let expect_delta = delta_for(&self.eps, &self.norm_sq, self.bits).map_err(err)?;
        if expect_delta != self.delta {
            return Err("delta does not match eps and the norm enclosure".into());
        }
        let mut next = 1;
        let mut sum = Rat::zero();
        for (m, b) in self.blocks.iter().enumerate() {
            if b.start != next || b.end < b.start {
                return Err(format!("block {} is not consecutive and nonempty", m + 1));
            }
            next = b.end + 1;
            let threshold = &self.delta * &self.delta / Rat::from_integer(pow2(2 * m as u32));
            if b.threshold_sq != threshold {
                return Err(format!("block {} has the wrong threshold", m + 1));
            }
            let tail = alpha.tail_l2sq(b.end).map_err(err)?.hi;
            if tail != b.tail_sq_upper || tail > threshold {
                return Err(format!("block {} tail exceeds its threshold", m + 1));
            }
            if b.sq_norm != block_sq_norm(alpha, b.start, b.end).map_err(err)? {
                return Err(format!("block {} squared norm does not re-verify", m + 1));
            }
            sum += sqrt_enclosure(&b.sq_norm.hi, self.bits).hi;
        }
        let j = self.blocks.len() as u32;
        let remainder = if self.exhausted {
            Rat::zero()
        } else {
            &self.delta * int(4) / Rat::from_integer(pow2(j))
        };
        if remainder != self.remainder || sum + &remainder != self.total_upper {
            return Err("block norm sum does not re-verify".into());
        }
        // (sum of block norms)^2 < (1 + eps) ||alpha||^2
        let lhs = &self.total_upper * &self.total_upper;
        let rhs = (Rat::one() + &self.eps) * &self.norm_sq.lo;
        if lhs < rhs {
            Ok(())
        } else {
            Err("sum of block norms is not below sqrt(1 + eps) ||alpha||".into())
        }
    }
}

fn delta_for(eps: &Rat, norm_sq: &Enclosure, bits: u32) -> Result<Rat> {
    let c_lo = sqrt_enclosure(&(Rat::one() + eps), bits).lo;
    let norm_lo = sqrt_enclosure(&norm_sq.lo, bits).lo;
    let delta = (c_lo - Rat::one()) * norm_lo / int(4);
    if delta <= Rat::zero() {
        return Err(Error::Precision {
            bits,
            reason: "delta rounds to zero; raise the sqrt precision".into(),
        });
    }
    Ok(delta)
}

fn search_limit(alpha: &SequenceRule) -> usize {
    match alpha {
        SequenceRule::Explicit { values, .. } => values.len().max(1),
        _ => 1 << 48,
    }
}

fn block_sq_norm(alpha: &SequenceRule, start: usize, end: usize) -> Result<Enclosure> {
    if end - start < EXACT_BLOCK_LEN {
        let mut s = Rat::zero();
        for k in start..=end {
            let t = alpha.term(k)?;
            s += &t * &t;
        }
        return Ok(Enclosure::exact(s));
    }
    let before = alpha.tail_l2sq(start - 1)?;
    let after = alpha.tail_l2sq(end)?;
    let lo = &before.lo - &after.hi;
    Ok(Enclosure::new(
        if lo < Rat::zero() { Rat::zero() } else { lo },
        before.hi - after.lo,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn geometric_half_eps_one() {
        let alpha = SequenceRule::geometric(rat(1, 2), rat(1, 2));
        let p = block_partition(&alpha, &rat(1, 1), 64, 6).unwrap();
        assert_eq!(p.blocks[0].start, 1);
        assert!(p.blocks[0].end <= 6, "first block should be short: {:?}", p.blocks[0]);
        p.verify(&alpha).unwrap();
        // sum < sqrt(2) ||alpha||
        assert!(&p.total_upper * &p.total_upper < int(2) * &p.norm_sq.lo);
    }

    #[test]
    fn single_term_is_one_block() {
        let alpha = SequenceRule::Explicit {
            values: vec![rat(1, 3)],
            tail_l1: Some(Rat::zero()),
            tail_l2sq: Some(Rat::zero()),
        };
        let p = block_partition(&alpha, &rat(1, 10), 64, 4).unwrap();
        assert_eq!(p.blocks.len(), 1);
        assert!(p.exhausted);
        assert_eq!(p.total_upper, rat(1, 3));
    }

    #[test]
    fn d1_alpha_half_eps() {
        let alpha = SequenceRule::harmonic(rat(1, 2));
        let p = block_partition(&alpha, &rat(1, 2), 64, 3).unwrap();
        for b in &p.blocks {
            // exact block sums sit inside the harmonic tail-difference enclosure
            let before = alpha.tail_l2sq(b.start - 1).unwrap();
            let after = alpha.tail_l2sq(b.end).unwrap();
            assert!(b.sq_norm.lo >= &before.lo - &after.hi);
            assert!(b.sq_norm.hi <= &before.hi - &after.lo);
        }
        p.verify(&alpha).unwrap();
    }

    #[test]
    fn tampered_certificate_fails() {
        let alpha = SequenceRule::geometric(rat(1, 2), rat(1, 2));
        let mut p = block_partition(&alpha, &rat(1, 1), 64, 3).unwrap();
        p.blocks[0].end += 1;
        assert!(p.verify(&alpha).is_err());
    }

    #[test]
    fn coarse_sqrt_needs_precision() {
        let alpha = SequenceRule::geometric(rat(1, 2), rat(1, 2));
        // sqrt(3/2) rounds down to 1 with no fractional bits
        assert!(matches!(
            block_partition(&alpha, &rat(1, 2), 0, 3),
            Err(Error::Precision { .. })
        ));
    }
}
