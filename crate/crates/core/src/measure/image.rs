use num::{BigInt, Signed, Zero};
use serde::Serialize;

use crate::construction::{build_pl, Functional, PlFunction};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::params::ParameterSet;
use crate::rat::{abs, int, rat, Enclosure, Rat};

use super::interval::{merge_sorted, normalize, IntervalUnion};

/// Pieces handled per task when generating image intervals.
const CHUNK: u64 = 4096;

/// How per-piece image intervals are combined. Both produce the same union.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeStrategy {
    /// Collect every interval, sort once, sweep.
    #[default]
    CollectSort,
    /// Normalize each chunk, then merge chunk unions pairwise.
    Balanced,
}

/// Exact image of a [`PlFunction`] and its Lebesgue measure.
pub fn image_measure(pl: &PlFunction) -> (IntervalUnion, Rat) {
    image_measure_with(pl, MergeStrategy::default(), Exec::default())
}

pub fn image_measure_with(
    pl: &PlFunction,
    strategy: MergeStrategy,
    exec: Exec,
) -> (IntervalUnion, Rat) {
    let chunks = Exec::chunks(pl.piece_count(), CHUNK);
    let gen = |r: &std::ops::Range<u64>| -> Vec<(BigInt, BigInt)> {
        r.clone().map(|i| pl.scaled_image(i)).collect()
    };
    let scaled = match strategy {
        MergeStrategy::CollectSort => {
            normalize(exec.map_slice(&chunks, gen).into_iter().flatten().collect())
        }
        MergeStrategy::Balanced => {
            let mut level = exec.map_slice(&chunks, |r| normalize(gen(r)));
            while level.len() > 1 {
                let mut pairs = Vec::with_capacity(level.len().div_ceil(2));
                let mut it = level.into_iter();
                while let Some(a) = it.next() {
                    pairs.push((a, it.next().unwrap_or_default()));
                }
                level = exec.map_slice(&pairs, |(a, b)| merge_sorted(a.clone(), b.clone()));
            }
            level.pop().unwrap_or_default()
        }
    };
    let den = pl.image_denominator();
    let total: BigInt = scaled.iter().map(|(a, b)| b - a).sum();
    let union = IntervalUnion::from_canonical(
        scaled
            .into_iter()
            .map(|(a, b)| (Rat::new(a, den.clone()), Rat::new(b, den.clone())))
            .collect(),
    );
    (union, Rat::new(total, den))
}

/// `|mu_{k+1} - mu_k| <= 2 |c_{k+1}|`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub k: usize,
    #[serde(with = "crate::rat::rat_str")]
    pub diff: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub bound: Rat,
    pub holds: bool,
}

/// Certified bracket for `lim_N mu_N`, the limit of exact truncated image
/// measures.
///
/// Each level moves the image measure by at most `2 |c_{k+1}|`, so the
/// limit lies within `2 T_N` of `mu_N` where `T_N >= sum_{n > N} |c_n|`.
/// Whether the limit equals the measure of the full projection is not
/// claimed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureBracket {
    pub functional: String,
    pub level: usize,
    #[serde(with = "crate::rat::rat_str")]
    pub mu: Rat,
    /// `mu_0, ..., mu_N`
    #[serde(with = "crate::rat::rat_vec_str")]
    pub history: Vec<Rat>,
    /// Enclosure of `sum_{n > N} |c_n|`.
    pub tail: Enclosure,
    #[serde(with = "crate::rat::rat_str")]
    pub lower: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub upper: Rat,
    pub piece_count: u64,
    pub components: usize,
    pub chain: Vec<ChainLink>,
}

impl MeasureBracket {
    pub fn chain_holds(&self) -> bool {
        self.chain.iter().all(|l| l.holds)
    }

    pub fn certifies_positive(&self) -> bool {
        self.lower.is_positive()
    }
}

/// Exact `mu_k` for `k = 0..=N` plus the certified bracket at `N`.
pub fn projection_bracket(
    params: &ParameterSet,
    functional: &Functional,
    level: usize,
    budget: u64,
    exec: Exec,
) -> Result<MeasureBracket> {
    params.check_level(level)?;
    let tail = functional.tail_l1(level)?;
    let mut history = Vec::with_capacity(level + 1);
    let mut last = None;
    for k in 0..=level {
        let pl = build_pl(params, functional, k, budget)?;
        let (union, mu) = image_measure_with(&pl, MergeStrategy::default(), exec);
        history.push(mu);
        last = Some((pl.piece_count(), union.components()));
    }
    let (piece_count, components) = last.expect("level 0 always runs");
    let chain = (0..level)
        .map(|k| {
            let diff = abs(&(&history[k + 1] - &history[k]));
            let bound = int(2) * abs(&functional.coeff(k + 1)?);
            Ok(ChainLink {
                k,
                holds: diff <= bound,
                diff,
                bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mu = history[level].clone();
    let spread = int(2) * &tail.hi;
    Ok(MeasureBracket {
        functional: functional.id.clone(),
        level,
        lower: &mu - &spread,
        upper: &mu + &spread,
        mu,
        history,
        tail,
        piece_count,
        components,
        chain,
    })
}

/// Bracket for the projection of the planar shadow
/// `t -> (t, sum_{n >= 1} c_n f_n(t))` onto the direction `(p, q)`.
///
/// The direction `(c_0, 1)` recovers the functional itself.
pub fn directional_measure(
    params: &ParameterSet,
    functional: &Functional,
    direction: (&Rat, &Rat),
    level: usize,
    budget: u64,
    exec: Exec,
) -> Result<MeasureBracket> {
    let (p, q) = direction;
    if p.is_zero() && q.is_zero() {
        return Err(Error::Precondition("direction must be nonzero".into()));
    }
    projection_bracket(params, &functional.planar(p, q), level, budget, exec)
}

/// `n_per_side` evenly spaced points on each side of the square
/// `[-1, 1]^2`, counter-clockwise from `(1, -1)`; together they meet every
/// ray from the origin in a rational direction grid.
pub fn square_directions(n_per_side: i64) -> Vec<(Rat, Rat)> {
    assert!(n_per_side > 0);
    let step = rat(2, n_per_side);
    let one = rat(1, 1);
    let mut out = Vec::with_capacity(4 * n_per_side as usize);
    for i in 0..n_per_side {
        let s = -&one + &step * int(i);
        out.push((one.clone(), s.clone()));
    }
    for i in 0..n_per_side {
        let s = &one - &step * int(i);
        out.push((s, one.clone()));
    }
    for i in 0..n_per_side {
        let s = &one - &step * int(i);
        out.push((-&one, s));
    }
    for i in 0..n_per_side {
        let s = -&one + &step * int(i);
        out.push((s, -&one));
    }
    out
}

/// Brackets for each direction, in input order.
pub fn scan_directions(
    params: &ParameterSet,
    functional: &Functional,
    directions: &[(Rat, Rat)],
    level: usize,
    budget: u64,
    exec: Exec,
) -> Result<Vec<MeasureBracket>> {
    exec.map_slice(directions, |(p, q)| {
        directional_measure(params, functional, (p, q), level, budget, exec)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    fn d1() -> ParameterSet {
        ParameterSet::d1()
    }

    #[test]
    fn f1_low_levels() {
        let f = Functional::f1();
        let pl0 = build_pl(&d1(), &f, 0, DEFAULT_BUDGET).unwrap();
        let (u0, m0) = image_measure(&pl0);
        assert_eq!(m0, rat(1, 2));
        assert_eq!(u0.intervals(), &[(rat(0, 1), rat(1, 2))]);
        let pl1 = build_pl(&d1(), &f, 1, DEFAULT_BUDGET).unwrap();
        let (u1, m1) = image_measure(&pl1);
        assert_eq!(m1, rat(9, 16));
        assert_eq!(u1.intervals(), &[(rat(0, 1), rat(9, 16))]);
    }

    #[test]
    fn identity_measure_is_one() {
        for level in 0..=4 {
            let b = projection_bracket(&d1(), &Functional::identity(), level, DEFAULT_BUDGET, Exec::Sequential)
                .unwrap();
            assert_eq!(b.mu, rat(1, 1));
            assert_eq!((b.lower, b.upper), (rat(1, 1), rat(1, 1)));
        }
    }

    #[test]
    fn strategies_and_modes_agree() {
        let pl = build_pl(&d1(), &Functional::f1(), 4, DEFAULT_BUDGET).unwrap();
        let a = image_measure_with(&pl, MergeStrategy::CollectSort, Exec::Sequential);
        let b = image_measure_with(&pl, MergeStrategy::Balanced, Exec::Sequential);
        let c = image_measure_with(&pl, MergeStrategy::Balanced, Exec::Parallel);
        let d = image_measure_with(&pl, MergeStrategy::CollectSort, Exec::Parallel);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
    }

    #[test]
    fn f1_level_one_bracket() {
        let b = projection_bracket(&d1(), &Functional::f1(), 1, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(b.mu, rat(9, 16));
        assert_eq!(b.history, vec![rat(1, 2), rat(9, 16)]);
        assert!(b.chain_holds());
        // T_1 = (pi^2/6 - 1)/4 = 0.16123...
        assert!(b.tail.lo > rat(16, 100) && b.tail.hi < rat(17, 100));
        assert_eq!(b.upper - b.lower, int(4) * &b.tail.hi);
    }

    #[test]
    fn distinguished_direction_is_the_functional() {
        let f = Functional::f1();
        let direct = projection_bracket(&d1(), &f, 3, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        let planar =
            directional_measure(&d1(), &f, (&f.a0, &rat(1, 1)), 3, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(direct.history, planar.history);
        assert_eq!((direct.lower, direct.upper), (planar.lower, planar.upper));
    }

    #[test]
    fn horizontal_direction_measures_one() {
        let b = directional_measure(
            &d1(),
            &Functional::f1(),
            (&rat(1, 1), &rat(0, 1)),
            3,
            DEFAULT_BUDGET,
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(b.mu, rat(1, 1));
        assert!(b.tail.hi.is_zero());
    }

    #[test]
    fn square_directions_are_distinct_and_nonzero() {
        let d = square_directions(16);
        assert_eq!(d.len(), 64);
        let set: std::collections::BTreeSet<_> = d.iter().collect();
        assert_eq!(set.len(), 64);
        assert!(d.iter().all(|(p, q)| !(p.is_zero() && q.is_zero())));
    }
}
