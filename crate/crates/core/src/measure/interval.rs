use std::fmt;

use num::{Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, Rat};

/// Sorts closed intervals and merges overlapping or touching ones.
///
/// The result is the unique canonical form of the union, so any grouping
/// of the inputs yields the same output.
pub fn normalize<T: Ord + Clone>(mut v: Vec<(T, T)>) -> Vec<(T, T)> {
    v.retain(|(a, b)| a <= b);
    v.sort_unstable();
    let mut out: Vec<(T, T)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

/// Union of two canonical lists, linear in their lengths.
pub fn merge_sorted<T: Ord + Clone>(x: Vec<(T, T)>, y: Vec<(T, T)>) -> Vec<(T, T)> {
    let mut out: Vec<(T, T)> = Vec::with_capacity(x.len() + y.len());
    let (mut xi, mut yi) = (x.into_iter().peekable(), y.into_iter().peekable());
    loop {
        let next = match (xi.peek(), yi.peek()) {
            (Some(a), Some(b)) => {
                if a <= b {
                    xi.next()
                } else {
                    yi.next()
                }
            }
            (Some(_), None) => xi.next(),
            (None, Some(_)) => yi.next(),
            (None, None) => break,
        };
        let (a, b) = next.expect("peeked");
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

/// Finite union of closed rational intervals in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalUnion {
    intervals: Vec<(Rat, Rat)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    pub fn interval(a: Rat, b: Rat) -> Self {
        IntervalUnion::from_intervals(vec![(a, b)])
    }

    /// Empty input intervals (`a > b`) are dropped.
    pub fn from_intervals(v: Vec<(Rat, Rat)>) -> Self {
        IntervalUnion {
            intervals: normalize(v),
        }
    }

    /// Wraps a list that is already canonical.
    pub(crate) fn from_canonical(intervals: Vec<(Rat, Rat)>) -> Self {
        debug_assert!(intervals.iter().all(|(a, b)| a <= b));
        debug_assert!(intervals.windows(2).all(|w| w[0].1 < w[1].0));
        IntervalUnion { intervals }
    }

    pub fn intervals(&self) -> &[(Rat, Rat)] {
        &self.intervals
    }

    pub fn components(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Rat {
        self.intervals
            .iter()
            .fold(Rat::zero(), |acc, (a, b)| acc + (b - a))
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let i = self.intervals.partition_point(|(_, b)| b < x);
        self.intervals.get(i).is_some_and(|(a, _)| a <= x)
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion {
            intervals: merge_sorted(self.intervals.clone(), other.intervals.clone()),
        }
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (x, y) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < x.len() && j < y.len() {
            let lo = (&x[i].0).max(&y[j].0);
            let hi = (&x[i].1).min(&y[j].1);
            if lo <= hi {
                out.push((lo.clone(), hi.clone()));
            }
            if x[i].1 < y[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Shared endpoints can make neighbouring pieces touch.
        IntervalUnion {
            intervals: normalize(out),
        }
    }

    /// Minkowski sum with `[-r, r]`.
    pub fn dilate(&self, r: &Rat) -> Result<IntervalUnion> {
        check_radius(r)?;
        Ok(IntervalUnion::from_intervals(
            self.intervals
                .iter()
                .map(|(a, b)| (a - r, b + r))
                .collect(),
        ))
    }

    /// Points whose whole `r`-neighbourhood lies in the union.
    ///
    /// Components shorter than `2r` vanish; components of length exactly
    /// `2r` survive as single points.
    pub fn erode(&self, r: &Rat) -> Result<IntervalUnion> {
        check_radius(r)?;
        Ok(IntervalUnion::from_canonical(
            self.intervals
                .iter()
                .map(|(a, b)| (a + r, b - r))
                .filter(|(a, b)| a <= b)
                .collect(),
        ))
    }
}

fn check_radius(r: &Rat) -> Result<()> {
    if r.is_negative() {
        return Err(Error::out_of_domain("radius", r, "r >= 0"));
    }
    Ok(())
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.intervals.len()))?;
        for (a, b) in &self.intervals {
            seq.serialize_element(&[fmt_rat(a), fmt_rat(b)])?;
        }
        seq.end()
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(a, b)| format!("[{a}, {b}]"))
            .collect();
        write!(f, "{}", parts.join(" u "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn iu(v: &[(i64, i64, i64, i64)]) -> IntervalUnion {
        IntervalUnion::from_intervals(
            v.iter()
                .map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))
                .collect(),
        )
    }

    #[test]
    fn touching_intervals_merge() {
        let u = iu(&[(0, 1, 1, 8), (1, 8, 5, 16), (1, 4, 3, 8), (3, 8, 9, 16)]);
        assert_eq!(u.intervals(), &[(rat(0, 1), rat(9, 16))]);
        assert_eq!(u.measure(), rat(9, 16));
    }

    #[test]
    fn dilate_and_erode_examples() {
        let u = iu(&[(0, 1, 1, 1)]);
        assert_eq!(u.dilate(&rat(1, 4)).unwrap(), iu(&[(-1, 4, 5, 4)]));
        let v = iu(&[(0, 1, 1, 8), (1, 4, 3, 8)]);
        let e = v.erode(&rat(1, 16)).unwrap();
        assert_eq!(e.intervals(), &[(rat(1, 16), rat(1, 16)), (rat(5, 16), rat(5, 16))]);
        assert!(e.measure().is_zero());
        assert!(v.erode(&rat(1, 10)).unwrap().is_empty());
        assert!(v.erode(&rat(-1, 10)).is_err());
    }

    #[test]
    fn intersect_and_contains() {
        let a = iu(&[(0, 1, 1, 2), (3, 4, 1, 1)]);
        let b = iu(&[(1, 4, 7, 8)]);
        assert_eq!(a.intersect(&b), iu(&[(1, 4, 1, 2), (3, 4, 7, 8)]));
        assert!(a.contains(&rat(1, 2)));
        assert!(!a.contains(&rat(5, 8)));
        assert!(a.contains(&rat(3, 4)));
        let c = iu(&[(1, 2, 3, 4)]);
        assert_eq!(a.intersect(&c), iu(&[(1, 2, 1, 2), (3, 4, 3, 4)]));
    }

    #[test]
    fn merge_sorted_matches_normalize() {
        let x = normalize(vec![(0, 2), (5, 6), (9, 9)]);
        let y = normalize(vec![(2, 3), (7, 8), (10, 12)]);
        let mut all = x.clone();
        all.extend(y.clone());
        assert_eq!(merge_sorted(x, y), normalize(all));
    }
}
