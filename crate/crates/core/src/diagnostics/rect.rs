use num::{One, Signed, Zero};
use serde::Serialize;

use crate::curve::ParametrizedCurve;
use crate::error::{Error, Result};
use crate::measure::IntervalUnion;
use crate::rat::{abs, int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum RectOutcome {
    /// `bound > 0` certifies that `x*(gamma(A))` has positive measure.
    Witness {
        #[serde(with = "crate::rat::rat_str")]
        s1: Rat,
        #[serde(with = "crate::rat::rat_str")]
        s2: Rat,
        #[serde(with = "crate::rat::rat_str")]
        chord_norm: Rat,
        #[serde(with = "crate::rat::rat_str")]
        projection: Rat,
        /// `|chord| / 2 - L |[s1, s2] \ A|`
        #[serde(with = "crate::rat::rat_str")]
        bound: Rat,
    },
    NoWitness { reason: String },
}

impl RectOutcome {
    pub fn bound(&self) -> Option<&Rat> {
        match self {
            RectOutcome::Witness { bound, .. } => Some(bound),
            RectOutcome::NoWitness { .. } => None,
        }
    }
}

/// Lower bound on the measure of `x*(gamma(A))` from a chord of the curve.
///
/// Candidate pairs are endpoints of the components of `A` with
/// `|A n [s1, s2]| >= (1 - 1/(2 L^2)) |s2 - s1|`; a pair counts when
/// `|x*(chord)| > |chord| / 2`. `x_star` is taken relative to its sup norm,
/// the dual of the l1 norm of the curve's coordinates.
pub fn rect_witness(
    curve: &ParametrizedCurve<'_>,
    a: &IntervalUnion,
    x_star: &[Rat],
    lipschitz: &Rat,
) -> Result<RectOutcome> {
    if !lipschitz.is_positive() {
        return Err(Error::out_of_domain("L", lipschitz, "L > 0"));
    }
    let unit = IntervalUnion::interval(Rat::zero(), Rat::one());
    if a.is_empty() || a.intersect(&unit) != *a {
        return Err(Error::Precondition("A must be a nonempty subset of [0, 1]".into()));
    }
    let scale = x_star.iter().map(abs).max().unwrap_or_else(Rat::zero);
    if scale.is_zero() {
        return Err(Error::Precondition("the functional must be nonzero".into()));
    }
    let x: Vec<Rat> = x_star.iter().map(|c| c / &scale).collect();
    let density = Rat::one() - Rat::one() / (int(2) * lipschitz * lipschitz);

    let mut points: Vec<Rat> = a.intervals().iter().flat_map(|(l, r)| [l.clone(), r.clone()]).collect();
    points.dedup();
    let values = points
        .iter()
        .map(|s| curve.eval(s))
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<RectOutcome> = None;
    let mut dense_pairs = 0usize;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (s1, s2) = (&points[i], &points[j]);
            let span = s2 - s1;
            let covered = a.intersect(&IntervalUnion::interval(s1.clone(), s2.clone())).measure();
            if covered < &density * &span {
                continue;
            }
            dense_pairs += 1;
            let zero = Rat::zero();
            let n = values[i].len().max(values[j].len());
            let chord: Vec<Rat> = (0..n)
                .map(|k| values[j].get(k).unwrap_or(&zero) - values[i].get(k).unwrap_or(&zero))
                .collect();
            let norm = chord.iter().fold(Rat::zero(), |s, c| s + abs(c));
            let projection = abs(&chord
                .iter()
                .zip(&x)
                .fold(Rat::zero(), |s, (c, w)| s + c * w));
            if &projection * int(2) <= norm {
                continue;
            }
            let bound = &norm / int(2) - lipschitz * (&span - &covered);
            if best.as_ref().and_then(RectOutcome::bound).is_none_or(|b| &bound > b) {
                best = Some(RectOutcome::Witness {
                    s1: s1.clone(),
                    s2: s2.clone(),
                    chord_norm: norm,
                    projection,
                    bound,
                });
            }
        }
    }
    Ok(best.unwrap_or_else(|| RectOutcome::NoWitness {
        reason: if dense_pairs == 0 {
            "no endpoint pair meets the density condition".into()
        } else {
            "the functional sees at most half of every dense chord".into()
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_gamma, parametrize, Tau};
    use crate::exec::Exec;
    use crate::params::ParameterSet;
    use crate::rat::rat;
    use crate::DEFAULT_BUDGET;

    fn segment() -> crate::curve::PolygonalCurve {
        build_gamma(&ParameterSet::d2(), 0, DEFAULT_BUDGET, Exec::Sequential).unwrap()
    }

    #[test]
    fn full_segment() {
        let g = segment();
        let tau = Tau::canonical(1);
        let c = parametrize(&g, &tau).unwrap();
        let a = IntervalUnion::interval(rat(0, 1), rat(1, 1));
        let r = rect_witness(&c, &a, &[rat(1, 1)], &rat(1, 1)).unwrap();
        assert_eq!(r.bound(), Some(&rat(1, 2)));
    }

    #[test]
    fn segment_with_gap() {
        let g = segment();
        let tau = Tau::canonical(1);
        let c = parametrize(&g, &tau).unwrap();
        let gap = rat(1, 20);
        let l = rat(2, 1);
        let a = IntervalUnion::from_intervals(vec![
            (rat(0, 1), rat(1, 2) - &gap / int(2)),
            (rat(1, 2) + &gap / int(2), rat(1, 1)),
        ]);
        let r = rect_witness(&c, &a, &[rat(1, 1)], &l).unwrap();
        assert_eq!(r.bound(), Some(&(rat(1, 2) - &l * &gap)));
    }

    #[test]
    fn orthogonal_functional_has_no_witness() {
        let p = ParameterSet::d2();
        let g = build_gamma(&p, 1, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        let tau = Tau::canonical(2);
        let c = parametrize(&g, &tau).unwrap();
        let a = IntervalUnion::interval(rat(0, 1), rat(1, 1));
        let r = rect_witness(&c, &a, &[rat(0, 1), rat(1, 1)], &rat(1, 1)).unwrap();
        assert!(matches!(r, RectOutcome::NoWitness { .. }));
    }
}
