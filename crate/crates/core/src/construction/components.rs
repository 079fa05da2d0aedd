use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{Model, ParameterSet};
use crate::rat::{frac, int, rat, Enclosure, Rat};

/// Half-sawtooth: `0` on `[k, k + 1/2)`, `frac(t) - 1/2` on `[k + 1/2, k + 1)`.
pub fn sawtooth(t: &Rat) -> Result<Rat> {
    if t < &Rat::zero() {
        return Err(Error::out_of_domain("t", t, "[0, inf)"));
    }
    Ok(saw(t))
}

fn saw(t: &Rat) -> Rat {
    let f = frac(t);
    let half = rat(1, 2);
    if f < half {
        Rat::zero()
    } else {
        f - half
    }
}

/// `f_n(t)` without domain checks; `grid` is `M_n`.
pub(crate) fn f_raw(n: usize, grid: &Rat, t: &Rat) -> Rat {
    if n == 0 {
        t.clone()
    } else {
        saw(&(grid * t)) / grid
    }
}

/// `f_0(t) = t` and `f_n(t) = g(M_n t) / M_n`.
pub fn f_component(params: &ParameterSet, n: usize, t: &Rat) -> Result<Rat> {
    check_t(t)?;
    params.check_level(n)?;
    Ok(f_raw(n, &params.grid_rat(n), t))
}

/// `lim_{s -> t-} f_n(s)` for `0 < t <= 1`.
///
/// Differs from `f_n(t)` exactly at multiples of `1/M_n`, where `f_n`
/// drops from `1/(2 M_n)` to `0`.
pub fn f_left_limit(params: &ParameterSet, n: usize, t: &Rat) -> Result<Rat> {
    if t <= &Rat::zero() || t > &Rat::one() {
        return Err(Error::out_of_domain("t", t, "(0, 1]"));
    }
    params.check_level(n)?;
    Ok(f_left_raw(n, &params.grid_rat(n), t))
}

/// Left limit of `f_n` at `t` without domain checks.
pub(crate) fn f_left_raw(n: usize, grid: &Rat, t: &Rat) -> Rat {
    if n == 0 {
        return t.clone();
    }
    let scaled = grid * t;
    if scaled.is_integer() {
        Rat::one() / (int(2) * grid)
    } else {
        saw(&scaled) / grid
    }
}

fn check_t(t: &Rat) -> Result<()> {
    if t < &Rat::zero() || t >= &Rat::one() {
        Err(Error::out_of_domain("t", t, "[0, 1)"))
    } else {
        Ok(())
    }
}

/// `(f_0(t), ..., f_N(t))` plus a bound on what truncation discards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedPoint {
    pub level: usize,
    #[serde(with = "crate::rat::rat_vec_str")]
    pub coords: Vec<Rat>,
    #[serde(serialize_with = "ser_model")]
    pub model: Model,
    #[serde(with = "crate::rat::rat_str")]
    pub t: Rat,
    /// Model-norm bound on `sum_{n > N} f_n(t) x_n`.
    pub tail: Enclosure,
}

fn ser_model<S: serde::Serializer>(m: &Model, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(m.name())
}

impl TruncatedPoint {
    /// Model coordinates `c_n alpha_n` (with `alpha_0 = 1`).
    pub fn embedded(&self, params: &ParameterSet) -> Vec<Rat> {
        self.coords
            .iter()
            .enumerate()
            .map(|(n, c)| c * params.alpha(n))
            .collect()
    }
}

pub fn truncated_point(params: &ParameterSet, level: usize, t: &Rat) -> Result<TruncatedPoint> {
    check_t(t)?;
    params.check_level(level)?;
    let coords = (0..=level)
        .map(|n| f_raw(n, &params.grid_rat(n), t))
        .collect();
    Ok(TruncatedPoint {
        level,
        coords,
        model: params.model,
        t: t.clone(),
        tail: params.truncation_tail(level)?,
    })
}

/// Level-`N` point of the `j`-th scaled copy, `j >= 1`, scaled by `2^-j`.
///
/// `weights[i]` must equal `2^-(i+1)`; all copies share the parameters.
pub fn ensemble_evaluate(
    params: &ParameterSet,
    weights: &[Rat],
    j: usize,
    level: usize,
    t: &Rat,
) -> Result<TruncatedPoint> {
    let mut expect = Rat::one();
    for (i, w) in weights.iter().enumerate() {
        expect /= int(2);
        if *w != expect {
            return Err(Error::InvalidParams(format!(
                "ensemble weight {} is {w}, expected 2^-{}",
                i + 1,
                i + 1
            )));
        }
    }
    if j == 0 || j > weights.len() {
        return Err(Error::Precondition(format!(
            "copy index {j} outside 1..={}",
            weights.len()
        )));
    }
    let w = &weights[j - 1];
    let mut p = truncated_point(params, level, t)?;
    for c in &mut p.coords {
        *c *= w;
    }
    p.tail = Enclosure::new(&p.tail.lo * w, &p.tail.hi * w);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_examples() {
        assert_eq!(sawtooth(&rat(1, 4)).unwrap(), rat(0, 1));
        assert_eq!(sawtooth(&rat(3, 4)).unwrap(), rat(1, 4));
        assert_eq!(sawtooth(&rat(5, 2)).unwrap(), rat(0, 1));
        assert!(sawtooth(&rat(-1, 4)).is_err());
    }

    #[test]
    fn component_examples() {
        let p = ParameterSet::d1();
        assert_eq!(f_component(&p, 1, &rat(3, 8)).unwrap(), rat(1, 8));
        assert_eq!(f_component(&p, 2, &rat(5, 16)).unwrap(), rat(0, 1));
        for n in 1..=8 {
            assert_eq!(f_component(&p, n, &rat(0, 1)).unwrap(), rat(0, 1));
        }
        assert!(f_component(&p, 9, &rat(1, 3)).is_err());
        assert!(f_component(&p, 1, &rat(1, 1)).is_err());
    }

    #[test]
    fn left_limits_at_grid_points() {
        let p = ParameterSet::d1();
        assert_eq!(f_left_limit(&p, 1, &rat(1, 2)).unwrap(), rat(1, 4));
        assert_eq!(f_left_limit(&p, 1, &rat(1, 1)).unwrap(), rat(1, 4));
        assert_eq!(f_left_limit(&p, 2, &rat(1, 2)).unwrap(), rat(1, 16));
        // continuous away from grid points
        assert_eq!(
            f_left_limit(&p, 2, &(rat(3, 8) + rat(1, 100))).unwrap(),
            f_component(&p, 2, &(rat(3, 8) + rat(1, 100))).unwrap()
        );
    }

    #[test]
    fn truncated_point_examples() {
        let p = ParameterSet::d1();
        let x = truncated_point(&p, 2, &rat(3, 8)).unwrap();
        assert_eq!(x.coords, vec![rat(3, 8), rat(1, 8), rat(0, 1)]);
        let x = truncated_point(&p, 5, &rat(0, 1)).unwrap();
        assert!(x.coords.iter().all(|c| c.is_zero()));
        let x = truncated_point(&p, 1, &rat(1, 2)).unwrap();
        assert_eq!(x.coords, vec![rat(1, 2), rat(0, 1)]);
        assert!(x.tail.hi > Rat::zero());
    }

    #[test]
    fn ensemble_examples() {
        let p = ParameterSet::d1();
        let w = vec![rat(1, 2), rat(1, 4), rat(1, 8)];
        let x = ensemble_evaluate(&p, &w, 1, 3, &rat(0, 1)).unwrap();
        assert!(x.coords.iter().all(|c| c.is_zero()));
        let x = ensemble_evaluate(&p, &w, 2, 1, &rat(3, 8)).unwrap();
        assert_eq!(x.coords, vec![rat(3, 32), rat(1, 32)]);
        assert!(ensemble_evaluate(&p, &[rat(1, 3)], 1, 1, &rat(0, 1)).is_err());
        assert!(ensemble_evaluate(&p, &w, 4, 1, &rat(0, 1)).is_err());
        assert!(ensemble_evaluate(&p, &w, 0, 1, &rat(0, 1)).is_err());
    }

    #[test]
    fn tail_model_matches_params() {
        let p = ParameterSet::d1();
        let x = truncated_point(&p, 3, &rat(1, 5)).unwrap();
        assert_eq!(x.model, Model::L2);
        assert!(x.tail.hi > Rat::zero());
    }
}
