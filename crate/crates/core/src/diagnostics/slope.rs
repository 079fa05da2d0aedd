use num::{Signed, Zero};
use serde::Serialize;

use crate::construction::f_component;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::params::{GridCell, Half, ParameterSet};
use crate::rat::Rat;
use crate::sampling::{stream, uniform_index, uniform_rat, GENERATOR};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeRow {
    pub m: usize,
    /// `f_m(t' + h) - f_m(t')`
    #[serde(with = "crate::rat::rat_str")]
    pub shifted: Rat,
    /// `f_m(t + h) - f_m(t)`
    #[serde(with = "crate::rat::rat_str")]
    pub base: Rat,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeReport {
    pub n: usize,
    pub cell_index: u64,
    #[serde(with = "crate::rat::rat_str")]
    pub t: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub t_prime: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub h: Rat,
    pub rows: Vec<SlopeRow>,
    pub passed: bool,
}

/// Compares increments at `t` and at `t' = t +- 1/(2 M_n)` inside a
/// level-`n` cell: equal for every `m != n`, while for `m = n` one
/// increment is `0` and the other is `h`.
///
/// `t` and `t + h` must share a half of the cell and `t'`, `t' + h` the
/// other half. `t_prime` defaults to the shift that stays in the cell.
pub fn slope_identity_check(
    params: &ParameterSet,
    cell: &GridCell,
    t: &Rat,
    h: &Rat,
    t_prime: Option<&Rat>,
) -> Result<SlopeReport> {
    let n = cell.level;
    if n == 0 {
        return Err(Error::Precondition("the cell level must be at least 1".into()));
    }
    params.check_level(n)?;
    let cell = cell.whole();
    if cell.count != params.grid_size_u64(n)? {
        return Err(Error::Precondition("cell does not belong to this grid".into()));
    }
    let shift = Rat::new(1.into(), (2 * cell.count).into());
    let tp = match t_prime {
        Some(tp) => {
            if (tp - t).abs() != shift {
                return Err(Error::Precondition(format!("t' = {tp} is not t +- {shift}")));
            }
            tp.clone()
        }
        None if t < &cell.midpoint() => t + &shift,
        None => t - &shift,
    };
    let halves = cell.halves();
    let half_of = |x: &Rat| -> Result<Half> {
        halves
            .iter()
            .find(|c| c.contains(x))
            .and_then(|c| c.half)
            .ok_or_else(|| Error::Precondition(format!("point {x} lies outside the cell")))
    };
    let th = t + h;
    let tph = &tp + h;
    let (a, b, c, d) = (half_of(t)?, half_of(&th)?, half_of(&tp)?, half_of(&tph)?);
    if a != b || c != d {
        return Err(Error::Precondition(format!(
            "t = {t}, t' = {tp} and their shifts by h = {h} must stay in their halves"
        )));
    }
    let mut rows = Vec::with_capacity(params.n_max + 1);
    for m in 0..=params.n_max {
        let shifted = f_component(params, m, &tph)? - f_component(params, m, &tp)?;
        let base = f_component(params, m, &th)? - f_component(params, m, t)?;
        let ok = if m == n {
            (shifted.is_zero() && &base == h) || (base.is_zero() && &shifted == h)
        } else {
            shifted == base
        };
        rows.push(SlopeRow { m, shifted, base, ok });
    }
    Ok(SlopeReport {
        n,
        cell_index: cell.index,
        passed: rows.iter().all(|r| r.ok),
        t: t.clone(),
        t_prime: tp,
        h: h.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeSweep {
    pub generator: &'static str,
    pub seed: u64,
    pub samples: u64,
    pub failures: Vec<SlopeReport>,
    pub passed: bool,
}

/// Random admissible tuple: level, cell, a half, two points of that half
/// (`t` and `t + h`), and the matching shift into the other half.
pub fn random_slope_tuple(params: &ParameterSet, max_level: usize, seed: u64, index: u64) -> Result<(GridCell, Rat, Rat)> {
    let mut rng = stream(seed, index);
    let n = uniform_index(&mut rng, 1, max_level.min(params.n_max) as u64) as usize;
    let count = params.grid_size_u64(n)?;
    let j = uniform_index(&mut rng, 1, count);
    let cell = GridCell::new(n, j, count);
    let halves = cell.halves();
    let half = &halves[uniform_index(&mut rng, 0, 1) as usize];
    let (lo, hi) = (half.left(), half.right());
    let t = uniform_rat(&mut rng, &lo, &hi);
    let u = uniform_rat(&mut rng, &lo, &hi);
    Ok((cell, t.clone(), u - t))
}

pub fn slope_sweep(params: &ParameterSet, max_level: usize, samples: u64, seed: u64, exec: Exec) -> Result<SlopeSweep> {
    let reports = exec.map_range(0..samples, |i| -> Result<SlopeReport> {
        let (cell, t, h) = random_slope_tuple(params, max_level, seed, i)?;
        slope_identity_check(params, &cell, &t, &h, None)
    });
    let mut failures = Vec::new();
    for r in reports {
        let r = r?;
        if !r.passed {
            failures.push(r);
        }
    }
    Ok(SlopeSweep {
        generator: GENERATOR,
        seed,
        samples,
        passed: failures.is_empty(),
        failures,
    })
}
