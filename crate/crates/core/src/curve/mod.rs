//! Polygonal approximations of the rectifiable companion set in the l1
//! model, their exact lengths and a common parametrization.

mod param;

use std::io::{self, Write};

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::construction::{f_left_raw, f_raw, truncated_point};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::params::{Model, ParameterSet};
use crate::rat::{abs, fmt_rat, int, rat, to_f64, Rat};

pub use param::{parametrize, sup_distance, ParametrizedCurve, Tau};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vertex {
    #[serde(with = "crate::rat::rat_str")]
    pub t: Rat,
    /// `(t, c_1 f_1, ..., c_N f_N)` evaluated at `t` or as a left limit.
    #[serde(with = "crate::rat::rat_vec_str")]
    pub coords: Vec<Rat>,
    /// Ends a vertical connector (same `t` as the previous vertex).
    pub vertical: bool,
}

/// `gamma_N`: on each level-`N` cell `[a, b)` the segments
/// `f(a) -> f(mid) -> f(b-)`, then the vertical connector `f(b-) -> f(b)`.
/// The last connector ends at `f(1) = (1, 0, ..., 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonalCurve {
    level: usize,
    coeffs: Vec<Rat>,
    grid: Vec<u64>,
    vertices: Vec<Vertex>,
}

impl PolygonalCurve {
    pub fn level(&self) -> usize {
        self.level
    }

    /// `c_0 = 1, c_1, ..., c_N`
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn grid(&self) -> &[u64] {
        &self.grid
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn cells(&self) -> u64 {
        self.grid[self.level]
    }

    /// Embedded point of the truncated set at `t in [0, 1]`, taking
    /// `f(1) = (1, 0, ..., 0)`.
    pub(crate) fn point(&self, t: &Rat) -> Vec<Rat> {
        if t == &Rat::one() {
            let mut v = vec![Rat::zero(); self.level + 1];
            v[0] = Rat::one();
            return v;
        }
        (0..=self.level)
            .map(|k| &self.coeffs[k] * f_raw(k, &int(self.grid[k]), t))
            .collect()
    }

    /// Embedded left limit at `t in (0, 1]`.
    pub(crate) fn left_point(&self, t: &Rat) -> Vec<Rat> {
        (0..=self.level)
            .map(|k| &self.coeffs[k] * f_left_raw(k, &int(self.grid[k]), t))
            .collect()
    }

    /// Exact test that `p` lies on one of the two slanted segments over the
    /// cell containing `p[0]`.
    pub fn contains_point(&self, p: &[Rat]) -> bool {
        if p.len() != self.level + 1 {
            return false;
        }
        let t = &p[0];
        if t < &Rat::zero() || t >= &Rat::one() {
            return false;
        }
        let cells = int(self.cells());
        let j = (t * &cells).floor();
        let base = 3 * j.to_integer().try_into().unwrap_or(0usize);
        let mid = (&j + rat(1, 2)) / &cells;
        let (a, b) = if t < &mid {
            (&self.vertices[base], &self.vertices[base + 1])
        } else {
            (&self.vertices[base + 1], &self.vertices[base + 2])
        };
        on_segment(&a.coords, &b.coords, p)
    }

    /// CSV with `vertex_index, t, coord_0..coord_N, is_vertical` and float
    /// copies of `t` and the coordinates.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.level;
        let mut header = vec!["vertex_index".to_string(), "t".to_string()];
        header.extend((0..=n).map(|k| format!("coord_{k}")));
        header.push("is_vertical".into());
        header.push("t_f64".into());
        header.extend((0..=n).map(|k| format!("coord_{k}_f64")));
        writeln!(w, "{}", header.join(","))?;
        for (i, v) in self.vertices.iter().enumerate() {
            let mut row = vec![i.to_string(), fmt_rat(&v.t)];
            row.extend(v.coords.iter().map(fmt_rat));
            row.push(v.vertical.to_string());
            row.push(to_f64(&v.t).to_string());
            row.extend(v.coords.iter().map(|c| to_f64(c).to_string()));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn on_segment(a: &[Rat], b: &[Rat], p: &[Rat]) -> bool {
    let span = &b[0] - &a[0];
    if span.is_zero() {
        return false;
    }
    let lambda = (&p[0] - &a[0]) / span;
    if lambda.is_negative() || lambda > Rat::one() {
        return false;
    }
    a.iter()
        .zip(b)
        .zip(p)
        .all(|((x, y), z)| &(x + &lambda * (y - x)) == z)
}

/// Checks the preconditions of the polygon construction.
fn check_curve_params(params: &ParameterSet, level: usize) -> Result<()> {
    params.check_level(level)?;
    if params.model != Model::L1 {
        return Err(Error::Precondition("polygonal curves live in the L1 model".into()));
    }
    if let Some(n) = (1..=level).find(|&n| !params.m(n).is_multiple_of(2)) {
        return Err(Error::Precondition(format!("m_{n} = {} is odd", params.m(n))));
    }
    let total = params.alpha.partial_sum(params.n_max)? + params.alpha.tail_l1(params.n_max)?.hi;
    if total >= Rat::one() {
        return Err(Error::Precondition(format!(
            "sum of coefficients is not certified below 1 (upper bound {total})"
        )));
    }
    Ok(())
}

pub fn build_gamma(params: &ParameterSet, level: usize, budget: u64, exec: Exec) -> Result<PolygonalCurve> {
    check_curve_params(params, level)?;
    let grid = params.grid_sizes_u64(level)?;
    let cells = grid[level];
    let count = cells.checked_mul(3).and_then(|c| c.checked_add(1));
    if count.is_none_or(|c| c > budget) {
        return Err(Error::BudgetExceeded {
            what: "curve vertices",
            required: (int(cells) * int(3) + int(1)).to_string(),
            budget,
        });
    }
    let mut curve = PolygonalCurve {
        level,
        coeffs: params.alphas()[..=level].to_vec(),
        grid,
        vertices: Vec::new(),
    };
    let width = Rat::new(1.into(), cells.into());
    let per_cell = exec.map_range(0..cells, |j| {
        let a = int(j) * &width;
        let mid = &a + &width / int(2);
        let b = &a + &width;
        [
            Vertex {
                vertical: j > 0,
                coords: curve.point(&a),
                t: a,
            },
            Vertex {
                vertical: false,
                coords: curve.point(&mid),
                t: mid,
            },
            Vertex {
                vertical: false,
                coords: curve.left_point(&b),
                t: b,
            },
        ]
    });
    let mut vertices: Vec<Vertex> = per_cell.into_iter().flatten().collect();
    vertices.push(Vertex {
        t: Rat::one(),
        coords: curve.point(&Rat::one()),
        vertical: true,
    });
    curve.vertices = vertices;
    Ok(curve)
}

/// l1 length: total variation of every coordinate along the polygon.
pub fn curve_length(curve: &PolygonalCurve) -> Rat {
    curve
        .vertices
        .windows(2)
        .map(|w| {
            w[0].coords
                .iter()
                .zip(&w[1].coords)
                .fold(Rat::zero(), |acc, (x, y)| acc + abs(&(y - x)))
        })
        .fold(Rat::zero(), |a, b| a + b)
}

/// `length(gamma_n) - length(gamma_{n-1})` for curves built from the same
/// parameters at consecutive levels.
pub fn length_increment_between(prev: &PolygonalCurve, next: &PolygonalCurve) -> Result<Rat> {
    if next.level != prev.level + 1
        || next.coeffs[..=prev.level] != prev.coeffs[..]
        || next.grid[..=prev.level] != prev.grid[..]
    {
        return Err(Error::Precondition(
            "curves must come from the same parameters at consecutive levels".into(),
        ));
    }
    Ok(curve_length(next) - curve_length(prev))
}

pub fn length_increment(params: &ParameterSet, n: usize, budget: u64, exec: Exec) -> Result<Rat> {
    if n == 0 {
        return Err(Error::Precondition("increments start at level 1".into()));
    }
    let prev = build_gamma(params, n - 1, budget, exec)?;
    let next = build_gamma(params, n, budget, exec)?;
    length_increment_between(&prev, &next)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub n: usize,
    #[serde(with = "crate::rat::rat_str")]
    pub length: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub increment: Rat,
    /// `3/2 |c_n|`
    #[serde(with = "crate::rat::rat_str")]
    pub bound: Rat,
    /// `sup_s |gamma_n(s) - gamma_{n-1}(s)|_1` under the canonical common parametrization.
    #[serde(with = "crate::rat::rat_str")]
    pub sup_distance: Rat,
    pub holds: bool,
}

/// Lengths of `gamma_0, ..., gamma_N` with per-level increments and
/// distances checked against `3/2 |c_n|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthLedger {
    #[serde(with = "crate::rat::rat_str")]
    pub base_length: Rat,
    pub entries: Vec<LedgerEntry>,
    /// `length(gamma_N) == 1 + sum of increments`
    pub sums_match: bool,
}

impl LengthLedger {
    pub fn holds(&self) -> bool {
        self.sums_match && self.entries.iter().all(|e| e.holds)
    }
}

pub fn length_ledger(params: &ParameterSet, level: usize, budget: u64, exec: Exec) -> Result<LengthLedger> {
    let mut prev = build_gamma(params, 0, budget, exec)?;
    let base_length = curve_length(&prev);
    let mut entries = Vec::with_capacity(level);
    let mut sum = Rat::zero();
    for n in 1..=level {
        let next = build_gamma(params, n, budget, exec)?;
        let increment = length_increment_between(&prev, &next)?;
        let tau = Tau::canonical(next.cells());
        let dist = sup_distance(&parametrize(&next, &tau)?, &parametrize(&prev, &tau)?, exec)?;
        let bound = rat(3, 2) * abs(params.alpha(n));
        sum += &increment;
        entries.push(LedgerEntry {
            n,
            length: curve_length(&next),
            holds: increment <= bound && dist <= bound,
            increment,
            bound,
            sup_distance: dist,
        });
        prev = next;
    }
    let last = entries.last().map_or(base_length.clone(), |e| e.length.clone());
    Ok(LengthLedger {
        sums_match: last == Rat::one() + sum,
        base_length,
        entries,
    })
}

/// Checks that `truncated_point(t)` lies on `gamma_N` for each `t`.
/// Returns the first failing `t`.
pub fn check_containment(params: &ParameterSet, curve: &PolygonalCurve, ts: &[Rat]) -> Result<Option<Rat>> {
    for t in ts {
        let p = truncated_point(params, curve.level, t)?.embedded(params);
        if !curve.contains_point(&p) {
            return Ok(Some(t.clone()));
        }
    }
    Ok(None)
}
