use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::params::{Model, ParameterSet};
use crate::rat::{int, sqrt_enclosure, Enclosure, Rat};

/// Upper bound on `sum_{I in grid n} diam f(I)` from per-coordinate
/// oscillations of the level-`N` truncation plus the truncation tail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringBound {
    pub model: Model,
    pub level: usize,
    pub grid_level: usize,
    pub cells: u64,
    /// Enclosure of the oscillation bound summed over cells, truncated part only.
    pub truncated: Enclosure,
    /// `truncated.hi + 2 cells tail`
    #[serde(with = "crate::rat::rat_str")]
    pub upper: Rat,
    /// Upper end of the enclosure of `K`.
    #[serde(with = "crate::rat::rat_str")]
    pub k_upper: Rat,
    pub holds: bool,
}

/// Covering sum over the cells of grid level `n` for the set cut at level `N`.
///
/// On a level-`n` cell `I`, `f_0` moves by `|I|`; each `f_k`, `1 <= k < n`,
/// is affine with slope 0 or 1 (so moves by 0 or `|I|`); `f_n` moves by
/// `|I|/2`; and `f_k`, `k > n`, sweeps `[0, 1/(2 M_k))`.
pub fn hausdorff_upper(
    params: &ParameterSet,
    level: usize,
    grid_level: usize,
    budget: u64,
    exec: Exec,
) -> Result<CoveringBound> {
    params.check_level(level)?;
    if grid_level > level {
        return Err(Error::Precondition(format!(
            "grid level {grid_level} exceeds truncation level {level}"
        )));
    }
    let cells = params.grid_size_u64(grid_level)?;
    if cells > budget {
        return Err(Error::BudgetExceeded {
            what: "covering cells",
            required: cells.to_string(),
            budget,
        });
    }
    let sizes = params.grid_sizes_u64(grid_level)?;
    let model = params.model;
    let weight = |k: usize| -> Rat {
        let a = params.alpha(k);
        match model {
            Model::L1 => a.clone(),
            Model::L2 => a * a,
        }
    };
    let osc = |x: Rat| -> Rat {
        match model {
            Model::L1 => x,
            Model::L2 => &x * &x,
        }
    };
    let cell_len = Rat::new(1.into(), int(cells).to_integer());
    // contribution of f_n and of the finer coordinates, shared by all cells
    let mut common = Rat::zero();
    if grid_level >= 1 {
        common += weight(grid_level) * osc(&cell_len / int(2));
    }
    for k in grid_level + 1..=level {
        common += weight(k) * osc(Rat::one() / (int(2) * params.grid_rat(k)));
    }
    let unit = osc(cell_len.clone());
    let rising: Vec<(u64, Rat)> = (1..grid_level)
        .map(|k| (cells / sizes[k], weight(k)))
        .collect();

    let chunks = Exec::chunks(cells, 4096);
    let partial = exec.map_slice(&chunks, |r| {
        let mut counts: BTreeMap<Rat, u64> = BTreeMap::new();
        for i in r.clone() {
            let mut w = Rat::one();
            for (q, wk) in &rising {
                if i % q >= q / 2 {
                    w += wk;
                }
            }
            *counts.entry(w).or_default() += 1;
        }
        counts
    });
    let mut counts: BTreeMap<Rat, u64> = BTreeMap::new();
    for c in partial {
        for (k, v) in c {
            *counts.entry(k).or_default() += v;
        }
    }

    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for (w, count) in counts {
        let value = &unit * w + &common;
        let d = match model {
            Model::L1 => Enclosure::exact(value),
            Model::L2 => sqrt_enclosure(&value, params.sqrt_bits),
        };
        lo += &d.lo * int(count);
        hi += &d.hi * int(count);
    }
    let tail = params.truncation_tail(level)?;
    let upper = &hi + int(2) * int(cells) * &tail.hi;
    let k_upper = params.k_enclosure()?.hi;
    Ok(CoveringBound {
        model,
        level,
        grid_level,
        cells,
        truncated: Enclosure::new(lo, hi),
        holds: upper <= k_upper,
        upper,
        k_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{MRule, SequenceRule};
    use crate::rat::rat;
    use crate::DEFAULT_BUDGET;

    #[test]
    fn single_cell_is_below_k() {
        let b = hausdorff_upper(&ParameterSet::d1(), 6, 0, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(b.cells, 1);
        assert!(b.holds);
        assert!(b.k_upper < rat(12, 10));
    }

    #[test]
    fn flat_parameters_cover_with_length_one() {
        let p = ParameterSet::new(SequenceRule::zero(), MRule::Linear { c: 2 }, 5, Model::L2).unwrap();
        for n in 0..=4 {
            let b = hausdorff_upper(&p, 5, n, DEFAULT_BUDGET, Exec::Sequential).unwrap();
            assert_eq!(b.upper, rat(1, 1));
            assert_eq!(b.truncated, Enclosure::exact(rat(1, 1)));
        }
    }

    #[test]
    fn d1_mid_level() {
        let p = ParameterSet::d1();
        let b = hausdorff_upper(&p, 6, 3, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert!(b.holds, "{} > {}", b.upper, b.k_upper);
        let c = hausdorff_upper(&p, 6, 3, DEFAULT_BUDGET, Exec::Parallel).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn l1_sum_is_exact() {
        // one coordinate, alpha_1 = 1/2, m_1 = 2, n = 1, N = 1:
        // per cell 1/2 + (1/2)(1/4), two cells
        let p = ParameterSet::new(
            SequenceRule::Explicit { values: vec![rat(1, 2)], tail_l1: Some(rat(0, 1)), tail_l2sq: Some(rat(0, 1)) },
            MRule::Constant { c: 2 },
            1,
            Model::L1,
        )
        .unwrap();
        let b = hausdorff_upper(&p, 1, 1, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(b.truncated, Enclosure::exact(rat(5, 4)));
    }
}
