use num::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rat::{int, rat, Rat};

use super::ParameterSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Half {
    Left,
    Right,
}

/// `[(k-1)/M_n, k/M_n)` at level `n`, optionally restricted to one half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridCell {
    pub level: usize,
    /// 1-based, `1 <= index <= count`.
    pub index: u64,
    pub half: Option<Half>,
    /// `M_n`
    pub count: u64,
}

impl GridCell {
    pub fn new(level: usize, index: u64, count: u64) -> Self {
        debug_assert!(index >= 1 && index <= count);
        GridCell {
            level,
            index,
            half: None,
            count,
        }
    }

    pub fn left(&self) -> Rat {
        let base = rat(self.index as i64 - 1, 1) / int(self.count);
        match self.half {
            Some(Half::Right) => base + rat(1, 2) / int(self.count),
            _ => base,
        }
    }

    pub fn right(&self) -> Rat {
        let end = int(self.index) / int(self.count);
        match self.half {
            Some(Half::Left) => end - rat(1, 2) / int(self.count),
            _ => end,
        }
    }

    pub fn length(&self) -> Rat {
        self.right() - self.left()
    }

    pub fn midpoint(&self) -> Rat {
        (self.left() + self.right()) / int(2)
    }

    /// Half-open containment.
    pub fn contains(&self, t: &Rat) -> bool {
        &self.left() <= t && t < &self.right()
    }

    pub fn halves(&self) -> [GridCell; 2] {
        [
            GridCell {
                half: Some(Half::Left),
                ..*self
            },
            GridCell {
                half: Some(Half::Right),
                ..*self
            },
        ]
    }

    pub fn whole(&self) -> GridCell {
        GridCell { half: None, ..*self }
    }
}

/// All cells of level `n`, in index order.
pub fn grid_cells(params: &ParameterSet, n: usize) -> Result<impl Iterator<Item = GridCell>> {
    let count = params.grid_size_u64(n)?;
    Ok((1..=count).map(move |k| GridCell::new(n, k, count)))
}

/// The level-`n` cell containing `t`, with `half` set to the half containing it.
pub fn cell_of(params: &ParameterSet, t: &Rat, n: usize) -> Result<GridCell> {
    if t < &Rat::zero() || t >= &int(1) {
        return Err(Error::out_of_domain("t", t, "[0, 1)"));
    }
    let count = params.grid_size_u64(n)?;
    let scaled = t * int(count);
    let k = scaled.floor().to_integer().to_u64().expect("in range") + 1;
    let cell = GridCell::new(n, k, count);
    let half = if scaled - int(k - 1) < rat(1, 2) {
        Half::Left
    } else {
        Half::Right
    };
    Ok(GridCell {
        half: Some(half),
        ..cell
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_of_examples() {
        let p = ParameterSet::d1();
        let c = cell_of(&p, &rat(3, 8), 1).unwrap();
        assert_eq!((c.index, c.count), (1, 2));
        assert_eq!(c.whole().left(), rat(0, 1));
        assert_eq!(c.whole().right(), rat(1, 2));

        let c = cell_of(&p, &rat(3, 8), 2).unwrap();
        assert_eq!((c.index, c.count), (4, 8));
        assert_eq!(c.whole().left(), rat(3, 8));
        assert_eq!(c.half, Some(Half::Left));

        assert!(cell_of(&p, &rat(1, 1), 2).is_err());
        assert!(cell_of(&p, &rat(-1, 3), 2).is_err());
    }

    #[test]
    fn cells_partition_unit_interval() {
        let p = ParameterSet::d1();
        for n in 0..=5 {
            let cells: Vec<_> = grid_cells(&p, n).unwrap().collect();
            assert_eq!(cells.len() as u64, p.grid_size_u64(n).unwrap());
            let total = cells.iter().fold(Rat::zero(), |a, c| a + c.length());
            assert_eq!(total, int(1));
            for w in cells.windows(2) {
                assert_eq!(w[0].right(), w[1].left());
            }
        }
    }

    #[test]
    fn refinement_is_m_fold() {
        let p = ParameterSet::d1();
        for n in 0..4 {
            let coarse: Vec<_> = grid_cells(&p, n).unwrap().collect();
            let fine: Vec<_> = grid_cells(&p, n + 1).unwrap().collect();
            let m = p.m(n + 1) as usize;
            for (i, c) in coarse.iter().enumerate() {
                let kids = &fine[i * m..(i + 1) * m];
                assert_eq!(kids[0].left(), c.left());
                assert_eq!(kids[m - 1].right(), c.right());
            }
        }
    }

    #[test]
    fn halves_have_half_length() {
        let p = ParameterSet::d1();
        let c = cell_of(&p, &rat(1, 3), 3).unwrap().whole();
        for h in c.halves() {
            assert_eq!(h.length(), rat(1, 96));
        }
    }
}
