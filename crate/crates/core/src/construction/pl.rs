use std::io::{self, Write};
use std::ops::Range;

use num::{BigInt, Integer, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::rat::{fmt_rat, int, to_f64, Rat};

use super::components::f_raw;
use super::Functional;

/// One half-grid cell `[i/(2M_N), (i+1)/(2M_N))` of a [`PlFunction`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub index: u64,
    pub left: Rat,
    pub slope: Rat,
    pub left_value: Rat,
    /// Downward jump arriving at `left` from the previous piece; zero for
    /// the first piece.
    pub jump_at_left: Rat,
}

/// `h_N(t) = sum_{n <= N} c_n f_n(t)` as an exact piecewise-linear function.
///
/// Every `f_n`, `n <= N`, is affine on each half-grid cell of level `N`,
/// and at the half-grid points `t = i/(2 M_N)` the scaled value
/// `2 M_N f_n(t)` is the integer `max(0, (i mod q_n) - q_n/2)` with
/// `q_n = 2 M_N / M_n`. Pieces are therefore computed directly from
/// integer numerators over the common denominator `D 2 M_N`, where `D`
/// clears the coefficient denominators.
#[derive(Debug, Clone, PartialEq)]
pub struct PlFunction {
    level: usize,
    coeffs: Vec<Rat>,
    grid: Vec<u64>,
    /// `q_n = 2 M_N / M_n`
    periods: Vec<u64>,
    denom: BigInt,
    scaled: Vec<BigInt>,
}

impl PlFunction {
    /// `grid` holds `M_0 = 1, ..., M_N`, each dividing the next.
    pub fn new(grid: Vec<u64>, coeffs: Vec<Rat>) -> Result<Self> {
        if grid.is_empty() || grid.len() != coeffs.len() || grid[0] != 1 {
            return Err(Error::InvalidParams(
                "grid must start at M_0 = 1 and match the coefficient count".into(),
            ));
        }
        if grid.windows(2).any(|w| w[0] == 0 || w[1] % w[0] != 0) {
            return Err(Error::InvalidParams("grid sizes must divide each other".into()));
        }
        let top = *grid.last().expect("nonempty");
        let twice = top
            .checked_mul(2)
            .ok_or_else(|| Error::InvalidParams("grid too fine".into()))?;
        let periods = grid.iter().map(|m| twice / m).collect();
        let denom = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled = coeffs
            .iter()
            .map(|c| c.numer() * (&denom / c.denom()))
            .collect();
        Ok(PlFunction {
            level: grid.len() - 1,
            coeffs,
            grid,
            periods,
            denom,
            scaled,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn grid(&self) -> &[u64] {
        &self.grid
    }

    /// `2 M_N`
    pub fn piece_count(&self) -> u64 {
        self.periods[0]
    }

    /// Denominator shared by all image endpoints from [`Self::scaled_image`].
    pub fn image_denominator(&self) -> BigInt {
        &self.denom * self.piece_count()
    }

    /// `2 M_N f_n(i / (2 M_N))`
    fn scaled_component(&self, n: usize, i: u64) -> u64 {
        if n == 0 {
            return i;
        }
        let q = self.periods[n];
        (i % q).saturating_sub(q / 2)
    }

    /// Numerators of `h(left)` (over `D 2 M_N`) and of the slope (over `D`).
    fn scaled_piece(&self, i: u64) -> (BigInt, BigInt) {
        let mut value = BigInt::zero();
        let mut slope = self.scaled[0].clone();
        for n in 0..=self.level {
            let c = self.scaled_component(n, i);
            if c != 0 {
                value += &self.scaled[n] * c;
            }
            if n > 0 {
                let q = self.periods[n];
                if i % q >= q / 2 {
                    slope += &self.scaled[n];
                }
            }
        }
        (value, slope)
    }

    /// Image of piece `i` as `[lo, hi]` numerators over [`Self::image_denominator`].
    pub fn scaled_image(&self, i: u64) -> (BigInt, BigInt) {
        let (v, s) = self.scaled_piece(i);
        let w = &v + &s;
        if v <= w {
            (v, w)
        } else {
            (w, v)
        }
    }

    pub fn piece(&self, i: u64) -> Piece {
        assert!(i < self.piece_count(), "piece index out of range");
        let (v, s) = self.scaled_piece(i);
        let mut jump = BigInt::zero();
        if i > 0 {
            for n in 1..=self.level {
                let q = self.periods[n];
                if i.is_multiple_of(q) {
                    jump += &self.scaled[n] * (q / 2);
                }
            }
        }
        let two_m = int(self.piece_count());
        let den = Rat::from_integer(self.image_denominator());
        Piece {
            index: i,
            left: int(i) / two_m,
            slope: Rat::new(s, self.denom.clone()),
            left_value: Rat::from_integer(v) / &den,
            jump_at_left: Rat::from_integer(jump) / den,
        }
    }

    /// Lazily enumerates pieces in index order.
    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        self.pieces_in(0..self.piece_count())
    }

    pub fn pieces_in(&self, range: Range<u64>) -> impl Iterator<Item = Piece> + '_ {
        range.map(move |i| self.piece(i))
    }

    /// Value at `t in [0, 1)` from the containing piece.
    pub fn eval(&self, t: &Rat) -> Result<Rat> {
        if t < &Rat::zero() || t >= &Rat::one() {
            return Err(Error::out_of_domain("t", t, "[0, 1)"));
        }
        let i = (t * int(self.piece_count()))
            .floor()
            .to_integer()
            .to_u64()
            .expect("in range");
        let p = self.piece(i);
        Ok(&p.left_value + &p.slope * (t - &p.left))
    }

    /// `sum_n c_n f_n(t)` evaluated term by term.
    pub fn eval_direct(&self, t: &Rat) -> Rat {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * f_raw(n, &int(self.grid[n]), t))
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// CSV with exact `p/q` columns followed by float approximations.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "piece_index,left_endpoint,slope,left_value,jump_at_left,\
             left_endpoint_f64,slope_f64,left_value_f64,jump_at_left_f64"
        )?;
        for p in self.pieces() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                p.index,
                fmt_rat(&p.left),
                fmt_rat(&p.slope),
                fmt_rat(&p.left_value),
                fmt_rat(&p.jump_at_left),
                to_f64(&p.left),
                to_f64(&p.slope),
                to_f64(&p.left_value),
                to_f64(&p.jump_at_left),
            )?;
        }
        Ok(())
    }
}

/// Truncation of `functional` at level `N` on the grids of `params`.
///
/// Refuses when `2 M_N` exceeds `budget`.
pub fn build_pl(
    params: &ParameterSet,
    functional: &Functional,
    level: usize,
    budget: u64,
) -> Result<PlFunction> {
    params.check_level(level)?;
    let pieces = params.grid_size(level) * 2u32;
    if pieces > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            what: "piecewise-linear function",
            required: pieces.to_string(),
            budget,
        });
    }
    PlFunction::new(params.grid_sizes_u64(level)?, functional.coeffs(level)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn f1_pl(level: usize) -> PlFunction {
        build_pl(&ParameterSet::d1(), &Functional::f1(), level, crate::DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn f1_level_one_pieces() {
        let pl = f1_pl(1);
        let pieces: Vec<_> = pl.pieces().collect();
        assert_eq!(pieces.len(), 4);
        let slopes: Vec<_> = pieces.iter().map(|p| p.slope.clone()).collect();
        assert_eq!(slopes, vec![rat(1, 2), rat(3, 4), rat(1, 2), rat(3, 4)]);
        let values: Vec<_> = pieces.iter().map(|p| p.left_value.clone()).collect();
        assert_eq!(values, vec![rat(0, 1), rat(1, 8), rat(1, 4), rat(3, 8)]);
        // f_1 drops by 1/4 at t = 1/2, weighted by 1/4
        assert_eq!(pieces[2].jump_at_left, rat(1, 16));
        assert_eq!(pieces[1].jump_at_left, rat(0, 1));
    }

    #[test]
    fn f1_level_two_spot_value() {
        let pl = f1_pl(2);
        assert_eq!(pl.piece_count(), 16);
        assert_eq!(pl.eval(&rat(3, 8)).unwrap(), rat(7, 32));
        assert_eq!(pl.eval_direct(&rat(3, 8)), rat(7, 32));
    }

    #[test]
    fn identity_has_no_jumps() {
        let p = ParameterSet::d1();
        for level in 0..=3 {
            let pl = build_pl(&p, &Functional::identity(), level, 1 << 20).unwrap();
            for piece in pl.pieces() {
                assert_eq!(piece.slope, rat(1, 1));
                assert!(piece.jump_at_left.is_zero());
                assert_eq!(piece.left_value, piece.left);
            }
        }
    }

    #[test]
    fn jumps_reconcile_neighbouring_pieces() {
        let pl = f1_pl(3);
        let len = Rat::one() / int(pl.piece_count());
        let pieces: Vec<_> = pl.pieces().collect();
        for w in pieces.windows(2) {
            let right_limit = &w[0].left_value + &w[0].slope * &len;
            assert_eq!(right_limit - &w[1].jump_at_left, w[1].left_value);
        }
    }

    #[test]
    fn budget_refusal_reports_count() {
        let err = build_pl(&ParameterSet::d1(), &Functional::f1(), 6, 1000).unwrap_err();
        match err {
            Error::BudgetExceeded { required, .. } => assert_eq!(required, "92160"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        f1_pl(1).write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("1,1/4,3/4,1/8,0/1,"));
    }
}
