//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num::{BigInt, One, Zero};
use rand::Rng;
use unrect_core::rat::{rat, Rat};

pub fn saw(x: &Rat) -> Rat {
    let f = x - x.floor();
    if f < rat(1, 2) {
        Rat::zero()
    } else {
        f - rat(1, 2)
    }
}

/// `f_n(t)` straight from the definition; `big` is `M_n`.
pub fn f_direct(n: usize, big: u64, t: &Rat) -> Rat {
    if n == 0 {
        return t.clone();
    }
    let m = Rat::from_integer(BigInt::from(big));
    saw(&(&m * t)) / m
}

pub fn h_direct(grid: &[u64], coeffs: &[Rat], t: &Rat) -> Rat {
    coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c * f_direct(n, grid[n], t))
        .fold(Rat::zero(), |a, b| a + b)
}

/// Image measure by brute force: each piece's image from direct values at
/// its left end and midpoint (the piece is affine), then repeated
/// pairwise merging of overlapping intervals until none overlap.
pub fn oracle_image_measure(grid: &[u64], coeffs: &[Rat]) -> Rat {
    let pieces = 2 * grid[grid.len() - 1];
    let width = Rat::new(BigInt::one(), BigInt::from(pieces));
    let mut ivs: Vec<(Rat, Rat)> = (0..pieces)
        .map(|i| {
            let left = Rat::from_integer(BigInt::from(i)) * &width;
            let mid = &left + &width / Rat::from_integer(BigInt::from(2));
            let vl = h_direct(grid, coeffs, &left);
            let vm = h_direct(grid, coeffs, &mid);
            let vr = Rat::from_integer(BigInt::from(2)) * vm - &vl;
            if vl <= vr {
                (vl, vr)
            } else {
                (vr, vl)
            }
        })
        .collect();
    'outer: loop {
        for i in 0..ivs.len() {
            for j in i + 1..ivs.len() {
                let (a, b) = (&ivs[i], &ivs[j]);
                if a.0 <= b.1 && b.0 <= a.1 {
                    let lo = a.0.clone().min(b.0.clone());
                    let hi = a.1.clone().max(b.1.clone());
                    ivs[i] = (lo, hi);
                    ivs.swap_remove(j);
                    continue 'outer;
                }
            }
        }
        break;
    }
    ivs.iter().fold(Rat::zero(), |s, (a, b)| s + (b - a))
}

/// Grid `1, M_1, ..., M_N` with `2 M_N <= 64`, and signed coefficients.
pub fn random_pl_input(rng: &mut impl Rng) -> (Vec<u64>, Vec<Rat>) {
    let mut grid = vec![1u64];
    let levels = rng.random_range(0..=4);
    for _ in 0..levels {
        let m = rng.random_range(1..=4u64);
        let next = grid[grid.len() - 1] * m;
        if next > 32 {
            break;
        }
        grid.push(next);
    }
    let coeffs = grid
        .iter()
        .map(|_| rat(rng.random_range(-8..=8), rng.random_range(1..=8)))
        .collect();
    (grid, coeffs)
}
