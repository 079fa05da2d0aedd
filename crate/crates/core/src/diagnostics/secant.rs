use num::{One, Signed, Zero};
use serde::Serialize;

use crate::construction::f_component;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::params::{Model, ParameterSet};
use crate::rat::{abs, int, sqrt_enclosure, Rat};
use crate::sampling::{stream, uniform_index, uniform_rat, GENERATOR};

use super::events::in_event;

/// A pair `t0, tn` in neighbouring level-`n` cells where coordinate `n`
/// carries a large share of the chord.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecantWitness {
    pub n: usize,
    #[serde(with = "crate::rat::rat_str")]
    pub t0: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub tn: Rat,
    /// `alpha_k (f_k(tn) - f_k(t0))` for `k <= n_max`.
    #[serde(with = "crate::rat::rat_vec_str")]
    pub delta_coords: Vec<Rat>,
    /// `(alpha_n |f_n(tn) - f_n(t0)|)^2 / |delta_coords|^2`
    #[serde(with = "crate::rat::rat_str")]
    pub ratio_sq_truncated: Rat,
    /// Same ratio against an upper bound for the full chord, coordinates
    /// past `n_max` included.
    #[serde(with = "crate::rat::rat_str")]
    pub ratio_sq: Rat,
}

/// `round(t0 M_n) / M_n` as a grid index.
fn nearest_index(params: &ParameterSet, n: usize, t0: &Rat) -> Rat {
    (t0 * params.grid_rat(n)).round()
}

/// Deterministic witness for `t0 in A_n`, or `None` when `t0` is outside
/// `A_n` or its nearest level-`n` grid point lies on the level-`(n-1)` grid.
pub fn secant_witness(params: &ParameterSet, t0: &Rat, n: usize) -> Result<Option<SecantWitness>> {
    if params.model != Model::L2 {
        return Err(Error::Precondition("secant witnesses use the L2 model".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("level must be at least 1".into()));
    }
    params.check_level(n)?;
    if t0.is_negative() || t0 >= &Rat::one() {
        return Err(Error::out_of_domain("t0", t0, "[0, 1)"));
    }
    let a = params.alpha(n).clone();
    if a.is_zero() || !in_event(params, n, t0) {
        return Ok(None);
    }
    let j = nearest_index(params, n, t0);
    let m_n = params.m(n);
    let j_int = j.to_integer();
    if (&j_int % m_n).is_zero() {
        return Ok(None);
    }
    let grid = params.grid_rat(n);
    let beta = &j / &grid;
    let tn = if t0 < &beta { beta.clone() } else { &beta - &a / &grid };
    let mut delta = Vec::with_capacity(params.n_max + 1);
    for k in 0..=params.n_max {
        let d = f_component(params, k, &tn)? - f_component(params, k, t0)?;
        delta.push(params.alpha(k) * d);
    }
    let norm_sq = delta.iter().fold(Rat::zero(), |s, d| s + d * d);
    let gap = abs(&delta[n]);
    let gap_sq = &gap * &gap;
    // beyond n_max each coordinate differs by at most alpha_k / (2 M_k)
    let tail = params.truncation_tail(params.n_max)?.hi;
    let norm_hi = sqrt_enclosure(&norm_sq, params.sqrt_bits).hi + tail;
    Ok(Some(SecantWitness {
        n,
        t0: t0.clone(),
        tn,
        delta_coords: delta,
        ratio_sq_truncated: &gap_sq / &norm_sq,
        ratio_sq: gap_sq / (&norm_hi * &norm_hi),
    }))
}

/// `1 / (64 K^2)` with the upper enclosure of `K^2`.
pub fn secant_threshold(params: &ParameterSet) -> Result<Rat> {
    Ok(Rat::one() / (int(64) * params.k_squared()?.hi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecantReport {
    pub generator: &'static str,
    pub seed: u64,
    pub n: usize,
    /// Eligible samples evaluated.
    pub samples: u64,
    /// Candidates drawn to reach `samples` eligible ones.
    pub drawn: u64,
    pub successes: u64,
    #[serde(with = "crate::rat::rat_str")]
    pub threshold: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub min_ratio_sq: Rat,
    /// At least 90% of the samples meet the threshold.
    pub passed: bool,
}

/// Draws `t0` uniformly from `A_n` (a uniform grid point `j / M_n`,
/// `0 < j < M_n`, plus a uniform offset of size at most `alpha_n / M_n`)
/// until `samples` eligible points are found.
pub fn secant_sampler(
    params: &ParameterSet,
    n: usize,
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<SecantReport> {
    params.check_level(n)?;
    let cells = params.grid_size_u64(n)?;
    if cells < 2 || params.alpha(n).is_zero() {
        return Err(Error::Precondition(format!("A_{n} has no eligible points")));
    }
    let m_n = params.m(n);
    let grid = params.grid_rat(n);
    let radius = params.alpha(n) / &grid;
    let draw = |i: u64| -> (u64, Rat) {
        let mut rng = stream(seed, i);
        let j = uniform_index(&mut rng, 1, cells - 1);
        let off = uniform_rat(&mut rng, &-&radius, &radius);
        (j, int(j) / &grid + off)
    };
    let mut picked = Vec::with_capacity(samples as usize);
    let mut drawn = 0u64;
    while (picked.len() as u64) < samples {
        let (j, t0) = draw(drawn);
        drawn += 1;
        if j % m_n != 0 && t0 < Rat::one() {
            picked.push(t0);
        }
        if drawn > samples.saturating_mul(1000) {
            return Err(Error::Precondition(format!("too few eligible points in A_{n}")));
        }
    }
    let threshold = secant_threshold(params)?;
    let results = exec.map_slice(&picked, |t0| secant_witness(params, t0, n));
    let mut successes = 0;
    let mut min_ratio: Option<Rat> = None;
    for r in results {
        let w = r?.ok_or_else(|| Error::Precondition("sampled point lost eligibility".into()))?;
        if w.ratio_sq >= threshold {
            successes += 1;
        }
        if min_ratio.as_ref().is_none_or(|m| &w.ratio_sq < m) {
            min_ratio = Some(w.ratio_sq);
        }
    }
    Ok(SecantReport {
        generator: GENERATOR,
        seed,
        n,
        samples,
        drawn,
        successes,
        passed: successes * 10 >= samples * 9,
        threshold,
        min_ratio_sq: min_ratio.unwrap_or_else(Rat::zero),
    })
}
