use serde::Serialize;

use crate::construction::f_component;
use crate::error::Result;
use crate::exec::Exec;
use crate::params::{GridCell, ParameterSet};
use crate::rat::{abs, Rat};
use crate::sampling::{stream, uniform_index, uniform_rat, GENERATOR};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OscillationFailure {
    pub level: usize,
    pub k: usize,
    #[serde(with = "crate::rat::rat_str")]
    pub t: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub u: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OscillationReport {
    pub generator: &'static str,
    pub seed: u64,
    pub pairs: u64,
    pub max_level: usize,
    pub max_k: usize,
    /// Largest `|f_k(t) - f_k(u)| / |I|` seen.
    #[serde(with = "crate::rat::rat_str")]
    pub worst_ratio: Rat,
    pub failures: Vec<OscillationFailure>,
    pub passed: bool,
}

/// Samples pairs `t, u` from a common level-`n` cell `I` (`n <= max_level`)
/// and checks `|f_k(t) - f_k(u)| <= |I|` for every `k <= max_k`.
pub fn oscillation_sweep(
    params: &ParameterSet,
    max_level: usize,
    max_k: usize,
    pairs: u64,
    seed: u64,
    exec: Exec,
) -> Result<OscillationReport> {
    params.check_level(max_level)?;
    params.check_level(max_k)?;
    let sizes = params.grid_sizes_u64(max_level)?;
    let per_pair = exec.map_range(0..pairs, |i| -> Result<(Rat, Vec<OscillationFailure>)> {
        let mut rng = stream(seed, i);
        let n = uniform_index(&mut rng, 0, max_level as u64) as usize;
        let cell = GridCell::new(n, uniform_index(&mut rng, 1, sizes[n]), sizes[n]);
        let (lo, hi) = (cell.left(), cell.right());
        let t = uniform_rat(&mut rng, &lo, &hi);
        let u = uniform_rat(&mut rng, &lo, &hi);
        let len = cell.length();
        let mut worst = Rat::from_integer(0.into());
        let mut bad = Vec::new();
        for k in 0..=max_k {
            let d = abs(&(f_component(params, k, &t)? - f_component(params, k, &u)?));
            if d > len {
                bad.push(OscillationFailure { level: n, k, t: t.clone(), u: u.clone() });
            }
            let r = d / &len;
            if r > worst {
                worst = r;
            }
        }
        Ok((worst, bad))
    });
    let mut worst_ratio = Rat::from_integer(0.into());
    let mut failures = Vec::new();
    for r in per_pair {
        let (w, bad) = r?;
        if w > worst_ratio {
            worst_ratio = w;
        }
        failures.extend(bad);
    }
    Ok(OscillationReport {
        generator: GENERATOR,
        seed,
        pairs,
        max_level,
        max_k,
        worst_ratio,
        passed: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    #[test]
    fn d1_oscillation_is_bounded_by_cell_length() {
        let p = ParameterSet::d1();
        let r = oscillation_sweep(&p, 6, 8, 500, 2, Exec::Parallel).unwrap();
        assert!(r.passed);
        assert!(r.worst_ratio <= Rat::one());
        assert_eq!(r, oscillation_sweep(&p, 6, 8, 500, 2, Exec::Sequential).unwrap());
    }
}
