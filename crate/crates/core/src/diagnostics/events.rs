use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::measure::IntervalUnion;
use crate::params::ParameterSet;
use crate::rat::{frac, int, to_f64, Rat};
use crate::sampling::{stream, uniform_rat, GENERATOR};

/// Which set is meant by the level-`n` event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// `d(t, M_n^-1 Z) <= alpha_n / M_n`
    #[default]
    Distance,
    /// The first and last `alpha_n m_n` level-`n` cells of every
    /// level-`(n-1)` cell, i.e. `d(t, M_{n-1}^-1 Z) <= alpha_n / M_{n-1}`.
    /// These events are exactly independent across levels.
    Cells,
}

/// Level-`n` event as one period `[0, P]` repeated `1/P` times, where
/// `P = 1/M_n` for [`EventKind::Distance`] and `1/M_{n-1}` for
/// [`EventKind::Cells`].
///
/// Unions are closed, so the materialized set also contains `t = 1`;
/// this changes no measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventSet {
    pub n: usize,
    pub kind: EventKind,
    #[serde(with = "crate::rat::rat_str")]
    pub period: Rat,
    #[serde(with = "crate::rat::rat_str")]
    pub radius: Rat,
    pub copies: u64,
}

impl EventSet {
    /// Pattern on `[0, period]`.
    pub fn pattern(&self) -> IntervalUnion {
        IntervalUnion::from_intervals(vec![
            (Rat::zero(), self.radius.clone()),
            (&self.period - &self.radius, self.period.clone()),
        ])
    }

    pub fn measure(&self) -> Rat {
        self.pattern().measure() * int(self.copies)
    }

    /// The copies of the pattern lying in `[0, window]`; `window` must be a
    /// multiple of the period.
    fn window(&self, window: &Rat) -> IntervalUnion {
        let reps = (window / &self.period).to_integer();
        let mut v = Vec::new();
        let mut j = num::BigInt::zero();
        while j < reps {
            let base = &self.period * Rat::from_integer(j.clone());
            v.push((&base - &self.radius, &base + &self.radius));
            j += 1;
        }
        v.push((window - &self.radius, window + &self.radius));
        IntervalUnion::from_intervals(v).intersect(&IntervalUnion::interval(Rat::zero(), window.clone()))
    }

    pub fn materialize(&self, budget: u64) -> Result<IntervalUnion> {
        if self.copies > budget {
            return Err(Error::BudgetExceeded {
                what: "event set intervals",
                required: self.copies.to_string(),
                budget,
            });
        }
        Ok(self.window(&(&self.period * int(self.copies))))
    }

    pub fn contains(&self, t: &Rat) -> bool {
        let x = frac(&(t / &self.period)) * &self.period;
        x <= self.radius || &self.period - x <= self.radius
    }
}

/// `A_n = {t in [0, 1) : d(t, M_n^-1 Z) <= alpha_n / M_n}`.
pub fn event_set(params: &ParameterSet, n: usize) -> Result<EventSet> {
    event_set_of(params, n, EventKind::Distance)
}

pub fn event_set_of(params: &ParameterSet, n: usize, kind: EventKind) -> Result<EventSet> {
    params.check_level(n)?;
    let a = params.alpha(n);
    if a * int(2) > Rat::one() {
        return Err(Error::Precondition(format!("2 alpha_{n} = {} exceeds 1", a * int(2))));
    }
    let copies = match kind {
        EventKind::Distance => params.grid_size_u64(n)?,
        EventKind::Cells => {
            if n == 0 {
                return Err(Error::Precondition("cell events start at level 1".into()));
            }
            params.grid_size_u64(n - 1)?
        }
    };
    let period = Rat::new(1.into(), copies.into());
    Ok(EventSet {
        n,
        kind,
        radius: a * &period,
        period,
        copies,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceReport {
    pub kind: EventKind,
    pub levels: Vec<usize>,
    #[serde(with = "crate::rat::rat_str")]
    pub measure: Rat,
    /// `prod 2 alpha_n`
    #[serde(with = "crate::rat::rat_str")]
    pub product: Rat,
    pub equal: bool,
}

/// Exact measure of `A_{n_1} n ... n A_{n_k}` for `k <= 4` distinct levels.
///
/// The intersection repeats with the coarsest period, so one such period
/// is intersected and scaled.
pub fn independence_check(
    params: &ParameterSet,
    levels: &[usize],
    kind: EventKind,
    budget: u64,
) -> Result<IndependenceReport> {
    if levels.is_empty() || levels.len() > 4 {
        return Err(Error::Precondition("between 1 and 4 levels are required".into()));
    }
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != levels.len() {
        return Err(Error::Precondition("levels must be distinct".into()));
    }
    let events = sorted
        .iter()
        .map(|&n| event_set_of(params, n, kind))
        .collect::<Result<Vec<_>>>()?;
    let coarse = &events[0];
    let needed: u64 = events.iter().map(|e| e.copies / coarse.copies).sum();
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "intersection intervals",
            required: needed.to_string(),
            budget,
        });
    }
    let window = coarse.period.clone();
    let mut acc = coarse.window(&window);
    for e in &events[1..] {
        acc = acc.intersect(&e.window(&window));
    }
    let measure = acc.measure() * int(coarse.copies);
    let product = events
        .iter()
        .fold(Rat::one(), |p, e| p * int(2) * params.alpha(e.n));
    Ok(IndependenceReport {
        kind,
        levels: sorted,
        equal: measure == product,
        measure,
        product,
    })
}

/// Exact measure of `A_lo u ... u A_hi`, computed over one period of the
/// coarsest event.
pub fn union_measure(params: &ParameterSet, lo: usize, hi: usize, kind: EventKind, budget: u64) -> Result<Rat> {
    if lo > hi {
        return Err(Error::Precondition("need lo <= hi".into()));
    }
    let events = (lo..=hi)
        .map(|n| event_set_of(params, n, kind))
        .collect::<Result<Vec<_>>>()?;
    let coarse = &events[0];
    let needed: u64 = events.iter().map(|e| e.copies / coarse.copies).sum();
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "union intervals",
            required: needed.to_string(),
            budget,
        });
    }
    let window = coarse.period.clone();
    let union = events
        .iter()
        .fold(IntervalUnion::empty(), |acc, e| acc.union(&e.window(&window)));
    Ok(union.measure() * int(coarse.copies))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorelCantelliReport {
    pub generator: &'static str,
    pub seed: u64,
    pub kind: EventKind,
    pub levels: (usize, usize),
    pub samples: u64,
    pub hits: u64,
    pub fraction_f64: f64,
    /// `1 - prod (1 - 2 alpha_n)`, the union measure for independent events.
    #[serde(with = "crate::rat::rat_str")]
    pub predicted: Rat,
    /// Exact measure of the union.
    #[serde(with = "crate::rat::rat_str")]
    pub exact: Rat,
    pub z_predicted: f64,
    pub z_exact: f64,
    /// `(hits - samples p)^2 <= 9 samples p (1 - p)` with `p = predicted`, decided exactly.
    pub predicted_within_three_sigma: bool,
    /// The same test with `p = exact`.
    pub exact_within_three_sigma: bool,
}

fn three_sigma(hits: u64, samples: u64, p: &Rat) -> (bool, f64) {
    let n = int(samples);
    let dev = int(hits) - &n * p;
    let var = &n * p * (Rat::one() - p);
    let sd = to_f64(&var).sqrt();
    let z = if sd > 0.0 { to_f64(&dev) / sd } else { 0.0 };
    (&dev * &dev <= int(9) * var, z)
}

/// Fraction of seeded uniform samples falling in at least one event of
/// levels `lo..=hi`, compared with the independent-events prediction and
/// with the exact union measure.
#[allow(clippy::too_many_arguments)]
pub fn borel_cantelli(
    params: &ParameterSet,
    lo: usize,
    hi: usize,
    kind: EventKind,
    samples: u64,
    seed: u64,
    budget: u64,
    exec: Exec,
) -> Result<BorelCantelliReport> {
    if lo > hi || samples == 0 {
        return Err(Error::Precondition("need lo <= hi and at least one sample".into()));
    }
    let events = (lo..=hi)
        .map(|n| event_set_of(params, n, kind))
        .collect::<Result<Vec<_>>>()?;
    let (zero, one) = (Rat::zero(), Rat::one());
    let hits_each = exec.map_range(0..samples, |i| {
        let t = uniform_rat(&mut stream(seed, i), &zero, &one);
        events.iter().any(|e| e.contains(&t))
    });
    let hits = hits_each.iter().filter(|&&h| h).count() as u64;
    let miss = (lo..=hi).fold(Rat::one(), |acc, n| acc * (Rat::one() - int(2) * params.alpha(n)));
    let predicted = Rat::one() - miss;
    let exact = union_measure(params, lo, hi, kind, budget)?;
    let (pw, zp) = three_sigma(hits, samples, &predicted);
    let (ew, ze) = three_sigma(hits, samples, &exact);
    Ok(BorelCantelliReport {
        generator: GENERATOR,
        seed,
        kind,
        levels: (lo, hi),
        samples,
        hits,
        fraction_f64: hits as f64 / samples as f64,
        predicted,
        exact,
        z_predicted: zp,
        z_exact: ze,
        predicted_within_three_sigma: pw,
        exact_within_three_sigma: ew,
    })
}

/// Whether `t` lies in `A_n`, from the definition.
pub(crate) fn in_event(params: &ParameterSet, n: usize, t: &Rat) -> bool {
    let grid = params.grid_rat(n);
    let x = frac(&(t * &grid));
    let d = if x > crate::rat::rat(1, 2) { Rat::one() - x } else { x };
    !(d - params.alpha(n)).is_positive()
}
