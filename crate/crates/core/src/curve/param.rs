use num::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rat::{abs, int, Rat};

use super::PolygonalCurve;

/// Nondecreasing surjection `tau: [0, 1] -> [0, 1]` onto a grid of `cells`
/// equal cells: constant (equal to `j / cells`) on `flats[j]`, affine in
/// between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tau {
    cells: u64,
    flats: Vec<(Rat, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Position {
    /// `tau(s) = j / cells`, `lambda` is the fraction of the flat traversed.
    Flat { j: u64, lambda: Rat },
    Affine { t: Rat },
}

impl Tau {
    /// Flats of width `1/(4 M (M + 1))` at each of the `M + 1` endpoints,
    /// equal affine stretches of length `(1 - 1/(4M)) / M` between them.
    pub fn canonical(cells: u64) -> Tau {
        assert!(cells > 0);
        let m = int(cells);
        let w = Rat::one() / (int(4) * &m * (&m + int(1)));
        let len = (Rat::one() - Rat::one() / (int(4) * &m)) / &m;
        let step = &w + &len;
        let flats = (0..=cells)
            .map(|j| {
                let start = int(j) * &step;
                let end = &start + &w;
                (start, end)
            })
            .collect();
        Tau { cells, flats }
    }

    pub fn from_flats(cells: u64, flats: Vec<(Rat, Rat)>) -> Result<Tau> {
        let bad = |why: &str| Err(Error::Precondition(format!("tau: {why}")));
        if cells == 0 || flats.len() as u64 != cells + 1 {
            return bad("need one flat per grid endpoint");
        }
        if flats[0].0 != Rat::zero() || flats[cells as usize].1 != Rat::one() {
            return bad("flats must start at 0 and end at 1");
        }
        if flats.iter().any(|(a, b)| a >= b) {
            return bad("every flat must be a nondegenerate interval");
        }
        if flats.windows(2).any(|w| w[0].1 >= w[1].0) {
            return bad("flats must be increasing and separated");
        }
        Ok(Tau { cells, flats })
    }

    pub fn cells(&self) -> u64 {
        self.cells
    }

    pub fn flats(&self) -> &[(Rat, Rat)] {
        &self.flats
    }

    fn locate(&self, s: &Rat) -> Result<Position> {
        if s < &Rat::zero() || s > &Rat::one() {
            return Err(Error::out_of_domain("s", s, "[0, 1]"));
        }
        // first flat ending at or after s
        let j = self.flats.partition_point(|(_, b)| b < s);
        let (a, b) = &self.flats[j];
        if s >= a {
            return Ok(Position::Flat {
                j: j as u64,
                lambda: (s - a) / (b - a),
            });
        }
        let prev_end = &self.flats[j - 1].1;
        let frac = (s - prev_end) / (a - prev_end);
        let m = int(self.cells);
        Ok(Position::Affine {
            t: (int(j as u64 - 1) + frac) / m,
        })
    }

    pub fn eval(&self, s: &Rat) -> Result<Rat> {
        Ok(match self.locate(s)? {
            Position::Flat { j, .. } => Rat::new(j.into(), self.cells.into()),
            Position::Affine { t } => t,
        })
    }

    /// Parameters where every curve parametrized by `self` may bend.
    fn breakpoints(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(3 * self.flats.len());
        for (j, (a, b)) in self.flats.iter().enumerate() {
            out.push(a.clone());
            out.push(b.clone());
            if let Some((next, _)) = self.flats.get(j + 1) {
                out.push((b + next) / int(2));
            }
        }
        out
    }
}

/// `s -> gamma_N(tau(s))`, running through each vertical connector while
/// `tau` rests on its endpoint.
#[derive(Debug, Clone, Copy)]
pub struct ParametrizedCurve<'a> {
    curve: &'a PolygonalCurve,
    tau: &'a Tau,
}

pub fn parametrize<'a>(curve: &'a PolygonalCurve, tau: &'a Tau) -> Result<ParametrizedCurve<'a>> {
    if !tau.cells.is_multiple_of(curve.cells()) {
        return Err(Error::Precondition(format!(
            "tau on {} cells does not rest on every endpoint of {} cells",
            tau.cells,
            curve.cells()
        )));
    }
    Ok(ParametrizedCurve { curve, tau })
}

impl ParametrizedCurve<'_> {
    pub fn tau(&self) -> &Tau {
        self.tau
    }

    pub fn eval(&self, s: &Rat) -> Result<Vec<Rat>> {
        Ok(match self.tau.locate(s)? {
            Position::Affine { t } => self.curve.point(&t),
            Position::Flat { j, lambda } => {
                let b = Rat::new(j.into(), self.tau.cells.into());
                let end = self.curve.point(&b);
                let on_connector = j > 0 && j % (self.tau.cells / self.curve.cells()) == 0;
                if !on_connector {
                    end
                } else {
                    let start = self.curve.left_point(&b);
                    start
                        .iter()
                        .zip(&end)
                        .map(|(x, y)| x + &lambda * (y - x))
                        .collect()
                }
            }
        })
    }

    /// Whether `s` lies where `tau` is constant.
    pub fn on_flat(&self, s: &Rat) -> Result<bool> {
        Ok(matches!(self.tau.locate(s)?, Position::Flat { .. }))
    }
}

fn l1_distance(a: &[Rat], b: &[Rat]) -> Rat {
    let zero = Rat::zero();
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| abs(&(a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero))))
        .fold(Rat::zero(), |x, y| x + y)
}

/// Exact `sup_s |a(s) - b(s)|_1` for two curves on the same `tau`.
///
/// Both are affine between consecutive breakpoints of `tau`, so the convex
/// distance peaks at a breakpoint.
pub fn sup_distance(a: &ParametrizedCurve<'_>, b: &ParametrizedCurve<'_>, exec: Exec) -> Result<Rat> {
    if a.tau != b.tau {
        return Err(Error::Precondition("curves must share one parametrization".into()));
    }
    let points = a.tau.breakpoints();
    let dists = exec.map_slice(&points, |s| -> Result<Rat> { Ok(l1_distance(&a.eval(s)?, &b.eval(s)?)) });
    let mut best = Rat::zero();
    for d in dists {
        let d = d?;
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::build_gamma;
    use crate::rat::rat;
    use crate::params::ParameterSet;
    use crate::DEFAULT_BUDGET;

    #[test]
    fn canonical_tau_layout() {
        let tau = Tau::canonical(2);
        assert_eq!(tau.flats()[0], (rat(0, 1), rat(1, 24)));
        assert_eq!(tau.flats()[2].1, rat(1, 1));
        assert_eq!(tau.eval(&rat(1, 48)).unwrap(), rat(0, 1));
        assert_eq!(tau.eval(&rat(1, 1)).unwrap(), rat(1, 1));
        let tau2 = Tau::from_flats(2, tau.flats().to_vec()).unwrap();
        assert_eq!(tau, tau2);
        let mid = (&tau.flats()[0].1 + &tau.flats()[1].0) / int(2);
        assert_eq!(tau.eval(&mid).unwrap(), rat(1, 4));
    }

    #[test]
    fn from_flats_rejects_bad_layouts() {
        assert!(Tau::from_flats(1, vec![(rat(0, 1), rat(1, 4)), (rat(1, 8), rat(1, 1))]).is_err());
        assert!(Tau::from_flats(1, vec![(rat(0, 1), rat(0, 1)), (rat(1, 2), rat(1, 1))]).is_err());
        assert!(Tau::from_flats(1, vec![(rat(0, 1), rat(1, 4))]).is_err());
    }

    #[test]
    fn d2_first_distance() {
        let p = ParameterSet::d2();
        let g0 = build_gamma(&p, 0, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        let g1 = build_gamma(&p, 1, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        let tau = Tau::canonical(g1.cells());
        let d = sup_distance(
            &parametrize(&g1, &tau).unwrap(),
            &parametrize(&g0, &tau).unwrap(),
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(d, rat(1, 16));
        assert!(parametrize(&g1, &Tau::canonical(1)).is_err());
    }

    #[test]
    fn flats_run_along_connectors() {
        let p = ParameterSet::d2();
        let g1 = build_gamma(&p, 1, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        let tau = Tau::canonical(2);
        let c = parametrize(&g1, &tau).unwrap();
        let (a, b) = tau.flats()[1].clone();
        let s = (&a + &b) / int(2);
        assert!(c.on_flat(&s).unwrap());
        // halfway down the connector at t = 1/2
        assert_eq!(c.eval(&s).unwrap(), vec![rat(1, 2), rat(1, 32)]);
        assert_eq!(c.eval(&a).unwrap(), vec![rat(1, 2), rat(1, 16)]);
        assert_eq!(c.eval(&b).unwrap(), vec![rat(1, 2), rat(0, 1)]);
    }
}
