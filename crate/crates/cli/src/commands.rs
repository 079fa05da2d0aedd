use std::path::PathBuf;

use serde_json::{json, Value};
use unrect_core::construction::{build_pl, truncated_point};
use unrect_core::curve::{build_gamma, curve_length, length_ledger};
use unrect_core::diagnostics::{
    borel_cantelli, event_set_of, independence_check, oscillation_sweep, secant_sampler, slope_sweep, EventKind,
};
use unrect_core::measure::{hausdorff_upper, projection_bracket, scan_directions, square_directions};
use unrect_core::params::validate;
use unrect_core::rat::{fmt_rat, parse_rat, Rat};
use unrect_core::{Exec, ParameterSet};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::record;

pub const COMMANDS: [&str; 6] = ["validate", "evaluate", "measure", "scan", "curve", "diagnose"];

/// Records of one run plus any CSV side artifact.
pub struct Outcome {
    pub records: Vec<Value>,
    pub csv: Option<(PathBuf, Vec<u8>)>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    params: ParameterSet,
    budget: u64,
    exec: Exec,
}

impl Ctx<'_> {
    fn level(&self) -> usize {
        self.cfg.options.level.unwrap_or(self.params.n_max)
    }

    fn samples(&self, default: u64) -> u64 {
        self.cfg.options.samples.unwrap_or(default)
    }

    fn levels(&self, default: Vec<usize>) -> Vec<usize> {
        self.cfg.options.levels.clone().unwrap_or(default)
    }

    fn event_kind(&self) -> Result<EventKind, CliError> {
        match self.cfg.options.event_kind.as_deref() {
            None | Some("distance") => Ok(EventKind::Distance),
            Some("cells") => Ok(EventKind::Cells),
            Some(other) => Err(CliError::config(format!("unknown event kind {other:?}"))),
        }
    }
}

fn passed(ok: bool) -> (&'static str, Value) {
    ("passed", Value::Bool(ok))
}

pub fn run(command: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = Ctx {
        cfg,
        params: cfg.parameter_set()?,
        budget: cfg.budget()?,
        exec: Exec::default(),
    };
    let mut csv = None;
    let records = match command {
        "validate" => {
            let report = validate(&ctx.params)?;
            vec![record("validation", &report, vec![passed(report.passed())])]
        }
        "evaluate" => evaluate(&ctx)?,
        "measure" => {
            let f = cfg.functional.to_functional()?;
            let level = ctx.level();
            let b = projection_bracket(&ctx.params, &f, level, ctx.budget, ctx.exec)?;
            if let Some(path) = &cfg.options.csv {
                let pl = build_pl(&ctx.params, &f, level, ctx.budget)?;
                let mut bytes = Vec::new();
                pl.write_csv(&mut bytes).map_err(|e| CliError::io(e, path))?;
                csv = Some((path.clone(), bytes));
            }
            vec![record("measure_bracket", &b, vec![("chain_holds", Value::Bool(b.chain_holds()))])]
        }
        "scan" => scan(&ctx)?,
        "curve" => {
            let level = ctx.level();
            let curve = build_gamma(&ctx.params, level, ctx.budget, ctx.exec)?;
            if let Some(path) = &cfg.options.csv {
                let mut bytes = Vec::new();
                curve.write_csv(&mut bytes).map_err(|e| CliError::io(e, path))?;
                csv = Some((path.clone(), bytes));
            }
            let ledger = length_ledger(&ctx.params, level, ctx.budget, ctx.exec)?;
            let summary = json!({
                "level": level,
                "vertices": curve.vertices().len(),
                "length": fmt_rat(&curve_length(&curve)),
            });
            vec![
                record("curve", &summary, vec![]),
                record("length_ledger", &ledger, vec![passed(ledger.holds())]),
            ]
        }
        "diagnose" => diagnose(&ctx)?,
        other => return Err(CliError::config(format!("unknown command {other:?}"))),
    };
    Ok(Outcome { records, csv })
}

fn evaluate(ctx: &Ctx) -> Result<Vec<Value>, CliError> {
    let level = ctx.level();
    let raw = ctx.cfg.options.t.clone().unwrap_or_else(|| vec!["0/1".into()]);
    let mut ts = raw.iter().map(|s| parse_rat(s)).collect::<Result<Vec<Rat>, _>>()?;
    ts.sort();
    ts.dedup();
    ts.iter()
        .map(|t| {
            let p = truncated_point(&ctx.params, level, t)?;
            let embedded: Vec<String> = p.embedded(&ctx.params).iter().map(fmt_rat).collect();
            Ok(record("point", &p, vec![("embedded", json!(embedded))]))
        })
        .collect()
}

fn scan(ctx: &Ctx) -> Result<Vec<Value>, CliError> {
    let f = ctx.cfg.functional.to_functional()?;
    let mut dirs = match &ctx.cfg.options.directions {
        Some(list) => list
            .iter()
            .map(|[p, q]| Ok((parse_rat(p)?, parse_rat(q)?)))
            .collect::<Result<Vec<_>, CliError>>()?,
        None => square_directions(ctx.cfg.options.direction_grid.unwrap_or(16)),
    };
    if dirs.is_empty() {
        return Err(CliError::config("scan needs at least one direction"));
    }
    dirs.sort();
    dirs.dedup();
    let brackets = scan_directions(&ctx.params, &f, &dirs, ctx.level(), ctx.budget, ctx.exec)?;
    Ok(dirs
        .iter()
        .zip(&brackets)
        .map(|((p, q), b)| {
            record(
                "direction_bracket",
                b,
                vec![
                    ("p", json!(fmt_rat(p))),
                    ("q", json!(fmt_rat(q))),
                    ("certified_positive", Value::Bool(b.certifies_positive())),
                ],
            )
        })
        .collect())
}

fn diagnose(ctx: &Ctx) -> Result<Vec<Value>, CliError> {
    let p = &ctx.params;
    let seed = ctx.cfg.seed;
    let top = p.n_max.min(6);
    let check = ctx
        .cfg
        .options
        .check
        .as_deref()
        .ok_or_else(|| CliError::config("diagnose needs options.check"))?;
    Ok(match check {
        "events" => {
            let kind = ctx.event_kind()?;
            ctx.levels((1..=top).collect())
                .into_iter()
                .map(|n| {
                    let e = event_set_of(p, n, kind)?;
                    Ok(record("event_set", &e, vec![("measure", json!(fmt_rat(&e.measure())))]))
                })
                .collect::<Result<_, CliError>>()?
        }
        "independence" => {
            let r = independence_check(p, &ctx.levels(vec![2, 3]), ctx.event_kind()?, ctx.budget)?;
            vec![record("independence", &r, vec![passed(r.equal)])]
        }
        "borel_cantelli" => {
            let lv = ctx.levels(vec![1, top]);
            let [lo, hi] = lv[..] else {
                return Err(CliError::config("borel_cantelli needs levels = [lo, hi]"));
            };
            let r = borel_cantelli(p, lo, hi, ctx.event_kind()?, ctx.samples(10_000), seed, ctx.budget, ctx.exec)?;
            vec![record("borel_cantelli", &r, vec![passed(r.exact_within_three_sigma)])]
        }
        "secant" => ctx
            .levels((4..=p.n_max.min(7)).collect())
            .into_iter()
            .map(|n| {
                let r = secant_sampler(p, n, ctx.samples(500), seed, ctx.exec)?;
                Ok(record("secant", &r, vec![]))
            })
            .collect::<Result<_, CliError>>()?,
        "slope" => {
            let r = slope_sweep(p, p.n_max, ctx.samples(1000), seed, ctx.exec)?;
            vec![record("slope", &r, vec![])]
        }
        "oscillation" => {
            let r = oscillation_sweep(p, top, p.n_max, ctx.samples(10_000), seed, ctx.exec)?;
            vec![record("oscillation", &r, vec![])]
        }
        "covering" => {
            let level = ctx.level();
            ctx.levels((0..=level.min(4)).collect())
                .into_iter()
                .map(|n| {
                    let c = hausdorff_upper(p, level, n, ctx.budget, ctx.exec)?;
                    Ok(record("covering", &c, vec![passed(c.holds)]))
                })
                .collect::<Result<_, CliError>>()?
        }
        other => {
            return Err(CliError::config(format!(
                "unknown check {other:?}; expected events, independence, borel_cantelli, secant, slope, oscillation or covering"
            )))
        }
    })
}
