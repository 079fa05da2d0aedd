//! Exact checks of event-set measures, secant witnesses, the translation
//! identity for increments, per-coordinate oscillation, and chord witnesses
//! for projections of curves.

mod events;
mod oscillation;
mod rect;
mod secant;
mod slope;

pub use events::{
    borel_cantelli, event_set, event_set_of, independence_check, union_measure, BorelCantelliReport, EventKind,
    EventSet, IndependenceReport,
};
pub use oscillation::{oscillation_sweep, OscillationFailure, OscillationReport};
pub use rect::{rect_witness, RectOutcome};
pub use secant::{secant_sampler, secant_threshold, secant_witness, SecantReport, SecantWitness};
pub use slope::{random_slope_tuple, slope_identity_check, slope_sweep, SlopeReport, SlopeRow, SlopeSweep};
