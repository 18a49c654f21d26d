//! Desk-scale numerical laboratory for anisotropic difference quotients.
//!
//! The crate estimates, at workstation budgets, the quantities that tie the
//! fractional Gagliardo seminorm over a convex gauge to its endpoint limits:
//!
//! * [`convex_body`] — origin-symmetric convex bodies `K`, their Minkowski
//!   gauges, volumes, uniform samplers, and polar `L^p` moment-body norms.
//! * [`test_functions`] — a catalog of test functions with exact gradients,
//!   sup-norm bounds, analytic `L^p` norms, and truncation views.
//! * [`gagliardo`] — the anisotropic Gagliardo `s`-seminorm with sweeps that
//!   verify the `s -> 1` (gradient energy) and `s -> 0` (volume times `L^p`
//!   norm) limits.
//! * [`level_set`] — 2n-dimensional superlevel-set measures of anisotropic
//!   difference quotients, the weak-`L^p` quasinorm, and the large/small
//!   threshold limits with their sandwich bounds.
//! * [`line_geometry`] — line sampling for the Blaschke–Petkantschin
//!   decomposition and the one-dimensional averaged-integral set oracle.
//! * [`certificates`] — numerical checks of the constructive interval
//!   inclusions and truncation bounds extracted from the proofs.
//! * [`config`] / [`experiment`] — key-value experiment configs, a
//!   deterministic runner, and CSV/JSON/plot-data emission.
//!
//! Every estimator is deterministic given a seed: all randomness comes from
//! the counter-based ChaCha8 generator, split into 32 fixed substreams (one
//! per batch-means chunk), so results do not depend on thread count.

// `!(x > 0.0)` guards deliberately reject NaN; the rewrite clippy
// suggests would let NaN pass validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod config;
pub mod convex_body;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod gagliardo;
pub mod level_set;
pub mod line_geometry;
pub mod quad;
pub mod rng;
pub mod test_functions;

pub use error::{Error, Result};
pub use estimate::{Estimate, McConfig, SweepRow, SweepTable, Verdict};
