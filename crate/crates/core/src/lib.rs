//! Exact computational model of maximal averages along vector fields that
//! depend on one variable.
//!
//! The crate implements, with exact dyadic/rational arithmetic throughout:
//!
//! * the dyadic slope grids `S_k` and the two interval grids `D`, `D'`
//!   ([`dyadic`]);
//! * step-function slope fields `u`, slope popularity and allowable slopes
//!   ([`field`]);
//! * the slope-selection forest `T(I)`, its Carleson weights, and the
//!   auxiliary functions `g` and `h` with their dyadic-BMO statistics
//!   ([`forest`]);
//! * parallelogram geometry: admissibility, 5-dilation, and the reduction
//!   from continuous rectangles to the discrete slope model ([`geometry`]);
//! * the greedy covering selection with its overlap integrals and the
//!   pair-set/injection bookkeeping behind it ([`covering`]);
//! * enumeration of the admissible family and exact evaluation of the
//!   maximal operator, level sets and weak-type constants ([`maximal`]).
//!
//! Everything is deterministic: generators are seeded, ties are broken
//! lexicographically, and all comparisons against thresholds are exact.

pub mod dyadic;
pub mod covering;
pub mod field;
pub mod forest;
pub mod geometry;
pub mod grid;
pub mod maximal;
pub mod sweep;
pub mod error;

pub use covering::{check_selection, verify_covering_with, injection_alpha, local_f, overlap_at, pq_sets, q_integral, select, slope_corollary_violations, verify_claims, verify_covering, ClaimsSummary, CoveringReport, Evicted, Falsification, Pair, Selection};
pub use dyadic::{find_dyadic_cover, slope_grid, Dyadic, DyadicInterval, Gridline, Nesting, Rat, SlopeCell};
pub use error::Error;
pub use field::{allowable_slopes, gen_field, pop, FieldGenSpec, OneVarField};
pub use forest::{build_forest, weights, CarlesonCheck, CarlesonWeights, ForestAnalysis, JnStats, SlopeForest, StepFn};
pub use geometry::{discretize_rect, dilate5_band, is_admissible, random_admissible_rect, v_measure, v_measure_continuous, Band, ColumnBand, ContinuousRect, DiscretizedRect, Parallelogram, ParallelogramRepr};
pub use grid::{ColumnProfile, GridFunction, TestFnSpec};
pub use maximal::{average_over, polygon_average, brute_force_maximal, enumerate_family, integral_over, maximal_fn, rat_to_f64, weak_type_constant, FamilySpec, MaximalField, WeakTypeResult, WeakTypeRow};
pub use sweep::{band_covered, band_covered_witness, bands_intersect, collapse_stacks, count_power_in_region, count_power_integral, for_each_strip, point_count, union_measure};
