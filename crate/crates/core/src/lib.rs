//! Rigorous certification of explicit closed intervals inside images
//! `f(C, C)` of the middle-third Cantor set under smooth two-variable
//! functions.
//!
//! The pipeline:
//!
//! 1. [`expr`] parses `f(x, y)` and produces its symbolic partial
//!    derivatives, evaluable both pointwise and over boxes with directed
//!    rounding ([`interval`]).
//! 2. [`certify`] checks a derivative-ratio criterion on basic squares of
//!    the Cantor grid ([`triadic`]) and searches the square tree for a
//!    certifiable cell; a success yields an inward-rounded interval proven
//!    to lie inside `f(C, C)` with exact rational corner witnesses.
//! 3. [`oracle`] validates every certificate against brute-force outer
//!    covers, exact inner lattice samples, and a level-by-level refinement
//!    recursion.

pub mod certify;
pub mod expr;
pub mod interval;
pub mod oracle;
pub mod triadic;

pub use certify::{
    certify_square, multi_search, point_condition, search, Case, Certificate, Failure, Margins,
    PointReport, SearchParams, SearchResult, SearchStats, Signature,
};
pub use expr::{differentiate, parse, Axis, DiffError, EvalError, Expr, GradTriple, ParseError};
pub use interval::{ulps_between, Box2, Interval, IntervalError, IntervalUnion};
pub use oracle::{
    cover_measure_series, depth_cover, hit_test, inner_samples, verify_recursion, CoverReport,
    OracleError, OracleLimits,
};
pub use triadic::{
    cantor_membership, intervals_of_rank, squares_of_rank, squares_under, word_to_interval,
    BasicInterval, BasicSquare, Digit, RankCap, TernaryWord, TriadicError, TriadicRational,
    DEFAULT_RANK_CAP,
};
