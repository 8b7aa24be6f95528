//! Certification of basic squares: decide the derivative-ratio point
//! condition, certify squares through uniform sufficient conditions on the
//! partial-derivative enclosures, and search the square tree for a
//! certifiable cell.
//!
//! A certificate for a square `I × J` asserts that `f` restricted to
//! `(C×C) ∩ (I×J)` attains every value between its two extreme corners, so
//! the reported (inward-rounded) interval is contained in `f(C, C)`.
//!
//! The sufficient conditions on a square, with `D` the larger-magnitude
//! partial enclosure and `d` the other one:
//!
//! * (a) neither partial enclosure contains zero (constant signs);
//! * (b) `inf |D| >= sup |d|`;
//! * (c) `3 inf |d| >= sup |D|`.
//!
//! By the mean value theorem these make every two-ends refinement of the
//! square overlap-exact, so the refinement recursion reproduces the full
//! corner-to-corner image at every depth. Signs only decide which corners
//! realize the extremes; axis reflections of C map basic intervals onto
//! basic intervals, so no reflected function is ever constructed.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{Axis, EvalError, GradTriple};
use crate::interval::{mul3_down, mul3_up, Box2, Interval};
use crate::triadic::{BasicSquare, TernaryWord, TriadicRational};

/// Absolute tolerance for calling a point ratio exactly 1 or 3.
const BOUNDARY_TOL: f64 = 1e-12;

/// Outcome of the derivative-ratio test at a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// `1 < |fx/fy| < 3`.
    XDominant,
    /// `1 < |fy/fx| < 3`.
    YDominant,
    /// The ratio sits on 1 or 3 (to floating tolerance).
    Boundary,
    /// Outside both windows, or a vanishing partial.
    Fail,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::XDominant => "x-dominant",
            Case::YDominant => "y-dominant",
            Case::Boundary => "boundary",
            Case::Fail => "fail",
        }
    }
}

/// Report of the point condition at an exact rational point.
#[derive(Debug, Clone)]
pub struct PointReport {
    pub point: (BigRational, BigRational),
    pub fx: f64,
    pub fy: f64,
    /// `|fx / fy|`; may be non-finite when a partial vanishes.
    pub ratio: f64,
    pub case: Case,
    pub signs: (i8, i8),
}

/// Evaluates the theorem's point condition at `(x0, y0)`.
pub fn point_condition(
    g: &GradTriple,
    x0: &BigRational,
    y0: &BigRational,
) -> Result<PointReport, EvalError> {
    let xf = x0.to_f64().unwrap_or(f64::NAN);
    let yf = y0.to_f64().unwrap_or(f64::NAN);
    let fx = g.fx.eval_point(xf, yf)?;
    let fy = g.fy.eval_point(xf, yf)?;
    let signs = (sign_of(fx), sign_of(fy));
    let ratio = (fx / fy).abs();
    let case = if fx == 0.0 || fy == 0.0 {
        Case::Fail
    } else if (ratio - 1.0).abs() <= BOUNDARY_TOL
        || (ratio - 3.0).abs() <= BOUNDARY_TOL
        || (ratio - 1.0 / 3.0).abs() <= BOUNDARY_TOL
    {
        Case::Boundary
    } else if 1.0 < ratio && ratio < 3.0 {
        Case::XDominant
    } else if 1.0 / 3.0 < ratio && ratio < 1.0 {
        Case::YDominant
    } else {
        Case::Fail
    };
    Ok(PointReport {
        point: (x0.clone(), y0.clone()),
        fx,
        fy,
        ratio,
        case,
        signs,
    })
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Constant signs of the partials on a certified square, which partial
/// dominates, and whether the axes were exchanged for the dominance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub sx: i8,
    pub sy: i8,
    pub dominant: Axis,
    pub swap: bool,
}

/// Certified lower bounds of the criterion slack, all nonnegative:
/// `dominance = inf|D| - sup|d|`, `ratio = 3 inf|d| - sup|D|`,
/// `dominant_inf = inf|D|`, `other_inf = inf|d|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub dominance: f64,
    pub ratio: f64,
    pub dominant_inf: f64,
    pub other_inf: f64,
}

/// A certified square with its proven image subinterval.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub square: BasicSquare,
    pub signature: Signature,
    pub margins: Margins,
    /// Inward-rounded interval proven to lie inside `f(C, C)`.
    pub image: Interval,
    /// Exact corner realizing the image minimum.
    pub corner_min: (TriadicRational, TriadicRational),
    /// Exact corner realizing the image maximum.
    pub corner_max: (TriadicRational, TriadicRational),
    /// Enclosure of the x partial over the square.
    pub fx_range: Interval,
    /// Enclosure of the y partial over the square.
    pub fy_range: Interval,
}

/// Why a square failed to certify.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Failure {
    #[error("sign ambiguous: fx in {fx_range}, fy in {fy_range}")]
    SignAmbiguous {
        fx_range: Interval,
        fy_range: Interval,
    },
    #[error("dominance fails: fx in {fx_range}, fy in {fy_range}")]
    DominanceFails {
        fx_range: Interval,
        fy_range: Interval,
    },
    #[error("ratio fails: fx in {fx_range}, fy in {fy_range}")]
    RatioFails {
        fx_range: Interval,
        fy_range: Interval,
    },
    #[error("domain error: {0}")]
    Domain(EvalError),
    #[error("image degenerate after inward rounding")]
    DegenerateImage,
}

/// Certifies one basic square against conditions (a)-(c) and computes the
/// inward-rounded image from the extreme corners.
pub fn certify_square(g: &GradTriple, sq: &BasicSquare) -> Result<Certificate, Failure> {
    let boxed = sq.to_box2();
    let fx_range = g.fx.eval_interval(&boxed).map_err(Failure::Domain)?;
    let fy_range = g.fy.eval_interval(&boxed).map_err(Failure::Domain)?;
    let sx = fx_range.sign();
    let sy = fy_range.sign();
    if sx == 0 || sy == 0 {
        return Err(Failure::SignAmbiguous { fx_range, fy_range });
    }

    let ax = fx_range.abs();
    let ay = fy_range.abs();
    let swap = ax.lo() < ay.lo();
    let dominant = if swap { Axis::Y } else { Axis::X };
    let (dmag, omag) = if swap { (ay, ax) } else { (ax, ay) };

    if dmag.lo() < omag.hi() {
        return Err(Failure::DominanceFails { fx_range, fy_range });
    }
    if mul3_down(omag.lo()) < dmag.hi() {
        return Err(Failure::RatioFails { fx_range, fy_range });
    }

    let margins = Margins {
        dominance: dmag.lo() - omag.hi(),
        ratio: 3.0 * omag.lo() - dmag.hi(),
        dominant_inf: dmag.lo(),
        other_inf: omag.lo(),
    };

    // The minimizing corner sits at the low end of an axis when the partial
    // is positive there, at the high end when it is negative.
    let (x_min, x_max) = if sx > 0 {
        (sq.x().left(), sq.x().right())
    } else {
        (sq.x().right(), sq.x().left())
    };
    let (y_min, y_max) = if sy > 0 {
        (sq.y().left(), sq.y().right())
    } else {
        (sq.y().right(), sq.y().left())
    };

    let f_min = eval_at_corner(g, &x_min, &y_min).map_err(Failure::Domain)?;
    let f_max = eval_at_corner(g, &x_max, &y_max).map_err(Failure::Domain)?;
    // Inward rounding: the claimed interval must survive the corner-value
    // evaluation error on both sides.
    let lo = f_min.hi();
    let hi = f_max.lo();
    if lo >= hi {
        return Err(Failure::DegenerateImage);
    }

    Ok(Certificate {
        square: sq.clone(),
        signature: Signature {
            sx,
            sy,
            dominant,
            swap,
        },
        margins,
        image: Interval::new(lo, hi),
        corner_min: (x_min, y_min),
        corner_max: (x_max, y_max),
        fx_range,
        fy_range,
    })
}

/// Enclosure of `f` at an exact corner, via a thin box around the corner.
pub(crate) fn eval_at_corner(
    g: &GradTriple,
    x: &TriadicRational,
    y: &TriadicRational,
) -> Result<Interval, EvalError> {
    let b = Box2::new(x.to_f64_enclosure(), y.to_f64_enclosure());
    g.f.eval_interval(&b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    /// Squares beyond this rank are not refined further.
    pub max_rank: u32,
    /// Maximum number of frontier nodes processed.
    pub budget: u64,
    /// Worker count; affects speed only, never the result.
    pub workers: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            max_rank: 12,
            budget: 100_000,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub expanded: u64,
    pub deepest_rank: u32,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub certificates: Vec<Certificate>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn first(&self) -> Option<&Certificate> {
        self.certificates.first()
    }
}

/// Best-first search for one certifiable square. Deterministic: the frontier
/// is ordered by (score, x-word, y-word) where the score is the distance of
/// the center-point derivative ratio from the middle of the admissible
/// window, and parallel workers only precompute certification of nodes the
/// sequential order is about to visit.
pub fn search(g: &GradTriple, region: &Box2, params: &SearchParams) -> SearchResult {
    multi_search(g, region, params, 1)
}

/// As `search`, but keeps collecting up to `max_certs` certificates with
/// pairwise distinct, non-nested squares.
pub fn multi_search(
    g: &GradTriple,
    region: &Box2,
    params: &SearchParams,
    max_certs: usize,
) -> SearchResult {
    let mut heap: BinaryHeap<std::cmp::Reverse<Node>> = BinaryHeap::new();
    let mut memo: HashMap<(TernaryWord, TernaryWord), Result<Certificate, Failure>> =
        HashMap::new();
    let mut stats = SearchStats::default();
    let mut found: Vec<Certificate> = Vec::new();

    let root = BasicSquare::root();
    if max_certs > 0 && root.intersects_region(region) {
        heap.push(std::cmp::Reverse(Node::new(g, root)));
    }

    while let Some(std::cmp::Reverse(node)) = heap.pop() {
        if stats.expanded >= params.budget {
            break;
        }
        stats.expanded += 1;
        stats.deepest_rank = stats.deepest_rank.max(node.square.rank());

        if found
            .iter()
            .any(|c| c.square.contains_square(&node.square))
        {
            continue;
        }

        let key = node.key();
        let outcome = match memo.remove(&key) {
            Some(cached) => cached,
            None => {
                if params.workers > 1 {
                    speculate(g, &node, &heap, params.workers, &mut memo)
                } else {
                    certify_square(g, &node.square)
                }
            }
        };

        match outcome {
            Ok(cert) => {
                found.push(cert);
                if found.len() >= max_certs {
                    break;
                }
            }
            Err(failure) => {
                if node.square.rank() < params.max_rank && !ratio_impossible(&failure) {
                    for child in node.square.children() {
                        if child.intersects_region(region) {
                            heap.push(std::cmp::Reverse(Node::new(g, child)));
                        }
                    }
                }
            }
        }
    }

    SearchResult {
        certificates: found,
        stats,
    }
}

/// Certifies the node plus the next few frontier heads in parallel, caching
/// everything; the caller still consumes results in strict priority order.
fn speculate(
    g: &GradTriple,
    node: &Node,
    heap: &BinaryHeap<std::cmp::Reverse<Node>>,
    workers: usize,
    memo: &mut HashMap<(TernaryWord, TernaryWord), Result<Certificate, Failure>>,
) -> Result<Certificate, Failure> {
    let mut batch: Vec<&BasicSquare> = vec![&node.square];
    for peeked in heap.iter().take(workers.saturating_sub(1)) {
        let key = peeked.0.key();
        if !memo.contains_key(&key) {
            batch.push(&peeked.0.square);
        }
    }
    let results: Vec<Result<Certificate, Failure>> = batch
        .par_iter()
        .map(|sq| certify_square(g, sq))
        .collect();
    let mut own = None;
    for (sq, result) in batch.into_iter().zip(results) {
        if own.is_none() && sq == &node.square {
            own = Some(result);
        } else {
            memo.insert((sq.x().word().clone(), sq.y().word().clone()), result);
        }
    }
    own.expect("node itself is in the batch")
}

/// True when the failing square's enclosures prove that no descendant can
/// satisfy either orientation of the ratio window: the whole derivative
/// ratio range lies strictly below 1/3 or strictly above 3.
fn ratio_impossible(failure: &Failure) -> bool {
    let (fx_range, fy_range) = match failure {
        Failure::SignAmbiguous { fx_range, fy_range }
        | Failure::DominanceFails { fx_range, fy_range }
        | Failure::RatioFails { fx_range, fy_range } => (fx_range, fy_range),
        Failure::Domain(_) | Failure::DegenerateImage => return false,
    };
    let ax = fx_range.abs();
    let ay = fy_range.abs();
    // sup |fx| < inf |fy| / 3  or  inf |fx| > 3 sup |fy|, checked with
    // conservative rounding so a prune is always sound.
    mul3_up(ax.hi()) < ay.lo() || ax.lo() > mul3_up(ay.hi())
}

struct Node {
    score: f64,
    square: BasicSquare,
}

impl Node {
    fn new(g: &GradTriple, square: BasicSquare) -> Node {
        Node {
            score: score_square(g, &square),
            square,
        }
    }

    fn key(&self) -> (TernaryWord, TernaryWord) {
        (
            self.square.x().word().clone(),
            self.square.y().word().clone(),
        )
    }
}

/// Distance of the center-point ratio from 2, in whichever orientation is
/// closer; lower is searched first.
fn score_square(g: &GradTriple, sq: &BasicSquare) -> f64 {
    let b = sq.to_box2();
    let cx = b.x.midpoint();
    let cy = b.y.midpoint();
    let (fx, fy) = match (g.fx.eval_point(cx, cy), g.fy.eval_point(cx, cy)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return f64::INFINITY,
    };
    let r = (fx / fy).abs();
    let score = (r - 2.0).abs().min((1.0 / r - 2.0).abs());
    if score.is_nan() {
        f64::INFINITY
    } else {
        score
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // Rank precedes the word tie-break: self-similar functions repeat
        // the same score at every scale, and without the rank key the
        // lexicographic order would chase the deepest left-most copy.
        self.score
            .total_cmp(&other.score)
            .then_with(|| self.square.rank().cmp(&other.square.rank()))
            .then_with(|| self.square.x().word().cmp(other.square.x().word()))
            .then_with(|| self.square.y().word().cmp(other.square.y().word()))
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "square {} (rank {}), image {}",
            self.square,
            self.square.rank(),
            self.image
        )
    }
}
