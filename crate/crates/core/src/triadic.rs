//! Exact triadic combinatorics of the middle-third Cantor set: words over
//! the two contraction maps `x/3` and `(x+2)/3`, basic intervals and squares
//! of a given rank, and exact membership for rational points.
//!
//! Endpoints are triadic rationals `p / 3^n` with arbitrary-precision
//! numerators, so every comparison and every report is exact at any rank.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::interval::{Box2, Interval};

/// Default bound on ranks for enumeration-style operations.
pub const DEFAULT_RANK_CAP: u32 = 30;

/// Guard against enumeration explosion; exceeding it is an explicit error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankCap(pub u32);

impl Default for RankCap {
    fn default() -> Self {
        RankCap(DEFAULT_RANK_CAP)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriadicError {
    #[error("rank {rank} exceeds the rank cap {cap}")]
    RankCapExceeded { rank: u32, cap: u32 },
    #[error("point {value} lies outside [0, 1]")]
    OutsideUnit { value: String },
    #[error("invalid word character {found:?}; expected 'L' or 'R'")]
    BadWordChar { found: char },
}

/// One digit of a ternary word: `L` selects `x/3`, `R` selects `(x+2)/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Digit {
    L,
    R,
}

impl Digit {
    fn offset(self) -> u32 {
        match self {
            Digit::L => 0,
            Digit::R => 2,
        }
    }
}

/// A finite word over `{L, R}`; the empty word has rank 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TernaryWord(Vec<Digit>);

impl TernaryWord {
    pub fn empty() -> Self {
        TernaryWord(Vec::new())
    }

    pub fn from_digits(digits: impl Into<Vec<Digit>>) -> Self {
        TernaryWord(digits.into())
    }

    pub fn parse(text: &str) -> Result<Self, TriadicError> {
        let mut digits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                'L' => digits.push(Digit::L),
                'R' => digits.push(Digit::R),
                other => return Err(TriadicError::BadWordChar { found: other }),
            }
        }
        Ok(TernaryWord(digits))
    }

    pub fn rank(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn child(&self, digit: Digit) -> TernaryWord {
        let mut digits = self.0.clone();
        digits.push(digit);
        TernaryWord(digits)
    }

    pub fn is_prefix_of(&self, other: &TernaryWord) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            f.write_str(match d {
                Digit::L => "L",
                Digit::R => "R",
            })?;
        }
        Ok(())
    }
}

fn pow3(rank: u32) -> BigInt {
    BigInt::from(3u32).pow(rank)
}

/// An exact triadic rational `numer / 3^rank`.
#[derive(Debug, Clone)]
pub struct TriadicRational {
    numer: BigInt,
    rank: u32,
}

impl TriadicRational {
    pub fn new(numer: BigInt, rank: u32) -> Self {
        TriadicRational { numer, rank }
    }

    pub fn zero() -> Self {
        TriadicRational {
            numer: BigInt::zero(),
            rank: 0,
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numer.clone(), pow3(self.rank))
    }

    /// Nearest `f64`, for heuristics and sampling only.
    pub fn to_f64_nearest(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Tightest interval with `f64` endpoints containing the exact value.
    pub fn to_f64_enclosure(&self) -> Interval {
        rational_to_f64_enclosure(&self.to_rational())
    }

    /// Exact comparison against an `f64` (treated as an exact dyadic).
    pub fn cmp_f64(&self, x: f64) -> Ordering {
        match BigRational::from_float(x) {
            Some(xr) => self.to_rational().cmp(&xr),
            // Against non-finite values any finite rational compares by sign.
            None => {
                if x.is_nan() || x == f64::INFINITY {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }
}

/// Tightest interval with `f64` endpoints containing an exact rational: the
/// value floor-rounded and ceil-rounded to the floating-point grid, verified
/// by exact comparison.
pub fn rational_to_f64_enclosure(value: &BigRational) -> Interval {
    let approx = value
        .to_f64()
        .filter(|x| x.is_finite())
        .expect("rational exceeds f64 range");
    let mut lo = approx;
    let mut hi = approx;
    while cmp_f64_rational(lo, value) == Ordering::Greater {
        lo = lo.next_down();
    }
    while cmp_f64_rational(lo.next_up(), value) != Ordering::Greater {
        lo = lo.next_up();
    }
    while cmp_f64_rational(hi, value) == Ordering::Less {
        hi = hi.next_up();
    }
    while cmp_f64_rational(hi.next_down(), value) != Ordering::Less {
        hi = hi.next_down();
    }
    Interval::new(lo, hi)
}

/// Exact order of a finite `f64` against a rational.
fn cmp_f64_rational(x: f64, value: &BigRational) -> Ordering {
    match BigRational::from_float(x) {
        Some(xr) => xr.cmp(value),
        None => {
            if x == f64::NEG_INFINITY {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
    }
}

impl PartialEq for TriadicRational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TriadicRational {}

impl PartialOrd for TriadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TriadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        // Scale the lower-rank numerator up; value order is preserved.
        if self.rank <= other.rank {
            (&self.numer * pow3(other.rank - self.rank)).cmp(&other.numer)
        } else {
            self.numer.cmp(&(&other.numer * pow3(self.rank - other.rank)))
        }
    }
}

impl fmt::Display for TriadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, pow3(self.rank))
    }
}

/// A basic interval of rank `n`: the image of `[0,1]` under the composition
/// of the maps selected by the word; length `3^-n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicInterval {
    word: TernaryWord,
    left_numer: BigInt,
}

impl BasicInterval {
    /// The rank-0 interval `[0, 1]`.
    pub fn root() -> Self {
        BasicInterval {
            word: TernaryWord::empty(),
            left_numer: BigInt::zero(),
        }
    }

    pub fn word(&self) -> &TernaryWord {
        &self.word
    }

    pub fn rank(&self) -> u32 {
        self.word.rank()
    }

    /// Left endpoint as an exact triadic rational.
    pub fn left(&self) -> TriadicRational {
        TriadicRational::new(self.left_numer.clone(), self.rank())
    }

    /// Right endpoint `left + 3^-rank`.
    pub fn right(&self) -> TriadicRational {
        TriadicRational::new(&self.left_numer + 1, self.rank())
    }

    pub fn child(&self, digit: Digit) -> BasicInterval {
        BasicInterval {
            word: self.word.child(digit),
            left_numer: &self.left_numer * 3 + digit.offset(),
        }
    }

    /// The two rank+1 subintervals (first and last third), left one first.
    pub fn children(&self) -> (BasicInterval, BasicInterval) {
        (self.child(Digit::L), self.child(Digit::R))
    }

    /// All rank `self.rank() + depth` descendants in lexicographic order.
    pub fn descendants(&self, depth: u32) -> Vec<BasicInterval> {
        let mut level = vec![self.clone()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for iv in &level {
                let (l, r) = iv.children();
                next.push(l);
                next.push(r);
            }
            level = next;
        }
        level
    }

    /// Smallest `f64` interval containing the exact interval.
    pub fn to_f64_enclosure(&self) -> Interval {
        let lo = self.left().to_f64_enclosure().lo();
        let hi = self.right().to_f64_enclosure().hi();
        Interval::new(lo, hi)
    }

    /// Exact closed-intersection test against an `f64` range.
    pub fn intersects_closed(&self, range: &Interval) -> bool {
        self.left().cmp_f64(range.hi()) != Ordering::Greater
            && self.right().cmp_f64(range.lo()) != Ordering::Less
    }

    pub fn contains_interval(&self, other: &BasicInterval) -> bool {
        self.word.is_prefix_of(&other.word)
    }
}

impl fmt::Display for BasicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left(), self.right())
    }
}

/// Builds the basic interval selected by a word.
pub fn word_to_interval(word: &TernaryWord) -> BasicInterval {
    let mut numer = BigInt::zero();
    for &d in word.digits() {
        numer = numer * 3 + d.offset();
    }
    BasicInterval {
        word: word.clone(),
        left_numer: numer,
    }
}

/// A basic square of C x C: the product of two basic intervals of equal rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicSquare {
    ix: BasicInterval,
    iy: BasicInterval,
}

impl BasicSquare {
    pub fn new(ix: BasicInterval, iy: BasicInterval) -> Self {
        assert_eq!(ix.rank(), iy.rank(), "basic square needs equal ranks");
        BasicSquare { ix, iy }
    }

    pub fn root() -> Self {
        BasicSquare::new(BasicInterval::root(), BasicInterval::root())
    }

    pub fn x(&self) -> &BasicInterval {
        &self.ix
    }

    pub fn y(&self) -> &BasicInterval {
        &self.iy
    }

    pub fn rank(&self) -> u32 {
        self.ix.rank()
    }

    /// The four rank+1 subsquares in lexicographic (x-word, y-word) order.
    pub fn children(&self) -> [BasicSquare; 4] {
        let (xl, xr) = self.ix.children();
        let (yl, yr) = self.iy.children();
        [
            BasicSquare::new(xl.clone(), yl.clone()),
            BasicSquare::new(xl, yr.clone()),
            BasicSquare::new(xr.clone(), yl),
            BasicSquare::new(xr, yr),
        ]
    }

    /// Smallest `f64` box containing the exact square.
    pub fn to_box2(&self) -> Box2 {
        Box2::new(self.ix.to_f64_enclosure(), self.iy.to_f64_enclosure())
    }

    pub fn contains_square(&self, other: &BasicSquare) -> bool {
        self.ix.contains_interval(&other.ix) && self.iy.contains_interval(&other.iy)
    }

    pub fn intersects_region(&self, region: &Box2) -> bool {
        self.ix.intersects_closed(&region.x) && self.iy.intersects_closed(&region.y)
    }
}

impl fmt::Display for BasicSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} × {}", self.ix, self.iy)
    }
}

/// Enumerates the rank-`n` basic intervals nested in `prefix` whose closed
/// interval intersects `range`, in lexicographic order.
pub fn intervals_under(
    prefix: &BasicInterval,
    n: u32,
    range: &Interval,
    cap: RankCap,
) -> Result<Vec<BasicInterval>, TriadicError> {
    if n > cap.0 {
        return Err(TriadicError::RankCapExceeded { rank: n, cap: cap.0 });
    }
    assert!(prefix.rank() <= n, "prefix rank exceeds target rank");
    let mut out = Vec::new();
    let mut stack = vec![prefix.clone()];
    while let Some(iv) = stack.pop() {
        if !iv.intersects_closed(range) {
            continue;
        }
        if iv.rank() == n {
            out.push(iv);
        } else {
            let (l, r) = iv.children();
            // Push right first so the left child is processed first.
            stack.push(r);
            stack.push(l);
        }
    }
    // Depth-first with left priority already yields lexicographic order.
    Ok(out)
}

/// Enumerates the rank-`n` basic intervals intersecting `range`.
pub fn intervals_of_rank(
    n: u32,
    range: &Interval,
    cap: RankCap,
) -> Result<Vec<BasicInterval>, TriadicError> {
    intervals_under(&BasicInterval::root(), n, range, cap)
}

/// Streams the rank-`n` basic squares nested under `prefix` whose closed
/// square intersects `region`, in lexicographic (x-word, y-word) order.
///
/// The prefix makes the stream restartable mid-tree, which is what the
/// partitioned parallel traversals use.
pub fn squares_under(
    prefix: &BasicSquare,
    n: u32,
    region: &Box2,
    cap: RankCap,
) -> Result<impl Iterator<Item = BasicSquare>, TriadicError> {
    let xs = intervals_under(prefix.x(), n, &region.x, cap)?;
    let ys = intervals_under(prefix.y(), n, &region.y, cap)?;
    let mut iter_xs = xs.into_iter();
    let mut current_x: Option<BasicInterval> = iter_xs.next();
    let mut idx_y = 0usize;
    Ok(std::iter::from_fn(move || loop {
        let ix = current_x.as_ref()?;
        if idx_y < ys.len() {
            let sq = BasicSquare::new(ix.clone(), ys[idx_y].clone());
            idx_y += 1;
            return Some(sq);
        }
        current_x = iter_xs.next();
        idx_y = 0;
    }))
}

/// Streams all rank-`n` basic squares intersecting `region`.
pub fn squares_of_rank(
    n: u32,
    region: &Box2,
    cap: RankCap,
) -> Result<impl Iterator<Item = BasicSquare>, TriadicError> {
    squares_under(&BasicSquare::root(), n, region, cap)
}

/// Exact Cantor-set membership for a rational point of `[0, 1]`.
///
/// Generates the base-3 expansion by long division with remainder-cycle
/// detection and accepts iff some expansion avoids digit 1. Triadic
/// rationals have two expansions; a terminating expansion whose only digit 1
/// is the final nonzero digit rewrites as `...0 222...` and is accepted.
pub fn cantor_membership(q: &BigRational) -> Result<bool, TriadicError> {
    if q.is_negative() || q > &BigRational::from_integer(BigInt::from(1)) {
        return Err(TriadicError::OutsideUnit {
            value: q.to_string(),
        });
    }
    let denom = q.denom().clone();
    let mut r = q.numer().clone();
    if r.is_zero() || r == denom {
        return Ok(true);
    }
    let mut seen: HashSet<BigInt> = HashSet::new();
    while !r.is_zero() {
        if !seen.insert(r.clone()) {
            // Remainder cycle: the expansion is periodic from here on and no
            // digit 1 was emitted, so the point is in C.
            return Ok(true);
        }
        let triple = &r * 3;
        let quotient: BigInt = &triple / &denom;
        let digit = quotient.to_u8().expect("digit in 0..=2");
        r = triple % &denom;
        match digit {
            0 | 2 => {}
            1 => {
                // A final digit 1 rewrites as 0 followed by all 2s; an
                // interior digit 1 is irreplaceable.
                return Ok(r.is_zero());
            }
            _ => unreachable!("base-3 digit out of range"),
        }
    }
    Ok(true)
}
