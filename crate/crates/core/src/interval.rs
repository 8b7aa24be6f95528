//! Directed-rounded interval arithmetic on `f64`, planar boxes, and sorted
//! disjoint interval unions.
//!
//! Every operation returns an interval that contains the exact real range of
//! the operation over its inputs. Outward rounding is realized by nudging the
//! computed endpoints one step along the floating-point grid (two steps after
//! library transcendental calls, whose correct rounding is not guaranteed).
//! Endpoints are always finite; an operation that would produce a non-finite
//! endpoint reports [`IntervalError::Overflow`] instead.

use std::fmt;

use thiserror::Error;

/// Errors produced by interval operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalError {
    /// A singularity or domain boundary lies inside an argument interval.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },
    /// An endpoint escaped to infinity.
    #[error("overflow in {op}: non-finite endpoint")]
    Overflow { op: &'static str },
}

fn domain(op: &'static str, detail: impl Into<String>) -> IntervalError {
    IntervalError::Domain {
        op,
        detail: detail.into(),
    }
}

#[inline]
fn down1(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up1(x: f64) -> f64 {
    x.next_up()
}

#[inline]
fn down2(x: f64) -> f64 {
    x.next_down().next_down()
}

#[inline]
fn up2(x: f64) -> f64 {
    x.next_up().next_up()
}

/// Largest `f64` known to be `<= 3 * x` (exact when the product is exact).
#[inline]
pub(crate) fn mul3_down(x: f64) -> f64 {
    let t = 3.0 * x;
    let residue = 3.0f64.mul_add(x, -t);
    if residue >= 0.0 {
        t
    } else {
        t.next_down()
    }
}

/// Smallest `f64` known to be `>= 3 * x` (exact when the product is exact).
#[inline]
pub(crate) fn mul3_up(x: f64) -> f64 {
    let t = 3.0 * x;
    let residue = 3.0f64.mul_add(x, -t);
    if residue <= 0.0 {
        t
    } else {
        t.next_up()
    }
}

/// Maps `f64` to an integer key that is monotone in the numeric order, with
/// adjacent finite floats mapping to adjacent integers (and -0.0 == +0.0).
#[inline]
fn order_key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits < 0 {
        i64::MIN - bits
    } else {
        bits
    }
}

/// Number of floating-point grid steps between `a` and `b`.
pub fn ulps_between(a: f64, b: f64) -> u64 {
    order_key(a).abs_diff(order_key(b))
}

/// A closed interval `[lo, hi]` with finite `f64` endpoints, `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds an interval; panics if the endpoint invariant is violated.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(
            lo.is_finite() && hi.is_finite() && lo <= hi,
            "invalid interval [{lo}, {hi}]"
        );
        Interval { lo, hi }
    }

    /// Fallible constructor for externally supplied endpoints.
    pub fn try_new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::Overflow { op: "new" });
        }
        if lo > hi {
            return Err(domain("new", format!("lo {lo} exceeds hi {hi}")));
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval at a single point.
    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// Internal constructor for computed endpoints; maps non-finite results
    /// to an overflow error.
    fn finish(op: &'static str, lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::Overflow { op });
        }
        debug_assert!(lo <= hi, "{op} produced [{lo}, {hi}]");
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoint, for heuristics only.
    pub fn midpoint(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Magnitude interval `{|t| : t in self}`; exact.
    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            Interval {
                lo: -self.hi,
                hi: -self.lo,
            }
        } else {
            Interval {
                lo: 0.0,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    /// Sign of the interval: `1` if strictly positive, `-1` if strictly
    /// negative, `0` if it contains zero.
    pub fn sign(&self) -> i8 {
        if self.lo > 0.0 {
            1
        } else if self.hi < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Exact negation.
    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn add(&self, other: &Interval) -> Result<Interval, IntervalError> {
        Interval::finish("add", down1(self.lo + other.lo), up1(self.hi + other.hi))
    }

    pub fn sub(&self, other: &Interval) -> Result<Interval, IntervalError> {
        Interval::finish("sub", down1(self.lo - other.hi), up1(self.hi - other.lo))
    }

    pub fn mul(&self, other: &Interval) -> Result<Interval, IntervalError> {
        let products = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ];
        let mut lo = products[0];
        let mut hi = products[0];
        for &p in &products[1..] {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        Interval::finish("mul", down1(lo), up1(hi))
    }

    pub fn div(&self, other: &Interval) -> Result<Interval, IntervalError> {
        if other.lo <= 0.0 && other.hi >= 0.0 {
            return Err(domain(
                "div",
                format!("denominator {other} contains zero"),
            ));
        }
        let quotients = [
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        ];
        let mut lo = quotients[0];
        let mut hi = quotients[0];
        for &q in &quotients[1..] {
            lo = lo.min(q);
            hi = hi.max(q);
        }
        Interval::finish("div", down1(lo), up1(hi))
    }

    /// Integer power; negative bases handled by exponent parity.
    pub fn powi(&self, n: i32) -> Result<Interval, IntervalError> {
        if n == 0 {
            return Ok(Interval::point(1.0));
        }
        if n < 0 {
            if self.contains(0.0) {
                return Err(domain(
                    "powi",
                    format!("negative exponent with {self} containing zero"),
                ));
            }
            let positive = self.powi(-n)?;
            return Interval::point(1.0).div(&positive);
        }
        let n = n as u32;
        let mag = self.abs();
        let (mlo_lo, _) = pow_mag(mag.lo, n);
        let (_, mhi_hi) = pow_mag(mag.hi, n);
        if n % 2 == 0 {
            let lo = if self.contains(0.0) { 0.0 } else { mlo_lo };
            Interval::finish("powi", lo, mhi_hi)
        } else {
            // Odd powers are monotone.
            let (lo, _) = pow_signed(self.lo, n);
            let (_, hi) = pow_signed(self.hi, n);
            Interval::finish("powi", lo, hi)
        }
    }

    /// Real power with a constant exponent enclosure; requires a strictly
    /// positive base.
    pub fn powr(&self, exponent: &Interval) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(domain(
                "pow",
                format!("non-integer exponent needs positive base, got {self}"),
            ));
        }
        self.ln()?.mul(exponent)?.exp()
    }

    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(domain("sqrt", format!("argument {self} below zero")));
        }
        let lo = down1(self.lo.sqrt()).max(0.0);
        let hi = up1(self.hi.sqrt());
        Interval::finish("sqrt", lo, hi)
    }

    pub fn exp(&self) -> Result<Interval, IntervalError> {
        let lo = down2(self.lo.exp()).max(0.0);
        let hi = up2(self.hi.exp());
        Interval::finish("exp", lo, hi)
    }

    pub fn ln(&self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(domain("ln", format!("argument {self} not positive")));
        }
        Interval::finish("ln", down2(self.lo.ln()), up2(self.hi.ln()))
    }

    pub fn sin(&self) -> Result<Interval, IntervalError> {
        self.trig_range(true)
    }

    pub fn cos(&self) -> Result<Interval, IntervalError> {
        self.trig_range(false)
    }

    /// Range enclosure of sin/cos by monotonicity decomposition against
    /// enclosed multiples of pi/2.
    fn trig_range(&self, is_sin: bool) -> Result<Interval, IntervalError> {
        if self.hi - self.lo > 7.0 || self.lo.abs() > 1e15 || self.hi.abs() > 1e15 {
            return Ok(Interval::new(-1.0, 1.0));
        }
        let f = if is_sin { f64::sin } else { f64::cos };
        let va = f(self.lo);
        let vb = f(self.hi);
        let mut lo = down2(va.min(vb));
        let mut hi = up2(va.max(vb));

        let half_pi_lo = pi_lo() / 2.0;
        let half_pi_hi = pi_hi() / 2.0;
        let m_min = (self.lo / half_pi_hi).floor() as i64 - 1;
        let m_max = (self.hi / half_pi_lo).ceil() as i64 + 1;
        for m in m_min..=m_max {
            let mf = m as f64;
            // Enclosure of m * pi/2.
            let (c_lo, c_hi) = if m >= 0 {
                (down1(mf * half_pi_lo), up1(mf * half_pi_hi))
            } else {
                (down1(mf * half_pi_hi), up1(mf * half_pi_lo))
            };
            if c_hi < self.lo || c_lo > self.hi {
                continue;
            }
            match (is_sin, m.rem_euclid(4)) {
                (true, 1) | (false, 0) => hi = 1.0,
                (true, 3) | (false, 2) => lo = -1.0,
                _ => {}
            }
        }
        Ok(Interval::new(lo.max(-1.0), hi.min(1.0)))
    }
}

/// Lower endpoint of a pi enclosure; `f64::consts::PI` rounds pi down.
#[inline]
pub(crate) fn pi_lo() -> f64 {
    std::f64::consts::PI
}

/// Upper endpoint of a pi enclosure.
#[inline]
pub(crate) fn pi_hi() -> f64 {
    std::f64::consts::PI.next_up()
}

/// Outward-rounded `x^n` for `x >= 0` by binary exponentiation.
fn pow_mag(x: f64, n: u32) -> (f64, f64) {
    debug_assert!(x >= 0.0);
    let mut acc = (1.0f64, 1.0f64);
    let mut base = (x, x);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = (down1(acc.0 * base.0).max(0.0), up1(acc.1 * base.1));
        }
        k >>= 1;
        if k > 0 {
            base = (down1(base.0 * base.0).max(0.0), up1(base.1 * base.1));
        }
    }
    acc
}

/// Outward-rounded `x^n` for odd `n` and any sign of `x`.
fn pow_signed(x: f64, n: u32) -> (f64, f64) {
    debug_assert!(n % 2 == 1);
    if x >= 0.0 {
        pow_mag(x, n)
    } else {
        let (lo, hi) = pow_mag(-x, n);
        (-hi, -lo)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An axis-aligned planar box `x × y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2 {
    pub x: Interval,
    pub y: Interval,
}

impl Box2 {
    pub fn new(x: Interval, y: Interval) -> Self {
        Box2 { x, y }
    }

    /// The unit square `[0,1] × [0,1]`.
    pub fn unit() -> Self {
        Box2 {
            x: Interval::new(0.0, 1.0),
            y: Interval::new(0.0, 1.0),
        }
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }
}

impl fmt::Display for Box2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} × {}", self.x, self.y)
    }
}

/// A canonical union of pairwise disjoint intervals, sorted by `lo`.
/// Touching intervals (shared endpoint) merge into one part.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn new() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Inserts one interval, merging any parts it overlaps or touches.
    pub fn insert(&mut self, v: Interval) {
        // First part that could interact with v: parts[i].hi >= v.lo.
        let start = self.parts.partition_point(|p| p.hi < v.lo);
        // One past the last part that interacts: parts[j].lo <= v.hi.
        let mut end = start;
        while end < self.parts.len() && self.parts[end].lo <= v.hi {
            end += 1;
        }
        if start == end {
            self.parts.insert(start, v);
            return;
        }
        let lo = v.lo.min(self.parts[start].lo);
        let hi = v.hi.max(self.parts[end - 1].hi);
        self.parts.splice(start..end, [Interval::new(lo, hi)]);
    }

    /// Builds the canonical union of arbitrarily many intervals by
    /// sort-and-sweep; the result does not depend on input order.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(intervals: I) -> Self {
        let mut items: Vec<Interval> = intervals.into_iter().collect();
        items.sort_unstable_by(|a, b| {
            a.lo.total_cmp(&b.lo).then_with(|| a.hi.total_cmp(&b.hi))
        });
        let mut parts: Vec<Interval> = Vec::new();
        for v in items {
            match parts.last_mut() {
                Some(last) if v.lo <= last.hi => {
                    if v.hi > last.hi {
                        *last = Interval::new(last.lo, v.hi);
                    }
                }
                _ => parts.push(v),
            }
        }
        IntervalUnion { parts }
    }

    /// Canonical union of two unions.
    pub fn merge(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut parts: Vec<Interval> = Vec::with_capacity(self.parts.len() + other.parts.len());
        let (mut i, mut j) = (0, 0);
        let push = |v: Interval, parts: &mut Vec<Interval>| match parts.last_mut() {
            Some(last) if v.lo <= last.hi => {
                if v.hi > last.hi {
                    *last = Interval::new(last.lo, v.hi);
                }
            }
            _ => parts.push(v),
        };
        while i < self.parts.len() || j < other.parts.len() {
            let take_left = j >= other.parts.len()
                || (i < self.parts.len() && self.parts[i].lo <= other.parts[j].lo);
            if take_left {
                push(self.parts[i], &mut parts);
                i += 1;
            } else {
                push(other.parts[j], &mut parts);
                j += 1;
            }
        }
        IntervalUnion { parts }
    }

    /// Total length of all parts.
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::width).sum()
    }

    /// True iff `[inner.lo + slack, inner.hi - slack]` is empty or covered by
    /// a single part.
    pub fn subset_with_slack(&self, inner: &Interval, slack: f64) -> bool {
        let lo = inner.lo + slack;
        let hi = inner.hi - slack;
        if lo > hi {
            return true;
        }
        let idx = self.parts.partition_point(|p| p.hi < lo);
        match self.parts.get(idx) {
            Some(part) => part.lo <= lo && hi <= part.hi,
            None => false,
        }
    }

    /// True iff every part of `inner` fits inside some part of `self` after
    /// widening that part by `ulps` grid steps on each side.
    pub fn contains_union_within_ulps(&self, inner: &IntervalUnion, ulps: u32) -> bool {
        inner.parts.iter().all(|p| {
            let idx = self.parts.partition_point(|q| q.hi < p.lo);
            let from = idx.saturating_sub(1);
            let to = (idx + 2).min(self.parts.len());
            self.parts[from..to].iter().any(|q| {
                let mut lo = q.lo;
                let mut hi = q.hi;
                for _ in 0..ulps {
                    lo = down1(lo);
                    hi = up1(hi);
                }
                lo <= p.lo && p.hi <= hi
            })
        })
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_encloses_exact_result() {
        let r = Interval::new(1.0, 2.0)
            .add(&Interval::new(3.0, 4.0))
            .unwrap();
        assert!(r.lo <= 4.0 && 6.0 <= r.hi);
        assert!(ulps_between(r.lo, 4.0) <= 2);
        assert!(ulps_between(r.hi, 6.0) <= 2);
    }

    #[test]
    fn mul_encloses_endpoint_products() {
        let a = Interval::new(2.0 / 9.0, 3.0 / 9.0);
        let b = Interval::new(6.0 / 9.0, 7.0 / 9.0);
        let r = a.mul(&b).unwrap();
        assert!(r.lo <= 12.0 / 81.0 && 21.0 / 81.0 <= r.hi);
        assert!(ulps_between(r.lo, 12.0 / 81.0) <= 4);
        assert!(ulps_between(r.hi, 21.0 / 81.0) <= 4);
    }

    #[test]
    fn div_by_interval_containing_zero_fails() {
        let err = Interval::point(1.0)
            .div(&Interval::new(0.0, 1.0))
            .unwrap_err();
        assert!(matches!(err, IntervalError::Domain { op: "div", .. }));
    }

    #[test]
    fn powi_handles_parity() {
        let a = Interval::new(-2.0, 1.5);
        let sq = a.powi(2).unwrap();
        assert!(sq.lo <= 0.0 && sq.hi >= 4.0);
        assert!(sq.lo >= -1e-300);
        let cube = a.powi(3).unwrap();
        assert!(cube.lo <= -8.0 && cube.hi >= 3.375);

        let inv = Interval::new(2.0, 4.0).powi(-2).unwrap();
        assert!(inv.lo <= 1.0 / 16.0 && inv.hi >= 1.0 / 4.0);
        assert!(Interval::new(-1.0, 2.0).powi(-1).is_err());
    }

    #[test]
    fn powr_requires_positive_base() {
        let half = Interval::point(0.5);
        let r = Interval::new(4.0, 9.0).powr(&half).unwrap();
        assert!(r.lo <= 2.0 && 3.0 <= r.hi);
        assert!(Interval::new(0.0, 1.0).powr(&half).is_err());
    }

    #[test]
    fn sqrt_ln_exp_domains() {
        assert!(Interval::new(-1.0, 1.0).sqrt().is_err());
        assert!(Interval::new(0.0, 1.0).ln().is_err());
        let e = Interval::point(1.0).exp().unwrap();
        assert!(e.contains(std::f64::consts::E));
        assert!(Interval::point(800.0).exp().is_err());
    }

    #[test]
    fn sin_cos_basic_ranges() {
        let pi = std::f64::consts::PI;
        let s = Interval::new(0.0, pi).sin().unwrap();
        assert!(s.hi >= 1.0 - 1e-15 && s.lo <= 1e-15);
        assert!((s.hi - 1.0).abs() < 1e-12);

        let c = Interval::new(0.0, pi).cos().unwrap();
        assert!(c.lo <= -1.0 + 1e-12 && c.hi >= 1.0 - 1e-12);

        // No critical point inside: monotone segment.
        let s2 = Interval::new(0.2, 0.5).sin().unwrap();
        assert!(s2.lo <= 0.2f64.sin() && 0.5f64.sin() <= s2.hi);
        assert!(s2.hi < 0.5);

        // Wide interval clamps to [-1, 1].
        let w = Interval::new(0.0, 100.0).sin().unwrap();
        assert_eq!((w.lo, w.hi), (-1.0, 1.0));
    }

    #[test]
    fn sin_cos_critical_points_across_periods() {
        let pi = std::f64::consts::PI;
        // sin maximum at pi/2 + 2*pi.
        let s = Interval::new(2.0 * pi + 1.0, 2.0 * pi + 2.0).sin().unwrap();
        assert_eq!(s.hi, 1.0);
        // cos minimum at -pi.
        let c = Interval::new(-3.5, -2.9).cos().unwrap();
        assert_eq!(c.lo, -1.0);
    }

    #[test]
    fn mul3_helpers_are_exact_when_possible() {
        assert_eq!(mul3_down(1.0), 3.0);
        assert_eq!(mul3_up(1.0), 3.0);
        assert_eq!(mul3_down(8.0 / 27.0), 3.0 * (8.0 / 27.0));
        let x = 0.1;
        assert!(mul3_down(x) <= 3.0 * x && 3.0 * x <= mul3_up(x));
        assert!(ulps_between(mul3_down(x), mul3_up(x)) <= 2);
    }

    #[test]
    fn union_insert_merges_and_measures() {
        let mut u = IntervalUnion::new();
        u.insert(Interval::new(0.0, 1.0 / 3.0));
        u.insert(Interval::new(4.0 / 9.0, 1.0));
        assert_eq!(u.parts().len(), 2);
        assert!((u.measure() - 8.0 / 9.0).abs() < 1e-15);

        // Touching intervals merge into one part.
        let mut t = IntervalUnion::new();
        t.insert(Interval::new(0.0, 2.0 / 3.0));
        t.insert(Interval::new(2.0 / 3.0, 4.0 / 3.0));
        assert_eq!(t.parts().len(), 1);
        assert_eq!(t.parts()[0], Interval::new(0.0, 4.0 / 3.0));

        // Absorption leaves the union unchanged.
        let before = u.clone();
        u.insert(Interval::new(0.5, 0.75));
        assert_eq!(u, before);
    }

    #[test]
    fn union_subset_with_slack() {
        let u = IntervalUnion::from_intervals([
            Interval::new(0.0, 1.0 / 3.0),
            Interval::new(4.0 / 9.0, 1.0),
        ]);
        assert!(u.subset_with_slack(&Interval::new(0.2, 0.23), 0.0));
        assert!(!u.subset_with_slack(&Interval::new(0.3, 0.5), 0.0));
        // Empty after shrinking.
        assert!(u.subset_with_slack(&Interval::new(0.33, 0.34), 0.01));
        // Shrunk interval straddles the gap edge.
        assert!(!u.subset_with_slack(&Interval::new(0.32, 0.36), 0.01));
    }

    #[test]
    fn union_bulk_equals_insertion() {
        let items = [
            Interval::new(0.4, 0.6),
            Interval::new(0.0, 0.1),
            Interval::new(0.05, 0.45),
            Interval::new(0.9, 1.0),
        ];
        let bulk = IntervalUnion::from_intervals(items);
        let mut one_by_one = IntervalUnion::new();
        for v in items {
            one_by_one.insert(v);
        }
        assert_eq!(bulk, one_by_one);
        let merged = IntervalUnion::from_intervals(items[..2].to_vec())
            .merge(&IntervalUnion::from_intervals(items[2..].to_vec()));
        assert_eq!(bulk, merged);
    }

    #[test]
    fn ulps_distance_behaves_near_zero() {
        assert_eq!(ulps_between(0.0, -0.0), 0);
        assert_eq!(ulps_between(0.0, f64::MIN_POSITIVE.min(5e-324)), 1);
        assert_eq!(ulps_between(1.0, 1.0 + f64::EPSILON), 1);
        assert_eq!(ulps_between(-5e-324, 5e-324), 2);
    }
}
