//! Expression trees for two-variable functions `f(x, y)`: parsing, symbolic
//! partial derivatives, pointwise evaluation, and interval evaluation over
//! boxes (the natural interval extension).

pub mod parse;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::interval::{Box2, Interval, IntervalError};
use crate::triadic::rational_to_f64_enclosure;

pub use parse::{parse, ParseError};

/// Evaluation shares the interval module's error shape.
pub type EvalError = IntervalError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error("not differentiable: {detail}")]
    NotDifferentiable { detail: String },
}

/// The two input variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// An exact rational constant with its cached `f64` enclosure.
#[derive(Debug, Clone)]
pub struct Constant {
    value: BigRational,
    encl: Interval,
}

impl Constant {
    pub fn new(value: BigRational) -> Self {
        let encl = rational_to_f64_enclosure(&value);
        Constant { value, encl }
    }

    pub fn from_int(n: i64) -> Self {
        Constant::new(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn enclosure(&self) -> Interval {
        self.encl
    }
}

impl PartialEq for Constant {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for Constant {}

/// Expression AST. Build composite nodes through the smart constructors,
/// which apply the light simplifications `0*u -> 0`, `u+0 -> u`, `u*1 -> u`
/// and fold rational constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(Constant),
    Pi,
    E,
    Var(Axis),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn num(value: BigRational) -> Expr {
        Expr::Num(Constant::new(value))
    }

    pub fn num_int(n: i64) -> Expr {
        Expr::Num(Constant::from_int(n))
    }

    pub fn var(axis: Axis) -> Expr {
        Expr::Var(axis)
    }

    fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Expr::Num(c) => Some(&c.value),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_rational().is_some_and(Zero::is_zero)
    }

    fn is_one(&self) -> bool {
        self.as_rational().is_some_and(One::is_one)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
            return Expr::num(x + y);
        }
        Expr::Add(a.into(), b.into())
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
            return Expr::num(x - y);
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        Expr::Sub(a.into(), b.into())
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::num_int(0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
            return Expr::num(x * y);
        }
        Expr::Mul(a.into(), b.into())
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_one() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
            if !y.is_zero() {
                return Expr::num(x / y);
            }
        }
        Expr::Div(a.into(), b.into())
    }

    pub fn neg(a: Expr) -> Expr {
        if let Some(x) = a.as_rational() {
            return Expr::num(-x);
        }
        Expr::Neg(a.into())
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if exponent.is_one() {
            return base;
        }
        if exponent.is_zero() {
            // x^0 = 1 under the usual floating-point convention 0^0 = 1.
            return Expr::num_int(1);
        }
        if let (Some(b), Some(e)) = (base.as_rational(), exponent.as_rational()) {
            if e.is_integer() {
                if let Some(n) = e.to_i32() {
                    if n.unsigned_abs() <= 64 && !(b.is_zero() && n < 0) {
                        let powered = power_rational(b, n);
                        return Expr::num(powered);
                    }
                }
            }
        }
        Expr::Pow(base.into(), exponent.into())
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(a.into())
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::Cos(a.into())
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(a.into())
    }

    pub fn ln(a: Expr) -> Expr {
        Expr::Ln(a.into())
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt(a.into())
    }

    /// True iff the subtree contains no variables.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::E => true,
            Expr::Var(_) => false,
            Expr::Neg(u) | Expr::Sin(u) | Expr::Cos(u) | Expr::Exp(u) | Expr::Ln(u)
            | Expr::Sqrt(u) => u.is_constant(),
            Expr::Add(u, v) | Expr::Sub(u, v) | Expr::Mul(u, v) | Expr::Div(u, v)
            | Expr::Pow(u, v) => u.is_constant() && v.is_constant(),
        }
    }

    /// Pointwise `f64` evaluation; used for heuristics and sampling only.
    pub fn eval_point(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(c) => c.encl.midpoint(),
            Expr::Pi => std::f64::consts::PI,
            Expr::E => std::f64::consts::E,
            Expr::Var(Axis::X) => x,
            Expr::Var(Axis::Y) => y,
            Expr::Neg(u) => -u.eval_point(x, y)?,
            Expr::Add(u, v) => u.eval_point(x, y)? + v.eval_point(x, y)?,
            Expr::Sub(u, v) => u.eval_point(x, y)? - v.eval_point(x, y)?,
            Expr::Mul(u, v) => u.eval_point(x, y)? * v.eval_point(x, y)?,
            Expr::Div(u, v) => {
                let d = v.eval_point(x, y)?;
                if d == 0.0 {
                    return Err(point_domain("div", "division by zero"));
                }
                u.eval_point(x, y)? / d
            }
            Expr::Pow(u, v) => {
                let base = u.eval_point(x, y)?;
                match exponent_kind(v) {
                    ExponentKind::Integer(n) => {
                        if base == 0.0 && n < 0 {
                            return Err(point_domain("pow", "zero base, negative exponent"));
                        }
                        base.powi(n)
                    }
                    _ => {
                        let e = v.eval_point(x, y)?;
                        if base < 0.0 {
                            return Err(point_domain(
                                "pow",
                                "negative base with non-integer exponent",
                            ));
                        }
                        if base == 0.0 && e < 0.0 {
                            return Err(point_domain("pow", "zero base, negative exponent"));
                        }
                        base.powf(e)
                    }
                }
            }
            Expr::Sin(u) => u.eval_point(x, y)?.sin(),
            Expr::Cos(u) => u.eval_point(x, y)?.cos(),
            Expr::Exp(u) => u.eval_point(x, y)?.exp(),
            Expr::Ln(u) => {
                let a = u.eval_point(x, y)?;
                if a <= 0.0 {
                    return Err(point_domain("ln", "argument not positive"));
                }
                a.ln()
            }
            Expr::Sqrt(u) => {
                let a = u.eval_point(x, y)?;
                if a < 0.0 {
                    return Err(point_domain("sqrt", "argument below zero"));
                }
                a.sqrt()
            }
        };
        if v.is_nan() {
            return Err(point_domain("eval", "result is NaN"));
        }
        if !v.is_finite() {
            return Err(EvalError::Overflow { op: "eval" });
        }
        Ok(v)
    }

    /// Natural interval extension over a box; the result encloses every value
    /// of the expression on the box.
    pub fn eval_interval(&self, b: &Box2) -> Result<Interval, EvalError> {
        match self {
            Expr::Num(c) => Ok(c.encl),
            Expr::Pi => Ok(Interval::new(
                crate::interval::pi_lo(),
                crate::interval::pi_hi(),
            )),
            Expr::E => Ok(Interval::new(
                std::f64::consts::E,
                std::f64::consts::E.next_up(),
            )),
            Expr::Var(Axis::X) => Ok(b.x),
            Expr::Var(Axis::Y) => Ok(b.y),
            Expr::Neg(u) => Ok(u.eval_interval(b)?.neg()),
            Expr::Add(u, v) => u.eval_interval(b)?.add(&v.eval_interval(b)?),
            Expr::Sub(u, v) => u.eval_interval(b)?.sub(&v.eval_interval(b)?),
            Expr::Mul(u, v) => u.eval_interval(b)?.mul(&v.eval_interval(b)?),
            Expr::Div(u, v) => u.eval_interval(b)?.div(&v.eval_interval(b)?),
            Expr::Pow(u, v) => {
                let base = u.eval_interval(b)?;
                match exponent_kind(v) {
                    ExponentKind::Integer(n) => base.powi(n),
                    ExponentKind::Constant => {
                        let encl = v.eval_interval(b)?;
                        base.powr(&encl)
                    }
                    ExponentKind::Dynamic => {
                        let e = v.eval_interval(b)?;
                        base.ln()?.mul(&e)?.exp()
                    }
                }
            }
            Expr::Sin(u) => u.eval_interval(b)?.sin(),
            Expr::Cos(u) => u.eval_interval(b)?.cos(),
            Expr::Exp(u) => u.eval_interval(b)?.exp(),
            Expr::Ln(u) => u.eval_interval(b)?.ln(),
            Expr::Sqrt(u) => u.eval_interval(b)?.sqrt(),
        }
    }
}

fn point_domain(op: &'static str, detail: &str) -> EvalError {
    EvalError::Domain {
        op,
        detail: detail.to_string(),
    }
}

enum ExponentKind {
    /// A literal integer exponent; negative bases allowed by parity.
    Integer(i32),
    /// Variable-free but not an integer; requires a positive base.
    Constant,
    /// Depends on x or y; evaluated via exp(v ln u).
    Dynamic,
}

fn exponent_kind(v: &Expr) -> ExponentKind {
    if let Some(r) = v.as_rational() {
        if r.is_integer() {
            if let Some(n) = r.to_i32() {
                return ExponentKind::Integer(n);
            }
        }
        return ExponentKind::Constant;
    }
    if v.is_constant() {
        ExponentKind::Constant
    } else {
        ExponentKind::Dynamic
    }
}

fn power_rational(base: &BigRational, n: i32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n.unsigned_abs() {
        acc *= base;
    }
    if n < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// An expression together with its two symbolic partial derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradTriple {
    pub f: Expr,
    pub fx: Expr,
    pub fy: Expr,
}

/// Computes both symbolic partial derivatives with light simplification.
pub fn differentiate(e: &Expr) -> Result<GradTriple, DiffError> {
    Ok(GradTriple {
        f: e.clone(),
        fx: derivative(e, Axis::X)?,
        fy: derivative(e, Axis::Y)?,
    })
}

fn derivative(e: &Expr, axis: Axis) -> Result<Expr, DiffError> {
    Ok(match e {
        Expr::Num(_) | Expr::Pi | Expr::E => Expr::num_int(0),
        Expr::Var(a) => Expr::num_int(if *a == axis { 1 } else { 0 }),
        Expr::Neg(u) => Expr::neg(derivative(u, axis)?),
        Expr::Add(u, v) => Expr::add(derivative(u, axis)?, derivative(v, axis)?),
        Expr::Sub(u, v) => Expr::sub(derivative(u, axis)?, derivative(v, axis)?),
        Expr::Mul(u, v) => {
            let du = derivative(u, axis)?;
            let dv = derivative(v, axis)?;
            Expr::add(
                Expr::mul(du, (**v).clone()),
                Expr::mul((**u).clone(), dv),
            )
        }
        Expr::Div(u, v) => {
            let du = derivative(u, axis)?;
            let dv = derivative(v, axis)?;
            Expr::div(
                Expr::sub(
                    Expr::mul(du, (**v).clone()),
                    Expr::mul((**u).clone(), dv),
                ),
                Expr::pow((**v).clone(), Expr::num_int(2)),
            )
        }
        Expr::Pow(u, v) => {
            let du = derivative(u, axis)?;
            if v.is_constant() {
                // Power rule: d u^c = c * u^(c-1) * du.
                let exponent_minus_one = Expr::sub((**v).clone(), Expr::num_int(1));
                Expr::mul(
                    Expr::mul((**v).clone(), Expr::pow((**u).clone(), exponent_minus_one)),
                    du,
                )
            } else {
                // u^v = exp(v ln u); valid on u > 0, which evaluation enforces.
                if let Some(b) = u.as_rational() {
                    if !b.is_positive() {
                        return Err(DiffError::NotDifferentiable {
                            detail: format!(
                                "pow with non-constant exponent over non-positive base {b}"
                            ),
                        });
                    }
                }
                let dv = derivative(v, axis)?;
                Expr::mul(
                    e.clone(),
                    Expr::add(
                        Expr::mul(dv, Expr::ln((**u).clone())),
                        Expr::div(Expr::mul((**v).clone(), du), (**u).clone()),
                    ),
                )
            }
        }
        Expr::Sin(u) => Expr::mul(Expr::cos((**u).clone()), derivative(u, axis)?),
        Expr::Cos(u) => Expr::mul(
            Expr::neg(Expr::sin((**u).clone())),
            derivative(u, axis)?,
        ),
        Expr::Exp(u) => Expr::mul(e.clone(), derivative(u, axis)?),
        Expr::Ln(u) => Expr::div(derivative(u, axis)?, (**u).clone()),
        Expr::Sqrt(u) => Expr::div(
            derivative(u, axis)?,
            Expr::mul(Expr::num_int(2), Expr::sqrt((**u).clone())),
        ),
    })
}

// Precedence levels for printing: addition 1, multiplication 2, unary minus
// 3, power 4, atoms 5.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(c) if c.value.is_negative() => 3,
        _ => 5,
    }
}

fn write_at(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = precedence(e);
    if prec < min_prec {
        write!(f, "(")?;
        write_at(e, 0, f)?;
        return write!(f, ")");
    }
    match e {
        Expr::Num(c) => write_rational(&c.value, f),
        Expr::Pi => write!(f, "pi"),
        Expr::E => write!(f, "e"),
        Expr::Var(a) => write!(f, "{}", a.label()),
        Expr::Neg(u) => {
            write!(f, "-")?;
            write_at(u, 3, f)
        }
        Expr::Add(u, v) => {
            write_at(u, 1, f)?;
            write!(f, " + ")?;
            write_at(v, 2, f)
        }
        Expr::Sub(u, v) => {
            write_at(u, 1, f)?;
            write!(f, " - ")?;
            write_at(v, 2, f)
        }
        Expr::Mul(u, v) => {
            write_at(u, 2, f)?;
            write!(f, "*")?;
            write_at(v, 3, f)
        }
        Expr::Div(u, v) => {
            write_at(u, 2, f)?;
            write!(f, "/")?;
            write_at(v, 3, f)
        }
        Expr::Pow(u, v) => {
            write_at(u, 5, f)?;
            write!(f, "^")?;
            write_at(v, 3, f)
        }
        Expr::Sin(u) => write_func("sin", u, f),
        Expr::Cos(u) => write_func("cos", u, f),
        Expr::Exp(u) => write_func("exp", u, f),
        Expr::Ln(u) => write_func("ln", u, f),
        Expr::Sqrt(u) => write_func("sqrt", u, f),
    }
}

fn write_func(name: &str, arg: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{name}(")?;
    write_at(arg, 0, f)?;
    write!(f, ")")
}

/// Prints a rational so that re-parsing recovers the same folded constant:
/// integers plainly, terminating decimals as decimals, everything else as a
/// parenthesized quotient.
fn write_rational(value: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if value.is_negative() {
        write!(f, "-")?;
        return write_rational(&-value, f);
    }
    if value.is_integer() {
        return write!(f, "{}", value.numer());
    }
    let mut denom = value.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if denom.is_one() {
        let k = twos.max(fives);
        let scale = BigInt::from(10).pow(k);
        let scaled = value.numer() * &scale / value.denom();
        let digits = scaled.to_string();
        let k = k as usize;
        if digits.len() > k {
            let (int_part, frac_part) = digits.split_at(digits.len() - k);
            write!(f, "{int_part}.{frac_part}")
        } else {
            write!(f, "0.{}{}", "0".repeat(k - digits.len()), digits)
        }
    } else {
        write!(f, "({}/{})", value.numer(), value.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn differentiates_products_of_variables() {
        let g = differentiate(&p("x*y")).unwrap();
        assert_eq!(g.fx, p("y"));
        assert_eq!(g.fy, p("x"));
    }

    #[test]
    fn differentiates_the_parabola_family() {
        let g = differentiate(&p("x + y^2")).unwrap();
        assert_eq!(g.fx, p("1"));
        assert_eq!(g.fy, p("2*y"));
    }

    #[test]
    fn differentiates_sin_cos_products() {
        let g = differentiate(&p("sin(x)*cos(y)")).unwrap();
        assert_eq!(g.fx, p("cos(x)*cos(y)"));
        assert_eq!(g.fy, p("sin(x)*(-sin(y))"));
    }

    #[test]
    fn general_power_rewrites_via_exp_ln() {
        // x^y differentiates through exp(y ln x).
        let g = differentiate(&p("x^y")).unwrap();
        let v = g.fx.eval_point(2.0, 3.0).unwrap();
        // d/dx x^y = y x^(y-1) = 3 * 4 = 12.
        assert!((v - 12.0).abs() < 1e-9);

        // A non-positive constant base cannot take a variable exponent.
        let err = differentiate(&p("(0-2)^x")).unwrap_err();
        assert!(matches!(err, DiffError::NotDifferentiable { .. }));
    }

    #[test]
    fn point_evaluation_matches_arithmetic() {
        let e = p("x*y");
        let v = e.eval_point(1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert!((v - 2.0 / 9.0).abs() < 1e-15);

        let g = differentiate(&p("sin(x)*cos(y)")).unwrap();
        let fx = g.fx.eval_point(2.0 / 3.0, 2.0 / 3.0).unwrap().abs();
        let fy = g.fy.eval_point(2.0 / 3.0, 2.0 / 3.0).unwrap().abs();
        assert!((fx - 0.6176).abs() < 5e-4);
        assert!((fy - 0.3823).abs() < 5e-4);

        assert!(matches!(
            p("ln(x)").eval_point(0.0, 0.0),
            Err(EvalError::Domain { op: "ln", .. })
        ));
    }

    #[test]
    fn interval_evaluation_encloses_ranges() {
        let unit = Box2::unit();
        let sum = p("x + y").eval_interval(&unit).unwrap();
        assert!(sum.lo() <= 0.0 && 2.0 <= sum.hi());

        // A projection: the enclosure of y over a box is the y side.
        let ydir = p("y");
        let b = Box2::new(
            Interval::new(8.0 / 27.0, 9.0 / 27.0),
            Interval::new(18.0 / 27.0, 19.0 / 27.0),
        );
        let r = ydir.eval_interval(&b).unwrap();
        assert!(r.lo() <= 18.0 / 27.0 && 19.0 / 27.0 <= r.hi());

        assert!(matches!(
            p("1/x").eval_interval(&unit),
            Err(EvalError::Domain { op: "div", .. })
        ));
    }

    #[test]
    fn pi_and_e_enclosures_contain_the_constants() {
        let unit = Box2::unit();
        let pi_encl = Expr::Pi.eval_interval(&unit).unwrap();
        let pi_lo_bound =
            BigRational::from_str("314159265358979323846/100000000000000000000").unwrap();
        let pi_hi_bound =
            BigRational::from_str("314159265358979323847/100000000000000000000").unwrap();
        assert!(BigRational::from_float(pi_encl.lo()).unwrap() < pi_lo_bound);
        assert!(BigRational::from_float(pi_encl.hi()).unwrap() > pi_hi_bound);

        let e_encl = Expr::E.eval_interval(&unit).unwrap();
        let e_lo_bound =
            BigRational::from_str("271828182845904523536/100000000000000000000").unwrap();
        let e_hi_bound =
            BigRational::from_str("271828182845904523537/100000000000000000000").unwrap();
        assert!(BigRational::from_float(e_encl.lo()).unwrap() < e_lo_bound);
        assert!(BigRational::from_float(e_encl.hi()).unwrap() > e_hi_bound);
    }

    #[test]
    fn fractional_powers_need_positive_bases() {
        let e = p("x^0.5");
        let b = Box2::new(Interval::new(4.0, 9.0), Interval::new(0.0, 1.0));
        let r = e.eval_interval(&b).unwrap();
        assert!(r.lo() <= 2.0 && 3.0 <= r.hi());

        let touching_zero = Box2::new(Interval::new(0.0, 1.0), Interval::new(0.0, 1.0));
        assert!(e.eval_interval(&touching_zero).is_err());

        // Integer exponents keep negative bases by parity.
        let cube = p("x^3");
        let neg = Box2::new(Interval::new(-2.0, -1.0), Interval::new(0.0, 1.0));
        let r = cube.eval_interval(&neg).unwrap();
        assert!(r.lo() <= -8.0 && -1.0 <= r.hi());
    }

    #[test]
    fn printing_reparses_structurally() {
        for s in [
            "x*y",
            "sin(x)*cos(y)",
            "x + y^2",
            "x - y^2",
            "x^2*y",
            "x^2 - y^2",
            "-x - -y",
            "(x + y)*(x - y)",
            "x^y^2",
            "1/3*x",
            "0.125 + x",
            "x^-2",
        ] {
            let once = p(s);
            let twice = parse(&once.to_string()).unwrap();
            assert_eq!(once, twice, "printing {s} as {once}");
        }
    }
}
