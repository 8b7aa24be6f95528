//! Randomized property suites: enclosure soundness of every interval
//! operation, inclusion monotonicity, union canonicality, symbolic
//! derivatives against finite differences, and search determinism across
//! worker pools.

use cantorcert::certify::{search, SearchParams};
use cantorcert::expr::{differentiate, parse};
use cantorcert::interval::{Box2, Interval, IntervalUnion};

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const COROLLARY_FUNCTIONS: [&str; 6] = [
    "x^2*y",
    "x^2 + y^2",
    "x^2 - y^2",
    "x + y^2",
    "x - y^2",
    "sin(x)*cos(y)",
];

/// Ops under test, with their domain restrictions baked into the sampler.
#[derive(Clone, Copy, Debug)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    PowSquare,
    PowCube,
    PowInvSquare,
    PowHalf,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

const ALL_OPS: [Op; 14] = [
    Op::Add,
    Op::Sub,
    Op::Mul,
    Op::Div,
    Op::Neg,
    Op::PowSquare,
    Op::PowCube,
    Op::PowInvSquare,
    Op::PowHalf,
    Op::Sin,
    Op::Cos,
    Op::Exp,
    Op::Ln,
    Op::Sqrt,
];

fn sample_interval(rng: &mut ChaCha8Rng, lo_min: f64, lo_max: f64, max_width: f64) -> Interval {
    let lo = rng.random_range(lo_min..lo_max);
    let width = rng.random_range(0.0..max_width);
    Interval::new(lo, lo + width)
}

fn sample_point(rng: &mut ChaCha8Rng, iv: &Interval) -> f64 {
    let t: f64 = rng.random_range(0.0..=1.0);
    (iv.lo() + t * iv.width()).clamp(iv.lo(), iv.hi())
}

/// Applies the op to intervals and to a point inside them, returning both.
fn apply(op: Op, rng: &mut ChaCha8Rng) -> (Interval, f64) {
    match op {
        Op::Add | Op::Sub | Op::Mul | Op::Div => {
            let a = sample_interval(rng, -10.0, 10.0, 5.0);
            let b = if matches!(op, Op::Div) {
                // Denominator bounded away from zero.
                let base = sample_interval(rng, 0.5, 10.0, 5.0);
                if rng.random_bool(0.5) {
                    base.neg()
                } else {
                    base
                }
            } else {
                sample_interval(rng, -10.0, 10.0, 5.0)
            };
            let pa = sample_point(rng, &a);
            let pb = sample_point(rng, &b);
            let (encl, val) = match op {
                Op::Add => (a.add(&b), pa + pb),
                Op::Sub => (a.sub(&b), pa - pb),
                Op::Mul => (a.mul(&b), pa * pb),
                Op::Div => (a.div(&b), pa / pb),
                _ => unreachable!(),
            };
            (encl.unwrap(), val)
        }
        Op::Neg => {
            let a = sample_interval(rng, -10.0, 10.0, 5.0);
            let p = sample_point(rng, &a);
            (a.neg(), -p)
        }
        Op::PowSquare | Op::PowCube => {
            let a = sample_interval(rng, -4.0, 4.0, 3.0);
            let p = sample_point(rng, &a);
            if matches!(op, Op::PowSquare) {
                (a.powi(2).unwrap(), p * p)
            } else {
                (a.powi(3).unwrap(), p * p * p)
            }
        }
        Op::PowInvSquare => {
            let a = sample_interval(rng, 0.25, 6.0, 3.0);
            let p = sample_point(rng, &a);
            (a.powi(-2).unwrap(), 1.0 / (p * p))
        }
        Op::PowHalf => {
            let a = sample_interval(rng, 0.01, 8.0, 4.0);
            let p = sample_point(rng, &a);
            (a.powr(&Interval::point(0.5)).unwrap(), p.sqrt())
        }
        Op::Sin | Op::Cos => {
            let a = sample_interval(rng, -12.0, 12.0, 6.0);
            let p = sample_point(rng, &a);
            if matches!(op, Op::Sin) {
                (a.sin().unwrap(), p.sin())
            } else {
                (a.cos().unwrap(), p.cos())
            }
        }
        Op::Exp => {
            let a = sample_interval(rng, -20.0, 20.0, 8.0);
            let p = sample_point(rng, &a);
            (a.exp().unwrap(), p.exp())
        }
        Op::Ln => {
            let a = sample_interval(rng, 1e-6, 20.0, 8.0);
            let p = sample_point(rng, &a);
            (a.ln().unwrap(), p.ln())
        }
        Op::Sqrt => {
            let a = sample_interval(rng, 0.0, 20.0, 8.0);
            let p = sample_point(rng, &a);
            (a.sqrt().unwrap(), p.sqrt())
        }
    }
}

#[test]
fn enclosure_soundness_for_every_op() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut violations = 0u32;
    for op in ALL_OPS {
        for _ in 0..1000 {
            let (encl, val) = apply(op, &mut rng);
            if !encl.contains(val) {
                violations += 1;
                eprintln!("violation: {op:?} value {val} outside {encl}");
            }
        }
    }
    assert_eq!(violations, 0, "enclosure soundness violations");
}

/// Shrinks an interval to a random subinterval.
fn shrink(rng: &mut ChaCha8Rng, iv: &Interval) -> Interval {
    let a: f64 = rng.random_range(0.0..=0.5);
    let b: f64 = rng.random_range(0.5..=1.0);
    let lo = iv.lo() + a * iv.width();
    let hi = iv.lo() + b * iv.width();
    Interval::new(lo.min(hi), hi.max(lo))
}

#[test]
fn inclusion_monotonicity_on_nested_intervals() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..2000 {
        let outer_a = sample_interval(&mut rng, -8.0, 8.0, 4.0);
        let outer_b = sample_interval(&mut rng, 0.5, 8.0, 4.0);
        let inner_a = shrink(&mut rng, &outer_a);
        let inner_b = shrink(&mut rng, &outer_b);

        let pairs = [
            (inner_a.add(&inner_b), outer_a.add(&outer_b)),
            (inner_a.sub(&inner_b), outer_a.sub(&outer_b)),
            (inner_a.mul(&inner_b), outer_a.mul(&outer_b)),
            (inner_a.div(&inner_b), outer_a.div(&outer_b)),
            (inner_a.powi(2), outer_a.powi(2)),
            (inner_a.powi(3), outer_a.powi(3)),
            (inner_b.ln(), outer_b.ln()),
            (inner_b.sqrt(), outer_b.sqrt()),
            (inner_a.sin(), outer_a.sin()),
            (inner_a.cos(), outer_a.cos()),
        ];
        for (i, (inner, outer)) in pairs.into_iter().enumerate() {
            let inner = inner.unwrap();
            let outer = outer.unwrap();
            assert!(
                outer.contains_interval(&inner),
                "case {i}: {inner} not inside {outer}"
            );
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let h = 1e-6;
    for text in COROLLARY_FUNCTIONS {
        let g = differentiate(&parse(text).unwrap()).unwrap();
        for _ in 0..100 {
            let x: f64 = rng.random_range(0.1..0.9);
            let y: f64 = rng.random_range(0.1..0.9);
            let fd_x = (g.f.eval_point(x + h, y).unwrap() - g.f.eval_point(x - h, y).unwrap())
                / (2.0 * h);
            let fd_y = (g.f.eval_point(x, y + h).unwrap() - g.f.eval_point(x, y - h).unwrap())
                / (2.0 * h);
            let sym_x = g.fx.eval_point(x, y).unwrap();
            let sym_y = g.fy.eval_point(x, y).unwrap();
            let rel_x = (fd_x - sym_x).abs() / sym_x.abs().max(1e-12);
            let rel_y = (fd_y - sym_y).abs() / sym_y.abs().max(1e-12);
            assert!(rel_x <= 1e-6, "{text} fx at ({x}, {y}): rel {rel_x}");
            assert!(rel_y <= 1e-6, "{text} fy at ({x}, {y}): rel {rel_y}");
        }
    }
}

#[test]
fn point_evaluation_lies_in_degenerate_interval_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let corpus = [
        "x*y",
        "x + y^2",
        "sin(x)*cos(y)",
        "exp(x - y)",
        "ln(x + 1)*y",
        "sqrt(x) + sqrt(y)",
        "x^0.5*y^2",
        "(x + y)/(1 + x*y)",
    ];
    for text in corpus {
        let e = parse(text).unwrap();
        for _ in 0..200 {
            let x: f64 = rng.random_range(0.01..1.0);
            let y: f64 = rng.random_range(0.01..1.0);
            let v = e.eval_point(x, y).unwrap();
            let encl = e
                .eval_interval(&Box2::new(Interval::point(x), Interval::point(y)))
                .unwrap();
            assert!(encl.contains(v), "{text} at ({x}, {y}): {v} outside {encl}");
        }
    }
}

#[test]
fn parser_roundtrip_over_a_corpus() {
    let corpus = [
        "x*y",
        "sin(x)*cos(y)",
        "x + y^2",
        "x - y^2",
        "x^2*y",
        "x^2 + y^2",
        "x^2 - y^2",
        "x^0.5*y^0.25",
        "x^-2 + y^-1",
        "exp(x)*ln(y)",
        "sqrt(x*y + 1)",
        "pi*x + e*y",
        "-x - -y",
        "(x + y)*(x - y)",
        "x/y/3",
        "x^y^2",
        "2^x",
        "0.125*x + 1/3*y",
        "cos(pi*x)",
        "x - y - 1",
    ];
    assert_eq!(corpus.len(), 20);
    for text in corpus {
        let once = parse(text).unwrap();
        let twice = parse(&once.to_string()).unwrap();
        assert_eq!(once, twice, "{text} printed as {once}");
    }
}

#[test]
fn search_is_deterministic_across_worker_pools() {
    for text in ["x*y", "sin(x)*cos(y)", "x^2 + y^2", "x + y^2"] {
        let g = differentiate(&parse(text).unwrap()).unwrap();
        let mut outcomes = Vec::new();
        for workers in [1usize, 2, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            let params = SearchParams {
                workers,
                ..SearchParams::default()
            };
            let result = pool.install(|| search(&g, &Box2::unit(), &params));
            let cert = result.first().expect("certificate");
            outcomes.push((
                cert.square.x().word().to_string(),
                cert.square.y().word().to_string(),
                cert.image.lo().to_bits(),
                cert.image.hi().to_bits(),
                result.stats,
            ));
        }
        assert_eq!(outcomes[0], outcomes[1], "{text}: 1 vs 2 workers");
        assert_eq!(outcomes[0], outcomes[2], "{text}: 1 vs 8 workers");
    }
}

fn interval_strategy() -> impl Strategy<Value = Interval> {
    (-100.0f64..100.0, 0.0f64..50.0).prop_map(|(lo, w)| Interval::new(lo, lo + w))
}

proptest! {
    #[test]
    fn union_measure_is_order_independent(
        intervals in prop::collection::vec(interval_strategy(), 0..40),
        shuffled in Just(()).prop_perturb(|_, mut rng| rng.random::<u64>()),
    ) {
        let forward = IntervalUnion::from_intervals(intervals.clone());

        // A deterministic permutation derived from the perturbation seed.
        let mut permuted = intervals.clone();
        let mut state = shuffled;
        for i in (1..permuted.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state % (i as u64 + 1)) as usize;
            permuted.swap(i, j);
        }
        let backward = IntervalUnion::from_intervals(permuted);
        prop_assert_eq!(&forward, &backward);

        // Insertion one by one matches the bulk construction.
        let mut inserted = IntervalUnion::new();
        for v in &intervals {
            inserted.insert(*v);
        }
        prop_assert_eq!(&forward, &inserted);
    }

    #[test]
    fn union_insert_bounds_the_measure(
        intervals in prop::collection::vec(interval_strategy(), 0..20),
        extra in interval_strategy(),
    ) {
        let mut u = IntervalUnion::from_intervals(intervals);
        let before = u.measure();
        u.insert(extra);
        let after = u.measure();
        prop_assert!(after <= before + extra.width() + 1e-9);
        prop_assert!(after >= before - 1e-9);
    }

    #[test]
    fn union_parts_stay_canonical(
        intervals in prop::collection::vec(interval_strategy(), 0..40),
    ) {
        let u = IntervalUnion::from_intervals(intervals);
        for w in u.parts().windows(2) {
            // Strictly positive gaps between consecutive parts.
            prop_assert!(w[0].hi() < w[1].lo());
        }
    }
}

#[test]
fn constant_expressions_stay_constant_under_boxes() {
    // Enclosures of variable-free expressions do not depend on the box.
    let e = parse("pi*e + 1/3").unwrap();
    let a = e.eval_interval(&Box2::unit()).unwrap();
    let b = e
        .eval_interval(&Box2::new(
            Interval::new(-5.0, 5.0),
            Interval::new(2.0, 3.0),
        ))
        .unwrap();
    assert_eq!(a, b);
    let v = std::f64::consts::PI * std::f64::consts::E + 1.0 / 3.0;
    assert!(a.contains(v));
}
