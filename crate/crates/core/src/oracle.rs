//! Brute-force finite-depth ground truth used to validate certificates:
//! outer covers of `f(C, C)` built from every basic square of a given rank,
//! inner samples at exact Cantor lattice points, a density hit test over a
//! certified image, and the refinement-recursion check that re-derives the
//! certified image level by level.

use rayon::prelude::*;
use thiserror::Error;

use crate::certify::{eval_at_corner, Certificate};
use crate::expr::{EvalError, Expr, GradTriple};
use crate::interval::{Box2, Interval, IntervalUnion};
use crate::triadic::{intervals_of_rank, BasicSquare, RankCap, TriadicError};

/// Cost bounds for oracle runs; exceeding either is an explicit error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub rank_cap: RankCap,
    pub square_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            rank_cap: RankCap::default(),
            square_budget: 50_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Triadic(#[from] TriadicError),
    #[error("square budget exceeded: {required} squares needed, budget {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("sample depth {depth} is below the square rank {rank}")]
    DepthBelowRank { depth: u32, rank: u32 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("refinement lost a certified condition on square {square}: {reason}")]
    ConditionLost { square: String, reason: String },
}

/// Outer cover of the image at one subdivision depth.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport {
    pub depth: u32,
    pub cover: IntervalUnion,
    pub measure: f64,
    pub squares_visited: u64,
}

impl CoverReport {
    /// CSV export of the cover parts, columns `lo,hi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lo,hi\n");
        for part in self.cover.parts() {
            out.push_str(&format!("{:.16e},{:.16e}\n", part.lo(), part.hi()));
        }
        out
    }
}

fn check_budget(required: u64, limits: &OracleLimits) -> Result<(), OracleError> {
    if required > limits.square_budget {
        return Err(OracleError::BudgetExceeded {
            required,
            budget: limits.square_budget,
        });
    }
    Ok(())
}

/// Union of interval enclosures over every rank-`n` basic square that
/// intersects `region`; an outer approximation of `f((C×C) ∩ region)`.
pub fn depth_cover(
    e: &Expr,
    n: u32,
    region: &Box2,
    limits: &OracleLimits,
) -> Result<CoverReport, OracleError> {
    if n > limits.rank_cap.0 {
        return Err(TriadicError::RankCapExceeded {
            rank: n,
            cap: limits.rank_cap.0,
        }
        .into());
    }
    // Conservative pre-check before enumerating anything.
    let worst = 1u128 << (2 * n.min(63));
    check_budget(worst.min(u64::MAX as u128) as u64, limits)?;

    let xs = intervals_of_rank(n, &region.x, limits.rank_cap)?;
    let ys = intervals_of_rank(n, &region.y, limits.rank_cap)?;
    let visited = xs.len() as u64 * ys.len() as u64;
    check_budget(visited, limits)?;

    let x_boxes: Vec<Interval> = xs.iter().map(|iv| iv.to_f64_enclosure()).collect();
    let y_boxes: Vec<Interval> = ys.iter().map(|iv| iv.to_f64_enclosure()).collect();

    let cover = x_boxes
        .par_iter()
        .map(|&bx| {
            let mut images = Vec::with_capacity(y_boxes.len());
            for &by in &y_boxes {
                images.push(e.eval_interval(&Box2::new(bx, by))?);
            }
            Ok(IntervalUnion::from_intervals(images))
        })
        .try_reduce(IntervalUnion::new, |a, b| Ok(a.merge(&b)))
        .map_err(OracleError::Eval)?;

    let measure = cover.measure();
    Ok(CoverReport {
        depth: n,
        cover,
        measure,
        squares_visited: visited,
    })
}

/// Cover measures for depths `0..=n_max`; non-increasing up to rounding.
pub fn cover_measure_series(
    e: &Expr,
    n_max: u32,
    region: &Box2,
    limits: &OracleLimits,
) -> Result<Vec<(u32, f64)>, OracleError> {
    let mut series = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let report = depth_cover(e, n, region, limits)?;
        series.push((n, report.measure));
    }
    Ok(series)
}

/// Evaluates `e` at every corner-lattice point of depth `m` inside the
/// square: both endpoints of every rank-`m` basic interval nested in each
/// side. Every endpoint lies in C, so every value is a true member of
/// `f(C, C)` up to evaluation rounding. Sorted and deduplicated.
pub fn inner_samples(
    e: &Expr,
    sq: &BasicSquare,
    m: u32,
    limits: &OracleLimits,
) -> Result<Vec<f64>, OracleError> {
    let rank = sq.rank();
    if m < rank {
        return Err(OracleError::DepthBelowRank { depth: m, rank });
    }
    if m > limits.rank_cap.0 {
        return Err(TriadicError::RankCapExceeded {
            rank: m,
            cap: limits.rank_cap.0,
        }
        .into());
    }
    let per_axis = 1u64 << (m - rank + 1);
    check_budget(per_axis.saturating_mul(per_axis), limits)?;

    let axis_points = |side: &crate::triadic::BasicInterval| -> Vec<f64> {
        let mut pts = Vec::with_capacity(per_axis as usize);
        for leaf in side.descendants(m - rank) {
            pts.push(leaf.left().to_f64_nearest());
            pts.push(leaf.right().to_f64_nearest());
        }
        pts
    };
    let px = axis_points(sq.x());
    let py = axis_points(sq.y());

    let mut values: Vec<f64> = px
        .par_iter()
        .map(|&x| {
            let mut row = Vec::with_capacity(py.len());
            for &y in &py {
                row.push(e.eval_point(x, y)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<Vec<f64>>, EvalError>>()
        .map_err(OracleError::Eval)?
        .into_iter()
        .flatten()
        .collect();
    values.sort_unstable_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

/// Falsification harness: true iff every multiple of `grid` inside the
/// certified image lies within `L * 3^-m` of some depth-`m` inner sample,
/// where `L` bounds the gradient's 1-norm over the square.
pub fn hit_test(
    cert: &Certificate,
    e: &Expr,
    m: u32,
    grid: f64,
    limits: &OracleLimits,
) -> Result<bool, OracleError> {
    assert!(grid > 0.0 && grid.is_finite(), "grid must be positive");
    let samples = inner_samples(e, &cert.square, m, limits)?;
    if samples.is_empty() {
        return Ok(false);
    }
    let lipschitz = (cert.fx_range.abs().hi() + cert.fy_range.abs().hi()).next_up();
    let tol = (lipschitz * 3f64.powi(-(m as i32)).next_up()).next_up();

    let k_lo = (cert.image.lo() / grid).ceil() as i64;
    let k_hi = (cert.image.hi() / grid).floor() as i64;
    for k in k_lo..=k_hi {
        let g = k as f64 * grid;
        let idx = samples.partition_point(|&s| s < g);
        let mut near = false;
        if idx < samples.len() && (samples[idx] - g).abs() <= tol {
            near = true;
        }
        if idx > 0 && (g - samples[idx - 1]).abs() <= tol {
            near = true;
        }
        if !near {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Re-derives the certified image through `depth` levels of the two-ends
/// refinement: at each level every kept square is re-checked against the
/// certificate's sign and overlap conditions and contributes its exact
/// monotone corner image (outward-rounded); the union at each level must be
/// a single interval within 8 grid steps per endpoint of the previous one.
pub fn verify_recursion(
    cert: &Certificate,
    g: &GradTriple,
    depth: u32,
    limits: &OracleLimits,
) -> Result<bool, OracleError> {
    let rank = cert.square.rank();
    if rank + depth > limits.rank_cap.0 {
        return Err(TriadicError::RankCapExceeded {
            rank: rank + depth,
            cap: limits.rank_cap.0,
        }
        .into());
    }
    let want_signs = (cert.signature.sx, cert.signature.sy);
    let mut prev = monotone_image_outward(g, &cert.square, want_signs)?;
    // The inward-rounded certificate image must sit inside the outward
    // corner image of its own square.
    if !prev.contains_interval(&cert.image) {
        return Ok(false);
    }

    for k in 1..=depth {
        check_budget(1u64 << (2 * k), limits)?;
        let xs = cert.square.x().descendants(k);
        let ys = cert.square.y().descendants(k);
        let images = xs
            .par_iter()
            .map(|ix| {
                let mut row = Vec::with_capacity(ys.len());
                for iy in &ys {
                    let sq = BasicSquare::new(ix.clone(), iy.clone());
                    row.push(monotone_image_outward(g, &sq, want_signs)?);
                }
                Ok(row)
            })
            .collect::<Result<Vec<Vec<Interval>>, OracleError>>()?;
        let union = IntervalUnion::from_intervals(images.into_iter().flatten());
        if union.parts().len() != 1 {
            return Ok(false);
        }
        let level = union.parts()[0];
        if crate::interval::ulps_between(level.lo(), prev.lo()) > 8
            || crate::interval::ulps_between(level.hi(), prev.hi()) > 8
        {
            return Ok(false);
        }
        prev = level;
    }
    Ok(true)
}

/// Outward-rounded `[f(corner-), f(corner+)]` for a square on which the
/// certificate's sign and overlap conditions are re-verified from scratch.
fn monotone_image_outward(
    g: &GradTriple,
    sq: &BasicSquare,
    want_signs: (i8, i8),
) -> Result<Interval, OracleError> {
    let lost = |reason: String| OracleError::ConditionLost {
        square: format!("x={} y={}", sq.x().word(), sq.y().word()),
        reason,
    };
    let b = sq.to_box2();
    let fx_range = g.fx.eval_interval(&b)?;
    let fy_range = g.fy.eval_interval(&b)?;
    let (sx, sy) = (fx_range.sign(), fy_range.sign());
    if (sx, sy) != want_signs {
        return Err(lost(format!(
            "signs became ({sx}, {sy}), expected {want_signs:?}"
        )));
    }
    let ax = fx_range.abs();
    let ay = fy_range.abs();
    let (dmag, omag) = if ax.lo() >= ay.lo() { (ax, ay) } else { (ay, ax) };
    if dmag.lo() < omag.hi() {
        return Err(lost(format!(
            "dominance overlap lost: fx in {fx_range}, fy in {fy_range}"
        )));
    }
    if crate::interval::mul3_down(omag.lo()) < dmag.hi() {
        return Err(lost(format!(
            "ratio overlap lost: fx in {fx_range}, fy in {fy_range}"
        )));
    }

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
    let f_min = eval_at_corner(g, &x_min, &y_min)?;
    let f_max = eval_at_corner(g, &x_max, &y_max)?;
    Ok(Interval::new(f_min.lo(), f_max.hi()))
}
