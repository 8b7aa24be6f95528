//! Implementations of the `certify`, `cover`, and `reproduce` subcommands.

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use num_traits::Signed;

use cantorcert::certify::{
    certify_square, point_condition, search, Case, Certificate, SearchParams,
};
use cantorcert::expr::{differentiate, parse, GradTriple};
use cantorcert::interval::Box2;
use cantorcert::oracle::{
    cover_measure_series, depth_cover, hit_test, verify_recursion, CoverReport, OracleLimits,
};
use cantorcert::triadic::{cantor_membership, word_to_interval, BasicSquare, TernaryWord};

use crate::report::{
    num17, CertificateOut, CertifyReport, CoverPartsOut, CoverPointOut, CoverSeriesReport,
    DepthsOut, OracleOut, RegionOut, ReproduceItemOut, ReproduceReport, SearchOut, SeedOut,
    SCHEMA_VERSION,
};

/// Grid spacing for the certificate falsification harness.
const HIT_GRID: f64 = 1e-3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_CERTIFICATE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub expression: String,
    pub region: Box2,
    pub max_rank: u32,
    pub budget: u64,
    pub oracle_depth: u32,
    pub seed: Option<(BigRational, BigRational)>,
    pub format: Option<OutputFormat>,
    pub workers: usize,
    pub limits: OracleLimits,
}

impl RunConfig {
    fn grad(&self) -> Result<GradTriple> {
        let expr = parse(&self.expression)
            .with_context(|| format!("cannot parse {:?}", self.expression))?;
        differentiate(&expr).context("cannot differentiate the expression")
    }

    fn search_params(&self) -> SearchParams {
        SearchParams {
            max_rank: self.max_rank,
            budget: self.budget,
            workers: self.workers,
        }
    }
}

/// Depth of the inner-sample lattice for the hit test: 12 when the square
/// budget allows it, shallower for low-rank squares, never below the rank.
fn hit_depth(rank: u32, limits: &OracleLimits) -> u32 {
    rank.max(12.min(rank + 10)).min(limits.rank_cap.0)
}

fn recursion_depth(rank: u32, limits: &OracleLimits) -> u32 {
    8.min(limits.rank_cap.0.saturating_sub(rank))
}

struct Validation {
    cover_contained: bool,
    hit: bool,
    recursion: bool,
    hit_m: u32,
    recursion_depth: u32,
}

impl Validation {
    fn all_pass(&self) -> bool {
        self.cover_contained && self.hit && self.recursion
    }
}

/// Full oracle validation of a certificate: containment in every cover up to
/// `depth`, the hit test, and the refinement recursion.
fn validate_certificate(
    g: &GradTriple,
    cert: &Certificate,
    region: &Box2,
    depth: u32,
    limits: &OracleLimits,
) -> Result<Validation> {
    let mut cover_contained = true;
    for n in 1..=depth {
        let report = depth_cover(&g.f, n, region, limits)?;
        if !report.cover.subset_with_slack(&cert.image, 0.0) {
            cover_contained = false;
        }
    }
    let hit_m = hit_depth(cert.square.rank(), limits);
    let hit = hit_test(cert, &g.f, hit_m, HIT_GRID, limits)?;
    let rec_depth = recursion_depth(cert.square.rank(), limits);
    let recursion = verify_recursion(cert, g, rec_depth, limits)?;
    Ok(Validation {
        cover_contained,
        hit,
        recursion,
        hit_m,
        recursion_depth: rec_depth,
    })
}

/// `certify`: search for a certificate and validate it against the oracle.
pub fn cmd_certify(cfg: &RunConfig) -> Result<(i32, String)> {
    let g = cfg.grad()?;

    let seed_out = match &cfg.seed {
        Some((x, y)) => {
            let in_x = cantor_membership(x).context("seed x")?;
            let in_y = cantor_membership(y).context("seed y")?;
            if !in_x || !in_y {
                bail!(
                    "seed point ({x}, {y}) is not in C x C: membership ({in_x}, {in_y})"
                );
            }
            let report = point_condition(&g, x, y).context("seed point evaluation")?;
            Some(SeedOut::from_report(&report, true))
        }
        None => None,
    };

    let found = search(&g, &cfg.region, &cfg.search_params());
    let stats = SearchOut::from_stats(&found.stats);

    let Some(cert) = found.first() else {
        let report = CertifyReport {
            schema: SCHEMA_VERSION,
            expression: cfg.expression.clone(),
            region: RegionOut::from_box(&cfg.region),
            seed: seed_out,
            certificate: None,
            oracle: None,
            search: stats,
        };
        return Ok((EXIT_NO_CERTIFICATE, render_certify(cfg, &report)?));
    };

    let validation = validate_certificate(&g, cert, &cfg.region, cfg.oracle_depth, &cfg.limits)?;
    let report = CertifyReport {
        schema: SCHEMA_VERSION,
        expression: cfg.expression.clone(),
        region: RegionOut::from_box(&cfg.region),
        seed: seed_out,
        certificate: Some(CertificateOut::from_certificate(cert)),
        oracle: Some(OracleOut {
            cover_contained: validation.cover_contained,
            hit_test: validation.hit,
            recursion_ok: validation.recursion,
            depths: DepthsOut {
                cover: cfg.oracle_depth,
                hit_m: validation.hit_m,
                recursion: validation.recursion_depth,
            },
        }),
        search: stats,
    };
    let code = if validation.all_pass() {
        EXIT_OK
    } else {
        EXIT_ERROR
    };
    Ok((code, render_certify(cfg, &report)?))
}

fn render_certify(cfg: &RunConfig, report: &CertifyReport) -> Result<String> {
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)?),
        OutputFormat::Csv => {
            let mut out = String::from(
                "rank,x_word,y_word,image_lo,image_hi,m1,m2,m3,m4,cover_contained,hit_test,recursion_ok\n",
            );
            if let Some(cert) = &report.certificate {
                let oracle = report.oracle.as_ref();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    cert.square.rank,
                    cert.square.x_word,
                    cert.square.y_word,
                    cert.image.lo,
                    cert.image.hi,
                    cert.margins.m1,
                    cert.margins.m2,
                    cert.margins.m3,
                    cert.margins.m4,
                    oracle.map_or(false, |o| o.cover_contained),
                    oracle.map_or(false, |o| o.hit_test),
                    oracle.map_or(false, |o| o.recursion_ok),
                ));
            }
            Ok(out)
        }
    }
}

/// `cover`: the cover-measure series up to the oracle depth.
pub fn cmd_cover(cfg: &RunConfig) -> Result<(i32, String)> {
    let expr = parse(&cfg.expression)
        .with_context(|| format!("cannot parse {:?}", cfg.expression))?;
    let series = cover_measure_series(&expr, cfg.oracle_depth, &cfg.region, &cfg.limits)?;
    let deepest = depth_cover(&expr, cfg.oracle_depth, &cfg.region, &cfg.limits)?;
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            let report = CoverSeriesReport {
                schema: SCHEMA_VERSION,
                expression: cfg.expression.clone(),
                region: RegionOut::from_box(&cfg.region),
                series: series
                    .iter()
                    .map(|&(n, measure)| CoverPointOut {
                        n,
                        measure: num17(measure),
                    })
                    .collect(),
                cover: CoverPartsOut::from_report(&deepest),
            };
            Ok((EXIT_OK, serde_json::to_string_pretty(&report)?))
        }
        OutputFormat::Csv => Ok((EXIT_OK, deepest.to_csv())),
    }
}

/// One pass/fail entry of a reproduction suite.
struct Item {
    name: String,
    pass: bool,
    detail: String,
}

impl Item {
    fn new(name: &str, pass: bool, detail: String) -> Item {
        Item {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// `reproduce`: canned suites for the classical identities and the function
/// family the certifier is known to handle.
pub fn cmd_reproduce(cfg: &RunConfig, suite: &str) -> Result<(i32, String)> {
    let items = match suite {
        "steinhaus-sum" => reproduce_steinhaus(cfg, true)?,
        "steinhaus-diff" => reproduce_steinhaus(cfg, false)?,
        "product" => reproduce_product(cfg)?,
        "corollary" => reproduce_corollary(cfg)?,
        other => bail!("unknown suite {other:?}; expected steinhaus-sum, steinhaus-diff, product, or corollary"),
    };
    let pass = items.iter().all(|i| i.pass);
    let output = match cfg.format {
        Some(OutputFormat::Json) => {
            let report = ReproduceReport {
                schema: SCHEMA_VERSION,
                suite: suite.to_string(),
                pass,
                items: items
                    .iter()
                    .map(|i| ReproduceItemOut {
                        name: i.name.clone(),
                        pass: i.pass,
                        detail: i.detail.clone(),
                    })
                    .collect(),
            };
            serde_json::to_string_pretty(&report)?
        }
        _ => {
            let mut out = String::new();
            for item in &items {
                out.push_str(&format!(
                    "{} {} — {}\n",
                    if item.pass { "PASS" } else { "FAIL" },
                    item.name,
                    item.detail
                ));
            }
            out.push_str(&format!(
                "{}: {}/{} items passed\n",
                suite,
                items.iter().filter(|i| i.pass).count(),
                items.len()
            ));
            out
        }
    };
    Ok((if pass { EXIT_OK } else { EXIT_NO_CERTIFICATE }, output))
}

/// The two classical rank-0 identities: the sum image [0, 2] and the
/// difference image [-1, 1].
fn reproduce_steinhaus(cfg: &RunConfig, sum: bool) -> Result<Vec<Item>> {
    let (expr_text, lo_expect, hi_expect) = if sum {
        ("x + y", 0.0, 2.0)
    } else {
        ("x - y", -1.0, 1.0)
    };
    let g = differentiate(&parse(expr_text).expect("fixed expression")).expect("polynomial");
    let mut items = Vec::new();

    let found = search(&g, &Box2::unit(), &cfg.search_params());
    let Some(cert) = found.first() else {
        return Ok(vec![Item::new("certificate", false, "no certificate found".into())]);
    };
    items.push(Item::new(
        "rank-0 certificate",
        cert.square.rank() == 0,
        format!("rank {}", cert.square.rank()),
    ));
    let exact_endpoints = cert.image.lo() >= lo_expect
        && cert.image.hi() <= hi_expect
        && (cert.image.lo() - lo_expect).abs() <= 1e-12
        && (cert.image.hi() - hi_expect).abs() <= 1e-12;
    items.push(Item::new(
        "image endpoints",
        exact_endpoints,
        format!(
            "image [{:.16e}, {:.16e}], corners {}..{}",
            cert.image.lo(),
            cert.image.hi(),
            cert.corner_min.0,
            cert.corner_max.0
        ),
    ));
    if !sum {
        items.push(Item::new(
            "negative y sign",
            cert.signature.sy == -1,
            format!("sy = {}", cert.signature.sy),
        ));
    }

    let cover = depth_cover(&g.f, 6, &Box2::unit(), &cfg.limits)?;
    items.push(Item::new(
        "depth-6 cover stays full",
        (cover.measure - 2.0).abs() <= 1e-12
            && cover.cover.subset_with_slack(&cert.image, 0.0),
        format!("measure {:.16e}", cover.measure),
    ));
    let hit = hit_test(cert, &g.f, 8, 1e-2, &cfg.limits)?;
    items.push(Item::new("hit test (m=8, grid 1e-2)", hit, String::new()));
    let rec = verify_recursion(cert, &g, 4, &cfg.limits)?;
    items.push(Item::new("refinement recursion to depth 4", rec, String::new()));
    Ok(items)
}

/// The product: certificate search, the known rank-3 square, and the cover
/// measure series squeezed between the known bounds.
fn reproduce_product(cfg: &RunConfig) -> Result<Vec<Item>> {
    let g = differentiate(&parse("x*y").expect("fixed expression")).expect("polynomial");
    let mut items = Vec::new();

    let params = SearchParams {
        budget: 10_000,
        ..cfg.search_params()
    };
    let found = search(&g, &Box2::unit(), &params);
    let Some(cert) = found.first() else {
        return Ok(vec![Item::new("certificate", false, "no certificate found".into())]);
    };
    items.push(Item::new(
        "certificate at rank <= 4",
        cert.square.rank() <= 4,
        format!(
            "rank {} after {} nodes",
            cert.square.rank(),
            found.stats.expanded
        ),
    ));

    let known = BasicSquare::new(
        word_to_interval(&TernaryWord::parse("LRR").expect("fixed word")),
        word_to_interval(&TernaryWord::parse("RLL").expect("fixed word")),
    );
    let known_cert = certify_square(&g, &known);
    let known_ok = known_cert.as_ref().is_ok_and(|c| {
        c.image.lo() <= 144.0 / 729.0 + 1e-12 && c.image.hi() >= 171.0 / 729.0 - 1e-12
    });
    items.push(Item::new(
        "known rank-3 square certifies",
        known_ok,
        match &known_cert {
            Ok(c) => format!("image [{:.16e}, {:.16e}]", c.image.lo(), c.image.hi()),
            Err(e) => format!("{e}"),
        },
    ));

    let mut covers: Vec<CoverReport> = Vec::new();
    for n in 0..=10 {
        covers.push(depth_cover(&g.f, n, &Box2::unit(), &cfg.limits)?);
    }
    let start_ok = (covers[0].measure - 1.0).abs() <= 1e-12;
    let rank1_ok = (covers[1].measure - 8.0 / 9.0).abs() <= 1e-12;
    let monotone = covers
        .windows(2)
        .all(|w| w[1].measure <= w[0].measure + 8.0 * f64::EPSILON);
    let floored = covers.iter().all(|c| c.measure >= 17.0 / 21.0);
    items.push(Item::new(
        "measure series 1, 8/9, non-increasing, >= 17/21",
        start_ok && rank1_ok && monotone && floored,
        format!(
            "measures {:?}",
            covers.iter().map(|c| c.measure).collect::<Vec<_>>()
        ),
    ));

    let contained = covers[1..]
        .iter()
        .all(|c| c.cover.subset_with_slack(&cert.image, 0.0));
    items.push(Item::new(
        "image contained in covers 1..=10",
        contained,
        format!("image [{:.16e}, {:.16e}]", cert.image.lo(), cert.image.hi()),
    ));
    Ok(items)
}

/// The function family: power products, power sums and differences, the
/// parabola shifts with their witness seed, and sin(x)cos(y).
fn reproduce_corollary(cfg: &RunConfig) -> Result<Vec<Item>> {
    let suite: [(&str, Option<(&str, &str)>); 6] = [
        ("x^2*y", None),
        ("x^2 + y^2", None),
        ("x^2 - y^2", None),
        ("x + y^2", Some(("8/9", "1/3"))),
        ("x - y^2", Some(("8/9", "1/3"))),
        ("sin(x)*cos(y)", Some(("2/3", "2/3"))),
    ];
    let mut items = Vec::new();
    for (expr_text, seed) in suite {
        match corollary_item(cfg, expr_text, seed) {
            Ok(item) => items.push(item),
            Err(e) => items.push(Item::new(expr_text, false, format!("error: {e:#}"))),
        }
    }
    Ok(items)
}

fn corollary_item(
    cfg: &RunConfig,
    expr_text: &str,
    seed: Option<(&str, &str)>,
) -> Result<Item> {
    let g = differentiate(&parse(expr_text)?)?;
    let mut detail = String::new();

    if let Some((sx, sy)) = seed {
        let x: BigRational = sx.parse().map_err(|e| anyhow!("seed x: {e}"))?;
        let y: BigRational = sy.parse().map_err(|e| anyhow!("seed y: {e}"))?;
        if !cantor_membership(&x)? || !cantor_membership(&y)? {
            return Ok(Item::new(expr_text, false, "seed not in C x C".into()));
        }
        let report = point_condition(&g, &x, &y)?;
        if !matches!(report.case, Case::XDominant | Case::YDominant) {
            return Ok(Item::new(
                expr_text,
                false,
                format!("seed ratio {} is {}", report.ratio, report.case.label()),
            ));
        }
        detail.push_str(&format!(
            "seed ({sx}, {sy}) {} ratio {:.4}; ",
            report.case.label(),
            report.ratio
        ));
    }

    let found = search(&g, &Box2::unit(), &cfg.search_params());
    let Some(cert) = found.first() else {
        return Ok(Item::new(expr_text, false, "no certificate found".into()));
    };
    detail.push_str(&format!(
        "rank {} image [{:.16e}, {:.16e}]; ",
        cert.square.rank(),
        cert.image.lo(),
        cert.image.hi()
    ));

    let validation = validate_certificate(&g, cert, &Box2::unit(), cfg.oracle_depth, &cfg.limits)?;
    detail.push_str(&format!(
        "cover {} hit(m={}) {} recursion(depth={}) {}",
        validation.cover_contained,
        validation.hit_m,
        validation.hit,
        validation.recursion_depth,
        validation.recursion
    ));
    Ok(Item::new(expr_text, validation.all_pass(), detail))
}

/// Parses a rational seed coordinate "p/q" (or an integer "p").
pub fn parse_seed_coordinate(text: &str) -> Result<BigRational> {
    let value: BigRational = text
        .parse()
        .map_err(|e| anyhow!("invalid rational {text:?}: {e}"))?;
    if value.is_negative() {
        bail!("seed coordinate {text} is negative");
    }
    Ok(value)
}
