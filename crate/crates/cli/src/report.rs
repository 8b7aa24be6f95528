//! Machine-readable report types. JSON output is versioned (`"schema": 1`)
//! and deterministic: floats are emitted as decimal numbers with 17
//! significant digits, exact endpoints additionally as rational strings
//! `p/q` with `q = 3^rank`.

use std::str::FromStr;

use serde::Serialize;
use serde_json::Number;

use cantorcert::certify::{Certificate, PointReport, SearchStats};
use cantorcert::interval::Box2;
use cantorcert::oracle::CoverReport;
use cantorcert::triadic::BasicSquare;

pub const SCHEMA_VERSION: u32 = 1;

/// A JSON number carrying 17 significant decimal digits.
pub fn num17(x: f64) -> Number {
    Number::from_str(&format!("{x:.16e}")).expect("17-digit decimal is valid JSON")
}

fn opt_num17(x: f64) -> Option<Number> {
    x.is_finite().then(|| num17(x))
}

#[derive(Serialize)]
pub struct CertifyReport {
    pub schema: u32,
    pub expression: String,
    pub region: RegionOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedOut>,
    pub certificate: Option<CertificateOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOut>,
    pub search: SearchOut,
}

#[derive(Serialize)]
pub struct RegionOut {
    pub x0: Number,
    pub x1: Number,
    pub y0: Number,
    pub y1: Number,
}

impl RegionOut {
    pub fn from_box(b: &Box2) -> Self {
        RegionOut {
            x0: num17(b.x.lo()),
            x1: num17(b.x.hi()),
            y0: num17(b.y.lo()),
            y1: num17(b.y.hi()),
        }
    }
}

#[derive(Serialize)]
pub struct SeedOut {
    pub x: String,
    pub y: String,
    pub in_cantor: bool,
    pub fx: Number,
    pub fy: Number,
    pub ratio: Option<Number>,
    pub case: String,
    pub signs: [i8; 2],
}

impl SeedOut {
    pub fn from_report(report: &PointReport, in_cantor: bool) -> Self {
        SeedOut {
            x: report.point.0.to_string(),
            y: report.point.1.to_string(),
            in_cantor,
            fx: num17(report.fx),
            fy: num17(report.fy),
            ratio: opt_num17(report.ratio),
            case: report.case.label().to_string(),
            signs: [report.signs.0, report.signs.1],
        }
    }
}

#[derive(Serialize)]
pub struct CertificateOut {
    pub square: SquareOut,
    pub signature: SignatureOut,
    pub margins: MarginsOut,
    pub image: ImageOut,
    pub corners: CornersOut,
}

#[derive(Serialize)]
pub struct SquareOut {
    pub rank: u32,
    pub x_word: String,
    pub y_word: String,
    pub x: RationalIntervalOut,
    pub y: RationalIntervalOut,
}

#[derive(Serialize)]
pub struct RationalIntervalOut {
    pub lo: String,
    pub hi: String,
}

impl SquareOut {
    pub fn from_square(sq: &BasicSquare) -> Self {
        SquareOut {
            rank: sq.rank(),
            x_word: sq.x().word().to_string(),
            y_word: sq.y().word().to_string(),
            x: RationalIntervalOut {
                lo: sq.x().left().to_string(),
                hi: sq.x().right().to_string(),
            },
            y: RationalIntervalOut {
                lo: sq.y().left().to_string(),
                hi: sq.y().right().to_string(),
            },
        }
    }
}

#[derive(Serialize)]
pub struct SignatureOut {
    pub sx: i8,
    pub sy: i8,
    pub dominant: String,
    pub swap: bool,
}

#[derive(Serialize)]
pub struct MarginsOut {
    pub m1: Number,
    pub m2: Number,
    pub m3: Number,
    pub m4: Number,
}

#[derive(Serialize)]
pub struct ImageOut {
    pub lo: Number,
    pub hi: Number,
}

#[derive(Serialize)]
pub struct CornersOut {
    pub min: [String; 2],
    pub max: [String; 2],
}

impl CertificateOut {
    pub fn from_certificate(cert: &Certificate) -> Self {
        CertificateOut {
            square: SquareOut::from_square(&cert.square),
            signature: SignatureOut {
                sx: cert.signature.sx,
                sy: cert.signature.sy,
                dominant: cert.signature.dominant.label().to_string(),
                swap: cert.signature.swap,
            },
            margins: MarginsOut {
                m1: num17(cert.margins.dominance),
                m2: num17(cert.margins.ratio),
                m3: num17(cert.margins.dominant_inf),
                m4: num17(cert.margins.other_inf),
            },
            image: ImageOut {
                lo: num17(cert.image.lo()),
                hi: num17(cert.image.hi()),
            },
            corners: CornersOut {
                min: [
                    cert.corner_min.0.to_string(),
                    cert.corner_min.1.to_string(),
                ],
                max: [
                    cert.corner_max.0.to_string(),
                    cert.corner_max.1.to_string(),
                ],
            },
        }
    }
}

#[derive(Serialize)]
pub struct OracleOut {
    pub cover_contained: bool,
    pub hit_test: bool,
    pub recursion_ok: bool,
    pub depths: DepthsOut,
}

#[derive(Serialize)]
pub struct DepthsOut {
    pub cover: u32,
    pub hit_m: u32,
    pub recursion: u32,
}

#[derive(Serialize)]
pub struct SearchOut {
    pub expanded: u64,
    pub deepest_rank: u32,
}

impl SearchOut {
    pub fn from_stats(stats: &SearchStats) -> Self {
        SearchOut {
            expanded: stats.expanded,
            deepest_rank: stats.deepest_rank,
        }
    }
}

#[derive(Serialize)]
pub struct CoverSeriesReport {
    pub schema: u32,
    pub expression: String,
    pub region: RegionOut,
    pub series: Vec<CoverPointOut>,
    pub cover: CoverPartsOut,
}

#[derive(Serialize)]
pub struct CoverPointOut {
    pub n: u32,
    pub measure: Number,
}

#[derive(Serialize)]
pub struct CoverPartsOut {
    pub depth: u32,
    pub squares_visited: u64,
    pub parts: Vec<[Number; 2]>,
}

impl CoverPartsOut {
    pub fn from_report(report: &CoverReport) -> Self {
        CoverPartsOut {
            depth: report.depth,
            squares_visited: report.squares_visited,
            parts: report
                .cover
                .parts()
                .iter()
                .map(|p| [num17(p.lo()), num17(p.hi())])
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ReproduceReport {
    pub schema: u32,
    pub suite: String,
    pub pass: bool,
    pub items: Vec<ReproduceItemOut>,
}

#[derive(Serialize)]
pub struct ReproduceItemOut {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}
