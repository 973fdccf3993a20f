//! Serializable breakdowns of volume results. Exact values travel as strings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::cube::{AuxSide, EnumerationStats, FactorRole, MinorFactor, VertexRecord};
use crate::index::IndexSet;
use crate::scalar::{format_decimal, Rational, Scalar};
use crate::volume::{Formula, VolumeResult, VolumeTerm};

/// Significant digits of every `approx` field.
pub const APPROX_DIGITS: usize = 15;

/// Decimal approximation with 15 significant digits, round half to even.
pub fn approx(value: &Rational) -> f64 {
    format_decimal(value, APPROX_DIGITS)
        .parse()
        .expect("format_decimal emits a valid float literal")
}

fn approx_of<S: Scalar>(value: &S) -> Option<f64> {
    value.to_rational().map(|r| approx(&r))
}

fn strings<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexReport {
    pub coords: Vec<String>,
    pub index_set: IndexSet,
    pub v0: IndexSet,
    pub v1: IndexSet,
    pub vstar: IndexSet,
    pub v01: IndexSet,
    pub aux_value: String,
    pub side: AuxSide,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub aux_edge: bool,
}

impl VertexReport {
    pub fn new<S: Scalar>(v: &VertexRecord<S>) -> Self {
        VertexReport {
            coords: strings(&v.coords),
            index_set: v.index_set.clone(),
            v0: v.v0.clone(),
            v1: v.v1.clone(),
            vstar: v.vstar.clone(),
            v01: v.v01.clone(),
            aux_value: v.aux_value.to_string(),
            side: v.side,
            aux_edge: v.aux_edge,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    pub role: FactorRole,
    pub rows: IndexSet,
    pub cols: IndexSet,
    pub value: String,
}

impl FactorReport {
    fn new<S: Scalar>(f: &MinorFactor<S>) -> Self {
        FactorReport {
            role: f.role,
            rows: f.rows.clone(),
            cols: f.cols.clone(),
            value: f.value.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermReport {
    pub vertex: VertexReport,
    pub sign: i32,
    pub sign_exponent: i64,
    pub numerator: String,
    pub factors: Vec<FactorReport>,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<f64>,
}

impl TermReport {
    pub fn new<S: Scalar>(t: &VolumeTerm<S>) -> Self {
        TermReport {
            vertex: VertexReport::new(&t.vertex),
            sign: t.sign(),
            sign_exponent: t.sign_exponent,
            numerator: t.numerator.to_string(),
            factors: t.denominator_factors.iter().map(FactorReport::new).collect(),
            value: t.value.to_string(),
            approx: approx_of(&t.value),
        }
    }
}

/// Sum of the terms whose vertex lies on `stratum` non-cube hyperplanes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumTotal {
    pub stratum: usize,
    pub terms: usize,
    pub total: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeReport {
    pub n: usize,
    pub m: usize,
    pub formula: Formula,
    pub volume: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<f64>,
    pub terms: Vec<TermReport>,
    pub excluded: Vec<VertexReport>,
    pub strata: Vec<StratumTotal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<EnumerationStats>,
}

pub fn term_report<S: Scalar>(result: &VolumeResult<S>) -> VolumeReport {
    let mut strata: BTreeMap<usize, (usize, S)> = BTreeMap::new();
    for t in &result.terms {
        let e = strata
            .entry(t.vertex.index_set.len())
            .or_insert_with(|| (0, S::zero()));
        e.0 += 1;
        e.1 = e.1.clone() + t.value.clone();
    }
    VolumeReport {
        n: result.n,
        m: result.m,
        formula: result.formula,
        volume: result.volume.to_string(),
        approx: approx_of(&result.volume),
        terms: result.terms.iter().map(TermReport::new).collect(),
        excluded: result.excluded.iter().map(VertexReport::new).collect(),
        strata: strata
            .into_iter()
            .map(|(stratum, (terms, total))| StratumTotal {
                stratum,
                terms,
                total: total.to_string(),
            })
            .collect(),
        stats: result.stats,
    }
}

fn role_label(role: FactorRole) -> String {
    match role {
        FactorRole::Pivot => "pivot".into(),
        FactorRole::Replace(t) => format!("replace {t}"),
        FactorRole::Edge(t) => format!("edge {t}"),
    }
}

/// Plain-text table of a report.
pub fn render_text(report: &VolumeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}, m = {}, formula = {}",
        report.n, report.m, report.formula
    );
    for (k, t) in report.terms.iter().enumerate() {
        let v = &t.vertex;
        let _ = writeln!(
            out,
            "term {}: v = ({}) I = {} v0 = {} v1 = {} v* = {} g_m = {}",
            k + 1,
            v.coords.join(", "),
            v.index_set,
            v.v0,
            v.v1,
            v.vstar,
            v.aux_value
        );
        let factors: Vec<String> = t
            .factors
            .iter()
            .map(|f| format!("{}[{}|{}]={}", role_label(f.role), f.rows, f.cols, f.value))
            .collect();
        let sign = if t.sign < 0 { "-" } else { "+" };
        let _ = writeln!(
            out,
            "  sign {sign} numerator {} factors {}",
            t.numerator,
            factors.join(" ")
        );
        let _ = writeln!(out, "  value {}", t.value);
    }
    for v in &report.excluded {
        let _ = writeln!(
            out,
            "excluded: v = ({}) I = {} on the auxiliary plane",
            v.coords.join(", "),
            v.index_set
        );
    }
    for s in &report.strata {
        let _ = writeln!(out, "|I| = {}: {} term(s), total {}", s.stratum, s.terms, s.total);
    }
    let _ = write!(out, "volume = {}", report.volume);
    if let Some(a) = report.approx {
        let _ = write!(out, " ~ {a}");
    }
    out.push('\n');
    out
}
