//! Vertex-sum volume formulas.
//!
//! Every formula here writes the volume as a sum of signed terms `N_v`, one
//! per non-degenerate vertex `v`:
//!
//! `N_v = (-1)^e * numerator / (n! * product of denominator minors)`.
//!
//! Vertices on the auxiliary plane contribute nothing and are only listed.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::cube::{
    analyze, combinations, ClippedCubeSpec, CubeError, Enumeration, EnumerationStats, FactorRole,
    MinorFactor, VertexRecord, ViolationSummary,
};
use crate::eps::EpsRational;
use crate::index::{sign_of_exponent, IndexSet};
use crate::linalg::{self, Matrix};
use crate::polytope::HalfSpaceSystem;
use crate::scalar::{factorial, Rational, Scalar, ScalarError};

/// Largest dimension accepted by the engine; corner enumeration is `2^n`.
pub const DEFAULT_MAX_DIMENSION: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    OnePlane,
    TwoPlane,
    ThreePlane,
    GeneralCup,
    GeneralVee,
    GeneralVee2,
    Lawrence,
}

impl Formula {
    pub const ALL: [Formula; 7] = [
        Formula::OnePlane,
        Formula::TwoPlane,
        Formula::ThreePlane,
        Formula::GeneralCup,
        Formula::GeneralVee,
        Formula::GeneralVee2,
        Formula::Lawrence,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Formula::OnePlane => "one-plane",
            Formula::TwoPlane => "two-plane",
            Formula::ThreePlane => "three-plane",
            Formula::GeneralCup => "general-cup",
            Formula::GeneralVee => "general-vee",
            Formula::GeneralVee2 => "general-vee2",
            Formula::Lawrence => "lawrence",
        }
    }

    /// The specialized path for `m <= 3`, the cup form otherwise.
    pub fn auto_for(m: usize) -> Formula {
        match m {
            1 => Formula::OnePlane,
            2 => Formula::TwoPlane,
            3 => Formula::ThreePlane,
            _ => Formula::GeneralCup,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Cup,
    Vee,
    Vee2,
}

impl Variant {
    pub fn formula(self) -> Formula {
        match self {
            Variant::Cup => Formula::GeneralCup,
            Variant::Vee => Formula::GeneralVee,
            Variant::Vee2 => Formula::GeneralVee2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VolumeError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("formula precondition violated: {0}")]
    FormulaPreconditionViolated(String),
    #[error("good clipping conditions fail: {}", render_violations(.0))]
    GoodClippingViolated(Vec<ViolationSummary>),
    #[error("dimension {n} exceeds the cap {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("vertex ({vertex}) lies on {tight} non-auxiliary hyperplanes, more than the dimension")]
    NotSimple { vertex: String, tight: usize },
    #[error("minor for hyperplane set {index_set} with {t} replaced vanishes: an edge is parallel to the auxiliary plane")]
    ParallelEdge { index_set: IndexSet, t: usize },
}

fn render_violations(v: &[ViolationSummary]) -> String {
    let shown: Vec<String> = v.iter().take(4).map(|x| x.to_string()).collect();
    let more = if v.len() > 4 {
        format!(" and {} more", v.len() - 4)
    } else {
        String::new()
    };
    format!("{}{more}", shown.join("; "))
}

/// One summand `N_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeTerm<S> {
    pub vertex: VertexRecord<S>,
    pub sign_exponent: i64,
    pub numerator: S,
    pub denominator_factors: Vec<MinorFactor<S>>,
    pub value: S,
}

impl<S: Scalar> VolumeTerm<S> {
    pub fn sign(&self) -> i32 {
        sign_of_exponent(self.sign_exponent)
    }

    fn new(
        vertex: VertexRecord<S>,
        sign_exponent: i64,
        numerator: S,
        denominator_factors: Vec<MinorFactor<S>>,
        n_factorial: &S,
    ) -> Result<Self, VolumeError> {
        let mut denom = n_factorial.clone();
        for f in &denominator_factors {
            if f.value.is_zero() {
                return Err(VolumeError::FormulaPreconditionViolated(format!(
                    "vanishing minor rows {} cols {} at ({})",
                    f.rows,
                    f.cols,
                    join(&vertex.coords)
                )));
            }
            denom = denom * f.value.clone();
        }
        let mut value = numerator.clone() / denom;
        if sign_of_exponent(sign_exponent) < 0 {
            value = -value;
        }
        Ok(VolumeTerm {
            vertex,
            sign_exponent,
            numerator,
            denominator_factors,
            value,
        })
    }
}

fn join<S: Scalar>(v: &[S]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone)]
pub struct VolumeResult<S> {
    pub n: usize,
    pub m: usize,
    pub formula: Formula,
    pub volume: S,
    pub terms: Vec<VolumeTerm<S>>,
    /// Degenerate vertices, listed but not summed.
    pub excluded: Vec<VertexRecord<S>>,
    pub stats: Option<EnumerationStats>,
}

fn check_dimension(n: usize) -> Result<(), VolumeError> {
    if n > DEFAULT_MAX_DIMENSION {
        return Err(VolumeError::DimensionTooLarge {
            n,
            cap: DEFAULT_MAX_DIMENSION,
        });
    }
    Ok(())
}

fn n_factorial<S: Scalar>(n: usize) -> S {
    S::from_rational(&Rational::from_integer(factorial(n as u32)))
}

/// Enumerates and refuses when good clipping fails.
fn prepare<S: Scalar>(spec: &ClippedCubeSpec<S>) -> Result<Enumeration<S>, VolumeError> {
    check_dimension(spec.n())?;
    let (e, report) = analyze(spec);
    if !report.holds() {
        return Err(VolumeError::GoodClippingViolated(report.summary()));
    }
    Ok(e)
}

fn finish<S: Scalar>(
    spec: &ClippedCubeSpec<S>,
    formula: Formula,
    e: &Enumeration<S>,
    terms: Vec<VolumeTerm<S>>,
) -> VolumeResult<S> {
    let volume = terms
        .iter()
        .fold(S::zero(), |acc, t| acc + t.value.clone());
    VolumeResult {
        n: spec.n(),
        m: spec.m(),
        formula,
        volume,
        terms,
        excluded: e.degenerate().cloned().collect(),
        stats: Some(e.stats),
    }
}

fn require_m<S: Scalar>(spec: &ClippedCubeSpec<S>, m: usize) -> Result<(), VolumeError> {
    if spec.m() != m {
        return Err(VolumeError::FormulaPreconditionViolated(format!(
            "this formula needs exactly {m} hyperplane(s), got {}",
            spec.m()
        )));
    }
    Ok(())
}

fn set(v: Vec<usize>) -> IndexSet {
    IndexSet::new(v).unwrap()
}

fn factor<S: Scalar>(role: FactorRole, rows: Vec<usize>, cols: Vec<usize>, value: S) -> MinorFactor<S> {
    MinorFactor {
        role,
        rows: set(rows),
        cols: set(cols),
        value,
    }
}

fn det2<S: Scalar>(a: &S, b: &S, c: &S, d: &S) -> S {
    a.clone() * d.clone() - b.clone() * c.clone()
}

fn det3<S: Scalar>(r: [[&S; 3]; 3]) -> S {
    r[0][0].clone() * det2(r[1][1], r[1][2], r[2][1], r[2][2])
        - r[0][1].clone() * det2(r[1][0], r[1][2], r[2][0], r[2][2])
        + r[0][2].clone() * det2(r[1][0], r[1][1], r[2][0], r[2][1])
}

/// Corner terms `(-1)^{|v0|} g^n / (n! prod c_t)` with `c` the auxiliary normal.
fn corner_term<S: Scalar>(
    v: &VertexRecord<S>,
    c: &[S],
    aux_col: usize,
    n: usize,
    nf: &S,
) -> Result<VolumeTerm<S>, VolumeError> {
    let factors = (1..=n)
        .map(|t| factor(FactorRole::Edge(t), vec![t], vec![aux_col], c[t - 1].clone()))
        .collect();
    VolumeTerm::new(
        v.clone(),
        v.v0.len() as i64,
        v.aux_value.pow(n as u32),
        factors,
        nf,
    )
}

/// `N_v = (-1)^{|v0|} g_1(v)^n / (n! prod a_t)` over corners with `g_1 > 0`.
pub fn volume_one_plane<S: Scalar>(spec: &ClippedCubeSpec<S>) -> Result<VolumeResult<S>, VolumeError> {
    require_m(spec, 1)?;
    if let Some(t) = spec.aux().a.iter().position(Scalar::is_zero) {
        return Err(VolumeError::FormulaPreconditionViolated(format!(
            "coefficient a_{} is zero; perturb the hyperplane",
            t + 1
        )));
    }
    let e = prepare(spec)?;
    let n = spec.n();
    let nf = n_factorial::<S>(n);
    let terms = e
        .contributing()
        .map(|v| corner_term(v, &spec.aux().a, 1, n, &nf))
        .collect::<Result<_, _>>()?;
    Ok(finish(spec, Formula::OnePlane, &e, terms))
}

/// Single-plane term of the two- and three-plane forms: plane `p` (normal
/// `a`) tight, auxiliary normal `c` in column `aux_col`.
fn single_plane_term<S: Scalar>(
    v: &VertexRecord<S>,
    a: &[S],
    p: usize,
    c: &[S],
    aux_col: usize,
    n: usize,
    nf: &S,
) -> Result<VolumeTerm<S>, VolumeError> {
    let s = v.vstar.as_slice()[0];
    let (a_s, c_s) = (&a[s - 1], &c[s - 1]);
    let mut factors = vec![
        factor(FactorRole::Pivot, vec![s], vec![p], a_s.abs()),
        factor(FactorRole::Replace(p), vec![s], vec![aux_col], c_s.clone()),
    ];
    for t in v.v01.iter() {
        let d = det2(a_s, c_s, &a[t - 1], &c[t - 1]);
        factors.push(factor(FactorRole::Edge(t), vec![s, t], vec![p, aux_col], d));
    }
    let numerator = (a_s.clone() * v.aux_value.clone()).pow(n as u32);
    VolumeTerm::new(v.clone(), v.v0.len() as i64 + 1, numerator, factors, nf)
}

/// Corner terms plus one term per vertex on `g_1 = 0` inside an edge, with
/// `2 x 2` determinants against the auxiliary normal `b`.
pub fn volume_two_planes<S: Scalar>(spec: &ClippedCubeSpec<S>) -> Result<VolumeResult<S>, VolumeError> {
    require_m(spec, 2)?;
    let e = prepare(spec)?;
    let n = spec.n();
    let nf = n_factorial::<S>(n);
    let (a, b) = (&spec.hyperplane(1).a, &spec.hyperplane(2).a);
    let terms = e
        .contributing()
        .map(|v| match v.index_set.len() {
            0 => corner_term(v, b, 2, n, &nf),
            _ => single_plane_term(v, a, 1, b, 2, n, &nf),
        })
        .collect::<Result<_, _>>()?;
    Ok(finish(spec, Formula::TwoPlane, &e, terms))
}

/// Three-plane form: corners, vertices on `g_1 = 0` or `g_2 = 0` inside an
/// edge, and vertices on both inside a 2-face, with explicit `2 x 2` and
/// `3 x 3` determinants against the auxiliary normal `c`.
pub fn volume_three_planes<S: Scalar>(spec: &ClippedCubeSpec<S>) -> Result<VolumeResult<S>, VolumeError> {
    require_m(spec, 3)?;
    let e = prepare(spec)?;
    let n = spec.n();
    let nf = n_factorial::<S>(n);
    let (a, b, c) = (&spec.hyperplane(1).a, &spec.hyperplane(2).a, &spec.hyperplane(3).a);
    let terms = e
        .contributing()
        .map(|v| match v.index_set.as_slice() {
            [] => corner_term(v, c, 3, n, &nf),
            [1] => single_plane_term(v, a, 1, c, 3, n, &nf),
            [2] => single_plane_term(v, b, 2, c, 3, n, &nf),
            _ => {
                let (s1, s2) = (v.vstar.as_slice()[0] - 1, v.vstar.as_slice()[1] - 1);
                let rows = vec![s1 + 1, s2 + 1];
                let d_ab = det2(&a[s1], &b[s1], &a[s2], &b[s2]);
                let d_ac = det2(&a[s1], &c[s1], &a[s2], &c[s2]);
                let d_bc = det2(&b[s1], &c[s1], &b[s2], &c[s2]);
                let mut factors = vec![
                    factor(FactorRole::Pivot, rows.clone(), vec![1, 2], d_ab.abs()),
                    factor(FactorRole::Replace(1), rows.clone(), vec![2, 3], d_bc),
                    factor(FactorRole::Replace(2), rows.clone(), vec![1, 3], d_ac),
                ];
                for t in v.v01.iter() {
                    let t0 = t - 1;
                    let d = det3([
                        [&a[s1], &b[s1], &c[s1]],
                        [&a[s2], &b[s2], &c[s2]],
                        [&a[t0], &b[t0], &c[t0]],
                    ]);
                    factors.push(factor(FactorRole::Edge(t), vec![s1 + 1, s2 + 1, t], vec![1, 2, 3], d));
                }
                let numerator = (d_ab * v.aux_value.clone()).pow(n as u32);
                VolumeTerm::new(v.clone(), v.v0.len() as i64 + 3, numerator, factors, &nf)
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(finish(spec, Formula::ThreePlane, &e, terms))
}

/// One term of the general clipped-cube formula in the requested variant.
pub fn general_term<S: Scalar>(
    a: &Matrix<S>,
    v: &VertexRecord<S>,
    variant: Variant,
    nf: &S,
) -> Result<VolumeTerm<S>, VolumeError> {
    let n = a.rows();
    let m = a.cols();
    let i_set = &v.index_set;
    let k = i_set.len() as i64;
    let pivot = a.minor(&v.vstar, i_set).map_err(CubeError::from)?;
    let mut factors = vec![MinorFactor {
        role: FactorRole::Pivot,
        rows: v.vstar.clone(),
        cols: i_set.clone(),
        value: pivot.abs(),
    }];
    for t in i_set.iter() {
        let cols = i_set.without(t).push(m).unwrap();
        factors.push(MinorFactor::compute(a, FactorRole::Replace(t), v.vstar.clone(), cols));
    }
    let edge_cols = match variant {
        Variant::Cup => i_set.insert_ordered(m).unwrap(),
        Variant::Vee => i_set.push(m).unwrap(),
        Variant::Vee2 => IndexSet::singleton(m).joining_union(i_set).unwrap(),
    };
    for t in v.v01.iter() {
        let rows = match variant {
            Variant::Cup => v.vstar.insert_ordered(t).unwrap(),
            Variant::Vee | Variant::Vee2 => v.vstar.push(t).unwrap(),
        };
        factors.push(MinorFactor::compute(a, FactorRole::Edge(t), rows, edge_cols.clone()));
    }
    let v0 = v.v0.len() as i64;
    let sign_exponent = match variant {
        Variant::Cup => v0 + v.vstar.sum() as i64,
        Variant::Vee => v0 + k * (k + 1) / 2,
        Variant::Vee2 => v0 + k * (k - 1) / 2 + n as i64 * k,
    };
    let numerator = (v.aux_value.clone() * pivot).pow(n as u32);
    VolumeTerm::new(v.clone(), sign_exponent, numerator, factors, nf)
}

/// Sum over `I ⊆ [m-1]` and `v ∈ F^{|I|} ∩ H_I` for any `m >= 1`.
pub fn volume_general<S: Scalar>(
    spec: &ClippedCubeSpec<S>,
    variant: Variant,
) -> Result<VolumeResult<S>, VolumeError> {
    let e = prepare(spec)?;
    general_from_enumeration(spec, &e, variant)
}

/// The general formula on an enumeration the caller already checked.
pub fn general_from_enumeration<S: Scalar>(
    spec: &ClippedCubeSpec<S>,
    e: &Enumeration<S>,
    variant: Variant,
) -> Result<VolumeResult<S>, VolumeError> {
    let a = spec.matrix();
    let nf = n_factorial::<S>(spec.n());
    let vertices: Vec<&VertexRecord<S>> = e.contributing().collect();
    let terms = vertices
        .par_iter()
        .map(|v| general_term(&a, v, variant, &nf))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(finish(spec, variant.formula(), e, terms))
}

/// Vertex sum over `n`-subsets `I ⊆ [m-1]` of an arbitrary bounded polytope;
/// the last half-space is the auxiliary one.
pub fn volume_lawrence<S: Scalar>(system: &HalfSpaceSystem<S>) -> Result<VolumeResult<S>, VolumeError> {
    let n = system.n();
    let m = system.m();
    check_dimension(n)?;
    if m <= n {
        return Err(VolumeError::FormulaPreconditionViolated(format!(
            "a bounded polytope in dimension {n} needs more than {n} half-spaces"
        )));
    }
    let a = system.matrix();
    let planes = system.planes();
    let aux = &planes[m - 1];
    let nf = n_factorial::<S>(n);
    let all_rows = IndexSet::range(n);

    let mut subsets = Vec::new();
    combinations(m - 1, n, &mut |c| subsets.push(c.to_vec()));

    enum Found<S> {
        Term(VolumeTerm<S>),
        Degenerate(VertexRecord<S>),
    }
    let found: Vec<Option<Found<S>>> = subsets
        .par_iter()
        .map(|idx| -> Result<Option<Found<S>>, VolumeError> {
            let i_set = IndexSet::new(idx.iter().map(|k| k + 1).collect()).unwrap();
            let pivot = a.minor(&all_rows, &i_set).map_err(CubeError::from)?;
            if pivot.is_zero() {
                return Ok(None);
            }
            let sys = Matrix::from_fn(n, n, |r, c| planes[idx[r]].a[c].clone());
            let rhs: Vec<S> = idx.iter().map(|&k| -planes[k].r.clone()).collect();
            let x = linalg::solve_square(&sys, &rhs).map_err(CubeError::from)?;
            let mut tight = 0;
            for (k, h) in planes[..m - 1].iter().enumerate() {
                let g = h.eval(&x);
                if g.is_negative() {
                    return Ok(None);
                }
                if g.is_zero() && !idx.contains(&k) {
                    tight += 1;
                }
            }
            let vertex = VertexRecord::build(x, i_set.clone(), aux, false);
            if vertex.aux_value.is_negative() {
                return Ok(None);
            }
            if vertex.degenerate() {
                return Ok(Some(Found::Degenerate(vertex)));
            }
            if tight > 0 {
                return Err(VolumeError::NotSimple {
                    vertex: join(&vertex.coords),
                    tight: n + tight,
                });
            }
            let mut factors = vec![MinorFactor {
                role: FactorRole::Pivot,
                rows: all_rows.clone(),
                cols: i_set.clone(),
                value: pivot.abs(),
            }];
            for t in i_set.iter() {
                let cols = i_set.without(t).push(m).unwrap();
                let f = MinorFactor::compute(&a, FactorRole::Replace(t), all_rows.clone(), cols);
                if f.value.is_zero() {
                    return Err(VolumeError::ParallelEdge {
                        index_set: i_set.clone(),
                        t,
                    });
                }
                factors.push(f);
            }
            let e = (n * (n + 1) / 2) as i64;
            let numerator = (vertex.aux_value.clone() * pivot).pow(n as u32);
            Ok(Some(Found::Term(VolumeTerm::new(vertex, e, numerator, factors, &nf)?)))
        })
        .collect::<Result<_, _>>()?;

    let mut terms = Vec::new();
    let mut excluded: Vec<VertexRecord<S>> = Vec::new();
    for f in found.into_iter().flatten() {
        match f {
            Found::Term(t) => terms.push(t),
            Found::Degenerate(v) => {
                if !excluded.iter().any(|w| w.coords == v.coords) {
                    excluded.push(v);
                }
            }
        }
    }
    let volume = terms
        .iter()
        .fold(S::zero(), |acc, t| acc + t.value.clone());
    Ok(VolumeResult {
        n,
        m,
        formula: Formula::Lawrence,
        volume,
        terms,
        excluded,
        stats: None,
    })
}

/// Runs any formula on a clipped cube; `lawrence` uses its `2n + m` half-spaces.
pub fn compute_volume<S: Scalar>(
    spec: &ClippedCubeSpec<S>,
    formula: Formula,
) -> Result<VolumeResult<S>, VolumeError> {
    match formula {
        Formula::OnePlane => volume_one_plane(spec),
        Formula::TwoPlane => volume_two_planes(spec),
        Formula::ThreePlane => volume_three_planes(spec),
        Formula::GeneralCup => volume_general(spec, Variant::Cup),
        Formula::GeneralVee => volume_general(spec, Variant::Vee),
        Formula::GeneralVee2 => volume_general(spec, Variant::Vee2),
        Formula::Lawrence => volume_lawrence(&spec.to_halfspaces()),
    }
}

/// Volume over `Q(e)` and its limit at `e = 0`.
pub fn volume_with_perturbation(
    spec: &ClippedCubeSpec<EpsRational>,
    variant: Variant,
) -> Result<Rational, VolumeError> {
    let result = volume_general(spec, variant)?;
    Ok(result.volume.epsilon_limit()?)
}

/// `vol(P ∩ {g_m >= 0}) + vol(P ∩ {g_m <= 0})` with the general formula.
pub fn volume_both_sides<S: Scalar>(
    spec: &ClippedCubeSpec<S>,
    variant: Variant,
) -> Result<(S, S), VolumeError> {
    let plus = volume_general(spec, variant)?.volume;
    let minus = volume_general(&spec.with_aux_negated(), variant)?.volume;
    Ok((plus, minus))
}
