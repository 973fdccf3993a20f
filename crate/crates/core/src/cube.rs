//! The unit cube clipped by hyperplanes.
//!
//! A spec lists hyperplanes `g_j(x) = a_j . x + r_j`, `j = 1..m`; the
//! polytope is `[0,1]^n` intersected with every `g_j >= 0`, and the last
//! hyperplane `g_m` is the auxiliary plane of the vertex-sum formulas.
//!
//! Vertices are found face by face: for each index set `I` of non-auxiliary
//! hyperplanes and each set `v*` of `|I|` free coordinates, the remaining
//! coordinates range over `{0,1}` and the `|I|` equations `g_j = 0` are solved
//! for the free ones. Partial 0/1 assignments are pruned by interval bounds.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::eps::EpsRational;
use crate::index::IndexSet;
use crate::linalg::{self, AffineSolution, LinalgError, Matrix};
use crate::polytope::HalfSpaceSystem;
use crate::scalar::{binomial, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CubeError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("at least one hyperplane is required")]
    NoHyperplanes,
    #[error("hyperplane {index} has {found} coefficients, expected {expected}")]
    CoefficientCount {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("hyperplane {0} has no nonzero coefficient")]
    ZeroNormal(usize),
    #[error("hyperplanes {index_set} meet the face with free coordinates {vstar} in more than one point")]
    NonGenericFace { index_set: IndexSet, vstar: IndexSet },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `g(x) = a . x + r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane<S> {
    pub a: Vec<S>,
    pub r: S,
}

impl<S: Scalar> Hyperplane<S> {
    pub fn new(a: Vec<S>, r: S) -> Self {
        Hyperplane { a, r }
    }

    pub fn eval(&self, x: &[S]) -> S {
        linalg::dot(&self.a, x) + self.r.clone()
    }

    pub fn negated(&self) -> Self {
        Hyperplane {
            a: self.a.iter().map(|x| -x.clone()).collect(),
            r: -self.r.clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Hyperplane<T> {
        Hyperplane {
            a: self.a.iter().map(&f).collect(),
            r: f(&self.r),
        }
    }
}

pub(crate) fn validate_planes<S: Scalar>(
    n: usize,
    planes: &[Hyperplane<S>],
) -> Result<(), CubeError> {
    if n == 0 {
        return Err(CubeError::ZeroDimension);
    }
    if planes.is_empty() {
        return Err(CubeError::NoHyperplanes);
    }
    for (j, h) in planes.iter().enumerate() {
        if h.a.len() != n {
            return Err(CubeError::CoefficientCount {
                index: j + 1,
                found: h.a.len(),
                expected: n,
            });
        }
        if h.a.iter().all(Scalar::is_zero) {
            return Err(CubeError::ZeroNormal(j + 1));
        }
    }
    Ok(())
}

/// `[0,1]^n` clipped by `m >= 1` half-spaces; the last one is auxiliary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClippedCubeSpec<S> {
    n: usize,
    hyperplanes: Vec<Hyperplane<S>>,
}

impl<S: Scalar> ClippedCubeSpec<S> {
    pub fn new(n: usize, hyperplanes: Vec<Hyperplane<S>>) -> Result<Self, CubeError> {
        validate_planes(n, &hyperplanes)?;
        Ok(ClippedCubeSpec { n, hyperplanes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn hyperplanes(&self) -> &[Hyperplane<S>] {
        &self.hyperplanes
    }

    /// `g_j`, 1-based.
    pub fn hyperplane(&self, j: usize) -> &Hyperplane<S> {
        &self.hyperplanes[j - 1]
    }

    pub fn aux(&self) -> &Hyperplane<S> {
        self.hyperplanes.last().unwrap()
    }

    /// `A`: `n x m`, column `j` holds the coefficients of `g_j`.
    pub fn matrix(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, self.m(), |i, j| self.hyperplanes[j].a[i].clone())
    }

    /// `(e_1, -e_1, ..., e_n, -e_n | A)`.
    pub fn augmented_matrix(&self) -> Matrix<S> {
        let n = self.n;
        Matrix::from_fn(n, 2 * n + self.m(), |i, c| {
            if c < 2 * n {
                if c / 2 != i {
                    S::zero()
                } else if c % 2 == 0 {
                    S::one()
                } else {
                    -S::one()
                }
            } else {
                self.hyperplanes[c - 2 * n].a[i].clone()
            }
        })
    }

    /// The same polytope as `2n + m` half-spaces: `x_i >= 0` at `2i-1`,
    /// `1 - x_i >= 0` at `2i`, then the hyperplanes in order.
    pub fn to_halfspaces(&self) -> HalfSpaceSystem<S> {
        let n = self.n;
        let mut planes = Vec::with_capacity(2 * n + self.m());
        for i in 0..n {
            let unit = |s: S| {
                (0..n)
                    .map(|k| if k == i { s.clone() } else { S::zero() })
                    .collect::<Vec<_>>()
            };
            planes.push(Hyperplane::new(unit(S::one()), S::zero()));
            planes.push(Hyperplane::new(unit(-S::one()), S::one()));
        }
        planes.extend(self.hyperplanes.iter().cloned());
        HalfSpaceSystem::new(n, planes).expect("cube half-spaces are valid")
    }

    /// Same polytope side, with `g_m` replaced.
    pub fn with_aux(&self, aux: Hyperplane<S>) -> Result<Self, CubeError> {
        let mut planes = self.hyperplanes.clone();
        *planes.last_mut().unwrap() = aux;
        ClippedCubeSpec::new(self.n, planes)
    }

    /// The complementary piece `g_m <= 0`.
    pub fn with_aux_negated(&self) -> Self {
        let mut out = self.clone();
        let last = out.hyperplanes.last_mut().unwrap();
        *last = last.negated();
        out
    }

    /// Appends a new auxiliary plane after the current hyperplanes.
    pub fn push_aux(&self, aux: Hyperplane<S>) -> Result<Self, CubeError> {
        let mut planes = self.hyperplanes.clone();
        planes.push(aux);
        ClippedCubeSpec::new(self.n, planes)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ClippedCubeSpec<T> {
        ClippedCubeSpec {
            n: self.n,
            hyperplanes: self.hyperplanes.iter().map(|h| h.map(&f)).collect(),
        }
    }
}

impl ClippedCubeSpec<Rational> {
    pub fn to_eps(&self) -> ClippedCubeSpec<EpsRational> {
        self.map(|x| EpsRational::constant(x.clone()))
    }
}

impl ClippedCubeSpec<EpsRational> {
    /// Coefficients at `e = 0`.
    pub fn at_zero(&self) -> Result<ClippedCubeSpec<Rational>, CubeError> {
        let planes = self
            .hyperplanes
            .iter()
            .map(|h| {
                Ok(Hyperplane::new(
                    h.a.iter()
                        .map(EpsRational::epsilon_limit)
                        .collect::<Result<_, _>>()?,
                    h.r.epsilon_limit()?,
                ))
            })
            .collect::<Result<Vec<_>, ScalarError>>()?;
        ClippedCubeSpec::new(self.n, planes)
    }
}

/// Coordinate classes of a point of the cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub v0: IndexSet,
    pub v1: IndexSet,
    pub vstar: IndexSet,
    pub v01: IndexSet,
}

/// Splits coordinates into zeros, ones and the rest. All sets well-ordered.
pub fn decompose_vertex<S: Scalar>(coords: &[S]) -> Decomposition {
    let (mut v0, mut v1, mut vstar, mut v01) = (vec![], vec![], vec![], vec![]);
    let one = S::one();
    for (i, x) in coords.iter().enumerate() {
        if x.is_zero() {
            v0.push(i + 1);
            v01.push(i + 1);
        } else if *x == one {
            v1.push(i + 1);
            v01.push(i + 1);
        } else {
            vstar.push(i + 1);
        }
    }
    let set = |v| IndexSet::new(v).unwrap();
    Decomposition {
        v0: set(v0),
        v1: set(v1),
        vstar: set(vstar),
        v01: set(v01),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuxSide {
    Positive,
    OnPlane,
    Negative,
}

impl AuxSide {
    pub fn of<S: Scalar>(value: &S) -> Self {
        match value.signum() {
            1 => AuxSide::Positive,
            0 => AuxSide::OnPlane,
            _ => AuxSide::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRecord<S> {
    pub coords: Vec<S>,
    /// Non-auxiliary hyperplanes through the vertex used to locate it.
    pub index_set: IndexSet,
    pub v0: IndexSet,
    pub v1: IndexSet,
    pub vstar: IndexSet,
    pub v01: IndexSet,
    pub aux_value: S,
    pub side: AuxSide,
    /// Created by the auxiliary plane cutting an edge; then `|v*| = |I| + 1`.
    pub aux_edge: bool,
}

impl<S: Scalar> VertexRecord<S> {
    pub(crate) fn build(coords: Vec<S>, index_set: IndexSet, aux: &Hyperplane<S>, aux_edge: bool) -> Self {
        let d = decompose_vertex(&coords);
        let aux_value = aux.eval(&coords);
        VertexRecord {
            side: AuxSide::of(&aux_value),
            coords,
            index_set,
            v0: d.v0,
            v1: d.v1,
            vstar: d.vstar,
            v01: d.v01,
            aux_value,
            aux_edge,
        }
    }

    pub fn degenerate(&self) -> bool {
        self.side == AuxSide::OnPlane
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// `sum_I C(n,|I|) 2^(n-|I|)` over the index sets scanned.
    pub nominal: u64,
    pub examined: u64,
    pub pruned: u64,
    pub blocks: u64,
}

#[derive(Debug, Clone)]
pub struct Enumeration<S> {
    /// Sorted by `(aux_edge, |I|, I, coords)`.
    pub vertices: Vec<VertexRecord<S>>,
    pub stats: EnumerationStats,
}

impl<S: Scalar> Enumeration<S> {
    /// Vertices of the polytope itself (auxiliary side included).
    pub fn polytope_vertices(&self) -> impl Iterator<Item = &VertexRecord<S>> {
        self.vertices.iter().filter(|v| v.side != AuxSide::Negative)
    }

    /// Summands of the vertex-sum formulas.
    pub fn contributing(&self) -> impl Iterator<Item = &VertexRecord<S>> {
        self.vertices
            .iter()
            .filter(|v| v.side == AuxSide::Positive && !v.aux_edge)
    }

    pub fn degenerate(&self) -> impl Iterator<Item = &VertexRecord<S>> {
        self.vertices.iter().filter(|v| v.degenerate())
    }
}

/// All subsets of `0..k` with at most `max` elements, by size then lexicographically.
pub(crate) fn subsets(k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 0..=max.min(k) {
        combinations(k, size, &mut |c| out.push(c.to_vec()));
    }
    out
}

pub(crate) fn combinations(k: usize, size: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..k {
            if k - i < size - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, k, size, cur, f);
            cur.pop();
        }
    }
    go(0, k, size, &mut Vec::with_capacity(size), f)
}

fn to_index_set(zero_based: &[usize]) -> IndexSet {
    IndexSet::new(zero_based.iter().map(|i| i + 1).collect()).unwrap()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Eq,
    Ineq,
    Strict,
}

/// One face block: fixed equations, fixed free coordinates, 0/1 elsewhere.
struct Block<'a, S> {
    planes: &'a [Hyperplane<S>],
    n: usize,
    eq: Vec<usize>,
    vstar: Vec<usize>,
    ineq: Vec<usize>,
    strict: Option<usize>,
}

#[derive(Default)]
struct Counters {
    examined: u64,
    pruned: u64,
}

impl<'a, S: Scalar> Block<'a, S> {
    fn tracked(&self) -> Vec<(usize, Role)> {
        let mut t: Vec<(usize, Role)> = self.eq.iter().map(|&p| (p, Role::Eq)).collect();
        t.extend(self.ineq.iter().map(|&p| (p, Role::Ineq)));
        t.extend(self.strict.iter().map(|&p| (p, Role::Strict)));
        t
    }

    fn corners(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.vstar.contains(i)).collect()
    }

    /// `M[k][l] = a_{vstar[l]}` of plane `eq[k]`.
    fn system(&self) -> Matrix<S> {
        Matrix::from_fn(self.eq.len(), self.vstar.len(), |k, l| {
            self.planes[self.eq[k]].a[self.vstar[l]].clone()
        })
    }
}

/// Depth-first walk over the 0/1 assignments that survive interval pruning.
/// The leaf sees the point with free coordinates still zero, and the partial
/// values of the tracked planes in the order eq, ineq, strict.
fn scan_with_corners<S: Scalar>(
    block: &Block<'_, S>,
    counters: &mut Counters,
    mut leaf: impl FnMut(&[S], &[S]),
) {
    let corners = block.corners();
    let tracked = block.tracked();
    let depth = corners.len();
    let mut lo = vec![vec![S::zero(); depth + 1]; tracked.len()];
    let mut hi = vec![vec![S::zero(); depth + 1]; tracked.len()];
    for (t, &(p, _)) in tracked.iter().enumerate() {
        let a = &block.planes[p].a;
        let (mut l, mut h) = (S::zero(), S::zero());
        for &i in &block.vstar {
            if a[i].is_negative() {
                l = l + a[i].clone();
            } else {
                h = h + a[i].clone();
            }
        }
        lo[t][depth] = l.clone();
        hi[t][depth] = h.clone();
        for k in (0..depth).rev() {
            let c = &a[corners[k]];
            if c.is_negative() {
                l = l + c.clone();
            } else {
                h = h + c.clone();
            }
            lo[t][k] = l.clone();
            hi[t][k] = h.clone();
        }
    }
    let feasible = |k: usize, base: &[S]| {
        tracked.iter().enumerate().all(|(t, &(_, role))| {
            let upper = base[t].clone() + hi[t][k].clone();
            match role {
                Role::Eq => {
                    !upper.is_negative() && !(base[t].clone() + lo[t][k].clone()).is_positive()
                }
                Role::Ineq => !upper.is_negative(),
                Role::Strict => upper.is_positive(),
            }
        })
    };

    fn go<S: Scalar>(
        k: usize,
        base: Vec<S>,
        coords: &mut Vec<S>,
        ctx: &mut dyn FnMut(usize, &[S]) -> bool,
        step: &dyn Fn(usize, &[S]) -> Vec<S>,
        corners: &[usize],
        leaf: &mut dyn FnMut(&[S], &[S]),
    ) {
        if !ctx(k, &base) {
            return;
        }
        if k == corners.len() {
            leaf(coords, &base);
            return;
        }
        let i = corners[k];
        let with_one = step(i, &base);
        coords[i] = S::zero();
        go(k + 1, base, coords, ctx, step, corners, leaf);
        coords[i] = S::one();
        go(k + 1, with_one, coords, ctx, step, corners, leaf);
        coords[i] = S::zero();
    }

    let mut gate = |k: usize, base: &[S]| {
        if feasible(k, base) {
            if k == depth {
                counters.examined += 1;
            }
            true
        } else {
            counters.pruned += 1u64 << (depth - k);
            false
        }
    };
    let step = |i: usize, base: &[S]| -> Vec<S> {
        base.iter()
            .zip(&tracked)
            .map(|(b, &(p, _))| b.clone() + block.planes[p].a[i].clone())
            .collect()
    };
    let base: Vec<S> = tracked.iter().map(|&(p, _)| block.planes[p].r.clone()).collect();
    let mut coords = vec![S::zero(); block.n];
    go(0, base, &mut coords, &mut gate, &step, &corners, &mut leaf);
}

fn in_open_unit<S: Scalar>(x: &S) -> bool {
    x.is_positive() && (S::one() - x.clone()).is_positive()
}

fn in_closed_unit<S: Scalar>(x: &S) -> bool {
    !x.is_negative() && !(S::one() - x.clone()).is_negative()
}

/// A point of `{M x = b} ∩ [0,1]^k`, if any, found at a vertex of that polytope.
fn box_point<S: Scalar>(m: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    let (particular, nullity) = match linalg::solve_affine(m, b).ok()? {
        AffineSolution::Inconsistent => return None,
        AffineSolution::Unique(x) => return x.iter().all(in_closed_unit).then_some(x),
        AffineSolution::Underdetermined {
            particular,
            nullity,
        } => (particular, nullity),
    };
    let _ = particular;
    let k = m.cols();
    let mut found = None;
    combinations(k, nullity, &mut |fixed| {
        if found.is_some() {
            return;
        }
        for mask in 0u64..(1 << nullity) {
            let mut rows: Vec<Vec<S>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
            let mut rhs = b.to_vec();
            for (bit, &c) in fixed.iter().enumerate() {
                rows.push((0..k).map(|l| if l == c { S::one() } else { S::zero() }).collect());
                rhs.push(if mask >> bit & 1 == 1 { S::one() } else { S::zero() });
            }
            let ext = Matrix::from_rows(rows).unwrap();
            if let Ok(AffineSolution::Unique(x)) = linalg::solve_affine(&ext, &rhs) {
                if x.iter().all(in_closed_unit) {
                    found = Some(x);
                    return;
                }
            }
        }
    });
    found
}

fn full_coords<S: Scalar>(corner: &[S], vstar: &[usize], x: &[S]) -> Vec<S> {
    let mut c = corner.to_vec();
    for (l, &i) in vstar.iter().enumerate() {
        c[i] = x[l].clone();
    }
    c
}

/// Value of a tracked plane at the full point.
fn plane_value<S: Scalar>(base: &S, plane: &Hyperplane<S>, vstar: &[usize], x: &[S]) -> S {
    vstar
        .iter()
        .zip(x)
        .fold(base.clone(), |acc, (&i, xi)| acc + plane.a[i].clone() * xi.clone())
}

struct FaceOutput<S> {
    vertices: Vec<VertexRecord<S>>,
    counters: Counters,
    non_generic: Option<(IndexSet, IndexSet)>,
}

/// Vertices in `F^{|I|} ∩ H_I` for one `(I, v*)` block, any auxiliary sign.
fn face_block<S: Scalar>(spec: &ClippedCubeSpec<S>, i_set: &[usize], vstar: &[usize]) -> FaceOutput<S> {
    let m = spec.m();
    let block = Block {
        planes: spec.hyperplanes(),
        n: spec.n(),
        eq: i_set.to_vec(),
        vstar: vstar.to_vec(),
        ineq: (0..m - 1).filter(|p| !i_set.contains(p)).collect(),
        strict: None,
    };
    let system = block.system();
    let inverse = linalg::inverse(&system).ok();
    let mut out = FaceOutput {
        vertices: Vec::new(),
        counters: Counters::default(),
        non_generic: None,
    };
    let k = i_set.len();
    let index_set = to_index_set(i_set);
    let mut non_generic = false;
    let aux = spec.aux();
    scan_with_corners(&block, &mut out.counters, |corner, base| {
        if non_generic {
            return;
        }
        let rhs: Vec<S> = base[..k].iter().map(|b| -b.clone()).collect();
        let x = match &inverse {
            Some(inv) => inv.mul_vec(&rhs).unwrap(),
            None => {
                if box_point(&system, &rhs).is_some() {
                    non_generic = true;
                }
                return;
            }
        };
        if !x.iter().all(in_open_unit) {
            return;
        }
        let ok = block.ineq.iter().enumerate().all(|(t, &p)| {
            !plane_value(&base[k + t], &block.planes[p], vstar, &x).is_negative()
        });
        if ok {
            let coords = full_coords(corner, vstar, &x);
            out.vertices
                .push(VertexRecord::build(coords, index_set.clone(), aux, false));
        }
    });
    if non_generic {
        out.non_generic = Some((index_set, to_index_set(vstar)));
    }
    out
}

/// Points of the polytope where `g_m` cuts an edge interior of a face block.
fn aux_edge_block<S: Scalar>(spec: &ClippedCubeSpec<S>, i_set: &[usize], vstar: &[usize]) -> Vec<VertexRecord<S>> {
    let m = spec.m();
    let mut eq = i_set.to_vec();
    eq.push(m - 1);
    let block = Block {
        planes: spec.hyperplanes(),
        n: spec.n(),
        eq,
        vstar: vstar.to_vec(),
        ineq: (0..m - 1).filter(|p| !i_set.contains(p)).collect(),
        strict: None,
    };
    let Ok(inverse) = linalg::inverse(&block.system()) else {
        return Vec::new();
    };
    let k = block.eq.len();
    let index_set = to_index_set(i_set);
    let mut out = Vec::new();
    scan_with_corners(&block, &mut Counters::default(), |corner, base| {
        let rhs: Vec<S> = base[..k].iter().map(|b| -b.clone()).collect();
        let x = inverse.mul_vec(&rhs).unwrap();
        if !x.iter().all(in_open_unit) {
            return;
        }
        let ok = block.ineq.iter().enumerate().all(|(t, &p)| {
            !plane_value(&base[k + t], &block.planes[p], vstar, &x).is_negative()
        });
        if ok {
            let coords = full_coords(corner, vstar, &x);
            out.push(VertexRecord::build(coords, index_set.clone(), spec.aux(), true));
        }
    });
    out
}

fn sort_vertices<S: Scalar>(v: &mut [VertexRecord<S>]) {
    v.sort_by(|a, b| {
        (a.aux_edge, a.index_set.len(), &a.index_set, &a.coords).cmp(&(
            b.aux_edge,
            b.index_set.len(),
            &b.index_set,
            &b.coords,
        ))
    });
}

/// Face vertices, auxiliary-edge vertices and the non-generic blocks met on the way.
fn enumerate_collect<S: Scalar>(
    spec: &ClippedCubeSpec<S>,
) -> (Enumeration<S>, Vec<(IndexSet, IndexSet)>) {
    let n = spec.n();
    let m = spec.m();
    let mut blocks = Vec::new();
    let mut nominal = 0u64;
    for i_set in subsets(m - 1, n) {
        let k = i_set.len();
        nominal += binomial(n as u32, k as u32).to_u64().unwrap_or(u64::MAX) << (n - k);
        combinations(n, k, &mut |vstar| blocks.push((i_set.clone(), vstar.to_vec())));
    }
    let outputs: Vec<FaceOutput<S>> = blocks
        .par_iter()
        .map(|(i_set, vstar)| face_block(spec, i_set, vstar))
        .collect();

    let mut stats = EnumerationStats {
        nominal,
        blocks: blocks.len() as u64,
        ..Default::default()
    };
    let mut vertices = Vec::new();
    let mut non_generic = Vec::new();
    for o in outputs {
        stats.examined += o.counters.examined;
        stats.pruned += o.counters.pruned;
        vertices.extend(o.vertices);
        non_generic.extend(o.non_generic);
    }

    let mut edge_blocks = Vec::new();
    for i_set in subsets(m - 1, n.saturating_sub(1)) {
        combinations(n, i_set.len() + 1, &mut |vstar| {
            edge_blocks.push((i_set.clone(), vstar.to_vec()))
        });
    }
    let known: BTreeSet<Vec<S>> = vertices.iter().map(|v| v.coords.clone()).collect();
    let mut seen = known;
    let edge: Vec<Vec<VertexRecord<S>>> = edge_blocks
        .par_iter()
        .map(|(i_set, vstar)| aux_edge_block(spec, i_set, vstar))
        .collect();
    for v in edge.into_iter().flatten() {
        if seen.insert(v.coords.clone()) {
            vertices.push(v);
        }
    }
    sort_vertices(&mut vertices);
    (Enumeration { vertices, stats }, non_generic)
}

/// Every vertex of `[0,1]^n ∩ H_1^+ ∩ ... ∩ H_{m-1}^+` found in some
/// `F^{|I|} ∩ H_I`, tagged with the sign of `g_m`, followed by the degenerate
/// vertices created where `g_m = 0` cuts an edge.
pub fn enumerate_vertices<S: Scalar>(spec: &ClippedCubeSpec<S>) -> Result<Enumeration<S>, CubeError> {
    let (e, non_generic) = enumerate_collect(spec);
    match non_generic.into_iter().next() {
        Some((index_set, vstar)) => Err(CubeError::NonGenericFace { index_set, vstar }),
        None => Ok(e),
    }
}

/// Labels the minors that appear in a vertex term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "t", rename_all = "kebab-case")]
pub enum FactorRole {
    /// `|A^I_{v*}|`.
    Pivot,
    /// Plane `t` of `I` replaced by the auxiliary plane.
    Replace(usize),
    /// Coordinate `t` of `v01` joined to `v*`.
    Edge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorFactor<S> {
    pub role: FactorRole,
    pub rows: IndexSet,
    pub cols: IndexSet,
    pub value: S,
}

impl<S: Scalar> MinorFactor<S> {
    pub(crate) fn compute(a: &Matrix<S>, role: FactorRole, rows: IndexSet, cols: IndexSet) -> Self {
        let value = a.minor(&rows, &cols).expect("minor indices in range");
        MinorFactor {
            role,
            rows,
            cols,
            value,
        }
    }
}

/// `A^{(I\t)∪m}_{v*}` for `t ∈ I` and `A^{I∪m}_{v*∪t}` for `t ∈ v01`.
pub fn clipping_factors<S: Scalar>(a: &Matrix<S>, v: &VertexRecord<S>) -> Vec<MinorFactor<S>> {
    let m = a.cols();
    let mut out = Vec::new();
    for t in v.index_set.iter() {
        let cols = v.index_set.without(t).insert_ordered(m).unwrap();
        out.push(MinorFactor::compute(a, FactorRole::Replace(t), v.vstar.clone(), cols));
    }
    let cols = v.index_set.insert_ordered(m).unwrap();
    for t in v.v01.iter() {
        let rows = v.vstar.insert_ordered(t).unwrap();
        out.push(MinorFactor::compute(a, FactorRole::Edge(t), rows, cols.clone()));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation<S> {
    /// A point of `F^{|I|-1} ∩ H_I`. `isolated` is false when the equations
    /// leave a whole segment and the point is one sample of it.
    FaceWitness {
        index_set: IndexSet,
        point: Vec<S>,
        isolated: bool,
    },
    /// A vanishing minor at a contributing vertex.
    ZeroMinor {
        index_set: IndexSet,
        vertex: Vec<S>,
        factor: MinorFactor<S>,
    },
    NonGenericFace { index_set: IndexSet, vstar: IndexSet },
}

impl<S> Violation<S> {
    pub fn condition(&self) -> char {
        match self {
            Violation::FaceWitness { .. } | Violation::NonGenericFace { .. } => 'A',
            Violation::ZeroMinor { .. } => 'B',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodClippingReport<S> {
    pub violations: Vec<Violation<S>>,
}

impl<S: Scalar> GoodClippingReport<S> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Witness points of condition (A) for the index set `I`.
    pub fn witnesses(&self, index_set: &IndexSet) -> Vec<Vec<S>> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                Violation::FaceWitness {
                    index_set: i,
                    point,
                    ..
                } if i == index_set => Some(point.clone()),
                _ => None,
            })
            .collect()
    }
}

/// Scalar-free view of a violation, for error values and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationSummary {
    pub condition: char,
    pub kind: String,
    pub index_set: IndexSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isolated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vstar: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<FactorRole>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<IndexSet>,
}

impl ViolationSummary {
    fn new(condition: char, kind: &str, index_set: IndexSet) -> Self {
        ViolationSummary {
            condition,
            kind: kind.to_string(),
            index_set,
            point: None,
            isolated: None,
            vstar: None,
            factor: None,
            rows: None,
            cols: None,
        }
    }
}

impl std::fmt::Display for ViolationSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) {} I={}", self.condition, self.kind, self.index_set)?;
        if let Some(p) = &self.point {
            write!(f, " at ({})", p.join(","))?;
        }
        if let Some(v) = &self.vstar {
            write!(f, " v*={v}")?;
        }
        if let (Some(r), Some(c)) = (&self.rows, &self.cols) {
            write!(f, " minor rows {r} cols {c}")?;
        }
        Ok(())
    }
}

impl<S: Scalar> Violation<S> {
    pub fn summary(&self) -> ViolationSummary {
        let strings = |v: &[S]| Some(v.iter().map(|x| x.to_string()).collect());
        match self {
            Violation::FaceWitness {
                index_set,
                point,
                isolated,
            } => ViolationSummary {
                point: strings(point),
                isolated: Some(*isolated),
                ..ViolationSummary::new('A', "face-witness", index_set.clone())
            },
            Violation::ZeroMinor {
                index_set,
                vertex,
                factor,
            } => ViolationSummary {
                point: strings(vertex),
                factor: Some(factor.role),
                rows: Some(factor.rows.clone()),
                cols: Some(factor.cols.clone()),
                ..ViolationSummary::new('B', "zero-minor", index_set.clone())
            },
            Violation::NonGenericFace { index_set, vstar } => ViolationSummary {
                vstar: Some(vstar.clone()),
                ..ViolationSummary::new('A', "non-generic-face", index_set.clone())
            },
        }
    }
}

impl<S: Scalar> GoodClippingReport<S> {
    pub fn summary(&self) -> Vec<ViolationSummary> {
        self.violations.iter().map(Violation::summary).collect()
    }
}

/// Points of `F^{|I|-1} ∩ H_I` for one `(I, v*)` block with `|v*| = |I| - 1`.
fn witness_block<S: Scalar>(spec: &ClippedCubeSpec<S>, i_set: &[usize], vstar: &[usize]) -> Vec<Violation<S>> {
    let m = spec.m();
    let block = Block {
        planes: spec.hyperplanes(),
        n: spec.n(),
        eq: i_set.to_vec(),
        vstar: vstar.to_vec(),
        ineq: (0..m - 1).filter(|p| !i_set.contains(p)).collect(),
        strict: Some(m - 1),
    };
    let system = block.system();
    let k = i_set.len();
    let index_set = to_index_set(i_set);
    let mut out = Vec::new();
    scan_with_corners(&block, &mut Counters::default(), |corner, base| {
        let rhs: Vec<S> = base[..k].iter().map(|b| -b.clone()).collect();
        match linalg::solve_affine(&system, &rhs).unwrap() {
            AffineSolution::Inconsistent => {}
            AffineSolution::Unique(x) => {
                if !x.iter().all(in_open_unit) {
                    return;
                }
                let ok = block.ineq.iter().enumerate().all(|(t, &p)| {
                    !plane_value(&base[k + t], &block.planes[p], vstar, &x).is_negative()
                });
                let aux = plane_value(&base[base.len() - 1], spec.aux(), vstar, &x);
                if ok && aux.is_positive() {
                    out.push(Violation::FaceWitness {
                        index_set: index_set.clone(),
                        point: full_coords(corner, vstar, &x),
                        isolated: true,
                    });
                }
            }
            AffineSolution::Underdetermined { .. } => {
                if let Some(x) = box_point(&system, &rhs) {
                    out.push(Violation::FaceWitness {
                        index_set: index_set.clone(),
                        point: full_coords(corner, vstar, &x),
                        isolated: false,
                    });
                }
            }
        }
    });
    out
}

/// Checks both good clipping conditions, reusing an existing enumeration.
pub fn check_good_clipping_with<S: Scalar>(
    spec: &ClippedCubeSpec<S>,
    enumeration: &Enumeration<S>,
    non_generic: &[(IndexSet, IndexSet)],
) -> GoodClippingReport<S> {
    let n = spec.n();
    let m = spec.m();
    let mut violations: Vec<Violation<S>> = non_generic
        .iter()
        .map(|(index_set, vstar)| Violation::NonGenericFace {
            index_set: index_set.clone(),
            vstar: vstar.clone(),
        })
        .collect();

    let mut blocks = Vec::new();
    for i_set in subsets(m - 1, n + 1) {
        if i_set.is_empty() {
            continue;
        }
        combinations(n, i_set.len() - 1, &mut |vstar| {
            blocks.push((i_set.clone(), vstar.to_vec()))
        });
    }
    let found: Vec<Vec<Violation<S>>> = blocks
        .par_iter()
        .map(|(i_set, vstar)| witness_block(spec, i_set, vstar))
        .collect();
    let mut witnesses: Vec<Violation<S>> = found.into_iter().flatten().collect();
    witnesses.sort_by(|a, b| match (a, b) {
        (
            Violation::FaceWitness {
                index_set: ia,
                point: pa,
                ..
            },
            Violation::FaceWitness {
                index_set: ib,
                point: pb,
                ..
            },
        ) => (ia.len(), ia, pa).cmp(&(ib.len(), ib, pb)),
        _ => std::cmp::Ordering::Equal,
    });
    violations.extend(witnesses);

    let a = spec.matrix();
    for v in enumeration.contributing() {
        for factor in clipping_factors(&a, v) {
            if factor.value.is_zero() {
                violations.push(Violation::ZeroMinor {
                    index_set: v.index_set.clone(),
                    vertex: v.coords.clone(),
                    factor,
                });
            }
        }
    }
    GoodClippingReport { violations }
}

/// Condition (A): no point of `F^{|I|-1}` lies in `H_I`. Condition (B): no
/// denominator minor vanishes at a contributing vertex. Never fails; every
/// problem found is listed.
pub fn check_good_clipping<S: Scalar>(spec: &ClippedCubeSpec<S>) -> GoodClippingReport<S> {
    let (e, non_generic) = enumerate_collect(spec);
    check_good_clipping_with(spec, &e, &non_generic)
}

/// Enumeration plus good-clipping report in one pass.
pub fn analyze<S: Scalar>(spec: &ClippedCubeSpec<S>) -> (Enumeration<S>, GoodClippingReport<S>) {
    let (e, non_generic) = enumerate_collect(spec);
    let report = check_good_clipping_with(spec, &e, &non_generic);
    (e, report)
}

/// Vertex set of `[0,1]^n ∩ {g_j >= 0 : j ∈ active}` (0-based plane indices).
pub(crate) fn vertex_set<S: Scalar>(
    n: usize,
    planes: &[Hyperplane<S>],
    active: &[usize],
) -> BTreeSet<Vec<S>> {
    let mut blocks = Vec::new();
    for pick in subsets(active.len(), n) {
        let i_set: Vec<usize> = pick.iter().map(|&k| active[k]).collect();
        combinations(n, i_set.len(), &mut |vstar| blocks.push((i_set.clone(), vstar.to_vec())));
    }
    let found: Vec<Vec<Vec<S>>> = blocks
        .par_iter()
        .map(|(i_set, vstar)| {
            let block = Block {
                planes,
                n,
                eq: i_set.clone(),
                vstar: vstar.clone(),
                ineq: active.iter().copied().filter(|p| !i_set.contains(p)).collect(),
                strict: None,
            };
            let Ok(inverse) = linalg::inverse(&block.system()) else {
                return Vec::new();
            };
            let k = i_set.len();
            let mut out = Vec::new();
            scan_with_corners(&block, &mut Counters::default(), |corner, base| {
                let rhs: Vec<S> = base[..k].iter().map(|b| -b.clone()).collect();
                let x = inverse.mul_vec(&rhs).unwrap();
                if !x.iter().all(in_open_unit) {
                    return;
                }
                let ok = block.ineq.iter().enumerate().all(|(t, &p)| {
                    !plane_value(&base[k + t], &block.planes[p], vstar, &x).is_negative()
                });
                if ok {
                    out.push(full_coords(corner, vstar, &x));
                }
            });
            out
        })
        .collect();
    found.into_iter().flatten().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RedundancyReport {
    /// 1-based indices of hyperplanes whose removal leaves the polytope unchanged.
    pub redundant: Vec<usize>,
}

/// Scans `j = m, ..., 1`; `j` is redundant when the polytope cut by the
/// remaining, not yet flagged hyperplanes has the same vertices without it.
pub fn check_redundancy<S: Scalar>(spec: &ClippedCubeSpec<S>) -> RedundancyReport {
    let n = spec.n();
    let planes = spec.hyperplanes();
    let mut kept: Vec<usize> = (0..spec.m()).collect();
    let mut redundant = Vec::new();
    for j in (0..spec.m()).rev() {
        let current = vertex_set(n, planes, &kept);
        let without: Vec<usize> = kept.iter().copied().filter(|&p| p != j).collect();
        if vertex_set(n, planes, &without) == current {
            kept = without;
            redundant.push(j + 1);
        }
    }
    redundant.reverse();
    RedundancyReport { redundant }
}

/// `Ical`: the indices into the augmented matrix of the `n` half-spaces
/// through a face vertex, well-ordered.
pub fn augmented_index_set<S: Scalar>(n: usize, v: &VertexRecord<S>) -> IndexSet {
    let mut idx: Vec<usize> = v
        .v0
        .iter()
        .map(|i| 2 * i - 1)
        .chain(v.v1.iter().map(|i| 2 * i))
        .chain(v.index_set.iter().map(|j| 2 * n + j))
        .collect();
    idx.sort_unstable();
    IndexSet::new(idx).unwrap()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::index::{permutation_parity, separating_parity, sign_of_exponent};
    use crate::scalar::{integer, rational};
    use proptest::prelude::*;

    pub(crate) fn plane(a: &[i64], r: Rational) -> Hyperplane<Rational> {
        Hyperplane::new(a.iter().map(|&x| integer(x)).collect(), r)
    }

    pub(crate) fn two_plane_sample() -> ClippedCubeSpec<Rational> {
        ClippedCubeSpec::new(
            3,
            vec![plane(&[-1, 1, 0], rational(1, 2)), plane(&[-1, -2, -1], integer(3))],
        )
        .unwrap()
    }

    pub(crate) fn three_plane_sample() -> ClippedCubeSpec<Rational> {
        ClippedCubeSpec::new(
            3,
            vec![
                plane(&[-1, 1, 0], rational(1, 2)),
                plane(&[0, 0, 1], rational(-1, 2)),
                plane(&[-1, -2, -1], integer(3)),
            ],
        )
        .unwrap()
    }

    pub(crate) fn bad_clipping_sample() -> ClippedCubeSpec<Rational> {
        ClippedCubeSpec::new(
            3,
            vec![
                plane(&[1, 1, 2], integer(-1)),
                plane(&[-1, -1, 0], integer(1)),
                plane(&[1, 2, 4], integer(1)),
            ],
        )
        .unwrap()
    }

    fn pt(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(p, q)| rational(p, q)).collect()
    }

    #[test]
    fn decomposition_example() {
        let coords = pt(&[(0, 1), (1, 1), (1, 3), (0, 1), (0, 1), (3, 5), (1, 1), (1, 8)]);
        let d = decompose_vertex(&coords);
        assert_eq!(d.vstar, IndexSet::new(vec![3, 6, 8]).unwrap());
        assert_eq!(d.v0, IndexSet::new(vec![1, 4, 5]).unwrap());
        assert_eq!(d.v1, IndexSet::new(vec![2, 7]).unwrap());
        assert_eq!((d.vstar.sum(), d.v0.sum(), d.v1.sum()), (17, 10, 9));
        let d = decompose_vertex(&pt(&[(1, 2), (1, 1)]));
        assert_eq!(d.vstar, IndexSet::singleton(1));
        assert_eq!(d.v1, IndexSet::singleton(2));
        assert!(d.v0.is_empty());
    }

    #[test]
    fn validation() {
        assert_eq!(ClippedCubeSpec::<Rational>::new(2, vec![]), Err(CubeError::NoHyperplanes));
        assert_eq!(
            ClippedCubeSpec::new(2, vec![plane(&[0, 0], integer(1))]),
            Err(CubeError::ZeroNormal(1))
        );
        assert!(matches!(
            ClippedCubeSpec::new(2, vec![plane(&[1], integer(1))]),
            Err(CubeError::CoefficientCount { .. })
        ));
    }

    #[test]
    fn two_plane_sample_vertices() {
        let e = enumerate_vertices(&two_plane_sample()).unwrap();
        let poly: Vec<_> = e.polytope_vertices().collect();
        assert_eq!(poly.len(), 9);
        let degenerate: Vec<Vec<Rational>> = e.degenerate().map(|v| v.coords.clone()).collect();
        assert_eq!(
            degenerate,
            vec![pt(&[(0, 1), (1, 1), (1, 1)]), pt(&[(1, 1), (1, 1), (0, 1)]), pt(&[(1, 1), (1, 2), (1, 1)])]
        );
        assert!(poly.iter().any(|v| v.coords == pt(&[(1, 2), (0, 1), (0, 1)])));
        assert_eq!(e.contributing().count(), 6);
        let negative: Vec<_> = e.vertices.iter().filter(|v| v.side == AuxSide::Negative).collect();
        assert_eq!(negative.len(), 1);
        assert_eq!(negative[0].coords, pt(&[(1, 1), (1, 1), (1, 1)]));
        assert_eq!(e.stats.nominal, 8 + 3 * 4);
        assert_eq!(e.stats.examined + e.stats.pruned, e.stats.nominal);
    }

    #[test]
    fn three_plane_sample_vertices() {
        let e = enumerate_vertices(&three_plane_sample()).unwrap();
        assert_eq!(e.polytope_vertices().count(), 10);
        let degenerate: BTreeSet<Vec<Rational>> = e.degenerate().map(|v| v.coords.clone()).collect();
        let expected: BTreeSet<Vec<Rational>> = [
            pt(&[(0, 1), (1, 1), (1, 1)]),
            pt(&[(1, 1), (1, 2), (1, 1)]),
            pt(&[(1, 1), (3, 4), (1, 2)]),
            pt(&[(1, 2), (1, 1), (1, 2)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(degenerate, expected);
        assert_eq!(e.contributing().count(), 6);
    }

    #[test]
    fn triangle_corners() {
        let spec = ClippedCubeSpec::new(2, vec![plane(&[-1, -1], integer(1))]).unwrap();
        let e = enumerate_vertices(&spec).unwrap();
        assert_eq!(e.vertices.len(), 4);
        let degenerate: Vec<_> = e.degenerate().map(|v| v.coords.clone()).collect();
        assert_eq!(degenerate, vec![pt(&[(0, 1), (1, 1)]), pt(&[(1, 1), (0, 1)])]);
        assert_eq!(e.stats.nominal, 4);
    }

    #[test]
    fn good_clipping_examples() {
        let report = check_good_clipping(&bad_clipping_sample());
        assert!(!report.holds());
        assert_eq!(
            report.witnesses(&IndexSet::singleton(1)),
            vec![pt(&[(0, 1), (1, 1), (0, 1)]), pt(&[(1, 1), (0, 1), (0, 1)])]
        );
        assert_eq!(report.witnesses(&IndexSet::singleton(2)).len(), 4);
        assert!(check_good_clipping(&two_plane_sample()).holds());
        assert!(check_good_clipping(&three_plane_sample()).holds());
        let generic = ClippedCubeSpec::new(3, vec![plane(&[1, 2, -4], rational(1, 3))]).unwrap();
        assert!(check_good_clipping(&generic).holds());
        let flat = ClippedCubeSpec::new(2, vec![plane(&[1, 0], rational(-1, 3))]).unwrap();
        let report = check_good_clipping(&flat);
        assert!(report.violations.iter().all(|v| v.condition() == 'B'));
        assert!(!report.holds());
    }

    #[test]
    fn redundancy_examples() {
        assert!(check_redundancy(&two_plane_sample()).redundant.is_empty());
        let dup = ClippedCubeSpec::new(
            3,
            vec![
                plane(&[-1, 1, 0], rational(1, 2)),
                plane(&[-1, 1, 0], rational(1, 2)),
                plane(&[-1, -2, -1], integer(3)),
            ],
        )
        .unwrap();
        assert_eq!(check_redundancy(&dup).redundant, vec![2]);
        let far = ClippedCubeSpec::new(
            3,
            vec![plane(&[1, 0, 0], integer(5)), plane(&[-1, -2, -1], integer(3))],
        )
        .unwrap();
        assert_eq!(check_redundancy(&far).redundant, vec![1]);
    }

    #[test]
    fn duplicate_plane_is_non_generic() {
        let dup = ClippedCubeSpec::new(
            2,
            vec![
                plane(&[1, 1], rational(-1, 3)),
                plane(&[1, 1], rational(-1, 3)),
                plane(&[1, 3], integer(1)),
            ],
        )
        .unwrap();
        assert!(matches!(
            enumerate_vertices(&dup),
            Err(CubeError::NonGenericFace { .. })
        ));
        assert!(!check_good_clipping(&dup).holds());
    }

    pub(crate) fn arb_spec(max_n: usize, max_m: usize) -> impl Strategy<Value = ClippedCubeSpec<Rational>> {
        (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
            prop::collection::vec(
                (prop::collection::vec((-3i64..=3, 1i64..=3), n), (-6i64..=6, 1i64..=4)),
                m,
            )
            .prop_filter_map("zero normal", move |planes| {
                let hs = planes
                    .into_iter()
                    .map(|(a, (p, q))| {
                        Hyperplane::new(a.into_iter().map(|(x, d)| rational(x, d)).collect(), rational(p, q))
                    })
                    .collect();
                ClippedCubeSpec::new(n, hs).ok()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn vertices_satisfy_their_equations(spec in arb_spec(4, 4)) {
            let Ok(e) = enumerate_vertices(&spec) else { return Ok(()) };
            for v in &e.vertices {
                if !v.aux_edge {
                    prop_assert_eq!(v.vstar.len(), v.index_set.len());
                }
                for j in v.index_set.iter() {
                    prop_assert!(spec.hyperplane(j).eval(&v.coords).is_zero());
                }
                for j in 1..spec.m() {
                    prop_assert!(!spec.hyperplane(j).eval(&v.coords).is_negative());
                }
                prop_assert_eq!(&v.aux_value, &spec.aux().eval(&v.coords));
                for i in v.vstar.iter() {
                    prop_assert!(in_open_unit(&v.coords[i - 1]));
                }
            }
        }

        #[test]
        fn enumeration_matches_brute_force(spec in arb_spec(4, 4)) {
            let Ok(e) = enumerate_vertices(&spec) else { return Ok(()) };
            let system = spec.to_halfspaces();
            let brute: BTreeSet<Vec<Rational>> =
                system.vertices().into_iter().map(|v| v.coords).collect();
            let ours: BTreeSet<Vec<Rational>> =
                e.polytope_vertices().map(|v| v.coords.clone()).collect();
            prop_assert_eq!(ours, brute);
        }

        #[test]
        fn augmented_minor_relations(spec in arb_spec(5, 4)) {
            let Ok(e) = enumerate_vertices(&spec) else { return Ok(()) };
            let n = spec.n();
            let a = spec.matrix();
            let big = spec.augmented_matrix();
            for v in e.vertices.iter().filter(|v| !v.aux_edge) {
                let ical = augmented_index_set(n, v);
                let delta = separating_parity(&IndexSet::range(n), &v.vstar).unwrap();
                let lhs = big.minor(&IndexSet::range(n), &ical).unwrap();
                let rhs = a.minor(&v.vstar, &v.index_set).unwrap()
                    * Rational::from_i64((sign_of_exponent(v.v1.len() as i64) * delta) as i64);
                prop_assert_eq!(lhs, rhs);

                let ical01: Vec<usize> = ical.iter().filter(|&c| c <= 2 * n).collect();
                let sub = big
                    .submatrix(&v.v01, &IndexSet::new(ical01.clone()).unwrap())
                    .unwrap();
                for r in 0..sub.rows() {
                    for c in 0..sub.cols() {
                        let x = sub.get(r, c);
                        if r == c {
                            prop_assert!(*x == integer(1) || *x == integer(-1));
                        } else {
                            prop_assert!(x.is_zero());
                        }
                    }
                }
                prop_assert_eq!(
                    sub.determinant().unwrap(),
                    integer(sign_of_exponent(v.v1.len() as i64) as i64)
                );
            }
        }

        #[test]
        fn cup_and_vee_edge_products(spec in arb_spec(5, 4)) {
            let Ok(e) = enumerate_vertices(&spec) else { return Ok(()) };
            let a = spec.matrix();
            let m = spec.m();
            for v in e.vertices.iter().filter(|v| !v.aux_edge) {
                let k = v.index_set.len() as i64;
                let cup_cols = v.index_set.insert_ordered(m).unwrap();
                let vee_cols = v.index_set.push(m).unwrap();
                let mut cup = integer(1);
                let mut vee = integer(1);
                for t in v.v01.iter() {
                    cup *= a.minor(&v.vstar.insert_ordered(t).unwrap(), &cup_cols).unwrap();
                    vee *= a.minor(&v.vstar.push(t).unwrap(), &vee_cols).unwrap();
                }
                let sign = sign_of_exponent(v.vstar.sum() as i64 - k * (k + 1) / 2);
                prop_assert_eq!(cup, vee * integer(sign as i64));
                prop_assert_eq!(
                    permutation_parity(&cup_cols, &vee_cols).unwrap(),
                    1
                );
            }
        }
    }
}
