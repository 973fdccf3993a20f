//! Polytopes given by arbitrary half-spaces `g_i(x) >= 0`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cube::{combinations, validate_planes, CubeError, Hyperplane};
use crate::eps::EpsRational;
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSpaceSystem<S> {
    n: usize,
    planes: Vec<Hyperplane<S>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeVertex<S> {
    pub coords: Vec<S>,
    /// 1-based indices of every half-space tight at the vertex.
    pub tight: Vec<usize>,
}

impl<S: Scalar> HalfSpaceSystem<S> {
    pub fn new(n: usize, planes: Vec<Hyperplane<S>>) -> Result<Self, CubeError> {
        validate_planes(n, &planes)?;
        Ok(HalfSpaceSystem { n, planes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.planes.len()
    }

    pub fn planes(&self) -> &[Hyperplane<S>] {
        &self.planes
    }

    pub fn matrix(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, self.m(), |i, j| self.planes[j].a[i].clone())
    }

    pub fn contains(&self, x: &[S]) -> bool {
        self.planes.iter().all(|h| !h.eval(x).is_negative())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HalfSpaceSystem<T> {
        HalfSpaceSystem {
            n: self.n,
            planes: self.planes.iter().map(|h| h.map(&f)).collect(),
        }
    }

    /// Same half-spaces in another order; `order[k]` is the 0-based source index.
    pub fn permuted(&self, order: &[usize]) -> Self {
        HalfSpaceSystem {
            n: self.n,
            planes: order.iter().map(|&k| self.planes[k].clone()).collect(),
        }
    }

    /// Every vertex, found by intersecting each `n`-subset of hyperplanes.
    /// Sorted by coordinates.
    pub fn vertices(&self) -> Vec<PolytopeVertex<S>> {
        let mut subsets = Vec::new();
        combinations(self.m(), self.n, &mut |c| subsets.push(c.to_vec()));
        let points: Vec<Vec<S>> = subsets
            .par_iter()
            .filter_map(|idx| {
                let m = Matrix::from_fn(self.n, self.n, |r, c| self.planes[idx[r]].a[c].clone());
                let b: Vec<S> = idx.iter().map(|&k| -self.planes[k].r.clone()).collect();
                let x = linalg::solve_square(&m, &b).ok()?;
                self.contains(&x).then_some(x)
            })
            .collect();
        let mut unique: BTreeMap<Vec<S>, ()> = BTreeMap::new();
        for p in points {
            unique.insert(p, ());
        }
        unique
            .into_keys()
            .map(|coords| {
                let tight = (0..self.m())
                    .filter(|&k| self.planes[k].eval(&coords).is_zero())
                    .map(|k| k + 1)
                    .collect();
                PolytopeVertex { coords, tight }
            })
            .collect()
    }

    /// True when the recession cone `{d : a_i . d >= 0}` is `{0}`.
    pub fn is_bounded(&self) -> bool {
        let a = self.matrix().transpose();
        if linalg::rank(&a) < self.n {
            return false;
        }
        // A pointed cone is nonzero iff it has an extreme ray, cut out by
        // n-1 independent tight constraints.
        let mut bounded = true;
        combinations(self.m(), self.n - 1, &mut |idx| {
            if !bounded {
                return;
            }
            let sub = Matrix::from_fn(idx.len(), self.n, |r, c| a.get(idx[r], c).clone());
            let ns = linalg::nullspace(&sub);
            if ns.len() != 1 {
                return;
            }
            let d = &ns[0];
            for dir in [1i64, -1] {
                let s = S::from_i64(dir);
                if self
                    .planes
                    .iter()
                    .all(|h| !(linalg::dot(&h.a, d) * s.clone()).is_negative())
                {
                    bounded = false;
                }
            }
        });
        bounded
    }
}

impl HalfSpaceSystem<EpsRational> {
    pub fn at_zero(&self) -> Result<HalfSpaceSystem<Rational>, ScalarError> {
        let planes = self
            .planes
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
        Ok(HalfSpaceSystem { n: self.n, planes })
    }
}
