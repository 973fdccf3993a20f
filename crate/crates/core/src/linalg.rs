//! Dense matrices, minors and exact linear solves.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::index::IndexSet;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("singular system")]
    SingularSystem,
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|r| &self.data[r * self.cols..(r + 1) * self.cols]))
            .finish()
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::ShapeMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry at 0-based `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: S) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// `M^J_K`: rows listed by `rows`, columns by `cols`, both 1-based and
    /// kept in the given order.
    pub fn submatrix(&self, rows: &IndexSet, cols: &IndexSet) -> Result<Self, LinalgError> {
        for (set, bound) in [(rows, self.rows), (cols, self.cols)] {
            if let Some(bad) = set.iter().find(|&i| i > bound) {
                return Err(LinalgError::IndexOutOfRange { index: bad, bound });
            }
        }
        Ok(Matrix::from_fn(rows.len(), cols.len(), |r, c| {
            self.get(rows.as_slice()[r] - 1, cols.as_slice()[c] - 1).clone()
        }))
    }

    /// Determinant of `M^J_K`. The empty minor is 1.
    pub fn minor(&self, rows: &IndexSet, cols: &IndexSet) -> Result<S, LinalgError> {
        if rows.len() != cols.len() {
            return Err(LinalgError::ShapeMismatch(format!(
                "minor needs |rows| = |cols|, got {} and {}",
                rows.len(),
                cols.len()
            )));
        }
        Ok(S::determinant(&self.submatrix(rows, cols)?))
    }

    pub fn determinant(&self) -> Result<S, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::ShapeMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(S::determinant(self))
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| dot(self.row(r), v))
            .collect())
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Gaussian elimination over any field.
pub fn field_determinant<S: Scalar>(m: &Matrix<S>) -> S {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.data.clone();
    let mut det = S::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
            return S::zero();
        };
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            det = -det;
        }
        let pivot = a[k * n + k].clone();
        det = det * pivot.clone();
        for r in k + 1..n {
            if a[r * n + k].is_zero() {
                continue;
            }
            let f = a[r * n + k].clone() / pivot.clone();
            for c in k + 1..n {
                let v = a[r * n + c].clone() - f.clone() * a[k * n + c].clone();
                a[r * n + c] = v;
            }
        }
    }
    det
}

/// Fraction-free Bareiss elimination after clearing row denominators.
pub fn bareiss_determinant(m: &Matrix<Rational>) -> Rational {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return <Rational as One>::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<BigInt> = Vec::with_capacity(n * n);
    for r in 0..n {
        let row = m.row(r);
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        for x in row {
            a.push(x.numer() * (&l / x.denom()));
        }
        scale *= l;
    }
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
            return <Rational as Zero>::zero();
        };
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        for r in k + 1..n {
            for c in k + 1..n {
                let v = (&a[r * n + c] * &a[k * n + k] - &a[r * n + k] * &a[k * n + c]) / &prev;
                a[r * n + c] = v;
            }
            a[r * n + k] = BigInt::zero();
        }
        prev = a[k * n + k].clone();
    }
    let det = a[n * n - 1].clone() * sign;
    Rational::new(det, scale)
}

/// Solves `A x = b` for square non-singular `A`.
pub fn solve_square<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Vec<S>, LinalgError> {
    if !a.is_square() || b.len() != a.rows {
        return Err(LinalgError::ShapeMismatch(format!(
            "{}x{} system with {} right-hand sides",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    match solve_affine(a, b)? {
        AffineSolution::Unique(x) => Ok(x),
        _ => Err(LinalgError::SingularSystem),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineSolution<S> {
    Inconsistent,
    Unique(Vec<S>),
    /// One solution plus the dimension of the solution space.
    Underdetermined { particular: Vec<S>, nullity: usize },
}

/// Row echelon form of `[A | b]`, reduced.
struct Echelon<S> {
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

fn reduce<S: Scalar>(mut rows: Vec<Vec<S>>, cols: usize) -> Echelon<S> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for k in 0..rows[i].len() {
                let v = rows[i][k].clone() - f.clone() * rows[r][k].clone();
                rows[i][k] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rows, pivots }
}

/// Solves `A x = b` for any shape.
pub fn solve_affine<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<AffineSolution<S>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::ShapeMismatch(format!(
            "{} equations with {} right-hand sides",
            a.rows,
            b.len()
        )));
    }
    let n = a.cols;
    let rows: Vec<Vec<S>> = (0..a.rows)
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.push(b[r].clone());
            row
        })
        .collect();
    let ech = reduce(rows, n);
    let rank = ech.pivots.len();
    if ech.rows[rank..].iter().any(|row| !row[n].is_zero()) {
        return Ok(AffineSolution::Inconsistent);
    }
    let mut x = vec![S::zero(); n];
    for (i, &c) in ech.pivots.iter().enumerate() {
        x[c] = ech.rows[i][n].clone();
    }
    if rank == n {
        Ok(AffineSolution::Unique(x))
    } else {
        Ok(AffineSolution::Underdetermined {
            particular: x,
            nullity: n - rank,
        })
    }
}

/// Inverse of a square non-singular matrix.
pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::ShapeMismatch(format!(
            "inverse of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let rows = (0..n)
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.extend((0..n).map(|c| if c == r { S::one() } else { S::zero() }));
            row
        })
        .collect();
    let ech = reduce(rows, n);
    if ech.pivots.len() < n {
        return Err(LinalgError::SingularSystem);
    }
    Ok(Matrix::from_fn(n, n, |r, c| ech.rows[r][n + c].clone()))
}

pub fn rank<S: Scalar>(a: &Matrix<S>) -> usize {
    let rows = (0..a.rows).map(|r| a.row(r).to_vec()).collect();
    reduce(rows, a.cols).pivots.len()
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace<S: Scalar>(a: &Matrix<S>) -> Vec<Vec<S>> {
    let n = a.cols;
    let rows = (0..a.rows).map(|r| a.row(r).to_vec()).collect();
    let ech = reduce(rows, n);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !ech.pivots.contains(c)) {
        let mut v = vec![S::zero(); n];
        v[free] = S::one();
        for (i, &c) in ech.pivots.iter().enumerate() {
            v[c] = -ech.rows[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eps::EpsRational;
    use crate::scalar::{integer, rational};
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| integer(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// Cofactor expansion along the first row.
    fn cofactor<S: Scalar>(m: &Matrix<S>) -> S {
        let n = m.rows();
        if n == 0 {
            return S::one();
        }
        let mut acc = S::zero();
        for c in 0..n {
            let sub = Matrix::from_fn(n - 1, n - 1, |r, k| {
                m.get(r + 1, if k < c { k } else { k + 1 }).clone()
            });
            let term = m.get(0, c).clone() * cofactor(&sub);
            acc = if c % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    #[test]
    fn small_determinants() {
        assert_eq!(bareiss_determinant(&q(&[&[1, 2], &[3, 4]])), integer(-2));
        assert_eq!(bareiss_determinant(&q(&[&[0, 1], &[1, 0]])), integer(-1));
        assert_eq!(bareiss_determinant(&q(&[&[1, 2], &[2, 4]])), integer(0));
        assert_eq!(bareiss_determinant(&Matrix::<Rational>::zeros(0, 0)), integer(1));
        let m = Matrix::from_rows(vec![
            vec![rational(1, 2), rational(1, 3)],
            vec![rational(1, 4), rational(1, 5)],
        ])
        .unwrap();
        assert_eq!(bareiss_determinant(&m), rational(1, 60));
        assert_eq!(field_determinant(&m), rational(1, 60));
    }

    #[test]
    fn ordered_minor_flips_sign() {
        let m = q(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        let rows = IndexSet::new(vec![1, 2]).unwrap();
        let a = m.minor(&rows, &IndexSet::new(vec![1, 3]).unwrap()).unwrap();
        let b = m.minor(&rows, &IndexSet::new(vec![3, 1]).unwrap()).unwrap();
        assert_eq!(a, integer(-6));
        assert_eq!(b, integer(6));
        assert!(matches!(
            m.minor(&rows, &IndexSet::new(vec![4, 1]).unwrap()),
            Err(LinalgError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            m.minor(&rows, &IndexSet::singleton(1)),
            Err(LinalgError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn eps_determinant() {
        let e = EpsRational::epsilon();
        let one = EpsRational::one();
        let m = Matrix::from_rows(vec![vec![one.clone(), e.clone()], vec![e.clone(), one.clone()]])
            .unwrap();
        assert_eq!(m.determinant().unwrap(), one - e.clone() * e);
    }

    #[test]
    fn affine_cases() {
        let a = q(&[&[1, 1], &[2, 2]]);
        assert_eq!(
            solve_affine(&a, &[integer(1), integer(3)]).unwrap(),
            AffineSolution::Inconsistent
        );
        assert!(matches!(
            solve_affine(&a, &[integer(1), integer(2)]).unwrap(),
            AffineSolution::Underdetermined { nullity: 1, .. }
        ));
        assert_eq!(
            solve_square(&a, &[integer(1), integer(2)]),
            Err(LinalgError::SingularSystem)
        );
        let x = solve_square(&q(&[&[2, 1], &[1, 3]]), &[integer(3), integer(5)]).unwrap();
        assert_eq!(x, vec![rational(4, 5), rational(7, 5)]);
        let inv = inverse(&q(&[&[2, 1], &[1, 3]])).unwrap();
        assert_eq!(inv.mul_vec(&[integer(3), integer(5)]).unwrap(), x);
        assert_eq!(inverse(&a), Err(LinalgError::SingularSystem));
        let ns = nullspace(&q(&[&[1, 1, 1]]));
        assert_eq!(ns.len(), 2);
        assert_eq!(rank(&q(&[&[1, 2], &[2, 4], &[0, 1]])), 2);
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix<Rational>> {
        (0usize..=5).prop_flat_map(|n| {
            prop::collection::vec((-6i64..=6, 1i64..=4), n * n).prop_map(move |v| {
                Matrix::from_fn(n, n, |r, c| {
                    let (p, d) = v[r * n + c];
                    rational(p, d)
                })
            })
        })
    }

    proptest! {
        #[test]
        fn determinants_agree(m in arb_matrix()) {
            let expected = cofactor(&m);
            prop_assert_eq!(bareiss_determinant(&m), expected.clone());
            prop_assert_eq!(field_determinant(&m), expected);
        }

        #[test]
        fn solve_round_trip(m in arb_matrix(), seed in prop::collection::vec(-5i64..=5, 5)) {
            let n = m.rows();
            let x: Vec<Rational> = seed[..n].iter().map(|&v| integer(v)).collect();
            let b = m.mul_vec(&x).unwrap();
            match solve_affine(&m, &b).unwrap() {
                AffineSolution::Unique(y) => {
                    prop_assert!(!Zero::is_zero(&bareiss_determinant(&m)));
                    prop_assert_eq!(y, x);
                }
                AffineSolution::Underdetermined { particular, .. } => {
                    prop_assert!(Zero::is_zero(&bareiss_determinant(&m)));
                    prop_assert_eq!(m.mul_vec(&particular).unwrap(), b);
                }
                AffineSolution::Inconsistent => prop_assert!(false),
            }
        }
    }
}
