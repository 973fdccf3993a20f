//! Ordered index sets and the permutation signs built from them.
//!
//! Indices are 1-based. Order matters: the sign of a minor depends on the
//! order in which its rows and columns are listed, so `{2,1}` and `{1,2}` are
//! different sets here.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("index sets {left} and {right} do not have matching elements")]
    MismatchedSets { left: IndexSet, right: IndexSet },
}

/// Ordered sequence of distinct positive integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = IndexError;
    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl IndexSet {
    pub fn new(elements: Vec<usize>) -> Result<Self, IndexError> {
        if elements.contains(&0) {
            return Err(IndexError::InvalidIndexSet(
                "indices are 1-based; 0 is not allowed".into(),
            ));
        }
        let mut sorted = elements.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(IndexError::InvalidIndexSet(format!(
                "duplicate element in {elements:?}"
            )));
        }
        Ok(IndexSet(elements))
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i > 0, "indices are 1-based");
        IndexSet(vec![i])
    }

    /// `[n] = {1, ..., n}`.
    pub fn range(n: usize) -> Self {
        IndexSet((1..=n).collect())
    }

    /// Builds a well-ordered set from arbitrary distinct elements.
    pub fn sorted(mut elements: Vec<usize>) -> Result<Self, IndexError> {
        elements.sort_unstable();
        IndexSet::new(elements)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Cardinality `|I|`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Element sum `||I||`.
    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn is_well_ordered(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    /// Position (0-based) of `i` in the sequence.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.0.iter().position(|&x| x == i)
    }

    /// Same order with `i` removed.
    pub fn without(&self, i: usize) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|&x| x != i).collect())
    }

    /// Same order with every element of `other` removed.
    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(
            self.0
                .iter()
                .copied()
                .filter(|&x| !other.contains(x))
                .collect(),
        )
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    fn same_elements(&self, other: &IndexSet) -> bool {
        let mut a = self.0.clone();
        let mut b = other.0.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// Ordered union `I ∪ J` of two disjoint well-ordered sets.
    pub fn ordered_union(&self, other: &IndexSet) -> Result<IndexSet, IndexError> {
        if !self.is_well_ordered() || !other.is_well_ordered() {
            return Err(IndexError::InvalidIndexSet(format!(
                "ordered union needs well-ordered operands, got {self} and {other}"
            )));
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    return Err(IndexError::InvalidIndexSet(format!(
                        "{self} and {other} share {a}"
                    )))
                }
                (Some(&a), Some(&b)) if a < b => {
                    out.push(a);
                    i += 1;
                }
                (Some(_), Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(IndexSet(out))
    }

    /// Joining union `I ∨ J`: concatenation.
    pub fn joining_union(&self, other: &IndexSet) -> Result<IndexSet, IndexError> {
        if let Some(shared) = self.iter().find(|&x| other.contains(x)) {
            return Err(IndexError::InvalidIndexSet(format!(
                "{self} and {other} share {shared}"
            )));
        }
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Ok(IndexSet(out))
    }

    /// Convenience for `self ∨ {i}`.
    pub fn push(&self, i: usize) -> Result<IndexSet, IndexError> {
        self.joining_union(&IndexSet::singleton(i))
    }

    /// Convenience for `self ∪ {i}`.
    pub fn insert_ordered(&self, i: usize) -> Result<IndexSet, IndexError> {
        self.ordered_union(&IndexSet::singleton(i))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// `(-1)^k` as an `i32`.
pub fn sign_of_exponent(k: i64) -> i32 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `σ(I, J)`: sign of the permutation carrying the order of `I` to that of `J`.
pub fn permutation_parity(from: &IndexSet, to: &IndexSet) -> Result<i32, IndexError> {
    if !from.same_elements(to) {
        return Err(IndexError::MismatchedSets {
            left: from.clone(),
            right: to.clone(),
        });
    }
    // Rewrite J as positions in I, then count inversions.
    let positions: Vec<usize> = to.iter().map(|x| from.position(x).unwrap()).collect();
    Ok(sign_of_exponent(count_inversions(positions) as i64))
}

/// `Δ(I, J) = σ(I, (I \ J) ∨ J)` for `J ⊆ I`.
pub fn separating_parity(outer: &IndexSet, part: &IndexSet) -> Result<i32, IndexError> {
    if !part.is_subset_of(outer) {
        return Err(IndexError::MismatchedSets {
            left: outer.clone(),
            right: part.clone(),
        });
    }
    let rearranged = outer.difference(part).joining_union(part)?;
    permutation_parity(outer, &rearranged)
}

/// Closed form of `Δ([n], J)` for well-ordered `J ⊆ [n]`.
pub fn separating_parity_closed_form(n: usize, part: &IndexSet) -> i32 {
    let k = part.len() as i64;
    sign_of_exponent(n as i64 * k - part.sum() as i64 - k * (k - 1) / 2)
}

/// Merge-sort inversion count.
fn count_inversions(mut v: Vec<usize>) -> u64 {
    fn sort(v: &mut [usize], buf: &mut Vec<usize>) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut inv = sort(&mut v[..mid], buf) + sort(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[i] <= v[j] {
                buf.push(v[i]);
                i += 1;
            } else {
                buf.push(v[j]);
                inv += (mid - i) as u64;
                j += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..n]);
        v.copy_from_slice(buf);
        inv
    }
    let mut buf = Vec::with_capacity(v.len());
    sort(&mut v, &mut buf)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.to_vec()).unwrap()
    }

    /// Sign by explicit transpositions: bubble `to` into the order of `from`.
    pub(crate) fn brute_parity(from: &IndexSet, to: &IndexSet) -> i32 {
        let mut cur: Vec<usize> = to.iter().collect();
        let target: Vec<usize> = from.iter().collect();
        let mut swaps = 0;
        for (k, &want) in target.iter().enumerate() {
            let mut p = cur.iter().position(|&x| x == want).unwrap();
            while p > k {
                cur.swap(p - 1, p);
                p -= 1;
                swaps += 1;
            }
        }
        if swaps % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn ordered_union_examples() {
        assert_eq!(set(&[1, 3]).ordered_union(&set(&[2])).unwrap(), set(&[1, 2, 3]));
        assert_eq!(IndexSet::empty().ordered_union(&set(&[5])).unwrap(), set(&[5]));
        assert_eq!(
            set(&[2, 4]).ordered_union(&set(&[1, 7])).unwrap(),
            set(&[1, 2, 4, 7])
        );
        assert!(set(&[1, 2]).ordered_union(&set(&[2])).is_err());
        assert!(set(&[2, 1]).ordered_union(&set(&[3])).is_err());
    }

    #[test]
    fn joining_union_examples() {
        assert_eq!(set(&[1, 3]).joining_union(&set(&[2])).unwrap(), set(&[1, 3, 2]));
        assert_eq!(IndexSet::empty().joining_union(&set(&[2, 1])).unwrap(), set(&[2, 1]));
        let ab = set(&[2]).joining_union(&set(&[1])).unwrap();
        let ba = set(&[1]).joining_union(&set(&[2])).unwrap();
        assert_eq!(ab, set(&[2, 1]));
        assert_ne!(ab, ba);
        assert!(set(&[1, 3]).joining_union(&set(&[3])).is_err());
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(IndexSet::new(vec![1, 1]).is_err());
        assert!(IndexSet::new(vec![0, 2]).is_err());
    }

    #[test]
    fn parity_examples() {
        assert_eq!(permutation_parity(&set(&[1, 2]), &set(&[2, 1])).unwrap(), -1);
        assert_eq!(permutation_parity(&set(&[4, 2, 7]), &set(&[4, 2, 7])).unwrap(), 1);
        assert_eq!(permutation_parity(&set(&[1, 2, 3]), &set(&[3, 1, 2])).unwrap(), 1);
        assert_eq!(brute_parity(&set(&[1, 2, 3]), &set(&[3, 1, 2])), 1);
        assert!(matches!(
            permutation_parity(&set(&[1, 2]), &set(&[1, 3])),
            Err(IndexError::MismatchedSets { .. })
        ));
    }

    #[test]
    fn separating_parity_examples() {
        assert_eq!(separating_parity(&IndexSet::range(3), &set(&[2])).unwrap(), -1);
        assert_eq!(separating_parity(&IndexSet::range(5), &IndexSet::range(5)).unwrap(), 1);
        assert_eq!(separating_parity_closed_form(5, &IndexSet::range(5)), 1);
        assert_eq!(separating_parity(&IndexSet::range(4), &set(&[1, 3])).unwrap(), -1);
        assert!(separating_parity(&IndexSet::range(3), &set(&[4])).is_err());
        for n in 1..=6 {
            for t in 1..=n {
                let expected = if (n - t) % 2 == 0 { 1 } else { -1 };
                assert_eq!(
                    separating_parity(&IndexSet::range(n), &IndexSet::singleton(t)).unwrap(),
                    expected
                );
            }
        }
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
        (1..=max).prop_flat_map(|n| {
            let base: Vec<usize> = (1..=n).map(|x| x * 3).collect();
            (
                Just(base.clone()).prop_shuffle(),
                Just(base.clone()).prop_shuffle(),
                Just(base).prop_shuffle(),
            )
        })
    }

    proptest! {
        #[test]
        fn inversion_count_matches_transpositions((a, b, _c) in arb_perm(9)) {
            let (a, b) = (IndexSet::new(a).unwrap(), IndexSet::new(b).unwrap());
            prop_assert_eq!(permutation_parity(&a, &b).unwrap(), brute_parity(&a, &b));
        }

        #[test]
        fn parity_composes((a, b, c) in arb_perm(9)) {
            let (a, b, c) = (
                IndexSet::new(a).unwrap(),
                IndexSet::new(b).unwrap(),
                IndexSet::new(c).unwrap(),
            );
            let ab = permutation_parity(&a, &b).unwrap();
            let bc = permutation_parity(&b, &c).unwrap();
            prop_assert_eq!(ab * bc, permutation_parity(&a, &c).unwrap());
        }

        #[test]
        fn appending_a_larger_element(mask in 0u32..256) {
            let elems: Vec<usize> = (1..=8).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let i_set = IndexSet::new(elems).unwrap();
            let m = IndexSet::singleton(9);
            let cup_left = m.ordered_union(&i_set).unwrap();
            let cup_right = i_set.ordered_union(&m).unwrap();
            prop_assert_eq!(permutation_parity(&cup_left, &cup_right).unwrap(), 1);
            let vee_left = m.joining_union(&i_set).unwrap();
            let vee_right = i_set.joining_union(&m).unwrap();
            prop_assert_eq!(
                permutation_parity(&vee_left, &vee_right).unwrap(),
                sign_of_exponent(i_set.len() as i64)
            );
        }
    }
}
