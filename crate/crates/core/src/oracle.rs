//! Independent volume oracles: exact facet-pyramid recursion and seeded
//! Monte Carlo.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cube::ClippedCubeSpec;
use crate::linalg::{self, Matrix};
use crate::polytope::HalfSpaceSystem;
use crate::scalar::{to_f64, Rational, Scalar};

pub const DEFAULT_FACET_CAP: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("the polytope is unbounded")]
    Unbounded,
    #[error("dimension {n} exceeds the facet oracle cap {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("at least one sample is required")]
    NoSamples,
}

/// Facet-pyramid recursion on the whole clipped cube, auxiliary plane included.
pub fn volume_recursive_facets(spec: &ClippedCubeSpec<Rational>) -> Result<Rational, OracleError> {
    volume_recursive_facets_system(&spec.to_halfspaces(), DEFAULT_FACET_CAP)
}

/// `vol(P) = (1/d) sum_F h_F vol(F)` with each facet charted by dropping the
/// coordinate of largest normal entry; the chart Jacobian `||c|| / |c_k|`
/// cancels the norm in the height, so everything stays rational.
pub fn volume_recursive_facets_system(
    system: &HalfSpaceSystem<Rational>,
    cap: usize,
) -> Result<Rational, OracleError> {
    let n = system.n();
    if n > cap {
        return Err(OracleError::DimensionTooLarge { n, cap });
    }
    if !system.is_bounded() {
        return Err(OracleError::Unbounded);
    }
    let vertices = system.vertices();
    if vertices.is_empty() {
        return Ok(Rational::zero());
    }
    let mut rec = Recursion {
        points: vertices.iter().map(|v| v.coords.clone()).collect(),
        tight: vertices
            .iter()
            .map(|v| v.tight.iter().copied().collect())
            .collect(),
        planes: system.m(),
        memo: HashMap::new(),
    };
    let all: Vec<usize> = (0..vertices.len()).collect();
    Ok(rec.volume(&all, &[]))
}

struct Recursion {
    points: Vec<Vec<Rational>>,
    tight: Vec<BTreeSet<usize>>,
    planes: usize,
    memo: HashMap<(Vec<usize>, Vec<usize>), Rational>,
}

impl Recursion {
    /// Coordinates of vertex `i` with the `dropped` coordinates removed in order.
    fn chart(&self, i: usize, dropped: &[usize]) -> Vec<Rational> {
        let mut p = self.points[i].clone();
        for &k in dropped {
            p.remove(k);
        }
        p
    }

    fn affine_rank(pts: &[Vec<Rational>]) -> usize {
        let d = pts[0].len();
        let m = Matrix::from_fn(pts.len() - 1, d, |r, c| {
            pts[r + 1][c].clone() - pts[0][c].clone()
        });
        if pts.len() == 1 {
            0
        } else {
            linalg::rank(&m)
        }
    }

    fn volume(&mut self, set: &[usize], dropped: &[usize]) -> Rational {
        let key = (set.to_vec(), dropped.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let pts: Vec<Vec<Rational>> = set.iter().map(|&i| self.chart(i, dropped)).collect();
        let d = pts[0].len();
        let result = if Self::affine_rank(&pts) < d {
            Rational::zero()
        } else if d == 1 {
            let lo = pts.iter().map(|p| &p[0]).min().unwrap();
            let hi = pts.iter().map(|p| &p[0]).max().unwrap();
            hi.clone() - lo.clone()
        } else {
            self.pyramids(set, &pts, dropped)
        };
        self.memo.insert(key, result.clone());
        result
    }

    fn pyramids(&mut self, set: &[usize], pts: &[Vec<Rational>], dropped: &[usize]) -> Rational {
        let d = pts[0].len();
        let count = Rational::from_integer((pts.len() as i64).into());
        let centroid: Vec<Rational> = (0..d)
            .map(|c| pts.iter().fold(Rational::zero(), |acc, p| acc + p[c].clone()) / count.clone())
            .collect();
        let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for h in 1..=self.planes {
            let f: Vec<usize> = (0..set.len()).filter(|&k| self.tight[set[k]].contains(&h)).collect();
            if f.len() < d || f.len() == set.len() {
                continue;
            }
            let fp: Vec<Vec<Rational>> = f.iter().map(|&k| pts[k].clone()).collect();
            if Self::affine_rank(&fp) == d - 1 {
                facets.insert(f);
            }
        }
        let mut total = Rational::zero();
        for f in facets {
            // Rows [u, 1]; the one-dimensional nullspace is (c, s) with c.u + s = 0.
            let m = Matrix::from_fn(f.len(), d + 1, |r, c| {
                if c < d {
                    pts[f[r]][c].clone()
                } else {
                    Rational::one()
                }
            });
            let ns = linalg::nullspace(&m);
            debug_assert_eq!(ns.len(), 1);
            let (c, s) = ns[0].split_at(d);
            let mut height = linalg::dot(c, &centroid) + s[0].clone();
            if height.is_negative() {
                height = -height;
            }
            let k = (0..d).max_by(|&i, &j| c[i].abs().cmp(&c[j].abs()).then(j.cmp(&i))).unwrap();
            let mut sub_dropped = dropped.to_vec();
            sub_dropped.push(k);
            let members: Vec<usize> = f.iter().map(|&i| set[i]).collect();
            let area = self.volume(&members, &sub_dropped);
            total += height / c[k].abs() * area;
        }
        total / Rational::from_integer((d as i64).into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Samples per independently keyed stream.
const CHUNK: u64 = 1 << 15;

/// Uniform samples from `[0,1]^n` drawn with ChaCha8 keyed by `seed`, one
/// stream per block of 32768 samples, so the estimate is independent of the
/// thread count.
pub fn volume_monte_carlo(
    system: &HalfSpaceSystem<Rational>,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, OracleError> {
    if samples == 0 {
        return Err(OracleError::NoSamples);
    }
    let n = system.n();
    let planes: Vec<(Vec<f64>, f64)> = system
        .planes()
        .iter()
        .map(|h| (h.a.iter().map(to_f64).collect(), to_f64(&h.r)))
        .collect();
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut x = vec![0.0f64; n];
            let mut hits = 0u64;
            for _ in 0..len {
                for xi in x.iter_mut() {
                    *xi = rng.gen::<f64>();
                }
                if planes
                    .iter()
                    .all(|(a, r)| a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum::<f64>() + r >= 0.0)
                {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        mean: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// Monte Carlo on a clipped cube; the cube constraints hold for every sample.
pub fn volume_monte_carlo_cube(
    spec: &ClippedCubeSpec<Rational>,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, OracleError> {
    let system = HalfSpaceSystem::new(spec.n(), spec.hyperplanes().to_vec())
        .expect("a valid clipped cube has valid hyperplanes");
    volume_monte_carlo(&system, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::tests::{arb_spec, two_plane_sample, three_plane_sample, plane};
    use crate::cube::Hyperplane;
    use crate::scalar::{integer, rational, to_f64};
    use crate::volume::{volume_general, Variant};
    use proptest::prelude::*;

    fn simplex(n: usize) -> HalfSpaceSystem<Rational> {
        let mut planes: Vec<Hyperplane<Rational>> = (0..n)
            .map(|i| Hyperplane::new((0..n).map(|k| integer((k == i) as i64)).collect(), integer(0)))
            .collect();
        planes.push(Hyperplane::new(vec![integer(-1); n], integer(1)));
        HalfSpaceSystem::new(n, planes).unwrap()
    }

    #[test]
    fn known_volumes() {
        assert_eq!(volume_recursive_facets_system(&simplex(3), 7).unwrap(), rational(1, 6));
        assert_eq!(volume_recursive_facets_system(&simplex(5), 7).unwrap(), rational(1, 120));
        let cube = ClippedCubeSpec::new(4, vec![plane(&[1, 1, 1, 1], integer(1))]).unwrap();
        assert_eq!(volume_recursive_facets(&cube).unwrap(), integer(1));
        assert_eq!(volume_recursive_facets(&two_plane_sample()).unwrap(), rational(19, 24));
        assert_eq!(volume_recursive_facets(&three_plane_sample()).unwrap(), rational(35, 96));
        let empty = ClippedCubeSpec::new(2, vec![plane(&[1, 1], integer(-5))]).unwrap();
        assert_eq!(volume_recursive_facets(&empty).unwrap(), integer(0));
    }

    #[test]
    fn errors() {
        let planes = vec![Hyperplane::new(vec![integer(1), integer(0)], integer(0))];
        let half = HalfSpaceSystem::new(2, planes).unwrap();
        assert_eq!(volume_recursive_facets_system(&half, 7), Err(OracleError::Unbounded));
        let big = ClippedCubeSpec::new(8, vec![plane(&[1; 8], integer(1))]).unwrap();
        assert_eq!(
            volume_recursive_facets(&big),
            Err(OracleError::DimensionTooLarge { n: 8, cap: 7 })
        );
        assert_eq!(volume_monte_carlo(&simplex(2), 0, 1), Err(OracleError::NoSamples));
    }

    #[test]
    fn monte_carlo() {
        let e = volume_monte_carlo_cube(&two_plane_sample(), 200_000, 42).unwrap();
        let again = volume_monte_carlo_cube(&two_plane_sample(), 200_000, 42).unwrap();
        assert_eq!(e, again);
        assert!((e.mean - to_f64(&rational(19, 24))).abs() < 4.0 * e.stderr);
        let full = ClippedCubeSpec::new(3, vec![plane(&[1, 1, 1], integer(1))]).unwrap();
        let f = volume_monte_carlo_cube(&full, 1000, 3).unwrap();
        assert_eq!((f.mean, f.stderr), (1.0, 0.0));
        let none = ClippedCubeSpec::new(3, vec![plane(&[1, 1, 1], integer(-4))]).unwrap();
        assert_eq!(volume_monte_carlo_cube(&none, 1000, 3).unwrap().mean, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn facets_match_general(spec in arb_spec(4, 3)) {
            let Ok(g) = volume_general(&spec, Variant::Cup) else { return Ok(()) };
            prop_assert_eq!(volume_recursive_facets(&spec).unwrap(), g.volume);
        }

        #[test]
        fn facets_ignore_plane_order(spec in arb_spec(3, 3), rot in 0usize..3) {
            let sys = spec.to_halfspaces();
            let m = sys.m();
            let order: Vec<usize> = (0..m).map(|i| (i + rot) % m).collect();
            prop_assert_eq!(
                volume_recursive_facets_system(&sys, 7).unwrap(),
                volume_recursive_facets_system(&sys.permuted(&order), 7).unwrap()
            );
        }
    }
}
