//! Seeded random clipped cubes satisfying the good clipping conditions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::cube::{check_good_clipping, ClippedCubeSpec, Hyperplane};
use crate::linalg::dot;
use crate::scalar::{rational, Rational, Scalar};
use crate::volume::{volume_general, Variant};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero `p/q` in `[-3, 3]` with `1 <= q <= 4`.
pub fn coefficient(rng: &mut impl Rng) -> Rational {
    loop {
        let q = rng.gen_range(1..=4i64);
        let p = rng.gen_range(-3 * q..=3 * q);
        if p != 0 {
            return rational(p, q);
        }
    }
}

/// A point of the open cube with coordinates `p/8`, `0 < p < 8`.
pub fn interior_point(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rational(rng.gen_range(1..8), 8)).collect()
}

/// A hyperplane with random coefficients through a random interior point,
/// so both sides meet the cube.
pub fn hyperplane(rng: &mut impl Rng, n: usize) -> Hyperplane<Rational> {
    let a: Vec<Rational> = (0..n).map(|_| coefficient(rng)).collect();
    let p = interior_point(rng, n);
    let r = -dot(&a, &p);
    Hyperplane::new(a, r)
}

pub fn spec(rng: &mut impl Rng, n: usize, m: usize) -> ClippedCubeSpec<Rational> {
    ClippedCubeSpec::new(n, (0..m).map(|_| hyperplane(rng, n)).collect())
        .expect("random hyperplanes are valid")
}

/// `count` instances with `2 <= n <= max_n`, `1 <= m <= max_m`, good clipping
/// and volume in `[1/100, 99/100]`. Deterministic in `seed`.
pub fn good_instances(seed: u64, count: usize, max_n: usize, max_m: usize) -> Vec<ClippedCubeSpec<Rational>> {
    let mut rng = rng(seed);
    let lo = rational(1, 100);
    let hi = rational(99, 100);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=max_n);
        let m = rng.gen_range(1..=max_m);
        let s = spec(&mut rng, n, m);
        if !check_good_clipping(&s).holds() {
            continue;
        }
        let Ok(v) = volume_general(&s, Variant::Cup) else { continue };
        if v.volume >= lo && v.volume <= hi && !v.volume.is_zero() {
            out.push(s);
        }
    }
    out
}
