//! Identities from volumes: cut a clipped cube `P` of known volume by a
//! generic auxiliary plane and compare `vol(P ∩ H+) + vol(P ∩ H-)` with
//! `vol(P)`. Also holds the ε-perturbed bodies behind each identity.

use serde::Serialize;

use crate::cube::{ClippedCubeSpec, CubeError, Hyperplane};
use crate::eps::EpsRational;
use crate::oracle::{volume_recursive_facets_system, OracleError, DEFAULT_FACET_CAP};
use crate::polytope::HalfSpaceSystem;
use crate::random::{coefficient, interior_point, rng};
use crate::linalg::dot;
use crate::scalar::{binomial, factorial, rational, Rational, Scalar, ScalarError};
use crate::volume::{volume_both_sides, Variant, VolumeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeriveError {
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("no generic auxiliary plane found in {0} attempts")]
    NoGenericAux(usize),
}

/// A clipped cube before the auxiliary plane is added, with ε-shifted
/// offsets where the unperturbed planes would violate good clipping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Body {
    pub name: String,
    pub n: usize,
    pub planes: Vec<Hyperplane<EpsRational>>,
    /// Closed-form volume at `ε = 0`.
    pub volume: Rational,
}

fn c(v: Rational) -> EpsRational {
    EpsRational::constant(v)
}

fn ci(v: i64) -> EpsRational {
    EpsRational::from_i64(v)
}

fn eps() -> EpsRational {
    EpsRational::epsilon()
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n as u32))
}

/// `-sum x + l - ε >= 0`.
pub fn slab(n: usize, l: usize) -> Body {
    let volume = (0..l).fold(Rational::zero(), |acc, i| {
        let term = Rational::from_integer(binomial(n as u32, i as u32))
            * Scalar::pow(&rational((l - i) as i64, 1), n as u32);
        if i % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    }) / fact(n);
    Body {
        name: format!("slab n={n} l={l}"),
        n,
        planes: vec![Hyperplane::new(vec![ci(-1); n], ci(l as i64) - eps())],
        volume,
    }
}

/// The corner simplex `sum x <= 1`.
pub fn simplex(n: usize) -> Body {
    Body {
        name: format!("simplex n={n}"),
        ..slab(n, 1)
    }
}

/// `n` planes `x_j - x_i` summed with `+1 - d`, cutting `n` corner simplices.
pub fn truncated_cube(n: usize, d: Rational) -> Body {
    let planes = (0..n)
        .map(|i| {
            let a = (0..n).map(|j| ci(if i == j { -1 } else { 1 })).collect();
            Hyperplane::new(a, c(Rational::one() - d.clone()))
        })
        .collect();
    let volume = Rational::one() - rational(n as i64, 1) * Scalar::pow(&d, n as u32) / fact(n);
    Body {
        name: format!("truncated cube n={n} d={d}"),
        n,
        planes,
        volume,
    }
}

/// `n`-simplex times `[0,1]^m` in dimension `n + m`.
pub fn hyperprism(n: usize, m: usize) -> Body {
    let a = (0..n + m).map(|i| ci(if i < n { -1 } else { 0 })).collect();
    Body {
        name: format!("hyperprism n={n} m={m}"),
        n: n + m,
        planes: vec![Hyperplane::new(a, ci(1) - eps())],
        volume: fact(n).recip(),
    }
}

/// `sum x <= 1` together with `x_1 >= x_2 + ... + x_n`.
pub fn isosceles(n: usize) -> Body {
    let h2 = (0..n).map(|i| ci(if i == 0 { 1 } else { -1 })).collect();
    Body {
        name: format!("isosceles simplex n={n}"),
        n,
        planes: vec![
            Hyperplane::new(vec![ci(-1); n], ci(1) - eps()),
            Hyperplane::new(h2, -eps()),
        ],
        volume: (fact(n) * Scalar::pow(&rational(2, 1), n as u32 - 1)).recip(),
    }
}

/// `-sum_{i<=n} x_i / 2 - sum_{j<=m} x_{n+j} + 1 - ε >= 0` in dimension `n + m`.
pub fn trapezoid(n: usize, m: usize) -> Body {
    let a = (0..n + m)
        .map(|i| if i < n { c(rational(-1, 2)) } else { ci(-1) })
        .collect();
    let volume = (Scalar::pow(&rational(2, 1), n as u32)
        - rational(n as i64, 1) / Scalar::pow(&rational(2, 1), m as u32))
        / fact(n + m);
    Body {
        name: format!("trapezoid n={n} m={m}"),
        n: n + m,
        planes: vec![Hyperplane::new(a, ci(1) - eps())],
        volume,
    }
}

/// The bare cube, volume 1.
pub fn full_cube(n: usize) -> Body {
    Body {
        name: format!("cube n={n}"),
        n,
        planes: vec![],
        volume: Rational::one(),
    }
}

impl Body {
    /// `P` at `ε = 0` as a half-space system (cube faces first).
    pub fn at_zero(&self) -> Result<HalfSpaceSystem<Rational>, DeriveError> {
        let cube = ClippedCubeSpec::new(
            self.n,
            vec![Hyperplane::new(vec![Rational::one(); self.n], Rational::one())],
        )?
        .to_halfspaces();
        let mut planes: Vec<Hyperplane<Rational>> = cube.planes()[..2 * self.n].to_vec();
        for h in &self.planes {
            planes.push(Hyperplane::new(
                h.a.iter().map(|x| x.epsilon_limit()).collect::<Result<_, _>>()?,
                h.r.epsilon_limit()?,
            ));
        }
        Ok(HalfSpaceSystem::new(self.n, planes)?)
    }

    /// Exact facet-oracle volume of `P` at `ε = 0`.
    pub fn oracle_volume(&self) -> Result<Rational, DeriveError> {
        Ok(volume_recursive_facets_system(&self.at_zero()?, DEFAULT_FACET_CAP)?)
    }

    pub fn with_aux(&self, aux: &Hyperplane<Rational>) -> Result<ClippedCubeSpec<EpsRational>, DeriveError> {
        let mut planes = self.planes.clone();
        planes.push(aux.map(|x| c(x.clone())));
        Ok(ClippedCubeSpec::new(self.n, planes)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedIdentity {
    pub body: String,
    pub aux: Vec<String>,
    pub plus: String,
    pub minus: String,
    /// `vol(P ∩ H+) + vol(P ∩ H-)`.
    pub lhs: String,
    /// Known `vol(P)`.
    pub rhs: String,
    pub equal: bool,
}

/// Both sides of the auxiliary plane through the general formula over
/// `Q(ε)`, each limit taken at `ε = 0`.
pub fn split_volumes(body: &Body, aux: &Hyperplane<Rational>) -> Result<(Rational, Rational), DeriveError> {
    let spec = body.with_aux(aux)?;
    let (plus, minus) = volume_both_sides(&spec, Variant::Cup)?;
    Ok((plus.epsilon_limit()?, minus.epsilon_limit()?))
}

pub fn derive_identity_from_volume(
    body: &Body,
    aux: &Hyperplane<Rational>,
    known: &Rational,
) -> Result<DerivedIdentity, DeriveError> {
    let (plus, minus) = split_volumes(body, aux)?;
    let lhs = plus.clone() + minus.clone();
    Ok(DerivedIdentity {
        body: body.name.clone(),
        aux: aux
            .a
            .iter()
            .chain(std::iter::once(&aux.r))
            .map(|x| x.to_string())
            .collect(),
        plus: plus.to_string(),
        minus: minus.to_string(),
        equal: lhs == *known,
        lhs: lhs.to_string(),
        rhs: known.to_string(),
    })
}

/// Number of random auxiliary planes tried before giving up.
pub const AUX_ATTEMPTS: usize = 64;

/// First seeded random plane through the cube for which both sides satisfy
/// good clipping, with the split volumes.
pub fn generic_split(
    body: &Body,
    seed: u64,
) -> Result<(Hyperplane<Rational>, Rational, Rational), DeriveError> {
    let mut r = rng(seed);
    for _ in 0..AUX_ATTEMPTS {
        let a: Vec<Rational> = (0..body.n).map(|_| coefficient(&mut r)).collect();
        let p = interior_point(&mut r, body.n);
        let aux = Hyperplane::new(a.clone(), -dot(&a, &p));
        match split_volumes(body, &aux) {
            Ok((plus, minus)) => return Ok((aux, plus, minus)),
            Err(DeriveError::Volume(VolumeError::GoodClippingViolated(_))) => continue,
            Err(DeriveError::Volume(VolumeError::FormulaPreconditionViolated(_))) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(DeriveError::NoGenericAux(AUX_ATTEMPTS))
}

/// `vol(P)` through a generic split: the perturbed general formula's limit.
pub fn perturbed_volume(body: &Body, seed: u64) -> Result<Rational, DeriveError> {
    let (_, plus, minus) = generic_split(body, seed)?;
    Ok(plus + minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::integer;

    #[test]
    fn closed_volumes_small() {
        assert_eq!(simplex(3).volume, rational(1, 6));
        assert_eq!(slab(3, 2).volume, rational(5, 6));
        assert_eq!(trapezoid(1, 1).volume, rational(3, 4));
        assert_eq!(truncated_cube(2, rational(1, 2)).volume, rational(3, 4));
        assert_eq!(isosceles(3).volume, rational(1, 24));
    }

    #[test]
    fn perturbed_matches_closed_and_oracle() {
        for body in [
            simplex(3),
            slab(3, 2),
            isosceles(3),
            truncated_cube(3, rational(1, 3)),
            hyperprism(2, 1),
            trapezoid(1, 1),
            trapezoid(2, 1),
            full_cube(3),
        ] {
            assert_eq!(perturbed_volume(&body, 1).unwrap(), body.volume, "{}", body.name);
            assert_eq!(body.oracle_volume().unwrap(), body.volume, "{}", body.name);
        }
    }

    #[test]
    fn explicit_split() {
        let aux = Hyperplane::new(vec![integer(2), integer(-3)], rational(1, 5));
        let d = derive_identity_from_volume(&full_cube(2), &aux, &integer(1)).unwrap();
        assert!(d.equal);
        assert_eq!(d.lhs, "1");
    }
}
