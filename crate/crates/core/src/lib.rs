//! Exact volumes of the unit cube clipped by hyperplanes.
//!
//! ```
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! use clipvol_core::cube::{ClippedCubeSpec, Hyperplane};
//! use clipvol_core::scalar::rational;
//! use clipvol_core::volume::{compute_volume, Formula};
//!
//! let h = |a: &[i64], r| Hyperplane::new(a.iter().map(|&x| rational(x, 1)).collect(), r);
//! let spec = ClippedCubeSpec::new(3, vec![h(&[-1, 1, 0], rational(1, 2)), h(&[-1, -2, -1], rational(3, 1))])?;
//! let result = compute_volume(&spec, Formula::TwoPlane)?;
//! assert_eq!(result.volume, rational(19, 24));
//! # Ok(())
//! # }
//! ```

pub mod cube;
pub mod derive;
pub mod eps;
pub mod identity;
pub mod index;
pub mod linalg;
pub mod oracle;
pub mod polytope;
pub mod random;
pub mod report;
pub mod scalar;
pub mod volume;
