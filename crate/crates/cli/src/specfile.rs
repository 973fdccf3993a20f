//! JSON spec files: `{"n": 3, "hyperplanes": [{"a": ["-1", "1", "0"], "r": "1/2"}, ...]}`.
//! The last hyperplane is the auxiliary plane. Entries may be linear
//! expressions in `e` such as `"1 - e"`, which switch the spec to Q(e).

use std::io::Read;
use std::path::Path;

use anyhow::Context;
use clipvol_core::cube::{ClippedCubeSpec, Hyperplane};
use clipvol_core::eps::{mentions_epsilon, EpsRational};
use clipvol_core::scalar::{parse_rational, Rational, Scalar};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneEntry {
    pub a: Vec<String>,
    pub r: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub n: usize,
    pub hyperplanes: Vec<PlaneEntry>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub eps: bool,
}

pub enum Parsed {
    Exact(ClippedCubeSpec<Rational>),
    Eps(ClippedCubeSpec<EpsRational>),
}

impl Parsed {
    /// The body at `e = 0`; exact specs are returned unchanged.
    pub fn at_zero(&self) -> Result<ClippedCubeSpec<Rational>, Failure> {
        match self {
            Parsed::Exact(s) => Ok(s.clone()),
            Parsed::Eps(s) => s.at_zero().map_err(|e| Failure::parse(e.to_string())),
        }
    }
}

/// Reads a file, or stdin for `-`.
pub fn read_source(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading spec from stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::parse(format!("spec file: {e}")))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = read_source(path)?;
        Ok(Self::from_json(&text)?)
    }

    pub fn uses_eps(&self) -> bool {
        self.eps
            || self
                .hyperplanes
                .iter()
                .any(|h| h.a.iter().chain(std::iter::once(&h.r)).any(|x| mentions_epsilon(x)))
    }

    pub fn parse(&self) -> Result<Parsed, Failure> {
        if self.uses_eps() {
            self.build(|s| s.parse::<EpsRational>()).map(Parsed::Eps)
        } else {
            self.build(parse_rational).map(Parsed::Exact)
        }
    }

    fn build<S: Scalar, E: std::fmt::Display>(
        &self,
        scalar: impl Fn(&str) -> Result<S, E>,
    ) -> Result<ClippedCubeSpec<S>, Failure> {
        let conv = |s: &String| scalar(s).map_err(|e| Failure::parse(e.to_string()));
        let planes = self
            .hyperplanes
            .iter()
            .map(|h| {
                Ok(Hyperplane::new(
                    h.a.iter().map(conv).collect::<Result<_, Failure>>()?,
                    conv(&h.r)?,
                ))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        ClippedCubeSpec::new(self.n, planes).map_err(|e| Failure::parse(format!("spec: {e}")))
    }

    pub fn from_spec<S: Scalar>(spec: &ClippedCubeSpec<S>) -> Self {
        SpecFile {
            n: spec.n(),
            hyperplanes: spec
                .hyperplanes()
                .iter()
                .map(|h| PlaneEntry {
                    a: h.a.iter().map(|x| x.to_string()).collect(),
                    r: h.r.to_string(),
                })
                .collect(),
            eps: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX53: &str = r#"{"n":3,"hyperplanes":[{"a":["-1","1","0"],"r":"1/2"},{"a":["-1","-2","-1"],"r":"3"}]}"#;

    #[test]
    fn round_trip() {
        let f = SpecFile::from_json(EX53).unwrap();
        let Parsed::Exact(spec) = f.parse().unwrap() else { panic!("not exact") };
        assert_eq!(SpecFile::from_spec(&spec), f);
    }

    #[test]
    fn eps_detection() {
        let f = SpecFile::from_json(r#"{"n":2,"hyperplanes":[{"a":["-1","-1"],"r":"1 - e"},{"a":["1","2"],"r":"-1"}]}"#)
            .unwrap();
        assert!(matches!(f.parse().unwrap(), Parsed::Eps(_)));
    }

    #[test]
    fn parse_errors_have_code_3() {
        let bad = EX53.replace("1/2", "1//2");
        let f = SpecFile::from_json(&bad).unwrap();
        assert_eq!(f.parse().err().unwrap().code, 3);
        let empty = SpecFile::from_json(r#"{"n":3,"hyperplanes":[]}"#).unwrap();
        assert_eq!(empty.parse().err().unwrap().code, 3);
        assert_eq!(SpecFile::from_json("{").unwrap_err().code, 3);
    }
}
