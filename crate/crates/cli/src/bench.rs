//! Wall-time and term-count table on seeded random instances.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::Args;
use clipvol_core::cube::ClippedCubeSpec;
use clipvol_core::oracle::{volume_recursive_facets_system, DEFAULT_FACET_CAP};
use clipvol_core::random;
use clipvol_core::scalar::Rational;
use clipvol_core::volume::{compute_volume, Formula};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Failure, VERSION};

#[derive(Args)]
pub struct BenchArgs {
    /// Inclusive dimension range `LO..HI`.
    #[arg(long, default_value = "4..10")]
    n_range: String,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest dimension timed with the facet oracle.
    #[arg(long, default_value_t = DEFAULT_FACET_CAP)]
    facet_cap: usize,
    /// Also write bench.csv and bench.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub method: String,
    /// `ok`, `capped`, or an error kind.
    pub status: String,
    pub micros: Option<u128>,
    /// Summands of the vertex sum.
    pub terms: Option<usize>,
    /// `sum_I C(n,|I|) 2^(n-|I|)` over the index sets scanned.
    pub nominal: Option<u64>,
    pub examined: Option<u64>,
    pub volume: Option<String>,
}

const CSV_HEADER: &str = "n,m,trial,method,status,micros,terms,nominal,examined,volume";

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl Row {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.trial,
            self.method,
            self.status,
            opt(&self.micros),
            opt(&self.terms),
            opt(&self.nominal),
            opt(&self.examined),
            opt(&self.volume)
        )
    }

    fn blank(n: usize, m: usize, trial: usize, method: &str, status: &str) -> Self {
        Row {
            n,
            m,
            trial,
            method: method.to_string(),
            status: status.to_string(),
            micros: None,
            terms: None,
            nominal: None,
            examined: None,
            volume: None,
        }
    }
}

pub fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::parse(format!("--n-range {s:?}: expected LO..HI"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Random instance for `(n, trial)` on which the general formula applies.
fn instance(seed: u64, n: usize, m: usize, trial: usize) -> Option<ClippedCubeSpec<Rational>> {
    let mut rng = random::rng(seed ^ ((n as u64) << 32) ^ trial as u64);
    (0..100).find_map(|_| {
        let s = random::spec(&mut rng, n, m);
        match compute_volume(&s, Formula::GeneralCup) {
            Ok(_) => Some(s),
            Err(_) => None,
        }
    })
}

fn time_formula(spec: &ClippedCubeSpec<Rational>, formula: Formula, trial: usize) -> Row {
    let (n, m) = (spec.n(), spec.m());
    let start = Instant::now();
    let result = compute_volume(spec, formula);
    let micros = start.elapsed().as_micros();
    match result {
        Ok(r) => Row {
            micros: Some(micros),
            terms: Some(r.terms.len()),
            nominal: r.stats.map(|s| s.nominal),
            examined: r.stats.map(|s| s.examined),
            volume: Some(r.volume.to_string()),
            ..Row::blank(n, m, trial, formula.id(), "ok")
        },
        Err(e) => Row::blank(n, m, trial, formula.id(), Failure::from(e).kind),
    }
}

pub fn rows(args: &BenchArgs) -> Result<Vec<Row>, Failure> {
    let (lo, hi) = parse_range(&args.n_range)?;
    if args.m == 0 {
        return Err(Failure::parse("--m must be at least 1"));
    }
    let mut out = Vec::new();
    for n in lo..=hi {
        for trial in 0..args.trials {
            let Some(spec) = instance(args.seed, n, args.m, trial) else {
                out.push(Row::blank(n, args.m, trial, "instance", "no-good-instance"));
                continue;
            };
            if args.m <= 3 {
                out.push(time_formula(&spec, Formula::auto_for(args.m), trial));
            }
            out.push(time_formula(&spec, Formula::GeneralCup, trial));
            if n > args.facet_cap {
                out.push(Row::blank(n, args.m, trial, "facets", "capped"));
            } else {
                let start = Instant::now();
                let v = volume_recursive_facets_system(&spec.to_halfspaces(), args.facet_cap);
                let micros = start.elapsed().as_micros();
                out.push(match v {
                    Ok(v) => Row {
                        micros: Some(micros),
                        volume: Some(v.to_string()),
                        ..Row::blank(n, args.m, trial, "facets", "ok")
                    },
                    Err(e) => Row::blank(n, args.m, trial, "facets", Failure::from(e).kind),
                });
            }
        }
    }
    Ok(out)
}

pub fn csv(rows: &[Row]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in rows {
        let _ = writeln!(s, "{}", r.csv());
    }
    s
}

pub fn run(args: &BenchArgs) -> anyhow::Result<Value> {
    let rows = rows(args)?;
    let report = json!({
        "version": VERSION,
        "n_range": args.n_range,
        "m": args.m,
        "trials": args.trials,
        "seed": args.seed,
        "rows": rows,
    });
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("bench.csv"), csv(&rows)).context("writing bench.csv")?;
        let text = serde_json::to_string_pretty(&report).expect("JSON values serialize");
        std::fs::write(dir.join("bench.json"), text + "\n").context("writing bench.json")?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(range: &str, m: usize) -> BenchArgs {
        BenchArgs {
            n_range: range.into(),
            m,
            trials: 1,
            seed: 3,
            facet_cap: 5,
            out_dir: None,
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..16").unwrap(), (4, 16));
        assert_eq!(parse_range("2..=3").unwrap(), (2, 3));
        assert!(parse_range("5..4").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn two_plane_counts_grow_with_n() {
        let rows = rows(&args("4..9", 2)).unwrap();
        let nominal: Vec<u64> = rows
            .iter()
            .filter(|r| r.method == "two-plane")
            .map(|r| r.nominal.unwrap())
            .collect();
        // One plane besides the auxiliary: I = {} and I = {1}, so 2^n + n 2^(n-1).
        let want: Vec<u64> = (4..=9u64).map(|n| (1 << n) + n * (1 << (n - 1))).collect();
        assert_eq!(nominal, want);
        let capped: Vec<usize> = rows.iter().filter(|r| r.status == "capped").map(|r| r.n).collect();
        assert_eq!(capped, vec![6, 7, 8, 9]);
        for r in rows.iter().filter(|r| r.status == "ok") {
            let same_n = rows.iter().find(|s| s.n == r.n && s.method == "general-cup").unwrap();
            assert_eq!(r.volume, same_n.volume);
        }
    }

    #[test]
    fn one_plane_examines_every_corner() {
        let rows = rows(&args("3..3", 1)).unwrap();
        let r = rows.iter().find(|r| r.method == "one-plane").unwrap();
        assert_eq!(r.nominal, Some(8));
        assert_eq!(r.examined, Some(8));
    }
}
