//! Acceptance criteria 1-9. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clipvol_core::cube::{
    augmented_index_set, check_good_clipping, enumerate_vertices, ClippedCubeSpec, Hyperplane,
};
use clipvol_core::derive::{self, Body};
use clipvol_core::identity::{eval_identity, random_params, sweep, Form, IdentityId};
use clipvol_core::index::{
    permutation_parity, separating_parity, separating_parity_closed_form, sign_of_exponent, IndexSet,
};
use clipvol_core::oracle::{volume_monte_carlo_cube, volume_recursive_facets};
use clipvol_core::random::{good_instances, rng};
use clipvol_core::scalar::{binomial, factorial, rational, to_f64, Rational, Scalar};
use clipvol_core::volume::{
    volume_general, volume_lawrence, volume_three_planes, volume_two_planes, Variant,
};

const INSTANCE_SEED: u64 = 20_151_001;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(v: i64) -> Rational {
    rational(v, 1)
}

fn plane(a: &[i64], r: Rational) -> Hyperplane<Rational> {
    Hyperplane::new(a.iter().map(|&x| int(x)).collect(), r)
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n as u32))
}

fn pt(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(p, q)| rational(p, q)).collect()
}

fn two_plane_sample() -> ClippedCubeSpec<Rational> {
    ClippedCubeSpec::new(3, vec![plane(&[-1, 1, 0], rational(1, 2)), plane(&[-1, -2, -1], int(3))]).unwrap()
}

fn three_plane_sample() -> ClippedCubeSpec<Rational> {
    ClippedCubeSpec::new(
        3,
        vec![
            plane(&[-1, 1, 0], rational(1, 2)),
            plane(&[0, 0, 1], rational(-1, 2)),
            plane(&[-1, -2, -1], int(3)),
        ],
    )
    .unwrap()
}

fn criterion_1() -> Check {
    let r = volume_two_planes(&two_plane_sample()).map_err(|e| e.to_string())?;
    ensure(r.volume == rational(19, 24), || format!("volume {}", r.volume))?;
    let v6 = r
        .terms
        .iter()
        .find(|t| t.vertex.coords == pt(&[(1, 2), (0, 1), (0, 1)]))
        .ok_or("no term at v6")?;
    ensure(v6.value == rational(-125, 144), || format!("v6 term {}", v6.value))?;
    let mut got: Vec<Rational> = r.terms.iter().map(|t| t.value.clone()).collect();
    let mut want = pt(&[(9, 4), (-2, 3), (-1, 12), (-125, 144), (27, 144), (-1, 36)]);
    got.sort();
    want.sort();
    ensure(got == want, || format!("terms {got:?}"))?;
    Ok("19/24, v6 = -125/144, six terms match".into())
}

fn criterion_2() -> Check {
    let r = volume_three_planes(&three_plane_sample()).map_err(|e| e.to_string())?;
    ensure(r.volume == rational(35, 96), || format!("volume {}", r.volume))?;
    let mut got: Vec<Rational> = r.terms.iter().map(|t| t.value.clone()).collect();
    let mut want = pt(&[(-2, 3), (3, 16), (125, 96), (-1, 96), (-4, 9), (-1, 288)]);
    got.sort();
    want.sort();
    ensure(got == want, || format!("terms {got:?}"))?;
    Ok("35/96 with the six printed terms".into())
}

fn criterion_3() -> Check {
    let specs = good_instances(INSTANCE_SEED, 200, 5, 4);
    for (k, s) in specs.iter().enumerate() {
        let cup = volume_general(s, Variant::Cup).map_err(|e| format!("#{k} cup: {e}"))?;
        for v in [Variant::Vee, Variant::Vee2] {
            let other = volume_general(s, v).map_err(|e| format!("#{k} {v:?}: {e}"))?;
            ensure(other.volume == cup.volume, || format!("#{k} {v:?} {} vs {}", other.volume, cup.volume))?;
        }
        let l = volume_lawrence(&s.to_halfspaces()).map_err(|e| format!("#{k} lawrence: {e}"))?;
        ensure(l.volume == cup.volume, || format!("#{k} lawrence {} vs {}", l.volume, cup.volume))?;
    }
    Ok("200 instances, cup = vee = vee2 = lawrence".into())
}

fn criterion_4() -> Check {
    let specs = good_instances(INSTANCE_SEED, 200, 6, 4);
    let mut worst = 0.0f64;
    for (k, s) in specs.iter().enumerate() {
        let g = volume_general(s, Variant::Cup).map_err(|e| format!("#{k}: {e}"))?;
        let f = volume_recursive_facets(s).map_err(|e| format!("#{k} facets: {e}"))?;
        ensure(f == g.volume, || format!("#{k} facets {f} vs {}", g.volume))?;
        let mc = volume_monte_carlo_cube(s, 100_000, k as u64).map_err(|e| e.to_string())?;
        let z = (mc.mean - to_f64(&g.volume)).abs() / mc.stderr;
        worst = worst.max(z);
        ensure(z <= 4.0, || format!("#{k} Monte Carlo {} is {z:.2} stderr from {}", mc.mean, g.volume))?;
    }
    Ok(format!("200 instances exact vs facets; Monte Carlo worst {worst:.2} stderr"))
}

fn limit_matches(body: &Body, expected: &Rational) -> Result<(), String> {
    ensure(body.volume == *expected, || format!("{}: closed form {} vs {expected}", body.name, body.volume))?;
    let v = derive::perturbed_volume(body, 7).map_err(|e| format!("{}: {e}", body.name))?;
    ensure(v == *expected, || format!("{}: limit {v} vs {expected}", body.name))
}

fn criterion_5() -> Check {
    let mut count = 0;
    for n in 2..=6 {
        limit_matches(&derive::simplex(n), &fact(n).recip())?;
        count += 1;
        for l in 1..=n {
            let s = (0..l).fold(Rational::zero(), |acc, i| {
                let t = Rational::from_integer(binomial(n as u32, i as u32))
                    * Scalar::pow(&int((l - i) as i64), n as u32);
                if i % 2 == 0 { acc + t } else { acc - t }
            }) / fact(n);
            limit_matches(&derive::slab(n, l), &s)?;
            count += 1;
        }
    }
    for n in 2..=5 {
        let want = (fact(n) * Scalar::pow(&int(2), n as u32 - 1)).recip();
        limit_matches(&derive::isosceles(n), &want)?;
        count += 1;
    }
    Ok(format!("{count} perturbed limits exact"))
}

fn criterion_6() -> Check {
    let mut bodies: Vec<(Body, Rational)> = Vec::new();
    for n in 2..=4 {
        for d in [rational(1, 3), rational(1, 2)] {
            let want = Rational::one() - int(n as i64) * Scalar::pow(&d, n as u32) / fact(n);
            bodies.push((derive::truncated_cube(n, d), want));
        }
    }
    for n in 1..=5 {
        for m in 1..=6 - n {
            bodies.push((derive::hyperprism(n, m), fact(n).recip()));
        }
    }
    for n in 1..=4 {
        for m in 1..=5 - n {
            let want = (Scalar::pow(&int(2), n as u32) - int(n as i64) / Scalar::pow(&int(2), m as u32))
                / fact(n + m);
            bodies.push((derive::trapezoid(n, m), want));
        }
    }
    for (body, want) in &bodies {
        limit_matches(body, want)?;
        let o = body.oracle_volume().map_err(|e| format!("{}: {e}", body.name))?;
        ensure(o == *want, || format!("{}: oracle {o} vs {want}", body.name))?;
    }
    Ok(format!("{} bodies, limit = closed form = facet oracle", bodies.len()))
}

fn criterion_7() -> Check {
    for id in IdentityId::ALL {
        let s = sweep(id, 500, 1000 + id as u64, 8).map_err(|e| e.to_string())?;
        ensure(s.failures.is_empty(), || format!("{id}: {:?}", s.failures.first()))?;
    }
    // Exact case values of the exponent-indexed forms for every k.
    let mut r = rng(77);
    let mut cases = 0;
    for _ in 0..40 {
        let base = random_params(IdentityId::Simplex, &mut r, 8);
        let n = base.a.len();
        let a_fact = base.a.iter().fold(Rational::one(), |acc, x| acc * x.clone());
        let sgn = |e: usize| if e.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
        for k in 0..=n as i64 {
            let pte = eval_identity(IdentityId::Pte, &clipvol_core::identity::IdentityParams {
                form: Form::Power(k),
                ..base.clone()
            })
            .map_err(|e| e.to_string())?;
            let want = match k as usize {
                0 => -Rational::one(),
                k if k < n => Rational::zero(),
                _ => sgn(n) * fact(n) * a_fact.clone(),
            };
            ensure(pte.lhs == want, || format!("pte n={n} k={k}: {} vs {want}", pte.lhs))?;

            let smp = eval_identity(IdentityId::Simplex, &clipvol_core::identity::IdentityParams {
                form: Form::SetPower(k),
                ..base.clone()
            })
            .map_err(|e| e.to_string())?;
            let want = match k as usize {
                0 => Rational::one(),
                k if k < n => Rational::zero(),
                _ => sgn(n - 1) * a_fact.clone(),
            };
            ensure(smp.lhs == want, || format!("simplex n={n} k={k}: {} vs {want}", smp.lhs))?;
            cases += 2;
        }
    }
    Ok(format!("10 identities x 500 draws; {cases} exponent cases exact"))
}

fn subsets(n: usize) -> impl Iterator<Item = IndexSet> {
    (0u32..1 << n).map(move |mask| IndexSet::new((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect()).unwrap())
}

fn criterion_8() -> Check {
    let mut sets = 0;
    for n in 0..=8 {
        let full = IndexSet::range(n);
        for j in subsets(n) {
            let d = separating_parity(&full, &j).map_err(|e| e.to_string())?;
            ensure(d == separating_parity_closed_form(n, &j), || format!("Δ([{n}], {j})"))?;
            let k = j.len() as i64;
            let prod: i32 = j
                .iter()
                .map(|i| separating_parity(&j, &IndexSet::singleton(i)).unwrap())
                .product();
            ensure(prod == sign_of_exponent(k * (k - 1) / 2), || format!("product over {j}"))?;
            sets += 1;
        }
    }
    let mut vertices = 0;
    for s in good_instances(INSTANCE_SEED + 8, 60, 5, 4) {
        let e = enumerate_vertices(&s).map_err(|e| e.to_string())?;
        let n = s.n();
        let m = s.m();
        let a = s.matrix();
        let big = s.augmented_matrix();
        for v in e.vertices.iter().filter(|v| !v.aux_edge) {
            let k = v.index_set.len() as i64;
            // Edge products of the cup and vee forms differ by (-1)^{||v*|| - k(k+1)/2}.
            let cup_cols = v.index_set.insert_ordered(m).unwrap();
            let vee_cols = v.index_set.push(m).unwrap();
            let (mut cup, mut vee) = (Rational::one(), Rational::one());
            for t in v.v01.iter() {
                cup *= a.minor(&v.vstar.insert_ordered(t).unwrap(), &cup_cols).unwrap();
                vee *= a.minor(&v.vstar.push(t).unwrap(), &vee_cols).unwrap();
            }
            let sign = sign_of_exponent(v.vstar.sum() as i64 - k * (k + 1) / 2);
            ensure(cup == vee.clone() * int(sign as i64), || format!("cup/vee sign at {:?}", v.coords))?;
            ensure(permutation_parity(&cup_cols, &vee_cols) == Ok(1), || "column order".into())?;

            let ical = augmented_index_set(n, v);
            let delta = separating_parity(&IndexSet::range(n), &v.vstar).unwrap();
            let lhs = big.minor(&IndexSet::range(n), &ical).unwrap();
            let rhs = a.minor(&v.vstar, &v.index_set).unwrap()
                * int((sign_of_exponent(v.v1.len() as i64) * delta) as i64);
            ensure(lhs == rhs, || format!("augmented minor at {:?}", v.coords))?;

            let ical01 = IndexSet::new(ical.iter().filter(|&c| c <= 2 * n).collect()).unwrap();
            let sub = big.submatrix(&v.v01, &ical01).unwrap();
            for r in 0..sub.rows() {
                for c in 0..sub.cols() {
                    let x = sub.get(r, c);
                    let ok = if r == c { Scalar::abs(x) == Rational::one() } else { x.is_zero() };
                    ensure(ok, || format!("cube block not ±1 diagonal at {:?}", v.coords))?;
                }
            }
            let det = sub.determinant().unwrap();
            ensure(det == int(sign_of_exponent(v.v1.len() as i64) as i64), || "cube block determinant".into())?;
            vertices += 1;
        }
        if vertices >= 100 {
            break;
        }
    }
    ensure(vertices >= 100, || format!("only {vertices} vertices"))?;
    Ok(format!("{sets} index sets exhaustive; {vertices} vertices checked"))
}

fn criterion_9() -> Check {
    let spec = ClippedCubeSpec::new(
        3,
        vec![
            plane(&[1, 1, 2], int(-1)),
            plane(&[-1, -1, 0], int(1)),
            plane(&[1, 2, 4], int(1)),
        ],
    )
    .unwrap();
    let report = check_good_clipping(&spec);
    ensure(!report.holds(), || "good clipping unexpectedly holds".into())?;
    let mut w = report.witnesses(&IndexSet::singleton(1));
    w.sort();
    let want = vec![pt(&[(0, 1), (1, 1), (0, 1)]), pt(&[(1, 1), (0, 1), (0, 1)])];
    ensure(w == want, || format!("H1 witnesses {w:?}"))?;
    Ok("H1 witnesses (1,0,0) and (0,1,0)".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("two-plane sample", criterion_1, Duration::from_secs(1)),
        ("three-plane sample", criterion_2, Duration::from_secs(1)),
        ("formula-variant equivalence", criterion_3, Duration::from_secs(120)),
        ("oracle equivalence", criterion_4, Duration::from_secs(300)),
        ("epsilon-perturbation limits", criterion_5, Duration::from_secs(60)),
        ("closed-form bodies", criterion_6, Duration::from_secs(120)),
        ("identity sweeps", criterion_7, Duration::from_secs(180)),
        ("sign parity suite", criterion_8, Duration::from_secs(60)),
        ("good-clipping witnesses", criterion_9, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > *budget => Err(format!("{msg}, but took {took:.2?} over the {budget:?} budget")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name} ({msg}; {took:.2?})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({msg}; {took:.2?})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
