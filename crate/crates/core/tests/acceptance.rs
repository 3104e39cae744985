//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Oracles here are written independently of the library: flip factors,
//! family polynomials and kite root factors are re-derived in plain
//! arithmetic and compared against library output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gcdissect::affine_types::{
    affine_quotient, canonicalize, classify_quadrangle_with, flip, is_affine_kite, AffineClass,
    NearParallel,
};
use gcdissect::cli;
use gcdissect::document::{plan_from_json, plan_to_json, PlanDocument};
use gcdissect::families::{family_beta, FamilyId};
use gcdissect::ratio::Ratio;
use gcdissect::realizer::{
    dissect_even_general, dissect_fan, dissect_odd, dissect_por5, DissectionPlan,
};
use gcdissect::treesearch::{evaluate, parity_table, search_with, ExtTree, SearchOptions};
use gcdissect::verifier::verify_plan;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_criterion(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(d) if elapsed <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {id} [{name}]: {} ({detail}; {:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `Q(a/d, b/d)` with `0 < a < b < d`.
fn random_q(r: &mut StdRng) -> AffineClass {
    let d = r.gen_range(3..=60i64);
    let a = r.gen_range(1..d - 1);
    let b = r.gen_range(a + 1..d);
    AffineClass::q_frac(a, d, b, d)
}

fn random_kite(r: &mut StdRng) -> AffineClass {
    let d = r.gen_range(2..=60i64);
    let a = r.gen_range(1..d);
    // beta = 1 / (2 - a/d)
    AffineClass::q_frac(a, d, d, 2 * d - a)
}

fn random_non_kite(r: &mut StdRng) -> AffineClass {
    loop {
        let c = random_q(r);
        if !is_affine_kite(&c) {
            return c;
        }
    }
}

fn params(c: &AffineClass) -> (Ratio, Ratio) {
    match c {
        AffineClass::Q { alpha, beta } => (alpha.clone(), beta.clone()),
        _ => panic!("Q class expected"),
    }
}

fn big(c: &Ratio) -> BigRational {
    c.as_exact().expect("exact").clone()
}

// Criterion 1 -------------------------------------------------------------

fn flip_oracle(a: &BigRational, b: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::from_integer(1.into());
    let f = (&one - b) / ((&one - a) * b);
    (&f * a, &f * b)
}

fn criterion_1() -> Check {
    let mut r = rng(1);
    let mut kites = 0;
    for k in 0..10_000 {
        let c = if k % 4 == 0 {
            random_kite(&mut r)
        } else {
            random_q(&mut r)
        };
        let (a, b) = params(&c);
        let fc = flip(&c).map_err(|e| e.to_string())?;
        let (fa, fb) = params(&fc);
        let (oa, ob) = flip_oracle(&big(&a), &big(&b));
        ensure(big(&fa) == oa && big(&fb) == ob, || {
            format!("flip({c}) = {fc}")
        })?;
        let back = flip(&fc).map_err(|e| e.to_string())?;
        ensure(back == c, || format!("flip is not an involution at {c}"))?;
        ensure(affine_quotient(&c) == affine_quotient(&fc), || {
            format!("quotient changes under flip at {c}")
        })?;
        let fixed = fc == c;
        ensure(is_affine_kite(&c) == fixed, || {
            format!("kite test disagrees with flip-fixedness at {c}")
        })?;
        if fixed {
            kites += 1;
        }
    }
    Ok(format!("10000 classes, {kites} kites"))
}

// Criterion 2 -------------------------------------------------------------

fn criterion_2() -> Check {
    let mut rows = Vec::new();
    for n in 1..=6usize {
        let table = parity_table(n, 8).map_err(|e| e.to_string())?;
        ensure(!table.is_empty(), || format!("empty table at n={n}"))?;
        for (k, count) in &table {
            let k = *k as usize;
            ensure(k <= n && k % 2 == n % 2, || {
                format!("exponent {k} reachable with {n} leaves ({count} trees)")
            })?;
        }
        rows.push(format!(
            "n={n}:{{{}}}",
            table
                .iter()
                .map(|(k, _)| k.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
    }
    Ok(rows.join(" "))
}

// Criterion 3 -------------------------------------------------------------

fn exhaustive(tol: Ratio) -> SearchOptions {
    SearchOptions {
        tol,
        prune: false,
        cap: 8,
    }
}

fn assert_exact_plan(plan: &DissectionPlan, n: usize, what: &str) -> Result<(), String> {
    ensure(plan.tiles.len() == n, || {
        format!("{what}: {} tiles, expected {n}", plan.tiles.len())
    })?;
    let rep = verify_plan(plan, &Ratio::zero()).map_err(|e| format!("{what}: {e}"))?;
    ensure(rep.ok, || format!("{what}: {:?}", rep.failures))
}

fn criterion_3() -> Check {
    let mut r = rng(3);
    let classes: Vec<AffineClass> = (0..100).map(|_| random_q(&mut r)).collect();
    for c in &classes {
        for n in [2, 4, 6] {
            let hits = search_with(c, n, &exhaustive(Ratio::zero())).map_err(|e| e.to_string())?;
            ensure(hits.is_empty(), || {
                format!(
                    "{c} has {} hits at n={n}, first {}",
                    hits.len(),
                    hits[0].tree
                )
            })?;
        }
    }
    let mut fans = 0;
    for c in [
        AffineClass::t_frac(1, 2),
        AffineClass::t_frac(1, 10),
        AffineClass::t_frac(7, 9),
        AffineClass::P,
    ] {
        for n in 2..=8 {
            assert_exact_plan(
                &dissect_fan(&c, n).map_err(|e| e.to_string())?,
                n,
                &format!("fan {c} n={n}"),
            )?;
            fans += 1;
        }
    }
    Ok(format!("300 empty searches, {fans} fan plans exact"))
}

// Criterion 4 -------------------------------------------------------------

fn p_ii(a: f64, b: f64) -> f64 {
    a * (1.0 - a) * b * b + b - 1.0
}

fn q_iii(a: f64, b: f64) -> f64 {
    (1.0 - a) * b * b - (1.0 - 3.0 * a + a * a) * b - a
}

fn h_iv(a: f64, b: f64) -> f64 {
    (a - a * a) * b.powi(3)
        + (1.0 - 2.0 * a + 2.0 * a * a) * b * b
        + (-1.0 + 2.0 * a - 4.0 * a * a + a.powi(3)) * b
        + a * a
}

fn family_residuals(a: f64, b: f64) -> [f64; 3] {
    [p_ii(a, b), q_iii(a, b), h_iv(a, b)]
}

fn flip_f64(a: f64, b: f64) -> (f64, f64) {
    let f = (1.0 - b) / ((1.0 - a) * b);
    (f * a, f * b)
}

/// Values at alpha = 1/2 computed with 50-digit arithmetic.
const II_HALF: f64 = 0.828_427_124_746_190_1;
const III_HALF: f64 = 0.780_776_406_404_415_1;
const IV_HALF: f64 = 0.804_873_686_318_251_8;

fn criterion_4() -> Check {
    let tol = Ratio::approx(1e-9, 0.0);
    let ids = [FamilyId::II, FamilyId::III, FamilyId::IV];
    let mut on = 0;
    let (mut off, mut skipped) = (0, 0);
    for k in 1..=99 {
        let alpha = Ratio::frac(k, 100);
        let a = alpha.to_f64();
        for (fi, id) in ids.iter().enumerate() {
            let beta = family_beta(*id, &alpha).map_err(|e| e.to_string())?;
            let b = beta.to_f64();
            let res = family_residuals(a, b)[fi];
            ensure(res.abs() < 1e-9, || format!("{id} at {a}: residual {res}"))?;
            let leaf = AffineClass::q(alpha.clone(), beta).map_err(|e| e.to_string())?;
            let hits =
                search_with(&leaf, 3, &exhaustive(tol.clone())).map_err(|e| e.to_string())?;
            ensure(!hits.is_empty(), || {
                format!("no n=3 hit for {id} at alpha={a}")
            })?;
            on += 1;

            for delta in [1e-2, -1e-2] {
                let b2 = b + delta;
                if !(a < b2 && b2 < 1.0) {
                    skipped += 1;
                    continue;
                }
                let (fa, fb) = flip_f64(a, b2);
                let all = family_residuals(a, b2)
                    .into_iter()
                    .chain(family_residuals(fa, fb));
                if all.into_iter().any(|r| r.abs() <= 1e-4) {
                    skipped += 1;
                    continue;
                }
                let leaf = AffineClass::q(alpha.clone(), Ratio::approx(b2, 1e-12))
                    .map_err(|e| e.to_string())?;
                let hits =
                    search_with(&leaf, 3, &exhaustive(tol.clone())).map_err(|e| e.to_string())?;
                ensure(hits.is_empty(), || {
                    format!("off-family Q({a},{b2}) has hit {}", hits[0].tree)
                })?;
                off += 1;
            }
        }
    }
    let half = Ratio::frac(1, 2);
    for (id, want) in [
        (FamilyId::II, II_HALF),
        (FamilyId::III, III_HALF),
        (FamilyId::IV, IV_HALF),
    ] {
        let got = family_beta(id, &half).map_err(|e| e.to_string())?.to_f64();
        ensure((got - want).abs() < 1e-10, || {
            format!("{id}(1/2) = {got}, expected {want}")
        })?;
    }
    ensure((II_HALF - 0.828_427_124_7).abs() < 1e-10, || {
        "II constant".into()
    })?;
    ensure((III_HALF - 0.780_776_406_4).abs() < 1e-10, || {
        "III constant".into()
    })?;
    ensure((IV_HALF - 0.804_87).abs() < 1e-5, || "IV constant".into())?;
    Ok(format!(
        "{on} family hits, {off} off-family samples empty, {skipped} off-family samples skipped"
    ))
}

// Criterion 5 -------------------------------------------------------------

type Factor = fn(&Ratio) -> Ratio;

fn r(n: i64) -> Ratio {
    Ratio::int(n)
}

fn factor_i_a(a: &Ratio) -> Ratio {
    let a2 = a * a;
    (&a2 - r(5) * a + r(7)) * (r(3) - a) * &a2 / ((&a2 + a + r(1)) * (a + r(1)) * (r(2) - a).pow(2))
}

fn factor_i_b(a: &Ratio) -> Ratio {
    let a2 = a * a;
    let a3 = &a2 * a;
    (-&a3 + r(4) * &a2 - r(2) * a - r(5)) * (r(3) - a) * &a2
        / ((&a3 - r(2) * &a2 - r(2) * a - r(1)) * (a + r(1)) * (r(2) - a).pow(2))
}

fn factor_i_c(a: &Ratio) -> Ratio {
    (r(4) - a) * (r(3) - a) * a / ((a + r(2)) * (a + r(1)) * (r(2) - a))
}

fn factor_i_d(a: &Ratio) -> Ratio {
    let a2 = a * a;
    (&a2 - a - r(4)) * (r(3) - a) * a / ((&a2 - r(3) * a - r(2)) * (a + r(1)) * (r(2) - a))
}

fn criterion_5() -> Check {
    let mut checked = 0;
    for k in 1..=31 {
        let alpha = Ratio::frac(k, 32);
        let beta = Ratio::frac(32, 64 - k);
        let kite = AffineClass::q(alpha, beta).map_err(|e| e.to_string())?;
        let hits = search_with(&kite, 5, &exhaustive(Ratio::zero())).map_err(|e| e.to_string())?;
        ensure(hits.is_empty(), || {
            format!("kite {kite} has 5-leaf hit {}", hits[0].tree)
        })?;
        checked += 1;
    }
    let named: [(&str, Factor); 5] = [
        ("(((L·L)·L)^F:(L·L)^F)", factor_i_a),
        ("(((L·L)^F·L)^F:(L·L)^F)", factor_i_b),
        ("(((L·L):L)^F:(L·L)^F)", factor_i_c),
        ("(((L·L)^F:L)^F:(L·L)^F)", factor_i_d),
        ("(((L:L)·L)^F:(L·L)^F)", factor_i_c),
    ];
    let alphas = [
        (1, 11),
        (1, 7),
        (1, 5),
        (1, 3),
        (2, 5),
        (1, 2),
        (3, 5),
        (2, 3),
        (3, 4),
        (9, 10),
    ];
    for (s, factor) in named {
        let t = ExtTree::parse(s).map_err(|e| e.to_string())?;
        for (p, q) in alphas {
            let a = Ratio::frac(p, q);
            let b = Ratio::one() / (r(2) - &a);
            let leaf = AffineClass::q(a.clone(), b.clone()).map_err(|e| e.to_string())?;
            let f = factor(&a);
            let want = AffineClass::Q {
                alpha: &f * &a,
                beta: &f * &b,
            };
            let got = evaluate(&t, &leaf).q_points();
            ensure(got == vec![want.clone()], || {
                format!("{s} at alpha={a}: got {got:?}, expected {want}")
            })?;
        }
    }
    Ok(format!(
        "{checked} kites without 5-leaf hits, 5 named trees x 10 alphas"
    ))
}

// Criteria 6 and 7 --------------------------------------------------------

fn criterion_6(plans: &mut Vec<(AffineClass, DissectionPlan)>) -> Check {
    let mut r = rng(6);
    let mut count = 0;
    for _ in 0..50 {
        let c = random_non_kite(&mut r);
        for n in [5, 7, 9] {
            let plan = dissect_odd(&c, n).map_err(|e| format!("{c} n={n}: {e}"))?;
            assert_exact_plan(&plan, n, &format!("{c} n={n}"))?;
            plans.push((c.clone(), plan));
            count += 1;
        }
    }
    for _ in 0..20 {
        let c = random_kite(&mut r);
        for n in [7, 9] {
            let plan = dissect_odd(&c, n).map_err(|e| format!("{c} n={n}: {e}"))?;
            assert_exact_plan(&plan, n, &format!("kite {c} n={n}"))?;
            plans.push((c.clone(), plan));
            count += 1;
        }
    }
    Ok(format!("{count} plans verified at tol 0"))
}

fn criterion_7(plans: &mut Vec<(AffineClass, DissectionPlan)>) -> Check {
    let mut r = rng(7);
    for _ in 0..50 {
        let c = random_q(&mut r);
        let plan = dissect_por5(&c).map_err(|e| format!("{c}: {e}"))?;
        ensure(!plan.gc, || "five-piece plan marked glass-cut".into())?;
        assert_exact_plan(&plan, 5, &format!("five pieces {c}"))?;
        plans.push((c, plan));
    }
    let tol = Ratio::approx(1e-9, 0.0);
    let mut classes = vec![
        AffineClass::q_frac(1, 5, 1, 2),
        AffineClass::q_frac(1, 2, 2, 3),
    ];
    classes.extend((0..8).map(|_| random_q(&mut r)));
    let mut worst = 0f64;
    for c in &classes {
        for n in [6, 8, 10] {
            let plan = dissect_even_general(c, n).map_err(|e| format!("{c} n={n}: {e}"))?;
            ensure(plan.tiles.len() == n && !plan.gc, || {
                format!("{c} n={n}: shape")
            })?;
            let rep = verify_plan(&plan, &tol).map_err(|e| e.to_string())?;
            ensure(rep.ok, || format!("{c} n={n}: {:?}", rep.failures))?;
            let res = plan
                .pinned
                .iter()
                .find(|(k, _)| k == "bisection_residual")
                .map(|(_, v)| v.to_f64())
                .ok_or("no bisection residual")?;
            ensure(res < 1e-12, || format!("{c} n={n}: residual {res}"))?;
            worst = worst.max(res);
            plans.push((c.clone(), plan));
        }
    }
    Ok(format!(
        "50 five-piece plans exact, {} even plans at tol 1e-9, worst residual {worst:.1e}",
        classes.len() * 3
    ))
}

// Criterion 8 -------------------------------------------------------------

fn run(args: &[&str]) -> (i32, String) {
    let mut v = vec!["gcdissect".to_string()];
    v.extend(args.iter().map(|s| s.to_string()));
    cli::run(&v)
}

fn criterion_8(plans: &[(AffineClass, DissectionPlan)]) -> Check {
    for (c, plan) in plans {
        let want = canonicalize(c).into_class();
        let mode = if plan.tol.is_zero() {
            NearParallel::Reject
        } else {
            NearParallel::Accept
        };
        for t in &plan.tiles {
            let got = classify_quadrangle_with(t, mode)
                .map_err(|e| e.to_string())?
                .class
                .into_class();
            ensure(got == want, || format!("tile of {c} classifies as {got}"))?;
        }
        let s = plan_to_json(plan);
        let doc = PlanDocument::parse(&s).map_err(|e| e.to_string())?;
        ensure(doc.to_json() == s, || {
            format!("document for {c} is not byte-stable")
        })?;
        let back = plan_from_json(&s).map_err(|e| e.to_string())?;
        ensure(&back == plan, || {
            format!("plan for {c} changes on round trip")
        })?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("plan.json");
    let p = path.to_str().unwrap();
    let ii = family_beta(FamilyId::II, &Ratio::frac(1, 3)).unwrap();
    let family_ii = format!("Q:1/3,{ii}");
    // (class, possible n values among 2..=7)
    let matrix: Vec<(String, Vec<usize>)> = vec![
        ("T:1/2".into(), vec![2, 3, 4, 5, 6, 7]),
        ("T:3/10".into(), vec![2, 3, 4, 5, 6, 7]),
        ("P".into(), vec![2, 3, 4, 5, 6, 7]),
        ("Q:1/5,1/2".into(), vec![5, 7]),
        ("Q:1/3,1/2".into(), vec![5, 7]),
        ("Q:1/2,2/3".into(), vec![7]),
        ("Q:1/4,4/7".into(), vec![7]),
        (family_ii, vec![3, 5, 7]),
    ];
    let mut cells = 0;
    for (class, possible) in &matrix {
        for n in 2..=7usize {
            let ns = n.to_string();
            let (code, out) = run(&["dissect", "--class", class, "--n", &ns, "--out", p]);
            if possible.contains(&n) {
                ensure(code == 0, || {
                    format!("dissect {class} n={n} exited {code}: {out}")
                })?;
                let (vcode, vout) = run(&["verify", "--plan", p]);
                ensure(vcode == 0, || {
                    format!("verify {class} n={n} exited {vcode}: {vout}")
                })?;
            } else {
                ensure(code == 1, || {
                    format!("dissect {class} n={n} exited {code}, expected 1")
                })?;
                ensure(out.contains("\"error\""), || {
                    format!("no error object: {out}")
                })?;
            }
            cells += 1;
        }
    }
    let (code, out) = run(&["dissect", "--class", "Q:1/2,2/3", "--n", "5"]);
    ensure(code == 1 && out.contains("kite"), || {
        format!("kite refusal: {code} {out}")
    })?;
    let (code, _) = run(&["dissect", "--class", "Q:1/2", "--n", "5"]);
    ensure(code == 2, || format!("malformed class exited {code}"))?;
    Ok(format!(
        "{} plans re-classified and round-tripped, {cells} CLI matrix cells",
        plans.len()
    ))
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    let mut plans = Vec::new();
    all &= run_criterion(1, "flip and quotient algebra", secs(5), criterion_1);
    all &= run_criterion(2, "quotient exponent parity", secs(60), criterion_2);
    all &= run_criterion(3, "even n for non-trapezoids", secs(300), criterion_3);
    all &= run_criterion(4, "three-piece families", secs(300), criterion_4);
    all &= run_criterion(5, "kites and five pieces", secs(600), criterion_5);
    all &= run_criterion(6, "odd constructions", secs(300), || {
        criterion_6(&mut plans)
    });
    all &= run_criterion(7, "self-affine constructions", secs(300), || {
        criterion_7(&mut plans)
    });
    all &= run_criterion(8, "oracle round trips", secs(300), || criterion_8(&plans));
    if !all {
        std::process::exit(1);
    }
}
