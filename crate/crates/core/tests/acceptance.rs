//! Acceptance suite. One PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails or runs past its time limit.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{d_direction, from_element, from_tensor, letter, Oracle, L};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stringyang::algebra::{example_algebra, general_algebra, IndexedTable, ParamValue};
use stringyang::checks::{check_bialgebra, check_casimir, check_jacobi, homomorphism_residual};
use stringyang::derivation::{closed_form_epsilon, derive_fg_epsilon, solve_central, solve_gamma};
use stringyang::dsl::{parse_expression, parse_presentation, Profile};
use stringyang::rational::{format_q, frac, q};
use stringyang::tensor::casimir_bracket;
use stringyang::{Element, Generator, Monomial, TensorElement, Q};

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn random_q(rng: &mut StdRng) -> Q {
    frac(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

fn pair_brackets() -> Outcome {
    let alg = example_algebra();
    let oracle = Oracle::example(q(1), q(0), q(0));
    let named = [
        (Generator::a(2), Generator::a(-2), "2*a[0]"),
        (Generator::Ham, Generator::a(3), "3*a[3]"),
        (Generator::a(3), Generator::b(-3), "3*a[0]"),
        (Generator::b(2), Generator::b(-2), "4*b[0] - 8/3*a[0]^3"),
        (Generator::a(1), Generator::a(1), "0"),
        (Generator::a(0), Generator::b(4), "0"),
        (Generator::Ham, Generator::b(-2), "-2*b[-2]"),
        (Generator::a(-1), Generator::b(3), "-a[2]"),
        (Generator::b(3), Generator::b(1), "2*b[4]"),
        (Generator::b(1), Generator::b(-1), "2*b[0] - 1/3*a[0]^3"),
        (Generator::b(0), Generator::b(0), "0"),
        (Generator::Ham, Generator::Ham, "0"),
        (Generator::b(-3), Generator::a(2), "-2*a[-1]"),
        (Generator::a(-4), Generator::a(4), "-4*a[0]"),
    ];
    for (x, y, expected) in &named {
        let got = alg.bracket_gen(*x, *y).map_err(|e| e.to_string())?;
        let want = parse_expression(expected, &alg).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("[{x}, {y}] = {got}, expected {expected}"))?;
        let x_l = common::from_generator(*x);
        let y_l = common::from_generator(*y);
        let via_oracle = oracle.comm(&letter(x_l), &letter(y_l));
        ensure(from_element(&got) == via_oracle, || format!("[{x}, {y}] disagrees with the reference expansion"))?;
    }
    // Every pair in a small window against the reference expansion as well.
    let gens = alg.window_generators(3);
    for &x in &gens {
        for &y in &gens {
            let got = alg.bracket_gen(x, y).map_err(|e| e.to_string())?;
            let want = oracle.comm(&letter(common::from_generator(x)), &letter(common::from_generator(y)));
            ensure(from_element(&got) == want, || format!("[{x}, {y}] disagrees with the reference expansion"))?;
        }
    }
    Ok(format!("{} named fixtures, {} window pairs", named.len(), gens.len() * gens.len()))
}

fn jacobi() -> Outcome {
    let report = check_jacobi(&example_algebra(), 4).map_err(|e| e.to_string())?;
    ensure(report.passed(), || report.to_text(false))?;
    Ok(format!("{} triples", report.cases))
}

fn bialgebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut runs = Vec::new();
    for eps in [q(1), frac(2, 3), q(-5)] {
        runs.push((eps.clone(), q(0), q(0)));
        runs.push((eps, random_q(&mut rng), random_q(&mut rng)));
    }
    let mut cases = 0;
    for (eps, alpha, beta) in &runs {
        let alg = example_algebra()
            .with_scalar("eps", eps.clone())
            .with_scalar("alpha", alpha.clone())
            .with_scalar("beta", beta.clone());
        let report = check_bialgebra(&alg, 4).map_err(|e| e.to_string())?;
        ensure(report.passed(), || {
            format!("eps={} alpha={} beta={}\n{}", format_q(eps), format_q(alpha), format_q(beta), report.to_text(false))
        })?;
        cases += report.cases;
    }
    Ok(format!("{} parameter sets, {cases} cases", runs.len()))
}

fn casimir() -> Outcome {
    let alg = example_algebra();
    let report = check_casimir(&alg, 6).map_err(|e| e.to_string())?;
    ensure(report.passed(), || report.to_text(false))?;
    let a0 = Monomial::generator(Generator::a(0));
    for n in (-6i64..=6).filter(|&n| n != 0) {
        let an = Monomial::generator(Generator::a(n));
        let mut expected = TensorElement::zero();
        expected.add_term([an.clone(), a0.clone()], q(n));
        expected.add_term([a0.clone(), an], q(-n));
        let got = casimir_bracket(&alg, &Element::generator(Generator::a(n))).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("[Omega, a[{n}]] = {got}"))?;
    }
    Ok(format!("{} cases", report.cases))
}

fn central() -> Outcome {
    let solution = solve_central(6).map_err(|e| e.to_string())?;
    ensure(solution.violations.is_empty(), || format!("{:?}", solution.violations))?;
    ensure(solution.basis.len() == 2, || format!("dimension {}", solution.basis.len()))?;
    // Dimension 2 and each basis vector in span{m, m^3} means equal spans.
    for v in &solution.basis {
        let y = (&v[1] - &v[0] * q(2)) / q(6);
        let x = &v[0] - &y;
        for (k, c) in v.iter().enumerate() {
            let m = k as i64 + 1;
            ensure(*c == &x * q(m) + &y * q(m * m * m), || format!("basis vector outside span: c_{m}"))?;
        }
    }
    Ok("dimension 2, span {m, m^3}".into())
}

fn gamma() -> Outcome {
    let solution = solve_gamma(3, 3).map_err(|e| e.to_string())?;
    ensure(solution.violations.is_empty(), || format!("{:?}", solution.violations))?;
    ensure(solution.dimension() == 7, || format!("dimension {}", solution.dimension()))?;
    for v in &solution.basis {
        for n in -3i64..=3 {
            let slope = &v[solution.index(1, n)];
            for m in -3i64..=3 {
                ensure(v[solution.index(m, n)] == slope * q(m), || format!("gamma[{m},{n}] is not m*gamma[{n}]"))?;
            }
        }
    }
    Ok("dimension 7".into())
}

fn fg_epsilon() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut residuals = Vec::new();
    for _ in 0..5 {
        let (e1, e2) = (random_q(&mut rng), random_q(&mut rng));
        let r = derive_fg_epsilon(e1.clone(), e2.clone(), 10, q(0), q(0)).map_err(|e| e.to_string())?;
        ensure(r.violations.is_empty(), || format!("{:?}", r.violations))?;
        ensure(r.f == (&e1 - &e2 * q(4)) / q(3), || format!("f = {}", format_q(&r.f)))?;
        ensure(r.g == frac(4, 3) * (&e2 - &e1), || format!("g = {}", format_q(&r.g)))?;
        for m in 1..=10u32 {
            let closed = &e1 + frac(4, 3) * (q(1) - frac(1, i64::from(m * m))) * (&e2 - &e1);
            ensure(*r.e(m) == closed, || format!("e_{m} = {}", format_q(r.e(m))))?;
            ensure(closed_form_epsilon(&e1, &e2, m) == closed, || format!("closed form at m = {m}"))?;
        }
        let (_, _, at_one) = &r.printed_sum[0];
        ensure(*at_one == (&e2 - &e1) / q(3), || format!("printed sum residual at m = 1: {}", format_q(at_one)))?;
        residuals.push(format_q(at_one));
    }
    Ok(format!("5 pairs, printed sum residual at m=1: [{}]", residuals.join(", ")))
}

fn end_to_end() -> Outcome {
    let mut lines = Vec::new();
    for eps in [q(1), frac(2, 3), q(-5)] {
        let e = &eps * &eps;
        let r = derive_fg_epsilon(e.clone(), e, 4, q(0), q(0)).map_err(|e| e.to_string())?;
        ensure(r.violations.is_empty(), || format!("{:?}", r.violations))?;
        let source = format!(
            "generator a : mode ; grade m\n\
             generator H ; grade 0\n\
             generator b : mode ; grade m\n\
             central a[0]\n\
             bracket [a[m], a[n]] = m * delta(m+n) * a[0]\n\
             bracket [H, a[m]] = m * a[m]\n\
             bracket [a[m], b[n]] = m * a[m+n]\n\
             bracket [H, b[m]] = m * b[m]\n\
             bracket [b[m], b[n]] = (m-n)*b[m+n] + delta(m+n) * ( m^3 * ({}) + m * ({}) )\n\
             cotail b[m] = ({}) * m * ( a[m] (x) a[0] - a[0] (x) a[m] )\n",
            r.f_poly,
            r.g_poly,
            format_q(&eps)
        );
        let alg = parse_presentation(&source).map_err(|e| format!("{e}\n{source}"))?.algebra();
        let report = check_bialgebra(&alg, 4).map_err(|e| e.to_string())?;
        ensure(report.passed(), || report.to_text(false))?;
        lines.push(format!("eps={}: F={}", format_q(&eps), r.f_poly));
    }
    Ok(lines.join("; "))
}

fn residual_oracle() -> Outcome {
    let table: BTreeMap<i64, Q> = [(1, q(1)), (2, q(2)), (3, q(4))].into();
    let alg = general_algebra().with_param("eps", ParamValue::Indexed(IndexedTable::from_entries(table.clone())));
    let got = homomorphism_residual(&alg, Generator::b(2), Generator::b(1)).map_err(|e| e.to_string())?;
    let expected = d_direction(3, q(-5));
    ensure(from_tensor(&got) == expected, || format!("kernel residual {got}"))?;
    let oracle = Oracle::general(table, q(-1), q(0));
    ensure(oracle.homomorphism_residual(L::B(2), L::B(1)) == expected, || "reference expansion disagrees".into())?;
    Ok(format!("[Db2, Db1] - D[b2, b1] = {got}"))
}

fn corpus() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let read = |kind: &str| -> Result<Vec<(String, String)>, String> {
        let mut out = Vec::new();
        for entry in fs::read_dir(root.join(kind)).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.extension().is_some_and(|x| x == "lba") {
                out.push((path.display().to_string(), fs::read_to_string(&path).map_err(|e| e.to_string())?));
            }
        }
        Ok(out)
    };
    let valid = read("valid")?;
    let invalid = read("invalid")?;
    ensure(valid.len() >= 20 && invalid.len() >= 20, || format!("{} valid, {} invalid", valid.len(), invalid.len()))?;
    for (name, source) in &valid {
        parse_presentation(source).map_err(|e| format!("{name}: {e}"))?;
    }
    for (name, source) in &invalid {
        let e = match parse_presentation(source) {
            Ok(_) => return Err(format!("{name} was accepted")),
            Err(e) => e,
        };
        let line = source.lines().nth(e.line.wrapping_sub(1));
        ensure(line.is_some_and(|l| e.column >= 1 && e.column <= l.chars().count() + 1), || {
            format!("{name}: position {}:{} is outside the source", e.line, e.column)
        })?;
    }
    for (profile, hand) in [(Profile::Example, example_algebra()), (Profile::General, general_algebra())] {
        let parsed = profile.presentation().algebra();
        let gens = hand.window_generators(4);
        for &x in &gens {
            for &y in &gens {
                let (p, h) = (parsed.bracket_gen(x, y), hand.bracket_gen(x, y));
                ensure(p.is_ok() && p == h, || format!("{profile:?}: [{x}, {y}] differs"))?;
            }
            let g = Element::generator(x);
            ensure(parsed.coproduct(&g).ok() == hand.coproduct(&g).ok(), || format!("{profile:?}: coproduct of {x} differs"))?;
        }
    }
    Ok(format!("{} valid, {} invalid, built-in tables identical", valid.len(), invalid.len()))
}

fn confluence() -> Outcome {
    let alg = example_algebra();
    let oracle = Oracle::example(q(1), q(0), q(0));
    let mut rng = StdRng::seed_from_u64(11);
    for case in 0..500 {
        let len = rng.gen_range(0..=4);
        let word: Vec<Generator> = (0..len)
            .map(|_| match rng.gen_range(0..3) {
                0 => Generator::Ham,
                1 => Generator::a(rng.gen_range(-3..=3)),
                _ => Generator::b(rng.gen_range(-3..=3)),
            })
            .collect();
        let canonical = alg.normal_order(&word).map_err(|e| e.to_string())?;
        let mut schedule = StdRng::seed_from_u64(case);
        let shuffled = alg
            .normal_order_with(&word, |candidates| schedule.gen_range(0..candidates.len()))
            .map_err(|e| e.to_string())?;
        ensure(shuffled == canonical, || format!("word {word:?}: {shuffled} != {canonical}"))?;
        let letters = word.iter().map(|&g| common::from_generator(g)).collect();
        ensure(from_element(&canonical) == oracle.normal_order(letters, q(1)), || {
            format!("word {word:?} disagrees with the reference expansion")
        })?;
    }
    Ok("500 words".into())
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: [Criterion; 11] = [
        (1, "bracket fixtures", secs(1), pair_brackets),
        (2, "jacobi M=4", secs(60), jacobi),
        (3, "bialgebra M=4", secs(120), bialgebra),
        (4, "casimir |n|<=6", secs(1), casimir),
        (5, "central recurrence M=6", secs(1), central),
        (6, "gamma M=N=3", secs(1), gamma),
        (7, "f, g, epsilon", secs(1), fg_epsilon),
        (8, "end-to-end derived presentation", None, end_to_end),
        (9, "noncentral residual", secs(1), residual_oracle),
        (10, "parser corpus", None, corpus),
        (11, "confluence", None, confluence),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} ({} ms)", elapsed.as_millis()),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {why} ({} ms)", elapsed.as_millis());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
