//! Window-swept verification suites with structured reports.
//!
//! Every check enumerates generators from `{H} ∪ {a[m], b[m] : |m| <= M}`
//! (restricted to the families the algebra declares), evaluates an exact
//! residual for each unordered tuple and records the nonzero ones. Tuples are
//! independent and evaluated in parallel; results are merged in tuple order.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, Element, Generator};
use crate::error::Result;
use crate::tensor::{
    casimir_bracket, casimir_invariance_check, counit_left, counit_right, Tensor, TensorElement,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub inputs: Vec<String>,
    pub residual: String,
}

/// Outcome of one suite. `status` is `Pass` iff `counterexamples` is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub window: u32,
    pub status: Status,
    /// Number of tuples (or assertions) evaluated.
    pub cases: usize,
    pub counterexamples: Vec<Counterexample>,
    /// Structured payload for derivation reports.
    pub solution: Option<serde_json::Value>,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct Envelope<'a> {
    check: &'a str,
    window: u32,
    status: Status,
    cases: usize,
    counterexamples: &'a [Counterexample],
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<&'a serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

impl CheckReport {
    pub fn new(
        check: impl Into<String>,
        window: u32,
        cases: usize,
        counterexamples: Vec<Counterexample>,
        elapsed: Duration,
    ) -> Self {
        let status = if counterexamples.is_empty() { Status::Pass } else { Status::Fail };
        CheckReport { check: check.into(), window, status, cases, counterexamples, solution: None, elapsed }
    }

    pub fn with_solution(mut self, solution: serde_json::Value) -> Self {
        self.solution = Some(solution);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn envelope(&self, timing: bool) -> Envelope<'_> {
        Envelope {
            check: &self.check,
            window: self.window,
            status: self.status,
            cases: self.cases,
            counterexamples: &self.counterexamples,
            solution: self.solution.as_ref(),
            elapsed_ms: timing.then_some(self.elapsed.as_millis()),
        }
    }

    pub fn to_json_value(&self, timing: bool) -> serde_json::Value {
        serde_json::to_value(self.envelope(timing)).expect("report serializes")
    }

    /// Pretty JSON with keys in envelope order.
    pub fn to_json(&self, timing: bool) -> String {
        serde_json::to_string_pretty(&self.envelope(timing)).expect("report serializes")
    }

    pub fn to_text(&self, timing: bool) -> String {
        let mut out = format!(
            "check: {}\nwindow: {}\nstatus: {}\ncases: {}\n",
            self.check, self.window, self.status, self.cases
        );
        if self.counterexamples.is_empty() {
            out.push_str("counterexamples: none\n");
        } else {
            out.push_str(&format!("counterexamples: {}\n", self.counterexamples.len()));
            for c in &self.counterexamples {
                out.push_str(&format!("  ({}) -> {}\n", c.inputs.join(", "), c.residual));
            }
        }
        if let Some(solution) = &self.solution {
            out.push_str("solution:\n");
            let pretty = serde_json::to_string_pretty(solution).expect("solution serializes");
            for line in pretty.lines() {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
        if timing {
            out.push_str(&format!("elapsed: {} ms\n", self.elapsed.as_millis()));
        }
        out
    }
}

fn window_i64(window: u32) -> i64 {
    i64::from(window)
}

/// `[[x,y],z] + [[y,z],x] + [[z,x],y]`.
pub fn jacobi_residual(alg: &Algebra, x: Generator, y: Generator, z: Generator) -> Result<Element> {
    let ez = Element::generator(z);
    let ex = Element::generator(x);
    let ey = Element::generator(y);
    let t1 = alg.commutator(&alg.bracket_gen(x, y)?, &ez)?;
    let t2 = alg.commutator(&alg.bracket_gen(y, z)?, &ex)?;
    let t3 = alg.commutator(&alg.bracket_gen(z, x)?, &ey)?;
    Ok(&(&t1 + &t2) + &t3)
}

/// Jacobi identity on every unordered triple (with repetition) of window
/// generators.
pub fn check_jacobi(alg: &Algebra, window: u32) -> Result<CheckReport> {
    let start = Instant::now();
    let gens = alg.window_generators(window_i64(window));
    let n = gens.len();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                triples.push((i, j, k));
            }
        }
    }
    let results: Vec<Option<Counterexample>> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            let residual = jacobi_residual(alg, gens[i], gens[j], gens[k])?;
            Ok((!residual.is_zero()).then(|| Counterexample {
                inputs: vec![gens[i].to_string(), gens[j].to_string(), gens[k].to_string()],
                residual: residual.to_string(),
            }))
        })
        .collect::<Result<_>>()?;
    let failures = results.into_iter().flatten().collect();
    Ok(CheckReport::new("jacobi", window, triples.len(), failures, start.elapsed()))
}

/// `[Δ(x), Δ(y)] - Δ([x, y])`. Zero for every pair exactly when the
/// coproduct respects the bracket.
pub fn homomorphism_residual(alg: &Algebra, x: Generator, y: Generator) -> Result<TensorElement> {
    let dx = alg.coproduct_generator(x)?;
    let dy = alg.coproduct_generator(y)?;
    let lhs = alg.tensor_commutator(&dx, &dy)?;
    let rhs = alg.coproduct(&alg.bracket_gen(x, y)?)?;
    Ok(&lhs - &rhs)
}

/// `(Δ ⊗ id)Δ(g) - (id ⊗ Δ)Δ(g)`.
pub fn coassociativity_residual(alg: &Algebra, x: &Element) -> Result<Tensor<3>> {
    let d = alg.coproduct(x)?;
    Ok(&alg.coproduct_left(&d)? - &alg.coproduct_right(&d)?)
}

/// `((ε ⊗ id)Δ(x) - x, (id ⊗ ε)Δ(x) - x)`.
pub fn counit_residuals(alg: &Algebra, x: &Element) -> Result<(Element, Element)> {
    let d = alg.coproduct(x)?;
    Ok((&counit_left(&d) - x, &counit_right(&d) - x))
}

/// Homomorphism residual on every unordered pair of distinct window
/// generators, plus coassociativity and both counit axioms on every window
/// generator.
pub fn check_bialgebra(alg: &Algebra, window: u32) -> Result<CheckReport> {
    let start = Instant::now();
    let gens = alg.window_generators(window_i64(window));
    let n = gens.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pair_results: Vec<Option<Counterexample>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let residual = homomorphism_residual(alg, gens[i], gens[j])?;
            Ok((!residual.is_zero()).then(|| Counterexample {
                inputs: vec!["homomorphism".into(), gens[i].to_string(), gens[j].to_string()],
                residual: residual.to_string(),
            }))
        })
        .collect::<Result<_>>()?;
    let single_results: Vec<Vec<Counterexample>> = gens
        .par_iter()
        .map(|&g| {
            let x = Element::generator(g);
            let mut found = Vec::new();
            let coassoc = coassociativity_residual(alg, &x)?;
            if !coassoc.is_zero() {
                found.push(Counterexample {
                    inputs: vec!["coassociativity".into(), g.to_string()],
                    residual: coassoc.to_string(),
                });
            }
            let (left, right) = counit_residuals(alg, &x)?;
            for (side, residual) in [("counit-left", left), ("counit-right", right)] {
                if !residual.is_zero() {
                    found.push(Counterexample {
                        inputs: vec![side.into(), g.to_string()],
                        residual: residual.to_string(),
                    });
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    let mut failures: Vec<Counterexample> = pair_results.into_iter().flatten().collect();
    failures.extend(single_results.into_iter().flatten());
    let cases = pairs.len() + 3 * gens.len();
    Ok(CheckReport::new("bialgebra", window, cases, failures, start.elapsed()))
}

/// `[Ω, a_n ⊗ 1] = n (a_n ⊗ a_0 - a_0 ⊗ a_n)` for `0 < |n| <= window`, and
/// `[Ω, Δ₀(X)] = 0` for `X ∈ {a_n : |n| <= window} ∪ {H}`.
pub fn check_casimir(alg: &Algebra, window: u32) -> Result<CheckReport> {
    let start = Instant::now();
    let w = window_i64(window);
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in (-w..=w).filter(|&n| n != 0) {
        cases += 1;
        let an = Element::generator(Generator::a(n));
        let a0 = Element::generator(Generator::a(0));
        let expected = (&Tensor::outer([&an, &a0]) - &Tensor::outer([&a0, &an]))
            .scale(&crate::rational::q(n));
        let got = casimir_bracket(alg, &an)?;
        let residual = &got - &expected;
        if !residual.is_zero() {
            failures.push(Counterexample {
                inputs: vec!["bracket".into(), an.to_string()],
                residual: residual.to_string(),
            });
        }
    }
    for result in casimir_invariance_check(alg, window)? {
        cases += 1;
        if !result.pass {
            let groups: Vec<String> =
                result.groups.iter().map(|(label, t)| format!("group {label}: {t}")).collect();
            failures.push(Counterexample {
                inputs: vec!["invariance".into(), result.generator.to_string()],
                residual: format!("{} [{}]", result.residual, groups.join("; ")),
            });
        }
    }
    Ok(CheckReport::new("casimir", window, cases, failures, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{example_algebra, general_algebra, IndexedTable, ParamValue};
    use crate::rational::q;

    #[test]
    fn jacobi_small_window() {
        let report = check_jacobi(&example_algebra(), 2).unwrap();
        assert!(report.passed(), "{}", report.to_text(false));
        assert_eq!(report.cases, 286); // 11 generators, C(13, 3)
    }

    #[test]
    fn degenerate_window_passes() {
        let alg = example_algebra();
        let report = check_bialgebra(&alg, 0).unwrap();
        assert!(report.passed());
        assert_eq!(alg.window_generators(0).len(), 3);
    }

    #[test]
    fn mode_indexed_residual() {
        let alg = general_algebra()
            .with_param(
                "eps",
                ParamValue::Indexed(IndexedTable::from_entries([(1, q(1)), (2, q(2)), (3, q(4))])),
            )
            .with_scalar("f", q(-5))
            .with_scalar("g", q(4));
        let r = homomorphism_residual(&alg, Generator::b(2), Generator::b(1)).unwrap();
        assert_eq!(r.to_string(), "5*a[0] (x) a[3] - 5*a[3] (x) a[0]");
    }

    #[test]
    fn zeroed_central_term_fails() {
        let alg = general_algebra().with_scalar("f", q(0));
        let report = check_bialgebra(&alg, 1).unwrap();
        assert!(!report.passed());
        let first = &report.counterexamples[0];
        assert_eq!(first.inputs, ["homomorphism", "b[-1]", "b[1]"]);
        assert_eq!(first.residual, "a[0] (x) a[0]^2 + a[0]^2 (x) a[0]");
    }

    #[test]
    fn reports_serialize_deterministically() {
        let alg = example_algebra();
        let a = check_casimir(&alg, 3).unwrap();
        let b = check_casimir(&alg, 3).unwrap();
        assert!(a.passed());
        assert_eq!(a.to_json(false), b.to_json(false));
        assert!(a.to_json(false).starts_with("{\n  \"check\": \"casimir\""));
        assert!(!a.to_json(false).contains("elapsed_ms"));
        assert!(a.to_json(true).contains("elapsed_ms"));
    }
}
