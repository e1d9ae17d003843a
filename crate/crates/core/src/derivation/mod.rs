//! Exact reproduction of the structure-constant derivations.
//!
//! Each solver builds a rational linear system, solves it with
//! [`linalg::RationalMatrix`], and then independently re-checks the result
//! against the expected closed forms. Any mismatch is recorded as a
//! [`Counterexample`] in the result instead of aborting, so a report always
//! shows what was computed.

pub mod linalg;

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::algebra::{Element, Generator, Monomial};
use crate::checks::{CheckReport, Counterexample};
use crate::rational::{format_q, frac, q, Q};
use crate::tensor::{Tensor, TensorElement};
use linalg::{format_vector, RationalMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("window too small for {what}: need at least {min}, got {got}")]
    WindowTooSmall { what: &'static str, min: u32, got: u32 },
    #[error("target is not a rational multiple of A = a[0] (x) a[0]^2 + a[0]^2 (x) a[0]: {0}")]
    NotProportionalToA(String),
    #[error("no polynomial in a[0] of degree <= {0} has the requested image")]
    NoSolution(u32),
}

fn require(what: &'static str, min: u32, got: u32) -> Result<(), DerivationError> {
    if got < min {
        Err(DerivationError::WindowTooSmall { what, min, got })
    } else {
        Ok(())
    }
}

fn violation(name: &str, detail: impl Into<String>) -> Counterexample {
    Counterexample { inputs: vec![name.to_string()], residual: detail.into() }
}

fn i(n: i64) -> Q {
    q(n)
}

fn is_zero_vector(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

// ---------------------------------------------------------------------------
// γ structure equation

/// Nullspace of `l γ_{mn} - m γ_{ln} = 0` over `|l|, |m| <= M`, `|n| <= N`.
#[derive(Clone, Debug)]
pub struct GammaSolution {
    pub m_window: u32,
    pub n_window: u32,
    pub equations: usize,
    /// Unknowns in order `γ_{mn}`, m ascending then n ascending.
    pub basis: Vec<Vec<Q>>,
    pub violations: Vec<Counterexample>,
    pub elapsed: Duration,
}

impl GammaSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Index of `γ_{mn}` in the unknown vector.
    pub fn index(&self, m: i64, n: i64) -> usize {
        gamma_index(self.m_window, self.n_window, m, n)
    }

    pub fn to_report(&self) -> CheckReport {
        let basis: Vec<Vec<String>> = self.basis.iter().map(|v| format_vector(v)).collect();
        let w = i64::from(self.m_window);
        let unknowns: Vec<String> = (-w..=w)
            .flat_map(|m| {
                let nw = i64::from(self.n_window);
                (-nw..=nw).map(move |n| format!("gamma[{m},{n}]"))
            })
            .collect();
        CheckReport::new("derive-gamma", self.m_window, self.equations, self.violations.clone(), self.elapsed)
            .with_solution(json!({
                "n_window": self.n_window,
                "dimension": self.dimension(),
                "expected_dimension": 2 * self.n_window + 1,
                "unknowns": unknowns,
                "basis": basis,
            }))
    }
}

fn gamma_index(m_window: u32, n_window: u32, m: i64, n: i64) -> usize {
    let width = 2 * n_window as usize + 1;
    (m + i64::from(m_window)) as usize * width + (n + i64::from(n_window)) as usize
}

pub fn solve_gamma(m_window: u32, n_window: u32) -> Result<GammaSolution, DerivationError> {
    require("the gamma equation (l = 1 must be in range)", 1, m_window)?;
    let start = Instant::now();
    let (mw, nw) = (i64::from(m_window), i64::from(n_window));
    let cols = (2 * m_window as usize + 1) * (2 * n_window as usize + 1);
    let idx = |m, n| gamma_index(m_window, n_window, m, n);
    let mut rows = Vec::new();
    for l in -mw..=mw {
        for m in -mw..=mw {
            for n in -nw..=nw {
                let mut row = vec![Q::zero(); cols];
                row[idx(m, n)] += i(l);
                row[idx(l, n)] -= i(m);
                if !is_zero_vector(&row) {
                    rows.push(row);
                }
            }
        }
    }
    let matrix = RationalMatrix::from_rows(rows, cols);
    let basis = matrix.nullspace();
    let mut violations = Vec::new();
    let expected = 2 * n_window as usize + 1;
    if basis.len() != expected {
        violations.push(violation("dimension", format!("{} != {expected}", basis.len())));
    }
    for (k, v) in basis.iter().enumerate() {
        for n in -nw..=nw {
            if !v[idx(0, n)].is_zero() {
                violations.push(violation("gamma[0,n] = 0", format!("basis {k}, n = {n}")));
            }
            // γ_{mn} = m γ_{1n} for every m.
            let slope = &v[idx(1, n)];
            for m in -mw..=mw {
                if v[idx(m, n)] != slope * i(m) {
                    violations.push(violation("gamma[m,n] = m*gamma[n]", format!("basis {k}, m = {m}, n = {n}")));
                }
            }
        }
    }
    // The family m δ_{n,n0} lies in the nullspace and spans a space of the
    // same dimension, so the two spans coincide.
    let mut family = Vec::new();
    for n0 in -nw..=nw {
        let mut v = vec![Q::zero(); cols];
        for m in -mw..=mw {
            v[idx(m, n0)] = i(m);
        }
        if !is_zero_vector(&matrix.mul_vec(&v)) {
            violations.push(violation("m*delta(n, n0) in nullspace", format!("n0 = {n0}")));
        }
        family.push(v);
    }
    let family_rank = RationalMatrix::from_rows(family, cols).rank();
    if family_rank != basis.len() {
        violations.push(violation("span", format!("family rank {family_rank}, nullspace dimension {}", basis.len())));
    }
    Ok(GammaSolution {
        m_window,
        n_window,
        equations: matrix.rows(),
        basis,
        violations,
        elapsed: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// central-term recurrence

/// Nullspace of `(m-n) c_{m+n} - (m+2n) c_m + (2m+n) c_n = 0` with
/// `c_{-k} = -c_k`, `c_0 = 0`, unknowns `c_1..c_M`.
#[derive(Clone, Debug)]
pub struct CentralSolution {
    pub window: u32,
    /// Distinct nontrivial equation instances, each rendered like
    /// `c_3 - 4*c_2 + 5*c_1 = 0`.
    pub equations: Vec<String>,
    pub basis: Vec<Vec<Q>>,
    /// `Some("m")` or `Some("m^3")` when a basis vector is proportional to
    /// that closed form.
    pub labels: Vec<Option<String>>,
    pub violations: Vec<Counterexample>,
    pub elapsed: Duration,
}

impl CentralSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn to_report(&self) -> CheckReport {
        let basis: Vec<Vec<String>> = self.basis.iter().map(|v| format_vector(v)).collect();
        CheckReport::new("derive-central", self.window, self.equations.len(), self.violations.clone(), self.elapsed)
            .with_solution(json!({
                "dimension": self.dimension(),
                "unknowns": (1..=self.window).map(|m| format!("c_{m}")).collect::<Vec<_>>(),
                "equations": self.equations,
                "basis": basis,
                "labels": self.labels,
                "spanning_set": {
                    "m": format_vector(&power_vector(self.window, 1)),
                    "m^3": format_vector(&power_vector(self.window, 3)),
                },
            }))
    }
}

fn power_vector(window: u32, power: u32) -> Vec<Q> {
    (1..=i64::from(window)).map(|m| i(m.pow(power))).collect()
}

/// Row for one `(m, n)` instance, folding `c_{-k} = -c_k` and `c_0 = 0`.
fn central_row(window: u32, m: i64, n: i64) -> Vec<Q> {
    let mut row = vec![Q::zero(); window as usize];
    let mut put = |k: i64, coefficient: i64| {
        if k != 0 {
            let slot = k.unsigned_abs() as usize - 1;
            row[slot] += i(k.signum() * coefficient);
        }
    };
    put(m + n, m - n);
    put(m, -(m + 2 * n));
    put(n, 2 * m + n);
    row
}

/// Integer-primitive form with a positive coefficient on the highest `c_k`.
fn normalized_equation(row: &[Q]) -> Vec<Q> {
    let lead = row.iter().rev().find(|x| !x.is_zero()).expect("nonzero row").clone();
    let scaled: Vec<Q> = row.iter().map(|x| x / &lead).collect();
    let lcm = scaled.iter().fold(num_bigint::BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let lcm = Q::from_integer(lcm);
    scaled.iter().map(|x| x * &lcm).collect()
}

fn render_equation(row: &[Q]) -> String {
    let parts = row.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
        let body = format!("c_{}", k + 1);
        let text = if c.abs().is_one() { body } else { format!("{}*{body}", format_q(&c.abs())) };
        (c.is_negative(), text)
    });
    format!("{} = 0", crate::rational::join_signed(parts))
}

pub fn solve_central(window: u32) -> Result<CentralSolution, DerivationError> {
    require("the central recurrence", 3, window)?;
    let start = Instant::now();
    let w = i64::from(window);
    let mut rows = Vec::new();
    let mut equations: Vec<Vec<Q>> = Vec::new();
    for m in -w..=w {
        for n in -w..=w {
            if (m + n).abs() > w {
                continue;
            }
            let row = central_row(window, m, n);
            if is_zero_vector(&row) {
                continue;
            }
            let normalized = normalized_equation(&row);
            if !equations.contains(&normalized) {
                equations.push(normalized);
            }
            rows.push(row);
        }
    }
    let matrix = RationalMatrix::from_rows(rows, window as usize);
    let basis = matrix.nullspace();
    let mut violations = Vec::new();
    if basis.len() != 2 {
        violations.push(violation("dimension", format!("{} != 2", basis.len())));
    }
    for (k, v) in basis.iter().enumerate() {
        let image = matrix.mul_vec(v);
        if !is_zero_vector(&image) {
            violations.push(violation("re-substitution", format!("basis {k}: {:?}", format_vector(&image))));
        }
    }
    let linear = power_vector(window, 1);
    let cubic = power_vector(window, 3);
    for (name, v) in [("c_m = m", &linear), ("c_m = m^3", &cubic)] {
        if !is_zero_vector(&matrix.mul_vec(v)) {
            violations.push(violation(name, "does not satisfy every equation instance"));
        }
    }
    let span_rank = RationalMatrix::from_rows(vec![linear.clone(), cubic.clone()], window as usize).rank();
    let mut joint = basis.clone();
    joint.push(linear.clone());
    joint.push(cubic.clone());
    let joint_rank = RationalMatrix::from_rows(joint, window as usize).rank();
    if span_rank != basis.len() || joint_rank != basis.len() {
        violations.push(violation("span", format!("span{{m, m^3}} rank {span_rank}, joint rank {joint_rank}")));
    }
    let labels = basis
        .iter()
        .map(|v| {
            if linalg::proportional(v, &linear) {
                Some("m".to_string())
            } else if linalg::proportional(v, &cubic) {
                Some("m^3".to_string())
            } else {
                None
            }
        })
        .collect();
    equations.sort_by(|x, y| {
        let key = |r: &Vec<Q>| r.iter().rposition(|c| !c.is_zero());
        key(x).cmp(&key(y)).then_with(|| x.iter().rev().cmp(y.iter().rev()))
    });
    Ok(CentralSolution {
        window,
        equations: equations.iter().map(|r| render_equation(r)).collect(),
        basis,
        labels,
        violations,
        elapsed: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// F, G and ε_m²

/// Solution of `m³ f + m g + m³ e_m = 0` for `m = 1..M`, with `e_m = ε_m²`.
#[derive(Clone, Debug)]
pub struct FGEpsilonResult {
    pub window: u32,
    pub f: Q,
    pub g: Q,
    /// `e[k]` is `e_{k+1}`.
    pub e: Vec<Q>,
    pub alpha: Q,
    pub beta: Q,
    pub f_poly: Element,
    pub g_poly: Element,
    /// `(m, printed-sum value, printed minus solved)` for `m = 1..M`.
    pub printed_sum: Vec<(u32, Q, Q)>,
    pub violations: Vec<Counterexample>,
    pub elapsed: Duration,
}

impl FGEpsilonResult {
    pub fn e(&self, m: u32) -> &Q {
        &self.e[m as usize - 1]
    }

    pub fn to_report(&self) -> CheckReport {
        let printed: Vec<serde_json::Value> = self
            .printed_sum
            .iter()
            .map(|(m, value, residual)| json!({"m": m, "value": format_q(value), "residual": format_q(residual)}))
            .collect();
        CheckReport::new("derive-fg-epsilon", self.window, self.window as usize, self.violations.clone(), self.elapsed)
            .with_solution(json!({
                "f": format_q(&self.f),
                "g": format_q(&self.g),
                "e": format_vector(&self.e),
                "alpha": format_q(&self.alpha),
                "beta": format_q(&self.beta),
                "F": self.f_poly.to_string(),
                "G": self.g_poly.to_string(),
                "printed_sum": printed,
            }))
    }
}

/// `α a_0 + (c/3) a_0³`.
pub fn cubic_in_a0(linear: &Q, cubic_over_three: &Q) -> Element {
    &Element::central_power(1, linear.clone()) + &Element::central_power(3, cubic_over_three / q(3))
}

/// `e_1 + Σ_{r=1}^m (2r-1)/(3r²) (e_2 - e_1)`.
pub fn printed_epsilon_sum(e1: &Q, e2: &Q, m: u32) -> Q {
    let sum: Q = (1..=i64::from(m)).map(|r| frac(2 * r - 1, 3 * r * r)).sum();
    e1 + sum * (e2 - e1)
}

/// `e_1 + (4/3)(1 - 1/m²)(e_2 - e_1)`.
pub fn closed_form_epsilon(e1: &Q, e2: &Q, m: u32) -> Q {
    let m = i64::from(m);
    e1 + frac(4, 3) * (Q::one() - frac(1, m * m)) * (e2 - e1)
}

pub fn derive_fg_epsilon(e1: Q, e2: Q, window: u32, alpha: Q, beta: Q) -> Result<FGEpsilonResult, DerivationError> {
    require("the F, G, epsilon solve", 2, window)?;
    let start = Instant::now();
    let size = window as usize;
    // Unknowns: f, g, e_3, ..., e_M.
    let mut rows = Vec::with_capacity(size);
    let mut rhs = Vec::with_capacity(size);
    for m in 1..=i64::from(window) {
        let mut row = vec![Q::zero(); size];
        row[0] = i(m.pow(3));
        row[1] = i(m);
        match m {
            1 => rhs.push(-&e1),
            2 => rhs.push(-(&e2 * i(8))),
            _ => {
                row[m as usize - 1] = i(m.pow(3));
                rhs.push(Q::zero());
            }
        }
        rows.push(row);
    }
    let matrix = RationalMatrix::from_rows(rows, size);
    let (x, kernel) = matrix.solve(&rhs).expect("triangular system is consistent");
    debug_assert!(kernel.is_empty());
    let mut violations = Vec::new();
    if !kernel.is_empty() {
        violations.push(violation("uniqueness", format!("kernel dimension {}", kernel.len())));
    }
    let f = x[0].clone();
    let g = x[1].clone();
    let mut e = vec![e1.clone(), e2.clone()];
    e.extend(x[2..].iter().cloned());

    let expected_f = (&e1 - &e2 * q(4)) / q(3);
    let expected_g = frac(4, 3) * (&e2 - &e1);
    if f != expected_f {
        violations.push(violation("f = (e1 - 4*e2)/3", format!("{} != {}", format_q(&f), format_q(&expected_f))));
    }
    if g != expected_g {
        violations.push(violation("g = 4/3*(e2 - e1)", format!("{} != {}", format_q(&g), format_q(&expected_g))));
    }
    let mut printed_sum = Vec::with_capacity(size);
    for m in 1..=window {
        let mi = i64::from(m);
        let em = &e[m as usize - 1];
        let lhs = i(mi.pow(3)) * &f + i(mi) * &g + i(mi.pow(3)) * em;
        if !lhs.is_zero() {
            violations.push(violation("re-substitution", format!("m = {m}: {}", format_q(&lhs))));
        }
        let closed = closed_form_epsilon(&e1, &e2, m);
        if *em != closed {
            violations.push(violation(
                "e_m = e1 + 4/3*(1 - 1/m^2)*(e2 - e1)",
                format!("m = {m}: {} != {}", format_q(em), format_q(&closed)),
            ));
        }
        let printed = printed_epsilon_sum(&e1, &e2, m);
        let residual = &printed - em;
        printed_sum.push((m, printed, residual));
    }
    let f_poly = cubic_in_a0(&alpha, &f);
    let g_poly = cubic_in_a0(&beta, &g);
    Ok(FGEpsilonResult {
        window,
        f,
        g,
        e,
        alpha,
        beta,
        f_poly,
        g_poly,
        printed_sum,
        violations,
        elapsed: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// inverting Δ′ on polynomials in a_0

/// `A = a_0 ⊗ a_0² + a_0² ⊗ a_0`.
pub fn tensor_a() -> TensorElement {
    let mut out = Tensor::zero();
    out.add_term([a0_power(1), a0_power(2)], Q::one());
    out.add_term([a0_power(2), a0_power(1)], Q::one());
    out
}

fn a0_power(k: u32) -> Monomial {
    Monomial::commuting(vec![Generator::a(0); k as usize])
}

/// Exponent `k` if `m` is `a_0^k`.
fn a0_exponent(m: &Monomial) -> Option<u32> {
    m.letters().iter().all(|&g| g == Generator::a(0)).then(|| m.len() as u32)
}

/// The rational `c` with `target = c A`, if any.
pub fn multiple_of_a(target: &TensorElement) -> Option<Q> {
    let c = target.coefficient(&[a0_power(1), a0_power(2)]);
    (*target == tensor_a().scale(&c)).then_some(c)
}

#[derive(Clone, Debug)]
pub struct DeltaPrimeSolution {
    pub target_multiple: Q,
    pub degree: u32,
    /// Coefficients `p_0..p_D` of the particular solution (free ones zero).
    pub coefficients: Vec<Q>,
    pub particular: Element,
    pub kernel: Vec<Element>,
    pub violations: Vec<Counterexample>,
    pub elapsed: Duration,
}

impl DeltaPrimeSolution {
    pub fn to_report(&self) -> CheckReport {
        let kernel: Vec<String> = self.kernel.iter().map(ToString::to_string).collect();
        CheckReport::new("derive-delta-prime", self.degree, self.degree as usize + 1, self.violations.clone(), self.elapsed)
            .with_solution(json!({
                "target": format!("{}*A", format_q(&self.target_multiple)),
                "coefficients": format_vector(&self.coefficients),
                "particular": self.particular.to_string(),
                "kernel": kernel,
            }))
    }
}

fn binomial(n: u32, k: u32) -> Q {
    let mut out = Q::one();
    for j in 0..k {
        out = out * q(i64::from(n - j)) / q(i64::from(j + 1));
    }
    out
}

/// `Δ'(a_0^r)` as a map `(k, r-k) -> coefficient`, from the binomial
/// expansion of `(a_0 ⊗ 1 + 1 ⊗ a_0)^r` minus the two primitive parts.
fn delta_prime_power(r: u32) -> Vec<((u32, u32), Q)> {
    if r == 0 {
        return vec![((0, 0), -Q::one())];
    }
    let mut out: Vec<((u32, u32), Q)> = (0..=r).map(|k| ((k, r - k), binomial(r, k))).collect();
    for (key, c) in out.iter_mut() {
        if *key == (r, 0) || *key == (0, r) {
            *c -= Q::one();
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Solves `Δ'(P) = target` over `P = Σ_{r<=D} p_r a_0^r`.
pub fn solve_delta_prime(target: &TensorElement, degree: u32) -> Result<DeltaPrimeSolution, DerivationError> {
    require("inverting delta prime", 3, degree)?;
    let start = Instant::now();
    let c = multiple_of_a(target).ok_or_else(|| DerivationError::NotProportionalToA(target.to_string()))?;
    // One equation per basis tensor a_0^k ⊗ a_0^j with k + j <= D.
    let mut keys = Vec::new();
    for total in 0..=degree {
        for k in 0..=total {
            keys.push((k, total - k));
        }
    }
    let cols = degree as usize + 1;
    let mut rows = vec![vec![Q::zero(); cols]; keys.len()];
    for r in 0..=degree {
        for (key, coefficient) in delta_prime_power(r) {
            let row = keys.iter().position(|k| *k == key).expect("key within degree");
            rows[row][r as usize] += coefficient;
        }
    }
    let rhs: Vec<Q> = keys
        .iter()
        .map(|&(k, j)| target.coefficient(&[a0_power(k), a0_power(j)]))
        .collect();
    for (slots, _) in target.terms() {
        let inside = match (a0_exponent(&slots[0]), a0_exponent(&slots[1])) {
            (Some(k), Some(j)) => k + j <= degree,
            _ => false,
        };
        if !inside {
            return Err(DerivationError::NoSolution(degree));
        }
    }
    let matrix = RationalMatrix::from_rows(rows, cols);
    let (coefficients, kernel_vectors) = matrix.solve(&rhs).ok_or(DerivationError::NoSolution(degree))?;
    let to_element = |v: &[Q]| {
        v.iter()
            .enumerate()
            .fold(Element::zero(), |acc, (r, p)| &acc + &Element::central_power(r, p.clone()))
    };
    let particular = to_element(&coefficients);
    let kernel: Vec<Element> = kernel_vectors.iter().map(|v| to_element(v)).collect();
    let mut violations = Vec::new();
    let expected = Element::central_power(3, &c / q(3));
    if particular != expected {
        violations.push(violation("P = c/3*a[0]^3", format!("{particular} != {expected}")));
    }
    let a0 = Element::generator(Generator::a(0));
    if kernel.len() != 1 || kernel[0].scale(&kernel[0].coefficient(&a0_power(1)).recip()) != a0 {
        let rendered: Vec<String> = kernel.iter().map(ToString::to_string).collect();
        violations.push(violation("kernel = span{a[0]}", format!("[{}]", rendered.join(", "))));
    }
    Ok(DeltaPrimeSolution {
        target_multiple: c,
        degree,
        coefficients,
        particular,
        kernel,
        violations,
        elapsed: start.elapsed(),
    })
}
