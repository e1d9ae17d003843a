//! Tensor powers of the algebra, coproducts, the counit and brackets against
//! the Casimir family `Ω = Σ_m a_m ⊗ a_{-m} + a_0 ⊗ H + H ⊗ a_0`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::algebra::{Algebra, Element, Generator, Kind, Monomial};
use crate::error::{KernelError, Result};
use crate::rational::{join_signed, scaled_body, Q};

/// Finite sum of `m_1 ⊗ ... ⊗ m_N` with nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tensor<const N: usize> {
    terms: BTreeMap<[Monomial; N], Q>,
}

/// Elements of `U ⊗ U`.
pub type TensorElement = Tensor<2>;

impl<const N: usize> Default for Tensor<N> {
    fn default() -> Self {
        Tensor { terms: BTreeMap::new() }
    }
}

impl<const N: usize> Tensor<N> {
    pub fn zero() -> Self {
        Tensor::default()
    }

    pub fn one() -> Self {
        Tensor::pure(std::array::from_fn(|_| Monomial::unit()), Q::one())
    }

    pub fn pure(slots: [Monomial; N], coefficient: Q) -> Self {
        let mut t = Tensor::zero();
        t.add_term(slots, coefficient);
        t
    }

    /// `x_1 ⊗ ... ⊗ x_N`.
    pub fn outer(factors: [&Element; N]) -> Self {
        let mut out = Tensor::pure(std::array::from_fn(|_| Monomial::unit()), Q::one());
        for (slot, factor) in factors.iter().enumerate() {
            let mut next = Tensor::zero();
            for (key, c) in &out.terms {
                for (m, d) in factor.terms() {
                    let mut key = key.clone();
                    key[slot] = m.clone();
                    next.add_term(key, c * d);
                }
            }
            out = next;
        }
        out
    }

    pub fn add_term(&mut self, slots: [Monomial; N], coefficient: Q) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(slots.clone()).or_insert_with(Q::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&slots);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Monomial; N], &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, slots: &[Monomial; N]) -> Q {
        self.terms.get(slots).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, factor: &Q) -> Self {
        let mut out = Tensor::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * factor);
        }
        out
    }
}

impl<const N: usize> fmt::Display for Tensor<N> {
    /// Terms sorted by (grade of the first slot, first word, remaining words).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| (a[0].grade(), *a).cmp(&(b[0].grade(), *b)));
        let text = join_signed(terms.into_iter().map(|(slots, c)| {
            let head = if slots[0].is_unit() { String::new() } else { slots[0].to_string() };
            let mut body = if head.is_empty() && c.abs().is_one() {
                "1".to_string()
            } else {
                scaled_body(&c.abs(), &head)
            };
            for slot in &slots[1..] {
                body.push_str(" (x) ");
                body.push_str(&slot.to_string());
            }
            (c.is_negative(), body)
        }));
        f.write_str(&text)
    }
}

impl<const N: usize> Add for &Tensor<N> {
    type Output = Tensor<N>;
    fn add(self, rhs: &Tensor<N>) -> Tensor<N> {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl<const N: usize> Add for Tensor<N> {
    type Output = Tensor<N>;
    fn add(self, rhs: Tensor<N>) -> Tensor<N> {
        &self + &rhs
    }
}

impl<const N: usize> Sub for &Tensor<N> {
    type Output = Tensor<N>;
    fn sub(self, rhs: &Tensor<N>) -> Tensor<N> {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }
}

impl<const N: usize> Sub for Tensor<N> {
    type Output = Tensor<N>;
    fn sub(self, rhs: Tensor<N>) -> Tensor<N> {
        &self - &rhs
    }
}

impl<const N: usize> Neg for &Tensor<N> {
    type Output = Tensor<N>;
    fn neg(self) -> Tensor<N> {
        self.scale(&-Q::one())
    }
}

impl<const N: usize> Neg for Tensor<N> {
    type Output = Tensor<N>;
    fn neg(self) -> Tensor<N> {
        -&self
    }
}

/// Coefficient of the empty word: 1 on the unit, 0 on every generator.
pub fn counit(x: &Element) -> Q {
    x.coefficient(&Monomial::unit())
}

impl Algebra {
    /// Slot-wise product `(x ⊗ y)(u ⊗ v) = xu ⊗ yv`.
    pub fn tensor_mul<const N: usize>(&self, x: &Tensor<N>, y: &Tensor<N>) -> Result<Tensor<N>> {
        let mut out = Tensor::zero();
        for (kx, cx) in x.terms() {
            for (ky, cy) in y.terms() {
                let mut slots = Vec::with_capacity(N);
                for i in 0..N {
                    slots.push(self.multiply_monomials(&kx[i], &ky[i])?);
                }
                let refs: [&Element; N] = std::array::from_fn(|i| &slots[i]);
                let product = Tensor::outer(refs);
                let factor = cx * cy;
                for (k, c) in product.terms() {
                    out.add_term(k.clone(), c * &factor);
                }
            }
        }
        Ok(out)
    }

    pub fn tensor_commutator<const N: usize>(&self, x: &Tensor<N>, y: &Tensor<N>) -> Result<Tensor<N>> {
        Ok(&self.tensor_mul(x, y)? - &self.tensor_mul(y, x)?)
    }

    /// `Δ₀(g) = g ⊗ 1 + 1 ⊗ g`.
    pub fn primitive_coproduct(g: Generator) -> TensorElement {
        let x = Element::generator(g);
        let one = Element::one();
        &Tensor::outer([&x, &one]) + &Tensor::outer([&one, &x])
    }

    /// Declared tail of `Δ(g)`, i.e. `Δ(g) - Δ₀(g)`.
    pub fn coproduct_tail(&self, g: Generator) -> Result<TensorElement> {
        let Some(tail) = self.cotails().get(&g.kind()) else {
            return Ok(Tensor::zero());
        };
        let mut out = Tensor::zero();
        for (c, words) in tail.instantiate(&[g.mode().unwrap_or(0), 0], self.params())? {
            let left = self.normal_order(&words[0])?;
            let right = self.normal_order(&words[1])?;
            out = &out + &Tensor::outer([&left, &right]).scale(&c);
        }
        Ok(out)
    }

    pub fn coproduct_generator(&self, g: Generator) -> Result<TensorElement> {
        Ok(&Algebra::primitive_coproduct(g) + &self.coproduct_tail(g)?)
    }

    /// Coproduct of a PBW word, as the product of the letters' coproducts.
    pub fn coproduct_monomial(&self, m: &Monomial) -> Result<TensorElement> {
        let mut out = Tensor::one();
        for &g in m.letters() {
            out = self.tensor_mul(&out, &self.coproduct_generator(g)?)?;
        }
        Ok(out)
    }

    /// Algebra map extending `Δ(a_m) = a_m ⊗ 1 + 1 ⊗ a_m`, `Δ(H)` likewise,
    /// and `Δ(b_m) = b_m ⊗ 1 + 1 ⊗ b_m + tail`.
    pub fn coproduct(&self, x: &Element) -> Result<TensorElement> {
        let mut out = Tensor::zero();
        for (m, c) in x.terms() {
            out = &out + &self.coproduct_monomial(m)?.scale(c);
        }
        Ok(out)
    }

    /// `Δ'(x) = Δ(x) - x ⊗ 1 - 1 ⊗ x`.
    pub fn delta_prime(&self, x: &Element) -> Result<TensorElement> {
        let one = Element::one();
        Ok(&(&self.coproduct(x)? - &Tensor::outer([x, &one])) - &Tensor::outer([&one, x]))
    }

    /// `(Δ ⊗ id)(t)`.
    pub fn coproduct_left(&self, t: &TensorElement) -> Result<Tensor<3>> {
        let mut out = Tensor::zero();
        for ([left, right], c) in t.terms() {
            for ([l1, l2], d) in self.coproduct_monomial(left)?.terms() {
                out.add_term([l1.clone(), l2.clone(), right.clone()], c * d);
            }
        }
        Ok(out)
    }

    /// `(id ⊗ Δ)(t)`.
    pub fn coproduct_right(&self, t: &TensorElement) -> Result<Tensor<3>> {
        let mut out = Tensor::zero();
        for ([left, right], c) in t.terms() {
            for ([r1, r2], d) in self.coproduct_monomial(right)?.terms() {
                out.add_term([left.clone(), r1.clone(), r2.clone()], c * d);
            }
        }
        Ok(out)
    }
}

/// `(ε ⊗ id)(t)`.
pub fn counit_left(t: &TensorElement) -> Element {
    let mut out = Element::zero();
    for ([left, right], c) in t.terms() {
        if left.is_unit() {
            out.add_term(right.clone(), c.clone());
        }
    }
    out
}

/// `(id ⊗ ε)(t)`.
pub fn counit_right(t: &TensorElement) -> Element {
    let mut out = Element::zero();
    for ([left, right], c) in t.terms() {
        if right.is_unit() {
            out.add_term(left.clone(), c.clone());
        }
    }
    out
}

fn osc(m: i64) -> Element {
    Element::generator(Generator::a(m))
}

/// The part of Ω made of the mode group `{k, -k}`: `a_k ⊗ a_{-k} + a_{-k} ⊗ a_k`
/// (a single term for k = 0).
pub fn casimir_mode_group(k: u32) -> TensorElement {
    let k = i64::from(k);
    let mut out = Tensor::outer([&osc(k), &osc(-k)]);
    if k != 0 {
        out = &out + &Tensor::outer([&osc(-k), &osc(k)]);
    }
    out
}

/// The `a_0 ⊗ H + H ⊗ a_0` part of Ω.
pub fn casimir_hamiltonian_group() -> TensorElement {
    let h = Element::generator(Generator::Ham);
    &Tensor::outer([&osc(0), &h]) + &Tensor::outer([&h, &osc(0)])
}

/// `[Ω, x ⊗ 1]` for `x` in the span of the oscillators `a_m`.
///
/// Ω is an infinite sum; it is swept group by group up to one mode past the
/// largest mode of `x`, and the outermost groups must contribute nothing.
/// Any other input (H, b_m, products, scalars) has an infinite tail.
pub fn casimir_bracket(alg: &Algebra, x: &Element) -> Result<TensorElement> {
    let mut reach: u32 = 0;
    for (m, _) in x.terms() {
        match m.letters() {
            [Generator::OscA(mode)] => {
                reach = reach.max(u32::try_from(mode.unsigned_abs()).map_err(|_| KernelError::ModeOverflow)?)
            }
            _ => return Err(KernelError::InfiniteTail(x.to_string())),
        }
    }
    if x.is_zero() {
        return Ok(Tensor::zero());
    }
    let x_left = Tensor::outer([x, &Element::one()]);
    let mut out = alg.tensor_commutator(&casimir_hamiltonian_group(), &x_left)?;
    for k in 0..=reach + 1 {
        let contribution = alg.tensor_commutator(&casimir_mode_group(k), &x_left)?;
        if k == reach + 1 && !contribution.is_zero() {
            return Err(KernelError::InfiniteTail(x.to_string()));
        }
        out = &out + &contribution;
    }
    Ok(out)
}

/// Per-generator outcome of [`casimir_invariance_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CasimirInvariance {
    pub generator: Generator,
    /// Nonzero group contributions `[group, Δ₀(X)]`, labelled `"k"` or `"H"`.
    pub groups: Vec<(String, TensorElement)>,
    /// Sum of all group contributions.
    pub residual: TensorElement,
    pub pass: bool,
}

/// Checks `[Ω, Δ₀(X)] = 0` for `X ∈ {a_n : |n| <= window} ∪ {H}` by summing
/// the contributions of the mode groups `{k, -k}` (k up to `window + 1`) and
/// of the `a_0 ⊗ H + H ⊗ a_0` group. The outermost group must contribute
/// nothing on its own.
pub fn casimir_invariance_check(alg: &Algebra, window: u32) -> Result<Vec<CasimirInvariance>> {
    let w = i64::from(window);
    let mut generators: Vec<Generator> = Vec::new();
    if alg.families().contains(&Kind::Ham) {
        generators.push(Generator::Ham);
    }
    generators.extend((-w..=w).map(Generator::a));
    let mut out = Vec::with_capacity(generators.len());
    for g in generators {
        let delta0 = Algebra::primitive_coproduct(g);
        let mut groups = Vec::new();
        let mut residual = Tensor::zero();
        let mut boundary_clean = true;
        for k in 0..=window + 1 {
            let c = alg.tensor_commutator(&casimir_mode_group(k), &delta0)?;
            if k == window + 1 && !c.is_zero() {
                boundary_clean = false;
            }
            residual = &residual + &c;
            if !c.is_zero() {
                groups.push((k.to_string(), c));
            }
        }
        let c = alg.tensor_commutator(&casimir_hamiltonian_group(), &delta0)?;
        residual = &residual + &c;
        if !c.is_zero() {
            groups.push(("H".to_string(), c));
        }
        let pass = residual.is_zero() && boundary_clean;
        out.push(CasimirInvariance { generator: g, groups, residual, pass });
    }
    Ok(out)
}
