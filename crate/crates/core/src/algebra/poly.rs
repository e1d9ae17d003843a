//! Symbolic coefficients of bracket rules and coproduct tails: integer affine
//! forms in the mode variables and rational polynomials over mode variables
//! and named parameters.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::params::Params;
use crate::error::{KernelError, Result};
use crate::rational::{join_signed, scaled_body, Q};

/// Number of mode variables a rule pattern can bind.
pub const MODE_SLOTS: usize = 2;

const SLOT_NAMES: [&str; MODE_SLOTS] = ["m", "n"];

/// `coef[0]*m + coef[1]*n + constant` over the pattern's mode slots.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    pub coef: [i64; MODE_SLOTS],
    pub constant: i64,
}

/// How a delta condition `form = 0` behaves once normalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaForm {
    Always,
    Never,
    When(Affine),
}

impl Affine {
    pub fn constant(c: i64) -> Self {
        Affine { coef: [0; MODE_SLOTS], constant: c }
    }

    pub fn slot(slot: usize) -> Self {
        let mut coef = [0; MODE_SLOTS];
        coef[slot] = 1;
        Affine { coef, constant: 0 }
    }

    pub fn is_constant(&self) -> bool {
        self.coef.iter().all(|&c| c == 0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        self.coef[slot] != 0
    }

    pub fn checked_add(&self, other: &Affine) -> Option<Affine> {
        let mut coef = [0; MODE_SLOTS];
        for (i, c) in coef.iter_mut().enumerate() {
            *c = self.coef[i].checked_add(other.coef[i])?;
        }
        Some(Affine { coef, constant: self.constant.checked_add(other.constant)? })
    }

    pub fn checked_scale(&self, k: i64) -> Option<Affine> {
        let mut coef = [0; MODE_SLOTS];
        for (i, c) in coef.iter_mut().enumerate() {
            *c = self.coef[i].checked_mul(k)?;
        }
        Some(Affine { coef, constant: self.constant.checked_mul(k)? })
    }

    pub fn eval(&self, modes: &[i64; MODE_SLOTS]) -> Result<i64> {
        let mut acc = self.constant;
        for (c, m) in self.coef.iter().zip(modes) {
            acc = c
                .checked_mul(*m)
                .and_then(|t| acc.checked_add(t))
                .ok_or(KernelError::ModeOverflow)?;
        }
        Ok(acc)
    }

    /// Replaces slot `i` by `images[i]`.
    pub fn substitute(&self, images: &[Affine; MODE_SLOTS]) -> Option<Affine> {
        let mut out = Affine::constant(self.constant);
        for (c, image) in self.coef.iter().zip(images) {
            out = out.checked_add(&image.checked_scale(*c)?)?;
        }
        Some(out)
    }

    /// Canonical representative of the condition `self = 0`: divided by the
    /// gcd of its coefficients, first nonzero slot coefficient positive.
    pub fn delta_form(&self) -> DeltaForm {
        if self.is_constant() {
            return if self.constant == 0 { DeltaForm::Always } else { DeltaForm::Never };
        }
        let g = self
            .coef
            .iter()
            .chain(std::iter::once(&self.constant))
            .fold(0i64, |g, &c| num_integer::gcd(g, c));
        let g = if g == 0 { 1 } else { g };
        let lead = self.coef.iter().find(|&&c| c != 0).copied().unwrap_or(1);
        let sign = if lead < 0 { -1 } else { 1 };
        let coef = self.coef.map(|c| c / g * sign);
        let constant = self.constant / g * sign;
        DeltaForm::When(Affine { coef, constant })
    }

    pub(crate) fn as_rationals(&self) -> Vec<Q> {
        self.coef
            .iter()
            .chain(std::iter::once(&self.constant))
            .map(|&c| Q::from_integer(BigInt::from(c)))
            .collect()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &c) in self.coef.iter().enumerate() {
            if c != 0 {
                let body = if c.abs() == 1 {
                    SLOT_NAMES[i].to_string()
                } else {
                    format!("{}*{}", c.unsigned_abs(), SLOT_NAMES[i])
                };
                parts.push((c < 0, body));
            }
        }
        if self.constant != 0 || parts.is_empty() {
            parts.push((self.constant < 0, self.constant.unsigned_abs().to_string()));
        }
        f.write_str(&join_signed(parts))
    }
}

/// A variable of a coefficient polynomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Mode(usize),
    Param(String),
    Indexed(String, Affine),
}

impl Var {
    fn substitute(&self, images: &[Affine; MODE_SLOTS]) -> Option<Poly> {
        Some(match self {
            Var::Mode(slot) => Poly::from_affine(&images[*slot]),
            Var::Param(_) => Poly::var(self.clone()),
            Var::Indexed(name, index) => Poly::var(Var::Indexed(name.clone(), index.substitute(images)?)),
        })
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Mode(slot) => f.write_str(SLOT_NAMES[*slot]),
            Var::Param(name) => f.write_str(name),
            Var::Indexed(name, index) => write!(f, "{name}[{index}]"),
        }
    }
}

type PowerProduct = Vec<(Var, u32)>;

/// Polynomial with rational coefficients; keys are sorted power products.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<PowerProduct, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(value: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), value);
        p
    }

    pub fn int(value: i64) -> Self {
        Poly::constant(Q::from_integer(BigInt::from(value)))
    }

    pub fn var(var: Var) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![(var, 1)], Q::one());
        p
    }

    pub fn mode(slot: usize) -> Self {
        Poly::var(Var::Mode(slot))
    }

    pub fn param(name: &str) -> Self {
        Poly::var(Var::Param(name.to_string()))
    }

    pub fn from_affine(form: &Affine) -> Self {
        let mut p = Poly::int(form.constant);
        for (slot, &c) in form.coef.iter().enumerate() {
            p = &p + &Poly::mode(slot).scale(&Q::from_integer(BigInt::from(c)));
        }
        p
    }

    fn add_term(&mut self, key: PowerProduct, value: Q) {
        if value.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Q::zero);
        *slot += value;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, factor: &Q) -> Poly {
        let mut out = Poly::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * factor);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                out.add_term(merge_powers(ka, kb), va * vb);
            }
        }
        out
    }

    pub fn pow(&self, exponent: u32) -> Poly {
        (0..exponent).fold(Poly::int(1), |acc, _| acc.mul(self))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.terms.keys().flat_map(|k| k.iter().map(|(v, _)| v))
    }

    /// Integer affine form in the mode slots, if this polynomial is one.
    pub fn as_affine(&self) -> Option<Affine> {
        let mut out = Affine::default();
        for (key, value) in &self.terms {
            if !value.denom().is_one() {
                return None;
            }
            let value = value.numer().to_i64()?;
            match key.as_slice() {
                [] => out.constant = value,
                [(Var::Mode(slot), 1)] => out.coef[*slot] = value,
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn substitute_modes(&self, images: &[Affine; MODE_SLOTS]) -> Option<Poly> {
        let mut out = Poly::zero();
        for (key, value) in &self.terms {
            let mut term = Poly::constant(value.clone());
            for (var, exp) in key {
                term = term.mul(&var.substitute(images)?.pow(*exp));
            }
            out = &out + &term;
        }
        Some(out)
    }

    pub fn eval(&self, modes: &[i64; MODE_SLOTS], params: &Params) -> Result<Q> {
        let mut total = Q::zero();
        for (key, value) in &self.terms {
            let mut term = value.clone();
            for (var, exp) in key {
                let base = match var {
                    Var::Mode(slot) => Q::from_integer(BigInt::from(modes[*slot])),
                    Var::Param(name) => params.scalar(name)?,
                    Var::Indexed(name, index) => params.indexed(name, index.eval(modes)?)?,
                };
                term *= num_traits::pow::pow(base, *exp as usize);
            }
            total += term;
        }
        Ok(total)
    }
}

fn merge_powers(a: &PowerProduct, b: &PowerProduct) -> PowerProduct {
    let mut merged: BTreeMap<Var, u32> = BTreeMap::new();
    for (v, e) in a.iter().chain(b) {
        *merged.entry(v.clone()).or_insert(0) += e;
    }
    merged.into_iter().collect()
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = join_signed(self.terms.iter().map(|(key, value)| {
            let body = key
                .iter()
                .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect::<Vec<_>>()
                .join("*");
            (value.is_negative(), scaled_body(&value.abs(), &body))
        }));
        f.write_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn delta_normalization() {
        let form = Affine { coef: [-2, -2], constant: 0 };
        assert_eq!(form.delta_form(), DeltaForm::When(Affine { coef: [1, 1], constant: 0 }));
        assert_eq!(Affine::constant(0).delta_form(), DeltaForm::Always);
        assert_eq!(Affine::constant(3).delta_form(), DeltaForm::Never);
        // 2m + 1 = 0 has no integer solution but stays symbolic
        let odd = Affine { coef: [2, 0], constant: 1 };
        assert_eq!(odd.delta_form(), DeltaForm::When(odd.clone()));
    }

    #[test]
    fn affine_eval_overflow() {
        let form = Affine { coef: [1, 1], constant: 0 };
        assert_eq!(form.eval(&[i64::MAX, 1]), Err(KernelError::ModeOverflow));
        assert_eq!(form.eval(&[3, -5]), Ok(-2));
        assert_eq!(form.to_string(), "m + n");
        assert_eq!(Affine { coef: [0, -2], constant: 1 }.to_string(), "-2*n + 1");
    }

    #[test]
    fn poly_arithmetic_and_eval() {
        let m = Poly::mode(0);
        let n = Poly::mode(1);
        let diff = &m - &n;
        let cube = m.pow(3).mul(&Poly::param("eps").pow(2)).scale(&frac(-1, 3));
        assert_eq!(diff.to_string(), "m - n");
        assert_eq!(cube.to_string(), "-1/3*m^3*eps^2");
        let mut params = Params::default();
        params.set_scalar("eps", q(2));
        assert_eq!(cube.eval(&[2, 0], &params), Ok(frac(-32, 3)));
        assert_eq!(diff.as_affine(), Some(Affine { coef: [1, -1], constant: 0 }));
        assert_eq!(cube.as_affine(), None);
    }

    #[test]
    fn substitution_swaps_slots() {
        let p = Poly::mode(0).pow(2).mul(&Poly::var(Var::Indexed("eps".into(), Affine::slot(1))));
        let swapped = p.substitute_modes(&[Affine::slot(1), Affine::slot(0)]).unwrap();
        assert_eq!(swapped.to_string(), "n^2*eps[m]");
    }
}
