use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::params::{ParamValue, Params};
use super::template::{BracketTable, TemplateSum};
use super::{Element, Generator, Kind, Monomial};
use crate::error::Result;
use crate::rational::Q;

/// A concrete algebra: bracket table, coproduct tails and bound parameters.
///
/// Values are immutable; every operation returns a new canonical value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    families: BTreeSet<Kind>,
    central: BTreeSet<Generator>,
    brackets: BracketTable,
    cotails: BTreeMap<Kind, TemplateSum>,
    params: Params,
}

impl Algebra {
    pub fn new(
        families: BTreeSet<Kind>,
        central: BTreeSet<Generator>,
        brackets: BracketTable,
        cotails: BTreeMap<Kind, TemplateSum>,
        params: Params,
    ) -> Self {
        Algebra { families, central, brackets, cotails, params }
    }

    pub fn families(&self) -> &BTreeSet<Kind> {
        &self.families
    }

    pub fn central(&self) -> &BTreeSet<Generator> {
        &self.central
    }

    pub fn brackets(&self) -> &BracketTable {
        &self.brackets
    }

    pub fn cotails(&self) -> &BTreeMap<Kind, TemplateSum> {
        &self.cotails
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn with_params(&self, params: Params) -> Algebra {
        Algebra { params, ..self.clone() }
    }

    pub fn with_param(&self, name: &str, value: ParamValue) -> Algebra {
        let mut params = self.params.clone();
        params.set(name, value);
        self.with_params(params)
    }

    pub fn with_scalar(&self, name: &str, value: Q) -> Algebra {
        self.with_param(name, ParamValue::Scalar(value))
    }

    /// `{H} ∪ {a[m], b[m] : |m| <= window}` restricted to declared families,
    /// in PBW order.
    pub fn window_generators(&self, window: i64) -> Vec<Generator> {
        let mut out = Vec::new();
        for kind in Kind::ALL {
            if !self.families.contains(&kind) {
                continue;
            }
            if kind.has_mode() {
                out.extend((-window..=window).map(|m| Generator::new(kind, m)));
            } else {
                out.push(Generator::new(kind, 0));
            }
        }
        out
    }

    /// `[x, y]` for two generators, read off the bracket table.
    pub fn bracket_gen(&self, x: Generator, y: Generator) -> Result<Element> {
        if x == y {
            return Ok(Element::zero());
        }
        let (first, second, sign) = if (x.kind(), x) <= (y.kind(), y) { (x, y, 1) } else { (y, x, -1) };
        let Some(rule) = self.brackets.get(first.kind(), second.kind()) else {
            return Ok(Element::zero());
        };
        let modes = [first.mode().unwrap_or(0), second.mode().unwrap_or(0)];
        let mut out = Element::zero();
        for (coefficient, mut slots) in rule.instantiate(&modes, &self.params)? {
            let word = slots.pop().unwrap_or_default();
            let coefficient = if sign < 0 { -coefficient } else { coefficient };
            out.add_term(Monomial::commuting(word), coefficient);
        }
        Ok(out)
    }

    /// PBW normal form of the product of `word`'s letters, always swapping the
    /// leftmost out-of-order pair.
    pub fn normal_order(&self, word: &[Generator]) -> Result<Element> {
        self.normal_order_with(word, |_| 0)
    }

    /// Like [`Algebra::normal_order`], but `choose` picks which out-of-order
    /// adjacent pair to rewrite: it receives the inversion positions and
    /// returns an index into that list.
    pub fn normal_order_with<F>(&self, word: &[Generator], mut choose: F) -> Result<Element>
    where
        F: FnMut(&[usize]) -> usize,
    {
        let mut out = Element::zero();
        let mut pending: Vec<(Vec<Generator>, Q)> = vec![(word.to_vec(), Q::one())];
        while let Some((word, coefficient)) = pending.pop() {
            let inversions: Vec<usize> =
                (0..word.len().saturating_sub(1)).filter(|&i| word[i] > word[i + 1]).collect();
            if inversions.is_empty() {
                out.add_term(Monomial(word), coefficient);
                continue;
            }
            let pick = choose(&inversions).min(inversions.len() - 1);
            let i = inversions[pick];
            // x y = y x + [x, y]
            let bracket = self.bracket_gen(word[i], word[i + 1])?;
            for (m, c) in bracket.terms() {
                let mut replaced = Vec::with_capacity(word.len() - 2 + m.len());
                replaced.extend_from_slice(&word[..i]);
                replaced.extend_from_slice(m.letters());
                replaced.extend_from_slice(&word[i + 2..]);
                pending.push((replaced, &coefficient * c));
            }
            let mut swapped = word;
            swapped.swap(i, i + 1);
            pending.push((swapped, coefficient));
        }
        Ok(out)
    }

    pub fn multiply_monomials(&self, x: &Monomial, y: &Monomial) -> Result<Element> {
        if x.is_unit() {
            return Ok(Element::term(y.clone(), Q::one()));
        }
        if y.is_unit() {
            return Ok(Element::term(x.clone(), Q::one()));
        }
        let mut word = x.letters().to_vec();
        word.extend_from_slice(y.letters());
        self.normal_order(&word)
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                let product = self.multiply_monomials(mx, my)?;
                let factor = cx * cy;
                for (m, c) in product.terms() {
                    out.add_term(m.clone(), c * &factor);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, x: &Element, exponent: u32) -> Result<Element> {
        let mut out = Element::one();
        for _ in 0..exponent {
            out = self.multiply(&out, x)?;
        }
        Ok(out)
    }

    /// `xy - yx`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element> {
        if x.is_zero() || y.is_zero() {
            return Ok(Element::zero());
        }
        // Single generators go straight to the table.
        if let (Some(gx), Some(gy)) = (single_generator(x), single_generator(y)) {
            return Ok(self.bracket_gen(gx.0, gy.0)?.scale(&(gx.1 * gy.1)));
        }
        Ok(&self.multiply(x, y)? - &self.multiply(y, x)?)
    }
}

fn single_generator(x: &Element) -> Option<(Generator, Q)> {
    let mut terms = x.terms();
    let (m, c) = terms.next()?;
    if terms.next().is_some() || m.len() != 1 || c.is_zero() {
        return None;
    }
    Some((m.letters()[0], c.clone()))
}

#[cfg(test)]
mod tests {
    use super::super::example_algebra;
    use super::*;
    use crate::rational::{frac, q};

    fn g(x: Generator) -> Element {
        Element::generator(x)
    }

    #[test]
    fn bracket_examples() {
        let alg = example_algebra();
        let a = Generator::a;
        let b = Generator::b;
        assert_eq!(alg.bracket_gen(a(2), a(-2)).unwrap(), g(a(0)).scale(&q(2)));
        assert!(alg.bracket_gen(a(1), a(2)).unwrap().is_zero());
        assert_eq!(alg.bracket_gen(Generator::Ham, a(3)).unwrap(), g(a(3)).scale(&q(3)));
        assert_eq!(
            alg.bracket_gen(b(2), b(-2)).unwrap(),
            g(b(0)).scale(&q(4)) + Element::central_power(3, frac(-8, 3))
        );
        // antisymmetry is structural
        assert_eq!(alg.bracket_gen(b(-2), b(2)).unwrap(), -alg.bracket_gen(b(2), b(-2)).unwrap());
        assert_eq!(alg.bracket_gen(b(3), a(-1)).unwrap(), g(a(2)).scale(&q(1)));
    }

    #[test]
    fn normal_order_examples() {
        let alg = example_algebra();
        let a = Generator::a;
        let b = Generator::b;
        assert_eq!(
            alg.normal_order(&[a(1), a(-1)]).unwrap().to_string(),
            "a[-1]*a[1] + a[0]"
        );
        assert_eq!(alg.normal_order(&[Generator::Ham]).unwrap(), g(Generator::Ham));
        assert_eq!(alg.normal_order(&[b(1), b(1)]).unwrap().to_string(), "b[1]^2");
        let product = alg.multiply(&g(b(1)), &g(a(2))).unwrap();
        assert_eq!(product.to_string(), "a[2]*b[1] - 2*a[3]");
        assert_eq!(alg.multiply(&g(a(0)), &g(a(0))).unwrap().to_string(), "a[0]^2");
    }

    #[test]
    fn commutator_examples() {
        let alg = example_algebra();
        let a = Generator::a;
        let b = Generator::b;
        assert_eq!(alg.commutator(&g(a(3)), &g(b(-3))).unwrap(), g(a(0)).scale(&q(3)));
        assert_eq!(alg.commutator(&g(b(1)), &g(b(2))).unwrap(), -g(b(3)));
        let x = &g(b(1)) + &alg.multiply(&g(a(2)), &g(b(-1))).unwrap();
        assert!(alg.commutator(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn unbound_parameter_is_reported() {
        let alg = example_algebra().with_params(Params::default());
        let err = alg.bracket_gen(Generator::b(1), Generator::b(-1)).unwrap_err();
        assert!(matches!(err, crate::KernelError::UnboundParameter(_)));
    }

    #[test]
    fn mode_overflow_is_reported() {
        let alg = example_algebra();
        let err = alg.bracket_gen(Generator::a(i64::MAX), Generator::b(1)).unwrap_err();
        assert_eq!(err, crate::KernelError::ModeOverflow);
    }
}
