//! Elements of the enveloping algebra generated by the oscillators `a[m]`,
//! the Hamiltonian `H` and the Yangian generators `b[m]`, kept in PBW normal
//! form.

mod builtin;
mod kernel;
mod params;
mod poly;
mod template;

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::rational::{join_signed, scaled_body, Q};

pub use builtin::{example_algebra, general_algebra};
pub use kernel::Algebra;
pub use params::{IndexedTable, ParamValue, Params};
pub use poly::{Affine, Poly, Var, MODE_SLOTS};
pub use template::{noncentral_letters, BracketRule, BracketTable, GenTemplate, TemplateSum, WordTemplate};

/// Generator family. The derived order is the PBW order of families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Ham,
    OscA,
    YangB,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Ham, Kind::OscA, Kind::YangB];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Ham => "H",
            Kind::OscA => "a",
            Kind::YangB => "b",
        }
    }

    pub fn from_name(name: &str) -> Option<Kind> {
        match name {
            "H" => Some(Kind::Ham),
            "a" => Some(Kind::OscA),
            "b" => Some(Kind::YangB),
            _ => None,
        }
    }

    pub fn has_mode(self) -> bool {
        !matches!(self, Kind::Ham)
    }
}

/// A single generator. The derived `Ord` is the PBW order:
/// `H < a[m] (ascending m) < b[m] (ascending m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Ham,
    OscA(i64),
    YangB(i64),
}

impl Generator {
    pub fn a(mode: i64) -> Self {
        Generator::OscA(mode)
    }

    pub fn b(mode: i64) -> Self {
        Generator::YangB(mode)
    }

    pub fn new(kind: Kind, mode: i64) -> Self {
        match kind {
            Kind::Ham => Generator::Ham,
            Kind::OscA => Generator::OscA(mode),
            Kind::YangB => Generator::YangB(mode),
        }
    }

    pub fn kind(self) -> Kind {
        match self {
            Generator::Ham => Kind::Ham,
            Generator::OscA(_) => Kind::OscA,
            Generator::YangB(_) => Kind::YangB,
        }
    }

    pub fn mode(self) -> Option<i64> {
        match self {
            Generator::Ham => None,
            Generator::OscA(m) | Generator::YangB(m) => Some(m),
        }
    }

    /// Eigenvalue of `ad H`.
    pub fn grade(self) -> i64 {
        self.mode().unwrap_or(0)
    }

    /// `a[0]` is the only generator central in every presentation the kernel
    /// ships; it is also what rendering treats as the scalar-like letter.
    pub fn is_central(self) -> bool {
        self == Generator::OscA(0)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Ham => f.write_str("H"),
            Generator::OscA(m) => write!(f, "a[{m}]"),
            Generator::YangB(m) => write!(f, "b[{m}]"),
        }
    }
}

/// A PBW basis word: generators sorted in PBW order. The empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<Generator>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(g: Generator) -> Self {
        Monomial(vec![g])
    }

    /// Sorts the letters. Only valid when they commute, e.g. powers of `a[0]`.
    pub fn commuting(mut letters: Vec<Generator>) -> Self {
        letters.sort();
        Monomial(letters)
    }

    /// Accepts a word that is already in PBW order.
    pub fn from_sorted(letters: Vec<Generator>) -> Option<Self> {
        letters.windows(2).all(|w| w[0] <= w[1]).then_some(Monomial(letters))
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of generator grades. Computed in `i128` so it cannot overflow.
    pub fn grade(&self) -> i128 {
        self.0.iter().map(|g| g.grade() as i128).sum()
    }

    fn noncentral_count(&self) -> usize {
        self.0.iter().filter(|g| !g.is_central()).count()
    }

    /// Render order for terms of an [`Element`]: grade, then words with more
    /// non-central letters first, then PBW-lexicographic.
    pub(crate) fn render_key(&self) -> (i128, Reverse<usize>, &Monomial) {
        (self.grade(), Reverse(self.noncentral_count()), self)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let g = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == g {
                j += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if j - i > 1 {
                write!(f, "{g}^{}", j - i)?;
            } else {
                write!(f, "{g}")?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Result of [`Element::grade`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grade {
    /// Every term has this grade. The zero element reports grade 0.
    Homogeneous(i128),
    Inhomogeneous,
}

/// A finite linear combination of PBW monomials with nonzero rational
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<Monomial, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one() -> Self {
        Element::scalar(Q::from_integer(1.into()))
    }

    pub fn scalar(value: Q) -> Self {
        Element::term(Monomial::unit(), value)
    }

    pub fn generator(g: Generator) -> Self {
        Element::term(Monomial::generator(g), Q::from_integer(1.into()))
    }

    pub fn term(monomial: Monomial, coefficient: Q) -> Self {
        let mut out = Element::zero();
        out.add_term(monomial, coefficient);
        out
    }

    /// `a[0]^k` with coefficient.
    pub fn central_power(k: usize, coefficient: Q) -> Self {
        Element::term(Monomial(vec![Generator::OscA(0); k]), coefficient)
    }

    pub fn add_term(&mut self, monomial: Monomial, coefficient: Q) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coefficient);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coefficient;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
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

    pub fn coefficient(&self, monomial: &Monomial) -> Q {
        self.terms.get(monomial).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of the unit monomial, if the element is a pure scalar.
    pub fn as_scalar(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::unit()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, factor: &Q) -> Element {
        if factor.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        }
    }

    pub fn grade(&self) -> Grade {
        let mut grades = self.terms.keys().map(Monomial::grade);
        let Some(first) = grades.next() else {
            return Grade::Homogeneous(0);
        };
        if grades.all(|g| g == first) {
            Grade::Homogeneous(first)
        } else {
            Grade::Inhomogeneous
        }
    }

    /// Highest number of letters in any term.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::len).max().unwrap_or(0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.render_key().cmp(&b.0.render_key()));
        let body = join_signed(terms.into_iter().map(|(m, c)| {
            let text = if m.is_unit() { String::new() } else { m.to_string() };
            (c.is_negative(), scaled_body(&c.abs(), &text))
        }));
        f.write_str(&body)
    }
}

impl From<Generator> for Element {
    fn from(g: Generator) -> Self {
        Element::generator(g)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn pbw_order_of_generators() {
        let mut gens = vec![
            Generator::b(-1),
            Generator::a(2),
            Generator::Ham,
            Generator::a(-3),
            Generator::b(-4),
        ];
        gens.sort();
        assert_eq!(
            gens,
            vec![
                Generator::Ham,
                Generator::a(-3),
                Generator::a(2),
                Generator::b(-4),
                Generator::b(-1)
            ]
        );
    }

    #[test]
    fn grades() {
        let x = Element::term(Monomial::from_sorted(vec![Generator::a(-3), Generator::b(1)]).unwrap(), q(1));
        assert_eq!(x.grade(), Grade::Homogeneous(-2));
        assert_eq!(Element::generator(Generator::Ham).grade(), Grade::Homogeneous(0));
        let y = Element::generator(Generator::a(1)) + Element::generator(Generator::a(2));
        assert_eq!(y.grade(), Grade::Inhomogeneous);
    }

    #[test]
    fn rendering() {
        let x = Element::generator(Generator::b(0)).scale(&q(4)) + Element::central_power(3, frac(-8, 3));
        assert_eq!(x.to_string(), "4*b[0] - 8/3*a[0]^3");
        let y = Element::term(Monomial::from_sorted(vec![Generator::a(-1), Generator::a(1)]).unwrap(), q(1))
            + Element::generator(Generator::a(0));
        assert_eq!(y.to_string(), "a[-1]*a[1] + a[0]");
        assert_eq!(Element::zero().to_string(), "0");
        assert_eq!(Element::one().to_string(), "1");
        assert_eq!((-Element::generator(Generator::b(3))).to_string(), "-b[3]");
        assert_eq!(Element::scalar(frac(-1, 2)).to_string(), "-1/2");
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let x = Element::generator(Generator::a(1));
        assert!((&x - &x).is_zero());
        assert_eq!(x.scale(&q(0)), Element::zero());
    }
}
