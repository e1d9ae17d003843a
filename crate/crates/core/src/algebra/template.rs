//! Mode-parametric sums used to describe bracket rules and coproduct tails.
//!
//! A [`TemplateSum`] is a finite sum of terms `coefficient * delta(...) *
//! word_1 (x) ... (x) word_k` where the coefficient is a [`Poly`] in the mode
//! slots and parameters, each delta is a Kronecker condition on an affine
//! form, and each word is a sequence of generator templates whose modes are
//! affine in the slots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use super::params::Params;
use super::poly::{Affine, DeltaForm, Poly, MODE_SLOTS};
use super::{Generator, Kind};
use crate::error::Result;
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenTemplate {
    pub kind: Kind,
    pub mode: Option<Affine>,
}

impl GenTemplate {
    pub fn new(kind: Kind, mode: Option<Affine>) -> Self {
        GenTemplate { kind, mode }
    }

    pub fn fixed(g: Generator) -> Self {
        GenTemplate { kind: g.kind(), mode: g.mode().map(Affine::constant) }
    }

    /// The concrete generator, when the mode does not depend on any slot.
    pub fn as_generator(&self) -> Option<Generator> {
        match &self.mode {
            None => Some(Generator::new(self.kind, 0)),
            Some(form) if form.is_constant() => Some(Generator::new(self.kind, form.constant)),
            Some(_) => None,
        }
    }

    pub fn instantiate(&self, modes: &[i64; MODE_SLOTS]) -> Result<Generator> {
        Ok(match &self.mode {
            None => Generator::new(self.kind, 0),
            Some(form) => Generator::new(self.kind, form.eval(modes)?),
        })
    }

    fn substitute(&self, images: &[Affine; MODE_SLOTS]) -> Option<GenTemplate> {
        Some(GenTemplate {
            kind: self.kind,
            mode: match &self.mode {
                None => None,
                Some(form) => Some(form.substitute(images)?),
            },
        })
    }
}

impl fmt::Display for GenTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mode {
            None => f.write_str(self.kind.name()),
            Some(form) => write!(f, "{}[{form}]", self.kind.name()),
        }
    }
}

pub type WordTemplate = Vec<GenTemplate>;

fn render_word(word: &[GenTemplate]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let j = (i..word.len()).find(|&j| word[j] != word[i]).unwrap_or(word.len());
        if j - i > 1 {
            parts.push(format!("{}^{}", word[i], j - i));
        } else {
            parts.push(word[i].to_string());
        }
        i = j;
    }
    parts.join("*")
}

fn is_central_letter(letter: &GenTemplate, central: &BTreeSet<Generator>) -> bool {
    letter.as_generator().is_some_and(|g| central.contains(&g))
}

/// Number of letters in `word` that are not declared central.
pub fn noncentral_letters(word: &WordTemplate, central: &BTreeSet<Generator>) -> usize {
    word.iter().filter(|l| !is_central_letter(l, central)).count()
}

type TermKey = (Vec<Affine>, Vec<WordTemplate>);

/// See the module documentation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TemplateSum {
    arity: usize,
    terms: BTreeMap<TermKey, Poly>,
}

impl TemplateSum {
    pub fn zero(arity: usize) -> Self {
        TemplateSum { arity, terms: BTreeMap::new() }
    }

    pub fn scalar(coefficient: Poly) -> Self {
        let mut s = TemplateSum::zero(1);
        s.add_term(Vec::new(), vec![Vec::new()], coefficient);
        s
    }

    pub fn word(word: WordTemplate) -> Self {
        let mut s = TemplateSum::zero(1);
        s.add_term(Vec::new(), vec![word], Poly::int(1));
        s
    }

    pub fn letter(letter: GenTemplate) -> Self {
        TemplateSum::word(vec![letter])
    }

    /// Kronecker factor `[form = 0]`.
    pub fn delta(form: Affine) -> Self {
        let mut s = TemplateSum::zero(1);
        s.add_term(vec![form], vec![Vec::new()], Poly::int(1));
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term has only empty words.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|(_, slots)| slots.iter().all(Vec::is_empty))
    }

    /// The coefficient polynomial, if this is a delta-free scalar.
    pub fn as_poly(&self) -> Option<Poly> {
        if self.arity != 1 || !self.is_scalar() {
            return None;
        }
        let mut out = Poly::zero();
        for ((deltas, _), c) in &self.terms {
            if !deltas.is_empty() {
                return None;
            }
            out = &out + c;
        }
        Some(out)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Affine], &[WordTemplate], &Poly)> {
        self.terms.iter().map(|((d, w), c)| (d.as_slice(), w.as_slice(), c))
    }

    fn add_term(&mut self, deltas: Vec<Affine>, slots: Vec<WordTemplate>, coefficient: Poly) {
        debug_assert_eq!(slots.len(), self.arity);
        if coefficient.is_zero() {
            return;
        }
        let mut forms = Vec::with_capacity(deltas.len());
        for d in deltas {
            match d.delta_form() {
                DeltaForm::Always => {}
                DeltaForm::Never => return,
                DeltaForm::When(f) => forms.push(f),
            }
        }
        forms.sort();
        forms.dedup();
        let key = (forms, slots);
        let entry = self.terms.entry(key.clone()).or_default();
        *entry = &*entry + &coefficient;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Sum; arities must agree.
    pub fn add(&self, other: &TemplateSum) -> Option<TemplateSum> {
        if self.arity != other.arity {
            return None;
        }
        let mut out = self.clone();
        for ((d, w), c) in &other.terms {
            out.add_term(d.clone(), w.clone(), c.clone());
        }
        Some(out)
    }

    pub fn neg(&self) -> TemplateSum {
        self.scale(&Poly::int(-1))
    }

    pub fn scale(&self, factor: &Poly) -> TemplateSum {
        let mut out = TemplateSum::zero(self.arity);
        for ((d, w), c) in &self.terms {
            out.add_term(d.clone(), w.clone(), c.mul(factor));
        }
        out
    }

    /// Product. Equal arities multiply slot-wise (words concatenate); a scalar
    /// sum of arity 1 broadcasts over any arity.
    pub fn mul(&self, other: &TemplateSum) -> Option<TemplateSum> {
        let arity = if self.arity == other.arity {
            self.arity
        } else if self.arity == 1 && self.is_scalar() {
            other.arity
        } else if other.arity == 1 && other.is_scalar() {
            self.arity
        } else {
            return None;
        };
        let mut out = TemplateSum::zero(arity);
        for ((da, wa), ca) in &self.terms {
            for ((db, wb), cb) in &other.terms {
                let mut deltas = da.clone();
                deltas.extend(db.iter().cloned());
                let slots = if self.arity == other.arity {
                    wa.iter()
                        .zip(wb)
                        .map(|(x, y)| x.iter().chain(y).cloned().collect())
                        .collect()
                } else if self.arity == arity {
                    wa.clone()
                } else {
                    wb.clone()
                };
                out.add_term(deltas, slots, ca.mul(cb));
            }
        }
        Some(out)
    }

    /// Tensor product: slots are concatenated.
    pub fn tensor(&self, other: &TemplateSum) -> TemplateSum {
        let mut out = TemplateSum::zero(self.arity + other.arity);
        for ((da, wa), ca) in &self.terms {
            for ((db, wb), cb) in &other.terms {
                let mut deltas = da.clone();
                deltas.extend(db.iter().cloned());
                let slots = wa.iter().chain(wb).cloned().collect();
                out.add_term(deltas, slots, ca.mul(cb));
            }
        }
        out
    }

    /// Sorts every word that has at most one non-central letter. Central
    /// letters commute with everything, so this does not change the value.
    pub fn canonicalize(&self, central: &BTreeSet<Generator>) -> TemplateSum {
        let mut out = TemplateSum::zero(self.arity);
        for ((d, w), c) in &self.terms {
            let slots = w
                .iter()
                .map(|word| {
                    let mut word = word.clone();
                    if noncentral_letters(&word, central) <= 1 {
                        word.sort();
                    }
                    word
                })
                .collect();
            out.add_term(d.clone(), slots, c.clone());
        }
        out
    }

    /// Renames mode slots, e.g. `[slot(1), slot(0)]` swaps `m` and `n`.
    pub fn substitute_modes(&self, images: &[Affine; MODE_SLOTS]) -> Option<TemplateSum> {
        let mut out = TemplateSum::zero(self.arity);
        for ((d, w), c) in &self.terms {
            let deltas = d.iter().map(|f| f.substitute(images)).collect::<Option<Vec<_>>>()?;
            let slots = w
                .iter()
                .map(|word| word.iter().map(|l| l.substitute(images)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()?;
            out.add_term(deltas, slots, c.substitute_modes(images)?);
        }
        Some(out)
    }

    /// Concrete terms at the given modes. Terms whose delta fails or whose
    /// coefficient vanishes are dropped.
    pub fn instantiate(
        &self,
        modes: &[i64; MODE_SLOTS],
        params: &Params,
    ) -> Result<Vec<(Q, Vec<Vec<Generator>>)>> {
        let mut out = Vec::new();
        'terms: for ((deltas, slots), coefficient) in &self.terms {
            for d in deltas {
                if d.eval(modes)? != 0 {
                    continue 'terms;
                }
            }
            let value = coefficient.eval(modes, params)?;
            if value.is_zero() {
                continue;
            }
            let words = slots
                .iter()
                .map(|w| w.iter().map(|l| l.instantiate(modes)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            out.push((value, words));
        }
        Ok(out)
    }
}

impl fmt::Display for TemplateSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for ((deltas, slots), coefficient) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            match coefficient.as_constant() {
                Some(c) if c == Q::from_integer(1.into()) => {}
                Some(_) => factors.push(coefficient.to_string()),
                None if coefficient.len() == 1 => factors.push(coefficient.to_string()),
                None => factors.push(format!("({coefficient})")),
            }
            factors.extend(deltas.iter().map(|d| format!("delta({d})")));
            let rendered: Vec<String> = slots
                .iter()
                .map(|w| {
                    if w.is_empty() {
                        "1".to_string()
                    } else {
                        render_word(w)
                    }
                })
                .collect();
            let head = rendered[0].clone();
            if head != "1" || factors.is_empty() {
                factors.push(head);
            }
            f.write_str(&factors.join("*"))?;
            for slot in &rendered[1..] {
                write!(f, " (x) {slot}")?;
            }
        }
        Ok(())
    }
}

/// A bracket rule in canonical orientation: `left <= right` in family order.
/// Slot 0 carries the mode of the left generator, slot 1 the right one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketRule {
    pub left: Kind,
    pub right: Kind,
    pub rhs: TemplateSum,
}

impl fmt::Display for BracketRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pattern = |k: Kind, slot: usize| {
            if k.has_mode() {
                format!("{}[{}]", k.name(), ["m", "n"][slot])
            } else {
                k.name().to_string()
            }
        };
        write!(f, "[{}, {}] = {}", pattern(self.left, 0), pattern(self.right, 1), self.rhs)
    }
}

/// One rule per unordered pair of families; a missing rule means the
/// families commute.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BracketTable {
    rules: BTreeMap<(Kind, Kind), TemplateSum>,
}

impl BracketTable {
    /// Stores `[left[m], right[n]] = rhs`, flipping orientation when needed so
    /// that `[y, x] = -[x, y]` holds structurally. Returns `false` if a rule
    /// for this pair already exists.
    pub fn insert(&mut self, left: Kind, right: Kind, rhs: TemplateSum) -> bool {
        let (key, rhs) = if left <= right {
            ((left, right), rhs)
        } else {
            let swapped = rhs
                .substitute_modes(&[Affine::slot(1), Affine::slot(0)])
                .expect("slot renaming cannot overflow");
            ((right, left), swapped.neg())
        };
        if self.rules.contains_key(&key) {
            return false;
        }
        self.rules.insert(key, rhs);
        true
    }

    pub fn get(&self, left: Kind, right: Kind) -> Option<&TemplateSum> {
        self.rules.get(&(left, right))
    }

    pub fn rules(&self) -> impl Iterator<Item = BracketRule> + '_ {
        self.rules
            .iter()
            .map(|(&(left, right), rhs)| BracketRule { left, right, rhs: rhs.clone() })
    }

    pub fn canonicalize(&self, central: &BTreeSet<Generator>) -> BracketTable {
        BracketTable {
            rules: self.rules.iter().map(|(k, v)| (*k, v.canonicalize(central))).collect(),
        }
    }
}

impl fmt::Display for BracketTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in self.rules() {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(mode: Affine) -> GenTemplate {
        GenTemplate::new(Kind::OscA, Some(mode))
    }

    #[test]
    fn delta_terms_vanish_or_simplify() {
        let never = TemplateSum::delta(Affine::constant(2));
        assert!(never.is_zero());
        let always = TemplateSum::delta(Affine::constant(0));
        assert_eq!(always, TemplateSum::scalar(Poly::int(1)));
    }

    #[test]
    fn insert_reorients_rules() {
        let mut table = BracketTable::default();
        // [b[m], a[n]] = -n*a[m+n]
        let rhs = TemplateSum::letter(a(Affine { coef: [1, 1], constant: 0 }))
            .scale(&Poly::mode(1).scale(&crate::rational::q(-1)));
        assert!(table.insert(Kind::YangB, Kind::OscA, rhs));
        let rule = table.get(Kind::OscA, Kind::YangB).unwrap();
        assert_eq!(rule.to_string(), "m*a[m + n]");
        assert!(!table.insert(Kind::OscA, Kind::YangB, TemplateSum::zero(1)));
    }

    #[test]
    fn instantiate_checks_deltas() {
        let central: BTreeSet<_> = [Generator::a(0)].into();
        let rule = TemplateSum::delta(Affine { coef: [1, 1], constant: 0 })
            .mul(&TemplateSum::letter(GenTemplate::fixed(Generator::a(0))))
            .unwrap()
            .scale(&Poly::mode(0))
            .canonicalize(&central);
        let params = Params::default();
        assert!(rule.instantiate(&[1, 2], &params).unwrap().is_empty());
        let hit = rule.instantiate(&[2, -2], &params).unwrap();
        assert_eq!(hit, vec![(crate::rational::q(2), vec![vec![Generator::a(0)]])]);
    }
}
