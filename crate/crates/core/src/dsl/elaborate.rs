//! Turns declarations into bracket tables and checks them.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::lexer::Pos;
use super::parser::{BigRationalLit, Decl, DeclKind, Expr, ExprKind, IndexKey, Pattern};
use super::{ParseError, Presentation};
use crate::algebra::{
    Affine, BracketTable, Element, GenTemplate, Generator, IndexedTable, Kind, ParamValue, Params, Poly,
    TemplateSum, Var, MODE_SLOTS,
};
use crate::error::KernelError;
use crate::derivation::linalg::RationalMatrix;
use crate::rational::Q;
use crate::Algebra;

fn err(expr: &Expr, message: impl Into<String>) -> ParseError {
    ParseError::new(expr.pos, message, expr.text.clone())
}

/// Error about a whole right-hand side, reported at its first token.
fn rule_err(expr: &Expr, message: impl Into<String>) -> ParseError {
    ParseError::new(expr.start(), message, expr.text.clone())
}

fn literal(lit: &BigRationalLit) -> Q {
    Q::new(lit.numer.clone(), lit.denom.clone())
}

/// Names visible while elaborating a rule.
struct RuleScope<'a> {
    slots: Vec<(String, usize)>,
    params: &'a Params,
    families: &'a BTreeMap<Kind, Family>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub kind: Kind,
    /// Grade as an affine form in slot 0 (the family's own mode).
    pub grade: Affine,
}

impl RuleScope<'_> {
    fn slot(&self, name: &str) -> Option<usize> {
        self.slots.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    fn family(&self, name: &str, expr: &Expr) -> Result<Option<Kind>, ParseError> {
        match Kind::from_name(name) {
            Some(kind) if self.families.contains_key(&kind) => Ok(Some(kind)),
            Some(_) => Err(err(expr, format!("generator family `{name}` is not declared"))),
            None => Ok(None),
        }
    }

    fn affine(&self, expr: &Expr) -> Result<Affine, ParseError> {
        let sum = self.eval(expr)?;
        sum.as_poly()
            .filter(|p| p.vars().all(|v| matches!(v, Var::Mode(_))))
            .and_then(|p| p.as_affine())
            .ok_or_else(|| err(expr, "index must be an integer affine expression in the mode variables"))
    }

    fn scalar_constant(&self, expr: &Expr) -> Result<Q, ParseError> {
        self.eval(expr)?
            .as_poly()
            .and_then(|p| p.as_constant())
            .ok_or_else(|| err(expr, "divisor must be a nonzero rational constant"))
    }

    fn eval(&self, expr: &Expr) -> Result<TemplateSum, ParseError> {
        let arity_error = || err(expr, "operands have mismatched tensor arity");
        Ok(match &expr.kind {
            ExprKind::Int(n) => TemplateSum::scalar(Poly::constant(Q::from_integer(n.clone()))),
            ExprKind::Ident(name) => {
                if let Some(slot) = self.slot(name) {
                    TemplateSum::scalar(Poly::mode(slot))
                } else if let Some(kind) = self.family(name, expr)? {
                    if kind.has_mode() {
                        return Err(err(expr, format!("generator family `{name}` needs a mode index")));
                    }
                    TemplateSum::letter(GenTemplate::new(kind, None))
                } else {
                    match self.params.get(name) {
                        Some(ParamValue::Scalar(_)) => TemplateSum::scalar(Poly::param(name)),
                        Some(ParamValue::Indexed(_)) => {
                            return Err(err(expr, format!("parameter `{name}` is mode-indexed and needs an index")))
                        }
                        None => return Err(err(expr, format!("unbound identifier `{name}`"))),
                    }
                }
            }
            ExprKind::Index(name, index) => {
                if let Some(kind) = self.family(name, expr)? {
                    if !kind.has_mode() {
                        return Err(err(expr, format!("generator family `{name}` takes no mode index")));
                    }
                    TemplateSum::letter(GenTemplate::new(kind, Some(self.affine(index)?)))
                } else {
                    let form = self.affine(index)?;
                    match self.params.get(name) {
                        Some(ParamValue::Indexed(table)) => {
                            if form.is_constant() && !table.contains(form.constant) {
                                return Err(err(
                                    index,
                                    format!("parameter `{name}` has no entry for index {}", form.constant),
                                ));
                            }
                            TemplateSum::scalar(Poly::var(Var::Indexed(name.clone(), form)))
                        }
                        Some(ParamValue::Scalar(_)) => {
                            return Err(err(expr, format!("parameter `{name}` is a scalar and cannot be indexed")))
                        }
                        None if self.slot(name).is_some() => {
                            return Err(err(expr, format!("mode variable `{name}` cannot be indexed")))
                        }
                        None => return Err(err(expr, format!("unbound identifier `{name}`"))),
                    }
                }
            }
            ExprKind::Call(name, args) => match (name.as_str(), args.as_slice()) {
                ("delta", [arg]) => TemplateSum::delta(self.affine(arg)?),
                ("delta", _) => return Err(err(expr, "delta takes exactly one argument")),
                _ => return Err(err(expr, format!("unknown function `{name}` in a rule"))),
            },
            ExprKind::Neg(x) => self.eval(x)?.neg(),
            ExprKind::Add(x, y) => self.eval(x)?.add(&self.eval(y)?).ok_or_else(arity_error)?,
            ExprKind::Sub(x, y) => self.eval(x)?.add(&self.eval(y)?.neg()).ok_or_else(arity_error)?,
            ExprKind::Mul(x, y) => self.eval(x)?.mul(&self.eval(y)?).ok_or_else(arity_error)?,
            ExprKind::Div(x, y) => {
                let d = self.scalar_constant(y)?;
                if d.is_zero() {
                    return Err(err(y, "division by zero"));
                }
                self.eval(x)?.scale(&Poly::constant(d.recip()))
            }
            ExprKind::Tensor(x, y) => {
                let (x, y) = (self.eval(x)?, self.eval(y)?);
                if x.arity() != 1 || y.arity() != 1 {
                    return Err(err(expr, "only two tensor factors are supported"));
                }
                x.tensor(&y)
            }
            ExprKind::Pow(x, e) => {
                let base = self.eval(x)?;
                let mut out = TemplateSum::scalar(Poly::int(1));
                for _ in 0..*e {
                    out = out.mul(&base).ok_or_else(arity_error)?;
                }
                out
            }
        })
    }
}

/// Integer affine expression in one free identifier (the family's mode).
fn grade_form(expr: &Expr, has_mode: bool) -> Result<Affine, ParseError> {
    let mut names = BTreeSet::new();
    collect_idents(expr, &mut names);
    if names.len() > 1 || (!has_mode && !names.is_empty()) {
        return Err(err(expr, "a grade may only refer to the family's own mode"));
    }
    let slots = names.into_iter().map(|n| (n, 0)).collect();
    let params = Params::default();
    let families = BTreeMap::new();
    RuleScope { slots, params: &params, families: &families }
        .affine(expr)
        .map_err(|_| err(expr, "a grade must be an integer affine expression in the mode"))
}

fn collect_idents(expr: &Expr, out: &mut BTreeSet<String>) {
    match &expr.kind {
        ExprKind::Int(_) => {}
        ExprKind::Ident(n) => {
            out.insert(n.clone());
        }
        ExprKind::Index(n, e) => {
            out.insert(n.clone());
            collect_idents(e, out);
        }
        ExprKind::Call(n, args) => {
            out.insert(n.clone());
            args.iter().for_each(|a| collect_idents(a, out));
        }
        ExprKind::Neg(x) | ExprKind::Pow(x, _) => collect_idents(x, out),
        ExprKind::Add(x, y)
        | ExprKind::Sub(x, y)
        | ExprKind::Mul(x, y)
        | ExprKind::Div(x, y)
        | ExprKind::Tensor(x, y) => {
            collect_idents(x, out);
            collect_idents(y, out);
        }
    }
}

fn pattern_error(p: &Pattern, message: impl Into<String>) -> ParseError {
    ParseError::new(p.pos, message, p.family.clone())
}

/// Family of a pattern, checking that the mode variable matches the
/// declaration.
fn pattern_family(p: &Pattern, families: &BTreeMap<Kind, Family>) -> Result<Kind, ParseError> {
    let kind = Kind::from_name(&p.family)
        .filter(|k| families.contains_key(k))
        .ok_or_else(|| pattern_error(p, format!("generator family `{}` is not declared", p.family)))?;
    match (kind.has_mode(), &p.var) {
        (true, None) => Err(pattern_error(p, format!("generator family `{}` needs a mode variable", p.family))),
        (false, Some(_)) => Err(pattern_error(p, format!("generator family `{}` takes no mode index", p.family))),
        _ => Ok(kind),
    }
}

/// Grade of a pattern letter with its mode in `slot`.
fn pattern_grade(kind: Kind, slot: usize, families: &BTreeMap<Kind, Family>) -> Affine {
    let g = &families[&kind].grade;
    let mut images: [Affine; MODE_SLOTS] = std::array::from_fn(|_| Affine::constant(0));
    images[0] = Affine::slot(slot);
    g.substitute(&images).expect("small grade coefficients")
}

fn letter_grade(letter: &GenTemplate, families: &BTreeMap<Kind, Family>) -> Option<Affine> {
    let g = &families[&letter.kind].grade;
    let mut images: [Affine; MODE_SLOTS] = std::array::from_fn(|_| Affine::constant(0));
    images[0] = letter.mode.clone().unwrap_or_default();
    g.substitute(&images)
}

/// `expected` and every term's grade agree on the solution set of the term's
/// deltas, i.e. the difference lies in the span of the delta forms.
fn check_grading(
    sum: &TemplateSum,
    expected: &Affine,
    families: &BTreeMap<Kind, Family>,
    at: &Expr,
) -> Result<(), ParseError> {
    for (deltas, slots, _) in sum.terms() {
        let mut total = Affine::constant(0);
        for letter in slots.iter().flatten() {
            let g = letter_grade(letter, families).ok_or_else(|| err(at, "mode arithmetic overflowed"))?;
            total = total.checked_add(&g).ok_or_else(|| err(at, "mode arithmetic overflowed"))?;
        }
        let diff = total
            .checked_add(&expected.checked_scale(-1).expect("small"))
            .ok_or_else(|| err(at, "mode arithmetic overflowed"))?;
        let rows: Vec<Vec<Q>> = deltas.iter().map(Affine::as_rationals).collect();
        let base_rank = RationalMatrix::from_rows(rows.clone(), MODE_SLOTS + 1).rank();
        let mut extended = rows;
        extended.push(diff.as_rationals());
        if RationalMatrix::from_rows(extended, MODE_SLOTS + 1).rank() != base_rank {
            let words: Vec<String> = slots
                .iter()
                .map(|w| w.iter().map(ToString::to_string).collect::<Vec<_>>().join("*"))
                .collect();
            return Err(rule_err(
                at,
                format!(
                    "grading inconsistency: term {} has grade {total} but the rule requires {expected}{}",
                    words.join(" (x) "),
                    if deltas.is_empty() { String::new() } else { " under its delta condition".into() }
                ),
            ));
        }
    }
    Ok(())
}

pub fn elaborate(decls: &[Decl]) -> Result<Presentation, ParseError> {
    let mut params = Params::default();
    let mut param_pos: BTreeMap<String, Pos> = BTreeMap::new();
    for d in decls {
        let (name, value) = match &d.kind {
            DeclKind::Param { name, value } => (name, ParamValue::Scalar(literal(value))),
            DeclKind::IndexedParam { name, entries } => {
                let mut table = IndexedTable::default();
                for (key, value, pos) in entries {
                    let v = literal(value);
                    let fresh = match key {
                        IndexKey::Default => table.default.replace(v).is_none(),
                        IndexKey::Index(k) => table.entries.insert(k.unsigned_abs(), v).is_none(),
                    };
                    if !fresh {
                        return Err(ParseError::new(*pos, format!("duplicate entry in indexed parameter `{name}`"), d.text.clone()));
                    }
                }
                (name, ParamValue::Indexed(table))
            }
            _ => continue,
        };
        if Kind::from_name(name).is_some() || name == "delta" {
            return Err(ParseError::new(d.pos, format!("`{name}` is reserved and cannot name a parameter"), d.text.clone()));
        }
        if param_pos.insert(name.clone(), d.pos).is_some() {
            return Err(ParseError::new(d.pos, format!("duplicate parameter `{name}`"), d.text.clone()));
        }
        params.set(name, value);
    }

    let mut families: BTreeMap<Kind, Family> = BTreeMap::new();
    for d in decls {
        let DeclKind::Generator { name, has_mode, grade } = &d.kind else { continue };
        let kind = Kind::from_name(name).ok_or_else(|| {
            ParseError::new(d.pos, format!("unknown generator family `{name}` (supported: a, H, b)"), d.text.clone())
        })?;
        if kind.has_mode() != *has_mode {
            let message = if kind.has_mode() {
                format!("generator family `{name}` must be declared with `: mode`")
            } else {
                format!("generator family `{name}` has no mode")
            };
            return Err(ParseError::new(d.pos, message, d.text.clone()));
        }
        let grade = match grade {
            Some(expr) => grade_form(expr, *has_mode)?,
            None if *has_mode => Affine::slot(0),
            None => Affine::constant(0),
        };
        if families.insert(kind, Family { kind, grade }).is_some() {
            return Err(ParseError::new(d.pos, format!("duplicate generator family `{name}`"), d.text.clone()));
        }
    }

    let mut central: BTreeSet<Generator> = BTreeSet::new();
    let mut central_pos: Vec<(Generator, Pos, String)> = Vec::new();
    for d in decls {
        let DeclKind::Central(gens) = &d.kind else { continue };
        for g in gens {
            let kind = Kind::from_name(&g.family)
                .filter(|k| families.contains_key(k))
                .ok_or_else(|| ParseError::new(g.pos, format!("generator family `{}` is not declared", g.family), g.text.clone()))?;
            let generator = match (kind.has_mode(), g.mode) {
                (true, Some(m)) => Generator::new(kind, m),
                (false, None) => Generator::new(kind, 0),
                (true, None) => {
                    return Err(ParseError::new(g.pos, format!("generator family `{}` needs a mode index", g.family), g.text.clone()))
                }
                (false, Some(_)) => {
                    return Err(ParseError::new(g.pos, format!("generator family `{}` takes no mode index", g.family), g.text.clone()))
                }
            };
            if !central.insert(generator) {
                return Err(ParseError::new(g.pos, format!("`{}` is already declared central", g.text), g.text.clone()));
            }
            central_pos.push((generator, g.pos, g.text.clone()));
        }
    }

    let mut brackets = BracketTable::default();
    let mut rule_sources = Vec::new();
    for d in decls {
        let DeclKind::Bracket { left, right, rhs } = &d.kind else { continue };
        let lk = pattern_family(left, &families)?;
        let rk = pattern_family(right, &families)?;
        let mut slots = Vec::new();
        for (p, slot) in [(left, 0), (right, 1)] {
            if let Some(v) = &p.var {
                if slots.iter().any(|(n, _)| n == v) {
                    return Err(ParseError::new(p.var_pos, format!("mode variable `{v}` is bound twice"), v.clone()));
                }
                if params.contains(v) || Kind::from_name(v).is_some() {
                    return Err(ParseError::new(p.var_pos, format!("mode variable `{v}` shadows another name"), v.clone()));
                }
                slots.push((v.clone(), slot));
            }
        }
        let scope = RuleScope { slots, params: &params, families: &families };
        let sum = scope.eval(rhs)?;
        if sum.arity() != 1 {
            return Err(rule_err(rhs, "a bracket must evaluate to an element, not a tensor"));
        }
        let expected = pattern_grade(lk, 0, &families)
            .checked_add(&pattern_grade(rk, 1, &families))
            .expect("small");
        check_grading(&sum, &expected, &families, rhs)?;
        for (_, words, _) in sum.terms() {
            let word = &words[0];
            if crate::algebra::noncentral_letters(word, &central) > 1 {
                let text: Vec<String> = word.iter().map(ToString::to_string).collect();
                return Err(rule_err(
                    rhs,
                    format!("bracket targets may contain at most one non-central letter, found {}", text.join("*")),
                ));
            }
        }
        if !brackets.insert(lk, rk, sum) {
            return Err(ParseError::new(
                d.pos,
                format!("duplicate bracket rule for [{}, {}]", lk.name(), rk.name()),
                d.text.clone(),
            ));
        }
        rule_sources.push(d.text.clone());
    }

    let mut cotails = BTreeMap::new();
    for d in decls {
        let DeclKind::Cotail { pattern, rhs } = &d.kind else { continue };
        let kind = pattern_family(pattern, &families)?;
        let slots = pattern.var.iter().map(|v| (v.clone(), 0)).collect();
        if let Some(v) = &pattern.var {
            if params.contains(v) {
                return Err(ParseError::new(pattern.var_pos, format!("mode variable `{v}` shadows a parameter"), v.clone()));
            }
        }
        let scope = RuleScope { slots, params: &params, families: &families };
        let sum = scope.eval(rhs)?;
        if sum.arity() != 2 {
            return Err(rule_err(rhs, "a coproduct tail must be a tensor of two factors"));
        }
        check_grading(&sum, &pattern_grade(kind, 0, &families), &families, rhs)?;
        if cotails.insert(kind, sum.canonicalize(&central)).is_some() {
            return Err(ParseError::new(d.pos, format!("duplicate cotail for `{}`", kind.name()), d.text.clone()));
        }
    }

    let presentation = Presentation {
        params,
        families,
        central: central.clone(),
        brackets: brackets.canonicalize(&central),
        cotails,
        rule_sources,
    };
    check_centrality(&presentation.algebra(), &central_pos)?;
    Ok(presentation)
}

/// Every declared central generator must bracket to zero with the window
/// `|mode| <= 4`. Entries that need a missing indexed value are skipped.
fn check_centrality(alg: &Algebra, central: &[(Generator, Pos, String)]) -> Result<(), ParseError> {
    for (c, pos, text) in central {
        for g in alg.window_generators(4) {
            match alg.bracket_gen(*c, g) {
                Ok(value) if !value.is_zero() => {
                    return Err(ParseError::new(
                        *pos,
                        format!("`{c}` is declared central but [{c}, {g}] = {value}"),
                        text.clone(),
                    ))
                }
                Ok(_) | Err(KernelError::MissingIndexedEntry { .. }) => {}
                Err(e) => return Err(ParseError::new(*pos, e.to_string(), text.clone())),
            }
        }
    }
    Ok(())
}

/// Evaluates a concrete expression (integer modes only) in `alg`.
pub fn evaluate(expr: &Expr, alg: &Algebra) -> Result<Element, ParseError> {
    let kernel = |e: KernelError| err(expr, e.to_string());
    let family = |name: &str| -> Result<Option<Kind>, ParseError> {
        match Kind::from_name(name) {
            Some(kind) if alg.families().contains(&kind) => Ok(Some(kind)),
            Some(_) => Err(err(expr, format!("unknown family `{name}`"))),
            None => Ok(None),
        }
    };
    Ok(match &expr.kind {
        ExprKind::Int(n) => Element::scalar(Q::from_integer(n.clone())),
        ExprKind::Ident(name) => {
            if let Some(kind) = family(name)? {
                if kind.has_mode() {
                    return Err(err(expr, format!("generator family `{name}` needs a mode index")));
                }
                Element::generator(Generator::new(kind, 0))
            } else {
                match alg.params().get(name) {
                    Some(ParamValue::Scalar(v)) => Element::scalar(v.clone()),
                    Some(ParamValue::Indexed(_)) => {
                        return Err(err(expr, format!("parameter `{name}` is mode-indexed and needs an index")))
                    }
                    None => return Err(err(expr, format!("unknown identifier `{name}`"))),
                }
            }
        }
        ExprKind::Index(name, index) => {
            let k = integer_literal(index)?;
            if let Some(kind) = family(name)? {
                if !kind.has_mode() {
                    return Err(err(expr, format!("generator family `{name}` takes no mode index")));
                }
                Element::generator(Generator::new(kind, k))
            } else {
                match alg.params().get(name) {
                    Some(ParamValue::Indexed(_)) => Element::scalar(alg.params().indexed(name, k).map_err(kernel)?),
                    Some(ParamValue::Scalar(_)) => {
                        return Err(err(expr, format!("parameter `{name}` is a scalar and cannot be indexed")))
                    }
                    None => return Err(err(expr, format!("unknown identifier `{name}`"))),
                }
            }
        }
        ExprKind::Call(name, args) => match (name.as_str(), args.as_slice()) {
            ("comm", [x, y]) => alg.commutator(&evaluate(x, alg)?, &evaluate(y, alg)?).map_err(kernel)?,
            ("comm", _) => return Err(err(expr, "comm takes exactly two arguments")),
            _ => return Err(err(expr, format!("unknown function `{name}`"))),
        },
        ExprKind::Neg(x) => -&evaluate(x, alg)?,
        ExprKind::Add(x, y) => &evaluate(x, alg)? + &evaluate(y, alg)?,
        ExprKind::Sub(x, y) => &evaluate(x, alg)? - &evaluate(y, alg)?,
        ExprKind::Mul(x, y) => alg.multiply(&evaluate(x, alg)?, &evaluate(y, alg)?).map_err(kernel)?,
        ExprKind::Div(x, y) => {
            let d = evaluate(y, alg)?
                .as_scalar()
                .ok_or_else(|| err(y, "divisor must be a rational scalar"))?;
            if d.is_zero() {
                return Err(err(y, "division by zero"));
            }
            evaluate(x, alg)?.scale(&d.recip())
        }
        ExprKind::Tensor(..) => return Err(err(expr, "tensor products are not supported in element expressions")),
        ExprKind::Pow(x, e) => alg.pow(&evaluate(x, alg)?, *e).map_err(kernel)?,
    })
}

fn integer_literal(expr: &Expr) -> Result<i64, ParseError> {
    let value = match &expr.kind {
        ExprKind::Int(n) => Some(n.clone()),
        ExprKind::Neg(inner) => match &inner.kind {
            ExprKind::Int(n) => Some(-n),
            _ => None,
        },
        _ => None,
    };
    let value = value.ok_or_else(|| err(expr, "mode must be an integer literal"))?;
    i64::try_from(value).map_err(|_| err(expr, "mode is out of range"))
}
