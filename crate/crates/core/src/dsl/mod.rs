//! The `.lba` presentation language and the element expression parser.
//!
//! A presentation is a list of line-oriented declarations. Lines that start
//! with whitespace continue the previous declaration and `#` starts a
//! comment:
//!
//! ```text
//! param eps = 1
//! param eps indexed { 1: 1, 2: 4, default: 1 }
//! generator a : mode ; grade m
//! generator H ; grade 0
//! central a[0]
//! bracket [a[m], b[n]] = m * a[m+n]
//! cotail b[m] = eps * m * ( a[m] (x) a[0] - a[0] (x) a[m] )
//! ```
//!
//! `delta(e)` restricts a term to `e = 0`, `(x)` is the tensor product and
//! literals are integers or fractions. Generator families are `a` and `b`
//! (with a mode) and `H` (without).

mod elaborate;
mod lexer;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use elaborate::Family;
pub use lexer::Pos;

use crate::algebra::{Algebra, BracketTable, Element, Generator, Kind, Params, TemplateSum};

/// Positioned error from lexing, parsing or elaboration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub snippet: String,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>, snippet: impl Into<String>) -> Self {
        ParseError { line: pos.line.max(1), column: pos.column.max(1), message: message.into(), snippet: snippet.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.snippet.is_empty() {
            write!(f, " (at `{}`)", self.snippet)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// An elaborated presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub params: Params,
    pub families: BTreeMap<Kind, Family>,
    pub central: BTreeSet<Generator>,
    pub brackets: BracketTable,
    pub cotails: BTreeMap<Kind, TemplateSum>,
    /// First source line of each bracket rule, in declaration order.
    pub rule_sources: Vec<String>,
}

impl Presentation {
    pub fn algebra(&self) -> Algebra {
        Algebra::new(
            self.families.keys().copied().collect(),
            self.central.clone(),
            self.brackets.clone(),
            self.cotails.clone(),
            self.params.clone(),
        )
    }
}

pub fn parse_presentation(source: &str) -> Result<Presentation, ParseError> {
    let decls = parser::parse_declarations(source)?;
    elaborate::elaborate(&decls)
}

/// Parses and evaluates an expression over integer-mode generators, scalar
/// parameters and `comm(x, y)`.
pub fn parse_expression(source: &str, alg: &Algebra) -> Result<Element, ParseError> {
    let expr = parser::parse_expr(source)?;
    elaborate::evaluate(&expr, alg)
}

/// The example presentation: constant ε and `F = α a_0 - ε²/3 a_0³`, `G = β a_0`.
pub const EXAMPLE_SOURCE: &str = "\
param eps = 1
param alpha = 0
param beta = 0
generator a : mode ; grade m
generator H ; grade 0
generator b : mode ; grade m
central a[0]
bracket [a[m], a[n]] = m * delta(m+n) * a[0]
bracket [H, a[m]]    = m * a[m]
bracket [a[m], b[n]] = m * a[m+n]
bracket [H, b[m]]    = m * b[m]
bracket [b[m], b[n]] = (m-n)*b[m+n]
    + delta(m+n) * ( m^3 * (alpha*a[0] - (1/3)*eps^2*a[0]^3) + m * (beta*a[0]) )
cotail b[m] = eps * m * ( a[m] (x) a[0] - a[0] (x) a[m] )
";

/// The general presentation: mode-indexed ε and
/// `F = α a_0 + f/3 a_0³`, `G = β a_0 + g/3 a_0³`.
pub const GENERAL_SOURCE: &str = "\
# epsilon is looked up symmetrically: eps[-m] = eps[m]
param eps indexed { default: 1 }
param alpha = 0
param beta = 0
param f = -1
param g = 0
generator a : mode ; grade m
generator H ; grade 0
generator b : mode ; grade m
central a[0]
bracket [a[m], a[n]] = m * delta(m+n) * a[0]
bracket [H, a[m]]    = m * a[m]
bracket [a[m], b[n]] = m * a[m+n]
bracket [H, b[m]]    = m * b[m]
bracket [b[m], b[n]] = (m-n)*b[m+n]
    + delta(m+n) * ( m^3 * (alpha*a[0] + (f/3)*a[0]^3) + m * (beta*a[0] + (g/3)*a[0]^3) )
cotail b[m] = eps[m] * m * ( a[m] (x) a[0] - a[0] (x) a[m] )
";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Example,
    General,
}

impl Profile {
    pub fn source(self) -> &'static str {
        match self {
            Profile::Example => EXAMPLE_SOURCE,
            Profile::General => GENERAL_SOURCE,
        }
    }

    pub fn presentation(self) -> Presentation {
        parse_presentation(self.source()).expect("built-in presentation is valid")
    }

    pub fn from_name(name: &str) -> Option<Profile> {
        match name {
            "example" => Some(Profile::Example),
            "general" => Some(Profile::General),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{example_algebra, general_algebra};

    #[test]
    fn builtin_sources_match_hand_coded_tables() {
        for (profile, hand) in [(Profile::Example, example_algebra()), (Profile::General, general_algebra())] {
            let parsed = profile.presentation().algebra();
            assert_eq!(parsed.brackets().to_string(), hand.brackets().to_string());
            assert_eq!(parsed.cotails(), hand.cotails());
            assert_eq!(parsed, hand);
        }
    }

    #[test]
    fn expressions() {
        let alg = Profile::Example.presentation().algebra();
        let eval = |s: &str| parse_expression(s, &alg).unwrap().to_string();
        assert_eq!(eval("comm(b[2], b[-2])"), "4*b[0] - 8/3*a[0]^3");
        assert_eq!(eval("a[1]*a[-1]"), "a[-1]*a[1] + a[0]");
        assert_eq!(eval("H^0"), "1");
        assert_eq!(eval("comm(H, b[5])"), "5*b[5]");
        assert!(parse_expression("a[m]", &alg).is_err());
    }

    #[test]
    fn missing_delta_is_a_grading_error() {
        let src = "generator a : mode ; grade m\nbracket [a[m], a[n]] = m * a[0]\n";
        let e = parse_presentation(src).unwrap_err();
        assert!(e.message.contains("grading"), "{e}");
        assert_eq!(e.line, 2);
    }

    #[test]
    fn empty_source_is_valid() {
        let p = parse_presentation("").unwrap();
        assert!(p.families.is_empty());
        assert!(p.algebra().window_generators(3).is_empty());
    }
}
