//! Recursive-descent parser producing an untyped syntax tree.
//!
//! Expression precedence, loosest first: `+ -`, `(x)`, `* /`, unary `-`,
//! `^INT`, atoms.

use num_bigint::BigInt;

use super::lexer::{tokenize, Pos, Tok, Token};
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Ident(String),
    Index(String, Box<Expr>),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
    /// Source text of the atom or operator that produced this node.
    pub text: String,
}

impl Expr {
    /// Position of the leftmost token (ignoring parentheses).
    pub fn start(&self) -> Pos {
        match &self.kind {
            ExprKind::Add(x, _)
            | ExprKind::Sub(x, _)
            | ExprKind::Mul(x, _)
            | ExprKind::Div(x, _)
            | ExprKind::Tensor(x, _)
            | ExprKind::Pow(x, _) => x.start(),
            _ => self.pos,
        }
    }
}

/// `IDENT` or `IDENT[IDENT]` on the left of a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub family: String,
    pub var: Option<String>,
    pub pos: Pos,
    pub var_pos: Pos,
}

/// `IDENT` or `IDENT[INT]` in a `central` list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenRef {
    pub family: String,
    pub mode: Option<i64>,
    pub pos: Pos,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexKey {
    Index(i64),
    Default,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Param { name: String, value: BigRationalLit },
    IndexedParam { name: String, entries: Vec<(IndexKey, BigRationalLit, Pos)> },
    Generator { name: String, has_mode: bool, grade: Option<Expr> },
    Central(Vec<GenRef>),
    Bracket { left: Pattern, right: Pattern, rhs: Expr },
    Cotail { pattern: Pattern, rhs: Expr },
}

/// A literal `-p/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigRationalLit {
    pub numer: BigInt,
    pub denom: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub kind: DeclKind,
    pub pos: Pos,
    /// Source text of the declaration's first line.
    pub text: String,
}

struct Parser<'a> {
    toks: &'a [Token],
    i: usize,
    source: &'a str,
}

fn line_text(source: &str, line: usize) -> String {
    source.lines().nth(line.saturating_sub(1)).unwrap_or("").trim().to_string()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.i)
    }

    /// True at a token that begins a new declaration.
    fn at_decl_start(&self) -> bool {
        self.peek().is_some_and(|t| t.line_start && t.pos.column == 1)
    }

    fn peek_tok(&self) -> Option<&'a Tok> {
        if self.at_decl_start() {
            None
        } else {
            self.peek().map(|t| &t.tok)
        }
    }

    fn end_pos(&self) -> Pos {
        match self.toks.get(self.i.saturating_sub(1)) {
            Some(t) => Pos { line: t.pos.line, column: t.pos.column + t.text.chars().count() },
            None => Pos { line: 1, column: 1 },
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(t) if !self.at_decl_start() => ParseError::new(t.pos, message, t.text.clone()),
            _ => {
                let pos = self.end_pos();
                ParseError::new(pos, message, line_text(self.source, pos.line))
            }
        }
    }

    fn found(&self) -> String {
        match self.peek_tok() {
            Some(t) => t.describe(),
            None => "end of declaration".to_string(),
        }
    }

    fn advance(&mut self) -> &'a Token {
        let t = &self.toks[self.i];
        self.i += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek_tok() == Some(tok) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<&'a Token, ParseError> {
        if self.peek_tok() == Some(&tok) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("expected {}, found {}", tok.describe(), self.found())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        match self.peek_tok() {
            Some(Tok::Ident(_)) => Ok(self.advance()),
            _ => Err(self.error_here(format!("expected {what}, found {}", self.found()))),
        }
    }

    fn ident_name(token: &Token) -> String {
        match &token.tok {
            Tok::Ident(s) => s.clone(),
            _ => unreachable!("checked by caller"),
        }
    }

    fn small_int(&mut self, what: &str) -> Result<i64, ParseError> {
        let negative = self.eat(&Tok::Minus);
        match self.peek_tok() {
            Some(Tok::Int(n)) => {
                let t = self.advance();
                let n = if negative { -n } else { n.clone() };
                i64::try_from(n).map_err(|_| ParseError::new(t.pos, format!("{what} is out of range"), t.text.clone()))
            }
            _ => Err(self.error_here(format!("expected {what}, found {}", self.found()))),
        }
    }

    fn rational(&mut self) -> Result<BigRationalLit, ParseError> {
        let negative = self.eat(&Tok::Minus);
        let numer = match self.peek_tok() {
            Some(Tok::Int(n)) => {
                self.advance();
                if negative { -n } else { n.clone() }
            }
            _ => return Err(self.error_here(format!("expected a rational literal, found {}", self.found()))),
        };
        let denom = if self.eat(&Tok::Slash) {
            match self.peek_tok() {
                Some(Tok::Int(d)) => {
                    let t = self.advance();
                    if d == &BigInt::from(0) {
                        return Err(ParseError::new(t.pos, "zero denominator", t.text.clone()));
                    }
                    d.clone()
                }
                _ => return Err(self.error_here(format!("expected a denominator, found {}", self.found()))),
            }
        } else {
            BigInt::from(1)
        };
        Ok(BigRationalLit { numer, denom })
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let family = self.ident("a generator family")?;
        let mut var = None;
        let mut var_pos = family.pos;
        if self.eat(&Tok::LBracket) {
            let v = self.ident("a mode variable")?;
            var_pos = v.pos;
            var = Some(Self::ident_name(v));
            self.expect(Tok::RBracket)?;
        }
        Ok(Pattern { family: Self::ident_name(family), var, pos: family.pos, var_pos })
    }

    fn gen_ref(&mut self) -> Result<GenRef, ParseError> {
        let family = self.ident("a generator")?;
        let mut text = family.text.clone();
        let mut mode = None;
        if self.eat(&Tok::LBracket) {
            let m = self.small_int("an integer mode")?;
            self.expect(Tok::RBracket)?;
            text = format!("{text}[{m}]");
            mode = Some(m);
        }
        Ok(GenRef { family: Self::ident_name(family), mode, pos: family.pos, text })
    }

    fn finish_decl(&self) -> Result<(), ParseError> {
        if self.peek_tok().is_some() {
            return Err(self.error_here(format!("unexpected {} after declaration", self.found())));
        }
        Ok(())
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let head = self.peek().expect("called at a token");
        if !(head.line_start && head.pos.column == 1) {
            return Err(ParseError::new(head.pos, "declarations must start in column 1", head.text.clone()));
        }
        let keyword = match &head.tok {
            Tok::Ident(k) => k.clone(),
            _ => return Err(ParseError::new(head.pos, "expected a declaration keyword", head.text.clone())),
        };
        self.advance();
        let kind = match keyword.as_str() {
            "param" => {
                let name = Self::ident_name(self.ident("a parameter name")?);
                if self.peek_tok() == Some(&Tok::Ident("indexed".into())) {
                    self.advance();
                    self.expect(Tok::LBrace)?;
                    let mut entries = Vec::new();
                    if !self.eat(&Tok::RBrace) {
                        loop {
                            let pos = self.peek().map(|t| t.pos).unwrap_or_default();
                            let key = if self.peek_tok() == Some(&Tok::Ident("default".into())) {
                                self.advance();
                                IndexKey::Default
                            } else {
                                IndexKey::Index(self.small_int("an integer index or `default`")?)
                            };
                            self.expect(Tok::Colon)?;
                            entries.push((key, self.rational()?, pos));
                            if self.eat(&Tok::RBrace) {
                                break;
                            }
                            self.expect(Tok::Comma)?;
                        }
                    }
                    DeclKind::IndexedParam { name, entries }
                } else {
                    self.expect(Tok::Eq)?;
                    DeclKind::Param { name, value: self.rational()? }
                }
            }
            "generator" => {
                let name = Self::ident_name(self.ident("a generator family name")?);
                let mut has_mode = false;
                if self.eat(&Tok::Colon) {
                    let m = self.ident("`mode`")?;
                    if m.tok != Tok::Ident("mode".into()) {
                        return Err(ParseError::new(m.pos, "expected `mode`", m.text.clone()));
                    }
                    has_mode = true;
                }
                let mut grade = None;
                if self.eat(&Tok::Semi) {
                    let g = self.ident("`grade`")?;
                    if g.tok != Tok::Ident("grade".into()) {
                        return Err(ParseError::new(g.pos, "expected `grade`", g.text.clone()));
                    }
                    grade = Some(self.expr()?);
                }
                DeclKind::Generator { name, has_mode, grade }
            }
            "central" => {
                let mut gens = vec![self.gen_ref()?];
                while self.eat(&Tok::Comma) {
                    gens.push(self.gen_ref()?);
                }
                DeclKind::Central(gens)
            }
            "bracket" => {
                self.expect(Tok::LBracket)?;
                let left = self.pattern()?;
                self.expect(Tok::Comma)?;
                let right = self.pattern()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Eq)?;
                DeclKind::Bracket { left, right, rhs: self.expr()? }
            }
            "cotail" => {
                let pattern = self.pattern()?;
                self.expect(Tok::Eq)?;
                DeclKind::Cotail { pattern, rhs: self.expr()? }
            }
            other => {
                return Err(ParseError::new(
                    head.pos,
                    format!("unknown declaration `{other}` (expected param, generator, central, bracket or cotail)"),
                    head.text.clone(),
                ))
            }
        };
        self.finish_decl()?;
        Ok(Decl { kind, pos: head.pos, text: line_text(self.source, head.pos.line) })
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.tensor()?;
        loop {
            let op = match self.peek_tok() {
                Some(Tok::Plus) => ExprKind::Add as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                Some(Tok::Minus) => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            let t = self.advance();
            let rhs = self.tensor()?;
            lhs = Expr { kind: op(Box::new(lhs), Box::new(rhs)), pos: t.pos, text: t.text.clone() };
        }
    }

    fn tensor(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        while self.peek_tok() == Some(&Tok::Tensor) {
            let t = self.advance();
            let rhs = self.product()?;
            lhs = Expr { kind: ExprKind::Tensor(Box::new(lhs), Box::new(rhs)), pos: t.pos, text: t.text.clone() };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_tok() {
                Some(Tok::Star) => ExprKind::Mul as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                Some(Tok::Slash) => ExprKind::Div,
                _ => return Ok(lhs),
            };
            let t = self.advance();
            let rhs = self.unary()?;
            lhs = Expr { kind: op(Box::new(lhs), Box::new(rhs)), pos: t.pos, text: t.text.clone() };
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_tok() == Some(&Tok::Minus) {
            let t = self.advance();
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos: t.pos, text: t.text.clone() });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek_tok() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let caret = self.advance();
        match self.peek_tok() {
            Some(Tok::Int(n)) => {
                let t = self.advance();
                let e = u32::try_from(n.clone())
                    .ok()
                    .filter(|&e| e <= 64)
                    .ok_or_else(|| ParseError::new(t.pos, "exponent must be an integer between 0 and 64", t.text.clone()))?;
                Ok(Expr { kind: ExprKind::Pow(Box::new(base), e), pos: caret.pos, text: caret.text.clone() })
            }
            _ => Err(self.error_here(format!(
                "expected a nonnegative integer exponent, found {}",
                self.found()
            ))),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek_tok() {
            Some(Tok::Int(n)) => {
                let t = self.advance();
                Ok(Expr { kind: ExprKind::Int(n.clone()), pos: t.pos, text: t.text.clone() })
            }
            Some(Tok::Ident(name)) => {
                let t = self.advance();
                let name = name.clone();
                if self.eat(&Tok::LBracket) {
                    let index = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    Ok(Expr { kind: ExprKind::Index(name, Box::new(index)), pos: t.pos, text: t.text.clone() })
                } else if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(&Tok::RParen) {
                                break;
                            }
                            self.expect(Tok::Comma)?;
                        }
                    }
                    Ok(Expr { kind: ExprKind::Call(name, args), pos: t.pos, text: t.text.clone() })
                } else {
                    Ok(Expr { kind: ExprKind::Ident(name), pos: t.pos, text: t.text.clone() })
                }
            }
            Some(Tok::LParen) => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error_here(format!("expected an expression, found {}", self.found()))),
        }
    }
}

pub fn parse_declarations(source: &str) -> Result<Vec<Decl>, ParseError> {
    let toks = tokenize(source)?;
    let mut p = Parser { toks: &toks, i: 0, source };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.decl()?);
    }
    Ok(out)
}

/// Parses a single expression; newlines are insignificant.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut toks = tokenize(source)?;
    for t in &mut toks {
        t.line_start = false;
    }
    let mut p = Parser { toks: &toks, i: 0, source };
    if p.peek().is_none() {
        return Err(ParseError::new(Pos { line: 1, column: 1 }, "empty expression", ""));
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error_here(format!("unexpected {} after expression", p.found())));
    }
    Ok(e)
}
