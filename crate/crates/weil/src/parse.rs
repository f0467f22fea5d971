//! Expression and diagram-file parsing plus the matching printers.
//!
//! Expression grammar (no unary minus on identifiers, no division of
//! expressions; signs belong to integer literals and exponents are
//! nonnegative integers):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' nat)?
//! base     := rational | identifier | '(' expr ')'
//! rational := int ('/' posint)?
//! ```
//!
//! Identifiers are the reserved names `x`, `x1..xk` and `d1..dn`.
//!
//! Diagram files are line oriented with `#` comments:
//!
//! ```text
//! inftype NAME = D^N {(i,...),...}
//! arrow NAME : SRC -> DST = (poly, ...)
//! apex NAME
//! leg ARROW
//! ```

use crate::calculus::Expr;
use crate::inftype::{InfMap, InfType};
use crate::poly::{Poly, Rat};
use crate::quasicolim::{ApexCocone, Diagram};
use num::bigint::BigInt;
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError { line, col, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                out.push(Spanned { tok: Tok::Plus, line, col });
                i += 1;
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, line, col });
                i += 1;
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, line, col });
                i += 1;
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, line, col });
                i += 1;
            }
            '/' => {
                out.push(Spanned { tok: Tok::Slash, line, col });
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, line, col });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, line, col });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = BigInt::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| ParseError::new(line, col, "bad number"))?;
                out.push(Spanned { tok: Tok::Num(n), line, col });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(s), line, col });
            }
            other => {
                return Err(ParseError::new(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
    resolve: &'a dyn Fn(&str) -> Option<usize>,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.line, self.end_col))
    }

    fn bump(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, msg)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Expr::Add(Box::new(acc), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            let rhs = self.factor()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let n = self.nat()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn nat(&mut self) -> Result<u32, ParseError> {
        match self.bump().map(|s| s.tok.clone()) {
            Some(Tok::Num(n)) => u32::try_from(n.clone())
                .map_err(|_| self.err("exponent out of range")),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("expected a nonnegative integer exponent"))
            }
        }
    }

    fn rational(&mut self, neg: bool) -> Result<Expr, ParseError> {
        let n = match self.bump().map(|s| s.tok.clone()) {
            Some(Tok::Num(n)) => n,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err("expected a number"));
            }
        };
        let numer = if neg { -n } else { n };
        if matches!(self.peek(), Some(Tok::Slash)) {
            self.bump();
            match self.bump().map(|s| s.tok.clone()) {
                Some(Tok::Num(d)) => {
                    if d.is_zero() {
                        self.pos = self.pos.saturating_sub(1);
                        return Err(self.err("zero denominator"));
                    }
                    Ok(Expr::Const(Rat::new(numer, d)))
                }
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    Err(self.err("expected a positive denominator"))
                }
            }
        } else {
            Ok(Expr::Const(Rat::from_integer(numer)))
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.bump();
                self.rational(true)
            }
            Some(Tok::Num(_)) => self.rational(false),
            Some(Tok::Ident(name)) => {
                let (line, col) = self.here();
                self.bump();
                match (self.resolve)(&name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(ParseError::new(line, col, format!("unknown identifier `{name}`"))),
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                match self.bump().map(|s| s.tok.clone()) {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        Err(self.err("expected `)`"))
                    }
                }
            }
            _ => Err(self.err("expected a number, identifier or `(`")),
        }
    }
}

fn parse_tokens(
    toks: &[Spanned],
    line: usize,
    end_col: usize,
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<Expr, ParseError> {
    let mut p = ExprParser { toks, pos: 0, line, end_col, resolve };
    let e = p.expr()?;
    if p.pos < toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses an expression with a custom identifier resolver.
pub fn parse_expr_with(
    text: &str,
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<Expr, ParseError> {
    let toks = tokenize(text, 1)?;
    parse_tokens(&toks, 1, text.chars().count() + 1, resolve)
}

/// Parses a unary expression in the variable `x` (alias `x1`).
pub fn parse_unary_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_with(text, &|name| match name {
        "x" | "x1" => Some(0),
        _ => None,
    })
}

/// Parses an expression in the state variables `x1..xk` (`x` allowed when
/// `k = 1`).
pub fn parse_state_expr(text: &str, k: usize) -> Result<Expr, ParseError> {
    parse_expr_with(text, &|name| resolve_state(name, k))
}

fn resolve_state(name: &str, k: usize) -> Option<usize> {
    if name == "x" && k == 1 {
        return Some(0);
    }
    let idx: usize = name.strip_prefix('x')?.parse().ok()?;
    (1..=k).contains(&idx).then(|| idx - 1)
}

fn resolve_d(name: &str, n: usize) -> Option<usize> {
    if name == "d" && n == 1 {
        return Some(0);
    }
    let idx: usize = name.strip_prefix('d')?.parse().ok()?;
    (1..=n).contains(&idx).then(|| idx - 1)
}

/// Parses a rational literal such as `2`, `-3/4`.
pub fn parse_rational(text: &str) -> Result<Rat, ParseError> {
    let e = parse_expr_with(text, &|_| None)?;
    match e {
        Expr::Const(r) => Ok(r),
        _ => Err(ParseError::new(1, 1, "expected a rational literal")),
    }
}

/// Converts a variables-only expression into a polynomial of the given
/// arity.
pub fn expr_to_poly(e: &Expr, arity: usize) -> Poly {
    match e {
        Expr::Const(c) => Poly::constant(arity, c.clone()),
        Expr::Var(i) => Poly::var(*i, arity),
        Expr::Add(a, b) => expr_to_poly(a, arity).add(&expr_to_poly(b, arity)),
        Expr::Sub(a, b) => expr_to_poly(a, arity).sub(&expr_to_poly(b, arity)),
        Expr::Mul(a, b) => expr_to_poly(a, arity).mul(&expr_to_poly(b, arity)),
        Expr::Pow(a, n) => expr_to_poly(a, arity).pow(*n),
        Expr::Compose(g, f) => expr_to_poly(g, 1).substitute(&[expr_to_poly(f, arity)]),
    }
}

/// Splits `[a; b; c]` (brackets optional) into component strings.
pub fn split_components(text: &str) -> Vec<String> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(t);
    inner.split(';').map(|s| s.trim().to_string()).collect()
}

/// Precedence levels used by the printer.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Pow(..) => 3,
        Expr::Const(_) | Expr::Var(_) | Expr::Compose(..) => 4,
    }
}

/// Prints an expression so that reparsing yields the identical tree:
/// left-nested chains print flat, right-nested ones keep parentheses.
pub fn print_expr(e: &Expr, names: &[String]) -> String {
    fn atom(s: String, e: &Expr, min: u8) -> String {
        if prec(e) < min {
            format!("({s})")
        } else {
            s
        }
    }
    fn go(e: &Expr, names: &[String]) -> String {
        match e {
            Expr::Const(c) => crate::poly::format_rat(c),
            Expr::Var(i) => names[*i].clone(),
            Expr::Add(a, b) => format!(
                "{} + {}",
                atom(go(a, names), a, 1),
                atom(go(b, names), b, 2)
            ),
            Expr::Sub(a, b) => format!(
                "{} - {}",
                atom(go(a, names), a, 1),
                atom(go(b, names), b, 2)
            ),
            Expr::Mul(a, b) => format!(
                "{}*{}",
                atom(go(a, names), a, 2),
                atom(go(b, names), b, 3)
            ),
            Expr::Pow(a, n) => format!("{}^{}", atom(go(a, names), a, 4), n),
            Expr::Compose(g, f) => {
                let inner = format!("({})", go(f, names));
                let sub = vec![inner];
                go(g, &sub)
            }
        }
    }
    go(e, names)
}

// ---------------------------------------------------------------------------
// Diagram files
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcdError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {msg}")]
    Structure { line: usize, msg: String },
    #[error("arrow `{arrow}`: {msg}")]
    BadArrow { arrow: String, msg: String },
}

fn structure(line: usize, msg: impl Into<String>) -> QcdError {
    QcdError::Structure { line, msg: msg.into() }
}

/// Splits a parenthesized comma list at depth one: `(a, b, c)` into the
/// parts, respecting nested parentheses inside the parts.
fn split_paren_list(s: &str, line: usize) -> Result<Vec<String>, QcdError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|u| u.strip_suffix(')'))
        .ok_or_else(|| structure(line, "expected a parenthesized list"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in inner.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| structure(line, "unbalanced parentheses"))?;
                cur.push(c);
            }
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(structure(line, "unbalanced parentheses"));
    }
    parts.push(cur.trim().to_string());
    Ok(parts)
}

/// Parses `D^N {(i,...),...}` into an infinitesimal type.
fn parse_inftype_body(s: &str, line: usize) -> Result<InfType, QcdError> {
    let t = s.trim();
    let rest = t
        .strip_prefix("D^")
        .ok_or_else(|| structure(line, "expected `D^<n> {...}`"))?;
    let brace = rest.find('{');
    let (num, lists_src) = match brace {
        Some(i) => (&rest[..i], rest[i..].trim()),
        None => (rest, "{}"),
    };
    let n: usize = num
        .trim()
        .parse()
        .map_err(|_| structure(line, "bad arity after `D^`"))?;
    let inner = lists_src
        .strip_prefix('{')
        .and_then(|u| u.strip_suffix('}'))
        .ok_or_else(|| structure(line, "expected `{...}` after the arity"))?;
    let mut lists: Vec<Vec<usize>> = Vec::new();
    let trimmed = inner.trim();
    if !trimmed.is_empty() {
        for part in split_top_level_tuples(trimmed, line)? {
            let idxs = split_paren_list(&part, line)?;
            let mut list = Vec::new();
            for ix in idxs {
                let v: usize = ix
                    .trim()
                    .parse()
                    .map_err(|_| structure(line, format!("bad index `{ix}`")))?;
                list.push(v);
            }
            lists.push(list);
        }
    }
    InfType::new(n, &lists).map_err(|e| structure(line, e.to_string()))
}

/// Splits `(1,2),(1,3)` into the tuples.
fn split_top_level_tuples(s: &str, line: usize) -> Result<Vec<String>, QcdError> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| structure(line, "unbalanced parentheses"))?;
                cur.push(c);
            }
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    parts.push(cur.trim().to_string());
                }
                cur = String::new();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(structure(line, "unbalanced parentheses"));
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    Ok(parts)
}

/// Parses a diagram file into a validated cocone.
pub fn parse_diagram(text: &str) -> Result<ApexCocone, QcdError> {
    struct RawArrow {
        line: usize,
        name: String,
        src: String,
        dst: String,
        coords: Vec<String>,
    }
    let mut types: BTreeMap<String, (usize, InfType)> = BTreeMap::new();
    let mut arrows: Vec<RawArrow> = Vec::new();
    let mut apex_name: Option<(usize, String)> = None;
    let mut leg_names: Vec<(usize, String)> = Vec::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
        match head {
            "inftype" => {
                let (name, body) = rest
                    .split_once('=')
                    .ok_or_else(|| structure(line_no, "expected `inftype NAME = D^n {...}`"))?;
                let name = name.trim().to_string();
                if types.contains_key(&name) {
                    return Err(structure(line_no, format!("duplicate inftype `{name}`")));
                }
                let t = parse_inftype_body(body, line_no)?;
                types.insert(name, (line_no, t));
            }
            "arrow" => {
                let (sig, body) = rest
                    .split_once('=')
                    .ok_or_else(|| structure(line_no, "expected `arrow NAME : SRC -> DST = (...)`"))?;
                let (name, ends) = sig
                    .split_once(':')
                    .ok_or_else(|| structure(line_no, "expected `NAME : SRC -> DST`"))?;
                let (src, dst) = ends
                    .split_once("->")
                    .ok_or_else(|| structure(line_no, "expected `SRC -> DST`"))?;
                let coords = split_paren_list(body, line_no)?;
                arrows.push(RawArrow {
                    line: line_no,
                    name: name.trim().to_string(),
                    src: src.trim().to_string(),
                    dst: dst.trim().to_string(),
                    coords,
                });
            }
            "apex" => {
                if apex_name.is_some() {
                    return Err(structure(line_no, "duplicate apex declaration"));
                }
                apex_name = Some((line_no, rest.trim().to_string()));
            }
            "leg" => {
                leg_names.push((line_no, rest.trim().to_string()));
            }
            other => {
                return Err(structure(line_no, format!("unknown directive `{other}`")));
            }
        }
    }

    let (apex_line, apex_name) =
        apex_name.ok_or_else(|| structure(text.lines().count(), "missing `apex` declaration"))?;
    let apex = types
        .get(&apex_name)
        .ok_or_else(|| structure(apex_line, format!("apex `{apex_name}` is not declared")))?
        .1
        .clone();

    // Build the maps, resolving d-variables against the source arity.
    let mut built: BTreeMap<String, (RawArrow, InfMap)> = BTreeMap::new();
    for raw in arrows {
        let src = &types
            .get(&raw.src)
            .ok_or_else(|| structure(raw.line, format!("unknown object `{}`", raw.src)))?
            .1;
        let dst = &types
            .get(&raw.dst)
            .ok_or_else(|| structure(raw.line, format!("unknown object `{}`", raw.dst)))?
            .1;
        let arity = src.arity();
        let mut coords = Vec::new();
        for c in &raw.coords {
            let e = parse_expr_with(c, &|name| resolve_d(name, arity)).map_err(|e| {
                QcdError::BadArrow { arrow: raw.name.clone(), msg: e.to_string() }
            })?;
            coords.push(expr_to_poly(&e, arity));
        }
        let m = InfMap::new(src.clone(), dst.clone(), coords).map_err(|e| QcdError::BadArrow {
            arrow: raw.name.clone(),
            msg: e.to_string(),
        })?;
        if built.contains_key(&raw.name) {
            return Err(structure(raw.line, format!("duplicate arrow `{}`", raw.name)));
        }
        built.insert(raw.name.clone(), (raw, m));
    }

    let mut legs: BTreeMap<String, InfMap> = BTreeMap::new();
    let mut leg_arrow_names: Vec<String> = Vec::new();
    for (line_no, leg) in leg_names {
        let (raw, m) = built
            .get(&leg)
            .ok_or_else(|| structure(line_no, format!("leg references unknown arrow `{leg}`")))?;
        if raw.dst != apex_name {
            return Err(QcdError::BadArrow {
                arrow: leg.clone(),
                msg: "leg arrow must target the apex".to_string(),
            });
        }
        if legs.insert(raw.src.clone(), m.clone()).is_some() {
            return Err(structure(line_no, format!("object `{}` has two legs", raw.src)));
        }
        leg_arrow_names.push(leg);
    }

    let mut diagram = Diagram::new();
    for (name, (_, t)) in &types {
        if name != &apex_name {
            diagram
                .add_object(name, t.clone())
                .map_err(|e| structure(0, e.to_string()))?;
        }
    }
    for (name, (raw, m)) in &built {
        if leg_arrow_names.contains(name) {
            continue;
        }
        if raw.src == apex_name || raw.dst == apex_name {
            return Err(QcdError::BadArrow {
                arrow: name.clone(),
                msg: "only legs may involve the apex".to_string(),
            });
        }
        diagram
            .add_arrow(name, &raw.src, &raw.dst, m.clone())
            .map_err(|e| structure(raw.line, e.to_string()))?;
    }
    ApexCocone::new(diagram, apex, legs).map_err(|e| structure(0, e.to_string()))
}

/// Renders a cocone in the diagram file format (used to ship fixture files
/// that match their programmatic builders exactly).
pub fn write_diagram(cocone: &ApexCocone, header: &str) -> String {
    let mut out = String::new();
    for l in header.lines() {
        out.push_str("# ");
        out.push_str(l);
        out.push('\n');
    }
    for (name, t) in cocone.diagram().objects() {
        out.push_str(&format!("inftype {name} = {}\n", fmt_inftype(t)));
    }
    out.push_str(&format!("inftype apex = {}\n", fmt_inftype(cocone.apex())));
    for a in cocone.diagram().arrows() {
        out.push_str(&format!(
            "arrow {} : {} -> {} = {}\n",
            a.name,
            a.src,
            a.dst,
            a.map
        ));
    }
    for (obj, leg) in cocone.legs() {
        out.push_str(&format!("arrow leg_{obj} : {obj} -> apex = {leg}\n"));
    }
    out.push_str("apex apex\n");
    for obj in cocone.legs().keys() {
        out.push_str(&format!("leg leg_{obj}\n"));
    }
    out
}

fn fmt_inftype(t: &InfType) -> String {
    let mut s = format!("D^{} {{", t.arity());
    let mut first = true;
    for list in t.vanishing() {
        if !first {
            s.push_str(", ");
        }
        first = false;
        s.push('(');
        for (j, v) in list.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&v.to_string());
        }
        s.push(')');
    }
    s.push('}');
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arity = self.arity().max(1);
        let names = crate::poly::state_names(arity);
        write!(f, "{}", print_expr(self, &names))
    }
}
