//! Concrete syntax: tokenizer, recursive-descent parser and printer.
//!
//! The grammar is published in `docs/grammar.md`.

use std::fmt;
use std::sync::Arc;

use crate::formula::{name, Bound, Formula};

/// Byte range into the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFormula {
    pub root: Formula,
    /// One span per AST node, in the order of [`Formula::preorder`].
    pub spans: Vec<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}; expected one of: {}", expected.join(", "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub message: String,
    pub expected: Vec<String>,
}

const MAX_DEPTH: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Plus,
    Minus,
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    EqEq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Not => "`!`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Arrow => "`->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Dot => "`.`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Le => "`<=`",
            Tok::Lt => "`<`",
            Tok::Ge => "`>=`",
            Tok::Gt => "`>`",
            Tok::Eq => "`=`",
            Tok::EqEq => "`==`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

const KEYWORDS: &[&str] =
    &["X", "WX", "Y", "WY", "U", "R", "S", "T", "F", "G", "P", "H", "true", "false", "mod", "inf"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

struct Lexer {
    toks: Vec<(Tok, Span)>,
}

impl Lexer {
    fn run(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut lx = Lexer { toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let b = bytes[i];
            if b.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if b == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            let start = i;
            let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
            let tok = match two {
                "->" => Some(Tok::Arrow),
                "<=" => Some(Tok::Le),
                ">=" => Some(Tok::Ge),
                "==" => Some(Tok::EqEq),
                _ => None,
            };
            if let Some(t) = tok {
                i += 2;
                lx.toks.push((t, Span { start, end: i }));
                continue;
            }
            let tok = match b {
                b'!' => Some(Tok::Not),
                b'&' => Some(Tok::And),
                b'|' => Some(Tok::Or),
                b'(' => Some(Tok::LParen),
                b')' => Some(Tok::RParen),
                b'[' => Some(Tok::LBracket),
                b']' => Some(Tok::RBracket),
                b'.' => Some(Tok::Dot),
                b'+' => Some(Tok::Plus),
                b'-' => Some(Tok::Minus),
                b'<' => Some(Tok::Lt),
                b'>' => Some(Tok::Gt),
                b'=' => Some(Tok::Eq),
                _ => None,
            };
            if let Some(t) = tok {
                i += 1;
                lx.toks.push((t, Span { start, end: i }));
                continue;
            }
            if b.is_ascii_digit() {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: u64 = src[start..i].parse().map_err(|_| {
                    error_at(src, start, "integer literal out of range".into(), vec!["integer".into()])
                })?;
                lx.toks.push((Tok::Int(n), Span { start, end: i }));
                continue;
            }
            if b.is_ascii_alphabetic() || b == b'_' {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(src[start..i].to_string()), Span { start, end: i }));
                continue;
            }
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(error_at(src, start, format!("unexpected character `{ch}`"), vec!["formula".into()]));
        }
        let end = src.len();
        lx.toks.push((Tok::Eof, Span { start: end, end }));
        Ok(lx.toks)
    }
}

fn error_at(src: &str, offset: usize, message: String, expected: Vec<String>) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |p| before[p + 1..].chars().count()) + 1;
    ParseError { line, column, offset, message, expected }
}

/// A parsed subtree with its preorder span table.
struct Node {
    f: Formula,
    spans: Vec<Span>,
}

impl Node {
    fn span(&self) -> Span {
        self.spans[0]
    }
    fn leaf(f: Formula, span: Span) -> Node {
        Node { f, spans: vec![span] }
    }
    fn unary(span: Span, child: Node, build: impl FnOnce(Arc<Formula>) -> Formula) -> Node {
        let mut spans = vec![span];
        spans.extend(child.spans);
        Node { f: build(Arc::new(child.f)), spans }
    }
    fn binary(
        span: Span,
        a: Node,
        b: Node,
        build: impl FnOnce(Arc<Formula>, Arc<Formula>) -> Formula,
    ) -> Node {
        let mut spans = vec![span];
        spans.extend(a.spans);
        spans.extend(b.spans);
        Node { f: build(Arc::new(a.f), Arc::new(b.f)), spans }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    depth: usize,
}

type PResult = Result<Node, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }
    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }
    fn span(&self) -> Span {
        self.toks[self.pos].1
    }
    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let (tok, span) = &self.toks[self.pos];
        Err(error_at(
            self.src,
            span.start,
            format!("unexpected {tok}"),
            expected.iter().map(|s| s.to_string()).collect(),
        ))
    }
    fn expect(&mut self, t: Tok, what: &str) -> Result<Span, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.fail(&[what])
        }
    }
    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let span = self.span();
            return Err(error_at(self.src, span.start, "formula nested too deeply".into(), vec![]));
        }
        Ok(())
    }

    fn formula(&mut self) -> PResult {
        self.enter()?;
        let r = self.implication();
        self.depth -= 1;
        r
    }

    fn implication(&mut self) -> PResult {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            let span = lhs.span().join(rhs.span());
            return Ok(Node::binary(span, lhs, rhs, Formula::Implies));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            let span = lhs.span().join(rhs.span());
            lhs = Node::binary(span, lhs, rhs, Formula::Or);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.temporal()?;
            let span = lhs.span().join(rhs.span());
            lhs = Node::binary(span, lhs, rhs, Formula::And);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> PResult {
        self.enter()?;
        let r = self.temporal_inner();
        self.depth -= 1;
        r
    }

    fn temporal_inner(&mut self) -> PResult {
        let lhs = self.unary()?;
        let op = match self.peek() {
            Tok::Ident(s) if matches!(s.as_str(), "U" | "R" | "S" | "T") => s.clone(),
            _ => return Ok(lhs),
        };
        self.bump();
        let w = self.bound()?;
        let rhs = self.temporal()?;
        let span = lhs.span().join(rhs.span());
        Ok(Node::binary(span, lhs, rhs, |a, b| match op.as_str() {
            "U" => Formula::Until(w, a, b),
            "R" => Formula::Release(w, a, b),
            "S" => Formula::Since(w, a, b),
            _ => Formula::Triggered(w, a, b),
        }))
    }

    fn bound(&mut self) -> Result<Bound, ParseError> {
        if *self.peek() != Tok::LBracket {
            return Ok(Bound::Infinite);
        }
        self.bump();
        let w = match self.bump().0 {
            Tok::Int(n) => Bound::Finite(n),
            Tok::Ident(s) if s == "inf" => Bound::Infinite,
            _ => {
                self.pos -= 1;
                return self.fail(&["integer bound", "`inf`"]);
            }
        };
        self.expect(Tok::RBracket, "`]`")?;
        Ok(w)
    }

    fn unary(&mut self) -> PResult {
        self.enter()?;
        let r = self.unary_inner();
        self.depth -= 1;
        r
    }

    fn unary_inner(&mut self) -> PResult {
        let start = self.span();
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                let body = self.unary()?;
                Ok(Node::unary(start.join(body.span()), body, Formula::Not))
            }
            Tok::Ident(s) if *self.peek_at(1) == Tok::Dot && !is_keyword(&s) => {
                self.bump();
                self.bump();
                let body = self.formula()?;
                let var = name(&s);
                Ok(Node::unary(start.join(body.span()), body, |b| Formula::Freeze(var, b)))
            }
            Tok::Ident(s) if matches!(s.as_str(), "X" | "WX" | "Y" | "WY" | "F" | "G" | "P" | "H") => {
                self.bump();
                let w = self.bound()?;
                let body = self.unary()?;
                let span = start.join(body.span());
                Ok(match s.as_str() {
                    "X" => Node::unary(span, body, |b| Formula::Next(w, b)),
                    "WX" => Node::unary(span, body, |b| Formula::WeakNext(w, b)),
                    "Y" => Node::unary(span, body, |b| Formula::Prev(w, b)),
                    "WY" => Node::unary(span, body, |b| Formula::WeakPrev(w, b)),
                    "F" => {
                        let t = Node::leaf(Formula::True, span);
                        Node::binary(span, t, body, |a, b| Formula::Until(w, a, b))
                    }
                    "G" => {
                        let t = Node::leaf(Formula::False, span);
                        Node::binary(span, t, body, |a, b| Formula::Release(w, a, b))
                    }
                    "P" => {
                        let t = Node::leaf(Formula::True, span);
                        Node::binary(span, t, body, |a, b| Formula::Since(w, a, b))
                    }
                    _ => {
                        let t = Node::leaf(Formula::False, span);
                        Node::binary(span, t, body, |a, b| Formula::Triggered(w, a, b))
                    }
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult {
        let (tok, span) = self.bump();
        match tok {
            Tok::LParen => {
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(s) if s == "true" => Ok(Node::leaf(Formula::True, span)),
            Tok::Ident(s) if s == "false" => Ok(Node::leaf(Formula::False, span)),
            Tok::Ident(s) if !is_keyword(&s) => {
                if matches!(self.peek(), Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt | Tok::Eq | Tok::EqEq) {
                    self.constraint(s, span)
                } else {
                    Ok(Node::leaf(Formula::Prop(name(&s)), span))
                }
            }
            _ => {
                if tok == Tok::Eof {
                    self.pos = self.toks.len() - 1;
                } else {
                    self.pos -= 1;
                }
                self.fail(&["proposition", "constraint", "`(`", "`!`", "unary operator", "`true`", "`false`"])
            }
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        match self.peek().clone() {
            Tok::Int(n) => {
                let off = self.span().start;
                self.bump();
                let v = i64::try_from(n).map_err(|_| {
                    error_at(self.src, off, "constant out of range".into(), vec!["integer".into()])
                })?;
                Ok(if neg { -v } else { v })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn constraint(&mut self, lhs: String, start: Span) -> PResult {
        let (op, _) = self.bump();
        let lhs = name(&lhs);
        // Right-hand side: `y`, `y + c`, `y - c` or an absolute constant.
        let rhs = match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                let c = match self.peek() {
                    Tok::Plus | Tok::Minus => self.signed_int()?,
                    _ => 0,
                };
                Some((name(&s), c))
            }
            _ => None,
        };
        let (rhs, c) = match rhs {
            Some(r) => r,
            None => {
                let c = self.signed_int()?;
                let end = self.toks[self.pos - 1].1;
                let span = start.join(end);
                let abs = |c| Formula::Abs { var: lhs.clone(), c };
                let f = match op {
                    Tok::Le => abs(c),
                    Tok::Lt => abs(c - 1),
                    Tok::Gt => Formula::not(abs(c)),
                    Tok::Ge => Formula::not(abs(c - 1)),
                    _ => {
                        return Err(error_at(
                            self.src,
                            start.start,
                            "equality against a constant is not supported".into(),
                            vec!["variable".into()],
                        ))
                    }
                };
                return Ok(spanned_all(f, span));
            }
        };
        if op == Tok::EqEq {
            match self.peek() {
                Tok::Ident(s) if s == "mod" => {
                    self.bump();
                }
                _ => return self.fail(&["`mod`"]),
            }
            let m = match self.peek().clone() {
                Tok::Int(m) if m >= 1 => {
                    self.bump();
                    m
                }
                _ => return self.fail(&["positive modulus"]),
            };
            let span = start.join(self.toks[self.pos - 1].1);
            return Ok(Node::leaf(Formula::Cong { lhs, rhs, m, c }, span));
        }
        let span = start.join(self.toks[self.pos - 1].1);
        let rel = |a: &Name, b: &Name, c: i64| Formula::Rel { lhs: a.clone(), rhs: b.clone(), c };
        let f = match op {
            Tok::Le => rel(&lhs, &rhs, c),
            Tok::Lt => rel(&lhs, &rhs, c - 1),
            Tok::Gt => Formula::not(rel(&lhs, &rhs, c)),
            Tok::Ge => Formula::not(rel(&lhs, &rhs, c - 1)),
            _ => Formula::and(rel(&lhs, &rhs, c), rel(&rhs, &lhs, -c)),
        };
        Ok(spanned_all(f, span))
    }
}

use crate::formula::Name;

fn spanned_all(f: Formula, span: Span) -> Node {
    let n = f.size();
    Node { f, spans: vec![span; n] }
}

pub fn parse(text: &str) -> Result<SourceFormula, ParseError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { src: text, toks, pos: 0, depth: 0 };
    let node = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["end of input", "binary operator"]);
    }
    Ok(SourceFormula { root: node.f, spans: node.spans })
}

pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, 0, &mut out);
    out
}

// Precedence levels: 1 `->`, 2 `|`, 3 `&`, 4 binary temporal, 5 unary.
fn write_formula(f: &Formula, ctx: u8, out: &mut String) {
    use Formula::*;
    let wrap = |level: u8, out: &mut String, body: &dyn Fn(&mut String)| {
        if ctx > level {
            out.push('(');
            body(out);
            out.push(')');
        } else {
            body(out);
        }
    };
    match f {
        True => out.push_str("true"),
        False => out.push_str("false"),
        Prop(p) => out.push_str(p),
        Rel { lhs, rhs, c } => {
            out.push_str(&format!("{lhs} <= {rhs}"));
            write_offset(*c, out);
        }
        Abs { var, c } => out.push_str(&format!("{var} <= {c}")),
        Cong { lhs, rhs, m, c } => {
            out.push_str(&format!("{lhs} == {rhs}"));
            write_offset(*c, out);
            out.push_str(&format!(" mod {m}"));
        }
        Not(a) => {
            out.push('!');
            if matches!(**a, Rel { .. } | Abs { .. } | Cong { .. }) {
                out.push('(');
                write_formula(a, 0, out);
                out.push(')');
            } else {
                write_formula(a, 5, out);
            }
        }
        Freeze(x, a) => wrap(0, out, &|out| {
            out.push_str(&format!("{x}. "));
            write_formula(a, 0, out);
        }),
        Next(w, a) | WeakNext(w, a) | Prev(w, a) | WeakPrev(w, a) => {
            let op = match f {
                Next(..) => "X",
                WeakNext(..) => "WX",
                Prev(..) => "Y",
                _ => "WY",
            };
            out.push_str(op);
            write_bound(*w, out);
            out.push(' ');
            write_formula(a, 5, out);
        }
        Implies(a, b) => wrap(1, out, &|out| {
            write_formula(a, 2, out);
            out.push_str(" -> ");
            write_formula(b, 1, out);
        }),
        Or(a, b) => wrap(2, out, &|out| {
            write_formula(a, 2, out);
            out.push_str(" | ");
            write_formula(b, 3, out);
        }),
        And(a, b) => wrap(3, out, &|out| {
            write_formula(a, 3, out);
            out.push_str(" & ");
            write_formula(b, 4, out);
        }),
        Until(w, a, b) | Release(w, a, b) | Since(w, a, b) | Triggered(w, a, b) => {
            let op = match f {
                Until(..) => "U",
                Release(..) => "R",
                Since(..) => "S",
                _ => "T",
            };
            wrap(4, out, &|out| {
                write_formula(a, 5, out);
                out.push(' ');
                out.push_str(op);
                write_bound(*w, out);
                out.push(' ');
                write_formula(b, 4, out);
            })
        }
    }
}

fn write_offset(c: i64, out: &mut String) {
    match c {
        0 => {}
        c if c > 0 => out.push_str(&format!(" + {c}")),
        c => out.push_str(&format!(" - {}", c.unsigned_abs())),
    }
}

fn write_bound(w: Bound, out: &mut String) {
    if let Bound::Finite(w) = w {
        out.push_str(&format!("[{w}]"));
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap().root
    }

    #[test]
    fn conjunction_with_negation() {
        assert_eq!(p("p & !p"), Formula::and(Formula::prop("p"), Formula::not(Formula::prop("p"))));
    }

    #[test]
    fn freeze_example() {
        let expected = Formula::freeze(
            "x",
            Formula::always(Formula::freeze(
                "y",
                Formula::implies(Formula::prop("p"), Formula::rel("y", "x", 2)),
            )),
        );
        assert_eq!(p("x. G y. (p -> y <= x + 2)"), expected);
    }

    #[test]
    fn unbalanced_reports_end_of_input() {
        let e = parse("x.(p U").unwrap_err();
        assert_eq!(e.offset, 6);
        assert_eq!((e.line, e.column), (1, 7));
        assert!(e.message.contains("end of input"));
        assert!(!e.expected.is_empty());
    }

    #[test]
    fn error_position_multiline() {
        let e = parse("# comment\np &\n  & q").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
    }

    #[test]
    fn printing() {
        assert_eq!(print(&Formula::prop("p")), "p");
        let f = Formula::Freeze(
            name("x"),
            Arc::new(Formula::Next(Bound::Finite(2), Arc::new(Formula::prop("p")))),
        );
        assert_eq!(print(&f), "x. X[2] p");
        assert_eq!(print(&Formula::cong("x", "y", 3, 1)), "x == y + 1 mod 3");
        assert_eq!(print(&Formula::rel("x", "y", -1)), "x <= y - 1");
    }

    #[test]
    fn sugar() {
        assert_eq!(p("x. (x < x + 1)"), Formula::freeze("x", Formula::rel("x", "x", 0)));
        assert_eq!(p("x. (x > x)"), Formula::freeze("x", Formula::not(Formula::rel("x", "x", 0))));
        assert_eq!(p("x. (x >= x + 2)"), Formula::freeze("x", Formula::not(Formula::rel("x", "x", 1))));
        assert_eq!(
            p("x. (x = x + 2)"),
            Formula::freeze("x", Formula::and(Formula::rel("x", "x", 2), Formula::rel("x", "x", -2)))
        );
        assert_eq!(p("x <= 3"), Formula::Abs { var: name("x"), c: 3 });
        assert_eq!(p("F p"), Formula::eventually(Formula::prop("p")));
        assert_eq!(p("p U[5] q"), Formula::Until(Bound::Finite(5), Arc::new(p("p")), Arc::new(p("q"))));
    }

    #[test]
    fn precedence() {
        assert_eq!(p("a | b & c"), p("a | (b & c)"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a U b U c"), p("a U (b U c)"));
        assert_eq!(p("a & b U c"), p("a & (b U c)"));
        assert_eq!(p("!a U b"), p("(!a) U b"));
        assert_eq!(p("p & x. q | r"), p("p & (x. (q | r))"));
    }

    #[test]
    fn spans_are_preorder() {
        let src = "p & !q";
        let s = parse(src).unwrap();
        assert_eq!(s.spans.len(), s.root.size());
        let texts: Vec<_> = s.spans.iter().map(|sp| &src[sp.start..sp.end]).collect();
        assert_eq!(texts, vec!["p & !q", "p", "!q", "q"]);
    }

    #[test]
    fn never_panics_on_garbage() {
        for s in [
            "",
            ")",
            "x.",
            "x <=",
            "X[",
            "X[a] p",
            "p == q",
            "((((",
            "x == y mod 0",
            "é",
            "99999999999999999999",
        ] {
            assert!(parse(s).is_err(), "{s}");
        }
        let deep = "(".repeat(10_000);
        assert!(parse(&deep).is_err());
    }

    #[test]
    fn round_trip_samples() {
        for s in [
            "x. G y. (p -> y <= x + 2)",
            "(x. p) & q",
            "!(p U q) R X[3] WY[1] r",
            "x. (y. (x == y - 2 mod 5)) S[2] true",
            "(p -> q) -> r",
            "a | (b | c)",
            "(a & b) & c",
            "!!p",
        ] {
            let f = p(s);
            assert_eq!(p(&print(&f)), f, "{s} printed as {}", print(&f));
        }
    }
}
