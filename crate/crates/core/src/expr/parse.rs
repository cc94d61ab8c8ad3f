use std::collections::BTreeSet;
use std::fmt;

use super::ast::*;
use super::ExprError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(String),
    Plus,
    Minus,
    Star,
    Caret,
    Comma,
    LParen,
    RParen,
    DirectSum,
    Tensor,
    Unknown(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(s) => write!(f, "integer {s}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::Comma => f.write_str("','"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::DirectSum => f.write_str("'(+)'"),
            Tok::Tensor => f.write_str("'(x)'"),
            Tok::Unknown(c) => write!(f, "{c:?}"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Self { chars: src.chars().collect(), pos: 0, line: 1, column: 1 }
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Offset of the next non-whitespace char at or after `pos + k`.
    fn skip_ws_from(&self, mut k: usize) -> usize {
        while self.peek_at(k).is_some_and(char::is_whitespace) {
            k += 1;
        }
        k
    }
}

pub(crate) fn lex(src: &str) -> Vec<Spanned> {
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    loop {
        while cur.peek_at(0).is_some_and(char::is_whitespace) {
            cur.bump();
        }
        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.peek_at(0) else {
            out.push(Spanned { tok: Tok::End, line, column });
            return out;
        };
        let tok = match c {
            '(' => {
                // `(+)` and `(x)` are single tokens, possibly with inner spaces.
                let k = cur.skip_ws_from(1);
                let op = match cur.peek_at(k) {
                    Some('+') => Some(Tok::DirectSum),
                    Some('x') => Some(Tok::Tensor),
                    _ => None,
                };
                let close = cur.skip_ws_from(k + 1);
                match op {
                    Some(t) if cur.peek_at(close) == Some(')') => {
                        for _ in 0..=close {
                            cur.bump();
                        }
                        t
                    }
                    _ => {
                        cur.bump();
                        Tok::LParen
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(c) = cur.peek_at(0).filter(char::is_ascii_alphabetic) {
                    s.push(c);
                    cur.bump();
                }
                Tok::Ident(s)
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(c) = cur.peek_at(0).filter(char::is_ascii_digit) {
                    s.push(c);
                    cur.bump();
                }
                Tok::Int(s)
            }
            _ => {
                cur.bump();
                match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    ',' => Tok::Comma,
                    ')' => Tok::RParen,
                    other => Tok::Unknown(other),
                }
            }
        };
        out.push(Spanned { tok, line, column });
    }
}

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    factors: usize,
    depth: usize,
}

/// Bound on parenthesis nesting so that hostile input cannot exhaust the stack.
pub(crate) const MAX_DEPTH: usize = 200;

type PResult<T> = Result<T, ExprError>;

impl Parser {
    pub(crate) fn new(src: &str, factors: usize) -> Self {
        Self { toks: lex(src), pos: 0, factors, depth: 0 }
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ExprError {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Unknown(c) => return ExprError::UnknownToken { line: t.line, column: t.column, token: *c },
            other => other.to_string(),
        };
        ExprError::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
            found,
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> PResult<Spanned> {
        if self.peek().tok == tok {
            Ok(self.advance())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek();
            return Err(ExprError::TooDeep { line: t.line, column: t.column, limit: MAX_DEPTH });
        }
        Ok(())
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == name)
    }

    pub(crate) fn parse_query(&mut self) -> PResult<Query> {
        let ast = if self.is_ident("integrate") {
            self.advance();
            self.expect(Tok::LParen, "'('")?;
            let e = self.class_expr()?;
            self.expect(Tok::RParen, "')'")?;
            Query::Integrate(e)
        } else {
            Query::Class(self.class_expr()?)
        };
        if self.peek().tok != Tok::End {
            return Err(self.error(&["'+'", "'-'", "'*'", "'^'", "end of input"]));
        }
        Ok(ast)
    }

    fn class_expr(&mut self) -> PResult<ClassExpr> {
        let first = self.term()?;
        let mut rest = Vec::new();
        loop {
            let op = match self.peek().tok {
                Tok::Plus => AddOp::Plus,
                Tok::Minus => AddOp::Minus,
                _ => break,
            };
            self.advance();
            rest.push((op, self.term()?));
        }
        Ok(ClassExpr { first, rest })
    }

    fn term(&mut self) -> PResult<Term> {
        let mut factors = vec![self.factor()?];
        while self.peek().tok == Tok::Star {
            self.advance();
            factors.push(self.factor()?);
        }
        Ok(Term { factors })
    }

    fn factor(&mut self) -> PResult<Factor> {
        let mut f = match self.peek().tok.clone() {
            Tok::LParen => {
                self.advance();
                self.enter()?;
                let e = self.class_expr()?;
                self.depth -= 1;
                self.expect(Tok::RParen, "')'")?;
                Factor::Group(Box::new(e))
            }
            Tok::Ident(name) if name == "c" || name == "s" => {
                self.advance();
                let k = match self.peek().tok.clone() {
                    Tok::Int(_) => Some(self.small_int()?),
                    _ => None,
                };
                let func = if name == "c" { ClassFn::Chern(k) } else { ClassFn::Segre(k) };
                self.expect(Tok::LParen, "'('")?;
                let bundle = self.bundle()?;
                self.expect(Tok::RParen, "')'")?;
                Factor::Class { func, bundle }
            }
            _ => return Err(self.error(&["'c'", "'s'", "'('"])),
        };
        let mut chained = 0;
        while self.peek().tok == Tok::Caret {
            chained += 1;
            if chained > MAX_DEPTH {
                let t = self.peek();
                return Err(ExprError::TooDeep { line: t.line, column: t.column, limit: MAX_DEPTH });
            }
            self.advance();
            if !matches!(self.peek().tok, Tok::Int(_)) {
                return Err(self.error(&["integer"]));
            }
            f = Factor::Power(Box::new(f), self.small_int()?);
        }
        Ok(f)
    }

    fn small_int(&mut self) -> PResult<u32> {
        let t = self.advance();
        let Tok::Int(s) = &t.tok else { unreachable!("caller checked for an integer") };
        s.parse().map_err(|_| ExprError::IntegerRange { line: t.line, column: t.column, text: s.clone() })
    }

    fn bundle(&mut self) -> PResult<BundleExpr> {
        let mut terms = vec![self.bterm()?];
        while self.peek().tok == Tok::DirectSum {
            self.advance();
            terms.push(self.bterm()?);
        }
        Ok(BundleExpr { terms })
    }

    fn bterm(&mut self) -> PResult<BundleTerm> {
        let mut atoms = vec![self.batom()?];
        while self.peek().tok == Tok::Tensor {
            self.advance();
            atoms.push(self.batom()?);
        }
        Ok(BundleTerm { atoms })
    }

    fn batom(&mut self) -> PResult<BundleAtom> {
        let Tok::Ident(name) = self.peek().tok.clone() else {
            return Err(self.error(&["'T'", "'T*'", "'O'", "'det'", "'dual'"]));
        };
        match name.as_str() {
            "T" => {
                self.advance();
                // Inside a bundle `*` cannot be a product, so `T*` is unambiguous.
                if self.peek().tok == Tok::Star {
                    self.advance();
                    Ok(BundleAtom::Cotangent)
                } else {
                    Ok(BundleAtom::Tangent)
                }
            }
            "O" => {
                let at = self.advance();
                self.expect(Tok::LParen, "'('")?;
                let mut degrees = vec![self.signed_int()?];
                while self.peek().tok == Tok::Comma {
                    self.advance();
                    degrees.push(self.signed_int()?);
                }
                self.expect(Tok::RParen, "')'")?;
                if degrees.len() != self.factors {
                    return Err(ExprError::Arity {
                        line: at.line,
                        column: at.column,
                        expected: self.factors,
                        found: degrees.len(),
                    });
                }
                Ok(BundleAtom::Line(degrees))
            }
            "det" | "dual" => {
                self.advance();
                self.expect(Tok::LParen, "'('")?;
                self.enter()?;
                let inner = Box::new(self.bundle()?);
                self.depth -= 1;
                self.expect(Tok::RParen, "')'")?;
                Ok(if name == "det" { BundleAtom::Det(inner) } else { BundleAtom::Dual(inner) })
            }
            _ => Err(self.error(&["'T'", "'T*'", "'O'", "'det'", "'dual'"])),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = if self.peek().tok == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        if !matches!(self.peek().tok, Tok::Int(_)) {
            return Err(self.error(&["integer"]));
        }
        let t = self.advance();
        let Tok::Int(s) = &t.tok else { unreachable!() };
        let text = if neg { format!("-{s}") } else { s.clone() };
        text.parse().map_err(|_| ExprError::IntegerRange { line: t.line, column: t.column, text })
    }
}
