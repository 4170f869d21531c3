use num_bigint::BigInt;

use super::ast::{Ast, BinOp, Decl, Expr, Span, Stmt};
use crate::algebra::Name;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(BigInt),
    Sym(&'static str),
    Sep,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Sep => "end of statement".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const SYMBOLS: [&str; 20] =
    [":=", "==", "!=", "<=", ">=", "&&", "||", "<>", "+", "-", "*", "/", "^", "(", ")", "<", ">", "=", "!", ","];

const KEYWORDS: [&str; 9] = ["while", "do", "if", "then", "else", "end", "skip", "vars", "params"];

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let span = |i: usize| Span { line: li as u32 + 1, col: i as u32 + 1 };
        while i < chars.len() {
            let c = chars[i];
            if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            if c == ';' {
                out.push((Tok::Sep, span(start)));
                i += 1;
            } else if c.is_ascii_digit() {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Num(s.parse().unwrap()), span(start)));
            } else if c.is_alphabetic() || c == '_' {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), span(start)));
            } else {
                let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
                match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                    Some(s) => {
                        out.push((Tok::Sym(s), span(start)));
                        i += s.len();
                    }
                    None => {
                        return Err(ParseError {
                            line: li as u32 + 1,
                            col: start as u32 + 1,
                            expected: vec!["a token".into()],
                            found: format!("`{c}`"),
                        })
                    }
                }
            }
        }
        out.push((Tok::Sep, span(chars.len())));
    }
    let last = out.last().map(|t| t.1).unwrap_or(Span { line: 1, col: 1 });
    out.push((Tok::Eof, last));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let s = self.span();
        Err(ParseError {
            line: s.line,
            col: s.col,
            expected: expected.iter().map(|e| e.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    fn skip_seps(&mut self) {
        while *self.peek() == Tok::Sep {
            self.bump();
        }
    }

    fn ident(&mut self) -> Result<(Name, Span), ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok((s.as_str().into(), span))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn program(&mut self) -> Result<Ast, ParseError> {
        let mut decls = Vec::new();
        loop {
            self.skip_seps();
            if self.eat_kw("vars") {
                decls.push(Decl::Vars(self.ident_list()?));
            } else if self.eat_kw("params") {
                decls.push(Decl::Params(self.ident_list()?));
            } else if self.is_kw("counter") {
                self.bump();
                decls.push(Decl::Counter(self.ident()?.0));
            } else {
                break;
            }
            if *self.peek() != Tok::Sep {
                return self.error(&["end of declaration"]);
            }
        }
        if !self.is_kw("while") {
            return self.error(&["`while`", "declaration"]);
        }
        let main = self.stmt()?;
        self.skip_seps();
        if *self.peek() != Tok::Eof {
            return self.error(&["end of input"]);
        }
        Ok(Ast { decls, main })
    }

    fn ident_list(&mut self) -> Result<Vec<Name>, ParseError> {
        let mut out = vec![self.ident()?.0];
        while *self.peek() == Tok::Sym(",") {
            self.bump();
            out.push(self.ident()?.0);
        }
        Ok(out)
    }

    fn stmts(&mut self, stops: &[&str]) -> Result<Vec<Stmt>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_seps();
            if stops.iter().any(|k| self.is_kw(k)) {
                return Ok(out);
            }
            if *self.peek() == Tok::Eof {
                let mut exp: Vec<String> = stops.iter().map(|k| format!("`{k}`")).collect();
                exp.push("statement".into());
                let s = self.span();
                return Err(ParseError { line: s.line, col: s.col, expected: exp, found: "end of input".into() });
            }
            out.push(self.stmt()?);
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let span = self.span();
        if self.eat_kw("while") {
            let guard = self.guard("do")?;
            self.expect_kw("do")?;
            let body = self.stmts(&["end"])?;
            self.expect_kw("end")?;
            self.eat_kw("while");
            return Ok(Stmt::While { guard, body, span });
        }
        if self.eat_kw("if") {
            let guard = self.guard("then")?;
            self.expect_kw("then")?;
            let then = self.stmts(&["else", "end"])?;
            let els = if self.eat_kw("else") { Some(self.stmts(&["end"])?) } else { None };
            self.expect_kw("end")?;
            self.eat_kw("if");
            return Ok(Stmt::If { guard, then, els, span });
        }
        if self.eat_kw("skip") {
            return Ok(Stmt::Skip);
        }
        if !matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            return self.error(&["statement"]);
        }
        let (target, span) = self.ident()?;
        if *self.peek() != Tok::Sym(":=") {
            return self.error(&["`:=`"]);
        }
        self.bump();
        let rhs = self.expr()?;
        Ok(Stmt::Assign { target, rhs, span })
    }

    /// Guard text up to `stop`, tokens joined by single spaces.
    fn guard(&mut self, stop: &str) -> Result<Option<String>, ParseError> {
        let mut parts = Vec::new();
        let mut depth = 0i32;
        loop {
            match self.peek().clone() {
                Tok::Ident(s) if s == stop && depth == 0 => break,
                Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => return self.error(&[&format!("`{stop}`")]),
                Tok::Sep | Tok::Eof => return self.error(&[&format!("`{stop}`")]),
                Tok::Sym(":=") => return self.error(&["condition"]),
                Tok::Sym(s) => {
                    depth += match s {
                        "(" => 1,
                        ")" => -1,
                        _ => 0,
                    };
                    if depth < 0 {
                        return self.error(&["condition"]);
                    }
                    parts.push(s.to_string());
                }
                Tok::Ident(s) => parts.push(s),
                Tok::Num(n) => parts.push(n.to_string()),
            }
            self.bump();
        }
        if depth != 0 {
            return self.error(&["`)`"]);
        }
        Ok((!parts.is_empty()).then(|| parts.join(" ")))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym("-") {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Sym("^") {
            self.bump();
            return match self.peek().clone() {
                Tok::Num(n) => match u32::try_from(&n) {
                    Ok(e) => {
                        self.bump();
                        Ok(Expr::Pow(Box::new(base), e))
                    }
                    Err(_) => self.error(&["small exponent"]),
                },
                _ => self.error(&["exponent"]),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Num(n))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let (name, span) = self.ident()?;
                Ok(Expr::Var(name, span))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::Sym(")") {
                    return self.error(&["`)`"]);
                }
                self.bump();
                Ok(e)
            }
            _ => self.error(&["expression"]),
        }
    }
}

/// Parses a `.loop` source file.
pub fn parse_loop(text: &str) -> Result<Ast, ParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.program()
}

/// Parses a single expression, e.g. an initial value given on the command line.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.skip_seps();
    if *p.peek() != Tok::Eof {
        return p.error(&["end of input"]);
    }
    Ok(e)
}
