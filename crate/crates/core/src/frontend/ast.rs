use std::fmt;

use num_bigint::BigInt;

use crate::algebra::Name;

/// Source position (1-based). Positions never take part in AST equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ast {
    pub decls: Vec<Decl>,
    pub main: Stmt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Vars(Vec<Name>),
    Params(Vec<Name>),
    Counter(Name),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Assign {
        target: Name,
        rhs: Expr,
        span: Span,
    },
    /// Guards are kept verbatim and play no part in the analysis.
    If {
        guard: Option<String>,
        then: Vec<Stmt>,
        els: Option<Vec<Stmt>>,
        span: Span,
    },
    While {
        guard: Option<String>,
        body: Vec<Stmt>,
        span: Span,
    },
    Skip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Var(Name, Span),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(..) => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Var(v, _) => write!(f, "{v}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 3)
            }
            Expr::Pow(b, e) => {
                b.write_at(f, 5)?;
                write!(f, "^{e}")
            }
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                a.write_at(f, p)?;
                write!(f, " {sym} ")?;
                b.write_at(f, p + 1)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

fn write_block(f: &mut fmt::Formatter<'_>, stmts: &[Stmt], depth: usize) -> fmt::Result {
    for s in stmts {
        write_stmt(f, s, depth)?;
    }
    Ok(())
}

fn write_stmt(f: &mut fmt::Formatter<'_>, s: &Stmt, depth: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    let guard = |g: &Option<String>| g.as_ref().map(|g| format!(" {g}")).unwrap_or_default();
    match s {
        Stmt::Assign { target, rhs, .. } => writeln!(f, "{pad}{target} := {rhs}"),
        Stmt::Skip => writeln!(f, "{pad}skip"),
        Stmt::While { guard: g, body, .. } => {
            writeln!(f, "{pad}while{} do", guard(g))?;
            write_block(f, body, depth + 1)?;
            writeln!(f, "{pad}end while")
        }
        Stmt::If { guard: g, then, els, .. } => {
            writeln!(f, "{pad}if{} then", guard(g))?;
            write_block(f, then, depth + 1)?;
            if let Some(e) = els {
                writeln!(f, "{pad}else")?;
                write_block(f, e, depth + 1)?;
            }
            writeln!(f, "{pad}end if")
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            match d {
                Decl::Vars(vs) => writeln!(f, "vars {}", vs.join(", "))?,
                Decl::Params(vs) => writeln!(f, "params {}", vs.join(", "))?,
                Decl::Counter(c) => writeln!(f, "counter {c}")?,
            }
        }
        write_stmt(f, &self.main, 0)
    }
}
