use super::ast::{Ast, BinOp, Decl, Expr, Span, Stmt};
use super::parser::{parse_expr, parse_loop, ParseError};
use crate::algebra::{Name, Poly, RatFun, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{span}: undeclared variable `{name}`")]
    UndeclaredVariable { name: Name, span: Span },
    #[error("{span}: `{name}` is declared as a parameter and cannot be assigned")]
    AssignedParameter { name: Name, span: Span },
    #[error("{span}: `{name}` is declared twice")]
    DuplicateDeclaration { name: Name, span: Span },
    #[error("{span}: division by zero")]
    DivisionByZero { span: Span },
    #[error("{span}: unsupported nesting: {reason}")]
    UnsupportedNesting { reason: String, span: Span },
}

/// Left-hand side of an assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Var(Name),
    Counter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub target: Target,
    /// Over `Var::Cur` (program variables), `Var::Param` and `Var::Counter(0)`.
    pub rhs: RatFun,
    pub span: Span,
}

/// One guard-free path, executed as an inner loop.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LoopBody {
    pub assignments: Vec<Assignment>,
}

/// A loop `(B₁*; …; B_r*)*` over assignment-only bodies.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopProgram {
    pub vars: Vec<Name>,
    pub params: Vec<Name>,
    pub counter: Option<Name>,
    pub bodies: Vec<LoopBody>,
}

impl LoopProgram {
    /// Parses and normalizes in one go.
    pub fn parse(text: &str) -> Result<LoopProgram, FrontendError> {
        normalize_paths(&parse_loop(text)?)
    }
}

const MAX_PATHS: usize = 4096;

/// Flattens the outer loop into one body per guard-free path.
///
/// Conditionals fork paths (a missing `else` is an empty path) and code after
/// a conditional is replicated into every branch. Inner loops cut the outer
/// body into segments; each segment and each inner loop contributes its own
/// paths, in source order.
pub fn normalize_paths(ast: &Ast) -> Result<LoopProgram, FrontendError> {
    let Stmt::While { body, .. } = &ast.main else { unreachable!("the parser only accepts a while loop at top level") };
    let scope = Scope::new(ast)?;

    let mut raw: Vec<Vec<(Name, Expr, Span)>> = Vec::new();
    let mut segment: Vec<Stmt> = Vec::new();
    for s in body {
        match s {
            Stmt::While { body: inner, span, .. } => {
                if contains_while(inner) {
                    return Err(nesting("loops nested more than one level deep", *span));
                }
                if !segment.is_empty() {
                    raw.extend(paths(&segment)?);
                    segment.clear();
                }
                raw.extend(paths(inner)?);
            }
            Stmt::If { then, els, span, .. } => {
                if contains_while(then) || els.as_deref().is_some_and(contains_while) {
                    return Err(nesting("inner loop inside a conditional", *span));
                }
                segment.push(s.clone());
            }
            _ => segment.push(s.clone()),
        }
    }
    if !segment.is_empty() || raw.is_empty() {
        raw.extend(paths(&segment)?);
    }

    let mut vars = scope.vars.clone();
    if !scope.explicit_vars {
        for path in &raw {
            for (t, _, _) in path {
                if Some(t) != scope.counter.as_ref() && !vars.contains(t) {
                    vars.push(t.clone());
                }
            }
        }
    }
    let scope = Scope { vars, ..scope };
    let mut bodies = Vec::with_capacity(raw.len());
    for path in raw {
        let mut assignments = Vec::with_capacity(path.len());
        for (t, e, span) in path {
            let target = if Some(&t) == scope.counter.as_ref() {
                Target::Counter
            } else if scope.params.contains(&t) {
                return Err(FrontendError::AssignedParameter { name: t, span });
            } else if scope.vars.contains(&t) {
                Target::Var(t)
            } else {
                return Err(FrontendError::UndeclaredVariable { name: t, span });
            };
            assignments.push(Assignment { target, rhs: scope.convert(&e, span)?, span });
        }
        bodies.push(LoopBody { assignments });
    }
    Ok(LoopProgram { vars: scope.vars, params: scope.params, counter: scope.counter, bodies })
}

fn nesting(reason: &str, span: Span) -> FrontendError {
    FrontendError::UnsupportedNesting { reason: reason.into(), span }
}

fn contains_while(stmts: &[Stmt]) -> bool {
    stmts.iter().any(|s| match s {
        Stmt::While { .. } => true,
        Stmt::If { then, els, .. } => contains_while(then) || els.as_deref().is_some_and(contains_while),
        _ => false,
    })
}

type Path = Vec<(Name, Expr, Span)>;

fn paths(stmts: &[Stmt]) -> Result<Vec<Path>, FrontendError> {
    let mut cur: Vec<Path> = vec![Vec::new()];
    for s in stmts {
        match s {
            Stmt::Assign { target, rhs, span } => {
                for p in &mut cur {
                    p.push((target.clone(), rhs.clone(), *span));
                }
            }
            Stmt::Skip => {}
            Stmt::If { then, els, span, .. } => {
                let mut branches = paths(then)?;
                match els {
                    Some(e) => branches.extend(paths(e)?),
                    None => branches.push(Vec::new()),
                }
                if cur.len() * branches.len() > MAX_PATHS {
                    return Err(nesting(&format!("more than {MAX_PATHS} paths"), *span));
                }
                cur = cur
                    .iter()
                    .flat_map(|p| branches.iter().map(move |b| p.iter().chain(b).cloned().collect()))
                    .collect();
            }
            Stmt::While { span, .. } => return Err(nesting("loop in this position", *span)),
        }
    }
    Ok(cur)
}

struct Scope {
    vars: Vec<Name>,
    explicit_vars: bool,
    params: Vec<Name>,
    counter: Option<Name>,
}

impl Scope {
    fn new(ast: &Ast) -> Result<Scope, FrontendError> {
        let mut s = Scope { vars: Vec::new(), explicit_vars: false, params: Vec::new(), counter: None };
        let mut seen: Vec<Name> = Vec::new();
        let mut note = |n: &Name| {
            if seen.contains(n) {
                return Err(FrontendError::DuplicateDeclaration { name: n.clone(), span: Span::default() });
            }
            seen.push(n.clone());
            Ok(())
        };
        for d in &ast.decls {
            match d {
                Decl::Vars(vs) => {
                    s.explicit_vars = true;
                    for v in vs {
                        note(v)?;
                        s.vars.push(v.clone());
                    }
                }
                Decl::Params(ps) => {
                    for p in ps {
                        note(p)?;
                        s.params.push(p.clone());
                    }
                }
                Decl::Counter(c) => {
                    note(c)?;
                    s.counter = Some(c.clone());
                }
            }
        }
        Ok(s)
    }

    fn var(&self, name: &Name, span: Span) -> Result<Var, FrontendError> {
        if Some(name) == self.counter.as_ref() {
            Ok(Var::Counter(0))
        } else if self.vars.contains(name) {
            Ok(Var::Cur(name.clone()))
        } else if self.params.contains(name) {
            Ok(Var::Param(name.clone()))
        } else {
            Err(FrontendError::UndeclaredVariable { name: name.clone(), span })
        }
    }

    fn convert(&self, e: &Expr, span: Span) -> Result<RatFun, FrontendError> {
        Ok(match e {
            Expr::Num(n) => RatFun::constant(Rational::from_integer(n.clone())),
            Expr::Var(v, vs) => RatFun::var(self.var(v, *vs)?),
            Expr::Neg(a) => self.convert(a, span)?.neg(),
            Expr::Pow(a, k) => self.convert(a, span)?.pow(*k as i32).expect("nonnegative power"),
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.convert(a, span)?, self.convert(b, span)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(FrontendError::DivisionByZero { span });
                        }
                        a.div(&b).map_err(|_| FrontendError::DivisionByZero { span })?
                    }
                }
            }
        })
    }
}

/// Converts an expression over `vars` (as `Var::Cur`), `params` and an
/// optional counter into a rational function.
pub fn expr_to_ratfun(e: &Expr, vars: &[Name], params: &[Name]) -> Result<RatFun, FrontendError> {
    let scope = Scope { vars: vars.to_vec(), explicit_vars: true, params: params.to_vec(), counter: None };
    scope.convert(e, Span::default())
}

/// Parses a polynomial with `resolve` naming the symbols. Division is only
/// allowed by nonzero constants.
pub fn parse_poly(text: &str, resolve: &dyn Fn(&str) -> Var) -> Result<Poly, FrontendError> {
    fn go(e: &Expr, resolve: &dyn Fn(&str) -> Var) -> Result<Poly, FrontendError> {
        Ok(match e {
            Expr::Num(n) => Poly::constant(Rational::from_integer(n.clone())),
            Expr::Var(name, _) => Poly::var(resolve(name)),
            Expr::Neg(a) => -&go(a, resolve)?,
            Expr::Pow(a, k) => go(a, resolve)?.pow(*k),
            Expr::Bin(op, a, b) => {
                let (a, b) = (go(a, resolve)?, go(b, resolve)?);
                match op {
                    BinOp::Add => &a + &b,
                    BinOp::Sub => &a - &b,
                    BinOp::Mul => &a * &b,
                    BinOp::Div => match b.constant_value() {
                        Some(c) if !num_traits::Zero::is_zero(&c) => a.scale(&c.recip()),
                        _ => {
                            return Err(FrontendError::UnsupportedNesting {
                                reason: "division by a non-constant".into(),
                                span: Span::default(),
                            })
                        }
                    },
                }
            }
        })
    }
    let e = parse_expr(text)?;
    go(&e, resolve)
}

/// Symbol naming used by [`parse_poly_std`]: `x_k` is `x` at step `k`,
/// names in `params` are parameters and anything else is a current value.
pub fn std_symbol<'a>(params: &'a [&'a str]) -> impl Fn(&str) -> Var + 'a {
    move |s: &str| {
        if let Some((base, step)) = s.rsplit_once('_') {
            if let Ok(k) = step.parse::<u32>() {
                return Var::prog(base, k);
            }
        }
        if params.contains(&s) {
            Var::param(s)
        } else {
            Var::cur(s)
        }
    }
}

pub fn parse_poly_std(text: &str, params: &[&str]) -> Result<Poly, FrontendError> {
    parse_poly(text, &std_symbol(params))
}
