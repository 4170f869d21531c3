//! Closed forms for the variables of a single loop body.
//!
//! A body is read as a system of simultaneous first-order recurrences. The
//! dependency graph is condensed into strongly connected blocks which are
//! solved dependencies-first: constant-coefficient linear blocks through
//! their characteristic polynomial, single variables with a coefficient in
//! the counter as hypergeometric terms, and variables whose update ignores
//! their own value by a one-step shift.
//!
//! Closed forms are written over the step-0 symbols `Var::initial(v)`,
//! `Var::Counter(0)`, `Var::Exp { step: 0, .. }` (for `θ^n`),
//! `Var::Fact { step: 0, .. }` (for `(n + ζ)^n̲`) and `Var::ZeroPow(0)`.

mod exppoly;
mod univariate;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::{gcd, AlgebraError, Name, Poly, RatFun, Rational, Var};
use crate::frontend::{LoopBody, Target};
use exppoly::{counter, ExpPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("unsupported recurrence for {var}: {reason}")]
    Unsupported { var: Name, reason: String },
    #[error("characteristic polynomial of {{{}}} has the irreducible factor {factor}", .vars.join(", "))]
    IrrationalEigenvalue { vars: Vec<Name>, factor: String },
    #[error("coefficient {coefficient} of {var} does not split into rational linear factors")]
    NonSplittingCoefficient { var: Name, coefficient: String },
    #[error("{var} has a counter-dependent coefficient and an inhomogeneous part")]
    InhomogeneousUnsupported { var: Name },
    #[error("closed form of {var} disagrees with iteration at n = {n}")]
    Mismatch { var: Name, n: u64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn unsupported(var: &Name, reason: impl Into<String>) -> RecurrenceError {
    RecurrenceError::Unsupported { var: var.clone(), reason: reason.into() }
}

/// Simultaneous update `v(n+1) = update(v(n), n)` for one loop body.
///
/// Updates are rational functions over `Var::Cur(v)` (current values),
/// `Var::Param` and the counter `Var::Counter(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecSystem {
    pub vars: Vec<Name>,
    pub update: Vec<RatFun>,
}

impl RecSystem {
    pub fn identity(vars: &[Name]) -> RecSystem {
        RecSystem { vars: vars.to_vec(), update: vars.iter().map(|v| RatFun::var(Var::Cur(v.clone()))).collect() }
    }

    pub fn update_of(&self, v: &str) -> Option<&RatFun> {
        self.vars.iter().position(|x| &**x == v).map(|i| &self.update[i])
    }

    fn index(&self) -> BTreeMap<Var, usize> {
        self.vars.iter().enumerate().map(|(i, v)| (Var::Cur(v.clone()), i)).collect()
    }

    /// One iteration at counter value `k` on symbolic or concrete state.
    pub fn apply(&self, state: &[RatFun], k: u64) -> Result<Vec<RatFun>, AlgebraError> {
        let idx = self.index();
        let kk = RatFun::constant(Rational::from_integer(k.into()));
        let sub = |v: &Var| match v {
            Var::Counter(0) => Some(kk.clone()),
            _ => idx.get(v).map(|&i| state[i].clone()),
        };
        self.update.iter().map(|u| u.substitute(&sub)).collect()
    }

    /// One concrete iteration; `None` on division by zero or an unbound parameter.
    pub fn step(&self, state: &[Rational], k: u64, params: &BTreeMap<Name, Rational>) -> Option<Vec<Rational>> {
        let idx = self.index();
        let kk = Rational::from_integer(k.into());
        let val = |v: &Var| match v {
            Var::Counter(0) => Some(kk.clone()),
            Var::Param(p) => params.get(p).cloned(),
            _ => idx.get(v).map(|&i| state[i].clone()),
        };
        self.update.iter().map(|u| u.eval(&val)).collect()
    }
}

/// Composes the body's sequential assignments into one simultaneous update.
///
/// The counter reads as the iteration index at the start of each iteration;
/// assignments to it (normally `n := n + 1`) affect later reads in the body.
pub fn extract_system(body: &LoopBody, vars: &[Name]) -> Result<RecSystem, RecurrenceError> {
    let mut sys = RecSystem::identity(vars);
    let mut cnt = RatFun::var(counter());
    for a in &body.assignments {
        let idx = sys.index();
        let sub = |v: &Var| match v {
            Var::Counter(0) => Some(cnt.clone()),
            _ => idx.get(v).map(|&i| sys.update[i].clone()),
        };
        let value = a.rhs.substitute(&sub)?;
        match &a.target {
            Target::Counter => cnt = value,
            Target::Var(name) => match vars.iter().position(|v| v == name) {
                Some(i) => sys.update[i] = value,
                None => return Err(unsupported(name, "assignment to an undeclared variable")),
            },
        }
    }
    Ok(sys)
}

#[derive(Clone, Debug, PartialEq)]
pub enum BlockKind {
    /// `v := v`.
    Identity,
    /// Linear with constant coefficients in the block variables.
    CFinite,
    /// `v := q(n)·v + f` with `q` a nonconstant rational function of the counter.
    FirstOrderPolyCoeff {
        coefficient: RatFun,
    },
    /// The update does not read the variable itself.
    Nilpotent,
    Unsupported(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub vars: Vec<Name>,
    pub kind: BlockKind,
}

/// Strongly connected blocks of the dependency graph, dependencies first.
pub fn classify(sys: &RecSystem) -> Vec<Block> {
    sccs(sys)
        .into_iter()
        .map(|b| Block { vars: b.iter().map(|&i| sys.vars[i].clone()).collect(), kind: classify_block(sys, &b) })
        .collect()
}

fn sccs(sys: &RecSystem) -> Vec<Vec<usize>> {
    let idx = sys.index();
    let deps: Vec<Vec<usize>> =
        sys.update.iter().map(|u| u.vars().iter().filter_map(|v| idx.get(v).copied()).collect()).collect();
    let n = deps.len();
    let mut state =
        Tarjan { index: vec![None; n], low: vec![0; n], on_stack: vec![false; n], stack: vec![], next: 0, out: vec![] };
    for v in 0..n {
        if state.index[v].is_none() {
            state.visit(v, &deps);
        }
    }
    for b in &mut state.out {
        b.sort_unstable();
    }
    state.out
}

struct Tarjan {
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    next: usize,
    out: Vec<Vec<usize>>,
}

impl Tarjan {
    fn visit(&mut self, v: usize, deps: &[Vec<usize>]) {
        self.index[v] = Some(self.next);
        self.low[v] = self.next;
        self.next += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for &w in &deps[v] {
            match self.index[w] {
                None => {
                    self.visit(w, deps);
                    self.low[v] = self.low[v].min(self.low[w]);
                }
                Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                _ => {}
            }
        }
        if Some(self.low[v]) == self.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = self.stack.pop().unwrap();
                self.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            self.out.push(comp);
        }
    }
}

fn classify_block(sys: &RecSystem, block: &[usize]) -> BlockKind {
    let bvars: Vec<Var> = block.iter().map(|&i| Var::Cur(sys.vars[i].clone())).collect();
    if let [i] = block {
        let (v, u) = (&bvars[0], &sys.update[*i]);
        if *u == RatFun::var(v.clone()) {
            return BlockKind::Identity;
        }
        if !u.mentions(v) {
            return BlockKind::Nilpotent;
        }
        if u.den().mentions(v) {
            return BlockKind::Unsupported("division by the variable itself".into());
        }
        let cs = u.num().coefficients_in(v);
        if cs.len() > 2 {
            return BlockKind::Unsupported("non-linear self-reference".into());
        }
        let den = u.den().clone();
        let q = RatFun::new(cs[1].clone(), den.clone()).expect("nonzero denominator");
        let f = RatFun::new(cs[0].clone(), den).expect("nonzero denominator");
        if q.num().is_constant() && q.den().is_constant() {
            return if f.is_polynomial() {
                BlockKind::CFinite
            } else {
                BlockKind::Unsupported("non-polynomial inhomogeneous part".into())
            };
        }
        if q.vars().iter().all(|x| *x == counter()) {
            return BlockKind::FirstOrderPolyCoeff { coefficient: q };
        }
        return BlockKind::Unsupported(format!("coefficient {q} is not a function of the counter"));
    }
    for &i in block {
        let u = &sys.update[i];
        let Some(p) = u.as_poly() else {
            return BlockKind::Unsupported(format!("non-polynomial update {u} in a coupled block"));
        };
        if let Err(e) = linear_split(p, &bvars) {
            return BlockKind::Unsupported(e);
        }
    }
    BlockKind::CFinite
}

/// Splits `p = Σ a_j·x_j + rest` with constant `a_j`.
fn linear_split(p: &Poly, xs: &[Var]) -> Result<(Vec<Rational>, Poly), String> {
    let mut rest = p.clone();
    let mut coeffs = Vec::with_capacity(xs.len());
    for x in xs {
        let cs = rest.coefficients_in(x);
        match cs.len() {
            1 => coeffs.push(Rational::zero()),
            2 => match cs[1].constant_value() {
                Some(c) => {
                    coeffs.push(c);
                    rest = cs[0].clone();
                }
                None => return Err(format!("coefficient {} of {x} is not constant", cs[1])),
            },
            _ => return Err(format!("non-linear occurrence of {x}")),
        }
    }
    Ok((coeffs, rest))
}

/// Closed forms of every variable of one body.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub vars: Vec<Name>,
    pub forms: Vec<RatFun>,
    /// `θ_k`, standing behind `Var::Exp { step: 0, index: k }`.
    pub theta: Vec<Rational>,
    /// `ζ_k`, standing behind `Var::Fact { step: 0, index: k }`.
    pub zeta: Vec<Rational>,
    /// Whether `Var::ZeroPow(0)` occurs.
    pub zero_pow: bool,
    /// Least common multiple of the denominators of `forms`.
    pub denominator: Poly,
}

impl ClosedForm {
    pub fn form_of(&self, v: &str) -> Option<&RatFun> {
        self.vars.iter().position(|x| &**x == v).map(|i| &self.forms[i])
    }

    /// Values of the step-0 sequence symbols at counter value `n`.
    pub fn symbol_values(&self, n: u64) -> BTreeMap<Var, Rational> {
        let mut out = BTreeMap::new();
        out.insert(counter(), Rational::from_integer(n.into()));
        for (k, t) in self.theta.iter().enumerate() {
            out.insert(Var::Exp { step: 0, index: k as u32 }, num_traits::pow(t.clone(), n as usize));
        }
        for (k, z) in self.zeta.iter().enumerate() {
            out.insert(Var::Fact { step: 0, index: k as u32 }, falling_factorial(z, n));
        }
        out.insert(Var::ZeroPow(0), if n == 0 { Rational::one() } else { Rational::zero() });
        out
    }

    /// Closed forms at counter value `n`, still symbolic in initial values and parameters.
    pub fn at(&self, n: u64) -> Result<Vec<RatFun>, AlgebraError> {
        let vals = self.symbol_values(n);
        let sub = |v: &Var| vals.get(v).map(|c| RatFun::constant(c.clone()));
        self.forms.iter().map(|f| f.substitute(&sub)).collect()
    }

    /// Concrete values after `n` iterations; `None` if a denominator vanishes.
    pub fn eval(&self, n: u64, init: &[Rational], params: &BTreeMap<Name, Rational>) -> Option<Vec<Rational>> {
        let vals = self.symbol_values(n);
        let inits: BTreeMap<Var, Rational> =
            self.vars.iter().zip(init).map(|(v, x)| (Var::initial(v), x.clone())).collect();
        let val = |v: &Var| match v {
            Var::Param(p) => params.get(p).cloned(),
            _ => vals.get(v).or_else(|| inits.get(v)).cloned(),
        };
        self.forms.iter().map(|f| f.eval(&val)).collect()
    }
}

/// `(n + ζ)^n̲ = (ζ + 1)(ζ + 2)…(ζ + n)`.
pub fn falling_factorial(zeta: &Rational, n: u64) -> Rational {
    (1..=n).map(|i| zeta + Rational::from_integer(i.into())).product()
}

enum Sol {
    Exp(ExpPoly),
    Hyper { c: Rational, shifts: Vec<(Rational, i32)> },
}

struct Solver<'a> {
    sys: &'a RecSystem,
    sols: Vec<Option<Sol>>,
}

impl Solver<'_> {
    fn name(&self, i: usize) -> &Name {
        &self.sys.vars[i]
    }

    fn solve(&mut self, block: &[usize], kind: BlockKind) -> Result<(), RecurrenceError> {
        let first = self.name(block[0]).clone();
        match kind {
            BlockKind::Identity => {
                let x0 = Poly::var(Var::initial(&first));
                self.sols[block[0]] = Some(Sol::Exp(ExpPoly::poly(x0)));
            }
            BlockKind::CFinite => self.solve_cfinite(block)?,
            BlockKind::FirstOrderPolyCoeff { coefficient } => self.solve_hypergeom(block[0], &coefficient)?,
            BlockKind::Nilpotent => {
                let u = &self.sys.update[block[0]];
                let Some(g) = u.as_poly() else {
                    return Err(unsupported(&first, format!("non-polynomial update {u}")));
                };
                // v(n) = g(n - 1) for n ≥ 1, corrected at n = 0 by a 0^n term
                let g = self.poly_to_exp(g, &first)?;
                let prev = g
                    .shift_back()
                    .ok_or_else(|| unsupported(&first, "chain of variables that ignore their own value"))?;
                let mut fix = ExpPoly::zero();
                fix.add_part(Rational::zero(), &Poly::var(Var::initial(&first)) - &prev.at(0));
                self.sols[block[0]] = Some(Sol::Exp(prev.add(&fix)));
            }
            BlockKind::Unsupported(reason) => return Err(unsupported(&first, reason)),
        }
        Ok(())
    }

    /// Substitutes solved C-finite closed forms into a polynomial.
    fn poly_to_exp(&self, p: &Poly, target: &Name) -> Result<ExpPoly, RecurrenceError> {
        let idx = self.sys.index();
        let mut acc = ExpPoly::zero();
        for (m, c) in p.terms() {
            let mut coef = Poly::constant(c.clone());
            let mut t = ExpPoly::poly(Poly::one());
            for (v, e) in m.pairs() {
                match idx.get(v) {
                    Some(&j) => match &self.sols[j] {
                        Some(Sol::Exp(s)) => t = t.mul(&s.pow(*e)),
                        _ => {
                            let why = format!("depends on {} whose closed form is not C-finite", self.name(j));
                            return Err(unsupported(target, why));
                        }
                    },
                    None => coef = &coef * &Poly::var(v.clone()).pow(*e),
                }
            }
            acc = acc.add(&t.mul_poly(&coef));
        }
        Ok(acc)
    }

    fn solve_cfinite(&mut self, block: &[usize]) -> Result<(), RecurrenceError> {
        let names: Vec<Name> = block.iter().map(|&i| self.name(i).clone()).collect();
        let bvars: Vec<Var> = names.iter().map(|v| Var::Cur(v.clone())).collect();
        let k = block.len();
        let mut a = Vec::with_capacity(k);
        let mut f = Vec::with_capacity(k);
        for (bi, &i) in block.iter().enumerate() {
            let u = self.sys.update[i].as_poly().ok_or_else(|| unsupported(&names[bi], "non-polynomial update"))?;
            let (row, rest) = linear_split(u, &bvars).map_err(|e| unsupported(&names[bi], e))?;
            a.push(row);
            f.push(self.poly_to_exp(&rest, &names[bi])?);
        }

        let cp = univariate::charpoly(&a);
        let (roots, rest) = univariate::rational_roots(&cp);
        if rest.len() > 1 {
            return Err(RecurrenceError::IrrationalEigenvalue { vars: names, factor: univariate::display(&rest, "x") });
        }
        let mut mult: BTreeMap<Rational, u32> = BTreeMap::new();
        for (r, m) in roots {
            if r.is_zero() {
                return Err(unsupported(&names[0], "nilpotent coupling inside a block"));
            }
            mult.insert(r, m);
        }
        for fi in &f {
            for (t, p) in &fi.parts {
                let extra = p.degree_in(&counter()) + 1;
                let slot = mult.entry(t.clone()).or_insert(0);
                let base = univariate::multiplicity(&cp, t);
                *slot = (*slot).max(base + extra);
            }
        }
        let cols: Vec<(Rational, u32)> = mult.iter().flat_map(|(t, &m)| (0..m).map(move |d| (t.clone(), d))).collect();
        let size = cols.len();

        let mut values: Vec<Vec<Poly>> = Vec::with_capacity(size);
        let mut state: Vec<Poly> = names.iter().map(|v| Poly::var(Var::initial(v))).collect();
        for t in 0..size as u64 {
            values.push(state.clone());
            state = (0..k)
                .map(|i| {
                    let mut acc = f[i].at(t);
                    for (j, s) in state.iter().enumerate() {
                        if !a[i][j].is_zero() {
                            acc = &acc + &s.scale(&a[i][j]);
                        }
                    }
                    acc
                })
                .collect();
        }

        let v: Vec<Vec<Rational>> = (0..size as u64)
            .map(|t| {
                let tr = Rational::from_integer(t.into());
                cols.iter()
                    .map(|(th, d)| num_traits::pow(tr.clone(), *d as usize) * num_traits::pow(th.clone(), t as usize))
                    .collect()
            })
            .collect();
        let inv = invert(v).expect("generalized Vandermonde matrices are invertible");
        let n = Poly::var(counter());
        for (bi, &i) in block.iter().enumerate() {
            let mut e = ExpPoly::zero();
            for (c, (th, d)) in cols.iter().enumerate() {
                let mut coef = Poly::zero();
                for (t, row) in values.iter().enumerate() {
                    if !inv[c][t].is_zero() {
                        coef = &coef + &row[bi].scale(&inv[c][t]);
                    }
                }
                e.add_part(th.clone(), &coef * &n.pow(*d));
            }
            self.sols[i] = Some(Sol::Exp(e));
        }
        Ok(())
    }

    fn solve_hypergeom(&mut self, i: usize, q: &RatFun) -> Result<(), RecurrenceError> {
        let name = self.name(i).clone();
        let u = &self.sys.update[i];
        let v = Var::Cur(name.clone());
        if !u.num().coefficients_in(&v)[0].is_zero() {
            return Err(RecurrenceError::InhomogeneousUnsupported { var: name });
        }
        let non_split = || RecurrenceError::NonSplittingCoefficient { var: name.clone(), coefficient: q.to_string() };
        let num = univariate::from_poly(q.num(), &counter()).ok_or_else(non_split)?;
        let den = univariate::from_poly(q.den(), &counter()).ok_or_else(non_split)?;
        let (nr, nrest) = univariate::rational_roots(&num);
        let (dr, drest) = univariate::rational_roots(&den);
        if nrest.len() > 1 || drest.len() > 1 {
            return Err(non_split());
        }
        let c = &nrest[0] / &drest[0];
        let mut shifts = Vec::new();
        for (roots, sign) in [(nr, 1i32), (dr, -1i32)] {
            for (r, m) in roots {
                // factor (n - r) = (n + α); the product over k < n is (n + α - 1)^n̲
                let alpha = -r;
                if alpha.is_integer() && alpha <= Rational::zero() {
                    let what = if sign > 0 { "vanishes" } else { "has a pole" };
                    return Err(unsupported(&name, format!("coefficient {q} {what} at n = {}", -alpha)));
                }
                shifts.push((alpha - Rational::one(), sign * m as i32));
            }
        }
        shifts.sort();
        self.sols[i] = Some(Sol::Hyper { c, shifts });
        Ok(())
    }
}

fn invert(mut m: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &p;
        }
        for x in inv[col].iter_mut() {
            *x *= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let (a, b) = (m[col][c].clone(), inv[col][c].clone());
                    m[r][c] -= &f * a;
                    inv[r][c] -= &f * b;
                }
            }
        }
    }
    Some(inv)
}

/// Closed forms for every variable of `sys`, verified against iteration for `n ≤ 5`.
pub fn closed_forms(sys: &RecSystem) -> Result<ClosedForm, RecurrenceError> {
    let all: Vec<usize> = (0..sys.vars.len()).collect();
    closed_forms_of(sys, &all)
}

/// Closed forms of the variables in `block` (a C-finite block), with its dependencies solved first.
pub fn solve_cfinite(sys: &RecSystem, block: &[Name]) -> Result<ClosedForm, RecurrenceError> {
    restricted(sys, block)
}

/// Closed form of a single variable with a counter-dependent coefficient.
pub fn solve_hypergeom(sys: &RecSystem, var: &Name) -> Result<ClosedForm, RecurrenceError> {
    restricted(sys, std::slice::from_ref(var))
}

fn restricted(sys: &RecSystem, vars: &[Name]) -> Result<ClosedForm, RecurrenceError> {
    let idx: Vec<usize> = vars
        .iter()
        .map(|v| sys.vars.iter().position(|x| x == v).ok_or_else(|| unsupported(v, "not a variable of the system")))
        .collect::<Result<_, _>>()?;
    closed_forms_of(sys, &idx)
}

fn closed_forms_of(sys: &RecSystem, wanted: &[usize]) -> Result<ClosedForm, RecurrenceError> {
    let mut solver = Solver { sys, sols: (0..sys.vars.len()).map(|_| None).collect() };
    // solve only what the wanted variables transitively need
    let blocks = sccs(sys);
    let idx = sys.index();
    let mut needed: BTreeSet<usize> = wanted.iter().copied().collect();
    for b in blocks.iter().rev() {
        if b.iter().any(|i| needed.contains(i)) {
            for &i in b {
                needed.insert(i);
                needed.extend(sys.update[i].vars().iter().filter_map(|v| idx.get(v).copied()));
            }
        }
    }
    for b in &blocks {
        if b.iter().any(|i| needed.contains(i)) {
            solver.solve(b, classify_block(sys, b))?;
        }
    }
    let sols: Vec<(usize, Sol)> = wanted.iter().map(|&i| (i, solver.sols[i].take().unwrap())).collect();
    let cf = assemble(sys, sols)?;
    verify(sys, wanted, &cf)?;
    Ok(cf)
}

fn assemble(sys: &RecSystem, sols: Vec<(usize, Sol)>) -> Result<ClosedForm, RecurrenceError> {
    let mut theta: Vec<Rational> = Vec::new();
    let mut raw_zeta: Vec<Rational> = Vec::new();
    let note = |t: &Rational, theta: &mut Vec<Rational>| {
        if !t.is_one() && !theta.contains(t) {
            theta.push(t.clone());
        }
    };
    for (_, s) in &sols {
        match s {
            Sol::Exp(e) => e.thetas().for_each(|t| note(t, &mut theta)),
            Sol::Hyper { c, shifts } => {
                note(c, &mut theta);
                for (z, _) in shifts {
                    if !raw_zeta.contains(z) {
                        raw_zeta.push(z.clone());
                    }
                }
            }
        }
    }
    // one representative per ℤ-coset, the smallest member
    let mut zeta: Vec<Rational> = Vec::new();
    for z in &raw_zeta {
        let rep = raw_zeta.iter().filter(|w| (*w - z).is_integer()).min().unwrap();
        if !zeta.contains(rep) {
            zeta.push(rep.clone());
        }
    }
    let y = |t: &Rational| match theta.iter().position(|x| x == t) {
        Some(k) => Var::Exp { step: 0, index: k as u32 },
        None => Var::ZeroPow(0),
    };
    let n = Poly::var(counter());
    let z_of = |z: &Rational| -> RatFun {
        let (k, rep) = zeta.iter().enumerate().find(|(_, r)| (z - *r).is_integer()).unwrap();
        let mut f = RatFun::var(Var::Fact { step: 0, index: k as u32 });
        let steps = (z - rep).to_integer();
        let mut i = Rational::one();
        while i <= Rational::from_integer(steps.clone()) {
            let lin = &n + &Poly::constant(rep + &i);
            f = f.mul(&RatFun::from(lin.scale(&(rep + &i).recip())));
            i += Rational::one();
        }
        f
    };

    let mut zero_pow = false;
    let mut forms = Vec::new();
    let mut vars = Vec::new();
    for (i, s) in sols {
        let v = &sys.vars[i];
        let x0 = Poly::var(Var::initial(v));
        let form = match s {
            Sol::Exp(e) => {
                zero_pow |= e.has_zero_power();
                RatFun::from(e.to_poly(&y))
            }
            Sol::Hyper { c, shifts } => {
                let mut f = RatFun::from(x0);
                if !c.is_one() {
                    f = f.mul(&RatFun::var(y(&c)));
                }
                for (z, e) in shifts {
                    f = f.mul(&z_of(&z).pow(e)?);
                }
                f
            }
        };
        vars.push(v.clone());
        forms.push(form);
    }
    let denominator = forms.iter().fold(Poly::one(), |acc, f| lcm(&acc, f.den()));
    Ok(ClosedForm { vars, forms, theta, zeta, zero_pow, denominator })
}

fn lcm(a: &Poly, b: &Poly) -> Poly {
    let g = gcd(a, b);
    (a * b).div_exact(&g).expect("gcd divides the product").monic()
}

fn verify(sys: &RecSystem, wanted: &[usize], cf: &ClosedForm) -> Result<(), RecurrenceError> {
    let mut state: Vec<RatFun> = sys.vars.iter().map(|v| RatFun::var(Var::initial(v))).collect();
    for n in 0..=5u64 {
        let at = cf.at(n)?;
        for (k, &i) in wanted.iter().enumerate() {
            if at[k] != state[i] {
                return Err(RecurrenceError::Mismatch { var: sys.vars[i].clone(), n });
            }
        }
        state = sys.apply(&state, n)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests;
