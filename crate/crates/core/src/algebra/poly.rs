use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rational::int, Monomial, Rational, TermOrder, Var};

/// Sparse multivariate polynomial over the rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::term(Monomial::one(), c)
    }

    pub fn int(c: i64) -> Poly {
        Poly::constant(int(c))
    }

    pub fn var(v: Var) -> Poly {
        Poly::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().cloned()).collect()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, k)| (n.mul(m), k.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `v`,
    /// indexed by degree.
    pub fn coefficients_in(&self, v: &Var) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            out[e].add_term(m.without(v), c.clone());
        }
        out
    }

    pub fn from_coefficients(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = Monomial::from_pairs([(v.clone(), e as u32)]);
            out = out + c.mul_monomial(&m);
        }
        out
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, f: &impl Fn(&Var) -> Option<Poly>) -> Poly {
        let mut cache: BTreeMap<(Var, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            let mut rest = Vec::new();
            for (v, e) in m.pairs() {
                match f(v) {
                    Some(p) => {
                        let key = (v.clone(), *e);
                        let pe = cache.entry(key).or_insert_with(|| p.pow(*e)).clone();
                        t = &t * &pe;
                    }
                    None => rest.push((v.clone(), *e)),
                }
            }
            out = out + t.mul_monomial(&Monomial::from_pairs(rest));
        }
        out
    }

    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.rename(f), c.clone())))
    }

    /// Partial evaluation; variables mapped to `None` stay symbolic.
    pub fn eval_partial(&self, f: &impl Fn(&Var) -> Option<Rational>) -> Poly {
        self.substitute(&|v| f(v).map(Poly::constant))
    }

    /// Full evaluation; `None` if some variable has no value.
    pub fn eval(&self, f: &impl Fn(&Var) -> Option<Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.pairs() {
                t *= num_traits::pow(f(v)?, *e as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Leading term with respect to `order`.
    pub fn leading_term(&self, order: &TermOrder) -> Option<(Monomial, Rational)> {
        let layout = order.layout(self.vars().iter());
        self.terms
            .iter()
            .map(|(m, c)| (layout.exponents(m), m, c))
            .max_by(|a, b| layout.cmp_exps(&a.0, &b.0))
            .map(|(_, m, c)| (m.clone(), c.clone()))
    }

    fn lex_leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0))
    }

    /// Scales so that the leading coefficient under canonical lex is one.
    pub fn monic(&self) -> Poly {
        match self.lex_leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => Poly::zero(),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.lex_leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.lex_leading() {
            let qm = dm.quotient_of(m)?;
            let qc = c / &dc;
            let t = Poly::term(qm, qc);
            rem = rem - &t * d;
            quot = quot + t;
        }
        Some(quot)
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        Rational::new(num, den)
    }

    /// Integer-coefficient primitive part whose first printed term is positive.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.sorted_terms()[0].1.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Terms sorted for presentation: descending canonical degrevlex.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grevlex_cmp(b.0, a.0));
        v
    }
}

/// Canonical lex comparison (greatest variable decides first).
pub fn lex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let mut ia = a.pairs().iter().rev();
    let mut ib = b.pairs().iter().rev();
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((va, ea)), Some((vb, eb))) => {
                if va != vb {
                    return va.cmp(vb);
                }
                if ea != eb {
                    return ea.cmp(eb);
                }
            }
        }
    }
}

/// Canonical degrevlex comparison.
pub fn grevlex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        let (pa, pb) = (a.pairs(), b.pairs());
        let (mut i, mut j) = (0, 0);
        loop {
            match (pa.get(i), pb.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    // a has a positive exponent on a smaller variable
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => {
                        if ea != eb {
                            return eb.cmp(ea);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    })
}

/// Greatest common divisor, normalized to be monic under canonical lex.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    gcd_rec(a, b).monic()
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let x = a.vars().into_iter().chain(b.vars()).max().unwrap();
    if !a.mentions(&x) {
        return gcd_rec(a, &content_in(b, &x));
    }
    if !b.mentions(&x) {
        return gcd_rec(&content_in(a, &x), b);
    }
    let ca = content_in(a, &x);
    let cb = content_in(b, &x);
    let c = gcd_rec(&ca, &cb);
    let mut p = divide_coeffs(&a.coefficients_in(&x), &ca);
    let mut q = divide_coeffs(&b.coefficients_in(&x), &cb);
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    while !(q.len() == 1 && q[0].is_zero()) {
        let r = pseudo_rem(&p, &q);
        p = q;
        if r.is_empty() {
            q = vec![Poly::zero()];
        } else {
            let rc = coeff_list_gcd(&r);
            q = divide_coeffs(&r, &rc);
        }
    }
    let g = Poly::from_coefficients(&x, &p);
    let gc = content_in(&g, &x);
    let g = Poly::from_coefficients(&x, &divide_coeffs(&g.coefficients_in(&x), &gc));
    (&c * &g).primitive()
}

fn content_in(p: &Poly, x: &Var) -> Poly {
    coeff_list_gcd(&p.coefficients_in(x))
}

fn coeff_list_gcd(cs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in cs {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, c);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

fn divide_coeffs(cs: &[Poly], d: &Poly) -> Vec<Poly> {
    cs.iter().map(|c| c.div_exact(d).expect("content must divide every coefficient")).collect()
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().is_some_and(Poly::is_zero) {
        v.pop();
    }
}

/// Sparse pseudo-remainder of univariate polynomials with polynomial coefficients.
fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (i, bc) in b.iter().enumerate() {
            let t = &lr * bc;
            r[i + shift] = &r[i + shift] - &t;
        }
        trim(&mut r);
    }
    r
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Poly {
        Poly::var(v)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}
