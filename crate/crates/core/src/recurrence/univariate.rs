//! Dense univariate polynomials over the rationals: characteristic
//! polynomials and rational root extraction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{Poly, Rational, Var};

/// Coefficients indexed by degree, no trailing zeros.
pub(crate) type UPoly = Vec<Rational>;

pub(crate) fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// `None` when `p` mentions anything besides `v`.
pub(crate) fn from_poly(p: &Poly, v: &Var) -> Option<UPoly> {
    let coeffs = p.coefficients_in(v);
    let out: Option<UPoly> = coeffs.iter().map(Poly::constant_value).collect();
    out.map(trim)
}

pub(crate) fn to_poly(p: &[Rational], v: &Var) -> Poly {
    let cs: Vec<Poly> = p.iter().map(|c| Poly::constant(c.clone())).collect();
    Poly::from_coefficients(v, &cs)
}

pub(crate) fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Quotient by `(x - r)`, assuming `r` is a root.
fn deflate(p: &[Rational], r: &Rational) -> UPoly {
    let n = p.len() - 1;
    let mut q = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + &carry * r;
        q[i] = carry.clone();
    }
    q
}

/// Multiplicity of `t` as a root of `p`.
pub(crate) fn multiplicity(p: &[Rational], t: &Rational) -> u32 {
    let mut p: UPoly = p.to_vec();
    let mut m = 0;
    while p.len() > 1 && eval(&p, t).is_zero() {
        p = deflate(&p, t);
        m += 1;
    }
    m
}

/// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier.
pub(crate) fn charpoly(a: &[Vec<Rational>]) -> UPoly {
    let k = a.len();
    let mut c = vec![Rational::zero(); k + 1];
    c[k] = Rational::one();
    let mut m = vec![vec![Rational::zero(); k]; k];
    for i in 1..=k {
        // M_i = A M_{i-1} + c_{k-i+1} I
        let mut next = matmul(a, &m);
        for (d, row) in next.iter_mut().enumerate() {
            row[d] += &c[k - i + 1];
        }
        m = next;
        let am = matmul(a, &m);
        let tr: Rational = (0..k).map(|d| am[d][d].clone()).sum();
        c[k - i] = -tr / Rational::from_integer(BigInt::from(i));
    }
    c
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let k = a.len();
    let mut out = vec![vec![Rational::zero(); k]; k];
    for i in 0..k {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..k {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

/// Rational roots with multiplicities (ascending) and the cofactor without rational roots.
pub(crate) fn rational_roots(p: &[Rational]) -> (Vec<(Rational, u32)>, UPoly) {
    let mut p = trim(p.to_vec());
    let mut roots: Vec<(Rational, u32)> = Vec::new();
    let push = |r: Rational, roots: &mut Vec<(Rational, u32)>| match roots.iter_mut().find(|(x, _)| *x == r) {
        Some((_, m)) => *m += 1,
        None => roots.push((r, 1)),
    };
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        push(Rational::zero(), &mut roots);
    }
    loop {
        if p.len() <= 1 {
            break;
        }
        let ints = integer_coeffs(&p);
        let lead = ints.last().unwrap().abs();
        let tail = ints[0].abs();
        let mut found = None;
        'search: for q in divisors(&lead) {
            for num in divisors(&tail) {
                for s in [1, -1] {
                    let r = Rational::new(&num * BigInt::from(s), q.clone());
                    if eval(&p, &r).is_zero() {
                        found = Some(r);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                p = deflate(&p, &r);
                push(r, &mut roots);
            }
            None => break,
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    (roots, p)
}

fn integer_coeffs(p: &[Rational]) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
        }
        d += 1;
        // factor sizes here are tiny; give up on pathological inputs
        if d.to_u64().is_none_or(|x| x > 5_000_000) {
            break;
        }
    }
    large.reverse();
    small.extend(large);
    small
}

pub(crate) fn display(p: &[Rational], name: &str) -> String {
    to_poly(p, &Var::param(name)).to_string()
}
