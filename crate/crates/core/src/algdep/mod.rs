//! Polynomial relations among the sequences a closed form is built from.
//!
//! Exponentials `θ_k^n` with rational `θ_k` satisfy exactly the binomial
//! relations of their multiplicative lattice. The counter and the factorial
//! sequences are treated as relation-free.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{Monomial, Poly, Rational, Var};
use crate::groebner::{ideal_intersect, ideal_sum, saturate, GbConfig, GroebnerError, Ideal};

/// Integer vectors `e` with `∏ θ_k^{e_k} = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpLattice {
    pub basis: Vec<Vec<i64>>,
}

impl ExpLattice {
    pub fn contains(&self, theta: &[Rational], e: &[i64]) -> bool {
        product_is_one(theta, e)
    }
}

pub fn product_is_one(theta: &[Rational], e: &[i64]) -> bool {
    let mut acc = Rational::one();
    for (t, &k) in theta.iter().zip(e) {
        let p = num_traits::pow(t.clone(), k.unsigned_abs() as usize);
        acc *= if k < 0 { p.recip() } else { p };
    }
    acc.is_one()
}

fn factor(n: &BigInt, into: &mut BTreeMap<BigInt, i64>, sign: i64) {
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        while (&n % &p).is_zero() {
            *into.entry(p.clone()).or_insert(0) += sign;
            n /= &p;
        }
        p += 1;
    }
    if n > BigInt::one() {
        *into.entry(n).or_insert(0) += sign;
    }
}

/// Basis of the lattice of multiplicative relations among nonzero rationals.
pub fn multiplicative_lattice(theta: &[Rational]) -> ExpLattice {
    let k = theta.len();
    let factored: Vec<BTreeMap<BigInt, i64>> = theta
        .iter()
        .map(|t| {
            let mut m = BTreeMap::new();
            factor(t.numer(), &mut m, 1);
            factor(t.denom(), &mut m, -1);
            m
        })
        .collect();
    let primes: Vec<BigInt> = {
        let mut ps: Vec<BigInt> = factored.iter().flat_map(|m| m.keys().cloned()).collect();
        ps.sort();
        ps.dedup();
        ps
    };
    let rows: Vec<Vec<BigInt>> =
        primes.iter().map(|p| factored.iter().map(|m| BigInt::from(*m.get(p).unwrap_or(&0))).collect()).collect();
    let mut kernel = integer_kernel(&rows, k);

    // restrict to vectors with an even number of negative factors
    let odd = |v: &Vec<BigInt>| {
        let s: BigInt = v.iter().zip(theta).filter(|(_, t)| t.is_negative()).map(|(e, _)| e.clone()).sum();
        s.is_odd()
    };
    if let Some(first) = kernel.iter().position(odd) {
        let pivot = kernel[first].clone();
        for (i, v) in kernel.iter_mut().enumerate() {
            if i == first {
                v.iter_mut().for_each(|x| *x *= 2);
            } else if odd(v) {
                v.iter_mut().zip(&pivot).for_each(|(x, p)| *x -= p);
            }
        }
    }
    let basis: Vec<Vec<i64>> =
        kernel.into_iter().map(|v| v.iter().map(|x| x.to_i64().expect("small exponents")).collect()).collect();
    debug_assert!(basis.iter().all(|e| product_is_one(theta, e)));
    ExpLattice { basis }
}

/// ℤ-basis of `{x ∈ ℤ^k : rows · x = 0}` by unimodular column operations.
fn integer_kernel(rows: &[Vec<BigInt>], k: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    // u holds the column operations applied so far, one column per unknown
    let mut u: Vec<Vec<BigInt>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut col = 0;
    for r in 0..a.len() {
        if col == k {
            break;
        }
        // gcd-combine columns col..k in row r into column col
        for j in col + 1..k {
            if a[r][j].is_zero() {
                continue;
            }
            let (x, y) = (a[r][col].clone(), a[r][j].clone());
            let g = x.extended_gcd(&y);
            let (s, t) = (g.x, g.y);
            let (xg, yg) = (&x / &g.gcd, &y / &g.gcd);
            // [c_col, c_j] ← [s·c_col + t·c_j, −yg·c_col + xg·c_j], determinant 1
            let combine = |m: &mut Vec<Vec<BigInt>>| {
                for row in m.iter_mut() {
                    let (p, q) = (row[col].clone(), row[j].clone());
                    row[col] = &s * &p + &t * &q;
                    row[j] = -&yg * &p + &xg * &q;
                }
            };
            combine(&mut a);
            combine(&mut u);
        }
        if !a[r][col].is_zero() {
            col += 1;
        }
    }
    (col..k).map(|j| u.iter().map(|row| row[j].clone()).collect()).collect()
}

fn exp_var(step: u32, k: usize) -> Var {
    Var::Exp { step, index: k as u32 }
}

fn binomial(e: &[i64], step: u32) -> Poly {
    let pos =
        Monomial::from_pairs(e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(k, &x)| (exp_var(step, k), x as u32)));
    let neg = Monomial::from_pairs(
        e.iter().enumerate().filter(|(_, &x)| x < 0).map(|(k, &x)| (exp_var(step, k), (-x) as u32)),
    );
    &Poly::term(pos, Rational::one()) - &Poly::term(neg, Rational::one())
}

/// Ideal of all relations among `θ_k^n` in the symbols `Var::Exp { step, index: k }`.
pub fn dependency_ideal(theta: &[Rational], step: u32, cfg: &GbConfig) -> Result<Ideal, GroebnerError> {
    let lattice = multiplicative_lattice(theta);
    if lattice.basis.is_empty() {
        return Ok(Ideal::zero());
    }
    let gens = Ideal::new(lattice.basis.iter().map(|e| binomial(e, step)));
    let prod = (0..theta.len()).fold(Poly::one(), |acc, k| &acc * &Poly::var(exp_var(step, k)));
    saturate(&gens, &prod, cfg)
}

/// Relations among every sequence symbol of one step: the exponential
/// lattice, plus, when `0^n` occurs as `Var::ZeroPow(step)`, the fact that it
/// is 1 exactly when the counter, all exponentials and all factorials are at
/// their `n = 0` values.
pub fn sequence_relations(
    theta: &[Rational],
    zeta_count: usize,
    zero_pow: bool,
    step: u32,
    cfg: &GbConfig,
) -> Result<Ideal, GroebnerError> {
    let lattice = dependency_ideal(theta, step, cfg)?;
    if !zero_pow {
        return Ok(lattice);
    }
    let one = Poly::one();
    let w = Poly::var(Var::ZeroPow(step));
    let mut at_start = vec![&w - &one, Poly::var(Var::Counter(step))];
    at_start.extend((0..theta.len()).map(|k| &Poly::var(exp_var(step, k)) - &one));
    at_start.extend((0..zeta_count).map(|k| &Poly::var(Var::Fact { step, index: k as u32 }) - &one));
    let later = ideal_sum(&Ideal::new([w]), &lattice);
    ideal_intersect(&Ideal::new(at_start), &later, cfg)
}
