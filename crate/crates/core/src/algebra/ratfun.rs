use std::fmt;

use num_traits::{One, Zero};

use super::{gcd, AlgebraError, Poly, Rational, Var};

/// Rational function `num / den` with coprime parts and a denominator that
/// is monic under canonical lex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

/// Builds the reduced form of `num / den`.
pub fn ratfun_normalize(num: Poly, den: Poly) -> Result<RatFun, AlgebraError> {
    RatFun::new(num, den)
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<RatFun, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFun::zero());
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
            }
        };
        let lc = den.monic_factor();
        Ok(RatFun { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn zero() -> RatFun {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFun {
        RatFun::from(Poly::one())
    }

    pub fn constant(c: Rational) -> RatFun {
        RatFun::from(Poly::constant(c))
    }

    pub fn var(v: Var) -> RatFun {
        RatFun::from(Poly::var(v))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.num.mentions(v) || self.den.mentions(v)
    }

    pub fn add(&self, o: &RatFun) -> RatFun {
        if self.den == o.den {
            return RatFun::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        RatFun::new(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den).unwrap()
    }

    pub fn sub(&self, o: &RatFun) -> RatFun {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFun) -> RatFun {
        if self.is_polynomial() && o.is_polynomial() {
            return RatFun::from(&self.num * &o.num);
        }
        RatFun::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }

    pub fn div(&self, o: &RatFun) -> Result<RatFun, AlgebraError> {
        if o.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        RatFun::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn pow(&self, e: i32) -> Result<RatFun, AlgebraError> {
        let base = if e < 0 { RatFun::one().div(self)? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFun { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Simultaneous substitution of variables by rational functions.
    pub fn substitute(&self, f: &impl Fn(&Var) -> Option<RatFun>) -> Result<RatFun, AlgebraError> {
        let n = subst_poly(&self.num, f);
        let d = subst_poly(&self.den, f);
        n.div(&d)
    }

    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> RatFun {
        RatFun::new(self.num.rename(f), self.den.rename(f)).unwrap()
    }

    /// Full evaluation; `None` if a variable is unbound or the denominator vanishes.
    pub fn eval(&self, f: &impl Fn(&Var) -> Option<Rational>) -> Option<Rational> {
        let d = self.den.eval(f)?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(f)? / d)
    }
}

fn subst_poly(p: &Poly, f: &impl Fn(&Var) -> Option<RatFun>) -> RatFun {
    let mut acc = RatFun::zero();
    for (m, c) in p.terms() {
        let mut t = RatFun::constant(c.clone());
        for (v, e) in m.pairs() {
            let base = f(v).unwrap_or_else(|| RatFun::var(v.clone()));
            t = t.mul(&base.pow(*e as i32).unwrap());
        }
        acc = acc.add(&t);
    }
    acc
}

impl Poly {
    /// Reciprocal of the canonical-lex leading coefficient.
    pub(crate) fn monic_factor(&self) -> Rational {
        let m = self.monic();
        if self.is_zero() {
            return Rational::one();
        }
        // any nonzero coefficient gives the ratio
        let (mono, c) = self.terms().next().unwrap();
        m.coeff(mono) / c
    }
}

impl From<Poly> for RatFun {
    fn from(p: Poly) -> RatFun {
        RatFun { num: p, den: Poly::one() }
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.len() > 1 {
            write!(f, "({})/({})", self.num, self.den)
        } else {
            write!(f, "{}/({})", self.num, self.den)
        }
    }
}

impl Default for RatFun {
    fn default() -> Self {
        RatFun::zero()
    }
}
