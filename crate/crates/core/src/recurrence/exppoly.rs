//! Exponential polynomials `Σ p_θ(n, …) θ^n` with `θ` rational, the shape
//! every C-finite closed form takes. `θ = 0` is allowed: `0^n` is 1 at
//! `n = 0` and 0 afterwards, so its coefficient is kept at `n = 0`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{Poly, Rational, Var};

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct ExpPoly {
    pub(crate) parts: BTreeMap<Rational, Poly>,
}

pub(crate) fn counter() -> Var {
    Var::Counter(0)
}

impl ExpPoly {
    pub(crate) fn zero() -> ExpPoly {
        ExpPoly::default()
    }

    /// `p · 1^n`.
    pub(crate) fn poly(p: Poly) -> ExpPoly {
        let mut e = ExpPoly::zero();
        e.add_part(Rational::one(), p);
        e
    }

    pub(crate) fn add_part(&mut self, theta: Rational, p: Poly) {
        let p = if theta.is_zero() { p.eval_partial(&|v| (*v == counter()).then(Rational::zero)) } else { p };
        if p.is_zero() {
            return;
        }
        let slot = self.parts.entry(theta.clone()).or_default();
        *slot = &*slot + &p;
        if slot.is_zero() {
            self.parts.remove(&theta);
        }
    }

    pub(crate) fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (t, p) in &o.parts {
            out.add_part(t.clone(), p.clone());
        }
        out
    }

    pub(crate) fn mul(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (ta, pa) in &self.parts {
            for (tb, pb) in &o.parts {
                out.add_part(ta * tb, pa * pb);
            }
        }
        out
    }

    pub(crate) fn mul_poly(&self, p: &Poly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (t, q) in &self.parts {
            out.add_part(t.clone(), q * p);
        }
        out
    }

    pub(crate) fn pow(&self, e: u32) -> ExpPoly {
        let mut acc = ExpPoly::poly(Poly::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Value at a concrete counter value; other symbols stay.
    pub(crate) fn at(&self, n: u64) -> Poly {
        let nr = Rational::from_integer(n.into());
        let mut acc = Poly::zero();
        for (t, p) in &self.parts {
            let tn = num_traits::pow(t.clone(), n as usize);
            let v = p.eval_partial(&|v| (*v == counter()).then(|| nr.clone()));
            acc = &acc + &v.scale(&tn);
        }
        acc
    }

    /// The sequence `n ↦ self(n - 1)`; `None` if a `0^n` part would need `0^(n-1)`.
    pub(crate) fn shift_back(&self) -> Option<ExpPoly> {
        let back = &Poly::var(counter()) - &Poly::one();
        let mut out = ExpPoly::zero();
        for (t, p) in &self.parts {
            if t.is_zero() {
                return None;
            }
            let q = p.substitute(&|v| (*v == counter()).then(|| back.clone()));
            out.add_part(t.clone(), q.scale(&t.recip()));
        }
        Some(out)
    }

    pub(crate) fn thetas(&self) -> impl Iterator<Item = &Rational> {
        self.parts.keys().filter(|t| !t.is_one() && !t.is_zero())
    }

    pub(crate) fn has_zero_power(&self) -> bool {
        self.parts.contains_key(&Rational::zero())
    }

    /// Replace each `θ^n` by the symbol `y(θ)`; `θ = 1` stays bare.
    pub(crate) fn to_poly(&self, y: &impl Fn(&Rational) -> Var) -> Poly {
        let mut acc = Poly::zero();
        for (t, p) in &self.parts {
            let term = if t.is_one() { p.clone() } else { p * &Poly::var(y(t)) };
            acc = &acc + &term;
        }
        acc
    }
}
