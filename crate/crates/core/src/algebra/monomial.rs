use std::fmt;

use smallvec::SmallVec;

use super::Var;

/// Power product stored as `(variable, exponent)` pairs sorted by variable,
/// without zero exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial::from_pairs([(v, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (Var, u32)>>(pairs: I) -> Monomial {
        let mut v: SmallVec<[(Var, u32); 4]> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::with_capacity(v.len());
        for (var, e) in v {
            match out.last_mut() {
                Some((last, le)) if *last == var => *le += e,
                _ => out.push((var, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(v)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().map(|(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial::from_pairs(other.0.iter().map(|(v, e)| (v.clone(), e - self.exponent(v)))))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut pairs: Vec<(Var, u32)> = self.0.to_vec();
        for (v, e) in other.0.iter() {
            match pairs.iter_mut().find(|(w, _)| w == v) {
                Some((_, f)) => *f = (*f).max(*e),
                None => pairs.push((v.clone(), *e)),
            }
        }
        Monomial::from_pairs(pairs)
    }

    pub fn without(&self, v: &Var) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| w != v).cloned().collect())
    }

    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|(v, e)| (f(v), *e)))
    }
}

fn group(v: &Var) -> (u8, u32) {
    match v {
        Var::Param(_) => (0, 0),
        Var::Prog { step, .. } => (1, *step),
        Var::Cur(_) => (2, 0),
        Var::Counter(s) => (3, *s),
        Var::Exp { step, .. } => (4, *step),
        Var::Fact { step, .. } => (5, *step),
        Var::ZeroPow(s) => (6, *s),
        Var::Aux(_) => (7, 0),
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        // current values before initial ones before parameters, names ascending
        let mut factors: Vec<&(Var, u32)> = self.0.iter().collect();
        factors.sort_by_key(|(v, _)| (std::cmp::Reverse(group(v)), v));
        for (i, (v, e)) in factors.into_iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}
