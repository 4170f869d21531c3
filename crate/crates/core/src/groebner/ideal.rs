use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use crate::algebra::{Poly, TermOrder, Var};

use super::buchberger::{self, GbStats};
use super::{GbConfig, GroebnerError};

/// Finitely generated polynomial ideal with a lazily computed reduced basis.
#[derive(Clone, Debug, Default)]
pub struct Ideal {
    gens: Vec<Poly>,
    gb: Arc<OnceLock<(TermOrder, Vec<Poly>)>>,
}

impl Ideal {
    pub fn new<I: IntoIterator<Item = Poly>>(gens: I) -> Ideal {
        let mut out: Vec<Poly> = Vec::new();
        for g in gens {
            if !g.is_zero() && !out.contains(&g) {
                out.push(g);
            }
        }
        Ideal { gens: out, gb: Arc::default() }
    }

    pub fn zero() -> Ideal {
        Ideal::default()
    }

    /// Ideal whose generators are already the reduced basis under `order`.
    pub fn from_reduced_basis(basis: Vec<Poly>, order: TermOrder) -> Ideal {
        let cell = OnceLock::new();
        let _ = cell.set((order, basis.clone()));
        Ideal { gens: basis, gb: Arc::new(cell) }
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.gens.iter().flat_map(Poly::vars).collect()
    }

    /// Reduced basis under `order`, served from the cache when it matches.
    pub fn basis(&self, order: &TermOrder, cfg: &GbConfig) -> Result<Vec<Poly>, GroebnerError> {
        if let Some((o, b)) = self.gb.get() {
            if o == order {
                return Ok(b.clone());
            }
        }
        let (b, _) = buchberger::reduced_basis(&self.gens, order, cfg)?;
        let _ = self.gb.set((order.clone(), b.clone()));
        Ok(b)
    }

    pub fn basis_with_stats(&self, order: &TermOrder, cfg: &GbConfig) -> Result<(Vec<Poly>, GbStats), GroebnerError> {
        buchberger::reduced_basis(&self.gens, order, cfg)
    }

    pub fn contains(&self, p: &Poly, order: &TermOrder, cfg: &GbConfig) -> Result<bool, GroebnerError> {
        let b = self.basis(order, cfg)?;
        Ok(normal_form(p, &b, order).is_zero())
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit(&self, cfg: &GbConfig) -> Result<bool, GroebnerError> {
        let b = self.basis(&TermOrder::degrevlex(), cfg)?;
        Ok(b.len() == 1 && b[0].is_constant())
    }

    fn fresh_aux(&self, extra: &[&Poly]) -> Var {
        let mut vars = self.vars();
        for p in extra {
            vars.extend(p.vars());
        }
        let next = vars
            .iter()
            .filter_map(|v| match v {
                Var::Aux(k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Var::Aux(next)
    }
}

pub fn groebner_basis(ideal: &Ideal, order: &TermOrder, cfg: &GbConfig) -> Result<Vec<Poly>, GroebnerError> {
    ideal.basis(order, cfg)
}

/// Remainder of multivariate division of `p` by the Groebner basis `basis`.
pub fn normal_form(p: &Poly, basis: &[Poly], order: &TermOrder) -> Poly {
    buchberger::normal_form(p, basis, order)
}

pub fn ideal_sum(a: &Ideal, b: &Ideal) -> Ideal {
    Ideal::new(a.gens.iter().chain(b.gens.iter()).cloned())
}

/// `I ∩ K[keep]`, computed under a block order with the eliminated variables on top.
/// The result carries its reduced basis under canonical degrevlex.
pub fn eliminate(ideal: &Ideal, keep: &BTreeSet<Var>, cfg: &GbConfig) -> Result<Ideal, GroebnerError> {
    let elim: Vec<Var> = ideal.vars().into_iter().filter(|v| !keep.contains(v)).collect();
    if elim.is_empty() {
        let b = ideal.basis(&TermOrder::degrevlex(), cfg)?;
        return Ok(Ideal::from_reduced_basis(b, TermOrder::degrevlex()));
    }
    let order = TermOrder::elimination(elim.iter().cloned());
    let basis = ideal.basis(&order, cfg)?;
    let kept: Vec<Poly> = basis.into_iter().filter(|g| g.vars().iter().all(|v| keep.contains(v))).collect();
    Ok(Ideal::from_reduced_basis(kept, TermOrder::degrevlex()))
}

pub fn ideal_intersect(a: &Ideal, b: &Ideal, cfg: &GbConfig) -> Result<Ideal, GroebnerError> {
    if a.is_zero() || b.is_zero() {
        return Ok(Ideal::zero());
    }
    let t = a.fresh_aux(&b.gens.iter().collect::<Vec<_>>());
    let tp = Poly::var(t.clone());
    let one_minus_t = &Poly::one() - &tp;
    let gens = a.gens.iter().map(|g| &tp * g).chain(b.gens.iter().map(|g| &one_minus_t * g));
    let mut keep = a.vars();
    keep.extend(b.vars());
    eliminate(&Ideal::new(gens), &keep, cfg)
}

/// `I : q^∞` through one elimination of a Rabinowitsch variable.
pub fn saturate(ideal: &Ideal, q: &Poly, cfg: &GbConfig) -> Result<Ideal, GroebnerError> {
    assert!(!q.is_zero(), "saturation by the zero polynomial");
    if q.is_constant() {
        return Ok(ideal.clone());
    }
    let w = ideal.fresh_aux(&[q]);
    let mut keep = ideal.vars();
    keep.extend(q.vars());
    let rab = &Poly::one() - &(&Poly::var(w) * q);
    let gens = ideal.gens.iter().cloned().chain(std::iter::once(rab));
    eliminate(&Ideal::new(gens), &keep, cfg)
}

pub fn ideal_equal(a: &Ideal, b: &Ideal, order: &TermOrder, cfg: &GbConfig) -> Result<bool, GroebnerError> {
    let ga = a.basis(order, cfg)?;
    let gb = b.basis(order, cfg)?;
    Ok(ga.len() == gb.len() && ga.iter().all(|g| gb.contains(g)))
}

/// Applies a variable renaming; variables missing from `map` stay fixed.
pub fn rename_vars(ideal: &Ideal, map: &BTreeMap<Var, Var>) -> Result<Ideal, GroebnerError> {
    let vars = ideal.vars();
    let image = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
    let mut seen: BTreeMap<Var, Var> = BTreeMap::new();
    for v in &vars {
        let w = image(v);
        if let Some(prev) = seen.insert(w.clone(), v.clone()) {
            return Err(GroebnerError::Collision(format!("{w} (from {prev} and {v})")));
        }
    }
    let gens: Vec<Poly> = ideal.gens.iter().map(|g| g.rename(&image)).collect();
    // a strictly increasing renaming keeps every degrevlex comparison intact
    let monotone = seen.keys().cloned().collect::<Vec<_>>() == vars.iter().map(image).collect::<Vec<_>>();
    if monotone {
        if let Some((o, b)) = ideal.gb.get() {
            if *o == TermOrder::degrevlex() {
                let b = b.iter().map(|g| g.rename(&image)).collect();
                return Ok(Ideal { gens, gb: Arc::new(cell_with(o.clone(), b)) });
            }
        }
    }
    Ok(Ideal::new(gens))
}

fn cell_with(o: TermOrder, b: Vec<Poly>) -> OnceLock<(TermOrder, Vec<Poly>)> {
    let cell = OnceLock::new();
    let _ = cell.set((o, b));
    cell
}
