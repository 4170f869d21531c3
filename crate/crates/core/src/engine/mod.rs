//! Invariant ideals of `(B₁*; …; B_r*)*` from the closed forms of the bodies.
//!
//! Step `i` runs one body as an inner loop and maps the values `v^(i)` to
//! `v^(i+1)`. Its closed form ideal `J_i`, the relations `I_i` among its
//! sequence symbols and the ideal `𝓘_{i-1}` reached so far are combined,
//! saturated by the closed-form denominator and projected onto
//! `K[v^(i+1), v^(0), params]`.

use std::collections::{BTreeMap, BTreeSet};

use crate::algdep::sequence_relations;
use crate::algebra::TermOrder;
use crate::algebra::{Name, Poly, RatFun, Var};
use crate::frontend::LoopProgram;
use crate::groebner::{eliminate, ideal_equal, ideal_sum, rename_vars, GbConfig, GroebnerError, Ideal};
use crate::recurrence::{closed_forms, extract_system, ClosedForm, RecurrenceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("body {body}: {source}")]
    Recurrence { body: usize, source: RecurrenceError },
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("no fixed point after {iterations} sweeps over {vars} variables")]
    BoundExceeded { iterations: usize, vars: usize },
}

impl EngineError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, EngineError::Groebner(GroebnerError::ResourceLimit(_)))
    }
}

/// Maps the step-0 symbols of a closed form to those of `step`; `Prog { 0 }`
/// (the values before the body) becomes `Prog { step }`.
fn at_step(v: &Var, step: u32) -> Var {
    match v {
        Var::Prog { step: 0, name } => Var::Prog { step, name: name.clone() },
        Var::Counter(0) => Var::Counter(step),
        Var::Exp { step: 0, index } => Var::Exp { step, index: *index },
        Var::Fact { step: 0, index } => Var::Fact { step, index: *index },
        Var::ZeroPow(0) => Var::ZeroPow(step),
        other => other.clone(),
    }
}

/// `J = Σ ⟨q_j·v_j^(step+1) − p_j⟩` for the closed forms `v_j = p_j / q_j`.
pub fn closed_form_ideal(cf: &ClosedForm, step: u32) -> Ideal {
    let gens = cf.vars.iter().zip(&cf.forms).map(|(v, f)| {
        let f = f.rename(&|x| at_step(x, step));
        let next = Poly::var(Var::Prog { step: step + 1, name: v.clone() });
        &(f.den() * &next) - f.num()
    });
    Ideal::new(gens)
}

/// Denominator `d` of the closed forms, in the symbols of `step`.
pub fn step_denominator(cf: &ClosedForm, step: u32) -> Poly {
    cf.denominator.rename(&|x| at_step(x, step))
}

/// `Σ ⟨v^(step) − v^(0)⟩`.
pub fn identity_ideal(vars: &[Name], step: u32) -> Ideal {
    Ideal::new(vars.iter().map(|v| &Poly::var(Var::Prog { step, name: v.clone() }) - &Poly::var(Var::initial(v))))
}

/// One solved body together with the relations among its sequence symbols.
#[derive(Clone, Debug)]
pub struct SolvedBody {
    pub closed_form: ClosedForm,
    relations: Ideal,
}

impl SolvedBody {
    pub fn new(cf: ClosedForm, cfg: &GbConfig) -> Result<SolvedBody, EngineError> {
        let relations = sequence_relations(&cf.theta, cf.zeta.len(), cf.zero_pow, 0, cfg)?;
        Ok(SolvedBody { closed_form: cf, relations })
    }

    pub fn relations_at(&self, step: u32) -> Ideal {
        let map: BTreeMap<Var, Var> =
            self.relations.vars().into_iter().map(|v| (v.clone(), at_step(&v, step))).collect();
        rename_vars(&self.relations, &map).expect("step renaming is injective")
    }
}

pub fn solve_bodies(prog: &LoopProgram, cfg: &GbConfig) -> Result<Vec<SolvedBody>, EngineError> {
    prog.bodies
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let sys =
                extract_system(b, &prog.vars).map_err(|source| EngineError::Recurrence { body: i + 1, source })?;
            let cf = closed_forms(&sys).map_err(|source| EngineError::Recurrence { body: i + 1, source })?;
            SolvedBody::new(cf, cfg)
        })
        .collect()
}

fn keep_set(vars: &[Name], params: &[Name], step: u32) -> BTreeSet<Var> {
    let mut keep: BTreeSet<Var> = params.iter().map(|p| Var::Param(p.clone())).collect();
    for v in vars {
        keep.insert(Var::Prog { step, name: v.clone() });
        keep.insert(Var::initial(v));
    }
    keep
}

/// `((J + prev + I) : d^∞) ∩ K[v^(step+1), v^(0), params]`, with the
/// saturation folded into the elimination through `1 − t·d`.
fn compose_step(
    body: &SolvedBody,
    prev: &Ideal,
    step: u32,
    vars: &[Name],
    params: &[Name],
    cfg: &GbConfig,
) -> Result<Ideal, EngineError> {
    let cf = &body.closed_form;
    let mut sum = ideal_sum(&ideal_sum(&closed_form_ideal(cf, step), prev), &body.relations_at(step));
    let d = step_denominator(cf, step);
    if !d.is_constant() {
        let t = Poly::var(Var::Aux(0));
        sum = ideal_sum(&sum, &Ideal::new([&Poly::one() - &(&t * &d)]));
    }
    Ok(eliminate(&sum, &keep_set(vars, params, step + 1), cfg)?)
}

/// Invariant ideal of a single body: `((J + I) : d^∞) ∩ K[v^(1), v^(0), params]`.
pub fn single_path_invariants(
    body: &SolvedBody,
    vars: &[Name],
    params: &[Name],
    cfg: &GbConfig,
) -> Result<Ideal, EngineError> {
    compose_step(body, &Ideal::zero(), 0, vars, params, cfg)
}

/// Result of an invariant computation.
#[derive(Clone, Debug)]
pub struct Invariants {
    /// Over `Var::Cur` (final values), `Var::initial` and `Var::Param`.
    pub ideal: Ideal,
    /// Sweeps over all bodies, including the one confirming the fixed point.
    pub iterations: usize,
    /// `history[i]` is `𝓘_i` over `v^(i+1)`, `v^(0)` and parameters.
    pub history: Vec<Ideal>,
}

/// Renames `v^(step)` to the bare program names.
pub fn present(ideal: &Ideal, vars: &[Name], step: u32) -> Ideal {
    let map: BTreeMap<Var, Var> =
        vars.iter().map(|v| (Var::Prog { step, name: v.clone() }, Var::Cur(v.clone()))).collect();
    if step == 0 {
        return ideal.clone();
    }
    rename_vars(ideal, &map).expect("presentation renaming is injective")
}

fn shift_values(ideal: &Ideal, vars: &[Name], from: u32, to: u32) -> Ideal {
    let map: BTreeMap<Var, Var> = vars
        .iter()
        .map(|v| (Var::Prog { step: from, name: v.clone() }, Var::Prog { step: to, name: v.clone() }))
        .collect();
    rename_vars(ideal, &map).expect("step renaming is injective")
}

/// Fixed-point iteration over sweeps of all bodies.
pub fn invariants_fixpoint(prog: &LoopProgram, cfg: &GbConfig) -> Result<Invariants, EngineError> {
    let bodies = solve_bodies(prog, cfg)?;
    invariants_fixpoint_solved(prog, &bodies, cfg)
}

pub fn invariants_fixpoint_solved(
    prog: &LoopProgram,
    bodies: &[SolvedBody],
    cfg: &GbConfig,
) -> Result<Invariants, EngineError> {
    let (vars, params) = (&prog.vars, &prog.params);
    let r = bodies.len() as u32;
    let m = vars.len();
    let mut current = identity_ideal(vars, 1);
    let mut history = vec![current.clone()];
    let mut j: u32 = 0;
    let order = TermOrder::degrevlex();
    loop {
        let old = current.clone();
        j += 1;
        for (b, body) in bodies.iter().enumerate() {
            let step = (j - 1) * r + b as u32 + 1;
            current = compose_step(body, &current, step, vars, params, cfg)?;
            history.push(current.clone());
        }
        let last = j * r + 1;
        if current.is_zero() || ideal_equal(&shift_values(&old, vars, (j - 1) * r + 1, last), &current, &order, cfg)? {
            return Ok(Invariants { ideal: present(&current, vars, last), iterations: j as usize, history });
        }
        // beyond m strict descents plus the confirming sweep something is wrong
        if j as usize > m + 1 {
            return Err(EngineError::BoundExceeded { iterations: j as usize, vars: m });
        }
    }
}

/// Composes `m` sweeps of all bodies symbolically and eliminates once.
pub fn invariants_unrolled(prog: &LoopProgram, cfg: &GbConfig) -> Result<Invariants, EngineError> {
    let bodies = solve_bodies(prog, cfg)?;
    invariants_unrolled_solved(prog, &bodies, cfg)
}

pub fn invariants_unrolled_solved(
    prog: &LoopProgram,
    bodies: &[SolvedBody],
    cfg: &GbConfig,
) -> Result<Invariants, EngineError> {
    let (vars, params) = (&prog.vars, &prog.params);
    let r = bodies.len() as u32;
    let m = (vars.len() as u32).max(1);
    let mut gens: Vec<Poly> = identity_ideal(vars, 1).generators().to_vec();
    let mut dens = Poly::one();
    for j in 1..=m {
        for (b, body) in bodies.iter().enumerate() {
            let step = (j - 1) * r + b as u32 + 1;
            gens.extend(closed_form_ideal(&body.closed_form, step).generators().iter().cloned());
            gens.extend(body.relations_at(step).generators().iter().cloned());
            dens = &dens * &step_denominator(&body.closed_form, step);
        }
    }
    if !dens.is_constant() {
        gens.push(&Poly::one() - &(&Poly::var(Var::Aux(0)) * &dens));
    }
    let last = m * r + 1;
    let ideal = eliminate(&Ideal::new(gens), &keep_set(vars, params, last), cfg)?;
    Ok(Invariants { ideal: present(&ideal, vars, last), iterations: m as usize, history: vec![] })
}

/// Substitutes initial values (`Var::initial`) by polynomials in parameters
/// and returns the reduced image ideal.
pub fn instantiate(ideal: &Ideal, init: &BTreeMap<Name, Poly>, cfg: &GbConfig) -> Result<Ideal, EngineError> {
    let sub = |v: &Var| match v {
        Var::Prog { step: 0, name } => init.get(name).cloned(),
        _ => None,
    };
    let image = Ideal::new(ideal.generators().iter().map(|g| g.substitute(&sub)));
    let basis = image.basis(&TermOrder::degrevlex(), cfg)?;
    Ok(Ideal::from_reduced_basis(basis, TermOrder::degrevlex()))
}

/// Initial values given as rational functions; only polynomial ones are accepted.
pub fn polynomial_inits(init: &BTreeMap<Name, RatFun>) -> Option<BTreeMap<Name, Poly>> {
    init.iter().map(|(k, v)| v.as_poly().map(|p| (k.clone(), p.clone()))).collect()
}

#[cfg(test)]
mod tests;
