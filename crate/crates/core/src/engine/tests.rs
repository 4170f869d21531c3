use std::collections::BTreeMap;

use super::*;
use crate::algebra::TermOrder;
use crate::frontend::parse_poly_std;
use crate::groebner::{ideal_equal, normal_form};

fn corpus(name: &str) -> LoopProgram {
    let path = format!("{}/../../corpus/{name}.loop", env!("CARGO_MANIFEST_DIR"));
    LoopProgram::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn ideal_of(gens: &[&str], params: &[&str]) -> Ideal {
    Ideal::new(gens.iter().map(|g| parse_poly_std(g, params).unwrap()))
}

fn same(a: &Ideal, b: &Ideal) -> bool {
    ideal_equal(a, b, &TermOrder::degrevlex(), &GbConfig::default()).unwrap()
}

#[test]
fn factorial_exponential_loop() {
    let inv = invariants_fixpoint(&corpus("factexp"), &GbConfig::default()).unwrap();
    assert!(same(&inv.ideal, &ideal_of(&["b*c*a_0 - a*b_0*c_0"], &[])));
}

#[test]
fn euclidex_first_step_and_fixed_point() {
    let prog = corpus("euclidex");
    let inv = invariants_fixpoint(&prog, &GbConfig::default()).unwrap();
    let first = ideal_of(
        &[
            "b_0-b_2",
            "q_0-q_2",
            "s_0-s_2",
            "-p_0*s_2+p_2*s_2+q_2*r_0-q_2*r_2",
            "a_0*s_2-a_2*s_2-b_2*r_0+b_2*r_2",
            "a_0*q_2-a_2*q_2-b_2*p_0+b_2*p_2",
        ],
        &[],
    );
    assert!(same(&inv.history[1], &first));
    let i4 = ideal_of(
        &[
            "p_0*s_0 - p_5*s_5 - r_0*q_0 + r_5*q_5",
            "b_5*p_5 - b_0*p_0 + a_0*q_0 - a_5*q_5",
            "b_5*r_5 - b_0*r_0 + a_0*s_0 - a_5*s_5",
            "b_5*(-p_5*s_0 + r_5*q_0) + b_0*(p_5*s_5 - r_5*q_5) + a_5*(-s_5*q_0 + s_0*q_5)",
            "b_5*(-p_5*r_0 + p_0*r_5) + a_5*(-p_0*s_5 + r_0*q_5) + a_0*(p_5*s_5 - r_5*q_5)",
            "b_0*p_0*(-p_5*s_5 + r_5*q_5) + b_5*(p_5^2*s_5 - p_0*r_5*q_0 + p_5*(r_0*q_0 - r_5*q_5)) \
             + a_5*(p_0*s_5*q_0 + q_5*(-p_5*s_5 - r_0*q_0 + r_5*q_5))",
        ],
        &[],
    );
    assert!(same(&inv.history[4], &i4));
    assert!(!same(&shift_values(&inv.history[2], &prog.vars, 3, 5), &inv.history[4]));
    assert_eq!(inv.iterations, 3);
    assert!(same(&inv.ideal, &present(&i4, &prog.vars, 5)));
}

fn assert_members(ideal: &Ideal, gens: &[&str], params: &[&str]) {
    let basis = ideal.basis(&TermOrder::degrevlex(), &GbConfig::default()).unwrap();
    for g in gens {
        let p = parse_poly_std(g, params).unwrap();
        assert!(normal_form(&p, &basis, &TermOrder::degrevlex()).is_zero(), "{g} not in ideal");
    }
}

fn inits(pairs: &[(&str, &str)], params: &[&str]) -> BTreeMap<Name, Poly> {
    pairs.iter().map(|(k, v)| (Name::from(*k), parse_poly_std(v, params).unwrap())).collect()
}

#[test]
fn instantiated_euclidex() {
    let inv = invariants_fixpoint(&corpus("euclidex"), &GbConfig::default()).unwrap();
    let p = ["x", "y"];
    let init = inits(&[("a", "x"), ("b", "y"), ("p", "1"), ("q", "0"), ("r", "0"), ("s", "1")], &p);
    let inst = instantiate(&inv.ideal, &init, &GbConfig::default()).unwrap();
    assert_members(
        &inst,
        &[
            "1 + q*r - p*s",
            "b*p - a*q - y",
            "b*r - a*s + x",
            "-b*p + a*q - q*r*y + p*s*y",
            "b*r - a*s - q*r*x + p*s*x",
            "(q*r - p*s)*(-b*p + a*q + y)",
        ],
        &p,
    );
}

#[test]
fn instantiated_fermat_and_wensley() {
    let cfg = GbConfig::default();
    let inv = invariants_fixpoint(&corpus("fermat"), &cfg).unwrap();
    assert_eq!(inv.iterations, 2);
    let p = ["R", "N"];
    let inst = instantiate(&inv.ideal, &inits(&[("u", "2*R + 1"), ("v", "1"), ("r", "R*R - N")], &p), &cfg).unwrap();
    assert_members(&inst, &["-4*N - 4*r - 2*u + u^2 + 2*v - v^2"], &p);

    let inv = invariants_fixpoint(&corpus("wensley"), &cfg).unwrap();
    assert_eq!(inv.iterations, 2);
    let p = ["Q"];
    let inst = instantiate(&inv.ideal, &inits(&[("a", "0"), ("b", "Q/2"), ("d", "1"), ("y", "0")], &p), &cfg).unwrap();
    assert_members(&inst, &["2*b - d*Q", "a*d - 2*b*y", "a - Q*y"], &p);
}

#[test]
fn sweeps_descend() {
    let prog = corpus("euclidex");
    let inv = invariants_fixpoint(&prog, &GbConfig::default()).unwrap();
    let r = prog.bodies.len() as u32;
    let basis_of = |i: &Ideal| i.basis(&TermOrder::degrevlex(), &GbConfig::default()).unwrap();
    for j in 1..inv.iterations as u32 {
        let older = shift_values(&inv.history[((j - 1) * r) as usize], &prog.vars, (j - 1) * r + 1, j * r + 1);
        let newer = &inv.history[(j * r) as usize];
        let basis = basis_of(&older);
        for g in newer.generators() {
            assert!(normal_form(g, &basis, &TermOrder::degrevlex()).is_zero());
        }
    }
}

#[test]
fn unrolled_agrees_with_fixpoint() {
    for name in ["factexp", "mannadiv", "fermat"] {
        let prog = corpus(name);
        let a = invariants_fixpoint(&prog, &GbConfig::default()).unwrap();
        let b = invariants_unrolled(&prog, &GbConfig::default()).unwrap();
        assert!(same(&a.ideal, &b.ideal), "{name}");
    }
}

#[test]
fn sign_flip_needs_a_confirming_sweep() {
    // x ↦ −x has 0 invariants after one sweep; the second sweep confirms it
    let prog = LoopProgram::parse("vars x\nwhile c do x := -x end while").unwrap();
    let inv = invariants_fixpoint(&prog, &GbConfig::default()).unwrap();
    assert!(same(&inv.ideal, &ideal_of(&["x^2 - x_0^2"], &[])));
    assert_eq!(inv.iterations, 2);
}

#[test]
fn single_body_matches_closed_form() {
    let prog = corpus("factexp");
    let bodies = solve_bodies(&prog, &GbConfig::default()).unwrap();
    let inv = single_path_invariants(&bodies[0], &prog.vars, &prog.params, &GbConfig::default()).unwrap();
    assert!(same(&inv, &ideal_of(&["b_1*c_1*a_0 - a_1*b_0*c_0"], &[])));
}

#[test]
fn pair_budget_is_reported() {
    let cfg = GbConfig { max_pairs: 3, ..GbConfig::default() };
    let err = invariants_fixpoint(&corpus("euclidex"), &cfg).unwrap_err();
    assert!(err.is_resource_limit());
}

#[test]
fn euclidex_first_closed_form_ideal() {
    let prog = corpus("euclidex");
    let bodies = solve_bodies(&prog, &GbConfig::default()).unwrap();
    let j = closed_form_ideal(&bodies[0].closed_form, 1);
    let counter = Poly::var(Var::Counter(1));
    let lin = |a: &str, b: &str| {
        &(&Poly::var(Var::prog(a, 2)) - &Poly::var(Var::prog(a, 1))) + &(&Poly::var(Var::prog(b, 1)) * &counter)
    };
    let keep = |a: &str| &Poly::var(Var::prog(a, 2)) - &Poly::var(Var::prog(a, 1));
    let expected = Ideal::new([lin("a", "b"), lin("p", "q"), lin("r", "s"), keep("b"), keep("q"), keep("s")]);
    assert!(same(&j, &expected));
}

#[test]
fn identity_body() {
    let prog = LoopProgram::parse("vars x, y\nwhile c do skip end while").unwrap();
    let bodies = solve_bodies(&prog, &GbConfig::default()).unwrap();
    let j = closed_form_ideal(&bodies[0].closed_form, 3);
    assert!(same(&j, &ideal_of(&["x_4 - x_3", "y_4 - y_3"], &[])));
    let single = single_path_invariants(&bodies[0], &prog.vars, &prog.params, &GbConfig::default()).unwrap();
    assert!(same(&single, &ideal_of(&["x_1 - x_0", "y_1 - y_0"], &[])));
    let inv = invariants_fixpoint(&prog, &GbConfig::default()).unwrap();
    assert_eq!(inv.iterations, 1);
    assert!(same(&inv.ideal, &ideal_of(&["x - x_0", "y - y_0"], &[])));
    let unrolled = invariants_unrolled(&prog, &GbConfig::default()).unwrap();
    assert!(same(&unrolled.ideal, &inv.ideal));
}

#[test]
fn single_body_programs_agree_with_single_path() {
    for name in ["factexp", "cohencu", "freire2", "petter3"] {
        let prog = corpus(name);
        let cfg = GbConfig::default();
        let bodies = solve_bodies(&prog, &cfg).unwrap();
        let single =
            present(&single_path_invariants(&bodies[0], &prog.vars, &prog.params, &cfg).unwrap(), &prog.vars, 1);
        let inv = invariants_fixpoint(&prog, &cfg).unwrap();
        assert!(same(&single, &inv.ideal), "{name}");
    }
}

#[test]
fn euclidex_first_body_alone() {
    let prog = corpus("euclidex");
    let cfg = GbConfig::default();
    let bodies = solve_bodies(&prog, &cfg).unwrap();
    let single = single_path_invariants(&bodies[0], &prog.vars, &prog.params, &cfg).unwrap();
    let inv = invariants_fixpoint(&prog, &cfg).unwrap();
    assert!(same(&present(&single, &prog.vars, 1), &present(&inv.history[1], &prog.vars, 2)));
}

#[test]
fn instantiating_symbols_by_themselves() {
    let inv = invariants_fixpoint(&corpus("fermat"), &GbConfig::default()).unwrap();
    let p = ["u_0", "v_0", "r_0"];
    let init = inits(&[("u", "u_0"), ("v", "v_0"), ("r", "r_0")], &p);
    let inst = instantiate(&inv.ideal, &init, &GbConfig::default()).unwrap();
    assert!(same(&inst, &inv.ideal));
}
