//! Acceptance checks, one line per criterion.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use invgen_core::algdep::dependency_ideal;
use invgen_core::algebra::{int, rat, Name, Poly, Rational, TermOrder, Var};
use invgen_core::driver::{execute_body, initial_values, oracle_check};
use invgen_core::engine::{instantiate, invariants_fixpoint, invariants_unrolled, present, Invariants};
use invgen_core::frontend::{parse_poly_std, LoopProgram};
use invgen_core::groebner::{ideal_equal, normal_form, rename_vars, GbConfig, Ideal};
use invgen_core::recurrence::{closed_forms, extract_system};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(name: &str) -> LoopProgram {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.loop"))).unwrap();
    LoopProgram::parse(&text).unwrap()
}

fn corpus_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "loop").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

fn ideal_of(gens: &[&str], params: &[&str]) -> Ideal {
    Ideal::new(gens.iter().map(|g| parse_poly_std(g, params).unwrap()))
}

fn same(a: &Ideal, b: &Ideal) -> bool {
    ideal_equal(a, b, &TermOrder::degrevlex(), &GbConfig::default()).unwrap()
}

fn members(ideal: &Ideal, gens: &[&str], params: &[&str]) -> Result<(), String> {
    let order = TermOrder::degrevlex();
    let basis = ideal.basis(&order, &GbConfig::default()).unwrap();
    for g in gens {
        if !normal_form(&parse_poly_std(g, params).unwrap(), &basis, &order).is_zero() {
            return Err(format!("{g} is not a member"));
        }
    }
    Ok(())
}

fn shift(ideal: &Ideal, vars: &[Name], from: u32, to: u32) -> Ideal {
    let map = vars
        .iter()
        .map(|v| (Var::Prog { step: from, name: v.clone() }, Var::Prog { step: to, name: v.clone() }))
        .collect();
    rename_vars(ideal, &map).unwrap()
}

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Fixpoint results for the corpus; knuth runs under a ten-minute budget.
struct Results {
    runs: BTreeMap<String, Result<Invariants, String>>,
}

impl Results {
    fn compute() -> Results {
        let mut runs = BTreeMap::new();
        for name in corpus_names() {
            let mut cfg = GbConfig::default();
            if name == "knuth" {
                cfg.deadline = Some(Instant::now() + Duration::from_secs(600));
            }
            let res = invariants_fixpoint(&load(&name), &cfg).map_err(|e| e.to_string());
            runs.insert(name, res);
        }
        Results { runs }
    }
}

fn criterion1() -> Check {
    let start = Instant::now();
    let inv = invariants_fixpoint(&load("factexp"), &GbConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(same(&inv.ideal, &ideal_of(&["b*c*a_0 - a*b_0*c_0"], &[])), "ideal differs from <b c a_0 - a b_0 c_0>")?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("ideal matches in {elapsed:.2?}"))
}

fn criterion2() -> Check {
    let start = Instant::now();
    let prog = load("euclidex");
    let inv = invariants_fixpoint(&prog, &GbConfig::default()).map_err(|e| e.to_string())?;
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
    ensure(same(&inv.history[1], &first), "first step ideal differs")?;
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
    ensure(same(&inv.history[4], &i4), "ideal after two sweeps differs from the expected ideal")?;
    ensure(same(&inv.ideal, &present(&i4, &prog.vars, 5)), "fixed point differs from the expected ideal")?;
    ensure(!same(&shift(&inv.history[2], &prog.vars, 3, 5), &inv.history[4]), "sweep 2 already equals sweep 1")?;
    ensure(same(&shift(&inv.history[4], &prog.vars, 5, 7), &inv.history[6]), "sweep 3 differs from sweep 2")?;
    ensure(inv.iterations == 3, format!("stopped after {} sweeps", inv.iterations))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("first step, two-sweep ideal and stop at sweep 3 match in {elapsed:.2?}"))
}

fn criterion3(results: &Results) -> Check {
    let expected = [
        ("divbin", 2),
        ("euclidex", 3),
        ("fermat", 2),
        ("lcm", 3),
        ("mannadiv", 2),
        ("wensley", 2),
        ("extpsolv2", 2),
        ("extpsolv3", 2),
        ("extpsolv4", 2),
        ("extpsolv10", 2),
    ];
    for (name, want) in expected {
        let got = results.runs[name].as_ref().map_err(|e| format!("{name}: {e}"))?.iterations;
        ensure(got == want, format!("{name}: {got} iterations, expected {want}"))?;
    }
    let knuth = match &results.runs["knuth"] {
        Ok(inv) if inv.iterations == 2 => "knuth 2".to_string(),
        Ok(inv) => return Err(format!("knuth: {} iterations, expected 2", inv.iterations)),
        Err(e) if e.contains("resource limit") => "knuth hit the resource limit (tolerated)".to_string(),
        Err(e) => return Err(format!("knuth: {e}")),
    };
    Ok(format!("10 reference counts matched, {knuth}"))
}

fn criterion4(results: &Results) -> Check {
    let cfg = GbConfig::default();
    let get = |n: &str| results.runs[n].as_ref().map(|i| i.ideal.clone()).map_err(|e| e.clone());

    let p = ["x", "y"];
    let init = initial_values(&[("a", "x"), ("b", "y"), ("p", "1"), ("q", "0"), ("r", "0"), ("s", "1")], &p).unwrap();
    let inst = instantiate(&get("euclidex")?, &init, &cfg).map_err(|e| e.to_string())?;
    members(
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
    )
    .map_err(|e| format!("euclidex: {e}"))?;

    let p = ["R", "N"];
    let init = initial_values(&[("u", "2*R + 1"), ("v", "1"), ("r", "R*R - N")], &p).unwrap();
    let inst = instantiate(&get("fermat")?, &init, &cfg).map_err(|e| e.to_string())?;
    members(&inst, &["-4*N - 4*r - 2*u + u^2 + 2*v - v^2"], &p).map_err(|e| format!("fermat: {e}"))?;

    let p = ["Q"];
    let init = initial_values(&[("a", "0"), ("b", "Q/2"), ("d", "1"), ("y", "0")], &p).unwrap();
    let inst = instantiate(&get("wensley")?, &init, &cfg).map_err(|e| e.to_string())?;
    members(&inst, &["2*b - d*Q", "a*d - 2*b*y", "a - Q*y"], &p).map_err(|e| format!("wensley: {e}"))?;
    Ok("I1-I6 (euclidex), I7 (fermat), I8-I10 (wensley) are members".into())
}

fn criterion5() -> Check {
    let y = |k: u32| Poly::var(Var::Exp { step: 0, index: k });
    let cfg = GbConfig::default();
    let got = dependency_ideal(&[int(2), int(-2)], 0, &cfg).map_err(|e| e.to_string())?;
    let want = Ideal::new([&y(0).pow(2) - &y(1).pow(2)]);
    ensure(same(&got, &want), format!("theta=(2,-2) gave {:?}", got.generators()))?;
    let got = dependency_ideal(&[int(2), int(4), rat(1, 2)], 0, &cfg).map_err(|e| e.to_string())?;
    let want = Ideal::new([&y(0).pow(2) - &y(1), &(&y(0) * &y(2)) - &Poly::one(), &(&y(1) * &y(2)) - &y(0)]);
    ensure(same(&got, &want), "theta=(2,4,1/2) differs")?;
    Ok("both dependency ideals match".into())
}

fn criterion6(results: &Results) -> Check {
    let mut checked = 0;
    for (name, res) in &results.runs {
        let Ok(inv) = res else { continue };
        let v = oracle_check(&load(name), &inv.ideal, 100, 2024);
        ensure(v.trials == 100, format!("{name}: only {} traces executed", v.trials))?;
        if let Some(w) = v.violations.first() {
            return Err(format!("{name}: {} violated by trace {:?}", w.generator, w.trace));
        }
        checked += 1;
    }
    let failed: Vec<&String> = results.runs.iter().filter(|(_, r)| r.is_err()).map(|(n, _)| n).collect();
    ensure(failed.iter().all(|n| *n == "knuth"), format!("not computed: {failed:?}"))?;
    Ok(format!("{checked} benchmarks x 100 traces, no violations"))
}

/// Linear bodies with an upper triangular update, so every eigenvalue is rational.
fn random_linear_loop(rng: &mut ChaCha8Rng) -> String {
    let names = ["x", "y", "z"];
    let m = rng.gen_range(2..=3);
    let r = rng.gen_range(2..=3);
    let diag = [int(1), int(2), int(-1), int(3), rat(1, 2)];
    let mut src = format!("vars {}\nwhile c do\n", names[..m].join(", "));
    for b in 0..r {
        src.push_str(if b == 0 {
            "  if c1 then\n"
        } else if b + 1 < r {
            "  else if c2 then\n"
        } else {
            "  else\n"
        });
        for i in 0..m {
            let mut rhs = format!("{} * {}", diag[rng.gen_range(0..diag.len())], names[i]);
            for name in names.iter().take(m).skip(i + 1) {
                let a: i64 = rng.gen_range(-2..=2);
                if a != 0 {
                    rhs.push_str(&format!(" + {a} * {name}"));
                }
            }
            let c: i64 = rng.gen_range(-2..=2);
            if c != 0 {
                rhs.push_str(&format!(" + {c}"));
            }
            src.push_str(&format!("    {} := {}\n", names[i], rhs.replace("+ -", "- ")));
        }
    }
    src.push_str(if r == 3 { "  end if\n  end if\n" } else { "  end if\n" });
    src.push_str("end while\n");
    src
}

fn criterion7(results: &Results) -> Check {
    for (name, res) in &results.runs {
        if let Ok(inv) = res {
            let m = load(name).vars.len();
            ensure(inv.iterations <= m.max(1), format!("{name}: {} sweeps for {m} variables", inv.iterations))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0;
    for k in 0..50 {
        let src = random_linear_loop(&mut rng);
        let prog = LoopProgram::parse(&src).map_err(|e| format!("generated loop {k}: {e}\n{src}"))?;
        let cfg = GbConfig { deadline: Some(Instant::now() + Duration::from_secs(120)), ..GbConfig::default() };
        let inv = invariants_fixpoint(&prog, &cfg).map_err(|e| format!("generated loop {k}: {e}\n{src}"))?;
        let m = prog.vars.len();
        ensure(inv.iterations <= m, format!("generated loop {k}: {} sweeps for {m} variables\n{src}", inv.iterations))?;
        worst = worst.max(inv.iterations);
    }
    Ok(format!("corpus and 50 generated loops within m sweeps (generated max {worst})"))
}

fn criterion8() -> Check {
    for name in ["mannadiv", "fermat", "factexp"] {
        let prog = load(name);
        let a = invariants_fixpoint(&prog, &GbConfig::default()).map_err(|e| format!("{name}: {e}"))?;
        let b = invariants_unrolled(&prog, &GbConfig::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure(same(&a.ideal, &b.ideal), format!("{name}: algorithms disagree"))?;
    }
    Ok("mannadiv, fermat and factexp agree".into())
}

fn criterion9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut rational = move || Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=9).into());
    let mut bodies = 0;
    for name in corpus_names() {
        let prog = load(&name);
        for (b, body) in prog.bodies.iter().enumerate() {
            let cf = extract_system(body, &prog.vars)
                .and_then(|s| closed_forms(&s))
                .map_err(|e| format!("{name} body {}: {e}", b + 1))?;
            for _ in 0..10 {
                let init: Vec<Rational> = prog.vars.iter().map(|_| rational()).collect();
                let params: BTreeMap<Name, Rational> = prog.params.iter().map(|p| (p.clone(), rational())).collect();
                for n in 0..=6u64 {
                    let mut state: BTreeMap<Name, Rational> =
                        prog.vars.iter().cloned().zip(init.iter().cloned()).collect();
                    let Some(()) = execute_body(body, &mut state, &params, n as usize) else { break };
                    let direct: Vec<Rational> = prog.vars.iter().map(|v| state[v].clone()).collect();
                    let closed = cf.eval(n, &init, &params);
                    ensure(
                        closed.as_ref() == Some(&direct),
                        format!("{name} body {}, n = {n}: {closed:?} vs {direct:?}", b + 1),
                    )?;
                }
            }
            bodies += 1;
        }
    }
    Ok(format!("{bodies} bodies match iteration for n = 0..6"))
}

fn main() {
    let results = Results::compute();
    let criteria: Vec<Criterion> = vec![
        ("factorial/exponential loop invariant", Box::new(criterion1)),
        ("extended Euclid step ideals and fixed point", Box::new(criterion2)),
        ("iteration counts", Box::new(|| criterion3(&results))),
        ("instantiated invariants", Box::new(|| criterion4(&results))),
        ("dependency ideals", Box::new(criterion5)),
        ("simulation oracle on the corpus", Box::new(|| criterion6(&results))),
        ("iteration bound", Box::new(|| criterion7(&results))),
        ("fixpoint and unrolled agree", Box::new(criterion8)),
        ("closed forms against iteration", Box::new(criterion9)),
    ];
    let mut failures = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {title}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL  {title}: {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
