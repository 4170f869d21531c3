//! End-to-end runs: parse, solve, compute invariants, check them by
//! simulation and report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Name, Poly, Rational, TermOrder, Var};
use crate::engine::{self, EngineError, Invariants, SolvedBody};
use crate::frontend::{FrontendError, LoopBody, LoopProgram, Target};
use crate::groebner::{GbConfig, GroebnerError, Ideal};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Fixpoint,
    Unrolled,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fixpoint => "fixpoint",
            Algorithm::Unrolled => "unrolled",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixpoint" => Ok(Algorithm::Fixpoint),
            "unrolled" => Ok(Algorithm::Unrolled),
            _ => Err(format!("unknown algorithm `{s}` (expected fixpoint or unrolled)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub oracle_trials: usize,
    pub seed: u64,
    pub pair_budget: usize,
    pub timeout: Option<Duration>,
    /// When false all timings are reported as zero, making reports byte-stable.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::Fixpoint,
            oracle_trials: 0,
            seed: DEFAULT_SEED,
            pair_budget: GbConfig::default().max_pairs,
            timeout: None,
            timings: true,
        }
    }
}

impl RunConfig {
    fn gb_config(&self) -> GbConfig {
        GbConfig {
            max_pairs: self.pair_budget,
            deadline: self.timeout.map(|t| Instant::now() + t),
            ..GbConfig::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub parse: f64,
    pub solve: f64,
    pub invariants: f64,
    pub oracle: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub generator: String,
    /// `(body, iterations)` in execution order, bodies numbered from 1.
    pub trace: Vec<(usize, usize)>,
    pub initial: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub trials: usize,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub name: String,
    pub branches: usize,
    pub variables: usize,
    pub iterations: usize,
    pub algorithm: Algorithm,
    pub generators: Vec<String>,
    pub timings_ms: Timings,
    pub oracle: OracleVerdict,
    #[serde(skip)]
    pub ideal: Ideal,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] FrontendError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("oracle found {} violated generator(s), first: {}", .0.oracle.violations.len(), .0.oracle.violations[0].generator)]
    OracleFailure(Box<RunReport>),
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) => 3,
            RunError::Unsupported(_) => 4,
            RunError::ResourceLimit(_) => 5,
            RunError::OracleFailure(_) => 6,
            RunError::Io { .. } => 7,
            RunError::Internal(_) => 70,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            RunError::Io { .. } => "io",
            RunError::Parse(_) => "parse",
            RunError::Unsupported(_) => "unsupported",
            RunError::ResourceLimit(_) => "resource-limit",
            RunError::OracleFailure(_) => "oracle-failure",
            RunError::Internal(_) => "internal",
        }
    }
}

impl From<EngineError> for RunError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Recurrence { .. } => RunError::Unsupported(e.to_string()),
            EngineError::Groebner(GroebnerError::ResourceLimit(m)) => RunError::ResourceLimit(m),
            other => RunError::Internal(other.to_string()),
        }
    }
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

/// Basis generators as integer-coefficient strings, ordered by leading monomial.
pub fn generator_strings(ideal: &Ideal, cfg: &GbConfig) -> Result<Vec<String>, GroebnerError> {
    if ideal.is_zero() {
        return Ok(vec![]);
    }
    let order = TermOrder::degrevlex();
    let mut basis = ideal.basis(&order, cfg)?;
    basis.sort_by(|a, b| {
        let (la, lb) = (a.leading_term(&order).unwrap().0, b.leading_term(&order).unwrap().0);
        order.cmp(&la, &lb)
    });
    Ok(basis.iter().map(|g| g.primitive().to_string()).collect())
}

pub fn run_file(path: &Path, cfg: &RunConfig) -> Result<RunReport, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    run_source(&name, &text, cfg)
}

pub fn run_source(name: &str, text: &str, cfg: &RunConfig) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let prog = LoopProgram::parse(text)?;
    let parsed = Instant::now();
    run_program(name, &prog, cfg, parsed - start)
}

pub fn run_program(
    name: &str,
    prog: &LoopProgram,
    cfg: &RunConfig,
    parse_time: Duration,
) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let gb = cfg.gb_config();
    let bodies = engine::solve_bodies(prog, &gb)?;
    let solved = Instant::now();
    let inv: Invariants = match cfg.algorithm {
        Algorithm::Fixpoint => engine::invariants_fixpoint_solved(prog, &bodies, &gb)?,
        Algorithm::Unrolled => engine::invariants_unrolled_solved(prog, &bodies, &gb)?,
    };
    let generators = generator_strings(&inv.ideal, &gb).map_err(EngineError::from)?;
    let computed = Instant::now();
    let oracle = if cfg.oracle_trials > 0 {
        oracle_check(prog, &inv.ideal, cfg.oracle_trials, cfg.seed)
    } else {
        OracleVerdict::default()
    };
    let done = Instant::now();
    let timings_ms = if cfg.timings {
        Timings {
            parse: ms(parse_time),
            solve: ms(solved - start),
            invariants: ms(computed - solved),
            oracle: ms(done - computed),
            total: ms(parse_time + (done - start)),
        }
    } else {
        Timings::default()
    };
    let report = RunReport {
        name: name.to_string(),
        branches: prog.bodies.len(),
        variables: prog.vars.len(),
        iterations: inv.iterations,
        algorithm: cfg.algorithm,
        generators,
        timings_ms,
        oracle,
        ideal: inv.ideal,
    };
    if !report.oracle.violations.is_empty() {
        return Err(RunError::OracleFailure(Box::new(report)));
    }
    Ok(report)
}

/// Solved bodies are reusable across algorithms; exposed for callers that run both.
pub fn solve(prog: &LoopProgram, cfg: &RunConfig) -> Result<Vec<SolvedBody>, RunError> {
    Ok(engine::solve_bodies(prog, &cfg.gb_config())?)
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let plural = |k: usize, what: &str| format!("{k} {what}{}", if k == 1 { "" } else { "s" });
        let mut s = format!(
            "{}: {} {}, {}, {} ({})\n",
            self.name,
            self.branches,
            if self.branches == 1 { "branch" } else { "branches" },
            plural(self.variables, "variable"),
            plural(self.iterations, "iteration"),
            self.algorithm.name()
        );
        if self.generators.is_empty() {
            s.push_str("  (no polynomial invariants)\n");
        }
        for g in &self.generators {
            s.push_str(&format!("  {g} = 0\n"));
        }
        if self.oracle.trials > 0 {
            s.push_str(&format!(
                "oracle: {} trials, {} violations\n",
                self.oracle.trials,
                self.oracle.violations.len()
            ));
        }
        s
    }
}

// ---- simulation oracle ----

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=9);
    Rational::new(num.into(), den.into())
}

/// Runs `body` `count` times from `state`; the counter reads the iteration
/// index at the start of each iteration. `None` on division by zero.
pub fn execute_body(
    body: &LoopBody,
    state: &mut BTreeMap<Name, Rational>,
    params: &BTreeMap<Name, Rational>,
    count: usize,
) -> Option<()> {
    for k in 0..count {
        let mut counter = Rational::from_integer((k as i64).into());
        for a in &body.assignments {
            let env = |v: &Var| match v {
                Var::Cur(n) => state.get(n).cloned(),
                Var::Param(n) => params.get(n).cloned(),
                Var::Counter(0) => Some(counter.clone()),
                _ => None,
            };
            let den = a.rhs.den().eval(&env)?;
            if num_traits::Zero::is_zero(&den) {
                return None;
            }
            let value = a.rhs.num().eval(&env)? / den;
            match &a.target {
                Target::Var(n) => {
                    state.insert(n.clone(), value);
                }
                Target::Counter => counter = value,
            }
        }
    }
    Some(())
}

/// Checks every generator of `ideal` (over `Var::Cur`, `Var::initial` and
/// parameters) against `trials` random executions.
pub fn oracle_check(prog: &LoopProgram, ideal: &Ideal, trials: usize, seed: u64) -> OracleVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdict = OracleVerdict { trials, violations: vec![] };
    let r = prog.bodies.len();
    let mut done = 0;
    let mut attempts = 0;
    while done < trials && attempts < trials * 20 {
        attempts += 1;
        let initial: BTreeMap<Name, Rational> =
            prog.vars.iter().map(|v| (v.clone(), random_rational(&mut rng))).collect();
        let params: BTreeMap<Name, Rational> = ideal
            .vars()
            .into_iter()
            .filter_map(|v| match v {
                Var::Param(n) => Some(n),
                _ => None,
            })
            .chain(prog.params.iter().cloned())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|n| (n, random_rational(&mut rng)))
            .collect();
        let len = rng.gen_range(1..=8);
        let trace: Vec<(usize, usize)> = (0..len).map(|_| (rng.gen_range(0..r.max(1)), rng.gen_range(0..=6))).collect();
        let mut state = initial.clone();
        let ok = r == 0 || trace.iter().all(|&(b, k)| execute_body(&prog.bodies[b], &mut state, &params, k).is_some());
        if !ok {
            continue;
        }
        done += 1;
        let env = |v: &Var| match v {
            Var::Cur(n) => state.get(n).cloned(),
            Var::Prog { step: 0, name } => initial.get(name).cloned(),
            Var::Param(n) => params.get(n).cloned(),
            _ => None,
        };
        for g in ideal.generators() {
            let holds = g.eval(&env).map(|x| num_traits::Zero::is_zero(&x)).unwrap_or(false);
            if !holds {
                let show =
                    |m: &BTreeMap<Name, Rational>| m.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
                verdict.violations.push(Violation {
                    generator: g.primitive().to_string(),
                    trace: trace.iter().map(|&(b, k)| (b + 1, k)).collect(),
                    initial: show(&initial),
                    params: show(&params),
                });
            }
        }
    }
    verdict.trials = done;
    verdict
}

// ---- benchmark table ----

/// Reference `#b`, `#v`, `#i` (iterations to the fixed point) for the multi-path benchmarks.
pub const REFERENCE_COUNTS: &[(&str, usize, usize, usize)] = &[
    ("divbin", 2, 3, 2),
    ("euclidex", 2, 6, 3),
    ("fermat", 2, 3, 2),
    ("knuth", 4, 5, 2),
    ("lcm", 2, 4, 3),
    ("mannadiv", 2, 3, 2),
    ("wensley", 2, 4, 2),
    ("extpsolv2", 2, 3, 2),
    ("extpsolv3", 3, 3, 2),
    ("extpsolv4", 4, 3, 2),
    ("extpsolv10", 10, 3, 2),
];

pub fn reference_counts(name: &str) -> Option<(usize, usize, usize)> {
    REFERENCE_COUNTS.iter().find(|r| r.0 == name).map(|r| (r.1, r.2, r.3))
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgorithmOutcome {
    /// `ok` or the error class.
    pub status: String,
    pub iterations: Option<usize>,
    pub generators: Option<usize>,
    pub time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub branches: Option<usize>,
    pub variables: Option<usize>,
    pub fixpoint: AlgorithmOutcome,
    pub unrolled: AlgorithmOutcome,
    pub expected_iterations: Option<usize>,
    /// False when the fixpoint count differs from the reference count.
    pub matches_reference: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub run: RunConfig,
    /// Per-algorithm time limit for each benchmark.
    pub timeout: Duration,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { run: RunConfig::default(), timeout: Duration::from_secs(60) }
    }
}

fn outcome(res: &Result<RunReport, RunError>, elapsed: Duration) -> AlgorithmOutcome {
    match res {
        Ok(r) => AlgorithmOutcome {
            status: "ok".into(),
            iterations: Some(r.iterations),
            generators: Some(r.generators.len()),
            time_ms: ms(elapsed),
            error: None,
        },
        Err(e) => AlgorithmOutcome {
            status: e.class().into(),
            iterations: None,
            generators: None,
            time_ms: ms(elapsed),
            error: Some(e.to_string()),
        },
    }
}

pub fn bench_file(path: &Path, cfg: &BenchConfig) -> BenchRow {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let parsed = std::fs::read_to_string(path)
        .map_err(|source| RunError::Io { path: path.to_path_buf(), source })
        .and_then(|t| LoopProgram::parse(&t).map_err(RunError::from));
    let run = |alg: Algorithm| -> AlgorithmOutcome {
        let start = Instant::now();
        let res = match &parsed {
            Ok(prog) => {
                let c = RunConfig { algorithm: alg, timeout: Some(cfg.timeout), ..cfg.run.clone() };
                run_program(&name, prog, &c, Duration::ZERO)
            }
            Err(e) => Err(match e {
                RunError::Parse(p) => RunError::Parse(p.clone()),
                other => RunError::Internal(other.to_string()),
            }),
        };
        let mut o = outcome(&res, start.elapsed());
        if !cfg.run.timings {
            o.time_ms = 0.0;
        }
        o
    };
    let fixpoint = run(Algorithm::Fixpoint);
    let unrolled = run(Algorithm::Unrolled);
    let expected = reference_counts(&name).map(|p| p.2);
    BenchRow {
        branches: parsed.as_ref().ok().map(|p| p.bodies.len()),
        variables: parsed.as_ref().ok().map(|p| p.vars.len()),
        matches_reference: expected.map(|e| fixpoint.iterations == Some(e)),
        expected_iterations: expected,
        fixpoint,
        unrolled,
        name,
    }
}

/// `.loop` files of `dir` in name order.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let entries = std::fs::read_dir(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "loop"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every benchmark of `dir` under both algorithms, in parallel threads.
pub fn bench(dir: &Path, cfg: &BenchConfig) -> Result<Vec<BenchRow>, RunError> {
    let files = corpus_files(dir)?;
    let mut rows: Vec<BenchRow> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || bench_file(f, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("benchmark thread panicked")).collect()
    });
    rows.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(rows)
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let cell = |o: &AlgorithmOutcome| {
        if o.status == "ok" {
            format!("{:.1}", o.time_ms)
        } else {
            o.status.clone()
        }
    };
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    let mut s = format!(
        "{:<12} {:>3} {:>3} {:>3} {:>12} {:>12}  note\n",
        "name", "#b", "#v", "#i", "fixpoint ms", "unrolled ms"
    );
    for r in rows {
        let note = match r.matches_reference {
            Some(true) => "matches reference #i".to_string(),
            Some(false) => format!("MISMATCH: reference #i = {}", r.expected_iterations.unwrap()),
            None => String::new(),
        };
        s.push_str(&format!(
            "{:<12} {:>3} {:>3} {:>3} {:>12} {:>12}  {}\n",
            r.name,
            opt(r.branches),
            opt(r.variables),
            opt(r.fixpoint.iterations),
            cell(&r.fixpoint),
            cell(&r.unrolled),
            note
        ));
    }
    s
}

/// Initial values given as polynomials in parameters, for [`engine::instantiate`].
pub fn initial_values(pairs: &[(&str, &str)], params: &[&str]) -> Result<BTreeMap<Name, Poly>, FrontendError> {
    pairs.iter().map(|(k, v)| Ok((Name::from(*k), crate::frontend::parse_poly_std(v, params)?))).collect()
}
