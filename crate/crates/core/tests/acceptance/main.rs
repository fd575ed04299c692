//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../common/mod.rs"]
mod common;

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use detpar_core::detlib::{self, compact, oracle_dedup, oracle_max, oracle_sequential_hashset, HashFn};
use detpar_core::explorer::{
    check_sisafety, exploration_json, explore_all, replay, ExplorationReport, ExploreOptions,
    InvariantStats, Limits, MemoMode, Outcome, RunOutcome, Verdict,
};
use detpar_core::lang::{Expr, Term, Value};
use detpar_core::minidet::{check, check_program, ClosedVerdict, Type, TypeEnv};
use detpar_core::semantics::{Config, Store};
use detpar_core::surface::{parse_str, print};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// State shared between criteria: invariant statistics from every
/// exploration in criteria 1 to 4, and the programs of criteria 1 to 3.
#[derive(Default)]
struct Ledger {
    invariants: InvariantStats,
    explorations: usize,
    worker_programs: Vec<(String, Term)>,
}

impl Ledger {
    fn explore(&mut self, e: &Term) -> ExplorationReport {
        let opts = ExploreOptions { check_invariants: true, ..ExploreOptions::default() };
        let r = explore_all(e, &opts);
        self.explorations += 1;
        self.invariants.checked += r.invariants.checked;
        self.invariants.some_step_mismatches.extend(r.invariants.some_step_mismatches.iter().cloned());
        self.invariants.every_task_mismatches.extend(r.invariants.every_task_mismatches.iter().cloned());
        r
    }
}

fn program(src: &str) -> Term {
    detlib::link_closed(&parse_str(src).unwrap_or_else(|e| panic!("{src}: {e}")))
        .unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn within(started: Instant, budget: Duration, what: &str) -> Result<(), String> {
    let took = started.elapsed();
    ensure!(took < budget, "{what} took {took:.2?}, budget {budget:?}");
    Ok(())
}

fn terminated(r: &ExplorationReport) -> Vec<(&Value, &Store)> {
    r.outcomes
        .iter()
        .filter_map(|o| match o {
            Outcome::Terminated { value, store, .. } => Some((value, store)),
            _ => None,
        })
        .collect()
}

fn show(v: &Value) -> String {
    Expr::Val(v.clone()).to_string()
}

fn crit1(ledger: &mut Ledger) -> Check {
    let dumas = |n| detlib::load_program("dumas.mdl", Some(n)).unwrap();

    let t = Instant::now();
    let e = dumas(1844);
    let r = ledger.explore(&e);
    within(t, Duration::from_secs(5), "dumas 1844")?;
    let v = Verdict::from_report(&r);
    ensure!(matches!(v, Verdict::Holds { .. }), "dumas 1844: {}", v.name());
    ensure!(r.is_exhaustive(), "dumas 1844 hit {:?}", r.limits_hit);
    ensure!(
        terminated(&r).iter().all(|(v, _)| **v == Value::Unit),
        "dumas 1844 terminated with a non-unit value"
    );
    // The same additions, returning the counter instead of asserting on it.
    let counter = program(
        "let r = ref 0 in par (fun _ -> aadd r 1802) (fun _ -> aadd r 42); get r",
    );
    let rc = ledger.explore(&counter);
    let values: Vec<_> = terminated(&rc).iter().map(|(v, _)| (*v).clone()).collect();
    ensure!(rc.is_exhaustive() && values == [Value::Int(1844)], "counter reads {values:?}");
    ledger.worker_programs.push(("dumas 1844".into(), e));

    let t = Instant::now();
    let e = dumas(0);
    let r = ledger.explore(&e);
    within(t, Duration::from_secs(5), "dumas 0")?;
    let v = Verdict::from_report(&r);
    ensure!(v == Verdict::HoldsVacuously && r.is_exhaustive(), "dumas 0: {}", v.name());
    let stuck_at_assert = r.stuck().all(|o| match o {
        Outcome::Stuck { config, .. } => matches!(&*config.expr, Expr::Assert(_)),
        _ => false,
    });
    ensure!(r.stuck().count() > 0 && stuck_at_assert, "dumas 0 sticks elsewhere than the assertion");
    ledger.worker_programs.push(("dumas 0".into(), e));

    let t = Instant::now();
    let e = detlib::load_program("unsafe.mdl", None).unwrap();
    let r = ledger.explore(&e);
    within(t, Duration::from_secs(1), "unsafe")?;
    let Verdict::Fails { terminating, stuck } = Verdict::from_report(&r) else {
        return Err(format!("unsafe: {}", Verdict::from_report(&r).name()));
    };
    ensure!(r.is_exhaustive(), "unsafe hit {:?}", r.limits_hit);
    let a = replay(&e, &terminating).map_err(|e| e.to_string())?;
    let b = replay(&e, &stuck).map_err(|e| e.to_string())?;
    ensure!(
        matches!(a.outcome, RunOutcome::Terminated { .. }) && matches!(b.outcome, RunOutcome::Stuck { .. }),
        "unsafe witnesses replay to {} and {}",
        a.outcome.name(),
        b.outcome.name()
    );
    ledger.worker_programs.push(("unsafe".into(), e));

    Ok(format!(
        "dumas 1844 Holds, counter 1844; dumas 0 HoldsVacuously; unsafe Fails with a {}-step terminating and a {}-step stuck witness",
        terminating.len(),
        stuck.len()
    ))
}

/// `par` over one or more thunks, nested to the right.
fn par_all(stmts: &[String]) -> String {
    match stmts {
        [] => "()".into(),
        [s] => s.clone(),
        [s, rest @ ..] => format!("par (fun _ -> {s}) (fun _ -> {})", par_all(rest)),
    }
}

fn crit2(ledger: &mut Ledger) -> Check {
    let t = Instant::now();
    let pool = [-2i64, 0, 3, 5, 5];
    let mut multisets = BTreeSet::new();
    for mask in 0u32..(1 << pool.len()) {
        if (2..=3).contains(&mask.count_ones()) {
            let mut m: Vec<i64> =
                (0..pool.len()).filter(|k| mask & (1 << k) != 0).map(|k| pool[k]).collect();
            m.sort();
            multisets.insert(m);
        }
    }
    const INIT: i64 = -1000;
    for m in &multisets {
        let writes: Vec<String> = m.iter().map(|x| format!("pwrite r ({x})")).collect();
        let src = format!("let r = palloc ({INIT}) in {}; pread r", par_all(&writes));
        let e = program(&src);
        let r = ledger.explore(&e);
        let expected = oracle_max(m).map_err(|e| e.to_string())?;
        ensure!(INIT < expected, "initial content must be below every write");
        let values: Vec<_> = terminated(&r).iter().map(|(v, _)| (*v).clone()).collect();
        ensure!(r.is_exhaustive(), "{m:?}: hit {:?}", r.limits_hit);
        ensure!(r.stuck().count() == 0, "{m:?}: stuck outcome");
        ensure!(values == [Value::Int(expected)], "{m:?}: outcomes {values:?}, oracle {expected}");
        ensure!(check_program(&e).is_well_typed(), "{m:?}: rejected by the checker");
        ledger.worker_programs.push((format!("pwrite {m:?}"), e));
    }
    within(t, Duration::from_secs(30), "priority writes")?;
    Ok(format!("{} multisets, each one outcome equal to the maximum", multisets.len()))
}

fn subsets(pool: &[i64], max: usize) -> Vec<Vec<i64>> {
    (0u32..(1 << pool.len()))
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..pool.len()).filter(|k| m & (1 << k) != 0).map(|k| pool[k]).collect())
        .collect()
}

fn permutations(xs: &[i64]) -> Vec<Vec<i64>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn crit3(ledger: &mut Ledger) -> Check {
    let t = Instant::now();
    let mut runs = 0;
    for capacity in [3usize, 4] {
        for hash in HashFn::ALL {
            for set in subsets(&[1, 2, 3, 7], 3) {
                let layouts: HashSet<_> = permutations(&set)
                    .iter()
                    .map(|order| oracle_sequential_hashset(capacity, hash, order))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                ensure!(layouts.len() == 1, "oracle depends on insertion order for {set:?}");
                let slots = oracle_sequential_hashset(capacity, hash, &set).unwrap();
                let expected = compact(&slots);

                let inserts: Vec<String> = set.iter().map(|x| format!("hadd s {x}")).collect();
                let body = if inserts.is_empty() { String::new() } else { format!("{}; ", par_all(&inserts)) };
                let src = format!("let s = hinit {} {capacity} in {body}helems s", hash.name());
                let e = program(&src);
                let r = ledger.explore(&e);
                let what = format!("capacity {capacity}, {}, {set:?}", hash.name());
                ensure!(r.is_exhaustive(), "{what}: hit {:?}", r.limits_hit);
                ensure!(r.stuck().count() == 0, "{what}: stuck outcome");
                let outs = terminated(&r);
                ensure!(outs.len() == 1, "{what}: {} outcomes", outs.len());
                let got = common::ints_at(outs[0].0, outs[0].1);
                ensure!(got.as_ref() == Some(&expected), "{what}: elems {got:?}, oracle {expected:?}");
                ledger.worker_programs.push((what, e));
                runs += 1;
            }
        }
    }
    within(t, Duration::from_secs(300), "hash sets")?;
    Ok(format!("{runs} configurations, each one outcome equal to the sequential layout"))
}

fn crit4(ledger: &mut Ledger) -> Check {
    let t = Instant::now();
    let mut inputs = vec![vec![]];
    for len in 1..=3 {
        let mut next = Vec::new();
        for prefix in inputs.iter().filter(|a| a.len() == len - 1) {
            for x in [1i64, 2, 7] {
                let mut a: Vec<i64> = prefix.clone();
                a.push(x);
                next.push(a);
            }
        }
        inputs.extend(next);
    }
    let mut states = 0;
    for input in &inputs {
        let stores: String =
            input.iter().enumerate().map(|(i, x)| format!("store a {i} {x}; ")).collect();
        let src = format!("let a = alloc_fill {} 0 in {stores}dedup h1 a", input.len());
        let e = program(&src);
        let r = ledger.explore(&e);
        states += r.states_explored;
        ensure!(r.is_exhaustive(), "{input:?}: hit {:?}", r.limits_hit);
        ensure!(r.stuck().count() == 0, "{input:?}: stuck outcome");
        let outs = terminated(&r);
        ensure!(outs.len() == 1, "{input:?}: {} outcomes", outs.len());
        let (value, store) = outs[0];
        let Value::Pair(a, d) = value else { return Err(format!("{input:?}: result {}", show(value))) };
        let kept = common::ints_at(a, store);
        ensure!(kept.as_ref() == Some(input), "{input:?}: input array became {kept:?}");
        let elems = common::ints_at(d, store).ok_or_else(|| format!("{input:?}: no result array"))?;
        let set: BTreeSet<i64> = elems.iter().copied().collect();
        ensure!(set.len() == elems.len(), "{input:?}: duplicates in {elems:?}");
        ensure!(set == oracle_dedup(input), "{input:?}: {elems:?} differs from the oracle");
    }
    within(t, Duration::from_secs(300), "dedup")?;
    Ok(format!("{} input arrays, {states} states in total", inputs.len()))
}

fn crit5() -> Check {
    let t = Instant::now();
    let mut gen = common::ProgramGen::new(ChaCha8Rng::seed_from_u64(0x5eed));
    let mut seen = HashSet::new();
    let (mut accepted, mut with_par, mut rejected, mut attempts) = (0, 0, 0, 0);
    // Sequential programs are easy to accept, so keep going until half of
    // the sample is parallel.
    while accepted < 300 || with_par < 150 {
        attempts += 1;
        ensure!(attempts <= 200_000, "only {accepted} accepted programs after {attempts} attempts");
        let src = gen.program();
        if !seen.insert(src.clone()) {
            continue;
        }
        let e = parse_str(&src).map_err(|err| format!("{src}: {err}"))?;
        if e.size() > 25 || common::par_count(&e) > 2 {
            continue;
        }
        let linked = detlib::link_closed(&e).map_err(|err| err.to_string())?;
        if !check_program(&linked).is_well_typed() {
            rejected += 1;
            continue;
        }
        let parallel = common::par_count(&e) > 0;
        if accepted >= 300 && !parallel {
            continue;
        }
        accepted += 1;
        with_par += usize::from(parallel);
        let (v, r) = check_sisafety(&linked, &ExploreOptions::default());
        ensure!(r.is_exhaustive(), "{src}: hit {:?}", r.limits_hit);
        ensure!(!matches!(v, Verdict::Fails { .. }), "accepted program fails: {src}");
    }
    within(t, Duration::from_secs(600), "generated programs")?;
    Ok(format!(
        "{accepted} accepted programs ({with_par} with parallelism, {rejected} rejected along the way), zero Fails"
    ))
}

fn crit6() -> Check {
    let unsafe_ = detlib::load_program("unsafe.mdl", None).unwrap();
    match check_program(&unsafe_) {
        ClosedVerdict::Rejected(err)
            if err.kind.name() == "UnsplittableSharing"
                && err.kind.variable().map(|x| x.as_str()) == Some("r") => {}
        v => return Err(format!("unsafe: {v:?}")),
    }

    let (t, _) = check(&TypeEnv::new(), &program("dedup h1")).map_err(|e| e.to_string())?;
    let shaped = match &t {
        Type::Arrow(a, b) => match (&**a, &**b) {
            (Type::IntArray(q), Type::Prod(l, r)) => {
                **l == Type::IntArray(*q) && **r == Type::IntArray(detpar_core::minidet::full())
            }
            _ => false,
        },
        _ => false,
    };
    ensure!(shaped, "dedup h1 : {t}");

    let ww = program("let r = palloc 0 in par (fun _ -> pwrite r 3) (fun _ -> pwrite r 5); pread r");
    ensure!(check_program(&ww).is_well_typed(), "parallel pwrite/pwrite rejected");
    let wr = program("let r = palloc 0 in par (fun _ -> pwrite r 5) (fun _ -> pread r)");
    match check_program(&wr) {
        ClosedVerdict::Rejected(err) if err.kind.name() == "PhaseViolation" => {}
        v => return Err(format!("parallel pwrite/pread: {v:?}")),
    }
    Ok(format!(
        "unsafe UnsplittableSharing(r); dedup h1 : {t}; pwrite/pwrite accepted; pwrite/pread PhaseViolation"
    ))
}

fn outcome_sets(r: &ExplorationReport) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut results = BTreeSet::new();
    let mut stuck = BTreeSet::new();
    for o in &r.outcomes {
        match o {
            Outcome::Terminated { value, store, .. } => {
                results.insert(format!("{} / {store}", show(value)));
            }
            Outcome::Stuck { config: Config { expr, store }, .. } => {
                stuck.insert(format!("{expr} / {store}"));
            }
            Outcome::Truncated { .. } => {}
        }
    }
    (results, stuck)
}

fn crit7(ledger: &Ledger) -> Check {
    // Printer/parser roundtrip.
    let mut runner = TestRunner::new(PropConfig { cases: 1000, failure_persistence: None, ..PropConfig::default() });
    runner
        .run(&common::arb_term(), |e| {
            let text = print(&e);
            let back = parse_str(&text).map_err(|err| {
                proptest::test_runner::TestCaseError::fail(format!("{text}: {err}"))
            })?;
            proptest::prop_assert_eq!(back, e, "{}", text);
            Ok(())
        })
        .map_err(|e| format!("roundtrip: {e}"))?;

    // Reducibility cross-check, gathered during criteria 1 to 4.
    let inv = &ledger.invariants;
    ensure!(inv.checked > 0, "no configurations were cross-checked");
    ensure!(
        inv.some_step_mismatches.is_empty(),
        "reducible disagrees with the transition function at {}",
        inv.some_step_mismatches[0]
    );
    ensure!(
        inv.every_task_mismatches.is_empty(),
        "reducible disagrees with per-task steps at {}",
        inv.every_task_mismatches[0]
    );

    // Memoization transparency on the corpus.
    let mut off_complete = Vec::new();
    for p in &detlib::manifest().program {
        let e = detlib::load_program(&p.file, p.arg).unwrap();
        let run = |memo, max_states| {
            let limits = Limits { max_states, ..Limits::default() };
            explore_all(&e, &ExploreOptions { memo, limits, ..ExploreOptions::default() })
        };
        let canonical = run(MemoMode::Canonical, Limits::default().max_states);
        let exact = run(MemoMode::Exact, Limits::default().max_states);
        ensure!(canonical.is_exhaustive() && exact.is_exhaustive(), "{}: limits hit", p.name);
        ensure!(outcome_sets(&canonical) == outcome_sets(&exact), "{}: canonical and exact memo differ", p.name);
        // Without memoization the schedule tree of most corpus programs is
        // far too large; compare wherever it fits.
        let off = run(MemoMode::Off, 300_000);
        if off.is_exhaustive() {
            ensure!(outcome_sets(&canonical) == outcome_sets(&off), "{}: memo on and off differ", p.name);
            off_complete.push(p.name.clone());
        }
    }

    // Worker count does not change reports.
    for (name, e) in &ledger.worker_programs {
        let report = |jobs| {
            let (v, r) = check_sisafety(e, &ExploreOptions { jobs, ..ExploreOptions::default() });
            exploration_json(name, e, &v, &r, false)
        };
        ensure!(report(1) == report(4), "{name}: reports differ between 1 and 4 jobs");
    }

    Ok(format!(
        "1000 roundtrips; {} configurations cross-checked over {} explorations; memo canonical = exact on all {} corpus programs, = off on {} whose schedule tree fits ({}); {} reports identical with 1 and 4 jobs",
        inv.checked,
        ledger.explorations,
        detlib::manifest().program.len(),
        off_complete.len(),
        off_complete.join(", "),
        ledger.worker_programs.len()
    ))
}

fn main() -> ExitCode {
    let mut ledger = Ledger::default();
    let mut failed = 0;
    let mut report = |n: usize, r: Check, took: Duration| {
        match r {
            Ok(detail) => println!("criterion {n} PASS ({took:.1?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL ({took:.1?}): {why}");
            }
        }
    };
    let timed = |f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let r = f();
        (r, t.elapsed())
    };
    let (r, d) = timed(&mut || crit1(&mut ledger));
    report(1, r, d);
    let (r, d) = timed(&mut || crit2(&mut ledger));
    report(2, r, d);
    let (r, d) = timed(&mut || crit3(&mut ledger));
    report(3, r, d);
    let (r, d) = timed(&mut || crit4(&mut ledger));
    report(4, r, d);
    let (r, d) = timed(&mut crit5);
    report(5, r, d);
    let (r, d) = timed(&mut crit6);
    report(6, r, d);
    let (r, d) = timed(&mut || crit7(&ledger));
    report(7, r, d);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
