//! Generators shared by the integration suites.

#![allow(dead_code)]

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use detpar_core::lang::{build, Expr, Name, PrimOp, ProjIndex, Term, Value};

// ---------------------------------------------------------------------------
// Arbitrary surface terms, for printer/parser roundtrips.

const NAMES: [&str; 6] = ["x", "y", "z", "f", "acc", "x1"];

fn name() -> impl Strategy<Value = Name> {
    prop::sample::select(&NAMES[..]).prop_map(Name::new)
}

fn binder() -> impl Strategy<Value = Name> {
    prop_oneof![4 => name(), 1 => Just(Name::anon())]
}

fn leaf() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(build::unit()),
        any::<bool>().prop_map(build::bool),
        (-1000i64..1000).prop_map(build::int),
        prop_oneof![Just(i64::MAX), Just(i64::MIN + 1)].prop_map(build::int),
        name().prop_map(|x| Term::new(Expr::Var(x))),
    ]
}

/// RunPar-free terms as the parser produces them.
pub fn arb_term() -> impl Strategy<Value = Term> {
    leaf().prop_recursive(6, 60, 4, |inner| {
        let t = || inner.clone();
        prop_oneof![
            (binder(), t(), t()).prop_map(|(x, a, b)| Term::new(Expr::Let(x, a, b))),
            (t(), t(), t()).prop_map(|(c, a, b)| build::if_(c, a, b)),
            (binder(), binder(), t()).prop_map(|(f, x, b)| Term::new(Expr::Fun(f, x, b))),
            (t(), t()).prop_map(|(f, a)| build::app(f, a)),
            (prop::sample::select(&PrimOp::ALL[..]), t(), t())
                .prop_map(|(op, a, b)| build::prim(op, a, b)),
            (t(), t()).prop_map(|(a, b)| build::pair(a, b)),
            (prop_oneof![Just(ProjIndex::Fst), Just(ProjIndex::Snd)], t())
                .prop_map(|(k, e)| build::proj(k, e)),
            t().prop_map(build::assert),
            t().prop_map(build::alloc),
            (t(), t()).prop_map(|(a, i)| build::load(a, i)),
            (t(), t(), t()).prop_map(|(a, i, v)| build::store(a, i, v)),
            t().prop_map(build::length),
            (t(), t()).prop_map(|(a, b)| build::par(a, b)),
            // The `par f g` sugar.
            (t(), t()).prop_map(|(f, g)| build::par(
                build::app(f, build::unit()),
                build::app(g, build::unit())
            )),
            (t(), t(), t(), t()).prop_map(|(l, i, o, n)| build::cas(l, i, o, n)),
        ]
    })
}

// ---------------------------------------------------------------------------
// Random closed programs over the corpus library, for the soundness check.

#[derive(Clone, Copy, PartialEq, Eq)]
enum Res {
    Int,
    Ref,
    PRef,
    Array(i64),
    Set,
}

pub struct ProgramGen {
    rng: ChaCha8Rng,
}

const VALUES: [i64; 6] = [-2, 0, 1, 3, 5, 7];

impl ProgramGen {
    pub fn new(rng: ChaCha8Rng) -> Self {
        ProgramGen { rng }
    }

    /// A literal, parenthesized when negative so it can be an argument.
    fn lit(&mut self) -> String {
        match *VALUES.choose(&mut self.rng).unwrap() {
            k if k < 0 => format!("({k})"),
            k => k.to_string(),
        }
    }

    fn int_expr(&mut self, env: &[(String, Res)]) -> String {
        let ints: Vec<_> = env.iter().filter(|(_, r)| *r == Res::Int).collect();
        match self.rng.gen_range(0..4) {
            0 if !ints.is_empty() => {
                let (x, _) = ints.choose(&mut self.rng).unwrap();
                format!("{x} + {}", self.lit())
            }
            1 if !ints.is_empty() => ints.choose(&mut self.rng).unwrap().0.clone(),
            _ => self.lit(),
        }
    }

    /// A unit-typed statement touching one resource. Some of these are
    /// deliberately ill-typed in context (a second `get`, a store under a
    /// shared array, a read racing a write) so that the checker has
    /// something to reject.
    fn stmt(&mut self, env: &[(String, Res)]) -> String {
        let (x, r) = env.choose(&mut self.rng).unwrap().clone();
        let k = self.lit();
        match r {
            Res::Int => match self.rng.gen_range(0..2) {
                0 => format!("assert ({x} + {k} > {})", self.lit()),
                _ => format!("assert ({x} <= {k} || true)"),
            },
            Res::Ref => match self.rng.gen_range(0..3) {
                0 => format!("set {x} (get {x} + {k})"),
                1 => format!("assert (get {x} == {k})"),
                _ => format!("set {x} {k}"),
            },
            Res::PRef => match self.rng.gen_range(0..3) {
                0 | 1 => format!("pwrite {x} {k}"),
                _ => format!("assert (pread {x} >= {k})"),
            },
            Res::Array(n) => {
                let i = self.rng.gen_range(0..n);
                match self.rng.gen_range(0..3) {
                    0 => format!("store {x} {i} {k}"),
                    1 => format!("assert (load {x} {i} <= {k} || true)"),
                    _ => format!("assert (length {x} == {n})"),
                }
            }
            Res::Set => format!("hadd {x} {}", self.rng.gen_range(0..8)),
        }
    }

    fn block(&mut self, env: &[(String, Res)], pars: &mut usize) -> String {
        if *pars < 2 && self.rng.gen_bool(0.75) {
            *pars += 1;
            let a = self.block(env, pars);
            let b = self.block(env, pars);
            return if self.rng.gen_bool(0.5) {
                format!("par (fun _ -> {a}) (fun _ -> {b})")
            } else {
                format!("(| {a} , {b} |)")
            };
        }
        if self.rng.gen_bool(0.15) {
            let c = self.int_expr(env);
            let a = self.stmt(env);
            let b = self.stmt(env);
            return format!("(if {c} < {} then {a} else {b})", self.lit());
        }
        self.stmt(env)
    }

    fn result(&mut self, env: &[(String, Res)]) -> String {
        let (x, r) = env.choose(&mut self.rng).unwrap().clone();
        match r {
            Res::Int => self.int_expr(env),
            Res::Ref => format!("get {x}"),
            Res::PRef => format!("pread {x}"),
            Res::Array(n) => {
                if self.rng.gen_bool(0.5) {
                    x
                } else {
                    format!("load {x} {}", self.rng.gen_range(0..n))
                }
            }
            Res::Set => format!("helems {x}"),
        }
    }

    /// One candidate program: a few resource bindings, one or two blocks
    /// with at most two parallel compositions, then a result.
    pub fn program(&mut self) -> String {
        let count = if self.rng.gen_bool(0.75) { 1 } else { 2 };
        let mut env = Vec::new();
        let mut src = String::new();
        for k in 0..count {
            let name = format!("v{k}");
            let (init, res) = match self.rng.gen_range(0..5) {
                0 => (self.lit(), Res::Int),
                1 => (format!("ref {}", self.lit()), Res::Ref),
                2 => (format!("palloc {}", self.lit()), Res::PRef),
                3 => {
                    let n = self.rng.gen_range(1..=3);
                    (format!("alloc_fill {n} {}", self.lit()), Res::Array(n))
                }
                _ => {
                    let h = ["h0", "h1"].choose(&mut self.rng).unwrap();
                    (format!("hinit {h} {}", self.rng.gen_range(2..=3)), Res::Set)
                }
            };
            src.push_str(&format!("let {name} = {init} in "));
            env.push((name, res));
        }
        let mut pars = 0;
        let blocks = if self.rng.gen_bool(0.75) { 1 } else { 2 };
        for _ in 0..blocks {
            let b = self.block(&env, &mut pars);
            src.push_str(&b);
            src.push_str("; ");
        }
        src.push_str(&self.result(&env));
        src
    }
}

pub fn par_count(e: &Expr) -> usize {
    e.count_nodes(&|n| matches!(n, Expr::Par(..)))
}

/// The integers held by the array at location `v` in `store`.
pub fn ints_at(v: &Value, store: &detpar_core::semantics::Store) -> Option<Vec<i64>> {
    let cells = store.get(v.as_loc()?)?;
    cells.iter().map(Value::as_int).collect()
}
