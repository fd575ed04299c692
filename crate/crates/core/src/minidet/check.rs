//! The checking traversal.

use super::types::{env_combine, full, Frac, Type, TypeEnv};
use super::{TypeError, TypeErrorKind};
use crate::detlib::{self, Library};
use crate::lang::{subst, Expr, Name, PrimOp, ProjIndex, Term, Value};

type Checked = Result<(Type, TypeEnv), TypeError>;

const SHOWN: usize = 100;

/// A subterm for diagnostics, with library values shown by name.
pub(super) fn show(e: &Term) -> String {
    let text = detlib::library().unlink(e).to_string().split_whitespace().collect::<Vec<_>>().join(" ");
    match text.char_indices().nth(SHOWN) {
        Some((cut, _)) => format!("{}...", &text[..cut]),
        None => text,
    }
}

fn fail<T>(kind: TypeErrorKind, at: &Term) -> Result<T, TypeError> {
    Err(TypeError { kind, subterm: show(at) })
}

fn mismatch<T>(expected: impl Into<String>, found: impl ToString, at: &Term) -> Result<T, TypeError> {
    fail(TypeErrorKind::Mismatch { expected: expected.into(), found: found.to_string() }, at)
}

fn unsupported<T>(construct: impl Into<String>, at: &Term) -> Result<T, TypeError> {
    fail(TypeErrorKind::Unsupported { construct: construct.into() }, at)
}

/// Library operations with their own typing rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Form {
    Ref,
    Get,
    Set,
    PAlloc,
    PWrite,
    PRead,
    AllocFill,
    HInit,
    HAdd,
    HElems,
    ParFor,
}

impl Form {
    fn from_name(name: &str) -> Option<Form> {
        Some(match name {
            "ref" => Form::Ref,
            "get" => Form::Get,
            "set" => Form::Set,
            "palloc" => Form::PAlloc,
            "pwrite" => Form::PWrite,
            "pread" => Form::PRead,
            "alloc_fill" => Form::AllocFill,
            "hinit" => Form::HInit,
            "hadd" => Form::HAdd,
            "helems" => Form::HElems,
            "parfor" => Form::ParFor,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Form::Ref | Form::Get | Form::PAlloc | Form::PRead | Form::HElems => 1,
            Form::Set | Form::PWrite | Form::AllocFill | Form::HInit | Form::HAdd => 2,
            Form::ParFor => 3,
        }
    }
}

/// Hash functions whose purity is taken on trust.
const TRUSTED_HASHES: &[&str] = &["h0", "h1"];

/// `e0 e1 ... en` as `(e0, [e1, ..., en])`.
fn spine(e: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut head = e;
    while let Expr::App(f, a) = &**head {
        args.push(a);
        head = f;
    }
    args.reverse();
    (head, args)
}

/// A literal function, as an expression or as a closed value.
fn as_fun(e: &Term) -> Option<(&Name, &Name, &Term)> {
    match &**e {
        Expr::Fun(f, x, body) | Expr::Val(Value::RecFun(f, x, body)) => Some((f, x, body)),
        _ => None,
    }
}

fn is_recursive(f: &Name, body: &Term) -> bool {
    !f.is_anon() && body.mentions(f)
}

fn as_var(e: &Term) -> Option<&Name> {
    match &**e {
        Expr::Var(x) => Some(x),
        _ => None,
    }
}

pub(super) struct Checker {
    lib: &'static Library,
}

impl Checker {
    pub(super) fn new() -> Self {
        Checker { lib: detlib::library() }
    }

    fn form_of(&self, e: &Term) -> Option<(Form, &'static str)> {
        let Expr::Val(v) = &**e else { return None };
        let name = self.lib.name_of(v)?;
        Some((Form::from_name(name)?, name))
    }

    fn lookup(&self, env: &TypeEnv, x: &Name, at: &Term) -> Result<Type, TypeError> {
        match env.get(x) {
            None => fail(TypeErrorKind::UnboundVariable { variable: x.clone() }, at),
            Some(Type::Bot) => fail(TypeErrorKind::BotCombination { variable: x.clone() }, at),
            Some(t) => Ok(t.clone()),
        }
    }

    fn var_operand<'e>(&self, e: &'e Term, what: &str) -> Result<&'e Name, TypeError> {
        as_var(e).map_or_else(|| mismatch(format!("a variable as {what}"), "an expression", e), Ok)
    }

    pub(super) fn check(&self, env: TypeEnv, e: &Term) -> Checked {
        match &**e {
            Expr::Val(v) => Ok((self.value_type(v, e)?, env)),
            Expr::Var(x) => {
                let mut env = env;
                let t = self.lookup(&env, x, e)?;
                // A duplicable binding stays available for later uses.
                if !t.is_idempotent() {
                    env.remove(x);
                }
                Ok((t, env))
            }
            Expr::Let(x, e1, e2) => self.let_in(env, x, e1, e2),
            Expr::If(c, t, f) => {
                let (tc, env) = self.check(env, c)?;
                if tc != Type::Bool {
                    return mismatch("bool", tc, c);
                }
                let (tt, gt) = self.check(env.clone(), t)?;
                let (tf, gf) = self.check(env, f)?;
                if tt != tf {
                    return mismatch(format!("{tt} in both branches"), tf, e);
                }
                // Bindings the branches leave differently are weakened away.
                let out = TypeEnv(
                    gt.0.into_iter().filter(|(x, t)| gf.get(x) == Some(t)).collect(),
                );
                Ok((tt, out))
            }
            Expr::Fun(f, x, body) => {
                let t = self.abs(&env, f, x, body, None, e)?;
                Ok((t, env))
            }
            Expr::App(..) => self.app(env, e),
            Expr::Prim(op, a, b) => {
                let (tb, env) = self.check(env, b)?;
                let (ta, env) = self.check(env, a)?;
                use Type::{Bool, Int};
                let t = match (op, &ta, &tb) {
                    (PrimOp::Add | PrimOp::Sub | PrimOp::Mul | PrimOp::Div | PrimOp::Mod, Int, Int) => Int,
                    (PrimOp::Lt | PrimOp::Le | PrimOp::Gt | PrimOp::Ge, Int, Int) => Bool,
                    (PrimOp::Eq, Int, Int) | (PrimOp::Eq, Bool, Bool) => Bool,
                    (PrimOp::Or | PrimOp::And, Bool, Bool) => Bool,
                    _ => {
                        return mismatch(
                            format!("operands {}", operand_kinds(*op)),
                            format!("{ta} and {tb}"),
                            e,
                        )
                    }
                };
                Ok((t, env))
            }
            Expr::MkPair(a, b) => {
                let (tb, env) = self.check(env, b)?;
                let (ta, env) = self.check(env, a)?;
                Ok((Type::prod(ta, tb), env))
            }
            Expr::Proj(k, p) => match self.check(env, p)? {
                (Type::Prod(t1, t2), env) => Ok((if *k == ProjIndex::Fst { *t1 } else { *t2 }, env)),
                (t, _) => mismatch("a product", t, p),
            },
            Expr::Assert(c) => match self.check(env, c)? {
                (Type::Bool, env) => Ok((Type::Unit, env)),
                (t, _) => mismatch("bool", t, c),
            },
            Expr::Load(a, i) => {
                let env = self.expect_int(env, i)?;
                let x = self.var_operand(a, "the array")?;
                match self.lookup(&env, x, a)? {
                    Type::IntArray(_) => Ok((Type::Int, env)),
                    t => mismatch("intarray", t, a),
                }
            }
            Expr::Store(a, i, v) => {
                let env = self.expect_int(env, v)?;
                let env = self.expect_int(env, i)?;
                let x = self.var_operand(a, "the array")?;
                match self.lookup(&env, x, a)? {
                    Type::IntArray(q) if q == full() => Ok((Type::Unit, env)),
                    t => mismatch("intarray 1", t, a),
                }
            }
            Expr::Length(a) => {
                let x = self.var_operand(a, "the array")?;
                match self.lookup(&env, x, a)? {
                    Type::IntArray(_) => Ok((Type::Int, env)),
                    t => mismatch("intarray", t, a),
                }
            }
            Expr::Par(a, b) => self.par(env, a, b, e),
            Expr::Alloc(_) => unsupported("bare `alloc` (use alloc_fill)", e),
            Expr::Cas(..) => unsupported("compare-and-swap", e),
            Expr::RunPar(..) => unsupported("an active parallel tuple", e),
        }
    }

    fn expect_int(&self, env: TypeEnv, e: &Term) -> Result<TypeEnv, TypeError> {
        match self.check(env, e)? {
            (Type::Int, env) => Ok(env),
            (t, _) => mismatch("int", t, e),
        }
    }

    fn value_type(&self, v: &Value, at: &Term) -> Result<Type, TypeError> {
        match v {
            Value::Unit => Ok(Type::Unit),
            Value::Bool(_) => Ok(Type::Bool),
            Value::Int(_) => Ok(Type::Int),
            Value::Pair(a, b) => Ok(Type::prod(self.value_type(a, at)?, self.value_type(b, at)?)),
            Value::Loc(_) => unsupported("a location literal", at),
            Value::RecFun(f, x, body) => {
                if self.form_of(at).is_some() {
                    return unsupported("a library operation used as a value", at);
                }
                self.abs(&TypeEnv::new(), f, x, body, None, at)
            }
        }
    }

    /// `let x = e1 in e2`. A binding shadowed by `x` and not used by `e1` is
    /// framed around the whole let and so survives it.
    fn let_in(&self, mut env: TypeEnv, x: &Name, e1: &Term, e2: &Term) -> Checked {
        if let Expr::Val(v @ Value::RecFun(..)) = &**e1 {
            // Closed function values are substituted, so trusted hash
            // functions stay recognizable at their use sites.
            return self.check(env, &subst(x, v, e2));
        }
        let framed = match env.get(x) {
            Some(_) if !e1.mentions(x) => env.remove(x),
            _ => None,
        };
        let (t1, mut env) = self.check(env, e1)?;
        if !x.is_anon() {
            env.insert(x.clone(), t1);
        }
        let (t2, mut out) = self.check(env, e2)?;
        if !x.is_anon() {
            out.remove(x);
        }
        if let Some(old) = framed {
            out.insert(x.clone(), old);
        }
        Ok((t2, out))
    }

    fn app(&self, env: TypeEnv, e: &Term) -> Checked {
        let (head, args) = spine(e);
        if let Some((form, name)) = self.form_of(head) {
            return match args.len().cmp(&form.arity()) {
                std::cmp::Ordering::Equal => self.form(env, form, &args, e),
                std::cmp::Ordering::Less => unsupported(format!("partial application of `{name}`"), e),
                std::cmp::Ordering::Greater => {
                    mismatch("a function", format!("the result of `{name}`"), e)
                }
            };
        }
        let Expr::App(fun, arg) = &**e else { unreachable!("spine of an application") };
        if let Some((f, x, body)) = as_fun(fun) {
            if !is_recursive(f, body) {
                // An immediately applied function is a let.
                return match &**arg {
                    Expr::Val(v) => self.check(env, &subst(x, v, body)),
                    _ => self.let_in(env, x, arg, body),
                };
            }
        }
        let (ta, env) = self.check(env, arg)?;
        self.applied(env, fun, ta, e)
    }

    /// Types `fun` as a function applied to an argument of type `ta`, after
    /// the argument has been evaluated.
    fn applied(&self, env: TypeEnv, fun: &Term, ta: Type, at: &Term) -> Checked {
        if let Some((f, x, body)) = as_fun(fun) {
            let Type::Arrow(_, tr) = self.abs(&env, f, x, body, Some(ta), at)? else {
                unreachable!("abstractions have arrow types")
            };
            return Ok((*tr, env));
        }
        if let Expr::App(g, a) = &**fun {
            if let (Some((f, x, body)), Expr::Val(v)) = (as_fun(g), &**a) {
                if !is_recursive(f, body) && self.form_of(g).is_none() {
                    return self.applied(env, &subst(x, v, body), ta, at);
                }
            }
        }
        match self.check(env, fun)? {
            (Type::Arrow(p, r), env) if *p == ta => Ok((*r, env)),
            (Type::Arrow(p, _), _) => mismatch(format!("an argument of type {p}"), ta, at),
            (t, _) => mismatch("a function", t, fun),
        }
    }

    /// T-Abs. The closure environment is `env` restricted to the function's
    /// free variables and must be duplicable. Without a known argument type,
    /// candidates are tried in a fixed order, starting with one suggested by
    /// the first use of the argument; a recursive function's result type is
    /// guessed the same way.
    fn abs(&self, env: &TypeEnv, f: &Name, x: &Name, body: &Term, arg: Option<Type>, at: &Term) -> Result<Type, TypeError> {
        let mut free = body.free_vars();
        free.remove(f);
        free.remove(x);
        let closure = env.restrict(&free);
        let owned: Vec<Name> =
            closure.iter().filter(|(_, t)| !t.is_idempotent()).map(|(x, _)| x.clone()).collect();
        if !owned.is_empty() {
            return fail(TypeErrorKind::NotDuplicableClosure { variables: owned }, at);
        }
        let args = match arg {
            Some(t) => vec![t],
            None => candidates(hint(x, body)),
        };
        let recursive = is_recursive(f, body);
        let results = if recursive { candidates(None) } else { vec![Type::Unit] };
        let mut first_error = None;
        for ta in &args {
            for tr in &results {
                let mut g = closure.clone();
                if recursive {
                    g.insert(f.clone(), Type::arrow(ta.clone(), tr.clone()));
                }
                if !x.is_anon() {
                    g.insert(x.clone(), ta.clone());
                }
                match self.check(g, body) {
                    Ok((tb, _)) if !recursive || tb == *tr => return Ok(Type::arrow(ta.clone(), tb)),
                    Ok((tb, _)) => {
                        first_error.get_or_insert(TypeError {
                            kind: TypeErrorKind::Mismatch {
                                expected: format!("result {tr} for recursive `{f}`"),
                                found: tb.to_string(),
                            },
                            subterm: show(at),
                        });
                    }
                    Err(err) => {
                        first_error.get_or_insert(err);
                    }
                }
            }
        }
        Err(first_error.expect("at least one candidate"))
    }

    /// T-Par. Bindings used by one branch move there; bindings used by both
    /// are split, after a phase change if both branches only read or only
    /// write a full priority reference.
    fn par(&self, env: TypeEnv, a: &Term, b: &Term, at: &Term) -> Checked {
        let (fa, fb) = (a.free_vars(), b.free_vars());
        let (mut left, mut right, mut frame) = (TypeEnv::new(), TypeEnv::new(), TypeEnv::new());
        for (x, t) in env.iter() {
            match (fa.contains(x), fb.contains(x)) {
                (true, true) => {
                    if *t == Type::Bot {
                        return fail(TypeErrorKind::BotCombination { variable: x.clone() }, at);
                    }
                    let t = phase_for_sharing(x, t, a, b);
                    let Some((l, r)) = t.split() else {
                        return fail(TypeErrorKind::UnsplittableSharing { variable: x.clone(), ty: t }, at);
                    };
                    left.insert(x.clone(), l);
                    right.insert(x.clone(), r);
                }
                (true, false) => {
                    left.insert(x.clone(), t.clone());
                }
                (false, true) => {
                    right.insert(x.clone(), t.clone());
                }
                (false, false) => {
                    frame.insert(x.clone(), t.clone());
                }
            }
        }
        let (ta, la) = self.check(left, a)?;
        let (tb, rb) = self.check(right, b)?;
        let out = env_combine(&env_combine(&frame, &la), &rb);
        if let Some((x, _)) = out.iter().find(|(_, t)| **t == Type::Bot) {
            return fail(TypeErrorKind::BotCombination { variable: x.clone() }, at);
        }
        Ok((Type::prod(ta, tb), out))
    }

    fn form(&self, env: TypeEnv, form: Form, args: &[&Term], at: &Term) -> Checked {
        match form {
            Form::Ref => {
                let (t, env) = self.check(env, args[0])?;
                Ok((Type::reference(t), env))
            }
            Form::Get => {
                let x = self.var_operand(args[0], "the reference")?;
                let mut env = env;
                match self.lookup(&env, x, args[0])? {
                    Type::Ref(t) => {
                        env.insert(x.clone(), Type::reference(Type::Empty));
                        Ok((*t, env))
                    }
                    t => mismatch("ref", t, args[0]),
                }
            }
            Form::Set => {
                let (t, mut env) = self.check(env, args[1])?;
                let x = self.var_operand(args[0], "the reference")?;
                match self.lookup(&env, x, args[0])? {
                    Type::Ref(c) if *c == Type::Empty => {
                        env.insert(x.clone(), Type::reference(t));
                        Ok((Type::Unit, env))
                    }
                    t => mismatch("ref empty", t, args[0]),
                }
            }
            Form::PAlloc => {
                let env = self.expect_int(env, args[0])?;
                Ok((Type::PWrite(full()), env))
            }
            Form::PWrite => {
                let env = self.expect_int(env, args[1])?;
                let x = self.var_operand(args[0], "the priority reference")?;
                let env = self.phase(env, x, Phase::Write, args[0])?;
                Ok((Type::Unit, env))
            }
            Form::PRead => {
                let x = self.var_operand(args[0], "the priority reference")?;
                let env = self.phase(env, x, Phase::Read, args[0])?;
                Ok((Type::Int, env))
            }
            Form::AllocFill => {
                let env = self.expect_int(env, args[1])?;
                let env = self.expect_int(env, args[0])?;
                Ok((Type::IntArray(full()), env))
            }
            Form::HInit => {
                let env = self.expect_int(env, args[1])?;
                let trusted = matches!(&**args[0], Expr::Val(v)
                    if self.lib.name_of(v).is_some_and(|n| TRUSTED_HASHES.contains(&n)));
                if !trusted {
                    return fail(TypeErrorKind::UntrustedHead { role: "hash function", head: show(args[0]) }, at);
                }
                Ok((Type::IntSet(full()), env))
            }
            Form::HAdd => {
                let env = self.expect_int(env, args[1])?;
                let x = self.var_operand(args[0], "the hash set")?;
                match self.lookup(&env, x, args[0])? {
                    Type::IntSet(_) => Ok((Type::Unit, env)),
                    t => mismatch("intset", t, args[0]),
                }
            }
            Form::HElems => match self.check(env, args[0])? {
                (Type::IntSet(q), env) if q == full() => Ok((Type::IntArray(full()), env)),
                (t, _) => mismatch("intset 1", t, args[0]),
            },
            Form::ParFor => self.parfor(env, args, at),
        }
    }

    /// T-ParFor, applied to the bindings the loop uses: each must be
    /// idempotent or fractional, and the body must type with, and give back,
    /// every q-th share of them. The body is checked at q = 1/2 and q = 1,
    /// which exercises both the splitting and the full-fraction rules.
    fn parfor(&self, env: TypeEnv, args: &[&Term], at: &Term) -> Checked {
        let Some((_, i, body)) = as_fun(args[2]).filter(|(f, _, b)| !is_recursive(f, b)) else {
            return fail(TypeErrorKind::UntrustedHead { role: "parfor body", head: show(args[2]) }, at);
        };
        let lo = self.var_operand(args[0], "the lower bound")?;
        let hi = self.var_operand(args[1], "the upper bound")?;
        for (x, e) in [(lo, args[0]), (hi, args[1])] {
            let t = self.lookup(&env, x, e)?;
            if t != Type::Int {
                return mismatch("int", t, e);
            }
        }
        let mut used = body.free_vars();
        used.remove(i);
        let shared = env.restrict(&used);
        if let Some((x, t)) = shared.iter().find(|(_, t)| !t.is_fractional()) {
            return fail(TypeErrorKind::UnsplittableSharing { variable: x.clone(), ty: t.clone() }, at);
        }
        for q in [Frac::new(1, 2), full()] {
            let share = TypeEnv(shared.iter().map(|(x, t)| (x.clone(), t.scale(q))).collect());
            let mut g = share.clone();
            if !i.is_anon() {
                g.insert(i.clone(), Type::Int);
            }
            let (t, out) = self.check(g, body)?;
            if t != Type::Unit {
                return mismatch("unit from the parfor body", t, body);
            }
            for (x, tx) in share.iter() {
                if out.get(x) != Some(tx) {
                    let found = out.get(x).map_or_else(|| "nothing".to_string(), Type::to_string);
                    return mismatch(format!("the parfor body to give back `{x}` : {tx}"), found, body);
                }
            }
        }
        Ok((Type::Unit, env))
    }

    /// Looks up a priority reference for a read or a write, switching its
    /// phase when it holds the full fraction of the other one.
    fn phase(&self, mut env: TypeEnv, x: &Name, want: Phase, at: &Term) -> Result<TypeEnv, TypeError> {
        let t = self.lookup(&env, x, at)?;
        match (want, &t) {
            (Phase::Write, Type::PWrite(_)) | (Phase::Read, Type::PRead(_)) => Ok(env),
            (Phase::Write, Type::PRead(q)) | (Phase::Read, Type::PWrite(q)) if *q == full() => {
                env.insert(x.clone(), want.full());
                Ok(env)
            }
            (_, Type::PRead(_) | Type::PWrite(_)) => {
                fail(TypeErrorKind::PhaseViolation { variable: x.clone(), needed: want.name(), found: t }, at)
            }
            _ => mismatch(format!("{} or pread/pwrite 1", want.full()), t, at),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    Read,
    Write,
}

impl Phase {
    fn name(self) -> &'static str {
        match self {
            Phase::Read => "read",
            Phase::Write => "write",
        }
    }

    fn full(self) -> Type {
        match self {
            Phase::Read => Type::PRead(full()),
            Phase::Write => Type::PWrite(full()),
        }
    }
}

fn operand_kinds(op: PrimOp) -> &'static str {
    match op {
        PrimOp::Add | PrimOp::Sub | PrimOp::Mul | PrimOp::Div | PrimOp::Mod => "int and int",
        PrimOp::Lt | PrimOp::Le | PrimOp::Gt | PrimOp::Ge => "int and int",
        PrimOp::Eq => "int and int, or bool and bool",
        PrimOp::Or | PrimOp::And => "bool and bool",
    }
}

/// Which priority operations `e` applies to the variable `x`, as
/// `(reads, writes)`.
fn priority_uses(x: &Name, e: &Term) -> (bool, bool) {
    let lib = detlib::library();
    let mut uses = (false, false);
    let mut stack = vec![e];
    while let Some(t) = stack.pop() {
        if let Expr::App(..) = &**t {
            let (head, args) = spine(t);
            if let (Expr::Val(v), Some(first)) = (&**head, args.first()) {
                if as_var(first) == Some(x) {
                    match lib.name_of(v) {
                        Some("pread") => uses.0 = true,
                        Some("pwrite") => uses.1 = true,
                        _ => {}
                    }
                }
            }
        }
        stack.extend(t.children());
    }
    uses
}

/// The phase in which a full priority reference shared by two parallel
/// branches should be split.
fn phase_for_sharing(x: &Name, t: &Type, a: &Term, b: &Term) -> Type {
    let q = match t {
        Type::PRead(q) | Type::PWrite(q) if *q == full() => *q,
        _ => return t.clone(),
    };
    let (ra, wa) = priority_uses(x, a);
    let (rb, wb) = priority_uses(x, b);
    match (ra || rb, wa || wb) {
        (true, false) => Type::PRead(q),
        (false, true) => Type::PWrite(q),
        _ => t.clone(),
    }
}

/// Argument or result types to try, most likely first.
fn candidates(hint: Option<Type>) -> Vec<Type> {
    let mut out: Vec<Type> = hint.into_iter().collect();
    for t in [Type::Int, Type::Bool, Type::Unit] {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// A type suggested by the first use of `x` in `e`.
fn hint(x: &Name, e: &Term) -> Option<Type> {
    let is_x = |t: &Term| as_var(t) == Some(x);
    match &**e {
        Expr::Load(a, _) | Expr::Length(a) | Expr::Store(a, ..) if is_x(a) => {
            return Some(Type::IntArray(full()))
        }
        Expr::Prim(op, a, b) if is_x(a) || is_x(b) => {
            return Some(match op {
                PrimOp::Or | PrimOp::And => Type::Bool,
                _ => Type::Int,
            })
        }
        Expr::If(c, ..) | Expr::Assert(c) if is_x(c) => return Some(Type::Bool),
        Expr::App(..) => {
            let (head, args) = spine(e);
            if let (Expr::Val(v), Some(first)) = (&**head, args.first()) {
                if is_x(first) {
                    let t = match detlib::library().name_of(v) {
                        Some("pwrite") => Some(Type::PWrite(full())),
                        Some("pread") => Some(Type::PRead(full())),
                        Some("hadd") | Some("helems") => Some(Type::IntSet(full())),
                        Some("get") => Some(Type::reference(Type::Int)),
                        Some("set") => Some(Type::reference(Type::Empty)),
                        _ => None,
                    };
                    if t.is_some() {
                        return t;
                    }
                }
            }
        }
        Expr::Let(y, e1, _) if y == x => return hint(x, e1),
        Expr::Fun(f, y, _) if f == x || y == x => return None,
        _ => {}
    }
    // Right-to-left, like evaluation.
    e.children().into_iter().rev().find_map(|c| hint(x, c))
}
