//! Stores, the head reduction relation, and the interleaving main relation
//! as an enumerable transition function, plus the reducibility predicates
//! used to define safety.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lang::{
    build, decompose_tasks, fill, is_value, rewrite_task, split_redex, subst, Expr, Loc, PrimOp,
    ProjIndex, Side, TaskPath, Term, Value,
};

/// Arrays larger than this are treated as an allocation failure (stuck).
pub const MAX_ARRAY_LEN: i64 = 1 << 20;

/// How a fresh location is chosen. Location choice is unobservable, so
/// every policy must produce the same canonical outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AllocPolicy {
    /// The lowest index not in the store.
    #[default]
    Lowest,
    /// The highest unused index below 2^32, counting down.
    Descending,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Store {
    cells: BTreeMap<Loc, Arc<Vec<Value>>>,
    policy: AllocPolicy,
}

impl Store {
    pub fn new(policy: AllocPolicy) -> Self {
        Store { cells: BTreeMap::new(), policy }
    }

    pub fn policy(&self) -> AllocPolicy {
        self.policy
    }

    pub fn get(&self, l: Loc) -> Option<&[Value]> {
        self.cells.get(&l).map(|a| a.as_slice())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Loc, &[Value])> {
        self.cells.iter().map(|(l, a)| (*l, a.as_slice()))
    }

    pub fn fresh(&self) -> Loc {
        match self.policy {
            AllocPolicy::Lowest => {
                let mut next = 0;
                for l in self.cells.keys() {
                    if l.0 != next {
                        break;
                    }
                    next += 1;
                }
                Loc(next)
            }
            AllocPolicy::Descending => {
                let mut next = u64::from(u32::MAX);
                for l in self.cells.keys().rev() {
                    if l.0 < next {
                        break;
                    }
                    if l.0 == next {
                        next -= 1;
                    }
                }
                Loc(next)
            }
        }
    }

    /// Inserts an array at `l`, replacing any previous one.
    pub fn insert(&mut self, l: Loc, cells: Vec<Value>) {
        self.cells.insert(l, Arc::new(cells));
    }

    pub fn apply(&mut self, delta: &StoreDelta) {
        match delta {
            StoreDelta::None => {}
            StoreDelta::Alloc { loc, len } => {
                self.insert(*loc, vec![Value::Unit; *len]);
            }
            StoreDelta::Write { loc, index, value } => {
                let arr = self.cells.get_mut(loc).expect("write to allocated location");
                Arc::make_mut(arr)[*index] = value.clone();
            }
        }
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (l, arr)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l} ↦ [")?;
            for (j, v) in arr.iter().enumerate() {
                if j > 0 {
                    f.write_str("; ")?;
                }
                write!(f, "{}", Expr::Val(v.clone()))?;
            }
            f.write_str("]")?;
        }
        f.write_str("}")
    }
}

/// The store effect of one step. A head step touches at most one location.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StoreDelta {
    None,
    Alloc { loc: Loc, len: usize },
    Write { loc: Loc, index: usize, value: Value },
}

impl StoreDelta {
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            StoreDelta::None => serde_json::Value::Null,
            StoreDelta::Alloc { loc, len } => json!({"alloc": loc.to_string(), "len": len}),
            StoreDelta::Write { loc, index, value } => json!({
                "write": loc.to_string(),
                "index": index,
                "value": Expr::Val(value.clone()).to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepKind {
    IfTrue,
    IfFalse,
    CallPrim,
    Abs,
    LetVal,
    Alloc,
    Load,
    Store,
    Assert,
    Product,
    Proj,
    Length,
    CasSucc,
    CasFail,
    Call,
    Fork,
    Join,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StepLabel {
    pub task_path: TaskPath,
    pub kind: StepKind,
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.task_path, self.kind)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub expr: Term,
    pub store: Store,
}

impl Config {
    /// A program paired with the empty store.
    pub fn initial(expr: Term, policy: AllocPolicy) -> Self {
        Config { expr, store: Store::new(policy) }
    }

    pub fn is_value(&self) -> bool {
        is_value(&self.expr)
    }
}

/// A head step's result before the store effect is applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadStep {
    pub expr: Term,
    pub delta: StoreDelta,
    pub kind: StepKind,
}

pub fn prim_eval(op: PrimOp, v1: &Value, v2: &Value) -> Option<Value> {
    use Value::{Bool, Int};
    let v = match (op, v1, v2) {
        (PrimOp::Add, Int(a), Int(b)) => Int(a.checked_add(*b)?),
        (PrimOp::Sub, Int(a), Int(b)) => Int(a.checked_sub(*b)?),
        (PrimOp::Mul, Int(a), Int(b)) => Int(a.checked_mul(*b)?),
        (PrimOp::Div, Int(a), Int(b)) => Int(a.checked_div_euclid(*b)?),
        (PrimOp::Mod, Int(a), Int(b)) => Int(a.checked_rem_euclid(*b)?),
        (PrimOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (PrimOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (PrimOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (PrimOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (PrimOp::Or, Bool(a), Bool(b)) => Bool(*a || *b),
        (PrimOp::And, Bool(a), Bool(b)) => Bool(*a && *b),
        (PrimOp::Eq, Int(a), Int(b)) => Bool(a == b),
        (PrimOp::Eq, Bool(a), Bool(b)) => Bool(a == b),
        (PrimOp::Eq, Value::Loc(a), Value::Loc(b)) => Bool(a == b),
        // The hash set keeps integers and its dummy location in one array.
        (PrimOp::Eq, Int(_), Value::Loc(_)) | (PrimOp::Eq, Value::Loc(_), Int(_)) => Bool(false),
        _ => return None,
    };
    Some(v)
}

fn index(store: &Store, l: &Value, i: &Value) -> Option<(Loc, usize)> {
    let l = l.as_loc()?;
    let i = i.as_int()?;
    let arr = store.get(l)?;
    let i = usize::try_from(i).ok().filter(|&i| i < arr.len())?;
    Some((l, i))
}

/// One head reduction step of `e` itself (no context search). `None` means
/// no head rule applies.
pub fn head_step(e: &Expr, store: &Store) -> Option<HeadStep> {
    let v = |e: &Term| e.as_value().cloned();
    let pure = |expr: Term, kind| Some(HeadStep { expr, delta: StoreDelta::None, kind });
    match e {
        Expr::If(c, t, f) => match c.as_value()? {
            Value::Bool(true) => pure(t.clone(), StepKind::IfTrue),
            Value::Bool(false) => pure(f.clone(), StepKind::IfFalse),
            _ => None,
        },
        Expr::Prim(op, a, b) => {
            let r = prim_eval(*op, a.as_value()?, b.as_value()?)?;
            pure(build::val(r), StepKind::CallPrim)
        }
        Expr::Fun(f, x, body) => {
            pure(build::val(Value::RecFun(f.clone(), x.clone(), body.clone())), StepKind::Abs)
        }
        Expr::Let(x, e1, e2) => pure(subst(x, &v(e1)?, e2), StepKind::LetVal),
        Expr::Alloc(n) => {
            let n = n.as_value()?.as_int()?;
            if !(0..=MAX_ARRAY_LEN).contains(&n) {
                return None;
            }
            let loc = store.fresh();
            Some(HeadStep {
                expr: build::val(Value::Loc(loc)),
                delta: StoreDelta::Alloc { loc, len: n as usize },
                kind: StepKind::Alloc,
            })
        }
        Expr::Load(a, i) => {
            let (l, i) = index(store, a.as_value()?, i.as_value()?)?;
            pure(build::val(store.get(l)?[i].clone()), StepKind::Load)
        }
        Expr::Store(a, i, x) => {
            let value = v(x)?;
            let (loc, index) = index(store, a.as_value()?, i.as_value()?)?;
            Some(HeadStep {
                expr: build::unit(),
                delta: StoreDelta::Write { loc, index, value },
                kind: StepKind::Store,
            })
        }
        Expr::Assert(b) => match b.as_value()? {
            Value::Bool(true) => pure(build::unit(), StepKind::Assert),
            _ => None,
        },
        Expr::MkPair(a, b) => pure(build::val(Value::pair(v(a)?, v(b)?)), StepKind::Product),
        Expr::Proj(k, p) => match p.as_value()? {
            Value::Pair(a, b) => {
                let out = match k {
                    ProjIndex::Fst => a,
                    ProjIndex::Snd => b,
                };
                pure(build::val((**out).clone()), StepKind::Proj)
            }
            _ => None,
        },
        Expr::Length(a) => {
            let arr = store.get(a.as_value()?.as_loc()?)?;
            pure(build::int(arr.len() as i64), StepKind::Length)
        }
        Expr::Cas(a, i, old, new) => {
            let (old, value) = (v(old)?, v(new)?);
            if !old.is_scalar() || !value.is_scalar() {
                return None;
            }
            let (loc, index) = index(store, a.as_value()?, i.as_value()?)?;
            if store.get(loc)?[index] == old {
                Some(HeadStep {
                    expr: build::bool(true),
                    delta: StoreDelta::Write { loc, index, value },
                    kind: StepKind::CasSucc,
                })
            } else {
                pure(build::bool(false), StepKind::CasFail)
            }
        }
        Expr::App(f, a) => match f.as_value()? {
            fv @ Value::RecFun(g, x, body) => {
                let body = subst(g, fv, &subst(x, &v(a)?, body));
                pure(body, StepKind::Call)
            }
            _ => None,
        },
        Expr::Par(a, b) => pure(Term::new(Expr::RunPar(a.clone(), b.clone())), StepKind::Fork),
        Expr::RunPar(a, b) => pure(build::val(Value::pair(v(a)?, v(b)?)), StepKind::Join),
        Expr::Val(_) | Expr::Var(_) => None,
    }
}

/// One successor of a configuration.
#[derive(Clone, Debug)]
pub struct Step {
    pub label: StepLabel,
    /// The head redex that fired, before the step.
    pub redex: Term,
    pub delta: StoreDelta,
    pub next: Config,
}

/// Steps the task `t` (a term without active tuples at its redex position,
/// or a join-ready tuple).
fn step_task(t: &Term, store: &Store) -> Option<(Term, Term, HeadStep)> {
    let (k, redex) = split_redex(t)?;
    let hs = head_step(&redex, store)?;
    Some((fill(&k, hs.expr.clone()), redex, hs))
}

/// Every successor of `c`, one per task that can step, in task order
/// (left before right).
pub fn enabled_steps(c: &Config) -> Vec<Step> {
    decompose_tasks(&c.expr)
        .into_iter()
        .filter_map(|(path, _)| step_at(c, &path.0))
        .collect()
}

/// The successor obtained by stepping the task at `path`, if it can step.
pub fn step_at(c: &Config, path: &[Side]) -> Option<Step> {
    let mut fired = None;
    let expr = rewrite_task(&c.expr, path, &mut |t| {
        let (out, redex, hs) = step_task(t, &c.store)?;
        fired = Some((redex, hs.delta, hs.kind));
        Some(out)
    })?;
    let (redex, delta, kind) = fired?;
    let mut store = c.store.clone();
    store.apply(&delta);
    Some(Step {
        label: StepLabel { task_path: TaskPath(path.to_vec()), kind },
        redex,
        delta,
        next: Config { expr, store },
    })
}

/// Every way to write `e` as a single context frame around a hole, following
/// the context grammar directly: holes to the left of a subterm are only
/// allowed once everything to their right is a value.
fn frame_holes(e: &Expr) -> Vec<&Term> {
    // Right-to-left: the rightmost hole always, each further one left only
    // while every subterm to its right is a value.
    fn rtl<'a>(subterms: &[&'a Term]) -> Vec<&'a Term> {
        let mut out = Vec::new();
        for s in subterms.iter().rev() {
            out.push(*s);
            if !is_value(s) {
                break;
            }
        }
        out
    }
    match e {
        Expr::Let(_, e1, _) | Expr::If(e1, _, _) => vec![e1],
        Expr::Alloc(a) | Expr::Length(a) | Expr::Assert(a) | Expr::Proj(_, a) => vec![a],
        Expr::Load(a, i) => rtl(&[a, i]),
        Expr::Store(a, i, x) => rtl(&[a, i, x]),
        Expr::Prim(_, a, b) | Expr::App(a, b) | Expr::MkPair(a, b) => rtl(&[a, b]),
        Expr::Cas(l, i, o, n) => rtl(&[l, i, o, n]),
        Expr::Val(_) | Expr::Var(_) | Expr::Fun(..) | Expr::Par(..) | Expr::RunPar(..) => vec![],
    }
}

/// Reducibility, by the three rules: a head step, reducibility under a
/// context, or an active tuple whose every non-value side is reducible.
pub fn reducible(e: &Term, store: &Store) -> bool {
    if head_step(e, store).is_some() {
        return true;
    }
    if let Expr::RunPar(a, b) = &**e {
        let live = !is_value(a) || !is_value(b);
        let ok = |s: &Term| is_value(s) || reducible(s, store);
        if live && ok(a) && ok(b) {
            return true;
        }
    }
    frame_holes(e).into_iter().any(|h| reducible(h, store))
}

pub fn notstuck(e: &Term, store: &Store) -> bool {
    is_value(e) || reducible(e, store)
}

/// `true` iff `c` is not a value and every task of `c` has a successor.
/// This is the exact transition-level counterpart of [`reducible`]; the
/// weaker "some task has a successor" differs on tuples with one live and
/// one stuck side.
pub fn every_task_steps(c: &Config) -> bool {
    !c.is_value()
        && decompose_tasks(&c.expr)
            .iter()
            .all(|(path, _)| step_at(c, &path.0).is_some())
}
