//! Abstract syntax of the parallel λ-language, evaluation contexts, and
//! substitution.
//!
//! Terms are immutable and share structure through `Arc`, so cloning a term
//! or a configuration is cheap and substitution only rebuilds the spine that
//! actually mentions the substituted variable.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An interned variable name. `_` is the anonymous binder and never occurs
/// as a variable reference.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn anon() -> Self {
        Name::new("_")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_anon(&self) -> bool {
        &*self.0 == "_"
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

/// Opaque heap location. Only allocation produces these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Loc(pub u64);

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i64),
    Loc(Loc),
    Pair(Arc<Value>, Arc<Value>),
    /// `μf.λx.body`; `f` is `_` for non-recursive functions.
    RecFun(Name, Name, Term),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_loc(&self) -> Option<Loc> {
        match self {
            Value::Loc(l) => Some(*l),
            _ => None,
        }
    }

    /// Appends the locations occurring in `self` that are not yet in `out`,
    /// in order of first occurrence.
    pub fn push_locs(&self, out: &mut Vec<Loc>) {
        match self {
            Value::Loc(l) => push_distinct(out, &[*l]),
            Value::Pair(a, b) => {
                a.push_locs(out);
                b.push_locs(out);
            }
            Value::RecFun(_, _, body) => push_distinct(out, body.locs()),
            Value::Unit | Value::Bool(_) | Value::Int(_) => {}
        }
    }

    /// Unboxed values and locations, i.e. the values compare-and-swap may
    /// compare.
    pub fn is_scalar(&self) -> bool {
        matches!(self, Value::Unit | Value::Bool(_) | Value::Int(_) | Value::Loc(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    Or,
    And,
}

impl PrimOp {
    pub const ALL: [PrimOp; 12] = [
        PrimOp::Add,
        PrimOp::Sub,
        PrimOp::Mul,
        PrimOp::Div,
        PrimOp::Mod,
        PrimOp::Eq,
        PrimOp::Lt,
        PrimOp::Le,
        PrimOp::Gt,
        PrimOp::Ge,
        PrimOp::Or,
        PrimOp::And,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            PrimOp::Add => "+",
            PrimOp::Sub => "-",
            PrimOp::Mul => "*",
            PrimOp::Div => "/",
            PrimOp::Mod => "mod",
            PrimOp::Eq => "==",
            PrimOp::Lt => "<",
            PrimOp::Le => "<=",
            PrimOp::Gt => ">",
            PrimOp::Ge => ">=",
            PrimOp::Or => "||",
            PrimOp::And => "&&",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjIndex {
    Fst,
    Snd,
}

/// A shared, immutable term. Each node caches its structural hash and the
/// locations occurring in it, so hashing a configuration is O(1) and
/// location renaming skips location-free code.
#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    expr: Expr,
    hash: u64,
    locs: Box<[Loc]>,
}

fn push_distinct(out: &mut Vec<Loc>, new: &[Loc]) {
    for l in new {
        if !out.contains(l) {
            out.push(*l);
        }
    }
}

impl Term {
    pub fn new(expr: Expr) -> Term {
        let mut h = std::hash::DefaultHasher::new();
        expr.hash(&mut h);
        let mut locs = Vec::new();
        match &expr {
            Expr::Val(v) => v.push_locs(&mut locs),
            e => e.children().iter().for_each(|c| push_distinct(&mut locs, c.locs())),
        }
        let locs = locs.into_boxed_slice();
        Term(Arc::new(Node { expr, hash: h.finish(), locs }))
    }

    pub fn ptr_eq(a: &Term, b: &Term) -> bool {
        Arc::ptr_eq(&a.0, &b.0)
    }

    pub fn has_locs(&self) -> bool {
        !self.0.locs.is_empty()
    }

    /// The distinct locations in this term, in pre-order of first occurrence
    /// (descending into pairs and function bodies).
    pub fn locs(&self) -> &[Loc] {
        &self.0.locs
    }
}

impl std::ops::Deref for Term {
    type Target = Expr;
    fn deref(&self) -> &Expr {
        &self.0.expr
    }
}

impl AsRef<Expr> for Term {
    fn as_ref(&self) -> &Expr {
        &self.0.expr
    }
}

impl From<Expr> for Term {
    fn from(e: Expr) -> Term {
        Term::new(e)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Term::ptr_eq(self, other) || (self.0.hash == other.0.hash && self.0.expr == other.0.expr)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0.expr, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Val(Value),
    Var(Name),
    Let(Name, Term, Term),
    If(Term, Term, Term),
    Fun(Name, Name, Term),
    App(Term, Term),
    Prim(PrimOp, Term, Term),
    MkPair(Term, Term),
    Proj(ProjIndex, Term),
    Assert(Term),
    Alloc(Term),
    Load(Term, Term),
    Store(Term, Term, Term),
    Length(Term),
    Par(Term, Term),
    /// Active parallel tuple. Only produced by forking.
    RunPar(Term, Term),
    Cas(Term, Term, Term, Term),
}

/// Shorthand constructors returning shared terms.
pub mod build {
    use super::*;

    pub fn val(v: Value) -> Term {
        Term::new(Expr::Val(v))
    }
    pub fn unit() -> Term {
        val(Value::Unit)
    }
    pub fn int(i: i64) -> Term {
        val(Value::Int(i))
    }
    pub fn bool(b: bool) -> Term {
        val(Value::Bool(b))
    }
    pub fn var(x: &str) -> Term {
        Term::new(Expr::Var(Name::new(x)))
    }
    pub fn let_(x: &str, e1: Term, e2: Term) -> Term {
        Term::new(Expr::Let(Name::new(x), e1, e2))
    }
    pub fn seq(e1: Term, e2: Term) -> Term {
        Term::new(Expr::Let(Name::anon(), e1, e2))
    }
    pub fn if_(c: Term, t: Term, e: Term) -> Term {
        Term::new(Expr::If(c, t, e))
    }
    pub fn fun(f: &str, x: &str, body: Term) -> Term {
        Term::new(Expr::Fun(Name::new(f), Name::new(x), body))
    }
    pub fn lam(x: &str, body: Term) -> Term {
        fun("_", x, body)
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::new(Expr::App(f, a))
    }
    pub fn prim(op: PrimOp, a: Term, b: Term) -> Term {
        Term::new(Expr::Prim(op, a, b))
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::new(Expr::MkPair(a, b))
    }
    pub fn proj(k: ProjIndex, e: Term) -> Term {
        Term::new(Expr::Proj(k, e))
    }
    pub fn assert(e: Term) -> Term {
        Term::new(Expr::Assert(e))
    }
    pub fn alloc(e: Term) -> Term {
        Term::new(Expr::Alloc(e))
    }
    pub fn load(a: Term, i: Term) -> Term {
        Term::new(Expr::Load(a, i))
    }
    pub fn store(a: Term, i: Term, v: Term) -> Term {
        Term::new(Expr::Store(a, i, v))
    }
    pub fn length(a: Term) -> Term {
        Term::new(Expr::Length(a))
    }
    pub fn par(a: Term, b: Term) -> Term {
        Term::new(Expr::Par(a, b))
    }
    pub fn run_par(a: Term, b: Term) -> Term {
        Term::new(Expr::RunPar(a, b))
    }
    pub fn cas(l: Term, i: Term, old: Term, new: Term) -> Term {
        Term::new(Expr::Cas(l, i, old, new))
    }
}

impl Expr {
    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Expr::Val(v) => Some(v),
            _ => None,
        }
    }

    /// Number of AST nodes; values count as one node.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate subterms in source order (values are leaves).
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Expr::Val(_) | Expr::Var(_) => vec![],
            Expr::Fun(_, _, b) => vec![b],
            Expr::Proj(_, a) | Expr::Assert(a) | Expr::Alloc(a) | Expr::Length(a) => vec![a],
            Expr::Let(_, a, b)
            | Expr::App(a, b)
            | Expr::Prim(_, a, b)
            | Expr::MkPair(a, b)
            | Expr::Load(a, b)
            | Expr::Par(a, b)
            | Expr::RunPar(a, b) => vec![a, b],
            Expr::If(a, b, c) | Expr::Store(a, b, c) => vec![a, b, c],
            Expr::Cas(a, b, c, d) => vec![a, b, c, d],
        }
    }

    /// Rebuilds this node with `new` in place of [`Expr::children`], in the
    /// same order.
    pub fn with_children(&self, new: Vec<Term>) -> Expr {
        let mut it = new.into_iter();
        let mut next = || it.next().expect("one replacement per child");
        match self {
            Expr::Val(_) | Expr::Var(_) => self.clone(),
            Expr::Fun(f, x, _) => Expr::Fun(f.clone(), x.clone(), next()),
            Expr::Proj(k, _) => Expr::Proj(*k, next()),
            Expr::Assert(_) => Expr::Assert(next()),
            Expr::Alloc(_) => Expr::Alloc(next()),
            Expr::Length(_) => Expr::Length(next()),
            Expr::Let(x, _, _) => Expr::Let(x.clone(), next(), next()),
            Expr::App(..) => Expr::App(next(), next()),
            Expr::Prim(op, ..) => Expr::Prim(*op, next(), next()),
            Expr::MkPair(..) => Expr::MkPair(next(), next()),
            Expr::Load(..) => Expr::Load(next(), next()),
            Expr::Par(..) => Expr::Par(next(), next()),
            Expr::RunPar(..) => Expr::RunPar(next(), next()),
            Expr::If(..) => Expr::If(next(), next(), next()),
            Expr::Store(..) => Expr::Store(next(), next(), next()),
            Expr::Cas(..) => Expr::Cas(next(), next(), next(), next()),
        }
    }

    pub fn count_nodes(&self, pred: &dyn Fn(&Expr) -> bool) -> usize {
        let here = usize::from(pred(self));
        let inner = match self {
            Expr::Val(Value::RecFun(_, _, body)) => body.count_nodes(pred),
            _ => 0,
        };
        here + inner + self.children().iter().map(|c| c.count_nodes(pred)).sum::<usize>()
    }

    pub fn contains_run_par(&self) -> bool {
        self.count_nodes(&|e| matches!(e, Expr::RunPar(..))) > 0
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        free_vars_into(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn mentions(&self, x: &Name) -> bool {
        self.free_vars().contains(x)
    }
}

fn free_vars_into(e: &Expr, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match e {
        Expr::Val(_) => {}
        Expr::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Expr::Let(x, e1, e2) => {
            free_vars_into(e1, bound, out);
            bound.push(x.clone());
            free_vars_into(e2, bound, out);
            bound.pop();
        }
        Expr::Fun(f, x, body) => {
            bound.push(f.clone());
            bound.push(x.clone());
            free_vars_into(body, bound, out);
            bound.pop();
            bound.pop();
        }
        other => {
            for c in other.children() {
                free_vars_into(c, bound, out);
            }
        }
    }
}

pub fn is_value(e: &Expr) -> bool {
    matches!(e, Expr::Val(_))
}

/// `[v/x]e`. Values are closed, so no capture can occur; binders named `x`
/// shadow.
pub fn subst(x: &Name, v: &Value, e: &Term) -> Term {
    if x.is_anon() {
        return e.clone();
    }
    subst_opt(x, v, e).unwrap_or_else(|| e.clone())
}

/// Returns `None` when `x` does not occur free, so callers keep sharing.
fn subst_opt(x: &Name, v: &Value, e: &Term) -> Option<Term> {
    let all = |cs: &[&Term]| -> Option<Vec<Term>> {
        let subs: Vec<_> = cs.iter().map(|c| subst_opt(x, v, c)).collect();
        if subs.iter().all(Option::is_none) {
            return None;
        }
        Some(subs.into_iter().zip(cs).map(|(s, c)| s.unwrap_or_else(|| (*c).clone())).collect())
    };
    let node = match &**e {
        Expr::Val(_) => return None,
        Expr::Var(y) => return (y == x).then(|| Term::new(Expr::Val(v.clone()))),
        Expr::Let(y, e1, e2) => {
            if y == x {
                let n1 = subst_opt(x, v, e1)?;
                Expr::Let(y.clone(), n1, e2.clone())
            } else {
                let [a, b]: [_; 2] = all(&[e1, e2])?.try_into().unwrap();
                Expr::Let(y.clone(), a, b)
            }
        }
        Expr::Fun(f, y, body) => {
            if f == x || y == x {
                return None;
            }
            Expr::Fun(f.clone(), y.clone(), subst_opt(x, v, body)?)
        }
        Expr::If(a, b, c) => {
            let [a, b, c]: [_; 3] = all(&[a, b, c])?.try_into().unwrap();
            Expr::If(a, b, c)
        }
        Expr::App(a, b) => {
            let [a, b]: [_; 2] = all(&[a, b])?.try_into().unwrap();
            Expr::App(a, b)
        }
        Expr::Prim(op, a, b) => {
            let [a, b]: [_; 2] = all(&[a, b])?.try_into().unwrap();
            Expr::Prim(*op, a, b)
        }
        Expr::MkPair(a, b) => {
            let [a, b]: [_; 2] = all(&[a, b])?.try_into().unwrap();
            Expr::MkPair(a, b)
        }
        Expr::Proj(k, a) => Expr::Proj(*k, subst_opt(x, v, a)?),
        Expr::Assert(a) => Expr::Assert(subst_opt(x, v, a)?),
        Expr::Alloc(a) => Expr::Alloc(subst_opt(x, v, a)?),
        Expr::Length(a) => Expr::Length(subst_opt(x, v, a)?),
        Expr::Load(a, b) => {
            let [a, b]: [_; 2] = all(&[a, b])?.try_into().unwrap();
            Expr::Load(a, b)
        }
        Expr::Store(a, b, c) => {
            let [a, b, c]: [_; 3] = all(&[a, b, c])?.try_into().unwrap();
            Expr::Store(a, b, c)
        }
        Expr::Par(a, b) => {
            let [a, b]: [_; 2] = all(&[a, b])?.try_into().unwrap();
            Expr::Par(a, b)
        }
        Expr::RunPar(a, b) => {
            let [a, b]: [_; 2] = all(&[a, b])?.try_into().unwrap();
            Expr::RunPar(a, b)
        }
        Expr::Cas(a, b, c, d) => {
            let [a, b, c, d]: [_; 4] = all(&[a, b, c, d])?.try_into().unwrap();
            Expr::Cas(a, b, c, d)
        }
    };
    Some(Term::new(node))
}

/// One single-hole frame of an evaluation context. Subterms to the right of
/// the hole are stored as values: evaluation runs right to left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Let(Name, Term),
    If(Term, Term),
    Alloc,
    Length,
    Assert,
    Proj(ProjIndex),
    /// `e.(□)`
    LoadIndex(Term),
    /// `□.(v)`
    LoadArray(Value),
    /// `e.(e) <- □`
    StoreValue(Term, Term),
    /// `e.(□) <- v`
    StoreIndex(Term, Value),
    /// `□.(v) <- v`
    StoreArray(Value, Value),
    /// `e ⊛ □`
    PrimRight(PrimOp, Term),
    /// `□ ⊛ v`
    PrimLeft(PrimOp, Value),
    /// `e □`: the argument is evaluated first.
    AppArg(Term),
    /// `□ v`
    AppFun(Value),
    CasNew(Term, Term, Term),
    CasOld(Term, Term, Value),
    CasIndex(Term, Value, Value),
    CasLoc(Value, Value, Value),
    /// `(e, □)`
    PairRight(Term),
    /// `(□, v)`
    PairLeft(Value),
}

impl Frame {
    /// Plugs `e` into the hole.
    pub fn plug(&self, e: Term) -> Term {
        use build::val;
        Term::new(match self {
            Frame::Let(x, body) => Expr::Let(x.clone(), e, body.clone()),
            Frame::If(t, f) => Expr::If(e, t.clone(), f.clone()),
            Frame::Alloc => Expr::Alloc(e),
            Frame::Length => Expr::Length(e),
            Frame::Assert => Expr::Assert(e),
            Frame::Proj(k) => Expr::Proj(*k, e),
            Frame::LoadIndex(a) => Expr::Load(a.clone(), e),
            Frame::LoadArray(i) => Expr::Load(e, val(i.clone())),
            Frame::StoreValue(a, i) => Expr::Store(a.clone(), i.clone(), e),
            Frame::StoreIndex(a, v) => Expr::Store(a.clone(), e, val(v.clone())),
            Frame::StoreArray(i, v) => Expr::Store(e, val(i.clone()), val(v.clone())),
            Frame::PrimRight(op, l) => Expr::Prim(*op, l.clone(), e),
            Frame::PrimLeft(op, r) => Expr::Prim(*op, e, val(r.clone())),
            Frame::AppArg(f) => Expr::App(f.clone(), e),
            Frame::AppFun(a) => Expr::App(e, val(a.clone())),
            Frame::CasNew(l, i, o) => Expr::Cas(l.clone(), i.clone(), o.clone(), e),
            Frame::CasOld(l, i, n) => Expr::Cas(l.clone(), i.clone(), e, val(n.clone())),
            Frame::CasIndex(l, o, n) => Expr::Cas(l.clone(), e, val(o.clone()), val(n.clone())),
            Frame::CasLoc(i, o, n) => Expr::Cas(e, val(i.clone()), val(o.clone()), val(n.clone())),
            Frame::PairRight(l) => Expr::MkPair(l.clone(), e),
            Frame::PairLeft(r) => Expr::MkPair(e, val(r.clone())),
        })
    }
}

/// Evaluation context, outermost frame first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EvalCtx {
    pub frames: Vec<Frame>,
}

impl EvalCtx {
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

pub fn fill(k: &EvalCtx, e: Term) -> Term {
    k.frames.iter().rev().fold(e, |acc, frame| frame.plug(acc))
}

/// The single frame through which evaluation descends from `e`, with the
/// subterm in its hole, or `None` if `e` itself is the redex (or a value).
fn descend(e: &Expr) -> Option<(Frame, &Term)> {
    fn v(e: &Term) -> Option<&Value> {
        e.as_value()
    }
    match e {
        Expr::Let(x, e1, e2) => v(e1).is_none().then(|| (Frame::Let(x.clone(), e2.clone()), e1)),
        Expr::If(c, t, f) => v(c).is_none().then(|| (Frame::If(t.clone(), f.clone()), c)),
        Expr::Alloc(a) => v(a).is_none().then_some((Frame::Alloc, a)),
        Expr::Length(a) => v(a).is_none().then_some((Frame::Length, a)),
        Expr::Assert(a) => v(a).is_none().then_some((Frame::Assert, a)),
        Expr::Proj(k, a) => v(a).is_none().then_some((Frame::Proj(*k), a)),
        Expr::Load(a, i) => match v(i) {
            None => Some((Frame::LoadIndex(a.clone()), i)),
            Some(iv) => v(a).is_none().then(|| (Frame::LoadArray(iv.clone()), a)),
        },
        Expr::Store(a, i, x) => match (v(x), v(i)) {
            (None, _) => Some((Frame::StoreValue(a.clone(), i.clone()), x)),
            (Some(xv), None) => Some((Frame::StoreIndex(a.clone(), xv.clone()), i)),
            (Some(xv), Some(iv)) => {
                v(a).is_none().then(|| (Frame::StoreArray(iv.clone(), xv.clone()), a))
            }
        },
        Expr::Prim(op, l, r) => match v(r) {
            None => Some((Frame::PrimRight(*op, l.clone()), r)),
            Some(rv) => v(l).is_none().then(|| (Frame::PrimLeft(*op, rv.clone()), l)),
        },
        Expr::App(f, a) => match v(a) {
            None => Some((Frame::AppArg(f.clone()), a)),
            Some(av) => v(f).is_none().then(|| (Frame::AppFun(av.clone()), f)),
        },
        Expr::Cas(l, i, o, n) => match (v(n), v(o), v(i)) {
            (None, _, _) => Some((Frame::CasNew(l.clone(), i.clone(), o.clone()), n)),
            (Some(nv), None, _) => Some((Frame::CasOld(l.clone(), i.clone(), nv.clone()), o)),
            (Some(nv), Some(ov), None) => {
                Some((Frame::CasIndex(l.clone(), ov.clone(), nv.clone()), i))
            }
            (Some(nv), Some(ov), Some(iv)) => v(l)
                .is_none()
                .then(|| (Frame::CasLoc(iv.clone(), ov.clone(), nv.clone()), l)),
        },
        Expr::MkPair(l, r) => match v(r) {
            None => Some((Frame::PairRight(l.clone()), r)),
            Some(rv) => v(l).is_none().then(|| (Frame::PairLeft(rv.clone()), l)),
        },
        Expr::Val(_) | Expr::Var(_) | Expr::Fun(..) | Expr::Par(..) | Expr::RunPar(..) => None,
    }
}

/// Decomposes `e = K[r]` where `r` is a head redex candidate, a `Par`, or a
/// `RunPar` node. Returns `None` iff `e` is a value.
pub fn split_redex(e: &Term) -> Option<(EvalCtx, Term)> {
    if is_value(e) {
        return None;
    }
    let mut frames = Vec::new();
    let mut cur = e;
    while let Some((frame, hole)) = descend(cur) {
        frames.push(frame);
        cur = hole;
    }
    Some((EvalCtx { frames }, cur.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

/// Addresses a task: each element selects a side of the active parallel tuple
/// found at the redex position of the current term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskPath(pub Vec<Side>);

impl TaskPath {
    pub fn root() -> Self {
        TaskPath(Vec::new())
    }

    pub fn child(&self, side: Side) -> Self {
        let mut v = self.0.clone();
        v.push(side);
        TaskPath(v)
    }
}

impl fmt::Display for TaskPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for s in &self.0 {
            f.write_str(match s {
                Side::Left => "L",
                Side::Right => "R",
            })?;
        }
        Ok(())
    }
}

/// Every schedulable task of `e`. A `RunPar` whose sides are both values is
/// itself a task (the join).
pub fn decompose_tasks(e: &Term) -> Vec<(TaskPath, Term)> {
    let mut out = Vec::new();
    collect_tasks(e, TaskPath::root(), &mut out);
    out
}

fn collect_tasks(e: &Term, path: TaskPath, out: &mut Vec<(TaskPath, Term)>) {
    let Some((_, redex)) = split_redex(e) else {
        return;
    };
    match &*redex {
        Expr::RunPar(a, b) if !(is_value(a) && is_value(b)) => {
            if !is_value(a) {
                collect_tasks(a, path.child(Side::Left), out);
            }
            if !is_value(b) {
                collect_tasks(b, path.child(Side::Right), out);
            }
        }
        _ => out.push((path, e.clone())),
    }
}

/// Rewrites the task at `path` with `f`, rebuilding the surrounding contexts
/// and parallel tuples. `None` if the path is invalid or `f` declines.
pub fn rewrite_task(
    e: &Term,
    path: &[Side],
    f: &mut dyn FnMut(&Term) -> Option<Term>,
) -> Option<Term> {
    let Some((side, rest)) = path.split_first() else {
        return f(e);
    };
    let (k, redex) = split_redex(e)?;
    let Expr::RunPar(a, b) = &*redex else {
        return None;
    };
    let rebuilt = match side {
        Side::Left => Expr::RunPar(rewrite_task(a, rest, f)?, b.clone()),
        Side::Right => Expr::RunPar(a.clone(), rewrite_task(b, rest, f)?),
    };
    Some(fill(&k, Term::new(rebuilt)))
}

/// The term addressed by `path`, if the path is valid.
pub fn task_at(e: &Term, path: &[Side]) -> Option<Term> {
    let mut found = None;
    rewrite_task(e, path, &mut |t| {
        found = Some(t.clone());
        None
    });
    found
}
