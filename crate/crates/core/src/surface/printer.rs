use std::fmt::Write;

use crate::lang::{Expr, Name, PrimOp, ProjIndex, Value};

// Precedence levels, loosest first.
const EXPR: u8 = 0;
const SEQ: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const CMP: u8 = 4;
const ADD: u8 = 5;
const MUL: u8 = 6;
const APP: u8 = 7;
const ATOM: u8 = 8;

fn op_level(op: PrimOp) -> u8 {
    match op {
        PrimOp::Or => OR,
        PrimOp::And => AND,
        PrimOp::Eq | PrimOp::Lt | PrimOp::Le | PrimOp::Gt | PrimOp::Ge => CMP,
        PrimOp::Add | PrimOp::Sub => ADD,
        PrimOp::Mul | PrimOp::Div | PrimOp::Mod => MUL,
    }
}

/// `Par(f (), g ())` prints as the closure-calling sugar `par f g`.
fn par_sugar(e: &Expr) -> Option<(&Expr, &Expr)> {
    let Expr::Par(a, b) = e else { return None };
    match (&**a, &**b) {
        (Expr::App(f, u1), Expr::App(g, u2))
            if u1.as_value() == Some(&Value::Unit) && u2.as_value() == Some(&Value::Unit) =>
        {
            Some((f, g))
        }
        _ => None,
    }
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Let(x, ..) if x.is_anon() => SEQ,
        Expr::Let(..) | Expr::Fun(..) | Expr::If(..) => EXPR,
        Expr::Prim(op, ..) => op_level(*op),
        Expr::App(..)
        | Expr::Proj(..)
        | Expr::Assert(..)
        | Expr::Alloc(..)
        | Expr::Load(..)
        | Expr::Store(..)
        | Expr::Length(..)
        | Expr::Cas(..) => APP,
        Expr::Par(..) if par_sugar(e).is_some() => APP,
        Expr::Val(Value::Int(i)) if *i < 0 => ATOM,
        Expr::Val(Value::RecFun(..)) => ATOM,
        Expr::Val(_) | Expr::Var(_) | Expr::MkPair(..) | Expr::Par(..) | Expr::RunPar(..) => ATOM,
    }
}

pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    go(e, EXPR, &mut out);
    out
}

fn go(e: &Expr, need: u8, out: &mut String) {
    if level(e) < need {
        out.push('(');
        go(e, EXPR, out);
        out.push(')');
        return;
    }
    match e {
        Expr::Val(v) => value(v, out),
        Expr::Var(x) => out.push_str(x.as_str()),
        Expr::Let(x, e1, e2) if x.is_anon() => {
            go(e1, OR, out);
            out.push_str("; ");
            go(e2, EXPR, out);
        }
        Expr::Let(x, e1, e2) => {
            let _ = write!(out, "let {x} = ");
            go(e1, EXPR, out);
            out.push_str(" in ");
            go(e2, EXPR, out);
        }
        Expr::If(c, t, f) => {
            out.push_str("if ");
            go(c, EXPR, out);
            out.push_str(" then ");
            go(t, EXPR, out);
            out.push_str(" else ");
            go(f, EXPR, out);
        }
        Expr::Fun(f, x, body) => function(f, x, body, out),
        Expr::App(f, a) => {
            go(f, APP, out);
            out.push(' ');
            go(a, ATOM, out);
        }
        Expr::Prim(op, a, b) => {
            let l = op_level(*op);
            let (left, right) = if l == CMP { (ADD, ADD) } else { (l, l + 1) };
            go(a, left, out);
            let _ = write!(out, " {} ", op.symbol());
            go(b, right, out);
        }
        Expr::MkPair(a, b) => {
            out.push('(');
            go(a, EXPR, out);
            out.push_str(", ");
            go(b, EXPR, out);
            out.push(')');
        }
        Expr::Proj(k, a) => keyword(
            match k {
                ProjIndex::Fst => "fst",
                ProjIndex::Snd => "snd",
            },
            &[a],
            out,
        ),
        Expr::Assert(a) => keyword("assert", &[a], out),
        Expr::Alloc(a) => keyword("alloc", &[a], out),
        Expr::Length(a) => keyword("length", &[a], out),
        Expr::Load(a, i) => keyword("load", &[a, i], out),
        Expr::Store(a, i, v) => keyword("store", &[a, i, v], out),
        Expr::Cas(l, i, o, n) => keyword("cas", &[l, i, o, n], out),
        Expr::Par(a, b) => match par_sugar(e) {
            Some((f, g)) => keyword("par", &[f, g], out),
            None => bracket("(|", a, b, "|)", out),
        },
        Expr::RunPar(a, b) => bracket("<|", a, b, "|>", out),
    }
}

fn keyword(word: &str, args: &[&Expr], out: &mut String) {
    out.push_str(word);
    for a in args {
        out.push(' ');
        go(a, ATOM, out);
    }
}

fn bracket(open: &str, a: &Expr, b: &Expr, close: &str, out: &mut String) {
    let _ = write!(out, "{open} ");
    go(a, EXPR, out);
    out.push_str(" , ");
    go(b, EXPR, out);
    let _ = write!(out, " {close}");
}

fn function(f: &Name, x: &Name, body: &Expr, out: &mut String) {
    if f.is_anon() {
        out.push_str("fun");
    } else {
        let _ = write!(out, "mu {f}");
    }
    let _ = write!(out, " {x}");
    let mut body = body;
    while let Expr::Fun(g, y, inner) = body {
        if !g.is_anon() {
            break;
        }
        let _ = write!(out, " {y}");
        body = inner;
    }
    out.push_str(" -> ");
    go(body, EXPR, out);
}

fn value(v: &Value, out: &mut String) {
    match v {
        Value::Unit => out.push_str("()"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) if *i < 0 => {
            let _ = write!(out, "({i})");
        }
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Loc(l) => {
            let _ = write!(out, "{l}");
        }
        Value::Pair(a, b) => {
            out.push('(');
            value(a, out);
            out.push_str(", ");
            value(b, out);
            out.push(')');
        }
        Value::RecFun(f, x, body) => {
            out.push('(');
            function(f, x, body, out);
            out.push(')');
        }
    }
}
