//! Location renaming for memoization and outcome comparison.
//!
//! Locations are numbered by first occurrence: a pre-order walk of the
//! expression (descending into pair components and function bodies), then a
//! breadth-first walk of the store from those roots. Unreachable arrays are
//! dropped.

use std::collections::HashMap;
use std::sync::Arc;

use crate::lang::{Expr, Loc, Term, Value};
use crate::semantics::{Config, Store};

fn rename_value(v: &Value, map: &HashMap<Loc, Loc>) -> Option<Value> {
    match v {
        Value::Loc(l) => {
            let m = map[l];
            (m != *l).then_some(Value::Loc(m))
        }
        Value::Pair(a, b) => {
            let (ra, rb) = (rename_value(a, map), rename_value(b, map));
            if ra.is_none() && rb.is_none() {
                return None;
            }
            Some(Value::Pair(
                ra.map(Arc::new).unwrap_or_else(|| a.clone()),
                rb.map(Arc::new).unwrap_or_else(|| b.clone()),
            ))
        }
        Value::RecFun(f, x, body) => {
            rename_expr(body, map).map(|b| Value::RecFun(f.clone(), x.clone(), b))
        }
        Value::Unit | Value::Bool(_) | Value::Int(_) => None,
    }
}

/// `None` when nothing changes, so unchanged subterms stay shared.
fn rename_expr(e: &Term, map: &HashMap<Loc, Loc>) -> Option<Term> {
    if !e.has_locs() {
        return None;
    }
    if let Expr::Val(v) = &**e {
        return rename_value(v, map).map(|v| Term::new(Expr::Val(v)));
    }
    let children = e.children();
    let renamed: Vec<_> = children.iter().map(|c| rename_expr(c, map)).collect();
    if renamed.iter().all(Option::is_none) {
        return None;
    }
    let new = renamed
        .into_iter()
        .zip(children)
        .map(|(r, c)| r.unwrap_or_else(|| c.clone()))
        .collect();
    Some(Term::new(e.with_children(new)))
}

/// The reachable locations of `c` in canonical order.
fn reachable(c: &Config) -> Vec<Loc> {
    let mut order = c.expr.locs().to_vec();
    let mut next = 0;
    while next < order.len() {
        for v in c.store.get(order[next]).unwrap_or(&[]) {
            v.push_locs(&mut order);
        }
        next += 1;
    }
    order
}

/// The canonical representative of `c`: two configurations that differ only
/// by a permutation of locations (and by unreachable arrays) canonicalize to
/// equal configurations.
pub fn canonicalize(c: &Config) -> Config {
    let order = reachable(c);
    let identity = order.iter().enumerate().all(|(k, l)| l.0 == k as u64);
    if identity && order.len() == c.store.len() {
        return c.clone();
    }
    let map: HashMap<Loc, Loc> =
        order.iter().enumerate().map(|(k, l)| (*l, Loc(k as u64))).collect();
    let mut store = Store::new(c.store.policy());
    for l in &order {
        let Some(arr) = c.store.get(*l) else { continue };
        let arr = arr.iter().map(|v| rename_value(v, &map).unwrap_or_else(|| v.clone())).collect();
        store.insert(map[l], arr);
    }
    let expr = rename_expr(&c.expr, &map).unwrap_or_else(|| c.expr.clone());
    Config { expr, store }
}

/// A final value together with the part of the store it can reach, both
/// renamed canonically.
pub fn canonical_result(v: &Value, store: &Store) -> (Value, Store) {
    let c = canonicalize(&Config { expr: Term::new(Expr::Val(v.clone())), store: store.clone() });
    let Expr::Val(v) = &*c.expr else { unreachable!("renaming preserves values") };
    (v.clone(), c.store)
}
