//! Types, the type monoid, typing environments, and the phase update
//! relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;

use crate::lang::Name;

/// A fractional permission in (0, 1].
pub type Frac = Ratio<u64>;

pub fn full() -> Frac {
    Frac::from_integer(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Bot,
    Empty,
    Unit,
    Bool,
    Int,
    Arrow(Box<Type>, Box<Type>),
    Prod(Box<Type>, Box<Type>),
    Ref(Box<Type>),
    PWrite(Frac),
    PRead(Frac),
    IntArray(Frac),
    IntSet(Frac),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn reference(t: Type) -> Type {
        Type::Ref(Box::new(t))
    }

    /// `τ · τ = τ`: a binding of this type can be shared freely.
    pub fn is_idempotent(&self) -> bool {
        *self != Type::Bot && type_combine(self, self) == *self
    }

    pub fn fraction(&self) -> Option<Frac> {
        match self {
            Type::PWrite(q) | Type::PRead(q) | Type::IntArray(q) | Type::IntSet(q) => Some(*q),
            _ => None,
        }
    }

    fn with_fraction(&self, q: Frac) -> Type {
        match self {
            Type::PWrite(_) => Type::PWrite(q),
            Type::PRead(_) => Type::PRead(q),
            Type::IntArray(_) => Type::IntArray(q),
            Type::IntSet(_) => Type::IntSet(q),
            t => t.clone(),
        }
    }

    /// Multiplies every fraction in `self` by `k`.
    pub fn scale(&self, k: Frac) -> Type {
        match self {
            Type::Prod(a, b) => Type::prod(a.scale(k), b.scale(k)),
            t => match t.fraction() {
                Some(q) => t.with_fraction(q * k),
                None => t.clone(),
            },
        }
    }

    /// Splits `self` into two parts that combine back to it, halving
    /// fractions and duplicating idempotent parts.
    pub fn split(&self) -> Option<(Type, Type)> {
        if self.is_idempotent() {
            return Some((self.clone(), self.clone()));
        }
        match self {
            Type::Prod(a, b) => {
                let (a1, a2) = a.split()?;
                let (b1, b2) = b.split()?;
                Some((Type::prod(a1, b1), Type::prod(a2, b2)))
            }
            t => {
                let half = t.fraction()? / 2;
                Some((t.with_fraction(half), t.with_fraction(half)))
            }
        }
    }

    /// Idempotent or built from fraction-indexed parts, so it has an n-th
    /// share for every n.
    pub fn is_fractional(&self) -> bool {
        match self {
            Type::Prod(a, b) => a.is_fractional() && b.is_fractional(),
            t => t.is_idempotent() || t.fraction().is_some(),
        }
    }

    pub fn contains_bot(&self) -> bool {
        match self {
            Type::Bot => true,
            Type::Arrow(a, b) | Type::Prod(a, b) => a.contains_bot() || b.contains_bot(),
            Type::Ref(t) => t.contains_bot(),
            _ => false,
        }
    }
}

fn sum(q1: Frac, q2: Frac) -> Option<Frac> {
    let q = q1 + q2;
    (q <= full()).then_some(q)
}

/// The type monoid. Every combination not listed is `Bot`.
pub fn type_combine(a: &Type, b: &Type) -> Type {
    use Type::*;
    let frac = |ctor: fn(Frac) -> Type, q1, q2| sum(q1, q2).map_or(Bot, ctor);
    match (a, b) {
        (Empty, Empty) => Empty,
        (Unit, Unit) => Unit,
        (Bool, Bool) => Bool,
        (Int, Int) => Int,
        (Arrow(..), Arrow(..)) if a == b => a.clone(),
        (Prod(a1, a2), Prod(b1, b2)) => {
            let (c1, c2) = (type_combine(a1, b1), type_combine(a2, b2));
            if c1 == Bot || c2 == Bot {
                Bot
            } else {
                Type::prod(c1, c2)
            }
        }
        (PWrite(q1), PWrite(q2)) => frac(PWrite, *q1, *q2),
        (PRead(q1), PRead(q2)) => frac(PRead, *q1, *q2),
        (IntArray(q1), IntArray(q2)) => frac(IntArray, *q1, *q2),
        (IntSet(q1), IntSet(q2)) => frac(IntSet, *q1, *q2),
        _ => Bot,
    }
}

/// One step of the update relation and its reflexive-transitive closure:
/// a full read permission and a full write permission convert into each
/// other, pointwise through products.
pub fn phase_update(t: &Type) -> BTreeSet<Type> {
    match t {
        Type::PRead(q) | Type::PWrite(q) if *q == full() => {
            [Type::PRead(full()), Type::PWrite(full())].into_iter().collect()
        }
        Type::Prod(a, b) => {
            let (us, vs) = (phase_update(a), phase_update(b));
            us.iter()
                .flat_map(|u| vs.iter().map(move |v| Type::prod(u.clone(), v.clone())))
                .collect()
        }
        t => BTreeSet::from([t.clone()]),
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Arrows bind loosest, then products, then the prefix constructors.
        fn go(t: &Type, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let need = match t {
                Type::Arrow(..) => 0,
                Type::Prod(..) => 1,
                Type::Ref(_) | Type::PWrite(_) | Type::PRead(_) | Type::IntArray(_) | Type::IntSet(_) => 2,
                _ => 3,
            };
            if need < level {
                f.write_str("(")?;
            }
            match t {
                Type::Bot => f.write_str("bot")?,
                Type::Empty => f.write_str("empty")?,
                Type::Unit => f.write_str("unit")?,
                Type::Bool => f.write_str("bool")?,
                Type::Int => f.write_str("int")?,
                Type::Arrow(a, b) => {
                    go(a, 1, f)?;
                    f.write_str(" -> ")?;
                    go(b, 0, f)?;
                }
                Type::Prod(a, b) => {
                    go(a, 2, f)?;
                    f.write_str(" * ")?;
                    go(b, 1, f)?;
                }
                Type::Ref(t) => {
                    f.write_str("ref ")?;
                    go(t, 3, f)?;
                }
                Type::PWrite(q) => write!(f, "pwrite {q}")?,
                Type::PRead(q) => write!(f, "pread {q}")?,
                Type::IntArray(q) => write!(f, "intarray {q}")?,
                Type::IntSet(q) => write!(f, "intset {q}")?,
            }
            if need < level {
                f.write_str(")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// A typing environment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv(pub BTreeMap<Name, Type>);

impl TypeEnv {
    pub fn new() -> Self {
        TypeEnv::default()
    }

    pub fn get(&self, x: &Name) -> Option<&Type> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Name, t: Type) -> Option<Type> {
        self.0.insert(x, t)
    }

    pub fn remove(&mut self, x: &Name) -> Option<Type> {
        self.0.remove(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.0.iter()
    }

    /// The bindings of `self` for the names in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<Name>) -> TypeEnv {
        TypeEnv(self.0.iter().filter(|(x, _)| keep.contains(*x)).map(|(x, t)| (x.clone(), t.clone())).collect())
    }
}

impl<const N: usize> From<[(&str, Type); N]> for TypeEnv {
    fn from(bindings: [(&str, Type); N]) -> Self {
        TypeEnv(bindings.into_iter().map(|(x, t)| (Name::new(x), t)).collect())
    }
}

impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, t)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}: {t}")?;
        }
        f.write_str("}")
    }
}

/// Pointwise combination. A name bound on one side keeps its type; a name
/// bound on both sides gets the combined type, which may be `Bot`.
pub fn env_combine(g1: &TypeEnv, g2: &TypeEnv) -> TypeEnv {
    let mut out = g1.clone();
    for (x, t2) in g2.iter() {
        let t = match g1.get(x) {
            Some(t1) => type_combine(t1, t2),
            None => t2.clone(),
        };
        out.insert(x.clone(), t);
    }
    out
}

/// `Γ = Γ · Γ`.
pub fn duplicable(g: &TypeEnv) -> bool {
    g.iter().all(|(_, t)| t.is_idempotent())
}
