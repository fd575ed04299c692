//! An algorithmic checker for MiniDet, the affine determinism type system,
//! extended with priority references, integer arrays, hash sets, and
//! `parfor`.
//!
//! The checker threads an environment through a right-to-left traversal that
//! mirrors evaluation order. It is sound with respect to the declarative
//! rules but not complete: parallel branches split the environment by free
//! variables, phase changes happen only where a rule asks for them, and
//! library operations are recognized by structural equality with the linked
//! corpus definitions.

mod check;
mod types;

use serde_json::{json, Value as Json};

use crate::lang::{Name, Term};

pub use types::{
    duplicable, env_combine, full, phase_update, type_combine, Frac, Type, TypeEnv,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeErrorKind {
    #[error("`{variable}` : {ty} is needed by both parallel branches and cannot be split")]
    UnsplittableSharing { variable: Name, ty: Type },
    #[error("`{variable}` : {found} cannot switch to its {needed} phase without the full fraction")]
    PhaseViolation { variable: Name, needed: &'static str, found: Type },
    #[error("closure captures non-duplicable {}", names(.variables))]
    NotDuplicableClosure { variables: Vec<Name> },
    #[error("expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("unbound variable `{variable}`")]
    UnboundVariable { variable: Name },
    #[error("`{variable}` has an invalid combined type")]
    BotCombination { variable: Name },
    /// A position whose side condition cannot be checked syntactically
    /// holds something other than a trusted corpus definition.
    #[error("{role} `{head}` is not a trusted corpus definition")]
    UntrustedHead { role: &'static str, head: String },
    #[error("{construct} has no typing rule")]
    Unsupported { construct: String },
}

fn names(xs: &[Name]) -> String {
    xs.iter().map(|x| format!("`{x}`")).collect::<Vec<_>>().join(", ")
}

impl TypeErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            TypeErrorKind::UnsplittableSharing { .. } => "UnsplittableSharing",
            TypeErrorKind::PhaseViolation { .. } => "PhaseViolation",
            TypeErrorKind::NotDuplicableClosure { .. } => "NotDuplicableClosure",
            TypeErrorKind::Mismatch { .. } => "Mismatch",
            TypeErrorKind::UnboundVariable { .. } => "UnboundVariable",
            TypeErrorKind::BotCombination { .. } => "BotCombination",
            TypeErrorKind::UntrustedHead { .. } => "UntrustedHead",
            TypeErrorKind::Unsupported { .. } => "Unsupported",
        }
    }

    /// The offending variable, when the error is about one.
    pub fn variable(&self) -> Option<&Name> {
        match self {
            TypeErrorKind::UnsplittableSharing { variable, .. }
            | TypeErrorKind::PhaseViolation { variable, .. }
            | TypeErrorKind::UnboundVariable { variable }
            | TypeErrorKind::BotCombination { variable } => Some(variable),
            TypeErrorKind::NotDuplicableClosure { variables } => variables.first(),
            _ => None,
        }
    }
}

/// A rule failure together with the subterm being checked. Terms carry no
/// source positions, so the subterm (with library definitions shown by
/// name) locates the error.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind}\n  in: {subterm}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub subterm: String,
}

impl TypeError {
    pub fn to_json(&self) -> Json {
        json!({
            "kind": self.kind.name(),
            "variable": self.kind.variable().map(|x| x.as_str()),
            "position": Json::Null,
            "subterm": self.subterm,
            "message": self.kind.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedVerdict {
    WellTyped(Type),
    Rejected(TypeError),
}

impl ClosedVerdict {
    pub fn is_well_typed(&self) -> bool {
        matches!(self, ClosedVerdict::WellTyped(_))
    }

    pub fn to_json(&self) -> Json {
        match self {
            ClosedVerdict::WellTyped(t) => {
                json!({ "verdict": "WellTyped", "type": t.to_string(), "error": Json::Null })
            }
            ClosedVerdict::Rejected(e) => {
                json!({ "verdict": "Rejected", "type": Json::Null, "error": e.to_json() })
            }
        }
    }
}

/// `Γ ⊢ e : τ ⊣ Γ'`. Library names in `e` must already be linked.
pub fn check(env: &TypeEnv, e: &Term) -> Result<(Type, TypeEnv), TypeError> {
    check::Checker::new().check(env.clone(), e)
}

/// `∅ ⊢ e : τ ⊣ ∅`, weakening the residual environment away.
pub fn check_program(e: &Term) -> ClosedVerdict {
    match check(&TypeEnv::new(), e) {
        Ok((t, _)) if !t.contains_bot() => ClosedVerdict::WellTyped(t),
        Ok((t, _)) => ClosedVerdict::Rejected(TypeError {
            kind: TypeErrorKind::Mismatch { expected: "a valid type".into(), found: t.to_string() },
            subterm: check::show(e),
        }),
        Err(err) => ClosedVerdict::Rejected(err),
    }
}
