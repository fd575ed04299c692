//! The program corpus: library definitions and example programs shipped as
//! `.mdl` sources with a TOML manifest, a linker that closes programs over
//! the library, and meta-level oracles.

mod oracle;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::lang::{build, subst, Expr, Name, Term, Value};
use crate::surface::{self, ParseError};

pub use oracle::{
    compact, oracle_dedup, oracle_max, oracle_sequential_hashset, HashFn, OracleError, Slot,
};

macro_rules! corpus_files {
    ($($file:literal),* $(,)?) => {
        &[$(($file, include_str!(concat!("../../corpus/", $file)))),*]
    };
}

/// Every corpus source, by file name.
pub const FILES: &[(&str, &str)] = corpus_files![
    "ref.mdl",
    "get.mdl",
    "set.mdl",
    "aadd.mdl",
    "palloc.mdl",
    "pread.mdl",
    "pwrite.mdl",
    "fill.mdl",
    "alloc_fill.mdl",
    "hashset_init.mdl",
    "filter_compact.mdl",
    "hashset_add.mdl",
    "hashset_elems.mdl",
    "parfor.mdl",
    "h0.mdl",
    "h1.mdl",
    "dedup.mdl",
    "dumas.mdl",
    "unsafe.mdl",
    "pwrite_phases.mdl",
    "pwrite_pread_race.mdl",
    "hashset_demo.mdl",
    "dedup_demo.mdl",
];

pub const MANIFEST: &str = include_str!("../../corpus/manifest.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct Manifest {
    pub library: Vec<LibraryEntry>,
    pub program: Vec<ProgramEntry>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct LibraryEntry {
    pub name: String,
    pub file: String,
    /// The corpus entry this definition belongs to, when it differs from
    /// `name`.
    pub corpus: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ProgramEntry {
    pub name: String,
    pub file: String,
    pub arg: Option<i64>,
    pub typecheck: TypecheckExpectation,
    #[serde(rename = "type")]
    pub ty: Option<String>,
    pub error: Option<String>,
    pub sisafety: String,
    pub result: Option<String>,
    pub basis: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypecheckExpectation {
    WellTyped,
    Rejected,
}

#[derive(Debug, thiserror::Error)]
pub enum DetlibError {
    #[error("unknown corpus entry `{0}`")]
    UnknownEntry(String),
    #[error("unknown corpus file `{0}`")]
    UnknownFile(String),
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error("unbound identifiers after linking: {0}")]
    Unbound(String),
}

pub fn manifest() -> &'static Manifest {
    static M: OnceLock<Manifest> = OnceLock::new();
    M.get_or_init(|| toml::from_str(MANIFEST).expect("corpus manifest is valid"))
}

pub fn source(file: &str) -> Result<&'static str, DetlibError> {
    FILES
        .iter()
        .find(|(f, _)| *f == file)
        .map(|(_, text)| *text)
        .ok_or_else(|| DetlibError::UnknownFile(file.to_string()))
}

/// The library definitions as closed function values.
pub struct Library {
    defs: Vec<(Name, Value)>,
    names: HashMap<Value, Name>,
}

impl Library {
    fn build(m: &Manifest) -> Library {
        let mut lib = Library { defs: Vec::new(), names: HashMap::new() };
        for entry in &m.library {
            let text = source(&entry.file).expect("manifest files are embedded");
            let e = surface::parse_str(text)
                .unwrap_or_else(|err| panic!("{}: {err}", entry.file));
            let closed = lib.link(&e);
            let Expr::Fun(f, x, body) = &*closed else {
                panic!("{} must define a function", entry.file)
            };
            let v = Value::RecFun(f.clone(), x.clone(), body.clone());
            lib.names.insert(v.clone(), Name::new(&entry.name));
            lib.defs.push((Name::new(&entry.name), v));
        }
        lib
    }

    /// Substitutes every library definition for its free name in `e`.
    pub fn link(&self, e: &Term) -> Term {
        let free = e.free_vars();
        self.defs
            .iter()
            .filter(|(name, _)| free.contains(name))
            .fold(e.clone(), |acc, (name, v)| subst(name, v, &acc))
    }

    pub fn value(&self, name: &str) -> Option<&Value> {
        self.defs.iter().find(|(n, _)| n.as_str() == name).map(|(_, v)| v)
    }

    /// The library name of a linked function value, if it is one.
    pub fn name_of(&self, v: &Value) -> Option<&str> {
        self.names.get(v).map(|n| n.as_str())
    }

    /// `e` with every linked library value shown as its name again.
    pub fn unlink(&self, e: &Term) -> Term {
        if let Expr::Val(v) = &**e {
            if let Some(name) = self.name_of(v) {
                return build::var(name);
            }
        }
        let children = e.children();
        if children.is_empty() {
            return e.clone();
        }
        Term::new(e.with_children(children.into_iter().map(|c| self.unlink(c)).collect()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|(n, _)| n.as_str())
    }
}

pub fn library() -> &'static Library {
    static L: OnceLock<Library> = OnceLock::new();
    L.get_or_init(|| Library::build(manifest()))
}

/// Links `e` against the library and checks that the result is closed.
pub fn link_closed(e: &Term) -> Result<Term, DetlibError> {
    let linked = library().link(e);
    let free = linked.free_vars();
    if free.is_empty() {
        Ok(linked)
    } else {
        let names: Vec<_> = free.iter().map(|n| n.as_str()).collect();
        Err(DetlibError::Unbound(names.join(", ")))
    }
}

/// `e n`, for parameterized programs.
pub fn apply_arg(e: Term, arg: Option<i64>) -> Term {
    match arg {
        Some(n) => build::app(e, build::int(n)),
        None => e,
    }
}

/// Parses, parameterizes, and links a corpus program file.
pub fn load_program(file: &str, arg: Option<i64>) -> Result<Term, DetlibError> {
    let text = source(file)?;
    let e = surface::parse_str(text)
        .map_err(|source| DetlibError::Parse { file: file.to_string(), source })?;
    link_closed(&apply_arg(e, arg))
}

/// The closed term for a corpus entry: a library function, the triple of
/// reference operations for `ref_ops`, or a whole program.
pub fn corpus(name: &str) -> Result<Term, DetlibError> {
    let lib = library();
    if name == "ref_ops" {
        let v = |n| lib.value(n).expect("reference operations are defined").clone();
        return Ok(build::val(Value::pair(v("ref"), Value::pair(v("get"), v("set")))));
    }
    let m = manifest();
    if let Some(entry) = m
        .library
        .iter()
        .find(|l| l.corpus.as_deref() == Some(name) || (l.corpus.is_none() && l.name == name))
    {
        return Ok(build::val(lib.value(&entry.name).expect("built").clone()));
    }
    match m.program.iter().find(|p| p.name == name) {
        Some(p) => load_program(&p.file, p.arg),
        None => {
            let unparameterized = format!("{name}.mdl");
            if FILES.iter().any(|(f, _)| *f == unparameterized) {
                return load_program(&unparameterized, None);
            }
            Err(DetlibError::UnknownEntry(name.to_string()))
        }
    }
}

/// The entry names accepted by [`corpus`].
pub const ENTRY_NAMES: &[&str] = &[
    "ref_ops",
    "aadd",
    "dumas",
    "unsafe",
    "palloc",
    "pwrite",
    "pread",
    "fill",
    "alloc_fill",
    "hashset_init",
    "hashset_add",
    "hashset_elems",
    "filter_compact",
    "parfor",
    "dedup",
];
