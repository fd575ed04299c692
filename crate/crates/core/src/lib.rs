//! A small call-by-value λ-calculus with arrays, compare-and-swap, and
//! structured parallelism, together with:
//!
//! * [`semantics`]: the head and main reduction relations as an enumerable
//!   transition function,
//! * [`explorer`]: exhaustive interleaving exploration deciding safety and
//!   schedule-independent safety,
//! * [`minidet`]: an algorithmic checker for an affine type system whose
//!   well-typed programs are schedule-independent safe,
//! * [`detlib`]: a corpus of deterministic parallel building blocks
//!   (priority writes, a deterministic hash set, `parfor`, `dedup`) and
//!   meta-level oracles for them.

pub mod lang;
pub mod surface;
pub mod semantics;
pub mod explorer;
pub mod detlib;
pub mod minidet;
