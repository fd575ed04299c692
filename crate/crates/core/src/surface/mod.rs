//! Concrete text syntax (`.mdl` files): an ML-flavoured grammar with a
//! parser, a precedence-aware printer, and positioned diagnostics.
//!
//! ```text
//! let x = e in e      fun x y -> e      mu f x y -> e      if e then e else e
//! e; e                e || e   e && e   e == e  e < e ...  e + e  e * e  e mod e
//! f a b               alloc a  length a  assert a  fst a  snd a
//! load a i            store a i v        cas a i old new
//! par f g             (calls the closures f and g in parallel)
//! (| e , e |)         (the raw parallel primitive)
//! (), true, 42, (-3), (a, b)             -- comments run to end of line
//! ```

mod lexer;
mod parser;
mod printer;

use std::fmt;

use serde::Serialize;

use crate::lang::{Expr, Term};

pub use lexer::KEYWORDS;
pub use printer::print;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceProgram {
    pub name: String,
    pub text: String,
}

impl SourceProgram {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        SourceProgram { name: name.into(), text: text.into() }
    }
}

/// 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    Syntax,
    IntOverflow,
    ReservedRunPar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
    pub expected: Vec<String>,
    pub message: String,
}

impl ParseError {
    /// Renders the error with the offending source line and a caret.
    pub fn render(&self, src: &SourceProgram) -> String {
        let line = src.text.lines().nth(self.pos.line.saturating_sub(1)).unwrap_or("");
        let caret = " ".repeat(self.pos.column.saturating_sub(1));
        let mut s = format!("{}:{}: {}\n  {line}\n  {caret}^", src.name, self.pos, self.message);
        if !self.expected.is_empty() {
            s.push_str(&format!("\n  expected one of: {}", self.expected.join(", ")));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept the runtime-only `<| a , b |>` form (debugging traces).
    pub allow_run_par: bool,
}

pub fn parse(src: &SourceProgram) -> Result<Term, ParseError> {
    parse_with(&src.text, ParseOptions::default())
}

pub fn parse_str(text: &str) -> Result<Term, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, opts: ParseOptions) -> Result<Term, ParseError> {
    parser::Parser::new(text, opts)?.program()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::build::*;
    use crate::lang::{PrimOp, Value};

    #[test]
    fn assert_literal() {
        assert_eq!(
            parse_str("assert (1 == 1)").unwrap(),
            assert(prim(PrimOp::Eq, int(1), int(1)))
        );
    }

    #[test]
    fn par_sugar_calls_closures() {
        let e = parse_str("par (fun _ -> 1) (fun _ -> 2)").unwrap();
        assert_eq!(
            e,
            par(app(lam("_", int(1)), unit()), app(lam("_", int(2)), unit()))
        );
        assert_eq!(print(&e), "par (fun _ -> 1) (fun _ -> 2)");
    }

    #[test]
    fn missing_let_bound_expression() {
        let err = parse_str("let x = in x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.pos, Pos { line: 1, column: 9 });
        assert!(err.expected.contains(&"expression".to_string()));
    }

    #[test]
    fn run_par_is_reserved() {
        let err = parse_str("<| 1 , 2 |>").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ReservedRunPar);
        let ok = parse_with("<| 1 , 2 |>", ParseOptions { allow_run_par: true }).unwrap();
        assert_eq!(ok, run_par(int(1), int(2)));
    }

    #[test]
    fn print_let_and_precedence() {
        assert_eq!(print(&let_("x", int(1), var("x"))), "let x = 1 in x");
        let e = prim(PrimOp::Add, int(1), prim(PrimOp::Mul, int(2), int(3)));
        assert_eq!(print(&e), "1 + 2 * 3");
        let f = prim(PrimOp::Mul, prim(PrimOp::Add, int(1), int(2)), int(3));
        assert_eq!(print(&f), "(1 + 2) * 3");
        let g = prim(PrimOp::Sub, int(1), prim(PrimOp::Sub, int(2), int(3)));
        assert_eq!(print(&g), "1 - (2 - 3)");
        assert_eq!(parse_str(&print(&g)).unwrap(), g);
    }

    #[test]
    fn application_binds_tighter_than_infix() {
        let e = parse_str("f x + g y z").unwrap();
        assert_eq!(
            e,
            prim(PrimOp::Add, app(var("f"), var("x")), app(app(var("g"), var("y")), var("z")))
        );
    }

    #[test]
    fn sequencing_and_functions() {
        let e = parse_str("mu f x y -> f y x; 3").unwrap();
        let expected = fun(
            "f",
            "x",
            lam("y", seq(app(app(var("f"), var("y")), var("x")), int(3))),
        );
        assert_eq!(e, expected);
        assert_eq!(print(&e), "mu f x y -> f y x; 3");
    }

    #[test]
    fn tuples_nest_to_the_right() {
        let e = parse_str("(1, true, ())").unwrap();
        assert_eq!(e, pair(int(1), pair(bool(true), unit())));
    }

    #[test]
    fn negative_literals_roundtrip() {
        let e = app(var("f"), int(-5));
        assert_eq!(print(&e), "f (-5)");
        assert_eq!(parse_str(&print(&e)).unwrap(), e);
        let m = int(i64::MIN);
        assert_eq!(parse_str(&print(&m)).unwrap(), m);
        assert_eq!(parse_str("3 -1").unwrap(), prim(PrimOp::Sub, int(3), int(1)));
    }

    #[test]
    fn comparisons_do_not_chain() {
        assert!(parse_str("1 < 2 < 3").is_err());
    }

    #[test]
    fn raw_par_and_seq_print_unambiguously() {
        let e = seq(par(int(1), int(2)), if_(bool(true), seq(unit(), unit()), unit()));
        let printed = print(&e);
        assert_eq!(parse_str(&printed).unwrap(), e, "{printed}");
        let nested = seq(if_(bool(true), unit(), unit()), unit());
        assert_eq!(parse_str(&print(&nested)).unwrap(), nested);
        let v = Value::Loc(crate::lang::Loc(3));
        assert_eq!(print(&val(v)), "#3");
    }

    #[test]
    fn render_points_at_column() {
        let src = SourceProgram::new("t.mdl", "let x = in x");
        let err = parse(&src).unwrap_err();
        let text = err.render(&src);
        assert!(text.contains("t.mdl:1:9"), "{text}");
        assert!(text.lines().nth(2).unwrap().ends_with('^'));
    }
}
