
use super::lexer::{tokenize, Tok};
use super::{ParseError, ParseErrorKind, ParseOptions, Pos};
use crate::lang::{build, Expr, Name, PrimOp, ProjIndex, Term};

pub(super) struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    opts: ParseOptions,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub(super) fn new(src: &str, opts: ParseOptions) -> PResult<Self> {
        Ok(Parser { toks: tokenize(src)?, at: 0, opts })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str], what: &str) -> ParseError {
        ParseError {
            pos: self.pos(),
            kind: ParseErrorKind::Syntax,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: format!("expected {what}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            let s = format!("`{}`", tok.spelling());
            Err(self.error(&[&s], &s))
        }
    }

    pub(super) fn program(&mut self) -> PResult<Term> {
        let e = self.expr()?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(&["end of input"], "end of input"));
        }
        Ok(e)
    }

    fn binder(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Name::new(&s))
            }
            _ => Err(self.error(&["identifier", "_"], "a binder")),
        }
    }

    fn expr(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Let => {
                self.bump();
                let x = self.binder()?;
                self.expect(Tok::Assign)?;
                let e1 = self.expr()?;
                self.expect(Tok::In)?;
                let e2 = self.expr()?;
                Ok(Term::new(Expr::Let(x, e1, e2)))
            }
            Tok::Fun => {
                self.bump();
                let params = self.params()?;
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                Ok(curry(Name::anon(), params, body))
            }
            Tok::Mu => {
                self.bump();
                let f = self.binder()?;
                let params = self.params()?;
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                Ok(curry(f, params, body))
            }
            Tok::If => {
                self.bump();
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let t = self.expr()?;
                self.expect(Tok::Else)?;
                let e = self.expr()?;
                Ok(Term::new(Expr::If(c, t, e)))
            }
            _ => self.seq(),
        }
    }

    fn params(&mut self) -> PResult<Vec<Name>> {
        let mut params = vec![self.binder()?];
        while matches!(self.peek(), Tok::Ident(_)) {
            params.push(self.binder()?);
        }
        Ok(params)
    }

    fn seq(&mut self) -> PResult<Term> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Semi {
            self.bump();
            let rhs = self.expr()?;
            return Ok(build::seq(lhs, rhs));
        }
        Ok(lhs)
    }

    fn left_assoc(
        &mut self,
        ops: &[(Tok, PrimOp)],
        next: fn(&mut Self) -> PResult<Term>,
    ) -> PResult<Term> {
        let mut lhs = next(self)?;
        while let Some((_, op)) = ops.iter().find(|(t, _)| t == self.peek()) {
            let op = *op;
            self.bump();
            let rhs = next(self)?;
            lhs = build::prim(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Term> {
        self.left_assoc(&[(Tok::OrOr, PrimOp::Or)], Self::and)
    }

    fn and(&mut self) -> PResult<Term> {
        self.left_assoc(&[(Tok::AndAnd, PrimOp::And)], Self::cmp)
    }

    fn cmp_op(tok: &Tok) -> Option<PrimOp> {
        Some(match tok {
            Tok::EqEq => PrimOp::Eq,
            Tok::Lt => PrimOp::Lt,
            Tok::Le => PrimOp::Le,
            Tok::Gt => PrimOp::Gt,
            Tok::Ge => PrimOp::Ge,
            _ => return None,
        })
    }

    fn cmp(&mut self) -> PResult<Term> {
        let lhs = self.add()?;
        let Some(op) = Self::cmp_op(self.peek()) else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.add()?;
        if Self::cmp_op(self.peek()).is_some() {
            let mut err = self.error(&[], "no further comparison");
            err.message = "comparison operators do not chain; add parentheses".to_string();
            return Err(err);
        }
        Ok(build::prim(op, lhs, rhs))
    }

    fn add(&mut self) -> PResult<Term> {
        self.left_assoc(&[(Tok::Plus, PrimOp::Add), (Tok::Minus, PrimOp::Sub)], Self::mul)
    }

    fn mul(&mut self) -> PResult<Term> {
        self.left_assoc(
            &[(Tok::Star, PrimOp::Mul), (Tok::Slash, PrimOp::Div), (Tok::Mod, PrimOp::Mod)],
            Self::app,
        )
    }

    fn starts_atom(tok: &Tok) -> bool {
        matches!(
            tok,
            Tok::Int(_) | Tok::Ident(_) | Tok::True | Tok::False | Tok::LParen | Tok::ParOpen | Tok::RunOpen
        )
    }

    fn atoms<const N: usize>(&mut self) -> PResult<[Term; N]> {
        let mut v = Vec::with_capacity(N);
        for _ in 0..N {
            v.push(self.atom()?);
        }
        Ok(v.try_into().expect("exactly N atoms"))
    }

    fn app(&mut self) -> PResult<Term> {
        let mut head = match self.peek() {
            Tok::Alloc => {
                self.bump();
                let [a] = self.atoms()?;
                build::alloc(a)
            }
            Tok::Length => {
                self.bump();
                let [a] = self.atoms()?;
                build::length(a)
            }
            Tok::Assert => {
                self.bump();
                let [a] = self.atoms()?;
                build::assert(a)
            }
            Tok::Fst | Tok::Snd => {
                let k = if self.bump() == Tok::Fst { ProjIndex::Fst } else { ProjIndex::Snd };
                let [a] = self.atoms()?;
                build::proj(k, a)
            }
            Tok::Load => {
                self.bump();
                let [a, i] = self.atoms()?;
                build::load(a, i)
            }
            Tok::Store => {
                self.bump();
                let [a, i, v] = self.atoms()?;
                build::store(a, i, v)
            }
            Tok::Cas => {
                self.bump();
                let [l, i, o, n] = self.atoms()?;
                build::cas(l, i, o, n)
            }
            Tok::Par => {
                // `par f g` calls the two closures in parallel.
                self.bump();
                let [f, g] = self.atoms()?;
                build::par(build::app(f, build::unit()), build::app(g, build::unit()))
            }
            _ => self.atom()?,
        };
        while Self::starts_atom(self.peek()) {
            let arg = self.atom()?;
            head = build::app(head, arg);
        }
        Ok(head)
    }

    fn atom(&mut self) -> PResult<Term> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(build::int(i))
            }
            Tok::True => {
                self.bump();
                Ok(build::bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(build::bool(false))
            }
            Tok::Ident(s) if s == "_" => Err(ParseError {
                pos,
                kind: ParseErrorKind::Syntax,
                expected: vec!["expression".into()],
                message: "`_` is only allowed as a binder".into(),
            }),
            Tok::Ident(s) => {
                self.bump();
                Ok(build::var(&s))
            }
            Tok::LParen => {
                self.bump();
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(build::unit());
                }
                let mut items = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                let last = items.pop().expect("nonempty");
                Ok(items.into_iter().rev().fold(last, |acc, e| build::pair(e, acc)))
            }
            Tok::ParOpen => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::ParClose)?;
                Ok(build::par(a, b))
            }
            Tok::RunOpen => {
                if !self.opts.allow_run_par {
                    return Err(ParseError {
                        pos,
                        kind: ParseErrorKind::ReservedRunPar,
                        expected: vec![],
                        message: "active parallel tuples `<| .. |>` are runtime-only and cannot appear in source"
                            .into(),
                    });
                }
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::RunClose)?;
                Ok(build::run_par(a, b))
            }
            _ => Err(self.error(&["expression"], "an expression")),
        }
    }
}

/// `μf.λx1. λx2. ... body`: only the outermost function is recursive.
fn curry(f: Name, params: Vec<Name>, body: Term) -> Term {
    params.into_iter().enumerate().rev().fold(body, |acc, (k, x)| {
        let name = if k == 0 { f.clone() } else { Name::anon() };
        Term::new(Expr::Fun(name, x, acc))
    })
}
