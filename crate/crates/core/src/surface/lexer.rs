use super::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(i64),
    Ident(String),
    Let,
    In,
    Fun,
    Mu,
    If,
    Then,
    Else,
    Par,
    Alloc,
    Length,
    Assert,
    Cas,
    Fst,
    Snd,
    Load,
    Store,
    True,
    False,
    Mod,
    LParen,
    RParen,
    /// `(|`
    ParOpen,
    /// `|)`
    ParClose,
    /// `<|`
    RunOpen,
    /// `|>`
    RunClose,
    Comma,
    Semi,
    Assign,
    EqEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    OrOr,
    AndAnd,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Int(i) => format!("integer {i}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    pub fn spelling(&self) -> &'static str {
        match self {
            Tok::Let => "let",
            Tok::In => "in",
            Tok::Fun => "fun",
            Tok::Mu => "mu",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Par => "par",
            Tok::Alloc => "alloc",
            Tok::Length => "length",
            Tok::Assert => "assert",
            Tok::Cas => "cas",
            Tok::Fst => "fst",
            Tok::Snd => "snd",
            Tok::Load => "load",
            Tok::Store => "store",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Mod => "mod",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::ParOpen => "(|",
            Tok::ParClose => "|)",
            Tok::RunOpen => "<|",
            Tok::RunClose => "|>",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::OrOr => "||",
            Tok::AndAnd => "&&",
            Tok::Arrow => "->",
            Tok::Int(_) | Tok::Ident(_) | Tok::Eof => "",
        }
    }

    /// Tokens after which a `-` is binary subtraction rather than a sign.
    fn ends_operand(&self) -> bool {
        matches!(
            self,
            Tok::Int(_)
                | Tok::Ident(_)
                | Tok::True
                | Tok::False
                | Tok::RParen
                | Tok::ParClose
                | Tok::RunClose
        )
    }
}

pub const KEYWORDS: &[&str] = &[
    "let", "in", "fun", "mu", "if", "then", "else", "par", "alloc", "length", "assert", "cas",
    "fst", "snd", "load", "store", "true", "false", "mod",
];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "let" => Tok::Let,
        "in" => Tok::In,
        "fun" => Tok::Fun,
        "mu" => Tok::Mu,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "par" => Tok::Par,
        "alloc" => Tok::Alloc,
        "length" => Tok::Length,
        "assert" => Tok::Assert,
        "cas" => Tok::Cas,
        "fst" => Tok::Fst,
        "snd" => Tok::Snd,
        "load" => Tok::Load,
        "store" => Tok::Store,
        "true" => Tok::True,
        "false" => Tok::False,
        "mod" => Tok::Mod,
        _ => return None,
    })
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out: Vec<(Tok, Pos)> = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let signed = c == '-'
            && next.is_some_and(|d| d.is_ascii_digit())
            && !out.last().is_some_and(|(t, _)| t.ends_operand());
        if c.is_ascii_digit() || signed {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<i64>().map_err(|_| ParseError {
                pos,
                kind: ParseErrorKind::IntOverflow,
                expected: vec![],
                message: format!("integer literal `{text}` does not fit in 64 bits"),
            })?;
            col += i - start;
            out.push((Tok::Int(value), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((keyword(&word).unwrap_or(Tok::Ident(word)), pos));
            continue;
        }
        let two = next.map(|n| (c, n));
        let (tok, width) = match two {
            Some(('(', '|')) => (Tok::ParOpen, 2),
            Some(('|', ')')) => (Tok::ParClose, 2),
            Some(('<', '|')) => (Tok::RunOpen, 2),
            Some(('|', '>')) => (Tok::RunClose, 2),
            Some(('|', '|')) => (Tok::OrOr, 2),
            Some(('&', '&')) => (Tok::AndAnd, 2),
            Some(('=', '=')) => (Tok::EqEq, 2),
            Some(('<', '=')) => (Tok::Le, 2),
            Some(('>', '=')) => (Tok::Ge, 2),
            Some(('-', '>')) => (Tok::Arrow, 2),
            _ => match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                ';' => (Tok::Semi, 1),
                '=' => (Tok::Assign, 1),
                '<' => (Tok::Lt, 1),
                '>' => (Tok::Gt, 1),
                '+' => (Tok::Plus, 1),
                '-' => (Tok::Minus, 1),
                '*' => (Tok::Star, 1),
                '/' => (Tok::Slash, 1),
                _ => {
                    return Err(ParseError {
                        pos,
                        kind: ParseErrorKind::Syntax,
                        expected: vec![],
                        message: format!("unexpected character `{c}`"),
                    })
                }
            },
        };
        i += width;
        col += width;
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}
