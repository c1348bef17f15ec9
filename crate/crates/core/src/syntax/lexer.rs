use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use super::span::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Species,
    Inherit,
    Signature,
    Let,
    Rec,
    Logical,
    Final,
    Property,
    Theorem,
    Proof,
    Of,
    Representation,
    Collection,
    Implement,
    Assume,
    Hypothesis,
    Prove,
    Qed,
    By,
    Step,
    Definition,
    Conclude,
    Termination,
    Structural,
    All,
    Ex,
    Not,
    Match,
    With,
    If,
    Then,
    Else,
    End,
    In,
    Is,
    True,
    False,
}

const KEYWORDS: &[(&str, Keyword)] = &[
    ("species", Keyword::Species),
    ("inherit", Keyword::Inherit),
    ("signature", Keyword::Signature),
    ("let", Keyword::Let),
    ("rec", Keyword::Rec),
    ("logical", Keyword::Logical),
    ("final", Keyword::Final),
    ("property", Keyword::Property),
    ("theorem", Keyword::Theorem),
    ("proof", Keyword::Proof),
    ("of", Keyword::Of),
    ("representation", Keyword::Representation),
    ("collection", Keyword::Collection),
    ("implement", Keyword::Implement),
    ("assume", Keyword::Assume),
    ("hypothesis", Keyword::Hypothesis),
    ("prove", Keyword::Prove),
    ("qed", Keyword::Qed),
    ("by", Keyword::By),
    ("step", Keyword::Step),
    ("definition", Keyword::Definition),
    ("conclude", Keyword::Conclude),
    ("termination", Keyword::Termination),
    ("structural", Keyword::Structural),
    ("all", Keyword::All),
    ("ex", Keyword::Ex),
    ("not", Keyword::Not),
    ("match", Keyword::Match),
    ("with", Keyword::With),
    ("if", Keyword::If),
    ("then", Keyword::Then),
    ("else", Keyword::Else),
    ("end", Keyword::End),
    ("in", Keyword::In),
    ("is", Keyword::Is),
    ("true", Keyword::True),
    ("false", Keyword::False),
];

impl Keyword {
    pub fn from_str(s: &str) -> Option<Keyword> {
        KEYWORDS.iter().find(|(k, _)| *k == s).map(|(_, kw)| *kw)
    }

    pub fn as_str(self) -> &'static str {
        KEYWORDS.iter().find(|(_, kw)| *kw == self).map(|(k, _)| *k).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(BigInt),
    /// `<level>id`, e.g. `<3>f`.
    StepLabel(u32, String),
    Kw(Keyword),
    Arrow,
    Iff,
    Wedge,
    Vee,
    AndAnd,
    OrOr,
    ColonColon,
    Bang,
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    SemiSemi,
    Bar,
    Underscore,
    Plus,
    Minus,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Int(n) => return write!(f, "integer `{n}`"),
            TokenKind::StepLabel(level, id) => return write!(f, "step label `<{level}>{id}`"),
            TokenKind::Kw(kw) => return write!(f, "`{}`", kw.as_str()),
            TokenKind::Arrow => "->",
            TokenKind::Iff => "<->",
            TokenKind::Wedge => "/\\",
            TokenKind::Vee => "\\/",
            TokenKind::AndAnd => "&&",
            TokenKind::OrOr => "||",
            TokenKind::ColonColon => "::",
            TokenKind::Bang => "!",
            TokenKind::Eq => "=",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Comma => ",",
            TokenKind::Colon => ":",
            TokenKind::Semi => ";",
            TokenKind::SemiSemi => ";;",
            TokenKind::Bar => "|",
            TokenKind::Underscore => "_",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("illegal character {ch:?}")]
    IllegalCharacter { pos: usize, ch: char },
    #[error("unterminated comment")]
    UnterminatedComment { pos: usize },
}

impl LexError {
    pub fn pos(&self) -> usize {
        match self {
            LexError::IllegalCharacter { pos, .. } | LexError::UnterminatedComment { pos } => *pos,
        }
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'(' && bytes.get(i + 1) == Some(&b'*') {
            i = skip_comment(bytes, i)?;
            continue;
        }
        let start = i;
        let two = |s: &[u8]| bytes[i..].starts_with(s);
        let (kind, len) = if is_ident_start(c) {
            let mut j = i + 1;
            while j < bytes.len() && is_ident_char(bytes[j]) {
                j += 1;
            }
            let word = &source[i..j];
            let kind = if word == "_" {
                TokenKind::Underscore
            } else if let Some(kw) = Keyword::from_str(word) {
                TokenKind::Kw(kw)
            } else {
                TokenKind::Ident(word.to_string())
            };
            (kind, j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let n: BigInt = source[i..j].parse().expect("digits");
            (TokenKind::Int(n), j - i)
        } else if two(b"<->") {
            (TokenKind::Iff, 3)
        } else if c == b'<' {
            match step_label(bytes, i) {
                Some((level, id, len)) => (TokenKind::StepLabel(level, id), len),
                None => return Err(illegal(source, i)),
            }
        } else if two(b"->") {
            (TokenKind::Arrow, 2)
        } else if two(b"/\\") {
            (TokenKind::Wedge, 2)
        } else if two(b"\\/") {
            (TokenKind::Vee, 2)
        } else if two(b"&&") {
            (TokenKind::AndAnd, 2)
        } else if two(b"||") {
            (TokenKind::OrOr, 2)
        } else if two(b"::") {
            (TokenKind::ColonColon, 2)
        } else if two(b";;") {
            (TokenKind::SemiSemi, 2)
        } else {
            let kind = match c {
                b'!' => TokenKind::Bang,
                b'=' => TokenKind::Eq,
                b'(' => TokenKind::LParen,
                b')' => TokenKind::RParen,
                b'[' => TokenKind::LBracket,
                b']' => TokenKind::RBracket,
                b',' => TokenKind::Comma,
                b':' => TokenKind::Colon,
                b';' => TokenKind::Semi,
                b'|' => TokenKind::Bar,
                b'+' => TokenKind::Plus,
                b'-' => TokenKind::Minus,
                _ => return Err(illegal(source, i)),
            };
            (kind, 1)
        };
        i += len;
        tokens.push(Token { kind, span: Span::new(start, i) });
    }
    Ok(tokens)
}

fn illegal(source: &str, pos: usize) -> LexError {
    let ch = source[pos..].chars().next().unwrap_or('\0');
    LexError::IllegalCharacter { pos, ch }
}

fn skip_comment(bytes: &[u8], start: usize) -> Result<usize, LexError> {
    let mut depth = 0usize;
    let mut i = start;
    while i < bytes.len() {
        if bytes[i..].starts_with(b"(*") {
            depth += 1;
            i += 2;
        } else if bytes[i..].starts_with(b"*)") {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Ok(i);
            }
        } else {
            i += 1;
        }
    }
    Err(LexError::UnterminatedComment { pos: start })
}

fn step_label(bytes: &[u8], start: usize) -> Option<(u32, String, usize)> {
    let mut j = start + 1;
    while j < bytes.len() && bytes[j].is_ascii_digit() {
        j += 1;
    }
    if j == start + 1 || bytes.get(j) != Some(&b'>') {
        return None;
    }
    let level: u32 = std::str::from_utf8(&bytes[start + 1..j]).ok()?.parse().ok()?;
    let id_start = j + 1;
    let mut k = id_start;
    while k < bytes.len() && bytes[k].is_ascii_alphanumeric() {
        k += 1;
    }
    if k == id_start {
        return None;
    }
    let id = String::from_utf8(bytes[id_start..k].to_vec()).ok()?;
    Some((level, id, k - start))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
    }

    #[test]
    fn let_equal_line() {
        let toks = kinds("let equal(x, y) = is_contained(x, y) && is_contained(y, x) ;");
        assert_eq!(toks[0], TokenKind::Kw(Keyword::Let));
        assert_eq!(toks[1], TokenKind::Ident("equal".into()));
        assert_eq!(toks[2], TokenKind::LParen);
        assert!(toks.contains(&TokenKind::AndAnd));
        assert_eq!(*toks.last().unwrap(), TokenKind::Semi);
    }

    #[test]
    fn step_labels_and_iff() {
        let toks = kinds("<3>f qed by step <3>1");
        assert_eq!(toks[0], TokenKind::StepLabel(3, "f".into()));
        assert_eq!(toks[4], TokenKind::StepLabel(3, "1".into()));
        assert_eq!(kinds("a <-> b")[1], TokenKind::Iff);
    }

    #[test]
    fn nested_comments_and_crlf() {
        let toks = kinds("a (* x (* y *) z *)\r\n b");
        assert_eq!(toks, vec![TokenKind::Ident("a".into()), TokenKind::Ident("b".into())]);
        assert!(matches!(tokenize("(* open"), Err(LexError::UnterminatedComment { pos: 0 })));
    }

    #[test]
    fn illegal_character_position() {
        assert_eq!(tokenize("a $"), Err(LexError::IllegalCharacter { pos: 2, ch: '$' }));
        assert!(matches!(tokenize("a < b"), Err(LexError::IllegalCharacter { pos: 2, .. })));
    }

    #[test]
    fn spans_cover_tokens() {
        let src = "h::release(t,s)";
        for tok in tokenize(src).unwrap() {
            let text = tok.span.text(src);
            assert_eq!(kinds(text), vec![tok.kind]);
        }
    }
}
