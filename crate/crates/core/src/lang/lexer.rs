//! Tokenizer. Contract annotations live in `/*@ ... @*/` comments; inside
//! them a leading `@` on a line is layout, and `//` comments are allowed.

use std::fmt;

use super::ast::Span;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(i64),
    Ident(String),
    /// `\result`, `\forall`, `\alldifferent`
    Backslash(String),
    AnnotStart,
    AnnotEnd,
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "{v}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Backslash(s) => write!(f, "`\\{s}`"),
            Tok::AnnotStart => f.write_str("`/*@`"),
            Tok::AnnotEnd => f.write_str("`@*/`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// longest first
const PUNCT: &[&str] = &[
    "==>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "(", ")", "{", "}", "[", "]", ";", ",",
    ".", "+", "-", "*", "/", "!", "=", "<", ">",
];

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self, k: usize) -> Option<u8> {
        self.src.get(self.pos + k).copied()
    }

    fn starts(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn bump(&mut self) {
        if self.src[self.pos] == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        self.pos += 1;
    }

    fn span(&self) -> Span {
        Span { line: self.line, col: self.col }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut c = Cursor { src: src.as_bytes(), pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    let mut in_annot = false;
    while let Some(ch) = c.peek(0) {
        let span = c.span();
        if ch.is_ascii_whitespace() || (in_annot && ch == b'@' && !c.starts("@*/")) {
            c.bump();
            continue;
        }
        if c.starts("//") {
            while c.peek(0).is_some_and(|b| b != b'\n') {
                c.bump();
            }
            continue;
        }
        if in_annot && (c.starts("@*/") || c.starts("*/")) {
            let n = if c.starts("@*/") { 3 } else { 2 };
            for _ in 0..n {
                c.bump();
            }
            in_annot = false;
            out.push(Token { tok: Tok::AnnotEnd, span });
            continue;
        }
        if c.starts("/*@") {
            if in_annot {
                return Err(ParseError::new(span, "nested annotation"));
            }
            for _ in 0..3 {
                c.bump();
            }
            in_annot = true;
            out.push(Token { tok: Tok::AnnotStart, span });
            continue;
        }
        if c.starts("/*") {
            c.bump();
            c.bump();
            loop {
                if c.peek(0).is_none() {
                    return Err(ParseError::new(span, "unterminated comment"));
                }
                if c.starts("*/") {
                    c.bump();
                    c.bump();
                    break;
                }
                c.bump();
            }
            continue;
        }
        if ch.is_ascii_digit() {
            let start = c.pos;
            while c.peek(0).is_some_and(|b| b.is_ascii_digit()) {
                c.bump();
            }
            let text = &src[start..c.pos];
            let v = text
                .parse::<i64>()
                .map_err(|_| ParseError::new(span, format!("integer literal {text} out of range")))?;
            out.push(Token { tok: Tok::Int(v), span });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == b'_' || ch == b'\\' {
            let backslash = ch == b'\\';
            if backslash {
                c.bump();
            }
            let start = c.pos;
            while c.peek(0).is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_') {
                c.bump();
            }
            let word = src[start..c.pos].to_string();
            if backslash {
                if word.is_empty() {
                    return Err(ParseError::new(span, "stray `\\`"));
                }
                out.push(Token { tok: Tok::Backslash(word), span });
            } else {
                out.push(Token { tok: Tok::Ident(word), span });
            }
            continue;
        }
        match PUNCT.iter().find(|p| c.starts(p)) {
            Some(p) => {
                for _ in 0..p.len() {
                    c.bump();
                }
                out.push(Token { tok: Tok::Punct(p), span });
            }
            None => {
                let shown = src[c.pos..].chars().next().unwrap_or('?');
                return Err(ParseError::new(span, format!("unexpected character `{shown}`")));
            }
        }
    }
    if in_annot {
        return Err(ParseError::new(c.span(), "unterminated annotation"));
    }
    out.push(Token { tok: Tok::Eof, span: c.span() });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn annotation_layout() {
        let t = toks("/*@ requires x >= 0;\n  @ ensures \\result == x; // note\n  @*/ int");
        assert_eq!(t[0], Tok::AnnotStart);
        assert!(t.contains(&Tok::Backslash("result".into())));
        assert!(t.contains(&Tok::AnnotEnd));
        assert_eq!(t[t.len() - 2], Tok::Ident("int".into()));
    }

    #[test]
    fn plain_comments_skipped() {
        assert_eq!(toks("/** doc */ a // x\n b"), vec![
            Tok::Ident("a".into()),
            Tok::Ident("b".into()),
            Tok::Eof
        ]);
    }

    #[test]
    fn implication_is_one_token() {
        assert_eq!(toks("a ==> b")[1], Tok::Punct("==>"));
    }
}
