use std::fmt;
use std::sync::Arc;

use super::ast::Span;
use super::diagnostic::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Template,
    Problem,
    Provides,
    Properties,
    Requires,
    Check,
    SubsetOf,
    Accepts,
    With,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "template" => Keyword::Template,
            "problem" => Keyword::Problem,
            "provides" => Keyword::Provides,
            "properties" => Keyword::Properties,
            "requires" => Keyword::Requires,
            "check" => Keyword::Check,
            "subsetof" => Keyword::SubsetOf,
            "accepts" => Keyword::Accepts,
            "with" => Keyword::With,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Template => "template",
            Keyword::Problem => "problem",
            Keyword::Provides => "provides",
            Keyword::Properties => "properties",
            Keyword::Requires => "requires",
            Keyword::Check => "check",
            Keyword::SubsetOf => "subsetof",
            Keyword::Accepts => "accepts",
            Keyword::With => "with",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "'{}'", k.as_str()),
            TokenKind::Ident(name) => write!(f, "identifier '{}'", name),
            TokenKind::LParen => f.write_str("'('"),
            TokenKind::RParen => f.write_str("')'"),
            TokenKind::LBrace => f.write_str("'{'"),
            TokenKind::RBrace => f.write_str("'}'"),
            TokenKind::Comma => f.write_str("','"),
            TokenKind::Semi => f.write_str("';'"),
            TokenKind::Dot => f.write_str("'.'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Splits `text` into tokens, dropping whitespace and `//` comments.
/// Illegal characters are reported and skipped so lexing always finishes.
pub fn tokenize(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    tokenize_file("<input>", text)
}

pub fn tokenize_file(file: &str, text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let file: Arc<str> = Arc::from(file);
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut line = 1u32;
    let mut col = 1u32;

    while let Some(&(offset, c)) = chars.peek() {
        let span_at = |len: usize| Span {
            file: file.clone(),
            line,
            col,
            offset,
            len,
        };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '/' && text[offset..].starts_with("//") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let punct = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            ',' => Some(TokenKind::Comma),
            ';' => Some(TokenKind::Semi),
            '.' => Some(TokenKind::Dot),
            _ => None,
        };
        if let Some(kind) = punct {
            tokens.push(Token {
                kind,
                span: span_at(1),
            });
            chars.next();
            col += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = offset;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = i + c.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let word = &text[offset..end];
            let kind = match Keyword::from_word(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            };
            tokens.push(Token {
                kind,
                span: span_at(end - offset),
            });
            col += (end - offset) as u32;
            continue;
        }
        diags.push(Diagnostic::error(
            span_at(c.len_utf8()),
            format!("illegal character '{}' at {}:{}", c, line, col),
        ));
        chars.next();
        col += 1;
    }
    (tokens, diags)
}
