//! Tokens shared by both surface syntaxes. Unicode forms (∃ ∀ ∧ ∨ ¬ → · ≤ ≥ ≠ p̂)
//! are accepted as synonyms of the ASCII keywords.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Exists,
    Forall,
    And,
    Or,
    Not,
    True,
    False,
    Plus,
    PHat,
    P,
    Nu,
    Res,
    Inf,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Add,
    Minus,
    Star,
    Caret,
    Bar,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Arrow,
    End,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "exists" => Tok::Exists,
        "forall" => Tok::Forall,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "true" => Tok::True,
        "false" => Tok::False,
        "plus" => Tok::Plus,
        "phat" => Tok::PHat,
        "p" => Tok::P,
        "nu" => Tok::Nu,
        "res" => Tok::Res,
        "inf" => Tok::Inf,
        _ => return None,
    })
}

pub fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: l0, col: c0 });
            *i += width;
            *col += width;
        };
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                if word == "p" && chars.get(i) == Some(&'\u{302}') {
                    i += 1;
                    col += 1;
                    out.push(Token { tok: Tok::PHat, line: l0, col: c0 });
                    continue;
                }
                let tok = keyword(&word).unwrap_or(Tok::Ident(word));
                out.push(Token { tok, line: l0, col: c0 });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                col += i - start;
                out.push(Token { tok: Tok::Int(chars[start..i].iter().collect()), line: l0, col: c0 });
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '+' => push(Tok::Add, 1, &mut i, &mut col),
            '*' | '·' => push(Tok::Star, 1, &mut i, &mut col),
            '^' => push(Tok::Caret, 1, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '!' if next == Some('=') => push(Tok::Ne, 2, &mut i, &mut col),
            '<' if next == Some('=') => push(Tok::Le, 2, &mut i, &mut col),
            '<' => push(Tok::Lt, 1, &mut i, &mut col),
            '>' if next == Some('=') => push(Tok::Ge, 2, &mut i, &mut col),
            '>' => push(Tok::Gt, 1, &mut i, &mut col),
            '∃' => push(Tok::Exists, 1, &mut i, &mut col),
            '∀' => push(Tok::Forall, 1, &mut i, &mut col),
            '∧' => push(Tok::And, 1, &mut i, &mut col),
            '∨' => push(Tok::Or, 1, &mut i, &mut col),
            '¬' => push(Tok::Not, 1, &mut i, &mut col),
            '→' => push(Tok::Arrow, 1, &mut i, &mut col),
            '≤' => push(Tok::Le, 1, &mut i, &mut col),
            '≥' => push(Tok::Ge, 1, &mut i, &mut col),
            '≠' => push(Tok::Ne, 1, &mut i, &mut col),
            '∞' => push(Tok::Inf, 1, &mut i, &mut col),
            'ν' => push(Tok::Nu, 1, &mut i, &mut col),
            other => {
                return Err(Error::Syntax { line, col, message: format!("unexpected character {other:?}") });
            }
        }
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}
