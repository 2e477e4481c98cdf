// Copyright 2026 The tpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Tokenizer shared by specification files, type-system description files
//! and extension sub-grammars.

use std::fmt;

use crate::diag::{Code, Diagnostic, FileId, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `NAME#`
    TokenText(String),
    /// `$name`
    Label(String),
    /// `#name`
    HashIdent(String),
    Str(String),
    Colon,
    Semi,
    Pipe,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Star,
    Plus,
    Question,
    Comma,
    Eq,
    Dot,
    DotDot,
    Arrow,
    SubType,
    Lt,
    Gt,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::TokenText(s) => write!(f, "'{s}#'"),
            Tok::Label(s) => write!(f, "label '${s}'"),
            Tok::HashIdent(s) => write!(f, "'#{s}'"),
            Tok::Str(s) => write!(f, "string '{s}'"),
            Tok::Colon => f.write_str("':'"),
            Tok::Semi => f.write_str("';'"),
            Tok::Pipe => f.write_str("'|'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Question => f.write_str("'?'"),
            Tok::Comma => f.write_str("','"),
            Tok::Eq => f.write_str("'='"),
            Tok::Dot => f.write_str("'.'"),
            Tok::DotDot => f.write_str("'..'"),
            Tok::Arrow => f.write_str("'-->'"),
            Tok::SubType => f.write_str("'<:'"),
            Tok::Lt => f.write_str("'<'"),
            Tok::Gt => f.write_str("'>'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes `text`. All lexical errors are collected; on error no token
/// stream is returned.
pub fn tokenize(text: &str, file: FileId) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col, start) = (line, col, i);
        let span_to = |end: usize| Span::new(file, start_line, start_col, (end - start) as u32);

        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            let mut closed = false;
            while i < chars.len() {
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    closed = true;
                    break;
                }
                bump!();
            }
            if !closed {
                errors.push(Diagnostic::error(
                    Code::Syntax,
                    span_to(start + 2),
                    "Unterminated block comment",
                ));
            }
            continue;
        }

        if is_ident_start(c) {
            while i < chars.len() && is_ident_char(chars[i]) {
                bump!();
            }
            let name: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '#' {
                bump!();
                out.push(Token {
                    tok: Tok::TokenText(name),
                    span: span_to(i),
                });
            } else {
                out.push(Token {
                    tok: Tok::Ident(name),
                    span: span_to(i),
                });
            }
            continue;
        }

        if c == '$' || c == '#' {
            bump!();
            if i < chars.len() && is_ident_start(chars[i]) {
                let from = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    bump!();
                }
                let name: String = chars[from..i].iter().collect();
                let tok = if c == '$' {
                    Tok::Label(name)
                } else {
                    Tok::HashIdent(name)
                };
                out.push(Token {
                    tok,
                    span: span_to(i),
                });
            } else {
                errors.push(Diagnostic::error(
                    Code::Syntax,
                    span_to(i),
                    format!("Expected an identifier after '{c}'"),
                ));
            }
            continue;
        }

        if c == '\'' {
            bump!();
            let mut value = String::new();
            let mut closed = false;
            while i < chars.len() {
                let d = chars[i];
                if d == '\'' {
                    bump!();
                    closed = true;
                    break;
                }
                if d == '\n' {
                    break;
                }
                if d == '\\' {
                    bump!();
                    let Some(&e) = chars.get(i) else { break };
                    let decoded = match e {
                        'n' => Some('\n'),
                        't' => Some('\t'),
                        'r' => Some('\r'),
                        '\\' => Some('\\'),
                        '\'' => Some('\''),
                        '"' => Some('"'),
                        _ => None,
                    };
                    match decoded {
                        Some(d) => value.push(d),
                        None => errors.push(Diagnostic::error(
                            Code::Syntax,
                            Span::new(file, line, col - 1, 2),
                            format!("Unknown escape sequence '\\{e}'"),
                        )),
                    }
                    bump!();
                    continue;
                }
                value.push(d);
                bump!();
            }
            if closed {
                out.push(Token {
                    tok: Tok::Str(value),
                    span: span_to(i),
                });
            } else {
                errors.push(Diagnostic::error(
                    Code::Syntax,
                    span_to(i),
                    "Unterminated string literal",
                ));
            }
            continue;
        }

        let next = chars.get(i + 1).copied();
        let next2 = chars.get(i + 2).copied();
        let (tok, width) = match (c, next, next2) {
            ('-', Some('-'), Some('>')) => (Some(Tok::Arrow), 3),
            ('.', Some('.'), _) => (Some(Tok::DotDot), 2),
            ('<', Some(':'), _) => (Some(Tok::SubType), 2),
            (':', _, _) => (Some(Tok::Colon), 1),
            (';', _, _) => (Some(Tok::Semi), 1),
            ('|', _, _) => (Some(Tok::Pipe), 1),
            ('(', _, _) => (Some(Tok::LParen), 1),
            (')', _, _) => (Some(Tok::RParen), 1),
            ('{', _, _) => (Some(Tok::LBrace), 1),
            ('}', _, _) => (Some(Tok::RBrace), 1),
            ('*', _, _) => (Some(Tok::Star), 1),
            ('+', _, _) => (Some(Tok::Plus), 1),
            ('?', _, _) => (Some(Tok::Question), 1),
            (',', _, _) => (Some(Tok::Comma), 1),
            ('=', _, _) => (Some(Tok::Eq), 1),
            ('.', _, _) => (Some(Tok::Dot), 1),
            ('<', _, _) => (Some(Tok::Lt), 1),
            ('>', _, _) => (Some(Tok::Gt), 1),
            _ => (None, 1),
        };
        for _ in 0..width {
            bump!();
        }
        match tok {
            Some(tok) => out.push(Token {
                tok,
                span: span_to(i),
            }),
            None => errors.push(Diagnostic::error(
                Code::Syntax,
                span_to(i),
                format!("Unexpected character {c:?}"),
            )),
        }
    }

    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(file, line, col, 0),
    });
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Read position over a token stream. Extensions receive one of these to
/// parse their own sub-grammars.
pub struct TokenCursor<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> TokenCursor<'a> {
    /// `tokens` must end with [`Tok::Eof`].
    pub fn new(tokens: &'a [Token]) -> Self {
        debug_assert!(matches!(tokens.last(), Some(Token { tok: Tok::Eof, .. })));
        TokenCursor { tokens, pos: 0 }
    }

    pub fn peek(&self) -> &'a Token {
        self.peek_at(0)
    }

    pub fn peek_at(&self, ahead: usize) -> &'a Token {
        let idx = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[idx]
    }

    pub fn bump(&mut self) -> &'a Token {
        let t = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn at(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    pub fn at_eof(&self) -> bool {
        self.at(&Tok::Eof)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Span, Diagnostic> {
        if self.at(tok) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Span), Diagnostic> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub fn expect_string(&mut self) -> Result<(String, Span), Diagnostic> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => Err(self.unexpected("a string literal")),
        }
    }

    pub fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error(
            Code::Syntax,
            t.span,
            format!("Expected {expected} but found {}", t.tok),
        )
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    /// Skips past the next `;` or stops before a `}` at the current depth.
    pub fn recover_statement(&mut self) {
        let mut depth = 0usize;
        loop {
            match &self.peek().tok {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                _ => {}
            }
            self.bump();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, FileId::SPEC)
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect()
    }

    #[test]
    fn lexical_classes() {
        assert_eq!(
            toks("after VAR : result = value(env, VAR#); // c"),
            vec![
                Tok::Ident("after".into()),
                Tok::Ident("VAR".into()),
                Tok::Colon,
                Tok::Ident("result".into()),
                Tok::Eq,
                Tok::Ident("value".into()),
                Tok::LParen,
                Tok::Ident("env".into()),
                Tok::Comma,
                Tok::TokenText("VAR".into()),
                Tok::RParen,
                Tok::Semi,
                Tok::Eof
            ]
        );
        assert_eq!(
            toks("$t1=term 'a'..'z' --> <: #javaoptions"),
            vec![
                Tok::Label("t1".into()),
                Tok::Eq,
                Tok::Ident("term".into()),
                Tok::Str("a".into()),
                Tok::DotDot,
                Tok::Str("z".into()),
                Tok::Arrow,
                Tok::SubType,
                Tok::HashIdent("javaoptions".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn escapes_and_positions() {
        let ts = tokenize("x\n  '\\''", FileId::SPEC).unwrap();
        assert_eq!(ts[1].tok, Tok::Str("'".into()));
        assert_eq!((ts[1].span.line, ts[1].span.column), (2, 3));
    }

    #[test]
    fn errors_are_collected() {
        let errs = tokenize("a @ 'open", FileId::SPEC).unwrap_err();
        assert_eq!(errs.len(), 2);
    }
}
