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

//! Longest-match scanner built from the token rules of a grammar and the
//! literals used by its syntactic rules.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::grammar::{GrammarModel, RhsExpr, Rule, SymbolKind};

/// Kind of a scanned token; also the terminal alphabet of the parser.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Terminal {
    Literal(String),
    Token(String),
    Eof,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Terminal::Literal(s) => write!(f, "'{}'", crate::grammar::escape_literal(s)),
            Terminal::Token(s) => f.write_str(s),
            Terminal::Eof => f.write_str("end of input"),
        }
    }
}

/// 1-based line and column of a character in the input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub offset: usize,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: Terminal,
    pub text: String,
    pub pos: Pos,
}

pub struct Scanner<'g> {
    rules: HashMap<&'g str, &'g Rule>,
    /// Non-fragment token rules in declaration order.
    token_rules: Vec<&'g Rule>,
    literals: Vec<String>,
}

impl<'g> Scanner<'g> {
    pub fn new(grammar: &'g GrammarModel) -> Self {
        Scanner {
            rules: grammar.rules.iter().map(|r| (r.name.as_str(), r)).collect(),
            token_rules: grammar
                .rules
                .iter()
                .filter(|r| r.is_token && !r.is_fragment)
                .collect(),
            literals: grammar.implicit_literals(),
        }
    }

    /// Splits `input` into tokens, ending with [`Terminal::Eof`]. At each
    /// position the longest match wins; on equal length a literal beats a
    /// token rule and an earlier token rule beats a later one. ASCII
    /// whitespace that no token matches is skipped.
    pub fn scan(&self, input: &str) -> Result<Vec<Token>, Pos> {
        let chars: Vec<char> = input.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        let mut pos = Pos {
            offset: 0,
            line: 1,
            column: 1,
        };
        while i < chars.len() {
            let best = self.longest_at(&chars, i);
            let len = match best {
                Some((len, kind)) => {
                    out.push(Token {
                        kind,
                        text: chars[i..i + len].iter().collect(),
                        pos,
                    });
                    len
                }
                None if chars[i].is_ascii_whitespace() => 1,
                None => return Err(pos),
            };
            for &c in &chars[i..i + len] {
                pos.offset += c.len_utf8();
                if c == '\n' {
                    pos.line += 1;
                    pos.column = 1;
                } else {
                    pos.column += 1;
                }
            }
            i += len;
        }
        out.push(Token {
            kind: Terminal::Eof,
            text: String::new(),
            pos,
        });
        Ok(out)
    }

    fn longest_at(&self, chars: &[char], i: usize) -> Option<(usize, Terminal)> {
        let mut best: Option<(usize, Terminal)> = None;
        for lit in &self.literals {
            let n = lit.chars().count();
            if n > 0
                && chars.len() >= i + n
                && chars[i..i + n].iter().copied().eq(lit.chars())
                && best.as_ref().is_none_or(|(m, _)| n > *m)
            {
                best = Some((n, Terminal::Literal(lit.clone())));
            }
        }
        for rule in &self.token_rules {
            if let Some(end) = self.ends(&rule.rhs, chars, &BTreeSet::from([i])).last() {
                let n = end - i;
                if n > 0 && best.as_ref().is_none_or(|(m, _)| n > *m) {
                    best = Some((n, Terminal::Token(rule.name.clone())));
                }
            }
        }
        best
    }

    /// Every position a match of `e` can end at, starting from any of
    /// `starts`.
    fn ends(&self, e: &RhsExpr, chars: &[char], starts: &BTreeSet<usize>) -> BTreeSet<usize> {
        match e {
            RhsExpr::Sequence(items) => items
                .iter()
                .fold(starts.clone(), |cur, item| self.ends(item, chars, &cur)),
            RhsExpr::Alternative(alts) => alts
                .iter()
                .flat_map(|a| self.ends(a, chars, starts))
                .collect(),
            RhsExpr::Optional(child) => {
                let mut out = self.ends(child, chars, starts);
                out.extend(starts);
                out
            }
            RhsExpr::Iteration { child, min } => {
                let mut reached = if *min == 0 {
                    starts.clone()
                } else {
                    BTreeSet::new()
                };
                let mut frontier = self.ends(child, chars, starts);
                while !frontier.is_subset(&reached) {
                    let new: BTreeSet<usize> = frontier.difference(&reached).copied().collect();
                    reached.extend(&new);
                    frontier = self.ends(child, chars, &new);
                }
                reached
            }
            RhsExpr::Labeled { child, .. } => self.ends(child, chars, starts),
            RhsExpr::CharRange { lo, hi, .. } => starts
                .iter()
                .filter(|&&s| chars.get(s).is_some_and(|c| lo <= c && c <= hi))
                .map(|s| s + 1)
                .collect(),
            RhsExpr::Symbol(s) => match s.kind {
                SymbolKind::Literal => {
                    let n = s.name.chars().count();
                    starts
                        .iter()
                        .filter(|&&st| {
                            chars.len() >= st + n
                                && chars[st..st + n].iter().copied().eq(s.name.chars())
                        })
                        .map(|st| st + n)
                        .collect()
                }
                _ => match self.rules.get(s.name.as_str()) {
                    Some(r) => self.ends(&r.rhs, chars, starts),
                    None => BTreeSet::new(),
                },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_specification;
    use crate::testutil::*;

    fn kinds(text: &str) -> Vec<String> {
        let ext = simple_ext();
        let spec = parse_specification(ARITH, &ext).unwrap();
        let toks = Scanner::new(&spec.grammar).scan(text).unwrap();
        toks.iter()
            .map(|t| format!("{}:{}", t.kind, t.text))
            .collect()
    }

    #[test]
    fn arithmetic_tokens() {
        assert_eq!(
            kinds("x1*(3 + 42)"),
            [
                "VAR:x1",
                "'*':*",
                "'(':(",
                "INT:3",
                "'+':+",
                "INT:42",
                "')':)",
                "end of input:"
            ]
        );
    }

    #[test]
    fn unknown_character() {
        let ext = simple_ext();
        let spec = parse_specification(ARITH, &ext).unwrap();
        let err = Scanner::new(&spec.grammar).scan("x\n  ?").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn literal_beats_token_on_equal_length() {
        let text = "
s : ('if' | ID)+ ;
ID : ('a'..'z')+ ;
";
        let ext = simple_ext();
        let spec = parse_specification(text, &ext).unwrap();
        let sc = Scanner::new(&spec.grammar);
        let toks = sc.scan("if iff").unwrap();
        assert_eq!(toks[0].kind, Terminal::Literal("if".into()));
        assert_eq!(toks[1].kind, Terminal::Token("ID".into()));
        assert_eq!(toks[1].text, "iff");
    }

    #[test]
    fn earlier_rule_wins_tie() {
        let text = "
s : (A | B)+ ;
A : 'a'..'c' ;
B : 'b'..'d' ;
";
        let ext = simple_ext();
        let spec = parse_specification(text, &ext).unwrap();
        let toks = Scanner::new(&spec.grammar).scan("bd").unwrap();
        assert_eq!(toks[0].kind, Terminal::Token("A".into()));
        assert_eq!(toks[1].kind, Terminal::Token("B".into()));
    }
}
