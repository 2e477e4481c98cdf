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

//! Grammar model: rules whose right-hand sides are regular expressions over
//! symbols, together with location labels and occurrence addressing.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::diag::{Code, Diagnostic, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    TokenRule,
    SyntacticRule,
    Literal,
}

impl SymbolKind {
    /// Token rules are the ones whose name is entirely uppercase.
    pub fn for_rule_name(name: &str) -> SymbolKind {
        if is_token_name(name) {
            SymbolKind::TokenRule
        } else {
            SymbolKind::SyntacticRule
        }
    }
}

pub fn is_token_name(name: &str) -> bool {
    name.chars().any(|c| c.is_ascii_uppercase()) && !name.chars().any(|c| c.is_ascii_lowercase())
}

/// A reference to a rule or a literal from inside a right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    /// Rule name, or the unquoted text for literals.
    pub name: String,
    pub kind: SymbolKind,
    pub span: Span,
}

impl Symbol {
    pub fn rule(name: impl Into<String>, span: Span) -> Self {
        let name = name.into();
        let kind = SymbolKind::for_rule_name(&name);
        Symbol { name, kind, span }
    }

    pub fn literal(text: impl Into<String>, span: Span) -> Self {
        Symbol {
            name: text.into(),
            kind: SymbolKind::Literal,
            span,
        }
    }

    pub fn is_nonterminal(&self) -> bool {
        self.kind == SymbolKind::SyntacticRule
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhsExpr {
    Sequence(Vec<RhsExpr>),
    Alternative(Vec<RhsExpr>),
    /// `min == 0` is `*`, `min == 1` is `+`.
    Iteration {
        child: Box<RhsExpr>,
        min: u8,
    },
    Optional(Box<RhsExpr>),
    Symbol(Symbol),
    CharRange {
        lo: char,
        hi: char,
        span: Span,
    },
    Labeled {
        label: String,
        span: Span,
        child: Box<RhsExpr>,
    },
}

impl RhsExpr {
    pub fn children(&self) -> &[RhsExpr] {
        match self {
            RhsExpr::Sequence(cs) | RhsExpr::Alternative(cs) => cs,
            RhsExpr::Iteration { child, .. }
            | RhsExpr::Optional(child)
            | RhsExpr::Labeled { child, .. } => std::slice::from_ref(child),
            RhsExpr::Symbol(_) | RhsExpr::CharRange { .. } => &[],
        }
    }

    /// Follows a child-index path from this node.
    pub fn at_path(&self, path: &[usize]) -> Option<&RhsExpr> {
        let mut node = self;
        for &i in path {
            node = node.children().get(i)?;
        }
        Some(node)
    }

    /// Pre-order walk with the path of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a RhsExpr)) {
        fn go<'a>(
            node: &'a RhsExpr,
            path: &mut Vec<usize>,
            f: &mut impl FnMut(&[usize], &'a RhsExpr),
        ) {
            f(path, node);
            for (i, c) in node.children().iter().enumerate() {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn is_empty_sequence(&self) -> bool {
        matches!(self, RhsExpr::Sequence(cs) if cs.is_empty())
    }

    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> RhsExpr {
        match self {
            RhsExpr::Sequence(cs) => {
                RhsExpr::Sequence(cs.iter().map(Self::without_spans).collect())
            }
            RhsExpr::Alternative(cs) => {
                RhsExpr::Alternative(cs.iter().map(Self::without_spans).collect())
            }
            RhsExpr::Iteration { child, min } => RhsExpr::Iteration {
                child: Box::new(child.without_spans()),
                min: *min,
            },
            RhsExpr::Optional(c) => RhsExpr::Optional(Box::new(c.without_spans())),
            RhsExpr::Symbol(s) => RhsExpr::Symbol(Symbol {
                span: Span::default(),
                ..s.clone()
            }),
            RhsExpr::CharRange { lo, hi, .. } => RhsExpr::CharRange {
                lo: *lo,
                hi: *hi,
                span: Span::default(),
            },
            RhsExpr::Labeled { label, child, .. } => RhsExpr::Labeled {
                label: label.clone(),
                span: Span::default(),
                child: Box::new(child.without_spans()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub rhs: RhsExpr,
    pub is_token: bool,
    pub is_fragment: bool,
    pub span: Span,
}

impl Rule {
    pub fn new(name: impl Into<String>, rhs: RhsExpr, is_fragment: bool, span: Span) -> Self {
        let name = name.into();
        Rule {
            is_token: is_token_name(&name),
            name,
            rhs,
            is_fragment,
            span,
        }
    }

    /// Where an action is attached: a label, a symbol name or a literal.
    pub fn resolve_action_site(&self, site: &Site) -> Result<Vec<Occurrence>, UnknownSite> {
        let mut found = Vec::new();
        self.rhs.walk(&mut |path, node| match (site, node) {
            (Site::Label(l), RhsExpr::Labeled { label, .. }) if label == l => {
                found.push(Occurrence {
                    rule: self.name.clone(),
                    path: path.to_vec(),
                    name: label.clone(),
                })
            }
            (Site::Symbol(n), RhsExpr::Symbol(s))
                if s.kind != SymbolKind::Literal && &s.name == n =>
            {
                found.push(Occurrence {
                    rule: self.name.clone(),
                    path: path.to_vec(),
                    name: s.name.clone(),
                })
            }
            (Site::Literal(t), RhsExpr::Symbol(s))
                if s.kind == SymbolKind::Literal && &s.name == t =>
            {
                found.push(Occurrence {
                    rule: self.name.clone(),
                    path: path.to_vec(),
                    name: s.name.clone(),
                })
            }
            _ => {}
        });
        if found.is_empty() {
            Err(UnknownSite {
                rule: self.name.clone(),
                site: site.clone(),
            })
        } else {
            Ok(found)
        }
    }

    pub fn labels(&self) -> Vec<(&str, Span)> {
        let mut out = Vec::new();
        self.rhs.walk(&mut |_, node| {
            if let RhsExpr::Labeled { label, span, .. } = node {
                out.push((label.as_str(), *span));
            }
        });
        out
    }

    pub fn symbols(&self) -> Vec<&Symbol> {
        let mut out = Vec::new();
        self.rhs.walk(&mut |_, node| {
            if let RhsExpr::Symbol(s) = node {
                out.push(s);
            }
        });
        out
    }
}

/// The name an action is attached to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Site {
    Label(String),
    Symbol(String),
    Literal(String),
}

impl Site {
    /// `$x` is a label, `'x'` a literal, anything else a symbol name.
    pub fn parse(text: &str) -> Site {
        if let Some(l) = text.strip_prefix('$') {
            Site::Label(l.to_string())
        } else if text.len() >= 2 && text.starts_with('\'') && text.ends_with('\'') {
            Site::Literal(text[1..text.len() - 1].to_string())
        } else {
            Site::Symbol(text.to_string())
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Label(l) => write!(f, "${l}"),
            Site::Symbol(s) => f.write_str(s),
            Site::Literal(t) => write!(f, "'{}'", escape_literal(t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown site {site} in rule {rule}")]
pub struct UnknownSite {
    pub rule: String,
    pub site: Site,
}

/// One addressable node of a rule's right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub rule: String,
    pub path: Vec<usize>,
    /// The symbol name, literal text or label at this node.
    pub name: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarModel {
    pub rules: Vec<Rule>,
}

impl GrammarModel {
    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn without_spans(&self) -> GrammarModel {
        GrammarModel {
            rules: self
                .rules
                .iter()
                .map(|r| Rule {
                    rhs: r.rhs.without_spans(),
                    span: Span::default(),
                    ..r.clone()
                })
                .collect(),
        }
    }

    /// Literal texts used by syntactic rules, in first-use order.
    pub fn implicit_literals(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in self.rules.iter().filter(|r| !r.is_token) {
            for s in r.symbols() {
                if s.kind == SymbolKind::Literal && seen.insert(s.name.clone()) {
                    out.push(s.name.clone());
                }
            }
        }
        out
    }
}

/// Checks the structural invariants of a grammar. Pure: the same model
/// always yields the same list.
pub fn validate_grammar(model: &GrammarModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut first_def: HashMap<&str, &Rule> = HashMap::new();
    for rule in &model.rules {
        if first_def.contains_key(rule.name.as_str()) {
            diags.push(Diagnostic::error(
                Code::DuplicateRule,
                rule.span,
                format!("Duplicate rule {}", rule.name),
            ));
        } else {
            first_def.insert(&rule.name, rule);
        }
    }

    for rule in &model.rules {
        if rule.is_fragment && !rule.is_token {
            diags.push(Diagnostic::error(
                Code::FragmentMisuse,
                rule.span,
                format!("Fragment rule {} must be a token rule", rule.name),
            ));
        }
        if rule.rhs.is_empty_sequence() {
            diags.push(Diagnostic::error(
                Code::EmptyRule,
                rule.span,
                format!("Rule {} has an empty right-hand side", rule.name),
            ));
        }

        let mut labels: HashSet<&str> = HashSet::new();
        for (label, span) in rule.labels() {
            if !labels.insert(label) {
                diags.push(Diagnostic::error(
                    Code::DuplicateLabel,
                    span,
                    format!("Duplicate label {label} in rule {}", rule.name),
                ));
            }
        }

        rule.rhs.walk(&mut |_, node| match node {
            RhsExpr::CharRange { lo, hi, span } => {
                if !rule.is_token {
                    diags.push(Diagnostic::error(
                        Code::RangeOutsideToken,
                        *span,
                        format!("Character range outside a token rule in {}", rule.name),
                    ));
                }
                if lo > hi {
                    diags.push(Diagnostic::error(
                        Code::BadRange,
                        *span,
                        format!("Empty character range '{lo}'..'{hi}'"),
                    ));
                }
            }
            RhsExpr::Symbol(s) => match s.kind {
                SymbolKind::Literal => {
                    if s.name.is_empty() {
                        diags.push(Diagnostic::error(Code::Syntax, s.span, "Empty literal"));
                    }
                }
                _ => match first_def.get(s.name.as_str()) {
                    None => diags.push(Diagnostic::error(
                        Code::UndefinedSymbol,
                        s.span,
                        format!("Undefined symbol {}", s.name),
                    )),
                    Some(target) => {
                        if rule.is_token && !target.is_token {
                            diags.push(Diagnostic::error(
                                Code::TokenRuleReference,
                                s.span,
                                format!(
                                    "Token rule {} refers to syntactic rule {}",
                                    rule.name, s.name
                                ),
                            ));
                        } else if !rule.is_token && target.is_fragment {
                            diags.push(Diagnostic::error(
                                Code::FragmentMisuse,
                                s.span,
                                format!(
                                    "Syntactic rule {} refers to fragment {}",
                                    rule.name, s.name
                                ),
                            ));
                        }
                    }
                },
            },
            _ => {}
        });
    }

    diags.extend(token_cycles(model, &first_def));
    diags
}

fn token_cycles(model: &GrammarModel, defs: &HashMap<&str, &Rule>) -> Vec<Diagnostic> {
    let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for rule in model.rules.iter().filter(|r| r.is_token) {
        let targets = rule
            .symbols()
            .into_iter()
            .filter(|s| s.kind == SymbolKind::TokenRule && defs.contains_key(s.name.as_str()))
            .map(|s| s.name.as_str())
            .collect();
        edges.entry(rule.name.as_str()).or_insert(targets);
    }

    let mut diags = Vec::new();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: HashMap<&str, u8> = HashMap::new();
    fn visit<'a>(
        n: &'a str,
        edges: &BTreeMap<&'a str, Vec<&'a str>>,
        state: &mut HashMap<&'a str, u8>,
        cyclic: &mut Vec<&'a str>,
    ) {
        state.insert(n, 1);
        for &m in edges.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            match state.get(m).copied().unwrap_or(0) {
                0 => visit(m, edges, state, cyclic),
                1 => cyclic.push(m),
                _ => {}
            }
        }
        state.insert(n, 2);
    }
    let mut cyclic = Vec::new();
    for &n in edges.keys() {
        if state.get(n).copied().unwrap_or(0) == 0 {
            visit(n, &edges, &mut state, &mut cyclic);
        }
    }
    cyclic.sort_unstable();
    cyclic.dedup();
    for name in cyclic {
        diags.push(Diagnostic::error(
            Code::RecursiveToken,
            defs[name].span,
            format!("Token rule {name} is recursive"),
        ));
    }
    diags
}

pub fn escape_literal(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: &str) -> RhsExpr {
        RhsExpr::Symbol(Symbol::rule(n, Span::default()))
    }
    fn lit(t: &str) -> RhsExpr {
        RhsExpr::Symbol(Symbol::literal(t, Span::default()))
    }
    fn labeled(l: &str, c: RhsExpr) -> RhsExpr {
        RhsExpr::Labeled {
            label: l.into(),
            span: Span::default(),
            child: Box::new(c),
        }
    }

    // term : $f1=factor ('*' $f2=factor)* ;
    fn term_rule() -> Rule {
        Rule::new(
            "term",
            RhsExpr::Sequence(vec![
                labeled("f1", sym("factor")),
                RhsExpr::Iteration {
                    child: Box::new(RhsExpr::Sequence(vec![
                        lit("*"),
                        labeled("f2", sym("factor")),
                    ])),
                    min: 0,
                },
            ]),
            false,
            Span::default(),
        )
    }

    #[test]
    fn symbol_site_covers_every_occurrence() {
        let occ = term_rule()
            .resolve_action_site(&Site::parse("factor"))
            .unwrap();
        let paths: Vec<_> = occ.iter().map(|o| o.path.clone()).collect();
        assert_eq!(paths, vec![vec![0, 0], vec![1, 0, 1, 0]]);
    }

    #[test]
    fn label_site_is_singleton() {
        let occ = term_rule()
            .resolve_action_site(&Site::parse("$f1"))
            .unwrap();
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].path, vec![0]);
        assert_eq!(occ[0].name, "f1");
    }

    #[test]
    fn literal_site() {
        let occ = term_rule()
            .resolve_action_site(&Site::parse("'*'"))
            .unwrap();
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].path, vec![1, 0, 0]);
    }

    #[test]
    fn unknown_site() {
        let err = term_rule()
            .resolve_action_site(&Site::parse("zzz"))
            .unwrap_err();
        assert_eq!(err.site, Site::Symbol("zzz".into()));
    }

    #[test]
    fn token_naming_convention() {
        assert!(is_token_name("VAR"));
        assert!(is_token_name("INT_2"));
        assert!(!is_token_name("expr"));
        assert!(!is_token_name("Expr"));
        assert!(!is_token_name("_"));
    }

    #[test]
    fn undefined_symbol_reported() {
        let g = GrammarModel {
            rules: vec![Rule::new("a", sym("b"), false, Span::default())],
        };
        let d = validate_grammar(&g);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::UndefinedSymbol);
        assert!(d[0].message.contains('b'));
    }

    #[test]
    fn duplicate_label_reported() {
        let g = GrammarModel {
            rules: vec![
                Rule::new(
                    "a",
                    RhsExpr::Sequence(vec![labeled("x", sym("B")), labeled("x", sym("B"))]),
                    false,
                    Span::default(),
                ),
                Rule::new("B", lit("b"), false, Span::default()),
            ],
        };
        let d = validate_grammar(&g);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::DuplicateLabel);
    }

    #[test]
    fn range_outside_token_and_recursion() {
        let range = RhsExpr::CharRange {
            lo: 'a',
            hi: 'z',
            span: Span::default(),
        };
        let g = GrammarModel {
            rules: vec![
                Rule::new("a", range.clone(), false, Span::default()),
                Rule::new(
                    "A",
                    RhsExpr::Sequence(vec![range, sym("A")]),
                    false,
                    Span::default(),
                ),
            ],
        };
        let codes: Vec<_> = validate_grammar(&g).iter().map(|d| d.code).collect();
        assert!(codes.contains(&Code::RangeOutsideToken));
        assert!(codes.contains(&Code::RecursiveToken));
    }

    #[test]
    fn duplicate_rule_and_fragment_misuse() {
        let g = GrammarModel {
            rules: vec![
                Rule::new("a", lit("x"), true, Span::default()),
                Rule::new("a", lit("y"), false, Span::default()),
            ],
        };
        let codes: Vec<_> = validate_grammar(&g).iter().map(|d| d.code).collect();
        assert!(codes.contains(&Code::DuplicateRule));
        assert!(codes.contains(&Code::FragmentMisuse));
    }
}
