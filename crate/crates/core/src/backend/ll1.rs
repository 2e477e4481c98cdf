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

//! FIRST and FOLLOW sets over regular right-hand sides, and the one-token
//! lookahead table used by the interpreter.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::lexer::Terminal;
use crate::grammar::{GrammarModel, RhsExpr, SymbolKind};

pub type TermSet = BTreeSet<Terminal>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Ll1Error {
    #[error("rule {0} is left-recursive")]
    LeftRecursion(String),
    #[error("rule {rule}: choices at {path:?} overlap on {}", show(.overlap))]
    Conflict {
        rule: String,
        path: Vec<usize>,
        overlap: Vec<Terminal>,
    },
    #[error("rule {rule}: the repeated or optional part at {path:?} can match nothing")]
    NullableBody { rule: String, path: Vec<usize> },
    #[error("no syntactic rule named {0}")]
    UnknownRule(String),
}

fn show(ts: &[Terminal]) -> String {
    ts.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// How the parser decides at a choice point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// Lookahead set of each alternative.
    Alternatives(Vec<TermSet>),
    /// Lookahead that enters an optional part or another loop pass.
    Enter(TermSet),
}

#[derive(Clone, Debug, Default)]
pub struct Ll1Table {
    pub first: HashMap<String, TermSet>,
    pub nullable: HashMap<String, bool>,
    pub follow: HashMap<String, TermSet>,
    /// Keyed by rule name and node path.
    pub decisions: HashMap<(String, Vec<usize>), Decision>,
}

struct Sets<'g> {
    grammar: &'g GrammarModel,
    first: HashMap<String, TermSet>,
    nullable: HashMap<String, bool>,
}

impl Sets<'_> {
    fn of(&self, e: &RhsExpr) -> (TermSet, bool) {
        match e {
            RhsExpr::Sequence(items) => {
                let mut out = TermSet::new();
                for item in items {
                    let (f, n) = self.of(item);
                    out.extend(f);
                    if !n {
                        return (out, false);
                    }
                }
                (out, true)
            }
            RhsExpr::Alternative(alts) => {
                let mut out = TermSet::new();
                let mut nullable = false;
                for a in alts {
                    let (f, n) = self.of(a);
                    out.extend(f);
                    nullable |= n;
                }
                (out, nullable)
            }
            RhsExpr::Optional(child) => (self.of(child).0, true),
            RhsExpr::Iteration { child, min } => {
                let (f, n) = self.of(child);
                (f, n || *min == 0)
            }
            RhsExpr::Labeled { child, .. } => self.of(child),
            RhsExpr::CharRange { .. } => (TermSet::new(), false),
            RhsExpr::Symbol(s) => match s.kind {
                SymbolKind::Literal => (TermSet::from([Terminal::Literal(s.name.clone())]), false),
                SymbolKind::TokenRule => (TermSet::from([Terminal::Token(s.name.clone())]), false),
                SymbolKind::SyntacticRule => (
                    self.first.get(&s.name).cloned().unwrap_or_default(),
                    self.nullable.get(&s.name).copied().unwrap_or(false),
                ),
            },
        }
    }

    /// Walks `e` with the set that can follow it, calling `visit` on every
    /// node with that set.
    fn walk(
        &self,
        e: &RhsExpr,
        path: &mut Vec<usize>,
        follow: &TermSet,
        visit: &mut impl FnMut(&[usize], &RhsExpr, &TermSet),
    ) {
        visit(path, e, follow);
        match e {
            RhsExpr::Sequence(items) => {
                let mut after = follow.clone();
                let mut follows = vec![TermSet::new(); items.len()];
                for (i, item) in items.iter().enumerate().rev() {
                    follows[i] = after.clone();
                    let (f, n) = self.of(item);
                    if !n {
                        after.clear();
                    }
                    after.extend(f);
                }
                for (i, item) in items.iter().enumerate() {
                    path.push(i);
                    self.walk(item, path, &follows[i], visit);
                    path.pop();
                }
            }
            RhsExpr::Alternative(alts) => {
                for (i, a) in alts.iter().enumerate() {
                    path.push(i);
                    self.walk(a, path, follow, visit);
                    path.pop();
                }
            }
            RhsExpr::Optional(child) | RhsExpr::Labeled { child, .. } => {
                path.push(0);
                self.walk(child, path, follow, visit);
                path.pop();
            }
            RhsExpr::Iteration { child, .. } => {
                let mut f = self.of(child).0;
                f.extend(follow.iter().cloned());
                path.push(0);
                self.walk(child, path, &f, visit);
                path.pop();
            }
            RhsExpr::Symbol(_) | RhsExpr::CharRange { .. } => {}
        }
    }

    /// Lookahead of entering `e` when `follow` may come after it.
    fn lookahead(&self, e: &RhsExpr, follow: &TermSet) -> TermSet {
        let (mut f, n) = self.of(e);
        if n {
            f.extend(follow.iter().cloned());
        }
        f
    }
}

/// Builds the table for the syntactic rules reachable from `start`, which
/// may be followed by end of input.
pub fn build_table(grammar: &GrammarModel, start: &str) -> Result<Ll1Table, Ll1Error> {
    if !grammar.rule(start).is_some_and(|r| !r.is_token) {
        return Err(Ll1Error::UnknownRule(start.to_string()));
    }
    let syntactic: Vec<_> = grammar.rules.iter().filter(|r| !r.is_token).collect();
    let mut sets = Sets {
        grammar,
        first: HashMap::new(),
        nullable: HashMap::new(),
    };
    loop {
        let mut changed = false;
        for r in &syntactic {
            let (f, n) = sets.of(&r.rhs);
            if sets.first.get(&r.name) != Some(&f) || sets.nullable.get(&r.name) != Some(&n) {
                sets.first.insert(r.name.clone(), f);
                sets.nullable.insert(r.name.clone(), n);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let reachable = reachable_rules(grammar, start);
    check_left_recursion(&sets, &reachable)?;

    let mut follow: HashMap<String, TermSet> = HashMap::new();
    follow.insert(start.to_string(), TermSet::from([Terminal::Eof]));
    loop {
        let mut additions: Vec<(String, TermSet)> = Vec::new();
        for name in &reachable {
            let rule = grammar.rule(name).expect("reachable rules exist");
            let own = follow.get(name).cloned().unwrap_or_default();
            sets.walk(&rule.rhs, &mut Vec::new(), &own, &mut |_, node, f| {
                if let RhsExpr::Symbol(s) = node {
                    if s.kind == SymbolKind::SyntacticRule {
                        additions.push((s.name.clone(), f.clone()));
                    }
                }
            });
        }
        let mut changed = false;
        for (name, f) in additions {
            let slot = follow.entry(name).or_default();
            let before = slot.len();
            slot.extend(f);
            changed |= slot.len() != before;
        }
        if !changed {
            break;
        }
    }

    let mut decisions = HashMap::new();
    let mut error = None;
    for name in &reachable {
        let rule = grammar.rule(name).expect("reachable rules exist");
        let own = follow.get(name).cloned().unwrap_or_default();
        sets.walk(&rule.rhs, &mut Vec::new(), &own, &mut |path, node, f| {
            if error.is_some() {
                return;
            }
            let key = (name.clone(), path.to_vec());
            match node {
                RhsExpr::Alternative(alts) => {
                    let las: Vec<TermSet> = alts.iter().map(|a| sets.lookahead(a, f)).collect();
                    for i in 0..las.len() {
                        for j in i + 1..las.len() {
                            let overlap: Vec<_> = las[i].intersection(&las[j]).cloned().collect();
                            if !overlap.is_empty() {
                                error.get_or_insert(Ll1Error::Conflict {
                                    rule: name.clone(),
                                    path: path.to_vec(),
                                    overlap,
                                });
                            }
                        }
                    }
                    decisions.insert(key, Decision::Alternatives(las));
                }
                RhsExpr::Optional(child) | RhsExpr::Iteration { child, .. } => {
                    let (enter, n) = sets.of(child);
                    if n {
                        error.get_or_insert(Ll1Error::NullableBody {
                            rule: name.clone(),
                            path: path.to_vec(),
                        });
                    }
                    let overlap: Vec<_> = enter.intersection(f).cloned().collect();
                    if !overlap.is_empty() {
                        error.get_or_insert(Ll1Error::Conflict {
                            rule: name.clone(),
                            path: path.to_vec(),
                            overlap,
                        });
                    }
                    decisions.insert(key, Decision::Enter(enter));
                }
                _ => {}
            }
        });
    }
    if let Some(e) = error {
        return Err(e);
    }
    Ok(Ll1Table {
        first: sets.first,
        nullable: sets.nullable,
        follow,
        decisions,
    })
}

fn reachable_rules(grammar: &GrammarModel, start: &str) -> Vec<String> {
    let mut seen = BTreeSet::from([start.to_string()]);
    let mut stack = vec![start.to_string()];
    while let Some(n) = stack.pop() {
        if let Some(r) = grammar.rule(&n) {
            for s in r.symbols() {
                if s.kind == SymbolKind::SyntacticRule && seen.insert(s.name.clone()) {
                    stack.push(s.name.clone());
                }
            }
        }
    }
    seen.into_iter()
        .filter(|n| grammar.rule(n).is_some())
        .collect()
}

/// Rules callable before any token is consumed.
fn left_calls(sets: &Sets<'_>, e: &RhsExpr, out: &mut BTreeSet<String>) -> bool {
    match e {
        RhsExpr::Sequence(items) => {
            for item in items {
                if !left_calls(sets, item, out) {
                    return false;
                }
            }
            true
        }
        RhsExpr::Alternative(alts) => {
            let mut n = false;
            for a in alts {
                n |= left_calls(sets, a, out);
            }
            n
        }
        RhsExpr::Optional(child) => {
            left_calls(sets, child, out);
            true
        }
        RhsExpr::Iteration { child, min } => left_calls(sets, child, out) || *min == 0,
        RhsExpr::Labeled { child, .. } => left_calls(sets, child, out),
        RhsExpr::Symbol(s) if s.kind == SymbolKind::SyntacticRule => {
            out.insert(s.name.clone());
            sets.nullable.get(&s.name).copied().unwrap_or(false)
        }
        _ => false,
    }
}

fn check_left_recursion(sets: &Sets<'_>, rules: &[String]) -> Result<(), Ll1Error> {
    let mut graph: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for name in rules {
        let mut out = BTreeSet::new();
        if let Some(r) = sets.grammar.rule(name) {
            left_calls(sets, &r.rhs, &mut out);
        }
        graph.insert(name, out);
    }
    for start in rules {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = graph[start.as_str()].iter().map(String::as_str).collect();
        while let Some(n) = stack.pop() {
            if n == start {
                return Err(Ll1Error::LeftRecursion(start.clone()));
            }
            if seen.insert(n) {
                if let Some(next) = graph.get(n) {
                    stack.extend(next.iter().map(String::as_str));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_specification;
    use crate::testutil::*;

    fn table(text: &str, start: &str) -> Result<Ll1Table, Ll1Error> {
        let ext = simple_ext();
        let spec = parse_specification(text, &ext).unwrap();
        build_table(&spec.grammar, start)
    }

    fn lit(s: &str) -> Terminal {
        Terminal::Literal(s.into())
    }

    #[test]
    fn arithmetic_sets() {
        let t = table(ARITH, "expr").unwrap();
        let tok = |s: &str| Terminal::Token(s.into());
        let factor_first = TermSet::from([lit("("), tok("VAR"), tok("INT")]);
        assert_eq!(t.first["factor"], factor_first);
        assert_eq!(t.first["expr"], factor_first);
        assert_eq!(t.follow["expr"], TermSet::from([lit(")"), Terminal::Eof]));
        assert_eq!(
            t.follow["factor"],
            TermSet::from([lit("*"), lit("+"), lit("-"), lit(")"), Terminal::Eof])
        );
        assert!(!t.nullable["term"]);
    }

    #[test]
    fn left_recursion_is_rejected() {
        let text = "e : e '+' T | T ;\nT : 'x' ;";
        assert_eq!(
            table(text, "e").unwrap_err(),
            Ll1Error::LeftRecursion("e".into())
        );
        let text = "a : b? a 'x' | 'y' ;\nb : 'z' ;";
        assert!(matches!(table(text, "a"), Err(Ll1Error::LeftRecursion(_))));
    }

    #[test]
    fn overlapping_alternatives() {
        let text = "s : 'a' 'b' | 'a' 'c' ;";
        assert!(matches!(table(text, "s"), Err(Ll1Error::Conflict { .. })));
        let text = "s : ('a')* 'a' ;";
        assert!(matches!(table(text, "s"), Err(Ll1Error::Conflict { .. })));
        let text = "s : ('a'?)* 'b' ;";
        assert!(matches!(
            table(text, "s"),
            Err(Ll1Error::NullableBody { .. })
        ));
    }

    #[test]
    fn unknown_start() {
        assert!(matches!(table(ARITH, "VAR"), Err(Ll1Error::UnknownRule(_))));
        assert!(matches!(
            table(ARITH, "nope"),
            Err(Ll1Error::UnknownRule(_))
        ));
    }
}
