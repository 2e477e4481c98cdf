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

//! Definite-assignment analysis: a forward must-analysis over a [`Cfg`].

use std::collections::{BTreeSet, HashSet};

use super::cfg::{AccessKind, Cfg, NodeKind};
use crate::diag::{Code, Diagnostic, Span};
use crate::grammar::SymbolKind;
use crate::syntax::ast::TranslationFunction;

/// A fact that holds at a program point: an attribute has been written, or
/// the text of a token is available.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fact {
    Assigned(String),
    TokenMatched(String),
}

/// Facts holding on entry to every node, `None` for nodes no path from the
/// entry reaches. `initial` holds at the entry node.
pub fn definitely_assigned(cfg: &Cfg, initial: &BTreeSet<Fact>) -> Vec<Option<BTreeSet<Fact>>> {
    let n = cfg.nodes.len();
    let mut facts: Vec<Option<BTreeSet<Fact>>> = vec![None; n];
    facts[Cfg::ENTRY] = Some(initial.clone());
    // Unreached nodes act as the top element; the first path to arrive
    // sets the value and later ones can only shrink it.
    let mut changed = true;
    while changed {
        changed = false;
        for e in cfg.edges.iter().filter(|e| e.to != Cfg::ENTRY) {
            let Some(out) = facts[e.from].as_ref().map(|f| transfer_out(cfg, e.from, f)) else {
                continue;
            };
            let out = apply_writes(out, e);
            let slot = &mut facts[e.to];
            let next = match slot {
                None => out,
                Some(cur) => cur.intersection(&out).cloned().collect(),
            };
            if slot.as_ref() != Some(&next) {
                *slot = Some(next);
                changed = true;
            }
        }
    }
    facts
}

/// Facts leaving a node: a token match makes its text available.
pub fn transfer_out(cfg: &Cfg, node: usize, facts: &BTreeSet<Fact>) -> BTreeSet<Fact> {
    let mut out = facts.clone();
    if let NodeKind::Match {
        name,
        kind: SymbolKind::TokenRule,
        ..
    } = &cfg.nodes[node].kind
    {
        out.insert(Fact::TokenMatched(name.clone()));
    }
    out
}

fn apply_writes(mut facts: BTreeSet<Fact>, e: &super::cfg::CfgEdge) -> BTreeSet<Fact> {
    for a in &e.accesses {
        if a.kind == AccessKind::Write {
            facts.insert(Fact::Assigned(a.name.clone()));
        }
    }
    facts
}

/// Reports reads of attributes that may be unassigned, token texts read
/// where the token may not have been matched, and outputs that may be
/// unassigned when the function returns.
pub fn check_definite_assignment(cfg: &Cfg, f: &TranslationFunction) -> Vec<Diagnostic> {
    let initial: BTreeSet<Fact> = f
        .inputs
        .iter()
        .map(|a| Fact::Assigned(a.name.name.clone()))
        .collect();
    let facts = definitely_assigned(cfg, &initial);
    let mut diags = Vec::new();
    let mut reported: HashSet<(String, Span)> = HashSet::new();

    for e in &cfg.edges {
        let Some(at) = facts[e.from].as_ref() else {
            continue;
        };
        let mut cur = transfer_out(cfg, e.from, at);
        for a in &e.accesses {
            match a.kind {
                AccessKind::Write => {
                    cur.insert(Fact::Assigned(a.name.clone()));
                }
                AccessKind::Read => {
                    if !cur.contains(&Fact::Assigned(a.name.clone()))
                        && reported.insert((a.name.clone(), a.span))
                    {
                        diags.push(Diagnostic::error(
                            Code::Uninitialized,
                            a.span,
                            format!(
                                "The local attribute {} might have not been initialized",
                                a.name
                            ),
                        ));
                    }
                }
                AccessKind::TokenText => {
                    if !cur.contains(&Fact::TokenMatched(a.name.clone()))
                        && reported.insert((format!("{}#", a.name), a.span))
                    {
                        diags.push(Diagnostic::error(
                            Code::TokenTextUnavailable,
                            a.span,
                            format!("The text of token {} might not be available here", a.name),
                        ));
                    }
                }
            }
        }
    }

    let at_exit = facts[Cfg::EXIT].clone().unwrap_or_default();
    for o in &f.outputs {
        if !at_exit.contains(&Fact::Assigned(o.name.name.clone())) {
            diags.push(Diagnostic::error(
                Code::OutputUnassigned,
                o.name.span,
                format!(
                    "The output attribute {} might have not been initialized when {} returns",
                    o.name.name, f.name.name
                ),
            ));
        }
    }
    diags
}
