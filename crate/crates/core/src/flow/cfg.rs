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

//! Control-flow graphs of translation functions, shaped by the regular
//! structure of the rule they belong to.

use std::collections::BTreeMap;

use crate::check::nonterminal_at;
use crate::diag::Span;
use crate::grammar::{RhsExpr, Rule, SymbolKind};
use crate::syntax::ast::{Expr, Position, Stmt, TranslationFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AccessKind {
    Read,
    Write,
    /// `NAME#`: needs a preceding match of the token, not an attribute.
    TokenText,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Access {
    pub name: String,
    pub kind: AccessKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Entry,
    Exit,
    /// A symbol of the rule is matched.
    Match {
        path: Vec<usize>,
        name: String,
        kind: SymbolKind,
    },
    /// An action of the function runs; its accesses label the incoming edge.
    Action {
        index: usize,
        position: Position,
    },
    Branch,
    Join,
    LoopHead,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgNode {
    pub id: usize,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgEdge {
    pub from: usize,
    pub to: usize,
    pub accesses: Vec<Access>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cfg {
    pub nodes: Vec<CfgNode>,
    pub edges: Vec<CfgEdge>,
}

impl Cfg {
    pub const ENTRY: usize = 0;
    pub const EXIT: usize = 1;

    /// A graph holding only the entry and exit nodes.
    pub fn empty() -> Cfg {
        let mut g = Cfg::default();
        g.add_node(NodeKind::Entry);
        g.add_node(NodeKind::Exit);
        g
    }

    pub fn add_node(&mut self, kind: NodeKind) -> usize {
        let id = self.nodes.len();
        self.nodes.push(CfgNode { id, kind });
        id
    }

    pub fn add_edge(&mut self, from: usize, to: usize, accesses: Vec<Access>) {
        self.edges.push(CfgEdge { from, to, accesses });
    }

    pub fn successors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.from == n).map(|e| e.to)
    }

    pub fn incoming(&self, n: usize) -> impl Iterator<Item = &CfgEdge> + '_ {
        self.edges.iter().filter(move |e| e.to == n)
    }

    pub fn count(&self, pred: impl Fn(&NodeKind) -> bool) -> usize {
        self.nodes.iter().filter(|n| pred(&n.kind)).count()
    }
}

/// Accesses performed by a statement: reads of the right-hand side in
/// evaluation order, then writes of the left-hand side from left to right.
pub fn statement_accesses(s: &Stmt) -> Vec<Access> {
    let mut out = Vec::new();
    collect_stmt(s, &mut out);
    out
}

fn collect_stmt(s: &Stmt, out: &mut Vec<Access>) {
    match s {
        Stmt::Block { stmts, .. } => stmts.iter().for_each(|s| collect_stmt(s, out)),
        Stmt::Call { call, .. } => collect_expr(call, out),
        Stmt::Assign { lhs, rhs, .. } => {
            collect_expr(rhs, out);
            for n in lhs.names() {
                out.push(Access {
                    name: n.name.clone(),
                    kind: AccessKind::Write,
                    span: n.span,
                });
            }
        }
    }
}

fn collect_expr(e: &Expr, out: &mut Vec<Access>) {
    match e {
        Expr::Attr(i) => out.push(Access {
            name: i.name.clone(),
            kind: AccessKind::Read,
            span: i.span,
        }),
        Expr::TokenText(i) => out.push(Access {
            name: i.name.clone(),
            kind: AccessKind::TokenText,
            span: i.span,
        }),
        Expr::Call { args, .. } => args.iter().for_each(|a| collect_expr(a, out)),
    }
}

/// Action indices of a function keyed by the path of the node they run
/// at. `at` actions are keyed by their nonterminal symbol node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Placement {
    pub before: BTreeMap<Vec<usize>, Vec<usize>>,
    pub at: BTreeMap<Vec<usize>, Vec<usize>>,
    pub after: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl Placement {
    pub fn of(rule: &Rule, f: &TranslationFunction) -> Placement {
        let mut place = Placement::default();
        for (i, a) in f.actions.iter().enumerate() {
            for occ in &a.occurrences {
                let (map, path) = match a.position {
                    Position::Before => (&mut place.before, occ.path.clone()),
                    Position::After => (&mut place.after, occ.path.clone()),
                    Position::At => match nonterminal_at(&rule.rhs, &occ.path) {
                        Some((p, _)) => (&mut place.at, p),
                        None => continue,
                    },
                };
                map.entry(path).or_default().push(i);
            }
        }
        place
    }

    pub fn before_at(&self, path: &[usize]) -> &[usize] {
        self.before.get(path).map_or(&[], Vec::as_slice)
    }

    pub fn at_at(&self, path: &[usize]) -> &[usize] {
        self.at.get(path).map_or(&[], Vec::as_slice)
    }

    pub fn after_at(&self, path: &[usize]) -> &[usize] {
        self.after.get(path).map_or(&[], Vec::as_slice)
    }
}

/// Builds the graph of `f` over `rule`. Sequences chain, alternatives
/// fork at a branch and meet at a join, and iterations loop through a loop
/// head: `*` may leave before the first pass, `+` only after one. An
/// optional phrase is an alternative with an empty option.
pub fn build_cfg(rule: &Rule, f: &TranslationFunction) -> Cfg {
    let place = Placement::of(rule, f);
    let mut b = Builder {
        g: Cfg::empty(),
        f,
        place,
    };
    let end = b.node(&rule.rhs, &mut Vec::new(), Cfg::ENTRY);
    b.g.add_edge(end, Cfg::EXIT, Vec::new());
    b.g
}

struct Builder<'f> {
    g: Cfg,
    f: &'f TranslationFunction,
    place: Placement,
}

impl Builder<'_> {
    fn actions(&mut self, indices: Option<Vec<usize>>, mut cur: usize) -> usize {
        for i in indices.unwrap_or_default() {
            let a = &self.f.actions[i];
            let n = self.g.add_node(NodeKind::Action {
                index: i,
                position: a.position,
            });
            self.g.add_edge(cur, n, statement_accesses(&a.body));
            cur = n;
        }
        cur
    }

    fn node(&mut self, e: &RhsExpr, path: &mut Vec<usize>, cur: usize) -> usize {
        let before = self.place.before.get(path.as_slice()).cloned();
        let mut cur = self.actions(before, cur);
        cur = match e {
            RhsExpr::Sequence(items) => {
                for (i, item) in items.iter().enumerate() {
                    path.push(i);
                    cur = self.node(item, path, cur);
                    path.pop();
                }
                cur
            }
            RhsExpr::Alternative(alts) => {
                let branch = self.g.add_node(NodeKind::Branch);
                self.g.add_edge(cur, branch, Vec::new());
                let join = self.g.add_node(NodeKind::Join);
                for (i, alt) in alts.iter().enumerate() {
                    path.push(i);
                    let end = self.node(alt, path, branch);
                    path.pop();
                    self.g.add_edge(end, join, Vec::new());
                }
                join
            }
            RhsExpr::Optional(child) => {
                let branch = self.g.add_node(NodeKind::Branch);
                self.g.add_edge(cur, branch, Vec::new());
                let join = self.g.add_node(NodeKind::Join);
                path.push(0);
                let end = self.node(child, path, branch);
                path.pop();
                self.g.add_edge(end, join, Vec::new());
                self.g.add_edge(branch, join, Vec::new());
                join
            }
            RhsExpr::Iteration { child, min } => {
                let head = self.g.add_node(NodeKind::LoopHead);
                self.g.add_edge(cur, head, Vec::new());
                path.push(0);
                let end = self.node(child, path, head);
                path.pop();
                self.g.add_edge(end, head, Vec::new());
                if *min == 0 {
                    head
                } else {
                    end
                }
            }
            RhsExpr::Labeled { child, .. } => {
                path.push(0);
                let end = self.node(child, path, cur);
                path.pop();
                end
            }
            RhsExpr::Symbol(s) => {
                let m = self.g.add_node(NodeKind::Match {
                    path: path.clone(),
                    name: s.name.clone(),
                    kind: s.kind,
                });
                self.g.add_edge(cur, m, Vec::new());
                let at = self.place.at.get(path.as_slice()).cloned();
                self.actions(at, m)
            }
            RhsExpr::CharRange { .. } => {
                let m = self.g.add_node(NodeKind::Match {
                    path: path.clone(),
                    name: String::new(),
                    kind: SymbolKind::Literal,
                });
                self.g.add_edge(cur, m, Vec::new());
                m
            }
        };
        let after = self.place.after.get(path.as_slice()).cloned();
        self.actions(after, cur)
    }
}
