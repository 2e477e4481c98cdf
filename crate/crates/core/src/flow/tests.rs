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

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;

use super::*;
use crate::diag::{Code, Span};
use crate::grammar::{RhsExpr, Rule, Site, Symbol};
use crate::syntax::ast::*;
use crate::syntax::parse_specification;
use crate::testutil::*;

fn cfg_of(text: &str, function: &str) -> (Cfg, TranslationFunction) {
    let spec = parse_specification(text, &simple_ext()).unwrap_or_else(|e| panic!("{e:?}"));
    let f = spec.function(function).unwrap().clone();
    let rule = spec.grammar.rule(&f.for_rule).unwrap();
    (build_cfg(rule, &f), f)
}

fn access_labels(e: &CfgEdge) -> Vec<String> {
    e.accesses
        .iter()
        .map(|a| match a.kind {
            AccessKind::Read => format!("{}[r]", a.name),
            AccessKind::Write => format!("{}[w]", a.name),
            AccessKind::TokenText => format!("{}#", a.name),
        })
        .collect()
}

/// Nodes reachable from `from`, including itself.
fn reach(cfg: &Cfg, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        for s in cfg.successors(n) {
            if seen.insert(s) {
                stack.push(s);
            }
        }
    }
    seen
}

#[test]
fn expr_graph_has_one_loop_around_one_branch() {
    let (cfg, f) = cfg_of(ARITH, "expr");
    let loops: Vec<_> = cfg
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::LoopHead)
        .collect();
    let branches: Vec<_> = cfg
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Branch)
        .collect();
    assert_eq!(loops.len(), 1);
    assert_eq!(branches.len(), 1);
    // The branch lies on the cycle through the loop head.
    let head = loops[0].id;
    let branch = branches[0].id;
    assert!(reach(&cfg, head).contains(&branch));
    assert!(reach(&cfg, branch).contains(&head));
    assert!(check_definite_assignment(&cfg, &f).is_empty());

    // Accesses along the first term: before $t1, at term, after term.
    let seq: Vec<String> = cfg
        .edges
        .iter()
        .filter(|e| !e.accesses.is_empty())
        .take(3)
        .flat_map(access_labels)
        .collect();
    assert_eq!(
        seq,
        [
            "result[w]",
            "sign[w]",
            "env[r]",
            "t[w]",
            "result[r]",
            "sign[r]",
            "t[r]",
            "result[w]"
        ]
    );
}

#[test]
fn single_symbol_chain() {
    let (cfg, _) = cfg_of(
        "a : B ; a(Int y) --> () { after B : x = y; }\nB : 'b' ;",
        "a",
    );
    assert_eq!(cfg.nodes.len(), 4);
    let kinds: Vec<_> = cfg
        .nodes
        .iter()
        .map(|n| std::mem::discriminant(&n.kind))
        .collect();
    assert_eq!(kinds[0], std::mem::discriminant(&NodeKind::Entry));
    assert!(matches!(cfg.nodes[2].kind, NodeKind::Match { ref name, .. } if name == "B"));
    assert!(matches!(
        cfg.nodes[3].kind,
        NodeKind::Action {
            index: 0,
            position: Position::After
        }
    ));
    let edges: Vec<_> = cfg.edges.iter().map(|e| (e.from, e.to)).collect();
    assert_eq!(edges, [(0, 2), (2, 3), (3, 1)]);
    assert_eq!(access_labels(&cfg.edges[1]), ["y[r]", "x[w]"]);
}

#[test]
fn optional_has_an_empty_edge() {
    let (cfg, _) = cfg_of("a : B? ; a() --> () { }\nB : 'b' ;", "a");
    let branch = cfg
        .nodes
        .iter()
        .find(|n| n.kind == NodeKind::Branch)
        .unwrap()
        .id;
    let join = cfg
        .nodes
        .iter()
        .find(|n| n.kind == NodeKind::Join)
        .unwrap()
        .id;
    assert!(cfg
        .edges
        .iter()
        .any(|e| e.from == branch && e.to == join && e.accesses.is_empty()));
    assert!(cfg.edges.iter().any(|e| e.from == branch
        && matches!(cfg.nodes[e.to].kind, NodeKind::Match { ref name, .. } if name == "B")));
}

#[test]
fn token_name_read_as_attribute() {
    let (cfg, f) = cfg_of(ARITH_UNINIT, "factor");
    let d = check_definite_assignment(&cfg, &f);
    assert_eq!(d.len(), 1, "{d:?}");
    assert_eq!(d[0].code, Code::Uninitialized);
    assert_eq!(
        d[0].message,
        "The local attribute INT might have not been initialized"
    );
}

#[test]
fn every_arith_function_is_clean() {
    for name in ["expr", "term", "factor"] {
        let (cfg, f) = cfg_of(ARITH, name);
        assert!(check_definite_assignment(&cfg, &f).is_empty(), "{name}");
    }
}

#[test]
fn output_unassigned_when_loop_skipped() {
    let (cfg, f) = cfg_of(
        "a : B* ; a() --> (Int r) { after B : r = zero(); }\nB : 'b' ;",
        "a",
    );
    let d = check_definite_assignment(&cfg, &f);
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].code, Code::OutputUnassigned);
    // With '+' the body runs at least once.
    let (cfg, f) = cfg_of(
        "a : B+ ; a() --> (Int r) { after B : r = zero(); }\nB : 'b' ;",
        "a",
    );
    assert!(check_definite_assignment(&cfg, &f).is_empty());
}

#[test]
fn read_in_one_branch_only() {
    let text = "a : B | C ; a() --> (Int r) { after B : x = zero(); after C : r = x; after B : r = x; }\nB : 'b' ; C : 'c' ;";
    let (cfg, f) = cfg_of(text, "a");
    let d = check_definite_assignment(&cfg, &f);
    assert_eq!(d.len(), 1);
    assert_eq!(
        d[0].message,
        "The local attribute x might have not been initialized"
    );
}

#[test]
fn self_assignment_reads_first() {
    let (cfg, f) = cfg_of("a : B ; a() --> () { after B : x = f(x); }\nB : 'b' ;", "a");
    assert_eq!(
        check_definite_assignment(&cfg, &f)[0].code,
        Code::Uninitialized
    );
}

#[test]
fn token_text_before_match() {
    let text = "a : B C ; a() --> (String s) { before B : s = C#; }\nB : 'b' ; C : 'c' ;";
    let (cfg, f) = cfg_of(text, "a");
    let d = check_definite_assignment(&cfg, &f);
    assert_eq!(d[0].code, Code::TokenTextUnavailable);
    let (cfg, f) = cfg_of(&text.replace("before B", "after C"), "a");
    assert!(check_definite_assignment(&cfg, &f).is_empty());
}

#[test]
fn dot_output() {
    let (cfg, f) = cfg_of(ARITH, "expr");
    let dot = to_dot(&cfg, &f);
    assert!(dot.starts_with("digraph \"expr\" {"));
    assert!(dot.contains("label=\"env[r] t[w]\""));
    assert!(dot.contains("loop"));
}

// Random graphs checked against path enumeration.

#[derive(Clone, Debug)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize, Vec<(u8, bool)>)>,
}

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn graph(raw: &RawGraph) -> Cfg {
    let mut g = Cfg::empty();
    for _ in 2..raw.n {
        g.add_node(NodeKind::Join);
    }
    for (from, to, acc) in &raw.edges {
        let accesses = acc
            .iter()
            .map(|&(name, write)| Access {
                name: NAMES[name as usize].to_string(),
                kind: if write {
                    AccessKind::Write
                } else {
                    AccessKind::Read
                },
                span: Span::default(),
            })
            .collect();
        g.add_edge(*from, *to, accesses);
    }
    g
}

fn raw_graph() -> impl Strategy<Value = RawGraph> {
    (2usize..=12).prop_flat_map(|n| {
        let edge = (
            0..n,
            1..n,
            prop::collection::vec((0u8..4, any::<bool>()), 0..3),
        )
            .prop_filter("no edges out of exit", |(f, _, _)| *f != Cfg::EXIT);
        prop::collection::vec(edge, 1..(n + 4)).prop_map(move |edges| RawGraph { n, edges })
    })
}

/// Intersection of write sets over all paths from entry to each node that
/// use every edge at most twice.
fn enumerate(cfg: &Cfg, initial: &BTreeSet<Fact>) -> Vec<Option<BTreeSet<Fact>>> {
    let mut result: Vec<Option<BTreeSet<Fact>>> = vec![None; cfg.nodes.len()];
    let mut uses: HashMap<usize, u8> = HashMap::new();
    fn go(
        cfg: &Cfg,
        node: usize,
        facts: BTreeSet<Fact>,
        uses: &mut HashMap<usize, u8>,
        result: &mut Vec<Option<BTreeSet<Fact>>>,
    ) {
        result[node] = Some(match result[node].take() {
            None => facts.clone(),
            Some(r) => r.intersection(&facts).cloned().collect(),
        });
        for (i, e) in cfg.edges.iter().enumerate() {
            if e.from != node || e.to == Cfg::ENTRY || uses.get(&i).copied().unwrap_or(0) >= 2 {
                continue;
            }
            let mut next = facts.clone();
            for a in &e.accesses {
                if a.kind == AccessKind::Write {
                    next.insert(Fact::Assigned(a.name.clone()));
                }
            }
            *uses.entry(i).or_default() += 1;
            go(cfg, e.to, next, uses, result);
            *uses.get_mut(&i).unwrap() -= 1;
        }
    }
    go(cfg, Cfg::ENTRY, initial.clone(), &mut uses, &mut result);
    result
}

fn random_function(
    rhs: RhsExpr,
    acts: Vec<(bool, usize, usize, usize)>,
) -> (Rule, TranslationFunction) {
    let rule = Rule::new("r", rhs, false, Span::default());
    let mut actions = Vec::new();
    for (after, site, read, write) in acts {
        let site = Site::Symbol(["B", "C"][site].to_string());
        let Ok(occurrences) = rule.resolve_action_site(&site) else {
            continue;
        };
        let id = |n: usize| Ident::new(NAMES[n], Span::default());
        actions.push(PositionedAction {
            position: if after {
                Position::After
            } else {
                Position::Before
            },
            site,
            site_span: Span::default(),
            occurrences,
            body: Stmt::Assign {
                lhs: Lhs::Single(id(write)),
                rhs: Expr::Attr(id(read)),
                span: Span::default(),
            },
        });
    }
    let f = TranslationFunction {
        name: Ident::new("r", Span::default()),
        for_rule: "r".into(),
        inputs: vec![AttributeDecl {
            name: Ident::new("a", Span::default()),
            ty: None,
            role: Role::Input,
        }],
        outputs: Vec::new(),
        locals: Vec::new(),
        actions,
    };
    (rule, f)
}

fn rhs() -> impl Strategy<Value = RhsExpr> {
    let leaf = prop::sample::select(vec!["B", "C"])
        .prop_map(|n| RhsExpr::Symbol(Symbol::rule(n, Span::default())));
    leaf.prop_recursive(3, 10, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(RhsExpr::Sequence),
            prop::collection::vec(inner.clone(), 2..3).prop_map(RhsExpr::Alternative),
            (inner.clone(), 0u8..2).prop_map(|(c, min)| RhsExpr::Iteration {
                child: Box::new(c),
                min
            }),
            inner.prop_map(|c| RhsExpr::Optional(Box::new(c))),
        ]
    })
}

fn actions() -> impl Strategy<Value = Vec<(bool, usize, usize, usize)>> {
    prop::collection::vec((any::<bool>(), 0usize..2, 0usize..4, 0usize..4), 0..5)
}

proptest! {
    #[test]
    fn fixpoint_matches_path_enumeration(raw in raw_graph()) {
        let cfg = graph(&raw);
        let initial = BTreeSet::from([Fact::Assigned("a".into())]);
        prop_assert_eq!(definitely_assigned(&cfg, &initial), enumerate(&cfg, &initial));
    }

    #[test]
    fn built_graphs_match_path_enumeration(rhs in rhs(), acts in actions()) {
        let (rule, f) = random_function(rhs, acts);
        let cfg = build_cfg(&rule, &f);
        prop_assume!(cfg.nodes.len() <= 12);
        let initial = BTreeSet::from([Fact::Assigned("a".into())]);
        let fix = definitely_assigned(&cfg, &initial);
        let fix: Vec<_> = fix
            .into_iter()
            .map(|s| s.map(|s| s.into_iter().filter(|f| matches!(f, Fact::Assigned(_))).collect::<BTreeSet<_>>()))
            .collect();
        prop_assert_eq!(fix, enumerate(&cfg, &initial));
    }

    #[test]
    fn every_node_lies_on_an_entry_exit_path(rhs in rhs(), acts in actions()) {
        let (rule, f) = random_function(rhs, acts);
        let cfg = build_cfg(&rule, &f);
        let from_entry = reach(&cfg, Cfg::ENTRY);
        for n in &cfg.nodes {
            prop_assert!(from_entry.contains(&n.id));
            prop_assert!(reach(&cfg, n.id).contains(&Cfg::EXIT));
        }
    }

    #[test]
    fn adding_a_write_never_adds_errors(rhs in rhs(), acts in actions(), extra in (any::<bool>(), 0usize..2, 0usize..4)) {
        let (rule, f) = random_function(rhs.clone(), acts.clone());
        let before = check_definite_assignment(&build_cfg(&rule, &f), &f);
        let mut more = acts;
        // Reads the input, so it adds a write and no failing read.
        more.push((extra.0, extra.1, 0, extra.2));
        let (rule2, f2) = random_function(rhs, more);
        let after = check_definite_assignment(&build_cfg(&rule2, &f2), &f2);
        prop_assert!(after.len() <= before.len(), "{before:?} / {after:?}");
    }
}
