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

//! One check per acceptance criterion. Each prints a PASS/FAIL line; the
//! test fails if any criterion does.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use common::*;
use tpg_core::backend::{emit, interpret, plan_for, RuntimeError};
use tpg_core::check::solver::{solve, Constraint, SolveError, Term, VarId};
use tpg_core::diag::{Code, Span};
use tpg_core::driver::analyze;
use tpg_core::flow::{build_cfg, definitely_assigned, Access, AccessKind, Cfg, Fact, NodeKind};
use tpg_core::types::{
    DeclarativeExtension, Extension, FiniteTypeSystem, GroundTypeSystem, TypeId,
};

const INTERPRETER_BUDGET: Duration = Duration::from_secs(1);
const SOLVER_CASES: u32 = 500;
const SOLVER_BUDGET: Duration = Duration::from_secs(30);
const SOLVER_MAX_TYPES: usize = 6;
const SOLVER_MAX_VARS: usize = 5;
const SOLVER_MAX_CONSTRAINTS: usize = 10;
const CLOSURE_CASES: u32 = 500;
const CLOSURE_MAX_TYPES: usize = 8;
const CFG_CASES: u32 = 500;
const CFG_MAX_NODES: usize = 12;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_criterion(n: u32, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    match &result {
        Ok(()) => println!("criterion {n} PASS: {title}"),
        Err(e) => println!("criterion {n} FAIL: {title}: {e}"),
    }
    result.is_ok()
}

#[test]
fn acceptance() {
    let results = [
        run_criterion(
            1,
            "end-to-end evaluation of the arithmetic example",
            end_to_end,
        ),
        run_criterion(2, "error walkthrough diagnostics", error_walkthrough),
        run_criterion(3, "inferred local types", inference),
        run_criterion(
            4,
            "solver agrees with exhaustive enumeration",
            solver_oracle,
        ),
        run_criterion(5, "subtyping closure", subtyping_closure),
        run_criterion(6, "definite assignment matches path enumeration", data_flow),
        run_criterion(7, "ANTLR emission", emission),
        run_criterion(
            8,
            "failing specifications emit nothing",
            no_output_on_errors,
        ),
    ];
    let failed: Vec<_> = (1..)
        .zip(results)
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n)
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

fn end_to_end() -> Outcome {
    let started = Instant::now();
    let v = validated(ARITH);
    let table = arithmetic_bindings(&v);
    let env = environment(&v, &[("x", 4)]);
    let out = interpret(&v, "expr", None, vec![env.clone()], "x*(3+2)", &table)
        .map_err(|e| e.to_string())?;
    ensure(out.len() == 1 && out[0].as_int() == Some(20), || {
        format!("got {out:?}")
    })?;
    match interpret(&v, "expr", None, vec![env], "(x+*3)", &table) {
        Err(RuntimeError::Parse { .. }) => {}
        other => return Err(format!("expected a parse error, got {other:?}")),
    }
    let elapsed = started.elapsed();
    ensure(elapsed < INTERPRETER_BUDGET, || format!("took {elapsed:?}"))
}

fn error_walkthrough() -> Outcome {
    let expect_one = |text: &str, code: Code, message: &str| -> Outcome {
        let d = analyze(text, java_env().ext)
            .err()
            .ok_or("no diagnostics")?;
        ensure(
            d.len() == 1 && d[0].code == code && d[0].message == message,
            || format!("{d:?}"),
        )
    };
    expect_one(
        ARITH_UNINIT,
        Code::Uninitialized,
        "The local attribute INT might have not been initialized",
    )?;
    expect_one(
        ARITH_STRING,
        Code::IncompatibleTypes,
        "Incompatible types: String and Int",
    )?;
    analyze(ARITH, java_env().ext)
        .map(|_| ())
        .map_err(|d| format!("{d:?}"))
}

fn object_integer() -> DeclarativeExtension {
    let sys = FiniteTypeSystem::new(
        "ObjectInteger",
        vec!["Object".into(), "Integer".into()],
        &[(TypeId(1), TypeId(0))],
        TypeId(0),
        Some(TypeId(0)),
    )
    .unwrap();
    DeclarativeExtension::new(sys, None)
}

fn inference() -> Outcome {
    let v = validated(ARITH);
    let int = v.ext.types().lookup("Int").unwrap();
    let t = v.function_types("expr").and_then(|f| f.type_of("t"));
    ensure(t == Some(int), || format!("t in expr is {t:?}"))?;

    let oi: std::sync::Arc<dyn Extension> = std::sync::Arc::new(object_integer());
    let text = "a : B C ;
  a(Integer x) --> (Object result) { before B : t = x; after C : result = t; }
B : 'b' ;
C : 'c' ;";
    let v = analyze(text, oi.clone()).map_err(|d| format!("{d:?}"))?;
    let t = v
        .function_types("a")
        .and_then(|f| f.type_of("t"))
        .map(|t| oi.types().type_name(t).to_string());
    ensure(t.as_deref() == Some("Integer"), || format!("t is {t:?}"))?;

    let unconstrained = "a : B ;\n  a() --> () { after B : u = f(); }\nB : 'b' ;";
    let v = analyze(unconstrained, oi.clone()).map_err(|d| format!("{d:?}"))?;
    let u = v
        .function_types("a")
        .and_then(|f| f.type_of("u"))
        .map(|t| oi.types().type_name(t).to_string());
    ensure(u.as_deref() == Some("Object"), || format!("u is {u:?}"))?;
    let d = analyze(unconstrained, java_env().ext)
        .err()
        .ok_or("no error without a top type")?;
    ensure(d.iter().any(|d| d.code == Code::NoTopType), || {
        format!("{d:?}")
    })
}

// Solver oracle.

#[derive(Clone, Debug)]
struct RandomSystem {
    n: usize,
    pairs: Vec<(usize, usize)>,
    top: bool,
}

impl RandomSystem {
    fn build(&self) -> FiniteTypeSystem {
        let pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|&(a, b)| (TypeId(a as u32), TypeId(b as u32)))
            .collect();
        FiniteTypeSystem::new(
            "Random",
            (0..self.n).map(|i| format!("T{i}")).collect(),
            &pairs,
            TypeId(0),
            self.top.then(|| TypeId(self.n as u32 - 1)),
        )
        .unwrap()
    }
}

/// Acyclic by construction: supertypes have smaller indices, and the top
/// type (the last index) is below nothing.
fn random_system(max: usize) -> impl Strategy<Value = RandomSystem> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec((0..n, 0..n), 0..=2 * n),
            any::<bool>(),
        )
            .prop_map(move |(raw, top)| RandomSystem {
                n,
                pairs: raw
                    .into_iter()
                    .filter(|&(a, b)| a > b && !(top && a == n - 1))
                    .collect(),
                top,
            })
    })
}

fn random_constraints(types: usize, vars: usize) -> impl Strategy<Value = Vec<Constraint>> {
    let term = prop_oneof![
        (0..types).prop_map(|t| Term::Ground(TypeId(t as u32))),
        (0..vars).prop_map(|v| Term::Var(VarId(v as u32))),
    ];
    prop::collection::vec((term.clone(), term), 0..=SOLVER_MAX_CONSTRAINTS).prop_map(|cs| {
        cs.into_iter()
            .map(|(a, b)| Constraint::new(a, b, Span::default()))
            .collect()
    })
}

fn eval(t: Term, a: &[TypeId]) -> TypeId {
    match t {
        Term::Ground(g) => g,
        Term::Var(v) => a[v.0 as usize],
    }
}

fn satisfied(sys: &dyn GroundTypeSystem, cs: &[Constraint], a: &[TypeId]) -> bool {
    cs.iter()
        .all(|c| sys.is_subtype(eval(c.lower, a), eval(c.upper, a)))
}

fn every_assignment(n_types: usize, n_vars: usize) -> impl Iterator<Item = Vec<TypeId>> {
    let total = n_types.pow(n_vars as u32);
    (0..total).map(move |mut k| {
        (0..n_vars)
            .map(|_| {
                let t = TypeId((k % n_types) as u32);
                k /= n_types;
                t
            })
            .collect()
    })
}

/// Variables reachable from a ground type along `lower ≤ upper` edges.
fn has_lower_bound(n_vars: usize, cs: &[Constraint]) -> Vec<bool> {
    let mut lb = vec![false; n_vars];
    for _ in 0..=n_vars {
        for c in cs {
            if let Term::Var(v) = c.upper {
                if matches!(c.lower, Term::Ground(_))
                    || matches!(c.lower, Term::Var(w) if lb[w.0 as usize])
                {
                    lb[v.0 as usize] = true;
                }
            }
        }
    }
    lb
}

fn solver_oracle() -> Outcome {
    let started = Instant::now();
    let strategy = random_system(SOLVER_MAX_TYPES).prop_flat_map(|s| {
        let n = s.n;
        (Just(s), 1..=SOLVER_MAX_VARS)
            .prop_flat_map(move |(s, v)| (Just(s), Just(v), random_constraints(n, v)))
    });
    let mut runner = TestRunner::new(Config {
        cases: SOLVER_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, |(s, n_vars, cs)| {
            let sys = s.build();
            let solutions: Vec<_> = every_assignment(s.n, n_vars)
                .filter(|a| satisfied(&sys, &cs, a))
                .collect();
            match solve(&sys, n_vars, &cs) {
                Ok(a) => {
                    prop_assert!(!solutions.is_empty());
                    prop_assert!(satisfied(&sys, &cs, &a), "{a:?} violates {cs:?}");
                    let lb = has_lower_bound(n_vars, &cs);
                    for other in &solutions {
                        let below = (0..n_vars)
                            .filter(|&v| lb[v])
                            .all(|v| sys.is_subtype(other[v], a[v]));
                        let strict = (0..n_vars).any(|v| lb[v] && other[v] != a[v]);
                        prop_assert!(!(below && strict), "{other:?} lies strictly below {a:?}");
                    }
                }
                Err(errors) => {
                    let unsat = errors
                        .iter()
                        .any(|e| matches!(e, SolveError::Incompatible { .. }));
                    prop_assert_eq!(unsat, solutions.is_empty(), "{:?}", errors);
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(elapsed < SOLVER_BUDGET, || format!("took {elapsed:?}"))
}

fn subtyping_closure() -> Outcome {
    let env = java_env();
    let sys = env.ext.types();
    let id = |n: &str| sys.lookup(n).unwrap();
    ensure(sys.is_subtype(id("Environment"), id("Object")), || {
        "Environment ≤ Object missing".into()
    })?;
    ensure(sys.is_subtype(id("String"), id("Object")), || {
        "String ≤ Object missing".into()
    })?;
    ensure(!sys.is_subtype(id("Int"), id("Object")), || {
        "Int ≤ Object holds".into()
    })?;

    let mut runner = TestRunner::new(Config {
        cases: CLOSURE_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (1..=CLOSURE_MAX_TYPES).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..=3 * n).prop_map(move |raw| {
            (
                n,
                raw.into_iter().filter(|&(a, b)| a > b).collect::<Vec<_>>(),
            )
        })
    });
    runner
        .run(&strategy, |(n, pairs)| {
            let typed: Vec<_> = pairs
                .iter()
                .map(|&(a, b)| (TypeId(a as u32), TypeId(b as u32)))
                .collect();
            let sys = FiniteTypeSystem::new(
                "Dag",
                (0..n).map(|i| format!("T{i}")).collect(),
                &typed,
                TypeId(0),
                None,
            )
            .map_err(|e| TestCaseError::fail(format!("{e:?}")))?;
            for a in 0..n {
                // Depth-first search from `a` over the declared pairs.
                let mut seen = BTreeSet::from([a]);
                let mut stack = vec![a];
                while let Some(x) = stack.pop() {
                    for &(s, t) in &pairs {
                        if s == x && seen.insert(t) {
                            stack.push(t);
                        }
                    }
                }
                for b in 0..n {
                    prop_assert_eq!(
                        sys.is_subtype(TypeId(a as u32), TypeId(b as u32)),
                        seen.contains(&b)
                    );
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// Data-flow oracle.

const ATTRS: [&str; 4] = ["a", "b", "c", "d"];

type RawEdge = (usize, usize, Vec<(usize, bool)>);

fn random_cfg(nodes: usize, edges: &[RawEdge]) -> Cfg {
    let mut g = Cfg::empty();
    while g.nodes.len() < nodes {
        g.add_node(NodeKind::Join);
    }
    for (from, to, acc) in edges {
        let accesses = acc
            .iter()
            .map(|&(a, write)| Access {
                name: ATTRS[a].to_string(),
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

/// Meet over every path from the entry that traverses each edge at most
/// twice.
fn paths_oracle(g: &Cfg) -> Vec<Option<BTreeSet<String>>> {
    fn walk(
        g: &Cfg,
        at: usize,
        written: BTreeSet<String>,
        used: &mut HashMap<usize, u32>,
        out: &mut Vec<Option<BTreeSet<String>>>,
    ) {
        out[at] = Some(match out[at].take() {
            Some(prev) => prev.intersection(&written).cloned().collect(),
            None => written.clone(),
        });
        for (i, e) in g.edges.iter().enumerate() {
            if e.from != at || e.to == Cfg::ENTRY || used.get(&i).copied().unwrap_or(0) == 2 {
                continue;
            }
            let mut next = written.clone();
            next.extend(
                e.accesses
                    .iter()
                    .filter(|a| a.kind == AccessKind::Write)
                    .map(|a| a.name.clone()),
            );
            *used.entry(i).or_default() += 1;
            walk(g, e.to, next, used, out);
            *used.get_mut(&i).unwrap() -= 1;
        }
    }
    let mut out = vec![None; g.nodes.len()];
    walk(
        g,
        Cfg::ENTRY,
        BTreeSet::new(),
        &mut HashMap::new(),
        &mut out,
    );
    out
}

fn reachable(g: &Cfg, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<usize> = g.successors(from).collect();
    while let Some(x) = stack.pop() {
        if seen.insert(x) {
            stack.extend(g.successors(x));
        }
    }
    seen
}

fn data_flow() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: CFG_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (2..=CFG_MAX_NODES).prop_flat_map(|n| {
        let edge = (
            0..n,
            1..n,
            prop::collection::vec((0..ATTRS.len(), any::<bool>()), 0..3),
        )
            .prop_filter("exit has no successors", |(from, _, _)| *from != Cfg::EXIT);
        (Just(n), prop::collection::vec(edge, 1..=n + 4))
    });
    runner
        .run(&strategy, |(n, edges)| {
            let g = random_cfg(n, &edges);
            let fixpoint = definitely_assigned(&g, &BTreeSet::new());
            let expected = paths_oracle(&g);
            for node in 0..n {
                let got = fixpoint[node].as_ref().map(|facts| {
                    facts
                        .iter()
                        .filter_map(|f| match f {
                            Fact::Assigned(a) => Some(a.clone()),
                            Fact::TokenMatched(_) => None,
                        })
                        .collect::<BTreeSet<_>>()
                });
                prop_assert_eq!(&got, &expected[node], "node {}", node);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    // exprTF: one loop whose body contains the single branch.
    let v = validated(ARITH);
    let f = v.spec.function("expr").unwrap();
    let g = build_cfg(v.spec.grammar.rule("expr").unwrap(), f);
    let loops: Vec<_> = g
        .nodes
        .iter()
        .filter(|x| x.kind == NodeKind::LoopHead)
        .map(|x| x.id)
        .collect();
    let branches: Vec<_> = g
        .nodes
        .iter()
        .filter(|x| x.kind == NodeKind::Branch)
        .map(|x| x.id)
        .collect();
    ensure(loops.len() == 1 && branches.len() == 1, || {
        format!("loops {loops:?}, branches {branches:?}")
    })?;
    let (head, branch) = (loops[0], branches[0]);
    ensure(
        reachable(&g, head).contains(&branch) && reachable(&g, branch).contains(&head),
        || "the branch is not inside the loop".into(),
    )?;
    ensure(reachable(&g, Cfg::ENTRY).contains(&Cfg::EXIT), || {
        "exit unreachable".into()
    })
}

/// Java and ANTLR 3 keywords, listed independently of the emitter.
const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
    "var",
    "grammar",
    "lexer",
    "parser",
    "tree",
    "fragment",
    "returns",
    "options",
    "tokens",
    "scope",
    "throws",
    "catch",
    "finally",
    "init",
    "after",
    "header",
    "members",
];

fn emission() -> Outcome {
    let v = validated(ARITH);
    let profile = java_env().profile;
    let first = emit(&v, profile.as_ref()).map_err(|e| e.to_string())?;
    let second = emit(&v, profile.as_ref()).map_err(|e| e.to_string())?;
    ensure(first == second, || "two runs differ".into())?;
    ensure(first.grammar == GOLDEN_GRAMMAR, || {
        "grammar differs from the golden file".into()
    })?;
    ensure(first.externals == GOLDEN_EXTERNALS, || {
        "interface differs from the golden file".into()
    })?;
    ensure(
        first
            .grammar
            .contains("expr[java.util.Map<String, Integer> env] returns [int result]"),
        || "expr header missing".into(),
    )?;

    // Action placement inside expr: initialization, the first term, the
    // loop with the sign reset, the '-' negation and the accumulation.
    let start = first.grammar.find("\nexpr[").ok_or("no expr rule")?;
    let rule = &first.grammar
        [start..start + first.grammar[start..].find("\n\t;").ok_or("unterminated")?];
    let mut at = 0;
    for piece in [
        "$result = externals.zero();",
        "=term[$env]",
        "$result = externals.add($result, externals.mul(sign, t));",
        "( { sign = externals.one(); }",
        "'-' { sign = externals.neg(sign); }",
        "=term[$env]",
        "$result = externals.add($result, externals.mul(sign, t));",
        ")*",
    ] {
        at += rule[at..]
            .find(piece)
            .ok_or_else(|| format!("{piece} out of place"))?
            + piece.len();
    }

    let mut plan = plan_for(&v, profile.clone());
    tpg_core::backend::emit_antlr_grammar(&v, &mut plan).map_err(|e| e.to_string())?;
    for name in plan.renames.values() {
        ensure(
            !KEYWORDS.contains(&name.as_str()) && !plan.is_reserved(name),
            || format!("{name} is reserved"),
        )?;
    }
    Ok(())
}

fn no_output_on_errors() -> Outcome {
    for text in [ARITH_UNINIT, ARITH_STRING] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let spec = dir.path().join("spec.gpg");
        std::fs::write(&spec, text).map_err(|e| e.to_string())?;
        let out = dir.path().join("out");
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_tpg"))
            .args(["emit", spec.to_str().unwrap(), "--typesystem"])
            .arg(fixture("simple.gts"))
            .args([
                "--profile",
                "ANTLRJavaBackend",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.code() == Some(1), || {
            format!("exit code {:?}", status.status.code())
        })?;
        let written = walk_files(dir.path())
            .into_iter()
            .filter(|p| *p != spec)
            .count();
        ensure(written == 0, || format!("{written} files written"))?;
    }
    Ok(())
}

fn walk_files(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).into_iter().flatten().flatten() {
        let p = entry.path();
        if p.is_dir() {
            out.extend(walk_files(&p));
        } else {
            out.push(p);
        }
    }
    out
}
