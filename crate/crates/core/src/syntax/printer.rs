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

//! Canonical text form of a specification. Re-parsing the output yields a
//! structurally identical model.

use std::fmt::Write;

use crate::grammar::{escape_literal, RhsExpr, Rule, SymbolKind};
use crate::syntax::ast::*;

pub fn print_specification(spec: &Specification) -> String {
    let mut out = String::new();
    print_declarations(&spec.declarations, &mut out);
    for ext in &spec.externals {
        let _ = writeln!(
            out,
            "{}({}) --> ({});",
            ext.name.name,
            params(&ext.inputs),
            params(&ext.outputs)
        );
    }
    if !spec.externals.is_empty() {
        out.push('\n');
    }
    for rule in &spec.grammar.rules {
        out.push_str(&print_rule(rule));
        out.push('\n');
        for f in spec.functions_for(&rule.name) {
            print_function(f, &mut out);
        }
    }
    out
}

fn print_declarations(d: &Declarations, out: &mut String) {
    if !d.options.is_empty() {
        out.push_str("#javaoptions {\n");
        for (k, v) in &d.options {
            let _ = writeln!(out, "    {k} = '{}';", escape_literal(v));
        }
        out.push_str("}\n");
    }
    for i in &d.imports {
        let _ = writeln!(out, "import {i};");
    }
    if !d.is_empty() {
        out.push('\n');
    }
}

pub fn print_rule(rule: &Rule) -> String {
    format!(
        "{}{} : {} ;",
        if rule.is_fragment { "fragment " } else { "" },
        rule.name,
        print_rhs(&rule.rhs)
    )
}

pub fn print_rhs(e: &RhsExpr) -> String {
    match e {
        RhsExpr::Alternative(alts) => alts
            .iter()
            .map(|a| match a {
                RhsExpr::Alternative(_) => format!("({})", print_rhs(a)),
                _ => print_rhs(a),
            })
            .collect::<Vec<_>>()
            .join(" | "),
        RhsExpr::Sequence(items) => items
            .iter()
            .map(|i| match i {
                RhsExpr::Alternative(_) | RhsExpr::Sequence(_) => format!("({})", print_rhs(i)),
                _ => print_rhs(i),
            })
            .collect::<Vec<_>>()
            .join(" "),
        RhsExpr::Iteration { child, min } => {
            format!(
                "{}{}",
                postfix_operand(child),
                if *min == 0 { '*' } else { '+' }
            )
        }
        RhsExpr::Optional(child) => format!("{}?", postfix_operand(child)),
        RhsExpr::Symbol(s) => match s.kind {
            SymbolKind::Literal => format!("'{}'", escape_literal(&s.name)),
            _ => s.name.clone(),
        },
        RhsExpr::CharRange { lo, hi, .. } => format!(
            "'{}'..'{}'",
            escape_literal(&lo.to_string()),
            escape_literal(&hi.to_string())
        ),
        RhsExpr::Labeled { label, child, .. } => format!("${label}={}", atom(child)),
    }
}

fn atom(e: &RhsExpr) -> String {
    match e {
        RhsExpr::Symbol(_) | RhsExpr::CharRange { .. } => print_rhs(e),
        _ => format!("({})", print_rhs(e)),
    }
}

fn postfix_operand(e: &RhsExpr) -> String {
    match e {
        RhsExpr::Iteration { .. } | RhsExpr::Optional(_) | RhsExpr::Labeled { .. } => print_rhs(e),
        _ => atom(e),
    }
}

fn params(ps: &[AttributeDecl]) -> String {
    ps.iter()
        .map(|p| match &p.ty {
            Some(t) => format!("{} {}", t.name, p.name.name),
            None => p.name.name.clone(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_function(f: &TranslationFunction, out: &mut String) {
    let _ = writeln!(
        out,
        "    {}({}) --> ({}) {{",
        f.name.name,
        params(&f.inputs),
        params(&f.outputs)
    );
    for l in &f.locals {
        if let Some(t) = &l.ty {
            let _ = writeln!(out, "        {} {};", t.name, l.name.name);
        }
    }
    for a in &f.actions {
        let _ = write!(out, "        {} {} : ", a.position.keyword(), a.site);
        print_stmt(&a.body, 2, out);
    }
    out.push_str("    }\n");
}

fn print_stmt(s: &Stmt, depth: usize, out: &mut String) {
    match s {
        Stmt::Assign { lhs, rhs, .. } => {
            let _ = writeln!(out, "{} = {};", print_lhs(lhs), print_expr(rhs));
        }
        Stmt::Call { call, .. } => {
            let _ = writeln!(out, "{};", print_expr(call));
        }
        Stmt::Block { stmts, .. } => {
            out.push_str("{\n");
            for st in stmts {
                out.push_str(&"    ".repeat(depth + 1));
                print_stmt(st, depth + 1, out);
            }
            out.push_str(&"    ".repeat(depth));
            out.push_str("}\n");
        }
    }
}

pub fn print_lhs(lhs: &Lhs) -> String {
    match lhs {
        Lhs::Single(i) => i.name.clone(),
        Lhs::Tuple(is) => format!(
            "({})",
            is.iter()
                .map(|i| i.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Attr(i) => i.name.clone(),
        Expr::TokenText(i) => format!("{}#", i.name),
        Expr::Call { func, args } => format!(
            "{}({})",
            func.name,
            args.iter().map(print_expr).collect::<Vec<_>>().join(", ")
        ),
    }
}
