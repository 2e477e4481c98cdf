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

//! ANTLR 3 grammar emission with Java actions, and the Java interface the
//! generated parser calls external functions through.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::names::{EmissionPlan, NameKind};
use crate::check::{AtBinding, FunctionTypes};
use crate::driver::ValidatedSpec;
use crate::flow::Placement;
use crate::grammar::{escape_literal, RhsExpr, Rule, SymbolKind};
use crate::syntax::ast::{
    Expr, ExternalSignature, Lhs, Origin, Role, Specification, Stmt, TranslationFunction,
};
use crate::types::{BackendProfile, Extension, TypeId};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("cannot emit {0}")]
    UnsupportedConstruct(String),
}

pub const DEFAULT_PARSER_NAME: &str = "Translator";

/// Both artifacts of one emission, with their file names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emitted {
    pub grammar_file: String,
    pub grammar: String,
    pub externals_file: String,
    pub externals: String,
}

pub fn parser_name(profile: Option<&BackendProfile>) -> String {
    profile
        .and_then(|p| p.options.get("parserName"))
        .cloned()
        .unwrap_or_else(|| DEFAULT_PARSER_NAME.to_string())
}

fn package(profile: Option<&BackendProfile>) -> Option<&str> {
    profile
        .and_then(|p| p.options.get("package"))
        .map(String::as_str)
}

/// A plan that knows the grammar's symbol names, with every rule name
/// allocated first so rules keep their names whenever possible.
pub fn plan_for(v: &ValidatedSpec, profile: Option<BackendProfile>) -> EmissionPlan {
    let mut plan = EmissionPlan::new(profile, v.spec.grammar.rules.iter().map(|r| r.name.clone()));
    for r in &v.spec.grammar.rules {
        plan.name(NameKind::Rule, &r.name);
    }
    plan
}

/// Emits the grammar and the externals interface.
pub fn emit(v: &ValidatedSpec, profile: Option<&BackendProfile>) -> Result<Emitted, EmitError> {
    let mut plan = plan_for(v, profile.cloned());
    let grammar = emit_antlr_grammar(v, &mut plan)?;
    let externals = emit_external_interface(&v.spec.externals, v.ext.as_ref(), &mut plan);
    let name = parser_name(profile);
    Ok(Emitted {
        grammar_file: format!("{name}.g"),
        grammar,
        externals_file: format!("{name}Externals.java"),
        externals,
    })
}

/// The function emitted under the rule's own name: the one sharing the
/// rule's name, else the first one declared for it.
pub fn designated_function<'s>(
    spec: &'s Specification,
    rule: &'s str,
) -> Option<&'s TranslationFunction> {
    spec.functions_for(rule)
        .find(|f| f.name.name == rule)
        .or_else(|| spec.functions_for(rule).next())
}

pub fn emit_antlr_grammar(v: &ValidatedSpec, plan: &mut EmissionPlan) -> Result<String, EmitError> {
    let profile = plan.profile.clone();
    let parser = parser_name(profile.as_ref());
    collect_imports(v, plan);
    let mut e = Emitter {
        v,
        plan,
        interface: format!("{parser}Externals"),
    };
    let mut out = String::new();
    header_comments(&mut out, profile.as_ref(), &v.spec);
    let _ = writeln!(out, "grammar {parser};\n");

    let header = java_header(package(profile.as_ref()), &e.plan.imports);
    if !header.is_empty() {
        let _ = writeln!(out, "@header {{\n{header}}}\n");
    }
    if let Some(p) = package(profile.as_ref()) {
        let _ = writeln!(out, "@lexer::header {{\npackage {p};\n}}\n");
    }
    if !v.spec.externals.is_empty() {
        let iface = &e.interface;
        let _ = writeln!(
            out,
            "@members {{\nprivate {iface} externals;\n\npublic void setExternals({iface} externals) {{\n    this.externals = externals;\n}}\n}}\n"
        );
    }

    for rule in v.spec.grammar.rules.iter().filter(|r| !r.is_token) {
        match designated_function(&v.spec, &rule.name) {
            None => out.push_str(&e.rule_text(rule, None)?),
            Some(main) => {
                out.push_str(&e.rule_text(rule, Some(main))?);
                for f in v
                    .spec
                    .functions_for(&rule.name)
                    .filter(|f| f.name != main.name)
                {
                    out.push('\n');
                    out.push_str(&e.rule_text(rule, Some(f))?);
                }
            }
        }
        out.push('\n');
    }

    for rule in v.spec.grammar.rules.iter().filter(|r| r.is_token) {
        let name = e.plan.name(NameKind::Rule, &rule.name);
        let frag = if rule.is_fragment { "fragment " } else { "" };
        let _ = writeln!(out, "{frag}{name} : {} ;\n", e.lexer_rhs(&rule.rhs, true));
    }
    let ws = e.plan.name(NameKind::Helper, "WS");
    let _ = writeln!(
        out,
        "{ws} : (' ' | '\\t' | '\\r' | '\\n')+ {{ $channel = HIDDEN; }} ;"
    );
    Ok(out)
}

fn header_comments(out: &mut String, profile: Option<&BackendProfile>, spec: &Specification) {
    let _ = writeln!(out, "// Generated by tpg. Do not edit.");
    let mut extra: Vec<(String, String)> = Vec::new();
    if let Some(p) = profile {
        for (k, val) in &p.options {
            if k != "package" && k != "parserName" {
                extra.push((k.clone(), val.clone()));
            }
        }
    }
    extra.extend(
        spec.declarations
            .options
            .iter()
            .map(|(k, v)| (k.clone(), v.clone())),
    );
    for (k, val) in extra {
        let _ = writeln!(out, "// option {k} = {val}");
    }
}

fn java_header(package: Option<&str>, imports: &BTreeSet<String>) -> String {
    let mut out = String::new();
    if let Some(p) = package {
        let _ = writeln!(out, "package {p};");
    }
    if !imports.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        for i in imports {
            let _ = writeln!(out, "import {i};");
        }
    }
    out
}

/// Every class named by the specification: explicit imports plus the
/// qualified names of all types in signatures and attributes.
fn collect_imports(v: &ValidatedSpec, plan: &mut EmissionPlan) {
    let mut types: BTreeSet<TypeId> = BTreeSet::new();
    for f in &v.functions {
        types.extend(f.attributes.values().map(|a| a.ty));
    }
    for e in &v.spec.externals {
        for a in e.inputs.iter().chain(&e.outputs) {
            if let Some(t) = a.ty.as_ref().and_then(|t| v.ext.resolve_type(t)) {
                types.insert(t);
            }
        }
    }
    for t in types {
        if let Some(q) = v.ext.qualified_name(t) {
            if !is_implicit_import(&q) {
                plan.imports.insert(q);
            }
        }
    }
    for i in &v.spec.declarations.imports {
        plan.imports.insert(i.clone());
    }
}

fn is_implicit_import(q: &str) -> bool {
    q.strip_prefix("java.lang.")
        .is_some_and(|rest| !rest.contains('.'))
}

/// Initial value for a local of the given Java type.
fn default_value(java_type: &str) -> &'static str {
    match java_type {
        "boolean" => "false",
        "char" => "'\\0'",
        "byte" | "short" | "int" | "long" | "float" | "double" => "0",
        _ => "null",
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

struct Emitter<'a, 'v> {
    v: &'v ValidatedSpec,
    plan: &'a mut EmissionPlan,
    interface: String,
}

/// Per-function context while rendering one rule.
struct Scope<'v> {
    f: &'v TranslationFunction,
    types: &'v FunctionTypes,
    place: Placement,
    /// Tokens whose text the function reads.
    texts: BTreeSet<String>,
}

impl<'v> Emitter<'_, 'v> {
    fn realize(&self, t: TypeId) -> String {
        self.v.ext.realize(t)
    }

    fn antlr_rule_of(&mut self, f: &TranslationFunction) -> String {
        match designated_function(&self.v.spec, &f.for_rule) {
            Some(d) if d.name == f.name => self.plan.name(NameKind::Rule, &f.for_rule),
            _ => self.plan.name(NameKind::Function, &f.name.name),
        }
    }

    fn rule_text(
        &mut self,
        rule: &'v Rule,
        f: Option<&'v TranslationFunction>,
    ) -> Result<String, EmitError> {
        let mut out = String::new();
        let scope = match f {
            None => {
                let name = self.plan.name(NameKind::Rule, &rule.name);
                let _ = writeln!(out, "{name}");
                None
            }
            Some(f) => {
                let types = self.v.function_types(&f.name.name).ok_or_else(|| {
                    EmitError::UnsupportedConstruct(format!("unchecked function {}", f.name.name))
                })?;
                let name = self.antlr_rule_of(f);
                let params = self.slots(types, f.inputs.iter().map(|a| a.name.name.as_str()));
                let results = self.slots(types, f.outputs.iter().map(|a| a.name.name.as_str()));
                out.push_str(&name);
                if !params.is_empty() {
                    let _ = write!(out, "[{params}]");
                }
                if !results.is_empty() {
                    let _ = write!(out, " returns [{results}]");
                }
                out.push('\n');

                let mut texts = BTreeSet::new();
                for a in &f.actions {
                    token_texts(&a.body, &mut texts);
                }
                let mut init = Vec::new();
                for (name, info) in &types.attributes {
                    if info.role == Role::Local {
                        let ty = self.realize(info.ty);
                        let n = self.plan.name(NameKind::Attribute, name);
                        init.push(format!("{ty} {n} = {};", default_value(&ty)));
                    }
                }
                let string = self.realize(self.v.ext.types().string_type());
                for t in &texts {
                    let n = self.text_local(t);
                    init.push(format!("{string} {n} = {};", default_value(&string)));
                }
                if !init.is_empty() {
                    let _ = writeln!(out, "@init {{");
                    for l in init {
                        let _ = writeln!(out, "    {l}");
                    }
                    let _ = writeln!(out, "}}");
                }
                Some(Scope {
                    f,
                    types,
                    place: Placement::of(rule, f),
                    texts,
                })
            }
        };

        let body = self.body(&rule.rhs, scope.as_ref())?;
        for (i, line) in body.iter().enumerate() {
            let lead = match (i, line.starts_with('|')) {
                (0, _) => "\t: ",
                (_, true) => "\t",
                _ => "\t  ",
            };
            let _ = writeln!(out, "{lead}{line}");
        }
        let _ = writeln!(out, "\t;");
        Ok(out)
    }

    /// `type name, ...` for the named attributes.
    fn slots<'n>(&mut self, types: &FunctionTypes, names: impl Iterator<Item = &'n str>) -> String {
        names
            .map(|n| {
                let ty = types
                    .type_of(n)
                    .map(|t| self.realize(t))
                    .unwrap_or_default();
                format!("{ty} {}", self.plan.name(NameKind::Attribute, n))
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn text_local(&mut self, token: &str) -> String {
        let key = format!("{token}#");
        if let Some(n) = self.plan.get(NameKind::Helper, &key) {
            return n.to_string();
        }
        let n = self
            .plan
            .fresh(&format!("{}Text", token.to_lowercase()), &BTreeSet::new());
        self.plan.renames.insert((NameKind::Helper, key), n.clone());
        n
    }

    fn helper(&mut self, key: &str, base: &str) -> String {
        if let Some(n) = self.plan.get(NameKind::Helper, key) {
            return n.to_string();
        }
        let n = self.plan.fresh(base, &BTreeSet::new());
        self.plan
            .renames
            .insert((NameKind::Helper, key.to_string()), n.clone());
        n
    }

    /// The rule body as lines: one per top-level alternative, or one per
    /// item of a top-level sequence.
    fn body(&mut self, rhs: &RhsExpr, scope: Option<&Scope<'v>>) -> Result<Vec<String>, EmitError> {
        let mut path = Vec::new();
        let root_actions = scope.is_some_and(|s| {
            !s.place.before_at(&[]).is_empty() || !s.place.after_at(&[]).is_empty()
        });
        if root_actions {
            return Ok(vec![self.items(rhs, &mut path, scope)?.join(" ")]);
        }
        match rhs {
            RhsExpr::Alternative(alts) => {
                let mut lines = Vec::new();
                for (i, a) in alts.iter().enumerate() {
                    path.push(i);
                    let text = self.items(a, &mut path, scope)?.join(" ");
                    path.pop();
                    lines.push(if i == 0 { text } else { format!("| {text}") });
                }
                Ok(lines)
            }
            RhsExpr::Sequence(items) => {
                let mut lines = Vec::new();
                for (i, item) in items.iter().enumerate() {
                    path.push(i);
                    lines.push(self.sequence_item(item, &mut path, scope)?);
                    path.pop();
                }
                Ok(lines)
            }
            other => Ok(vec![self.items(other, &mut path, scope)?.join(" ")]),
        }
    }

    /// Space-separated pieces for `e`, actions included.
    fn items(
        &mut self,
        e: &RhsExpr,
        path: &mut Vec<usize>,
        scope: Option<&Scope<'v>>,
    ) -> Result<Vec<String>, EmitError> {
        let mut out = Vec::new();
        if let Some(s) = scope {
            for &i in s.place.before_at(path) {
                out.push(self.action_block(s, &s.f.actions[i].body));
            }
        }
        match e {
            RhsExpr::Sequence(items) => {
                for (i, item) in items.iter().enumerate() {
                    path.push(i);
                    out.push(self.sequence_item(item, path, scope)?);
                    path.pop();
                }
            }
            RhsExpr::Alternative(alts) => {
                let mut parts = Vec::new();
                for (i, a) in alts.iter().enumerate() {
                    path.push(i);
                    parts.push(self.items(a, path, scope)?.join(" "));
                    path.pop();
                }
                out.push(format!("( {} )", parts.join(" | ")));
            }
            RhsExpr::Optional(child) => {
                path.push(0);
                let inner = self.group(child, path, scope)?;
                path.pop();
                out.push(format!("{inner}?"));
            }
            RhsExpr::Iteration { child, min } => {
                path.push(0);
                let inner = self.group(child, path, scope)?;
                path.pop();
                out.push(format!("{inner}{}", if *min == 0 { "*" } else { "+" }));
            }
            RhsExpr::Labeled { child, .. } => {
                path.push(0);
                let inner = self.items(child, path, scope)?;
                path.pop();
                out.extend(inner);
            }
            RhsExpr::CharRange { lo, hi, .. } => out.push(format!(
                "'{}'..'{}'",
                escape_literal(&lo.to_string()),
                escape_literal(&hi.to_string())
            )),
            RhsExpr::Symbol(sym) => match sym.kind {
                SymbolKind::Literal => out.push(format!("'{}'", escape_literal(&sym.name))),
                SymbolKind::TokenRule => {
                    let name = self.plan.name(NameKind::Rule, &sym.name);
                    match scope {
                        Some(s) if s.texts.contains(&sym.name) => {
                            let label = self.helper(
                                &format!("{}@", sym.name),
                                &format!("{}Token", sym.name.to_lowercase()),
                            );
                            let local = self.text_local(&sym.name);
                            out.push(format!("{label}={name}"));
                            out.push(format!("{{ {local} = ${label}.text; }}"));
                        }
                        _ => out.push(name),
                    }
                }
                SymbolKind::SyntacticRule => {
                    out.extend(self.call(&sym.name, path, scope)?);
                }
            },
        }
        if let Some(s) = scope {
            for &i in s.place.after_at(path) {
                out.push(self.action_block(s, &s.f.actions[i].body));
            }
        }
        Ok(out)
    }

    /// An element of a sequence; nested sequences keep their parentheses.
    fn sequence_item(
        &mut self,
        e: &RhsExpr,
        path: &mut Vec<usize>,
        scope: Option<&Scope<'v>>,
    ) -> Result<String, EmitError> {
        let parts = self.items(e, path, scope)?.join(" ");
        let mut inner = e;
        while let RhsExpr::Labeled { child, .. } = inner {
            inner = child;
        }
        Ok(match inner {
            RhsExpr::Sequence(_) => format!("( {parts} )"),
            _ => parts,
        })
    }

    fn group(
        &mut self,
        e: &RhsExpr,
        path: &mut Vec<usize>,
        scope: Option<&Scope<'v>>,
    ) -> Result<String, EmitError> {
        let parts = self.items(e, path, scope)?;
        let atomic = parts.len() == 1
            && (matches!(e, RhsExpr::Symbol(_) | RhsExpr::CharRange { .. })
                || (parts[0].starts_with("( ")
                    && parts[0].ends_with(" )")
                    && matches!(e, RhsExpr::Alternative(_))));
        Ok(if atomic {
            parts.into_iter().next().expect("one part")
        } else {
            format!("( {} )", parts.join(" "))
        })
    }

    fn call(
        &mut self,
        callee: &str,
        path: &[usize],
        scope: Option<&Scope<'v>>,
    ) -> Result<Vec<String>, EmitError> {
        let spec = &self.v.spec;
        let binding = scope
            .and_then(|s| s.types.at_bindings.get(path))
            .cloned()
            .unwrap_or(AtBinding::Plain);
        match binding {
            AtBinding::Plain => Ok(vec![self.plan.name(NameKind::Rule, callee)]),
            AtBinding::Implicit(fname) => {
                let f = spec.function(&fname).ok_or_else(|| {
                    EmitError::UnsupportedConstruct(format!("call of unknown function {fname}"))
                })?;
                Ok(vec![self.antlr_rule_of(f)])
            }
            AtBinding::Action(index) => {
                let s = scope.expect("bindings come from a scope");
                let (lhs, func, args) =
                    s.f.actions[index]
                        .body
                        .as_translation_call()
                        .ok_or_else(|| {
                            EmitError::UnsupportedConstruct(
                                "an 'at' action that is not a call".into(),
                            )
                        })?;
                let target = spec.function(&func.name).ok_or_else(|| {
                    EmitError::UnsupportedConstruct(format!(
                        "call of unknown function {}",
                        func.name
                    ))
                })?;
                let rule_name = self.antlr_rule_of(target);
                let args: Vec<String> = args.iter().map(|a| self.expr(s, a)).collect();
                let invocation = if args.is_empty() {
                    rule_name
                } else {
                    format!("{rule_name}[{}]", args.join(", "))
                };
                let Some(lhs) = lhs else {
                    return Ok(vec![invocation]);
                };
                let label = self.call_label(path, s, callee);
                let mut assigns = Vec::new();
                for (target_attr, out) in lhs.names().iter().zip(&target.outputs) {
                    let field = self.plan.name(NameKind::Attribute, &out.name.name);
                    let dest = self.attr_ref(s, &target_attr.name);
                    assigns.push(format!("{dest} = ${label}.{field};"));
                }
                Ok(vec![
                    format!("{label}={invocation}"),
                    format!("{{ {} }}", assigns.join(" ")),
                ])
            }
        }
    }

    /// ANTLR label for the invocation at `path`: the location label that
    /// sits directly on it, else one derived from the callee's name.
    fn call_label(&mut self, path: &[usize], s: &Scope<'v>, callee: &str) -> String {
        let rule = self
            .v
            .spec
            .grammar
            .rule(&s.f.for_rule)
            .expect("validated rule");
        if let Some((_, parent)) = path.split_last() {
            if let Some(RhsExpr::Labeled { label, .. }) = rule.rhs.at_path(parent) {
                return self.plan.name(NameKind::Label, label);
            }
        }
        self.helper(&format!("label {callee}"), &format!("{callee}Result"))
    }

    fn attr_ref(&mut self, s: &Scope<'v>, name: &str) -> String {
        let n = self.plan.name(NameKind::Attribute, name);
        match s.types.attributes.get(name).map(|a| a.role) {
            Some(Role::Input) | Some(Role::Output) => format!("${n}"),
            _ => n,
        }
    }

    fn expr(&mut self, s: &Scope<'v>, e: &Expr) -> String {
        match e {
            Expr::Attr(i) => self.attr_ref(s, &i.name),
            Expr::TokenText(i) => self.text_local(&i.name),
            Expr::Call { func, args } => {
                let args: Vec<String> = args.iter().map(|a| self.expr(s, a)).collect();
                let f = self.plan.name(NameKind::External, &func.name);
                format!("externals.{f}({})", args.join(", "))
            }
        }
    }

    fn action_block(&mut self, s: &Scope<'v>, body: &Stmt) -> String {
        let mut stmts = Vec::new();
        self.stmt(s, body, &mut stmts);
        format!("{{ {} }}", stmts.join(" "))
    }

    fn stmt(&mut self, s: &Scope<'v>, st: &Stmt, out: &mut Vec<String>) {
        match st {
            Stmt::Block { stmts, .. } => stmts.iter().for_each(|x| self.stmt(s, x, out)),
            Stmt::Call { call, .. } => out.push(format!("{};", self.expr(s, call))),
            Stmt::Assign {
                lhs: Lhs::Single(target),
                rhs,
                ..
            } => {
                let value = self.expr(s, rhs);
                let dest = self.attr_ref(s, &target.name);
                out.push(format!("{dest} = {value};"));
            }
            Stmt::Assign {
                lhs: Lhs::Tuple(targets),
                rhs,
                ..
            } => {
                let Expr::Call { func, .. } = rhs else {
                    return;
                };
                let carrier = self.carrier(&func.name);
                let tmp = self.helper(
                    &format!("tmp {}", func.name),
                    &format!("{}Result", func.name),
                );
                let value = self.expr(s, rhs);
                let mut parts = vec![format!("{}.{carrier} {tmp} = {value};", self.interface)];
                for (i, t) in targets.iter().enumerate() {
                    let dest = self.attr_ref(s, &t.name);
                    parts.push(format!("{dest} = {tmp}.value{};", i + 1));
                }
                out.push(format!("{{ {} }}", parts.join(" ")));
            }
        }
    }

    fn carrier(&mut self, func: &str) -> String {
        carrier_name(self.plan, func)
    }

    fn lexer_rhs(&mut self, e: &RhsExpr, top: bool) -> String {
        match e {
            RhsExpr::Sequence(items) => {
                let parts: Vec<String> = items.iter().map(|i| self.lexer_atom(i)).collect();
                parts.join(" ")
            }
            RhsExpr::Alternative(alts) => {
                let parts: Vec<String> = alts.iter().map(|a| self.lexer_rhs(a, false)).collect();
                if top {
                    parts.join(" | ")
                } else {
                    format!("( {} )", parts.join(" | "))
                }
            }
            other => self.lexer_atom(other),
        }
    }

    fn lexer_atom(&mut self, e: &RhsExpr) -> String {
        match e {
            RhsExpr::Sequence(_) => format!("( {} )", self.lexer_rhs(e, true)),
            RhsExpr::Alternative(_) => self.lexer_rhs(e, false),
            RhsExpr::Optional(c) => format!("{}?", self.lexer_group(c)),
            RhsExpr::Iteration { child, min } => {
                format!(
                    "{}{}",
                    self.lexer_group(child),
                    if *min == 0 { "*" } else { "+" }
                )
            }
            RhsExpr::Labeled { child, .. } => self.lexer_atom(child),
            RhsExpr::CharRange { lo, hi, .. } => format!(
                "'{}'..'{}'",
                escape_literal(&lo.to_string()),
                escape_literal(&hi.to_string())
            ),
            RhsExpr::Symbol(s) => match s.kind {
                SymbolKind::Literal => format!("'{}'", escape_literal(&s.name)),
                _ => self.plan.name(NameKind::Rule, &s.name),
            },
        }
    }

    fn lexer_group(&mut self, e: &RhsExpr) -> String {
        match e {
            RhsExpr::Symbol(_) | RhsExpr::CharRange { .. } | RhsExpr::Alternative(_) => {
                self.lexer_atom(e)
            }
            RhsExpr::Labeled { child, .. } => self.lexer_group(child),
            _ => format!("( {} )", self.lexer_rhs(e, true)),
        }
    }
}

fn carrier_name(plan: &mut EmissionPlan, func: &str) -> String {
    let key = format!("{func}<>");
    if let Some(n) = plan.get(NameKind::Helper, &key) {
        return n.to_string();
    }
    let n = plan.fresh(&format!("{}Result", capitalize(func)), &BTreeSet::new());
    plan.renames.insert((NameKind::Helper, key), n.clone());
    n
}

fn token_texts(s: &Stmt, out: &mut BTreeSet<String>) {
    fn expr(e: &Expr, out: &mut BTreeSet<String>) {
        match e {
            Expr::TokenText(i) => {
                out.insert(i.name.clone());
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| expr(a, out)),
            Expr::Attr(_) => {}
        }
    }
    match s {
        Stmt::Block { stmts, .. } => stmts.iter().for_each(|x| token_texts(x, out)),
        Stmt::Call { call, .. } => expr(call, out),
        Stmt::Assign { rhs, .. } => expr(rhs, out),
    }
}

/// A Java interface with one method per external function. Functions
/// with several results return a nested carrier class with numbered
/// fields; inferred signatures are marked with a comment.
pub fn emit_external_interface(
    signatures: &[ExternalSignature],
    ext: &dyn Extension,
    plan: &mut EmissionPlan,
) -> String {
    let profile = plan.profile.clone();
    let iface = format!("{}Externals", parser_name(profile.as_ref()));
    let realize = |t: &Option<crate::syntax::ast::TypeRef>| {
        t.as_ref()
            .and_then(|t| ext.resolve_type(t))
            .map(|id| ext.realize(id))
            .unwrap_or_else(|| "Object".to_string())
    };

    let mut out = String::new();
    let _ = writeln!(out, "// Generated by tpg. Do not edit.");
    let header = java_header(package(profile.as_ref()), &plan.imports);
    if !header.is_empty() {
        let _ = writeln!(out, "{header}");
    }
    let _ = writeln!(out, "public interface {iface} {{");

    let mut carriers = Vec::new();
    for sig in signatures {
        if sig.origin == Origin::Inferred {
            let _ = writeln!(out, "    // inferred");
        }
        let params: Vec<String> = sig
            .inputs
            .iter()
            .map(|a| {
                format!(
                    "{} {}",
                    realize(&a.ty),
                    plan.name(NameKind::Attribute, &a.name.name)
                )
            })
            .collect();
        let ret = match sig.outputs.len() {
            0 => "void".to_string(),
            1 => realize(&sig.outputs[0].ty),
            _ => {
                let c = carrier_name(plan, &sig.name.name);
                carriers.push((
                    c.clone(),
                    sig.outputs
                        .iter()
                        .map(|o| realize(&o.ty))
                        .collect::<Vec<_>>(),
                ));
                c
            }
        };
        let name = plan.name(NameKind::External, &sig.name.name);
        let _ = writeln!(out, "    {ret} {name}({});", params.join(", "));
    }

    for (c, fields) in carriers {
        let _ = writeln!(out, "\n    final class {c} {{");
        for (i, t) in fields.iter().enumerate() {
            let _ = writeln!(out, "        public final {t} value{};", i + 1);
        }
        let params: Vec<String> = fields
            .iter()
            .enumerate()
            .map(|(i, t)| format!("{t} value{}", i + 1))
            .collect();
        let _ = writeln!(out, "\n        public {c}({}) {{", params.join(", "));
        for i in 1..=fields.len() {
            let _ = writeln!(out, "            this.value{i} = value{i};");
        }
        let _ = writeln!(out, "        }}\n    }}");
    }
    let _ = writeln!(out, "}}");
    out
}
