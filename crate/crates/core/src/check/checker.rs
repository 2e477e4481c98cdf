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

//! Type checking and local inference for one translation function at a
//! time, followed by merging of inferred external signatures.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use super::context::{resolve_declared, Signature, TypeContext};
use super::solver::{solve, Constraint, SolveError, Term, VarId};
use crate::diag::{Code, Diagnostic, Span};
use crate::grammar::{is_token_name, RhsExpr, Rule, Symbol, SymbolKind};
use crate::syntax::ast::*;
use crate::types::TypeId;

/// How a nonterminal occurrence inside a rule is translated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtBinding {
    /// By the `at` action with this index in the function's action list.
    Action(usize),
    /// By an implicit call to this input-less translation function; its
    /// results are discarded.
    Implicit(String),
    /// The nonterminal has no translation function; it is only recognized.
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeInfo {
    pub ty: TypeId,
    pub role: Role,
    /// True for attributes used without declaration.
    pub inferred: bool,
    pub span: Span,
}

/// Types of one translation function after a successful check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTypes {
    pub name: String,
    pub rule: String,
    /// Inputs, outputs and locals in declaration order, then inferred
    /// locals in order of first use.
    pub attributes: IndexMap<String, AttributeInfo>,
    /// Keyed by the path of the nonterminal symbol node in the rule.
    pub at_bindings: BTreeMap<Vec<usize>, AtBinding>,
}

impl FunctionTypes {
    pub fn type_of(&self, attr: &str) -> Option<TypeId> {
        self.attributes.get(attr).map(|a| a.ty)
    }
}

#[derive(Debug, Default)]
pub struct CheckOutput {
    /// One entry per translation function of the specification, `None`
    /// when the function had errors.
    pub functions: Vec<Option<FunctionTypes>>,
    /// Externals whose signature was inferred, in name order.
    pub inferred: Vec<ExternalSignature>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Checks every translation function of `spec`.
pub fn check_specification(spec: &Specification, ctx: &TypeContext<'_>) -> CheckOutput {
    let mut out = CheckOutput::default();
    let mut inferred: BTreeMap<String, (InferredSig, String)> = BTreeMap::new();

    for f in &spec.functions {
        let (types, sigs, diags) = check_translation_function(spec, ctx, f);
        out.diagnostics.extend(diags);
        out.functions.push(types);
        for (name, sig) in sigs {
            match inferred.get(&name) {
                None => {
                    inferred.insert(name, (sig, f.name.name.clone()));
                }
                Some((prev, owner)) if prev.inputs != sig.inputs || prev.outputs != sig.outputs => {
                    let show = |s: &InferredSig| {
                        let names = |ts: &[TypeId]| {
                            ts.iter()
                                .map(|t| ctx.type_name(*t))
                                .collect::<Vec<_>>()
                                .join(", ")
                        };
                        format!("({}) --> ({})", names(&s.inputs), names(&s.outputs))
                    };
                    out.diagnostics.push(Diagnostic::error(
                        Code::InferenceConflict,
                        sig.span,
                        format!(
                            "Conflicting signatures inferred for {name}: {} in {owner} and {} in {}",
                            show(prev),
                            show(&sig),
                            f.name.name
                        ),
                    ));
                }
                Some(_) => {}
            }
        }
    }

    out.inferred = inferred
        .into_iter()
        .map(|(name, (sig, _))| {
            let decl = |ts: &[TypeId], prefix: &str, role: Role| -> Vec<AttributeDecl> {
                ts.iter()
                    .enumerate()
                    .map(|(i, t)| AttributeDecl {
                        name: Ident::new(format!("{prefix}{}", i + 1), sig.span),
                        ty: Some(TypeRef {
                            name: ctx.type_name(*t).to_string(),
                            span: sig.span,
                        }),
                        role,
                    })
                    .collect()
            };
            ExternalSignature {
                name: Ident::new(name, sig.span),
                inputs: decl(&sig.inputs, "arg", Role::Input),
                outputs: decl(&sig.outputs, "res", Role::Output),
                origin: Origin::Inferred,
            }
        })
        .collect();
    out
}

/// Signature inferred for an undeclared external within one function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferredSig {
    pub inputs: Vec<TypeId>,
    pub outputs: Vec<TypeId>,
    pub span: Span,
}

/// Checks one function. Returns its resolved types (or `None` on error),
/// the signatures it inferred for undeclared externals, and diagnostics.
pub fn check_translation_function(
    spec: &Specification,
    ctx: &TypeContext<'_>,
    f: &TranslationFunction,
) -> (
    Option<FunctionTypes>,
    Vec<(String, InferredSig)>,
    Vec<Diagnostic>,
) {
    let mut c = FnChecker::new(ctx, f);
    let Some(rule) = spec.grammar.rule(&f.for_rule) else {
        return (None, Vec::new(), c.diags);
    };
    c.declare_signature();
    let at_bindings = c.check_at_sites(spec, rule);
    for (i, a) in f.actions.iter().enumerate() {
        if a.position == Position::At {
            if at_bindings.values().any(|b| *b == AtBinding::Action(i)) {
                c.check_at_call(a, rule);
            }
        } else {
            c.check_stmt(&a.body, rule);
        }
    }
    c.finish(at_bindings)
}

#[derive(Clone, Debug)]
struct Attr {
    term: Option<Term>,
    role: Role,
    inferred: bool,
    span: Span,
}

#[derive(Clone, Debug)]
enum VarOrigin {
    Local(String),
    Param {
        func: String,
        index: usize,
        output: bool,
    },
}

#[derive(Clone, Debug)]
struct Skeleton {
    inputs: Vec<VarId>,
    outputs: Vec<VarId>,
    span: Span,
}

/// Type of an expression: one entry per tuple component. `None` entries
/// stand for types that are unknown because of an earlier error.
type ExprType = Vec<Option<Term>>;

struct FnChecker<'c, 'a> {
    ctx: &'c TypeContext<'a>,
    f: &'c TranslationFunction,
    attrs: IndexMap<String, Attr>,
    vars: Vec<(VarOrigin, Span)>,
    constraints: Vec<Constraint>,
    skeletons: IndexMap<String, Skeleton>,
    diags: Vec<Diagnostic>,
}

impl<'c, 'a> FnChecker<'c, 'a> {
    fn new(ctx: &'c TypeContext<'a>, f: &'c TranslationFunction) -> Self {
        FnChecker {
            ctx,
            f,
            attrs: IndexMap::new(),
            vars: Vec::new(),
            constraints: Vec::new(),
            skeletons: IndexMap::new(),
            diags: Vec::new(),
        }
    }

    fn fresh(&mut self, origin: VarOrigin, span: Span) -> VarId {
        self.vars.push((origin, span));
        VarId(self.vars.len() as u32 - 1)
    }

    fn error(&mut self, code: Code, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn declare_signature(&mut self) {
        let sig = self.ctx.signature(&self.f.name.name).cloned();
        let own = sig.filter(|s| s.is_translation() && s.span == self.f.name.span);
        let mut declared: Vec<(&AttributeDecl, Option<TypeId>)> = Vec::new();
        match &own {
            // Input and output types were resolved (and reported) while
            // building the context.
            Some(s) => {
                for (d, slot) in self.f.inputs.iter().zip(&s.inputs) {
                    declared.push((d, slot.ty));
                }
                for (d, slot) in self.f.outputs.iter().zip(&s.outputs) {
                    declared.push((d, slot.ty));
                }
            }
            None => {
                let mut sink = Vec::new();
                for d in self.f.inputs.iter().chain(&self.f.outputs) {
                    declared.push((d, resolve_declared(self.ctx.ext, d, &mut sink)));
                }
            }
        }
        let mut local_diags = Vec::new();
        for d in &self.f.locals {
            let ty = resolve_declared(self.ctx.ext, d, &mut local_diags);
            declared.push((d, ty));
        }
        self.diags.extend(local_diags);
        for (d, ty) in declared {
            self.attrs.entry(d.name.name.clone()).or_insert(Attr {
                term: ty.map(Term::Ground),
                role: d.role,
                inferred: false,
                span: d.name.span,
            });
        }
    }

    fn attr_term(&mut self, id: &Ident) -> Option<Term> {
        if let Some(a) = self.attrs.get(&id.name) {
            return a.term;
        }
        let v = self.fresh(VarOrigin::Local(id.name.clone()), id.span);
        self.attrs.insert(
            id.name.clone(),
            Attr {
                term: Some(Term::Var(v)),
                role: Role::Local,
                inferred: true,
                span: id.span,
            },
        );
        Some(Term::Var(v))
    }

    /// Records `lower ≤ upper`; ground pairs are checked on the spot.
    fn subtype(&mut self, lower: Option<Term>, upper: Option<Term>, span: Span) {
        let (Some(l), Some(u)) = (lower, upper) else {
            return;
        };
        match (l, u) {
            (Term::Ground(a), Term::Ground(b)) => {
                if !self.ctx.ext.types().is_subtype(a, b) {
                    let msg = format!(
                        "Incompatible types: {} and {}",
                        self.ctx.type_name(a),
                        self.ctx.type_name(b)
                    );
                    self.error(Code::IncompatibleTypes, span, msg);
                }
            }
            _ => self.constraints.push(Constraint::new(l, u, span)),
        }
    }

    /// Types an expression. `outputs` is the result arity expected by the
    /// context, used to shape the skeleton of an undeclared function.
    fn expr(&mut self, e: &Expr, outputs: usize, rule: &Rule, in_at: bool) -> ExprType {
        match e {
            Expr::Attr(id) => vec![self.attr_term(id)],
            Expr::TokenText(id) => {
                let occurs = is_token_name(&id.name)
                    && rule
                        .symbols()
                        .iter()
                        .any(|s| s.kind == SymbolKind::TokenRule && s.name == id.name);
                if !occurs {
                    self.error(
                        Code::UnknownToken,
                        id.span,
                        format!("Token {} does not occur in rule {}", id.name, rule.name),
                    );
                }
                vec![Some(Term::Ground(self.ctx.ext.types().string_type()))]
            }
            Expr::Call { func, args } => {
                let arg_types: Vec<(Option<Term>, Span)> = args
                    .iter()
                    .map(|a| {
                        let t = self.expr(a, 1, rule, false);
                        let t = if t.len() == 1 {
                            t[0]
                        } else {
                            self.error(
                                Code::Arity,
                                a.span(),
                                format!(
                                    "An argument must be a single value, but this call returns {} values",
                                    t.len()
                                ),
                            );
                            None
                        };
                        (t, a.span())
                    })
                    .collect();
                self.call(func, &arg_types, outputs, in_at)
            }
        }
    }

    fn call(
        &mut self,
        func: &Ident,
        args: &[(Option<Term>, Span)],
        outputs: usize,
        in_at: bool,
    ) -> ExprType {
        let (params, results): (Vec<Option<Term>>, Vec<Option<Term>>) =
            match self.ctx.signature(&func.name) {
                Some(sig) => {
                    if sig.is_translation() && !in_at {
                        self.error(
                            Code::TranslationCall,
                            func.span,
                            format!(
                                "Translation function {} may only be called in an 'at' action",
                                func.name
                            ),
                        );
                    }
                    let Signature {
                        inputs, outputs, ..
                    } = sig;
                    (
                        inputs.iter().map(|s| s.ty.map(Term::Ground)).collect(),
                        outputs.iter().map(|s| s.ty.map(Term::Ground)).collect(),
                    )
                }
                None => {
                    let sk = match self.skeletons.get(&func.name) {
                        Some(sk) => sk.clone(),
                        None => {
                            let inputs = (0..args.len())
                                .map(|index| {
                                    self.fresh(
                                        VarOrigin::Param {
                                            func: func.name.clone(),
                                            index,
                                            output: false,
                                        },
                                        func.span,
                                    )
                                })
                                .collect();
                            let outs = (0..outputs)
                                .map(|index| {
                                    self.fresh(
                                        VarOrigin::Param {
                                            func: func.name.clone(),
                                            index,
                                            output: true,
                                        },
                                        func.span,
                                    )
                                })
                                .collect();
                            let sk = Skeleton {
                                inputs,
                                outputs: outs,
                                span: func.span,
                            };
                            self.skeletons.insert(func.name.clone(), sk.clone());
                            sk
                        }
                    };
                    if sk.outputs.len() != outputs {
                        self.error(
                            Code::Arity,
                            func.span,
                            format!(
                                "Function {} is used with {} results here but {} elsewhere",
                                func.name,
                                outputs,
                                sk.outputs.len()
                            ),
                        );
                    }
                    (
                        sk.inputs.iter().map(|v| Some(Term::Var(*v))).collect(),
                        sk.outputs.iter().map(|v| Some(Term::Var(*v))).collect(),
                    )
                }
            };
        if params.len() != args.len() {
            self.error(
                Code::Arity,
                func.span,
                format!(
                    "Function {} expects {} arguments but {} were given",
                    func.name,
                    params.len(),
                    args.len()
                ),
            );
        } else {
            for ((arg, span), param) in args.iter().zip(params) {
                self.subtype(*arg, param, *span);
            }
        }
        results
    }

    fn check_stmt(&mut self, s: &Stmt, rule: &Rule) {
        match s {
            Stmt::Block { stmts, .. } => {
                for st in stmts {
                    self.check_stmt(st, rule);
                }
            }
            Stmt::Call { call, .. } => {
                self.expr(call, 0, rule, false);
            }
            Stmt::Assign { lhs, rhs, span } => {
                let rhs_ty = self.expr(rhs, lhs.names().len(), rule, false);
                self.assign(lhs, rhs_ty, *span);
            }
        }
    }

    fn assign(&mut self, lhs: &Lhs, rhs_ty: ExprType, span: Span) {
        let names = lhs.names();
        if names.len() != rhs_ty.len() {
            self.error(
                Code::TupleArity,
                span,
                format!(
                    "Cannot assign {} value(s) to {} attribute(s)",
                    rhs_ty.len(),
                    names.len()
                ),
            );
            for n in names {
                self.attr_term(n);
            }
            return;
        }
        for (n, t) in names.iter().zip(rhs_ty) {
            let target = self.attr_term(n);
            self.subtype(t, target, span);
        }
    }

    fn check_at_call(&mut self, a: &PositionedAction, rule: &Rule) {
        let Some((lhs, func, args)) = a.body.as_translation_call() else {
            return;
        };
        let arg_types: Vec<(Option<Term>, Span)> = args
            .iter()
            .map(|e| {
                let t = self.expr(e, 1, rule, false);
                (if t.len() == 1 { t[0] } else { None }, e.span())
            })
            .collect();
        let results = self.call(func, &arg_types, lhs.map_or(0, |l| l.names().len()), true);
        if let Some(lhs) = lhs {
            self.assign(lhs, results, a.body.span());
        }
    }

    /// Validates `at` actions and decides how each nonterminal occurrence
    /// of the rule is translated.
    fn check_at_sites(
        &mut self,
        spec: &Specification,
        rule: &Rule,
    ) -> BTreeMap<Vec<usize>, AtBinding> {
        let mut bindings = BTreeMap::new();
        for (i, a) in self.f.actions.iter().enumerate() {
            if a.position != Position::At {
                continue;
            }
            let mut targets: Vec<(Vec<usize>, &Symbol)> = Vec::new();
            for occ in &a.occurrences {
                match nonterminal_at(&rule.rhs, &occ.path) {
                    Some(found) => targets.push(found),
                    None => {
                        self.error(
                            Code::AtSite,
                            a.site_span,
                            format!(
                                "'at' action on {} which is not a nonterminal occurrence",
                                a.site
                            ),
                        );
                        break;
                    }
                }
            }
            if targets.len() != a.occurrences.len() {
                continue;
            }
            let Some((_, func, _)) = a.body.as_translation_call() else {
                self.error(
                    Code::AtBody,
                    a.body.span(),
                    "An 'at' action must consist of exactly one call to a translation function",
                );
                continue;
            };
            let callee = self.ctx.signature(&func.name);
            let mut ok = true;
            for (_, sym) in &targets {
                let fits = matches!(
                    callee.map(|s| &s.kind),
                    Some(super::context::FunctionKind::Translation { rule }) if *rule == sym.name
                );
                if !fits {
                    self.error(
                        Code::AtTarget,
                        func.span,
                        format!(
                            "{} is not a translation function of rule {}",
                            func.name, sym.name
                        ),
                    );
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for (path, sym) in targets {
                if bindings.insert(path, AtBinding::Action(i)).is_some() {
                    self.error(
                        Code::DuplicateAt,
                        a.site_span,
                        format!(
                            "More than one 'at' action for an occurrence of {}",
                            sym.name
                        ),
                    );
                }
            }
        }

        let mut missing = Vec::new();
        rule.rhs.walk(&mut |path, node| {
            if let RhsExpr::Symbol(sym) = node {
                if sym.is_nonterminal() && !bindings.contains_key(path) {
                    missing.push((path.to_vec(), sym.clone()));
                }
            }
        });
        for (path, sym) in missing {
            let binding = if spec.functions_for(&sym.name).next().is_none() {
                AtBinding::Plain
            } else if let Some(g) = spec.implicit_function(&sym.name) {
                AtBinding::Implicit(g.name.name.clone())
            } else {
                self.error(
                    Code::MissingAt,
                    sym.span,
                    format!(
                        "Occurrence of {} needs an 'at' action: its translation functions all take inputs",
                        sym.name
                    ),
                );
                continue;
            };
            bindings.insert(path, binding);
        }
        bindings
    }

    fn describe(&self, v: VarId) -> String {
        match &self.vars[v.index()].0 {
            VarOrigin::Local(n) => format!("local attribute {n}"),
            VarOrigin::Param {
                func,
                index,
                output,
            } => format!(
                "{} {} of external function {func}",
                if *output { "result" } else { "parameter" },
                index + 1
            ),
        }
    }

    fn finish(
        mut self,
        at_bindings: BTreeMap<Vec<usize>, AtBinding>,
    ) -> (
        Option<FunctionTypes>,
        Vec<(String, InferredSig)>,
        Vec<Diagnostic>,
    ) {
        let types = self.ctx.ext.types();
        let solution = match solve(types, self.vars.len(), &self.constraints) {
            Ok(s) => Some(s),
            Err(errs) => {
                for e in errs {
                    let d = match &e {
                        SolveError::Incompatible { lower, upper, span, .. } => Diagnostic::error(
                            Code::IncompatibleTypes,
                            *span,
                            format!(
                                "Incompatible types: {} and {}",
                                types.type_name(*lower),
                                types.type_name(*upper)
                            ),
                        ),
                        SolveError::Ambiguous { var, candidates } => Diagnostic::error(
                            Code::AmbiguousType,
                            self.vars[var.index()].1,
                            format!(
                                "Cannot infer the type of {}: {} are equally suitable",
                                self.describe(*var),
                                candidates
                                    .iter()
                                    .map(|t| types.type_name(*t))
                                    .collect::<Vec<_>>()
                                    .join(" and ")
                            ),
                        ),
                        SolveError::NoTop { var } => Diagnostic::error(
                            Code::NoTopType,
                            self.vars[var.index()].1,
                            format!(
                                "Cannot infer the type of {}: nothing constrains it and there is no top type",
                                self.describe(*var)
                            ),
                        ),
                    };
                    self.diags.push(d);
                }
                None
            }
        };
        let poisoned = self.attrs.values().any(|a| a.term.is_none());
        let Some(solution) = solution.filter(|_| self.diags.is_empty() && !poisoned) else {
            return (None, Vec::new(), self.diags);
        };
        let ground = |t: Term| match t {
            Term::Ground(g) => g,
            Term::Var(v) => solution[v.index()],
        };
        let attributes = self
            .attrs
            .iter()
            .map(|(n, a)| {
                (
                    n.clone(),
                    AttributeInfo {
                        ty: ground(a.term.expect("checked above")),
                        role: a.role,
                        inferred: a.inferred,
                        span: a.span,
                    },
                )
            })
            .collect();
        let sigs = self
            .skeletons
            .iter()
            .map(|(n, sk)| {
                (
                    n.clone(),
                    InferredSig {
                        inputs: sk.inputs.iter().map(|v| solution[v.index()]).collect(),
                        outputs: sk.outputs.iter().map(|v| solution[v.index()]).collect(),
                        span: sk.span,
                    },
                )
            })
            .collect();
        (
            Some(FunctionTypes {
                name: self.f.name.name.clone(),
                rule: self.f.for_rule.clone(),
                attributes,
                at_bindings,
            }),
            sigs,
            self.diags,
        )
    }
}

/// The nonterminal symbol at `path`, looking through labels.
pub fn nonterminal_at<'r>(rhs: &'r RhsExpr, path: &[usize]) -> Option<(Vec<usize>, &'r Symbol)> {
    let mut path = path.to_vec();
    let mut node = rhs.at_path(&path)?;
    loop {
        match node {
            RhsExpr::Labeled { child, .. } => {
                path.push(0);
                node = child;
            }
            RhsExpr::Symbol(s) if s.is_nonterminal() => return Some((path, s)),
            _ => return None,
        }
    }
}
