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

//! The typing context: every function signature in scope, resolved against
//! the active ground type system.

use indexmap::IndexMap;

use crate::diag::{Code, Diagnostic, Span};
use crate::grammar::is_token_name;
use crate::syntax::ast::{AttributeDecl, Origin, Specification};
use crate::types::{Extension, TypeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    Translation { rule: String },
    External { origin: Origin },
}

/// One parameter or result. `ty` is `None` when the declared type could not
/// be resolved; the problem has already been reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub ty: Option<TypeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub inputs: Vec<Slot>,
    pub outputs: Vec<Slot>,
    pub kind: FunctionKind,
    pub span: Span,
}

impl Signature {
    pub fn is_translation(&self) -> bool {
        matches!(self.kind, FunctionKind::Translation { .. })
    }

    pub fn input_types(&self) -> Option<Vec<TypeId>> {
        self.inputs.iter().map(|s| s.ty).collect()
    }

    pub fn output_types(&self) -> Option<Vec<TypeId>> {
        self.outputs.iter().map(|s| s.ty).collect()
    }
}

/// Signatures of all translation and declared external functions.
pub struct TypeContext<'a> {
    pub ext: &'a dyn Extension,
    pub functions: IndexMap<String, Signature>,
}

impl<'a> TypeContext<'a> {
    /// Builds the context, reporting duplicate names, unresolvable types,
    /// untyped signature attributes and functions attached to token rules.
    pub fn build(spec: &Specification, ext: &'a dyn Extension) -> (Self, Vec<Diagnostic>) {
        let mut diags = Vec::new();
        let mut functions: IndexMap<String, Signature> = IndexMap::new();

        let mut add = |sig: Signature, diags: &mut Vec<Diagnostic>| {
            if functions.contains_key(&sig.name) {
                diags.push(Diagnostic::error(
                    Code::DuplicateFunction,
                    sig.span,
                    format!("Function {} is defined more than once", sig.name),
                ));
            } else {
                functions.insert(sig.name.clone(), sig);
            }
        };

        for e in &spec.externals {
            let sig = Signature {
                name: e.name.name.clone(),
                inputs: slots(ext, &e.inputs, &mut diags),
                outputs: slots(ext, &e.outputs, &mut diags),
                kind: FunctionKind::External { origin: e.origin },
                span: e.name.span,
            };
            check_distinct(e.inputs.iter().chain(&e.outputs), &mut diags);
            add(sig, &mut diags);
        }
        for f in &spec.functions {
            if is_token_name(&f.for_rule) {
                diags.push(Diagnostic::error(
                    Code::FunctionRule,
                    f.name.span,
                    format!(
                        "Translation function {} is attached to token rule {}",
                        f.name.name, f.for_rule
                    ),
                ));
            }
            let sig = Signature {
                name: f.name.name.clone(),
                inputs: slots(ext, &f.inputs, &mut diags),
                outputs: slots(ext, &f.outputs, &mut diags),
                kind: FunctionKind::Translation {
                    rule: f.for_rule.clone(),
                },
                span: f.name.span,
            };
            check_distinct(f.declared(), &mut diags);
            add(sig, &mut diags);
        }
        (TypeContext { ext, functions }, diags)
    }

    pub fn signature(&self, name: &str) -> Option<&Signature> {
        self.functions.get(name)
    }

    pub fn type_name(&self, ty: TypeId) -> &str {
        self.ext.types().type_name(ty)
    }
}

fn slots(ext: &dyn Extension, decls: &[AttributeDecl], diags: &mut Vec<Diagnostic>) -> Vec<Slot> {
    decls
        .iter()
        .map(|d| Slot {
            name: d.name.name.clone(),
            ty: resolve_declared(ext, d, diags),
        })
        .collect()
}

/// Resolves the declared type of `d`, reporting a missing or unknown type.
pub(crate) fn resolve_declared(
    ext: &dyn Extension,
    d: &AttributeDecl,
    diags: &mut Vec<Diagnostic>,
) -> Option<TypeId> {
    let Some(tr) = &d.ty else {
        diags.push(Diagnostic::error(
            Code::Declaration,
            d.name.span,
            format!("Attribute {} must declare its type", d.name.name),
        ));
        return None;
    };
    let ty = ext.resolve_type(tr);
    if ty.is_none() {
        diags.push(Diagnostic::error(
            Code::UnknownType,
            tr.span,
            format!("Unknown type {}", tr.name),
        ));
    }
    ty
}

fn check_distinct<'d>(decls: impl Iterator<Item = &'d AttributeDecl>, diags: &mut Vec<Diagnostic>) {
    let mut seen: Vec<&str> = Vec::new();
    for d in decls {
        if seen.contains(&d.name.name.as_str()) {
            diags.push(Diagnostic::error(
                Code::DuplicateAttribute,
                d.name.span,
                format!("Attribute {} is declared more than once", d.name.name),
            ));
        }
        seen.push(&d.name.name);
    }
}
