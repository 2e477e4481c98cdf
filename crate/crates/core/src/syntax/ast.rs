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

//! Specification-level syntax trees: translation functions, their actions and
//! statements, external signatures and extension declarations.

use indexmap::IndexMap;

use crate::diag::Span;
use crate::grammar::{GrammarModel, Occurrence, Site};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }
}

/// A ground type as written in the source, already normalized by the
/// extension that parsed it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeRef {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Input,
    Output,
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: Ident,
    /// `None` only for locals whose type is left to inference.
    pub ty: Option<TypeRef>,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Attr(Ident),
    /// `NAME#`
    TokenText(Ident),
    Call {
        func: Ident,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Attr(i) | Expr::TokenText(i) => i.span,
            Expr::Call { func, .. } => func.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lhs {
    Single(Ident),
    Tuple(Vec<Ident>),
}

impl Lhs {
    pub fn names(&self) -> &[Ident] {
        match self {
            Lhs::Single(i) => std::slice::from_ref(i),
            Lhs::Tuple(is) => is,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Assign {
        lhs: Lhs,
        rhs: Expr,
        span: Span,
    },
    /// An expression statement; always of call form.
    Call {
        call: Expr,
        span: Span,
    },
    Block {
        stmts: Vec<Stmt>,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Assign { span, .. } | Stmt::Call { span, .. } | Stmt::Block { span, .. } => *span,
        }
    }

    /// The call performed by an `at` action, if the statement has that shape.
    pub fn as_translation_call(&self) -> Option<(Option<&Lhs>, &Ident, &[Expr])> {
        match self {
            Stmt::Assign {
                lhs,
                rhs: Expr::Call { func, args },
                ..
            } => Some((Some(lhs), func, args)),
            Stmt::Call {
                call: Expr::Call { func, args },
                ..
            } => Some((None, func, args)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Before,
    After,
    At,
}

impl Position {
    pub fn keyword(self) -> &'static str {
        match self {
            Position::Before => "before",
            Position::After => "after",
            Position::At => "at",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionedAction {
    pub position: Position,
    pub site: Site,
    pub site_span: Span,
    /// Resolved against the owning rule while parsing.
    pub occurrences: Vec<Occurrence>,
    pub body: Stmt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationFunction {
    pub name: Ident,
    pub for_rule: String,
    pub inputs: Vec<AttributeDecl>,
    pub outputs: Vec<AttributeDecl>,
    pub locals: Vec<AttributeDecl>,
    pub actions: Vec<PositionedAction>,
}

impl TranslationFunction {
    pub fn declared(&self) -> impl Iterator<Item = &AttributeDecl> {
        self.inputs.iter().chain(&self.outputs).chain(&self.locals)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Declared,
    Inferred,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalSignature {
    pub name: Ident,
    pub inputs: Vec<AttributeDecl>,
    pub outputs: Vec<AttributeDecl>,
    pub origin: Origin,
}

/// Extension-specific payload collected from the declarations prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    /// Qualified names, `*` kept as the last segment for on-demand imports.
    pub imports: Vec<String>,
    pub options: IndexMap<String, String>,
}

impl Declarations {
    pub fn is_empty(&self) -> bool {
        self.imports.is_empty() && self.options.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Specification {
    pub declarations: Declarations,
    pub grammar: GrammarModel,
    pub functions: Vec<TranslationFunction>,
    pub externals: Vec<ExternalSignature>,
}

impl Specification {
    pub fn function(&self, name: &str) -> Option<&TranslationFunction> {
        self.functions.iter().find(|f| f.name.name == name)
    }

    pub fn functions_for<'a>(
        &'a self,
        rule: &'a str,
    ) -> impl Iterator<Item = &'a TranslationFunction> + 'a {
        self.functions.iter().filter(move |f| f.for_rule == rule)
    }

    /// Translation function invoked for an occurrence of `rule` that has no
    /// `at` action: the first one of the rule taking no inputs.
    pub fn implicit_function(&self, rule: &str) -> Option<&TranslationFunction> {
        self.functions
            .iter()
            .find(|f| f.for_rule == rule && f.inputs.is_empty())
    }

    /// Function run when `rule` is the start symbol: the one sharing the
    /// rule's name, else the only one.
    pub fn start_function(&self, rule: &str) -> Option<&TranslationFunction> {
        let all: Vec<_> = self
            .functions
            .iter()
            .filter(|f| f.for_rule == rule)
            .collect();
        all.iter()
            .find(|f| f.name.name == rule)
            .copied()
            .or(if all.len() == 1 { Some(all[0]) } else { None })
    }
}
