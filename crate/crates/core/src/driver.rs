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

//! The front-end pipeline: parsing, grammar validation, type checking and
//! inference, then definite assignment. Also selects the type system,
//! language and back-end profile from a description file.

use std::sync::Arc;

use thiserror::Error;

use crate::check::{check_specification, FunctionTypes, TypeContext};
use crate::diag::{sort_diagnostics, Diagnostic};
use crate::flow::{build_cfg, check_definite_assignment};
use crate::grammar::validate_grammar;
use crate::syntax::ast::Specification;
use crate::syntax::{parse_specification, parse_type_system_file, TypeSystemFile};
use crate::types::{
    close_subtyping, BackendProfile, DeclarativeExtension, Extension, ImportsExtension,
    LanguageDesc,
};

/// A specification that passed every front-end check.
#[derive(Clone)]
pub struct ValidatedSpec {
    /// The parsed specification with inferred external signatures appended.
    pub spec: Specification,
    /// Parallel to `spec.functions`.
    pub functions: Vec<FunctionTypes>,
    pub ext: Arc<dyn Extension>,
    /// Diagnostics below error severity, sorted.
    pub warnings: Vec<Diagnostic>,
}

impl ValidatedSpec {
    pub fn function_types(&self, name: &str) -> Option<&FunctionTypes> {
        self.functions.iter().find(|f| f.name == name)
    }
}

impl std::fmt::Debug for ValidatedSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ValidatedSpec")
            .field("spec", &self.spec)
            .field("functions", &self.functions)
            .field("ext", &self.ext.name())
            .finish()
    }
}

/// Runs all front-end phases over `text`. Phases after parsing run even if
/// an earlier one reported errors for other functions, but data flow is
/// only analyzed for functions whose types were fully resolved.
pub fn analyze(text: &str, ext: Arc<dyn Extension>) -> Result<ValidatedSpec, Vec<Diagnostic>> {
    let mut spec = parse_specification(text, ext.as_ref()).map_err(sorted)?;
    let mut diags = validate_grammar(&spec.grammar);

    let (ctx, ctx_diags) = TypeContext::build(&spec, ext.as_ref());
    diags.extend(ctx_diags);
    let checked = check_specification(&spec, &ctx);
    diags.extend(checked.diagnostics);

    for (f, types) in spec.functions.iter().zip(&checked.functions) {
        if types.is_none() {
            continue;
        }
        if let Some(rule) = spec.grammar.rule(&f.for_rule) {
            diags.extend(check_definite_assignment(&build_cfg(rule, f), f));
        }
    }

    if diags.iter().any(Diagnostic::is_error) {
        return Err(sorted(diags));
    }
    spec.externals.extend(checked.inferred);
    Ok(ValidatedSpec {
        spec,
        functions: checked.functions.into_iter().flatten().collect(),
        ext,
        warnings: sorted(diags),
    })
}

fn sorted(mut diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    sort_diagnostics(&mut diags);
    diags
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("type-system description has errors")]
    Diagnostics(Vec<Diagnostic>),
    #[error("no back-end profile named '{0}'")]
    UnknownProfile(String),
    #[error("no language named '{0}'")]
    UnknownLanguage(String),
    #[error("{0}")]
    Selection(String),
    #[error("unknown extension '{0}'")]
    UnknownExtension(String),
}

/// The extension chosen for a run together with what the back-end needs.
#[derive(Clone)]
pub struct Environment {
    pub ext: Arc<dyn Extension>,
    pub language: Option<LanguageDesc>,
    pub profile: Option<BackendProfile>,
}

/// Builds the environment for `extension` from an optional description
/// file. A profile selects its language and that language's type system;
/// without one, the only language and the only type system are used.
pub fn load_environment(
    extension: &str,
    description: Option<&str>,
    profile: Option<&str>,
) -> Result<Environment, LoadError> {
    let file = match description {
        Some(text) => parse_type_system_file(text).map_err(LoadError::Diagnostics)?,
        None => TypeSystemFile::default(),
    };
    let profile = match profile {
        Some(name) => Some(
            file.profile(name)
                .cloned()
                .ok_or_else(|| LoadError::UnknownProfile(name.to_string()))?,
        ),
        None => None,
    };

    match extension {
        DeclarativeExtension::NAME => {
            let language = match &profile {
                Some(p) => Some(
                    file.language(&p.for_language)
                        .cloned()
                        .ok_or_else(|| LoadError::UnknownLanguage(p.for_language.clone()))?,
                ),
                None if file.languages.len() == 1 => Some(file.languages[0].clone()),
                None => None,
            };
            let desc = match &language {
                Some(l) => file.typesystem(&l.for_type_system),
                None if file.typesystems.len() == 1 => file.typesystems.first(),
                None if file.typesystems.is_empty() => {
                    return Err(LoadError::Selection("no type system is described".into()))
                }
                None => {
                    return Err(LoadError::Selection(
                        "several type systems are described; choose one with a profile".into(),
                    ))
                }
            }
            .ok_or_else(|| {
                LoadError::Selection("the language names no known type system".into())
            })?;
            let sys = close_subtyping(desc).map_err(LoadError::Diagnostics)?;
            Ok(Environment {
                ext: Arc::new(DeclarativeExtension::new(sys, language.clone())),
                language,
                profile,
            })
        }
        ImportsExtension::NAME | "java" => Ok(Environment {
            ext: Arc::new(ImportsExtension::java()),
            language: None,
            profile,
        }),
        other => Err(LoadError::UnknownExtension(other.to_string())),
    }
}
