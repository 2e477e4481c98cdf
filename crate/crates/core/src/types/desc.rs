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

//! Declarative descriptions: abstract type systems, their realization in an
//! implementation language, and back-end profiles.

use indexmap::IndexMap;

use super::{FiniteTypeSystem, GroundTypeSystem, TypeId};
use crate::diag::{Code, Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSystemDesc {
    pub name: String,
    pub top_name: Option<String>,
    pub string_name: String,
    pub declared_types: Vec<(String, Span)>,
    /// `(sub, super)` pairs.
    pub declared_subtypings: Vec<(String, String, Span)>,
    pub span: Span,
}

impl TypeSystemDesc {
    /// Declared names plus the string and top types, without duplicates, in
    /// declaration order.
    pub fn all_type_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |n: &str| {
            if !out.iter().any(|o| o == n) {
                out.push(n.to_string());
            }
        };
        for (n, _) in &self.declared_types {
            push(n);
        }
        push(&self.string_name);
        if let Some(t) = &self.top_name {
            push(t);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageDesc {
    pub name: String,
    pub for_type_system: String,
    pub realizations: IndexMap<String, String>,
    pub span: Span,
}

impl LanguageDesc {
    pub fn empty(name: impl Into<String>, for_type_system: impl Into<String>) -> Self {
        LanguageDesc {
            name: name.into(),
            for_type_system: for_type_system.into(),
            realizations: IndexMap::new(),
            span: Span::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendProfile {
    pub backend_id: String,
    pub for_language: String,
    pub options: IndexMap<String, String>,
    pub span: Span,
}

impl BackendProfile {
    /// `backend_id` itself or its last dotted segment.
    pub fn matches(&self, name: &str) -> bool {
        self.backend_id == name || self.backend_id.rsplit('.').next() == Some(name)
    }
}

/// Turns a description into a ground type system whose subtyping relation
/// is the reflexive-transitive closure of the declared pairs, with every
/// type below the top type when one is named.
pub fn close_subtyping(desc: &TypeSystemDesc) -> Result<FiniteTypeSystem, Vec<Diagnostic>> {
    let names = desc.all_type_names();
    let id_of = |n: &str| names.iter().position(|m| m == n).map(|i| TypeId(i as u32));

    let mut diags = Vec::new();
    let mut pairs = Vec::new();
    for (sub, sup, span) in &desc.declared_subtypings {
        match (id_of(sub), id_of(sup)) {
            (Some(a), Some(b)) => pairs.push((a, b)),
            _ => {
                let missing = if id_of(sub).is_none() { sub } else { sup };
                diags.push(Diagnostic::error(
                    Code::TypeSystemUndefined,
                    *span,
                    format!("Undeclared type {missing} in type system {}", desc.name),
                ));
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let string = id_of(&desc.string_name).expect("string type is always present");
    let top = desc.top_name.as_deref().and_then(id_of);
    FiniteTypeSystem::new(desc.name.clone(), names, &pairs, string, top).map_err(|cycles| {
        cycles
            .into_iter()
            .map(|c| {
                Diagnostic::error(
                    Code::CyclicSubtyping,
                    desc.span,
                    format!(
                        "Cyclic subtyping between {} and {} in type system {}",
                        c.first, c.second, desc.name
                    ),
                )
            })
            .collect()
    })
}

/// The implementation-language spelling of `ty`, falling back to its own
/// name when the language leaves it unmapped.
pub fn realize_type(lang: &LanguageDesc, sys: &dyn GroundTypeSystem, ty: TypeId) -> String {
    let name = sys.type_name(ty);
    lang.realizations
        .get(name)
        .cloned()
        .unwrap_or_else(|| name.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(types: &[&str], pairs: &[(&str, &str)], top: Option<&str>) -> TypeSystemDesc {
        TypeSystemDesc {
            name: "T".into(),
            top_name: top.map(String::from),
            string_name: "String".into(),
            declared_types: types
                .iter()
                .map(|t| (t.to_string(), Span::default()))
                .collect(),
            declared_subtypings: pairs
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string(), Span::default()))
                .collect(),
            span: Span::default(),
        }
    }

    #[test]
    fn transitive_and_reflexive() {
        let sys =
            close_subtyping(&desc(&["a", "b", "c"], &[("a", "b"), ("b", "c")], None)).unwrap();
        let id = |n| sys.lookup(n).unwrap();
        assert!(sys.is_subtype(id("a"), id("c")));
        assert!(sys.is_subtype(id("b"), id("b")));
        assert!(!sys.is_subtype(id("c"), id("a")));
        assert!(!sys.is_subtype(id("String"), id("a")));
    }

    #[test]
    fn top_is_above_everything() {
        let sys = close_subtyping(&desc(&["a"], &[], Some("Top"))).unwrap();
        let top = sys.top_type().unwrap();
        for t in sys.predefined_types() {
            assert!(sys.is_subtype(t, top));
        }
    }

    #[test]
    fn cycle_is_an_error() {
        let errs =
            close_subtyping(&desc(&["a", "b"], &[("a", "b"), ("b", "a")], None)).unwrap_err();
        assert_eq!(errs[0].code, Code::CyclicSubtyping);
        let errs = close_subtyping(&desc(&["a"], &[("Top", "a")], Some("Top"))).unwrap_err();
        assert_eq!(errs[0].code, Code::CyclicSubtyping);
    }

    #[test]
    fn undeclared_pair_member() {
        let errs = close_subtyping(&desc(&["a"], &[("a", "zz")], None)).unwrap_err();
        assert_eq!(errs[0].code, Code::TypeSystemUndefined);
    }

    #[test]
    fn realization_fallback() {
        let sys = close_subtyping(&desc(&["Int"], &[], None)).unwrap();
        let mut lang = LanguageDesc::empty("L", "T");
        assert_eq!(realize_type(&lang, &sys, sys.lookup("Int").unwrap()), "Int");
        lang.realizations.insert("Int".into(), "int".into());
        assert_eq!(realize_type(&lang, &sys, sys.lookup("Int").unwrap()), "int");
    }

    #[test]
    fn profile_name_matching() {
        let p = BackendProfile {
            backend_id: "tpg.backends.ANTLRJavaBackend".into(),
            for_language: "Java".into(),
            options: IndexMap::new(),
            span: Span::default(),
        };
        assert!(p.matches("ANTLRJavaBackend"));
        assert!(p.matches("tpg.backends.ANTLRJavaBackend"));
        assert!(!p.matches("Java"));
    }
}
