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

//! Front-end extensions: each one supplies the syntax of ground types, the
//! declarations sub-grammar and a [`GroundTypeSystem`].

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{realize_type, FiniteTypeSystem, GroundTypeSystem, LanguageDesc, TypeId};
use crate::diag::{Code, Diagnostic};
use crate::syntax::ast::{Declarations, TypeRef};
use crate::syntax::lexer::{Tok, TokenCursor};

pub trait Extension: Send + Sync {
    fn name(&self) -> &str;

    fn types(&self) -> &dyn GroundTypeSystem;

    /// Consumes the declarations prefix of a specification. Stops at the
    /// first token that does not start a declaration.
    fn parse_declarations(
        &self,
        cur: &mut TokenCursor<'_>,
    ) -> Result<Declarations, Vec<Diagnostic>> {
        parse_standard_declarations(cur)
    }

    /// Parses one ground type at the cursor. Resolution against the type
    /// system happens later through [`Extension::resolve_type`].
    fn parse_type(
        &self,
        cur: &mut TokenCursor<'_>,
        decls: &Declarations,
    ) -> Result<TypeRef, Diagnostic>;

    fn resolve_type(&self, ty: &TypeRef) -> Option<TypeId> {
        self.types().lookup(&ty.name)
    }

    /// Spelling of `ty` in the implementation language.
    fn realize(&self, ty: TypeId) -> String;

    /// A name the back-end should import for `ty`, if any.
    fn qualified_name(&self, _ty: TypeId) -> Option<String> {
        None
    }
}

/// `('#javaoptions' '{' (NAME '=' STRING ';')+ '}')? ('import' NAME ('.' NAME)* ('.' '*')? ';'?)*`
pub fn parse_standard_declarations(
    cur: &mut TokenCursor<'_>,
) -> Result<Declarations, Vec<Diagnostic>> {
    let mut decls = Declarations::default();
    let mut errors = Vec::new();

    if matches!(&cur.peek().tok, Tok::HashIdent(s) if s == "javaoptions") {
        cur.bump();
        if let Err(e) = parse_options(cur, &mut decls) {
            errors.push(e);
            while !cur.at_eof() && !cur.at(&Tok::RBrace) {
                cur.bump();
            }
            cur.eat(&Tok::RBrace);
        }
    }

    while starts_import(cur) {
        cur.bump();
        match parse_import(cur) {
            Ok(name) => decls.imports.push(name),
            Err(e) => {
                errors.push(e);
                cur.recover_statement();
            }
        }
    }

    if errors.is_empty() {
        Ok(decls)
    } else {
        Err(errors)
    }
}

fn starts_import(cur: &TokenCursor<'_>) -> bool {
    cur.at_keyword("import")
        && matches!(cur.peek_at(1).tok, Tok::Ident(_))
        && !matches!(cur.peek_at(2).tok, Tok::Colon | Tok::LParen)
}

fn parse_options(cur: &mut TokenCursor<'_>, decls: &mut Declarations) -> Result<(), Diagnostic> {
    cur.expect(&Tok::LBrace)?;
    let mut count = 0;
    while !cur.at(&Tok::RBrace) {
        let (key, _) = cur.expect_ident()?;
        cur.expect(&Tok::Eq)?;
        let (value, _) = cur.expect_string()?;
        cur.expect(&Tok::Semi)?;
        decls.options.insert(key, value);
        count += 1;
    }
    if count == 0 {
        return Err(cur.unexpected("an option"));
    }
    cur.expect(&Tok::RBrace)?;
    Ok(())
}

fn parse_import(cur: &mut TokenCursor<'_>) -> Result<String, Diagnostic> {
    let (first, _) = cur.expect_ident()?;
    let mut name = first;
    while cur.eat(&Tok::Dot) {
        if cur.eat(&Tok::Star) {
            name.push_str(".*");
            break;
        }
        let (seg, _) = cur.expect_ident()?;
        name.push('.');
        name.push_str(&seg);
    }
    cur.eat(&Tok::Semi);
    Ok(name)
}

/// The default extension: types come from a type-system description and
/// are written as single identifiers.
pub struct DeclarativeExtension {
    sys: FiniteTypeSystem,
    language: Option<LanguageDesc>,
}

impl DeclarativeExtension {
    pub const NAME: &'static str = "declarative";

    pub fn new(sys: FiniteTypeSystem, language: Option<LanguageDesc>) -> Self {
        DeclarativeExtension { sys, language }
    }

    pub fn system(&self) -> &FiniteTypeSystem {
        &self.sys
    }

    pub fn language(&self) -> Option<&LanguageDesc> {
        self.language.as_ref()
    }
}

impl Extension for DeclarativeExtension {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn types(&self) -> &dyn GroundTypeSystem {
        &self.sys
    }

    fn parse_type(
        &self,
        cur: &mut TokenCursor<'_>,
        _decls: &Declarations,
    ) -> Result<TypeRef, Diagnostic> {
        let (name, span) = cur.expect_ident()?;
        Ok(TypeRef { name, span })
    }

    fn realize(&self, ty: TypeId) -> String {
        match &self.language {
            Some(lang) => realize_type(lang, &self.sys, ty),
            None => self.sys.type_name(ty).to_string(),
        }
    }
}

/// Types are dotted qualified names, with simple names resolved through
/// `import` declarations and implicitly imported packages. Subtyping is
/// nominal and declared up front.
pub struct ImportsExtension {
    sys: FiniteTypeSystem,
    implicit_packages: Vec<String>,
}

impl ImportsExtension {
    pub const NAME: &'static str = "imports";

    pub fn new(sys: FiniteTypeSystem, implicit_packages: Vec<String>) -> Self {
        ImportsExtension {
            sys,
            implicit_packages,
        }
    }

    /// A small nominal slice of the Java class library with
    /// `java.lang.Object` as top and `java.lang.String` as string type.
    pub fn java() -> Self {
        let names: Vec<String> = [
            "java.lang.Object",
            "java.lang.String",
            "java.lang.CharSequence",
            "java.lang.Number",
            "java.lang.Integer",
            "java.lang.Long",
            "java.lang.Boolean",
            "java.lang.Iterable",
            "java.util.Collection",
            "java.util.List",
            "java.util.ArrayList",
            "java.util.Map",
            "java.util.HashMap",
        ]
        .map(String::from)
        .to_vec();
        let id = |n: &str| TypeId(names.iter().position(|m| m == n).unwrap() as u32);
        let pairs = [
            ("java.lang.String", "java.lang.CharSequence"),
            ("java.lang.Integer", "java.lang.Number"),
            ("java.lang.Long", "java.lang.Number"),
            ("java.util.Collection", "java.lang.Iterable"),
            ("java.util.List", "java.util.Collection"),
            ("java.util.ArrayList", "java.util.List"),
            ("java.util.HashMap", "java.util.Map"),
        ]
        .map(|(a, b)| (id(a), id(b)));
        let string = id("java.lang.String");
        let top = Some(id("java.lang.Object"));
        let sys = FiniteTypeSystem::new("Java", names, &pairs, string, top)
            .expect("builtin hierarchy is acyclic");
        ImportsExtension::new(sys, vec!["java.lang".into()])
    }

    fn resolve_simple(
        &self,
        simple: &str,
        decls: &Declarations,
    ) -> Result<Option<String>, Vec<String>> {
        for imp in &decls.imports {
            if imp.rsplit('.').next() == Some(simple) && !imp.ends_with(".*") {
                return Ok(Some(imp.clone()));
            }
        }
        let packages = decls
            .imports
            .iter()
            .filter_map(|i| i.strip_suffix(".*"))
            .map(String::from)
            .chain(self.implicit_packages.iter().cloned());
        let mut hits: Vec<String> = packages
            .map(|p| format!("{p}.{simple}"))
            .filter(|q| self.sys.lookup(q).is_some())
            .collect();
        hits.sort();
        hits.dedup();
        match hits.len() {
            0 => Ok(None),
            1 => Ok(hits.pop()),
            _ => Err(hits),
        }
    }
}

impl Extension for ImportsExtension {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn types(&self) -> &dyn GroundTypeSystem {
        &self.sys
    }

    fn parse_type(
        &self,
        cur: &mut TokenCursor<'_>,
        decls: &Declarations,
    ) -> Result<TypeRef, Diagnostic> {
        let (first, mut span) = cur.expect_ident()?;
        let mut name = first;
        let mut dotted = false;
        // A dot is only part of the type when an identifier follows and the
        // attribute name still comes after it.
        while cur.at(&Tok::Dot)
            && matches!(cur.peek_at(1).tok, Tok::Ident(_))
            && matches!(cur.peek_at(2).tok, Tok::Ident(_) | Tok::Dot)
        {
            cur.bump();
            let (seg, seg_span) = cur.expect_ident()?;
            name.push('.');
            name.push_str(&seg);
            span.len = seg_span.column + seg_span.len - span.column;
            dotted = true;
        }
        if dotted {
            return Ok(TypeRef { name, span });
        }
        match self.resolve_simple(&name, decls) {
            Ok(Some(q)) => Ok(TypeRef { name: q, span }),
            Ok(None) => Ok(TypeRef { name, span }),
            Err(cands) => Err(Diagnostic::error(
                Code::UnknownType,
                span,
                format!("Ambiguous type name {name}: {}", cands.join(", ")),
            )),
        }
    }

    fn realize(&self, ty: TypeId) -> String {
        self.sys.type_name(ty).to_string()
    }

    fn qualified_name(&self, ty: TypeId) -> Option<String> {
        let n = self.sys.type_name(ty);
        n.contains('.').then(|| n.to_string())
    }
}

/// Extensions keyed by name.
#[derive(Clone, Default)]
pub struct ExtensionRegistry {
    extensions: BTreeMap<String, Arc<dyn Extension>>,
}

impl ExtensionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replaces any extension registered under the same name.
    pub fn register(&mut self, ext: Arc<dyn Extension>) {
        self.extensions.insert(ext.name().to_string(), ext);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Extension>> {
        self.extensions.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.extensions.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::FileId;
    use crate::syntax::lexer::tokenize;

    fn decls_of(text: &str) -> Result<Declarations, Vec<Diagnostic>> {
        let toks = tokenize(text, FileId::SPEC).unwrap();
        let mut cur = TokenCursor::new(&toks);
        let d = parse_standard_declarations(&mut cur)?;
        assert!(cur.at_eof(), "declarations left input behind");
        Ok(d)
    }

    #[test]
    fn imports_and_options() {
        let d = decls_of("import java.util.Map;").unwrap();
        assert_eq!(d.imports, vec!["java.util.Map".to_string()]);
        let d = decls_of("#javaoptions { package = 'a.b'; } import java.util.*;").unwrap();
        assert_eq!(d.options.get("package").map(String::as_str), Some("a.b"));
        assert_eq!(d.imports, vec!["java.util.*".to_string()]);
        assert!(decls_of("").unwrap().is_empty());
        assert!(decls_of("#javaoptions { }").is_err());
    }

    #[test]
    fn java_type_resolution() {
        let ext = ImportsExtension::java();
        let decls = decls_of("import java.util.Map;").unwrap();
        let parse = |text: &str| {
            let toks = tokenize(text, FileId::SPEC).unwrap();
            let mut cur = TokenCursor::new(&toks);
            ext.parse_type(&mut cur, &decls)
        };
        assert_eq!(parse("Map env").unwrap().name, "java.util.Map");
        assert_eq!(parse("Integer x").unwrap().name, "java.lang.Integer");
        assert_eq!(parse("java.util.List xs").unwrap().name, "java.util.List");
        assert_eq!(parse("Unknown x").unwrap().name, "Unknown");
        let map = ext.types().lookup("java.util.HashMap").unwrap();
        let top = ext.types().top_type().unwrap();
        assert!(ext.types().is_subtype(map, top));
        assert_eq!(
            ext.qualified_name(map).as_deref(),
            Some("java.util.HashMap")
        );
    }

    #[test]
    fn registry_by_name() {
        let mut reg = ExtensionRegistry::new();
        reg.register(Arc::new(ImportsExtension::java()));
        assert!(reg.get("imports").is_some());
        assert!(reg.get("declarative").is_none());
    }
}
