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

//! Parser for type-system description files.
//!
//! ```text
//! file       : (typesystem | language | backend)* ;
//! typesystem : 'typesystem' NAME '(' NAME ',' NAME ')' '{' (('type' NAME | NAME '<:' NAME) ';')* '}' ;
//! language   : 'language' NAME 'for' NAME '{' (NAME '=' STRING ';')* '}' ;
//! backend    : 'backend' STRING 'for' NAME '{' (NAME '=' STRING ';')* '}' ;
//! ```
//!
//! An underscore in the top-type position means the type system has no top
//! type.

use indexmap::IndexMap;

use crate::diag::{Code, Diagnostic, FileId, Span};
use crate::syntax::lexer::{tokenize, Tok, TokenCursor};
use crate::types::{BackendProfile, LanguageDesc, TypeSystemDesc};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeSystemFile {
    pub typesystems: Vec<TypeSystemDesc>,
    pub languages: Vec<LanguageDesc>,
    pub profiles: Vec<BackendProfile>,
}

impl TypeSystemFile {
    pub fn typesystem(&self, name: &str) -> Option<&TypeSystemDesc> {
        self.typesystems.iter().find(|t| t.name == name)
    }

    pub fn language(&self, name: &str) -> Option<&LanguageDesc> {
        self.languages.iter().find(|l| l.name == name)
    }

    pub fn profile(&self, name: &str) -> Option<&BackendProfile> {
        self.profiles.iter().find(|p| p.matches(name))
    }
}

/// Parses and cross-checks a description file: duplicate names, undeclared
/// types in subtyping rules and realizations, and dangling `for` references
/// are all reported.
pub fn parse_type_system_file(text: &str) -> Result<TypeSystemFile, Vec<Diagnostic>> {
    let tokens = tokenize(text, FileId::TYPESYSTEM)?;
    let mut cur = TokenCursor::new(&tokens);
    let mut file = TypeSystemFile::default();
    let mut diags = Vec::new();

    while !cur.at_eof() {
        let start = cur.position();
        let r = if cur.at_keyword("typesystem") {
            typesystem(&mut cur).map(|t| file.typesystems.push(t))
        } else if cur.at_keyword("language") {
            language(&mut cur).map(|l| file.languages.push(l))
        } else if cur.at_keyword("backend") {
            backend(&mut cur).map(|b| file.profiles.push(b))
        } else {
            Err(cur.unexpected("'typesystem', 'language' or 'backend'"))
        };
        if let Err(d) = r {
            diags.push(d);
            skip_block(&mut cur);
        }
        if cur.position() == start {
            cur.bump();
        }
    }

    diags.extend(validate(&file));
    if diags.is_empty() {
        Ok(file)
    } else {
        Err(diags)
    }
}

fn skip_block(cur: &mut TokenCursor<'_>) {
    while !cur.at_eof() && !cur.at(&Tok::RBrace) {
        cur.bump();
    }
    cur.eat(&Tok::RBrace);
}

fn typesystem(cur: &mut TokenCursor<'_>) -> Result<TypeSystemDesc, Diagnostic> {
    let kw = cur.bump().span;
    let (name, _) = cur.expect_ident()?;
    cur.expect(&Tok::LParen)?;
    let (top, _) = cur.expect_ident()?;
    cur.expect(&Tok::Comma)?;
    let (string_name, _) = cur.expect_ident()?;
    cur.expect(&Tok::RParen)?;
    cur.expect(&Tok::LBrace)?;
    let mut declared_types = Vec::new();
    let mut declared_subtypings = Vec::new();
    while !cur.at(&Tok::RBrace) {
        if cur.at_keyword("type") && matches!(cur.peek_at(1).tok, Tok::Ident(_)) {
            cur.bump();
            let (t, span) = cur.expect_ident()?;
            declared_types.push((t, span));
        } else {
            let (sub, span) = cur.expect_ident()?;
            cur.expect(&Tok::SubType)?;
            let (sup, _) = cur.expect_ident()?;
            declared_subtypings.push((sub, sup, span));
        }
        cur.expect(&Tok::Semi)?;
    }
    cur.expect(&Tok::RBrace)?;
    Ok(TypeSystemDesc {
        name,
        top_name: (top != "_").then_some(top),
        string_name,
        declared_types,
        declared_subtypings,
        span: kw,
    })
}

fn key_values(cur: &mut TokenCursor<'_>) -> Result<IndexMap<String, String>, Diagnostic> {
    cur.expect(&Tok::LBrace)?;
    let mut map = IndexMap::new();
    while !cur.at(&Tok::RBrace) {
        let (k, _) = cur.expect_ident()?;
        cur.expect(&Tok::Eq)?;
        let (v, _) = cur.expect_string()?;
        cur.expect(&Tok::Semi)?;
        map.insert(k, v);
    }
    cur.expect(&Tok::RBrace)?;
    Ok(map)
}

fn expect_for(cur: &mut TokenCursor<'_>) -> Result<String, Diagnostic> {
    if !cur.at_keyword("for") {
        return Err(cur.unexpected("'for'"));
    }
    cur.bump();
    Ok(cur.expect_ident()?.0)
}

fn language(cur: &mut TokenCursor<'_>) -> Result<LanguageDesc, Diagnostic> {
    let span = cur.bump().span;
    let (name, _) = cur.expect_ident()?;
    let for_type_system = expect_for(cur)?;
    let realizations = key_values(cur)?;
    Ok(LanguageDesc {
        name,
        for_type_system,
        realizations,
        span,
    })
}

fn backend(cur: &mut TokenCursor<'_>) -> Result<BackendProfile, Diagnostic> {
    let span = cur.bump().span;
    let (backend_id, _) = cur.expect_string()?;
    let for_language = expect_for(cur)?;
    let options = key_values(cur)?;
    Ok(BackendProfile {
        backend_id,
        for_language,
        options,
        span,
    })
}

fn validate(file: &TypeSystemFile) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let dup = |what: &str, name: &str, span: Span| {
        Diagnostic::error(
            Code::TypeSystemDuplicate,
            span,
            format!("Duplicate {what} {name}"),
        )
    };

    for (i, ts) in file.typesystems.iter().enumerate() {
        if file.typesystems[..i].iter().any(|o| o.name == ts.name) {
            diags.push(dup("type system", &ts.name, ts.span));
        }
        let mut seen: Vec<&str> = Vec::new();
        for (t, span) in &ts.declared_types {
            if seen.contains(&t.as_str()) {
                diags.push(dup("type", t, *span));
            }
            seen.push(t);
        }
        let known = ts.all_type_names();
        for (sub, sup, span) in &ts.declared_subtypings {
            for n in [sub, sup] {
                if !known.contains(n) {
                    diags.push(Diagnostic::error(
                        Code::TypeSystemUndefined,
                        *span,
                        format!("Undeclared type {n} in type system {}", ts.name),
                    ));
                }
            }
        }
    }

    for (i, lang) in file.languages.iter().enumerate() {
        if file.languages[..i].iter().any(|o| o.name == lang.name) {
            diags.push(dup("language", &lang.name, lang.span));
        }
        match file.typesystem(&lang.for_type_system) {
            None => diags.push(Diagnostic::error(
                Code::DanglingReference,
                lang.span,
                format!(
                    "Language {} refers to unknown type system {}",
                    lang.name, lang.for_type_system
                ),
            )),
            Some(ts) => {
                let known = ts.all_type_names();
                for t in lang.realizations.keys() {
                    if !known.contains(t) {
                        diags.push(Diagnostic::error(
                            Code::TypeSystemUndefined,
                            lang.span,
                            format!("Language {} realizes undeclared type {t}", lang.name),
                        ));
                    }
                }
            }
        }
    }

    for p in &file.profiles {
        if file.language(&p.for_language).is_none() {
            diags.push(Diagnostic::error(
                Code::DanglingReference,
                p.span,
                format!(
                    "Back-end profile '{}' refers to unknown language {}",
                    p.backend_id, p.for_language
                ),
            ));
        }
    }
    diags
}
