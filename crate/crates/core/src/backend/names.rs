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

//! Fresh-name generation for emitted code.
//!
//! Emitted identifiers must avoid Java keywords, ANTLR keywords and names
//! the generated parser uses internally. Clashing names get the smallest
//! numeric suffix that makes them free.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;

use crate::types::BackendProfile;

pub const JAVA_KEYWORDS: &[&str] = &[
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
];

pub const ANTLR_KEYWORDS: &[&str] = &[
    "grammar",
    "lexer",
    "parser",
    "tree",
    "fragment",
    "returns",
    "throws",
    "catch",
    "finally",
    "options",
    "tokens",
    "scope",
    "import",
    "init",
    "after",
    "header",
    "members",
    "rule",
    "protected",
    "public",
    "private",
    "EOF",
    "EOR",
    "DOWN",
    "UP",
];

/// Members and locals of generated recognizers.
pub const GENERATOR_NAMES: &[&str] = &[
    "input",
    "state",
    "retval",
    "adaptor",
    "ctx",
    "dfa",
    "tokenNames",
    "backtracking",
    "failed",
    "ruleMemo",
    "exception",
    "re",
    "nvae",
    "eee",
    "mse",
    "alt",
    "cnt",
    "LA",
    "match",
    "recover",
    "reportError",
    "text",
    "type",
    "channel",
    "start",
    "stop",
    "tree",
    "st",
    "externals",
    "setExternals",
    "_input",
    "_la",
    "_t",
];

/// Prefixes of generated names that are followed by a number, such as
/// `char_literal3` or `set7`.
pub const GENERATOR_NUMBERED_PREFIXES: &[&str] = &[
    "char_literal",
    "string_literal",
    "set",
    "root_",
    "wildcard",
    "alt",
    "cnt",
    "LA",
    "dfa",
    "DFA",
    "FOLLOW_",
    "_first_",
];

/// Name families a fresh name is drawn from. Every family shares one
/// injective mapping so no two originals end up with the same output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameKind {
    Rule,
    /// Translation functions emitted as rules of their own.
    Function,
    External,
    Attribute,
    Label,
    Helper,
}

#[derive(Clone, Debug, Default)]
pub struct EmissionPlan {
    pub profile: Option<BackendProfile>,
    /// `(kind, original)` to emitted name.
    pub renames: IndexMap<(NameKind, String), String>,
    pub imports: BTreeSet<String>,
    used: BTreeSet<String>,
    /// Grammar symbol names; ANTLR derives numbered locals from them.
    symbol_names: BTreeSet<String>,
}

impl EmissionPlan {
    pub fn new(
        profile: Option<BackendProfile>,
        symbol_names: impl IntoIterator<Item = String>,
    ) -> Self {
        EmissionPlan {
            profile,
            symbol_names: symbol_names.into_iter().collect(),
            ..EmissionPlan::default()
        }
    }

    /// True if `name` must never appear as an emitted identifier.
    pub fn is_reserved(&self, name: &str) -> bool {
        if JAVA_KEYWORDS.contains(&name)
            || ANTLR_KEYWORDS.contains(&name)
            || GENERATOR_NAMES.contains(&name)
        {
            return true;
        }
        self.numbered_prefixes().any(|p| {
            name.strip_prefix(p)
                .is_some_and(|rest| !rest.is_empty() && all_digits(rest))
        })
    }

    fn numbered_prefixes(&self) -> impl Iterator<Item = &str> {
        GENERATOR_NUMBERED_PREFIXES
            .iter()
            .copied()
            .chain(self.symbol_names.iter().map(String::as_str))
    }

    /// True if every numbered form of `base` is a generated name, so no
    /// suffix can make it free.
    fn suffixes_exhausted(&self, base: &str) -> bool {
        self.numbered_prefixes()
            .any(|p| base.strip_prefix(p).is_some_and(all_digits))
    }

    /// The emitted name for `original`, allocating one on first request.
    pub fn name(&mut self, kind: NameKind, original: &str) -> String {
        if let Some(n) = self.renames.get(&(kind, original.to_string())) {
            return n.clone();
        }
        let fresh = self.fresh(original, &BTreeSet::new());
        self.renames
            .insert((kind, original.to_string()), fresh.clone());
        fresh
    }

    /// The emitted name previously allocated for `original`.
    pub fn get(&self, kind: NameKind, original: &str) -> Option<&str> {
        self.renames
            .get(&(kind, original.to_string()))
            .map(String::as_str)
    }

    /// Returns `requested` if it is free, otherwise `requested` followed by
    /// the smallest positive number that is. The result is marked used.
    pub fn fresh(&mut self, requested: &str, reserved: &BTreeSet<String>) -> String {
        let free = |plan: &Self, n: &str| {
            !reserved.contains(n) && !plan.used.contains(n) && !plan.is_reserved(n)
        };
        // Numbered forms of a grammar symbol or generator prefix are all
        // taken, so such names are extended with an underscore first.
        let base = if !free(self, requested) && self.suffixes_exhausted(requested) {
            format!("{requested}_")
        } else {
            requested.to_string()
        };
        let name = if free(self, &base) {
            base
        } else {
            (1u64..)
                .map(|k| format!("{base}{k}"))
                .find(|n| free(self, n))
                .expect("unbounded suffixes")
        };
        self.used.insert(name.clone());
        name
    }

    /// Every emitted name mapped to its originals; used to assert injectivity.
    pub fn inverse(&self) -> BTreeMap<&str, Vec<&(NameKind, String)>> {
        let mut inv: BTreeMap<&str, Vec<&(NameKind, String)>> = BTreeMap::new();
        for (k, v) in &self.renames {
            inv.entry(v.as_str()).or_default().push(k);
        }
        inv
    }
}

fn all_digits(s: &str) -> bool {
    s.bytes().all(|b| b.is_ascii_digit())
}

/// Stand-alone form of [`EmissionPlan::fresh`] with no grammar symbols.
pub fn fresh_name(plan: &mut EmissionPlan, requested: &str, reserved: &BTreeSet<String>) -> String {
    plan.fresh(requested, reserved)
}
