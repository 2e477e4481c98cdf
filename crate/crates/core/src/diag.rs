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

//! Diagnostics shared by every phase.
//!
//! A [`Diagnostic`] carries a stable [`Code`], a human readable message and a
//! [`Span`] pointing into one of the input files. Rendering follows the
//! `<file>:<line>:<col>: <severity>[<code>]: <message>` layout.

use std::fmt;

/// Identifies one input file inside a [`SourceNames`] table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FileId(pub u16);

impl FileId {
    pub const SPEC: FileId = FileId(0);
    pub const TYPESYSTEM: FileId = FileId(1);
}

/// A region of source text. Lines and columns are 1-based, `len` counts
/// characters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub file: FileId,
    pub line: u32,
    pub column: u32,
    pub len: u32,
}

impl Span {
    pub fn new(file: FileId, line: u32, column: u32, len: u32) -> Self {
        Span {
            file,
            line,
            column,
            len,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal,)*) => {
        /// Stable diagnostic identifiers.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }
        }
    };
}

codes! {
    Syntax => "E-SYNTAX",
    UndefinedSymbol => "E-NAME-UNDEF",
    DuplicateRule => "E-NAME-DUP",
    DuplicateLabel => "E-LABEL-DUP",
    RangeOutsideToken => "E-RANGE-CONTEXT",
    BadRange => "E-RANGE",
    EmptyRule => "E-RULE-EMPTY",
    FragmentMisuse => "E-FRAGMENT",
    TokenRuleReference => "E-TOKEN-REF",
    RecursiveToken => "E-TOKEN-RECURSIVE",
    UnknownSite => "E-SITE-UNKNOWN",
    AtSite => "E-SITE-AT",
    AtBody => "E-AT-BODY",
    AtTarget => "E-AT-TARGET",
    DuplicateAt => "E-AT-DUP",
    MissingAt => "E-AT-MISSING",
    FunctionRule => "E-TF-RULE",
    DuplicateAttribute => "E-ATTR-DUP",
    DuplicateFunction => "E-FN-DUP",
    TranslationCall => "E-FN-TF-CALL",
    UnknownToken => "E-TOKEN-UNKNOWN",
    UnknownType => "E-TYPE-UNKNOWN",
    IncompatibleTypes => "E-TYPE-INCOMPAT",
    AmbiguousType => "E-TYPE-AMBIG",
    NoTopType => "E-TYPE-NOTOP",
    InferenceConflict => "E-TYPE-INFER",
    Arity => "E-ARITY",
    TupleArity => "E-TUPLE-ARITY",
    Uninitialized => "E-FLOW-UNINIT",
    OutputUnassigned => "E-FLOW-OUTPUT",
    TokenTextUnavailable => "E-FLOW-TOKEN",
    CyclicSubtyping => "E-TS-CYCLE",
    TypeSystemUndefined => "E-TS-UNDEF",
    TypeSystemDuplicate => "E-TS-DUP",
    DanglingReference => "E-TS-REF",
    Declaration => "E-DECL",
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders with the file name looked up in `names`.
    pub fn render(&self, names: &SourceNames) -> String {
        format!(
            "{}:{}:{}: {}[{}]: {}",
            names.name(self.span.file),
            self.span.line,
            self.span.column,
            self.severity,
            self.code,
            self.message
        )
    }
}

/// Sorts by position, then code and message so that output is deterministic.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (a.span.file, a.span.line, a.span.column, a.code, &a.message).cmp(&(
            b.span.file,
            b.span.line,
            b.span.column,
            b.code,
            &b.message,
        ))
    });
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Maps [`FileId`]s to display names.
#[derive(Clone, Debug, Default)]
pub struct SourceNames {
    names: Vec<String>,
}

impl SourceNames {
    pub fn new(spec: impl Into<String>, typesystem: impl Into<String>) -> Self {
        SourceNames {
            names: vec![spec.into(), typesystem.into()],
        }
    }

    pub fn name(&self, file: FileId) -> &str {
        self.names
            .get(file.0 as usize)
            .map(String::as_str)
            .unwrap_or("<input>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_layout() {
        let d = Diagnostic::error(
            Code::IncompatibleTypes,
            Span::new(FileId::SPEC, 4, 17, 4),
            "Incompatible types: String and Int",
        );
        let names = SourceNames::new("arith.gpg", "simple.gts");
        assert_eq!(
            d.render(&names),
            "arith.gpg:4:17: error[E-TYPE-INCOMPAT]: Incompatible types: String and Int"
        );
    }

    #[test]
    fn sorting_is_positional() {
        let mut ds = vec![
            Diagnostic::error(Code::Syntax, Span::new(FileId::SPEC, 3, 1, 1), "b"),
            Diagnostic::error(Code::Syntax, Span::new(FileId::SPEC, 1, 9, 1), "a"),
            Diagnostic::error(Code::Syntax, Span::new(FileId::TYPESYSTEM, 1, 1, 1), "c"),
        ];
        sort_diagnostics(&mut ds);
        let order: Vec<_> = ds.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(order, ["a", "b", "c"]);
    }
}
