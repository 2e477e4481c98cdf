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

//! Direct execution of a validated specification: recursive descent over
//! the grammar with one token of lookahead, running actions in place.

use std::collections::HashMap;

use thiserror::Error;

use super::lexer::{Pos, Scanner, Terminal, Token};
use super::ll1::{build_table, Decision, Ll1Error, Ll1Table};
use super::value::{ExternalFunctionTable, HostError, RuntimeValue};
use crate::check::{AtBinding, FunctionTypes};
use crate::driver::ValidatedSpec;
use crate::flow::Placement;
use crate::grammar::{RhsExpr, Rule, SymbolKind};
use crate::syntax::ast::{Expr, Lhs, Stmt, TranslationFunction};

#[derive(Clone, Debug, Error)]
pub enum RuntimeError {
    #[error("lexical error at {0}: no token matches")]
    Lex(Pos),
    #[error("parse error at {pos}: found {found}, expected {expected}")]
    Parse {
        pos: Pos,
        found: String,
        expected: String,
    },
    #[error("grammar is not LL(1): {0}")]
    NotLl1(#[from] Ll1Error),
    #[error("external function {name} failed: {error}")]
    Host { name: String, error: HostError },
    #[error("no binding for external function {0}")]
    MissingBinding(String),
    #[error("value of type {found} stored into {attribute} of type {expected}")]
    TagMismatch {
        attribute: String,
        found: String,
        expected: String,
    },
    #[error("{0}")]
    Usage(String),
}

/// An interpreter for one start rule. The lookahead table is computed up
/// front, so grammars that are not LL(1) fail before any input is read.
pub struct Interpreter<'v> {
    v: &'v ValidatedSpec,
    start: &'v Rule,
    table: Ll1Table,
    placements: HashMap<&'v str, Placement>,
    check_tags: bool,
}

impl<'v> Interpreter<'v> {
    pub fn new(v: &'v ValidatedSpec, start_rule: &str) -> Result<Self, RuntimeError> {
        let table = build_table(&v.spec.grammar, start_rule)?;
        let start = v
            .spec
            .grammar
            .rule(start_rule)
            .expect("checked by the table");
        let placements = v
            .spec
            .functions
            .iter()
            .filter_map(|f| {
                let rule = v.spec.grammar.rule(&f.for_rule)?;
                Some((f.name.name.as_str(), Placement::of(rule, f)))
            })
            .collect();
        Ok(Interpreter {
            v,
            start,
            table,
            placements,
            check_tags: cfg!(debug_assertions),
        })
    }

    /// Verify on every store that the value's tag is a subtype of the
    /// attribute's static type. On by default in debug builds.
    pub fn with_tag_checks(mut self, on: bool) -> Self {
        self.check_tags = on;
        self
    }

    /// Parses `text` from the start rule and returns the outputs of
    /// `function`, by default the rule's start function. A rule without
    /// translation functions is only recognized and yields no values.
    pub fn run(
        &self,
        function: Option<&str>,
        inputs: Vec<RuntimeValue>,
        text: &str,
        externals: &ExternalFunctionTable,
    ) -> Result<Vec<RuntimeValue>, RuntimeError> {
        for sig in &self.v.spec.externals {
            if externals.get(&sig.name.name).is_none() {
                return Err(RuntimeError::MissingBinding(sig.name.name.clone()));
            }
        }
        let f = match function {
            Some(name) => {
                let f = self.v.spec.function(name).ok_or_else(|| {
                    RuntimeError::Usage(format!("no translation function {name}"))
                })?;
                if f.for_rule != self.start.name {
                    return Err(RuntimeError::Usage(format!(
                        "{name} translates {}, not {}",
                        f.for_rule, self.start.name
                    )));
                }
                Some(f)
            }
            None => self.v.spec.start_function(&self.start.name),
        };
        let expected = f.map_or(0, |f| f.inputs.len());
        if inputs.len() != expected {
            return Err(RuntimeError::Usage(format!(
                "{} expects {expected} input value(s), got {}",
                f.map_or(self.start.name.as_str(), |f| f.name.name.as_str()),
                inputs.len()
            )));
        }

        let tokens = Scanner::new(&self.v.spec.grammar)
            .scan(text)
            .map_err(RuntimeError::Lex)?;
        let mut run = Run {
            it: self,
            tokens,
            i: 0,
            externals,
        };
        let out = run.rule(self.start, f, inputs)?;
        run.expect(&Terminal::Eof)?;
        Ok(out)
    }
}

/// Convenience wrapper: builds an [`Interpreter`] and runs it once.
pub fn interpret(
    v: &ValidatedSpec,
    start_rule: &str,
    start_function: Option<&str>,
    inputs: Vec<RuntimeValue>,
    text: &str,
    externals: &ExternalFunctionTable,
) -> Result<Vec<RuntimeValue>, RuntimeError> {
    Interpreter::new(v, start_rule)?.run(start_function, inputs, text, externals)
}

struct Frame<'v> {
    f: &'v TranslationFunction,
    types: &'v FunctionTypes,
    place: &'v Placement,
    attrs: HashMap<String, RuntimeValue>,
    /// Text of the most recent match of each token.
    texts: HashMap<String, String>,
}

struct Run<'v> {
    it: &'v Interpreter<'v>,
    tokens: Vec<Token>,
    i: usize,
    externals: &'v ExternalFunctionTable,
}

impl<'v> Run<'v> {
    fn peek(&self) -> &Token {
        &self.tokens[self.i]
    }

    fn expect(&mut self, t: &Terminal) -> Result<String, RuntimeError> {
        let tok = self.peek();
        if &tok.kind != t {
            return Err(self.error(t.to_string()));
        }
        let text = tok.text.clone();
        if tok.kind != Terminal::Eof {
            self.i += 1;
        }
        Ok(text)
    }

    fn error(&self, expected: String) -> RuntimeError {
        let tok = self.peek();
        let found = match &tok.kind {
            Terminal::Eof => "end of input".to_string(),
            _ => format!("'{}'", tok.text),
        };
        RuntimeError::Parse {
            pos: tok.pos,
            found,
            expected,
        }
    }

    fn rule(
        &mut self,
        rule: &'v Rule,
        f: Option<&'v TranslationFunction>,
        inputs: Vec<RuntimeValue>,
    ) -> Result<Vec<RuntimeValue>, RuntimeError> {
        let Some(f) = f else {
            self.walk(rule, &rule.rhs, &mut Vec::new(), &mut None)?;
            return Ok(Vec::new());
        };
        let types = self
            .it
            .v
            .function_types(&f.name.name)
            .expect("validated functions have types");
        let mut frame = Some(Frame {
            f,
            types,
            place: &self.it.placements[f.name.name.as_str()],
            attrs: HashMap::new(),
            texts: HashMap::new(),
        });
        for (decl, value) in f.inputs.iter().zip(inputs) {
            self.store(frame.as_mut().expect("set above"), &decl.name.name, value)?;
        }
        self.walk(rule, &rule.rhs, &mut Vec::new(), &mut frame)?;
        let frame = frame.expect("set above");
        f.outputs
            .iter()
            .map(|o| {
                frame.attrs.get(&o.name.name).cloned().ok_or_else(|| {
                    RuntimeError::Usage(format!("output {} was never assigned", o.name.name))
                })
            })
            .collect()
    }

    fn walk(
        &mut self,
        rule: &'v Rule,
        e: &'v RhsExpr,
        path: &mut Vec<usize>,
        frame: &mut Option<Frame<'v>>,
    ) -> Result<(), RuntimeError> {
        self.actions(frame, |p| p.before_at(path))?;
        match e {
            RhsExpr::Sequence(items) => {
                for (i, item) in items.iter().enumerate() {
                    path.push(i);
                    self.walk(rule, item, path, frame)?;
                    path.pop();
                }
            }
            RhsExpr::Alternative(alts) => {
                let Some(Decision::Alternatives(las)) = self.decision(rule, path) else {
                    unreachable!("every alternative has a decision")
                };
                let cur = &self.peek().kind;
                let Some(i) = las.iter().position(|s| s.contains(cur)) else {
                    let mut all: Vec<_> = las.iter().flatten().map(ToString::to_string).collect();
                    all.sort();
                    all.dedup();
                    return Err(self.error(all.join(", ")));
                };
                path.push(i);
                self.walk(rule, &alts[i], path, frame)?;
                path.pop();
            }
            RhsExpr::Optional(child) | RhsExpr::Iteration { child, .. } => {
                let Some(Decision::Enter(enter)) = self.decision(rule, path) else {
                    unreachable!("every optional part and loop has a decision")
                };
                let mut passes = 0;
                path.push(0);
                loop {
                    let must = matches!(e, RhsExpr::Iteration { min: 1, .. }) && passes == 0;
                    let enter_now = enter.contains(&self.peek().kind);
                    if !must && (!enter_now || (matches!(e, RhsExpr::Optional(_)) && passes == 1)) {
                        break;
                    }
                    self.walk(rule, child, path, frame)?;
                    passes += 1;
                }
                path.pop();
            }
            RhsExpr::Labeled { child, .. } => {
                path.push(0);
                self.walk(rule, child, path, frame)?;
                path.pop();
            }
            RhsExpr::Symbol(s) => match s.kind {
                SymbolKind::Literal => {
                    self.expect(&Terminal::Literal(s.name.clone()))?;
                }
                SymbolKind::TokenRule => {
                    let text = self.expect(&Terminal::Token(s.name.clone()))?;
                    if let Some(fr) = frame {
                        fr.texts.insert(s.name.clone(), text);
                    }
                }
                SymbolKind::SyntacticRule => self.call(s.name.as_str(), path, frame)?,
            },
            RhsExpr::CharRange { .. } => unreachable!("ranges only occur in token rules"),
        }
        self.actions(frame, |p| p.after_at(path))
    }

    fn decision(&self, rule: &Rule, path: &[usize]) -> Option<&'v Decision> {
        let it = self.it;
        it.table.decisions.get(&(rule.name.clone(), path.to_vec()))
    }

    fn call(
        &mut self,
        callee: &str,
        path: &[usize],
        frame: &mut Option<Frame<'v>>,
    ) -> Result<(), RuntimeError> {
        let spec = &self.it.v.spec;
        let rule = spec.grammar.rule(callee).expect("validated grammar");
        let binding = frame
            .as_ref()
            .and_then(|fr| fr.types.at_bindings.get(path))
            .cloned()
            .unwrap_or(AtBinding::Plain);
        match binding {
            AtBinding::Plain => {
                self.rule(rule, None, Vec::new())?;
            }
            AtBinding::Implicit(name) => {
                self.rule(rule, spec.function(&name), Vec::new())?;
            }
            AtBinding::Action(index) => {
                let fr = frame.as_ref().expect("bindings come from a frame");
                let f: &'v TranslationFunction = fr.f;
                let body = &f.actions[index].body;
                let (lhs, func, args) = body.as_translation_call().expect("checked at action");
                let args = args
                    .iter()
                    .map(|a| self.eval(fr, a))
                    .collect::<Result<Vec<_>, _>>()?;
                let target = spec.function(&func.name).expect("checked target");
                let results = self.rule(rule, Some(target), args)?;
                if let Some(lhs) = lhs {
                    self.assign(frame.as_mut().expect("present"), lhs, results)?;
                }
            }
        }
        Ok(())
    }

    fn actions(
        &mut self,
        frame: &mut Option<Frame<'v>>,
        which: impl Fn(&'v Placement) -> &'v [usize],
    ) -> Result<(), RuntimeError> {
        let Some(fr) = frame else {
            return Ok(());
        };
        let f: &'v TranslationFunction = fr.f;
        for &i in which(fr.place) {
            let body = &f.actions[i].body;
            self.exec(fr, body)?;
        }
        Ok(())
    }

    fn exec(&mut self, fr: &mut Frame<'v>, s: &Stmt) -> Result<(), RuntimeError> {
        match s {
            Stmt::Block { stmts, .. } => stmts.iter().try_for_each(|s| self.exec(fr, s)),
            Stmt::Call { call, .. } => match call {
                Expr::Call { func, args } => {
                    self.call_external(fr, &func.name, args)?;
                    Ok(())
                }
                other => self.eval(fr, other).map(drop),
            },
            Stmt::Assign { lhs, rhs, .. } => {
                let values = match rhs {
                    Expr::Call { func, args } => self.call_external(fr, &func.name, args)?,
                    e => vec![self.eval(fr, e)?],
                };
                self.assign(fr, lhs, values)
            }
        }
    }

    fn assign(
        &self,
        fr: &mut Frame<'v>,
        lhs: &Lhs,
        values: Vec<RuntimeValue>,
    ) -> Result<(), RuntimeError> {
        for (name, v) in lhs.names().iter().zip(values) {
            self.store(fr, &name.name, v)?;
        }
        Ok(())
    }

    fn store(&self, fr: &mut Frame<'v>, name: &str, v: RuntimeValue) -> Result<(), RuntimeError> {
        if self.it.check_tags {
            let sys = self.it.v.ext.types();
            if let Some(expected) = fr.types.type_of(name) {
                if !sys.is_subtype(v.tag, expected) {
                    return Err(RuntimeError::TagMismatch {
                        attribute: name.to_string(),
                        found: sys.type_name(v.tag).to_string(),
                        expected: sys.type_name(expected).to_string(),
                    });
                }
            }
        }
        fr.attrs.insert(name.to_string(), v);
        Ok(())
    }

    fn eval(&self, fr: &Frame<'v>, e: &Expr) -> Result<RuntimeValue, RuntimeError> {
        match e {
            Expr::Attr(i) => fr.attrs.get(&i.name).cloned().ok_or_else(|| {
                RuntimeError::Usage(format!("attribute {} read before assignment", i.name))
            }),
            Expr::TokenText(i) => {
                let text = fr.texts.get(&i.name).cloned().ok_or_else(|| {
                    RuntimeError::Usage(format!("token {} has not been matched", i.name))
                })?;
                Ok(RuntimeValue::string(
                    self.it.v.ext.types().string_type(),
                    text,
                ))
            }
            Expr::Call { func, args } => {
                let mut out = self.call_external(fr, &func.name, args)?;
                if out.len() != 1 {
                    return Err(RuntimeError::Host {
                        name: func.name.clone(),
                        error: HostError(format!("returned {} values, expected 1", out.len())),
                    });
                }
                Ok(out.remove(0))
            }
        }
    }

    fn call_external(
        &self,
        fr: &Frame<'v>,
        name: &str,
        args: &[Expr],
    ) -> Result<Vec<RuntimeValue>, RuntimeError> {
        let args = args
            .iter()
            .map(|a| self.eval(fr, a))
            .collect::<Result<Vec<_>, _>>()?;
        let binding = self
            .externals
            .get(name)
            .ok_or_else(|| RuntimeError::MissingBinding(name.to_string()))?;
        let out = binding(&args).map_err(|error| RuntimeError::Host {
            name: name.to_string(),
            error,
        })?;
        let expected = self
            .it
            .v
            .spec
            .externals
            .iter()
            .find(|e| e.name.name == name)
            .map(|e| e.outputs.len());
        if let Some(n) = expected {
            if out.len() != n {
                return Err(RuntimeError::Host {
                    name: name.to_string(),
                    error: HostError(format!("returned {} values, expected {n}", out.len())),
                });
            }
        }
        Ok(out)
    }
}
