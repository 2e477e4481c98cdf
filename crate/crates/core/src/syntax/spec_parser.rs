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

//! Recursive-descent parser for specification files.
//!
//! ```text
//! specification : declarations? (externalSignature | grammarRule translationFunction*)* ;
//! grammarRule   : 'fragment'? NAME ':' alternatives ';' ;
//! signature     : NAME '(' params? ')' '-->' '(' params? ')' ;
//! ```

use crate::diag::{Code, Diagnostic, FileId, Span};
use crate::grammar::{RhsExpr, Rule, Site, Symbol};
use crate::syntax::ast::*;
use crate::syntax::lexer::{tokenize, Tok, TokenCursor};
use crate::types::Extension;

/// Parses a whole specification. Either a complete model or the full list
/// of diagnostics is returned, never both.
pub fn parse_specification(
    text: &str,
    ext: &dyn Extension,
) -> Result<Specification, Vec<Diagnostic>> {
    let tokens = tokenize(text, FileId::SPEC)?;
    let mut p = SpecParser {
        cur: TokenCursor::new(&tokens),
        ext,
        diags: Vec::new(),
        spec: Specification::default(),
    };
    p.specification();
    if p.diags.is_empty() {
        Ok(p.spec)
    } else {
        Err(p.diags)
    }
}

/// Parses a stand-alone declarations text with the given extension's
/// declarations sub-grammar.
pub fn parse_declarations(
    text: &str,
    ext: &dyn Extension,
) -> Result<Declarations, Vec<Diagnostic>> {
    let tokens = tokenize(text, FileId::SPEC)?;
    let mut cur = TokenCursor::new(&tokens);
    let decls = ext.parse_declarations(&mut cur)?;
    if cur.at_eof() {
        Ok(decls)
    } else {
        Err(vec![cur.unexpected("a declaration")])
    }
}

struct SpecParser<'t, 'e> {
    cur: TokenCursor<'t>,
    ext: &'e dyn Extension,
    diags: Vec<Diagnostic>,
    spec: Specification,
}

type PResult<T> = Result<T, Diagnostic>;

impl SpecParser<'_, '_> {
    fn specification(&mut self) {
        match self.ext.parse_declarations(&mut self.cur) {
            Ok(d) => self.spec.declarations = d,
            Err(es) => self.diags.extend(es),
        }

        // Name of the rule translation functions may currently attach to.
        let mut open_rule: Option<usize> = None;
        while !self.cur.at_eof() {
            let start = self.cur.position();
            let result = self.top_item(&mut open_rule);
            if let Err(d) = result {
                self.diags.push(d);
                open_rule = None;
                self.recover_top_level();
            }
            if self.cur.position() == start {
                // Always make progress.
                self.cur.bump();
            }
        }
    }

    fn recover_top_level(&mut self) {
        let mut depth = 0usize;
        loop {
            match &self.cur.peek().tok {
                Tok::Eof => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    self.cur.bump();
                    if depth <= 1 {
                        return;
                    }
                    depth -= 1;
                    continue;
                }
                Tok::Semi if depth == 0 => {
                    self.cur.bump();
                    return;
                }
                _ => {}
            }
            self.cur.bump();
        }
    }

    fn top_item(&mut self, open_rule: &mut Option<usize>) -> PResult<()> {
        let t0 = self.cur.peek();
        match (&t0.tok, &self.cur.peek_at(1).tok) {
            (Tok::Ident(kw), Tok::Ident(_)) if kw == "fragment" => {
                self.cur.bump();
                let rule = self.rule(true, t0.span)?;
                self.spec.grammar.rules.push(rule);
                *open_rule = Some(self.spec.grammar.rules.len() - 1);
                Ok(())
            }
            (Tok::Ident(_), Tok::Colon) => {
                let rule = self.rule(false, t0.span)?;
                self.spec.grammar.rules.push(rule);
                *open_rule = Some(self.spec.grammar.rules.len() - 1);
                Ok(())
            }
            (Tok::Ident(_), Tok::LParen) => {
                let (name, inputs, outputs) = self.signature()?;
                if self.cur.eat(&Tok::Semi) {
                    self.spec.externals.push(ExternalSignature {
                        name,
                        inputs,
                        outputs,
                        origin: Origin::Declared,
                    });
                    *open_rule = None;
                    Ok(())
                } else if self.cur.at(&Tok::LBrace) {
                    let Some(rule_idx) = *open_rule else {
                        let d = Diagnostic::error(
                            Code::Syntax,
                            name.span,
                            format!(
                                "Translation function {} must directly follow a grammar rule",
                                name.name
                            ),
                        );
                        // Parse the body anyway to resynchronize.
                        let _ = self.function_body(None);
                        return Err(d);
                    };
                    let rule = self.spec.grammar.rules[rule_idx].clone();
                    let (locals, actions) = self.function_body(Some(&rule))?;
                    self.spec.functions.push(TranslationFunction {
                        name,
                        for_rule: rule.name.clone(),
                        inputs,
                        outputs,
                        locals,
                        actions,
                    });
                    Ok(())
                } else {
                    Err(self.cur.unexpected("';' or '{'"))
                }
            }
            _ => Err(self
                .cur
                .unexpected("a grammar rule, a translation function or an external signature")),
        }
    }

    fn rule(&mut self, is_fragment: bool, start: Span) -> PResult<Rule> {
        let (name, name_span) = self.cur.expect_ident()?;
        self.cur.expect(&Tok::Colon)?;
        let rhs = self.alternatives()?;
        self.cur.expect(&Tok::Semi)?;
        let span = if is_fragment { start } else { name_span };
        Ok(Rule::new(name, rhs, is_fragment, span))
    }

    fn alternatives(&mut self) -> PResult<RhsExpr> {
        let mut alts = vec![self.sequence()?];
        while self.cur.eat(&Tok::Pipe) {
            alts.push(self.sequence()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            RhsExpr::Alternative(alts)
        })
    }

    fn sequence(&mut self) -> PResult<RhsExpr> {
        let mut items = Vec::new();
        while matches!(
            self.cur.peek().tok,
            Tok::Ident(_) | Tok::Str(_) | Tok::LParen | Tok::Label(_)
        ) {
            items.push(self.item()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            RhsExpr::Sequence(items)
        })
    }

    /// `('$' NAME '=')? atom ('*' | '+' | '?')?` where the label binds to
    /// the atom and the operator applies to the labeled phrase.
    fn item(&mut self) -> PResult<RhsExpr> {
        let mut node = if let Tok::Label(l) = &self.cur.peek().tok {
            let label = l.clone();
            let span = self.cur.bump().span;
            self.cur.expect(&Tok::Eq)?;
            let child = self.atom()?;
            RhsExpr::Labeled {
                label,
                span,
                child: Box::new(child),
            }
        } else {
            self.atom()?
        };
        loop {
            node = match self.cur.peek().tok {
                Tok::Star => RhsExpr::Iteration {
                    child: Box::new(node),
                    min: 0,
                },
                Tok::Plus => RhsExpr::Iteration {
                    child: Box::new(node),
                    min: 1,
                },
                Tok::Question => RhsExpr::Optional(Box::new(node)),
                _ => break,
            };
            self.cur.bump();
        }
        Ok(node)
    }

    fn atom(&mut self) -> PResult<RhsExpr> {
        let t = self.cur.peek();
        match &t.tok {
            Tok::Ident(name) => {
                self.cur.bump();
                Ok(RhsExpr::Symbol(Symbol::rule(name.clone(), t.span)))
            }
            Tok::Str(text) => {
                self.cur.bump();
                if self.cur.eat(&Tok::DotDot) {
                    let (hi, hi_span) = self.cur.expect_string()?;
                    let lo = single_char(text, t.span)?;
                    let hi = single_char(&hi, hi_span)?;
                    Ok(RhsExpr::CharRange {
                        lo,
                        hi,
                        span: t.span,
                    })
                } else {
                    Ok(RhsExpr::Symbol(Symbol::literal(text.clone(), t.span)))
                }
            }
            Tok::LParen => {
                self.cur.bump();
                let inner = self.alternatives()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.cur.unexpected("a symbol, a literal or '('")),
        }
    }

    fn signature(&mut self) -> PResult<(Ident, Vec<AttributeDecl>, Vec<AttributeDecl>)> {
        let (name, span) = self.cur.expect_ident()?;
        let inputs = self.params(Role::Input)?;
        self.cur.expect(&Tok::Arrow)?;
        let outputs = self.params(Role::Output)?;
        Ok((Ident::new(name, span), inputs, outputs))
    }

    fn params(&mut self, role: Role) -> PResult<Vec<AttributeDecl>> {
        self.cur.expect(&Tok::LParen)?;
        let mut out = Vec::new();
        if !self.cur.at(&Tok::RParen) {
            loop {
                let ty = self
                    .ext
                    .parse_type(&mut self.cur, &self.spec.declarations)?;
                let (name, span) = self.cur.expect_ident()?;
                out.push(AttributeDecl {
                    name: Ident::new(name, span),
                    ty: Some(ty),
                    role,
                });
                if !self.cur.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.cur.expect(&Tok::RParen)?;
        Ok(out)
    }

    /// Parses `{ ... }`. Statement-level errors are recorded and skipped so
    /// that later actions are still checked.
    fn function_body(
        &mut self,
        rule: Option<&Rule>,
    ) -> PResult<(Vec<AttributeDecl>, Vec<PositionedAction>)> {
        self.cur.expect(&Tok::LBrace)?;
        let mut locals = Vec::new();
        let mut actions = Vec::new();
        while !self.cur.at(&Tok::RBrace) && !self.cur.at_eof() {
            let start = self.cur.position();
            let r = if self.at_action_start() {
                self.action(rule).map(|a| actions.extend(a))
            } else {
                self.local_decl().map(|d| locals.push(d))
            };
            if let Err(d) = r {
                self.diags.push(d);
                self.cur.recover_statement();
                if self.cur.position() == start {
                    self.cur.bump();
                }
            }
        }
        self.cur.expect(&Tok::RBrace)?;
        Ok((locals, actions))
    }

    fn at_action_start(&self) -> bool {
        let kw = matches!(&self.cur.peek().tok, Tok::Ident(s) if s == "before" || s == "after" || s == "at");
        kw && matches!(
            self.cur.peek_at(1).tok,
            Tok::Ident(_) | Tok::Label(_) | Tok::Str(_)
        ) && self.cur.peek_at(2).tok == Tok::Colon
    }

    fn local_decl(&mut self) -> PResult<AttributeDecl> {
        let ty = self
            .ext
            .parse_type(&mut self.cur, &self.spec.declarations)?;
        let (name, span) = self.cur.expect_ident()?;
        self.cur.expect(&Tok::Semi)?;
        Ok(AttributeDecl {
            name: Ident::new(name, span),
            ty: Some(ty),
            role: Role::Local,
        })
    }

    /// Returns `None` when the site did not resolve; the diagnostic is
    /// recorded and the body still parsed.
    fn action(&mut self, rule: Option<&Rule>) -> PResult<Option<PositionedAction>> {
        let (kw, _) = self.cur.expect_ident()?;
        let position = match kw.as_str() {
            "before" => Position::Before,
            "after" => Position::After,
            _ => Position::At,
        };
        let site_tok = self.cur.bump();
        let site = match &site_tok.tok {
            Tok::Ident(s) => Site::Symbol(s.clone()),
            Tok::Label(l) => Site::Label(l.clone()),
            Tok::Str(t) => Site::Literal(t.clone()),
            _ => unreachable!("checked by at_action_start"),
        };
        let site_span = site_tok.span;
        self.cur.expect(&Tok::Colon)?;

        let occurrences = match rule.map(|r| r.resolve_action_site(&site)) {
            Some(Ok(occ)) => Some(occ),
            Some(Err(e)) => {
                self.diags.push(Diagnostic::error(
                    Code::UnknownSite,
                    site_span,
                    format!("Unknown site {} in rule {}", e.site, e.rule),
                ));
                None
            }
            None => None,
        };
        let body = self.statement()?;
        Ok(occurrences.map(|occurrences| PositionedAction {
            position,
            site,
            site_span,
            occurrences,
            body,
        }))
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let t = self.cur.peek();
        match &t.tok {
            Tok::LBrace => {
                self.cur.bump();
                let mut stmts = Vec::new();
                while !self.cur.at(&Tok::RBrace) && !self.cur.at_eof() {
                    let start = self.cur.position();
                    match self.statement() {
                        Ok(s) => stmts.push(s),
                        Err(d) => {
                            self.diags.push(d);
                            self.cur.recover_statement();
                            if self.cur.position() == start {
                                self.cur.bump();
                            }
                        }
                    }
                }
                self.cur.expect(&Tok::RBrace)?;
                self.cur.eat(&Tok::Semi);
                Ok(Stmt::Block {
                    stmts,
                    span: t.span,
                })
            }
            Tok::LParen => {
                self.cur.bump();
                let mut names = Vec::new();
                loop {
                    let (n, s) = self.cur.expect_ident()?;
                    if names.iter().any(|i: &Ident| i.name == n) {
                        self.diags.push(Diagnostic::error(
                            Code::DuplicateAttribute,
                            s,
                            format!("Attribute {n} appears twice in a tuple"),
                        ));
                    }
                    names.push(Ident::new(n, s));
                    if !self.cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.cur.expect(&Tok::RParen)?;
                self.cur.expect(&Tok::Eq)?;
                let rhs = self.expr()?;
                self.cur.expect(&Tok::Semi)?;
                Ok(Stmt::Assign {
                    lhs: Lhs::Tuple(names),
                    rhs,
                    span: t.span,
                })
            }
            Tok::Ident(name) if self.cur.peek_at(1).tok == Tok::Eq => {
                self.cur.bump();
                self.cur.bump();
                let rhs = self.expr()?;
                self.cur.expect(&Tok::Semi)?;
                Ok(Stmt::Assign {
                    lhs: Lhs::Single(Ident::new(name.clone(), t.span)),
                    rhs,
                    span: t.span,
                })
            }
            Tok::Ident(_) if self.cur.peek_at(1).tok == Tok::LParen => {
                let call = self.expr()?;
                self.cur.expect(&Tok::Semi)?;
                Ok(Stmt::Call { call, span: t.span })
            }
            _ => Err(self.cur.unexpected("a statement")),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let t = self.cur.peek();
        match &t.tok {
            Tok::TokenText(n) => {
                self.cur.bump();
                Ok(Expr::TokenText(Ident::new(n.clone(), t.span)))
            }
            Tok::Ident(n) => {
                self.cur.bump();
                let id = Ident::new(n.clone(), t.span);
                if !self.cur.eat(&Tok::LParen) {
                    return Ok(Expr::Attr(id));
                }
                let mut args = Vec::new();
                if !self.cur.at(&Tok::RParen) {
                    loop {
                        if self.cur.at(&Tok::LParen) {
                            return Err(Diagnostic::error(
                                Code::Syntax,
                                self.cur.peek().span,
                                "A call argument can not be a tuple",
                            ));
                        }
                        args.push(self.expr()?);
                        if !self.cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.cur.expect(&Tok::RParen)?;
                Ok(Expr::Call { func: id, args })
            }
            _ => Err(self.cur.unexpected("an expression")),
        }
    }
}

fn single_char(text: &str, span: Span) -> PResult<char> {
    let mut cs = text.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Diagnostic::error(
            Code::BadRange,
            span,
            "Character range bounds must be single characters",
        )),
    }
}
