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

//! Graphviz rendering of control-flow graphs.

use std::fmt::Write;

use super::cfg::{AccessKind, Cfg, NodeKind};
use crate::syntax::ast::TranslationFunction;

/// Renders `cfg` as a DOT digraph. Edges are labeled with their accesses
/// as `name[r]`, `name[w]` and `NAME#[t]`.
pub fn to_dot(cfg: &Cfg, f: &TranslationFunction) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", f.name.name);
    out.push_str("    node [shape=box, fontname=\"monospace\"];\n");
    for n in &cfg.nodes {
        let label = match &n.kind {
            NodeKind::Entry => "entry".to_string(),
            NodeKind::Exit => "exit".to_string(),
            NodeKind::Match { name, path, .. } => format!("match {} @{:?}", name, path),
            NodeKind::Action { index, position } => {
                let a = &f.actions[*index];
                format!("{} {} #{}", position.keyword(), a.site, index)
            }
            NodeKind::Branch => "branch".to_string(),
            NodeKind::Join => "join".to_string(),
            NodeKind::LoopHead => "loop".to_string(),
        };
        let _ = writeln!(out, "    n{} [label=\"{}\"];", n.id, escape(&label));
    }
    for e in &cfg.edges {
        let label = e
            .accesses
            .iter()
            .map(|a| match a.kind {
                AccessKind::Read => format!("{}[r]", a.name),
                AccessKind::Write => format!("{}[w]", a.name),
                AccessKind::TokenText => format!("{}#[t]", a.name),
            })
            .collect::<Vec<_>>()
            .join(" ");
        if label.is_empty() {
            let _ = writeln!(out, "    n{} -> n{};", e.from, e.to);
        } else {
            let _ = writeln!(
                out,
                "    n{} -> n{} [label=\"{}\"];",
                e.from,
                e.to,
                escape(&label)
            );
        }
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
