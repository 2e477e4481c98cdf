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

//! Ground types, their subtyping relation and the tuple/function types built
//! on top of them.

mod desc;
mod extension;

use std::collections::HashMap;
use std::fmt;

pub use desc::{close_subtyping, realize_type, BackendProfile, LanguageDesc, TypeSystemDesc};
pub use extension::{
    parse_standard_declarations, DeclarativeExtension, Extension, ExtensionRegistry,
    ImportsExtension,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(pub u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The contract every ground type system must fulfil: a subtyping oracle
/// plus the predefined types and the distinguished string and top types.
///
/// `is_subtype` must be reflexive, transitive and pure.
pub trait GroundTypeSystem: Send + Sync {
    fn is_subtype(&self, ty: TypeId, supertype: TypeId) -> bool;
    fn predefined_types(&self) -> Vec<TypeId>;
    fn top_type(&self) -> Option<TypeId>;
    fn string_type(&self) -> TypeId;
    fn type_name(&self, ty: TypeId) -> &str;
    fn lookup(&self, name: &str) -> Option<TypeId>;
}

/// Two distinct types that ended up below each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtypingCycle {
    pub first: String,
    pub second: String,
}

/// A ground type system over a finite, enumerable set of named types with
/// an explicitly closed subtyping matrix.
#[derive(Clone, Debug)]
pub struct FiniteTypeSystem {
    name: String,
    names: Vec<String>,
    index: HashMap<String, TypeId>,
    leq: Vec<Vec<bool>>,
    string: TypeId,
    top: Option<TypeId>,
}

impl FiniteTypeSystem {
    /// Builds the reflexive-transitive closure of `pairs` (each `(sub, super)`).
    /// Every type is additionally below `top` when one is given.
    pub fn new(
        name: impl Into<String>,
        names: Vec<String>,
        pairs: &[(TypeId, TypeId)],
        string: TypeId,
        top: Option<TypeId>,
    ) -> Result<Self, Vec<SubtypingCycle>> {
        let n = names.len();
        assert!(string.index() < n, "string type out of range");
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
            if let Some(t) = top {
                row[t.index()] = true;
            }
        }
        for &(a, b) in pairs {
            leq[a.index()][b.index()] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    let via = leq[k].clone();
                    for (cell, &kj) in leq[i].iter_mut().zip(&via) {
                        *cell |= kj;
                    }
                }
            }
        }
        let mut cycles = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    cycles.push(SubtypingCycle {
                        first: names[i].clone(),
                        second: names[j].clone(),
                    });
                }
            }
        }
        if !cycles.is_empty() {
            return Err(cycles);
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), TypeId(i as u32)))
            .collect();
        Ok(FiniteTypeSystem {
            name: name.into(),
            names,
            index,
            leq,
            string,
            top,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl GroundTypeSystem for FiniteTypeSystem {
    fn is_subtype(&self, ty: TypeId, supertype: TypeId) -> bool {
        self.leq[ty.index()][supertype.index()]
    }

    fn predefined_types(&self) -> Vec<TypeId> {
        (0..self.names.len() as u32).map(TypeId).collect()
    }

    fn top_type(&self) -> Option<TypeId> {
        self.top
    }

    fn string_type(&self) -> TypeId {
        self.string
    }

    fn type_name(&self, ty: TypeId) -> &str {
        &self.names[ty.index()]
    }

    fn lookup(&self, name: &str) -> Option<TypeId> {
        self.index.get(name).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleType {
    pub components: Vec<TypeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionType {
    pub domain: TupleType,
    pub codomain: TupleType,
}

/// Types an attribute or a tuple of attributes can have.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueType {
    Ground(TypeId),
    Tuple(TupleType),
}

impl ValueType {
    pub fn tuple(components: impl IntoIterator<Item = TypeId>) -> Self {
        ValueType::Tuple(TupleType {
            components: components.into_iter().collect(),
        })
    }
}

/// Ground subtyping lifted componentwise to tuples of equal arity.
pub fn extended_subtype(sys: &dyn GroundTypeSystem, a: &ValueType, b: &ValueType) -> bool {
    match (a, b) {
        (ValueType::Ground(x), ValueType::Ground(y)) => sys.is_subtype(*x, *y),
        (ValueType::Tuple(xs), ValueType::Tuple(ys)) => {
            xs.components.len() == ys.components.len()
                && xs
                    .components
                    .iter()
                    .zip(&ys.components)
                    .all(|(x, y)| sys.is_subtype(*x, *y))
        }
        _ => false,
    }
}

/// Formats a type for messages: ground types by name, tuples parenthesized.
pub struct DisplayType<'a>(pub &'a dyn GroundTypeSystem, pub &'a ValueType);

impl fmt::Display for DisplayType<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.1 {
            ValueType::Ground(t) => f.write_str(self.0.type_name(*t)),
            ValueType::Tuple(ts) => {
                f.write_str("(")?;
                for (i, t) in ts.components.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(self.0.type_name(*t))?;
                }
                f.write_str(")")
            }
        }
    }
}
