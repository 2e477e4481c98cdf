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

//! Runtime values and the table of host callbacks for external functions.

use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::types::TypeId;

#[derive(Clone)]
pub enum Payload {
    Str(String),
    Int(i64),
    /// Anything the host passes through untouched, such as an environment.
    Host(Arc<dyn Any + Send + Sync>),
}

impl fmt::Debug for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Str(s) => write!(f, "Str({s:?})"),
            Payload::Int(i) => write!(f, "Int({i})"),
            Payload::Host(_) => f.write_str("Host(..)"),
        }
    }
}

/// A value tagged with the ground type it was created at.
#[derive(Clone, Debug)]
pub struct RuntimeValue {
    pub tag: TypeId,
    pub payload: Payload,
}

impl RuntimeValue {
    pub fn string(tag: TypeId, s: impl Into<String>) -> Self {
        RuntimeValue {
            tag,
            payload: Payload::Str(s.into()),
        }
    }

    pub fn int(tag: TypeId, i: i64) -> Self {
        RuntimeValue {
            tag,
            payload: Payload::Int(i),
        }
    }

    pub fn host<T: Any + Send + Sync>(tag: TypeId, value: T) -> Self {
        RuntimeValue {
            tag,
            payload: Payload::Host(Arc::new(value)),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match &self.payload {
            Payload::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.payload {
            Payload::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn downcast<T: Any>(&self) -> Option<&T> {
        match &self.payload {
            Payload::Host(h) => h.downcast_ref(),
            _ => None,
        }
    }
}

impl fmt::Display for RuntimeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Str(s) => f.write_str(s),
            Payload::Int(i) => write!(f, "{i}"),
            Payload::Host(_) => f.write_str("<host value>"),
        }
    }
}

/// Failure reported by a host callback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostError(pub String);

impl fmt::Display for HostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for HostError {}

pub type Binding =
    Arc<dyn Fn(&[RuntimeValue]) -> Result<Vec<RuntimeValue>, HostError> + Send + Sync>;

/// Host implementations of external functions, by name.
#[derive(Clone, Default)]
pub struct ExternalFunctionTable {
    pub bindings: HashMap<String, Binding>,
}

impl ExternalFunctionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(
        &mut self,
        name: impl Into<String>,
        f: impl Fn(&[RuntimeValue]) -> Result<Vec<RuntimeValue>, HostError> + Send + Sync + 'static,
    ) -> &mut Self {
        self.bindings.insert(name.into(), Arc::new(f));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }
}

impl fmt::Debug for ExternalFunctionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.bindings.keys().collect();
        names.sort();
        f.debug_struct("ExternalFunctionTable")
            .field("bindings", &names)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accessors() {
        let t = TypeId(0);
        assert_eq!(RuntimeValue::int(t, 3).as_int(), Some(3));
        assert_eq!(RuntimeValue::string(t, "a").as_str(), Some("a"));
        assert_eq!(RuntimeValue::host(t, 5u8).downcast::<u8>(), Some(&5));
        assert_eq!(RuntimeValue::int(t, 3).as_str(), None);
        assert_eq!(RuntimeValue::int(t, -2).to_string(), "-2");
    }

    #[test]
    fn table_binding() {
        let mut table = ExternalFunctionTable::new();
        table.bind("one", |_| Ok(vec![RuntimeValue::int(TypeId(0), 1)]));
        let r = (table.get("one").unwrap())(&[]).unwrap();
        assert_eq!(r[0].as_int(), Some(1));
        assert!(table.get("two").is_none());
    }
}
