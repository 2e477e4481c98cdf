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

//! Fixtures shared by unit tests.

use crate::syntax::parse_type_system_file;
use crate::types::{close_subtyping, DeclarativeExtension, Extension};

pub const ARITH: &str = include_str!("../tests/fixtures/arith.gpg");
pub const ARITH_UNINIT: &str = include_str!("../tests/fixtures/arith_uninit.gpg");
pub const ARITH_STRING: &str = include_str!("../tests/fixtures/arith_string.gpg");
pub const SIMPLE_GTS: &str = include_str!("../tests/fixtures/simple.gts");

pub fn simple_ext() -> DeclarativeExtension {
    let file = parse_type_system_file(SIMPLE_GTS).unwrap();
    let sys = close_subtyping(&file.typesystems[0]).unwrap();
    DeclarativeExtension::new(sys, Some(file.languages[0].clone()))
}

pub fn validated(text: &str) -> crate::driver::ValidatedSpec {
    let ext: std::sync::Arc<dyn Extension> = std::sync::Arc::new(simple_ext());
    crate::driver::analyze(text, ext).unwrap_or_else(|d| panic!("{d:?}"))
}

/// Arithmetic externals over `i64`, with the environment as a host map.
pub fn demo_bindings(v: &crate::driver::ValidatedSpec) -> crate::backend::ExternalFunctionTable {
    use crate::backend::{HostError, RuntimeValue};
    use std::collections::HashMap;

    let int = v.ext.types().lookup("Int").expect("Int type");
    let mut t = crate::backend::ExternalFunctionTable::new();
    let int_of = |v: &RuntimeValue| v.as_int().ok_or_else(|| HostError("not an integer".into()));
    t.bind("strToInt", move |a| {
        let s = a[0].as_str().unwrap_or_default();
        s.parse()
            .map(|i| vec![RuntimeValue::int(int, i)])
            .map_err(|e| HostError(format!("{s}: {e}")))
    });
    t.bind("value", move |a| {
        let env = a[0]
            .downcast::<HashMap<String, i64>>()
            .ok_or_else(|| HostError("bad environment".into()))?;
        let name = a[1].as_str().unwrap_or_default();
        env.get(name)
            .map(|i| vec![RuntimeValue::int(int, *i)])
            .ok_or_else(|| HostError(format!("unbound variable {name}")))
    });
    t.bind("zero", move |_| Ok(vec![RuntimeValue::int(int, 0)]));
    t.bind("one", move |_| Ok(vec![RuntimeValue::int(int, 1)]));
    t.bind("neg", move |a| {
        Ok(vec![RuntimeValue::int(int, -int_of(&a[0])?)])
    });
    t.bind("add", move |a| {
        Ok(vec![RuntimeValue::int(
            int,
            int_of(&a[0])? + int_of(&a[1])?,
        )])
    });
    t.bind("mul", move |a| {
        Ok(vec![RuntimeValue::int(
            int,
            int_of(&a[0])? * int_of(&a[1])?,
        )])
    });
    t
}

pub fn environment(
    v: &crate::driver::ValidatedSpec,
    pairs: &[(&str, i64)],
) -> crate::backend::RuntimeValue {
    let env: std::collections::HashMap<String, i64> =
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    crate::backend::RuntimeValue::host(v.ext.types().lookup("Environment").unwrap(), env)
}
