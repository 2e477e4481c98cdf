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

//! Fixtures and host bindings shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use tpg_core::backend::{ExternalFunctionTable, HostError, RuntimeValue};
use tpg_core::driver::{analyze, load_environment, Environment, ValidatedSpec};

pub const ARITH: &str = include_str!("../fixtures/arith.gpg");
pub const ARITH_UNINIT: &str = include_str!("../fixtures/arith_uninit.gpg");
pub const ARITH_STRING: &str = include_str!("../fixtures/arith_string.gpg");
pub const SIMPLE_GTS: &str = include_str!("../fixtures/simple.gts");
pub const GOLDEN_GRAMMAR: &str = include_str!("../fixtures/golden/ExpressionEvaluator.g");
pub const GOLDEN_EXTERNALS: &str =
    include_str!("../fixtures/golden/ExpressionEvaluatorExternals.java");

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn java_env() -> Environment {
    load_environment("declarative", Some(SIMPLE_GTS), Some("ANTLRJavaBackend")).unwrap()
}

pub fn validated(text: &str) -> ValidatedSpec {
    analyze(text, java_env().ext).unwrap_or_else(|d| panic!("{d:?}"))
}

/// Arithmetic over `i64`; the environment is a host map of variables.
pub fn arithmetic_bindings(v: &ValidatedSpec) -> ExternalFunctionTable {
    let int = v.ext.types().lookup("Int").unwrap();
    let num = |x: &RuntimeValue| x.as_int().ok_or_else(|| HostError("not an integer".into()));
    let mut t = ExternalFunctionTable::new();
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
        Ok(vec![RuntimeValue::int(int, -num(&a[0])?)])
    });
    t.bind("add", move |a| {
        Ok(vec![RuntimeValue::int(int, num(&a[0])? + num(&a[1])?)])
    });
    t.bind("mul", move |a| {
        Ok(vec![RuntimeValue::int(int, num(&a[0])? * num(&a[1])?)])
    });
    t
}

pub fn environment(v: &ValidatedSpec, pairs: &[(&str, i64)]) -> RuntimeValue {
    let env: HashMap<String, i64> = pairs.iter().map(|(k, x)| (k.to_string(), *x)).collect();
    RuntimeValue::host(v.ext.types().lookup("Environment").unwrap(), env)
}
