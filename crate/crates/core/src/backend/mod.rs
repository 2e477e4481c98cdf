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

//! Back-ends: ANTLR grammar emission, the externals interface and a direct
//! interpreter for validated specifications.

pub mod antlr;
pub mod interpreter;
pub mod lexer;
pub mod ll1;
pub mod names;
pub mod value;

pub use antlr::{emit, emit_antlr_grammar, emit_external_interface, plan_for, EmitError, Emitted};
pub use interpreter::{interpret, Interpreter, RuntimeError};
pub use names::{fresh_name, EmissionPlan, NameKind};
pub use value::{ExternalFunctionTable, HostError, Payload, RuntimeValue};
