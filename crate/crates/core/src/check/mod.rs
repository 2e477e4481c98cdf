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

//! Type checking and local type inference.

mod checker;
mod context;
pub mod solver;

pub use checker::{
    check_specification, check_translation_function, nonterminal_at, AtBinding, AttributeInfo,
    CheckOutput, FunctionTypes, InferredSig,
};
pub use context::{FunctionKind, Signature, Slot, TypeContext};
