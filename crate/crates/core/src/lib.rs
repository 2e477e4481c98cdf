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

//! A statically checked parser-generator front-end.
//!
//! Specifications pair grammar rules with translation functions whose
//! actions are type checked against a pluggable ground type system, have
//! omitted local types inferred, and are verified for definite assignment
//! before any back-end runs.

pub mod backend;
pub mod check;
pub mod diag;
pub mod driver;
pub mod flow;
pub mod grammar;
pub mod syntax;
pub mod types;

#[cfg(test)]
mod testutil;
