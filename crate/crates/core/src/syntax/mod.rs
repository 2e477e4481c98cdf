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

//! Surface syntax: lexer, specification parser, description-file parser and
//! the canonical printer.

pub mod ast;
pub mod gts;
pub mod lexer;
pub mod printer;
mod spec_parser;

pub use gts::{parse_type_system_file, TypeSystemFile};
pub use printer::print_specification;
pub use spec_parser::{parse_declarations, parse_specification};
