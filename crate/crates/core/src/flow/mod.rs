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

//! Control-flow graphs and definite-assignment analysis.

mod analysis;
mod cfg;
mod dot;

pub use analysis::{check_definite_assignment, definitely_assigned, transfer_out, Fact};
pub use cfg::{
    build_cfg, statement_accesses, Access, AccessKind, Cfg, CfgEdge, CfgNode, NodeKind, Placement,
};
pub use dot::to_dot;

#[cfg(test)]
mod tests;
