// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use thiserror::Error;

use crate::types::Edge;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("stream violation at arrival {index}: {reason}")]
    StreamViolation { index: usize, reason: String },
    #[error("could not generate instance: {0}")]
    GenerationFailure(String),
    #[error("bias-tree layer 0 pool could not be filled after {attempts} attempts")]
    PoolExhaustion { attempts: u64 },
    #[error("diagnostics need a retained trace (edge {0})")]
    TraceMissing(Edge),
    #[error("enumeration exceeded its budget of {budget} branches")]
    BudgetExceeded { budget: u64 },
    #[error("malformed instance file, line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
