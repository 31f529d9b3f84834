// Copyright 2026 The sconn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCONN_EXEC_TASK_CODE_EVAL_H_
#define SCONN_EXEC_TASK_CODE_EVAL_H_

#include "sconn/core/types.h"

namespace sconn {

// Output of one task step: {"metrics": {...}, ...}. Evaluation errors (a
// missing input, division by zero) throw Error(kInvalidArgument) and surface
// as task-code failures.
//
// Contraction at iteration i yields x0 * factor^i; arithmetic evaluates
// lhs op rhs with "$iteration" bound to i; external commands render their
// template with {name} placeholders substituted from the inputs.
Json EvaluateTaskCode(const TaskCodeRef& code, const ScalarMap& inputs, int iteration);

}  // namespace sconn

#endif  // SCONN_EXEC_TASK_CODE_EVAL_H_
