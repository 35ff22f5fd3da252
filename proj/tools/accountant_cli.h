// Copyright 2026 The dp_accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef DP_ACCOUNTING_TOOLS_ACCOUNTANT_CLI_H_
#define DP_ACCOUNTING_TOOLS_ACCOUNTANT_CLI_H_

#include <ostream>

#include "absl/status/status.h"

namespace dp_accounting::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitInvalidRequest = 2;
inline constexpr int kExitNumericalFailure = 3;

// Runs `dp_accountant` with the given arguments (argv[0] is the program
// name). Results go to `out` unless --out names a file; diagnostics go to
// `err`. Returns the process exit code.
// Invalid requests map to kExitInvalidRequest, every other failure (a
// violated convexity gate, an exhausted support limit) to
// kExitNumericalFailure.
int ExitCodeFor(const absl::Status& status);

int RunAccountantCli(int argc, const char* const* argv, std::ostream& out,
                     std::ostream& err);

}  // namespace dp_accounting::cli

#endif  // DP_ACCOUNTING_TOOLS_ACCOUNTANT_CLI_H_
