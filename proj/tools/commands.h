// Copyright 2026 The Robsub Authors.
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

#ifndef ROBSUB_TOOLS_COMMANDS_H_
#define ROBSUB_TOOLS_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace robsub::tools {

// Environment variable that replaces the default seed (0) when --seed is not
// given.
inline constexpr const char* kSeedEnvVar = "ROBSUB_SEED";

// Runs one `robsub` invocation. `args` excludes the program name, e.g.
// {"subsample", "--input", "data.csv", "--n", "100"}. Returns the process exit
// status: 0 on success, ExitStatus(code) for a robsub::Error, 1 otherwise.
// Errors are reported on `err` as "error: <CodeName>: <message>".
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace robsub::tools

#endif  // ROBSUB_TOOLS_COMMANDS_H_
