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

#ifndef ROBSUB_TOOLS_MANIFEST_H_
#define ROBSUB_TOOLS_MANIFEST_H_

#include <chrono>
#include <string>
#include <vector>

#include "json.hpp"

namespace robsub::tools {

// manifest.json: the resolved configuration, the argument vector, digests of
// every input file, the artifacts written, and the wall time.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args);

  nlohmann::ordered_json& config() { return doc_["config"]; }
  void SetSeed(std::uint64_t seed) { doc_["seed"] = seed; }
  void AddInput(const std::string& role, const std::string& path);
  void AddArtifact(const std::string& name);
  nlohmann::ordered_json& extra(const std::string& key) { return doc_[key]; }

  // Stamps the elapsed time and writes `<dir>/manifest.json`.
  void Write(const std::string& dir);

 private:
  nlohmann::ordered_json doc_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace robsub::tools

#endif  // ROBSUB_TOOLS_MANIFEST_H_
