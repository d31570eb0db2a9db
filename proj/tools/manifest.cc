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

#include "manifest.h"

#include <filesystem>

#include "csv_io.h"
#include "robsub/digest.h"

namespace robsub::tools {

Manifest::Manifest(std::string command, std::vector<std::string> args)
    : start_(std::chrono::steady_clock::now()) {
  doc_["tool"] = "robsub";
  doc_["version"] = "0.1.0";
  doc_["command"] = std::move(command);
  doc_["args"] = std::move(args);
  doc_["config"] = nlohmann::ordered_json::object();
  doc_["seed"] = 0;
  doc_["inputs"] = nlohmann::ordered_json::object();
  doc_["artifacts"] = nlohmann::ordered_json::array();
}

void Manifest::AddInput(const std::string& role, const std::string& path) {
  Fnv1a digest;
  digest.Update(ReadFileBytes(path));
  doc_["inputs"][role] = {{"path", path}, {"fnv1a64", digest.hex()}};
}

void Manifest::AddArtifact(const std::string& name) {
  doc_["artifacts"].push_back(name);
}

void Manifest::Write(const std::string& dir) {
  doc_["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
          .count();
  WriteFileBytes((std::filesystem::path(dir) / "manifest.json").string(),
                 doc_.dump(2) + "\n");
}

}  // namespace robsub::tools
