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

#ifndef ROBSUB_DIGEST_H_
#define ROBSUB_DIGEST_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "robsub/dataset.h"

namespace robsub {

// 64-bit FNV-1a, used for artifact and per-cell checksums.
class Fnv1a {
 public:
  void Update(std::string_view bytes);
  void Update(std::span<const Index> indices);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace robsub

#endif  // ROBSUB_DIGEST_H_
