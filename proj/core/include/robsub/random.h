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

#ifndef ROBSUB_RANDOM_H_
#define ROBSUB_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "robsub/dataset.h"

namespace robsub {

using Rng = std::mt19937_64;

// Independent stream for a path (e.g. {h, s, strategy}) under `seed`.
Rng MakeStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// `count` distinct indices from [0, n_rows), ascending.
std::vector<Index> SampleWithoutReplacement(Index n_rows, Index count,
                                            Rng& rng);

// `count` distinct indices from [0, n_rows) with `excluded[i]` false, in draw
// order. Uses rejection when the pool is large relative to `count` and a
// partial Fisher-Yates shuffle of the pool otherwise. `excluded` is used as
// scratch space and restored before returning.
std::vector<Index> SampleOutside(std::span<char> excluded,
                                 Index pool_size, Index count, Rng& rng);

}  // namespace robsub

#endif  // ROBSUB_RANDOM_H_
