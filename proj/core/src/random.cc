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

#include "robsub/random.h"

#include <algorithm>
#include <ranges>
#include <string>

#include "robsub/error.h"

namespace robsub {

Rng MakeStream(std::uint64_t seed,
               std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (std::uint64_t p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::vector<Index> SampleWithoutReplacement(Index n_rows, Index count,
                                            Rng& rng) {
  if (count < 0 || count > n_rows) {
    throw Error(ErrorCode::kConfigError,
                "cannot draw " + std::to_string(count) + " of " +
                    std::to_string(n_rows) + " rows without replacement");
  }
  std::vector<Index> out(static_cast<std::size_t>(count));
  std::ranges::sample(std::views::iota(Index{0}, n_rows), out.begin(), count,
                      rng);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> SampleOutside(std::span<char> excluded,
                                 Index pool_size, Index count, Rng& rng) {
  const Index n_rows = static_cast<Index>(excluded.size());
  if (count > pool_size) count = pool_size;
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count <= 0) return out;

  if (2 * count <= pool_size) {
    std::uniform_int_distribution<Index> pick(0, n_rows - 1);
    while (static_cast<Index>(out.size()) < count) {
      const Index j = pick(rng);
      if (excluded[static_cast<std::size_t>(j)]) continue;
      excluded[static_cast<std::size_t>(j)] = 1;
      out.push_back(j);
    }
    for (Index j : out) excluded[static_cast<std::size_t>(j)] = 0;
    return out;
  }

  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(pool_size));
  for (Index j = 0; j < n_rows; ++j) {
    if (!excluded[static_cast<std::size_t>(j)]) pool.push_back(j);
  }
  const Index m = static_cast<Index>(pool.size());
  for (Index t = 0; t < count; ++t) {
    std::uniform_int_distribution<Index> pick(t, m - 1);
    std::swap(pool[static_cast<std::size_t>(t)],
              pool[static_cast<std::size_t>(pick(rng))]);
    out.push_back(pool[static_cast<std::size_t>(t)]);
  }
  return out;
}

}  // namespace robsub
