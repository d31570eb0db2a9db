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

#include "robsub/dataset.h"

#include <numeric>
#include <string>

#include "robsub/error.h"

namespace robsub {
namespace {

void RequireInterceptColumn(const RowMatrix& x, const char* what) {
  if (x.cols() < 1) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + " has no columns");
  }
  for (Index i = 0; i < x.rows(); ++i) {
    if (x(i, 0) != 1.0) {
      throw Error(ErrorCode::kShapeMismatch,
                  std::string(what) + ": first column must be all ones (row " +
                      std::to_string(i) + ")");
    }
  }
}

}  // namespace

Dataset::Dataset(RowMatrix x, std::optional<Vector> y,
                 std::vector<std::int64_t> ids)
    : x_(std::move(x)), y_(std::move(y)), ids_(std::move(ids)) {
  RequireInterceptColumn(x_, "design matrix");
  if (x_.rows() <= x_.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "dataset needs N > k+1 rows, got N=" +
                    std::to_string(x_.rows()) +
                    ", k+1=" + std::to_string(x_.cols()));
  }
  if (y_ && y_->size() != x_.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "response length " + std::to_string(y_->size()) +
                    " != row count " + std::to_string(x_.rows()));
  }
  if (ids_.empty()) {
    ids_.resize(static_cast<std::size_t>(x_.rows()));
    std::iota(ids_.begin(), ids_.end(), std::int64_t{0});
  } else if (static_cast<Index>(ids_.size()) != x_.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "id count != row count");
  }
}

Dataset Dataset::WithIntercept(const RowMatrix& factors,
                               std::optional<Vector> y,
                               std::vector<std::int64_t> ids) {
  RowMatrix x(factors.rows(), factors.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(factors.cols()) = factors;
  return Dataset(std::move(x), std::move(y), std::move(ids));
}

const Vector& Dataset::y() const {
  if (!y_) throw Error(ErrorCode::kMissingResponse, "dataset has no response");
  return *y_;
}

PredictionSet::PredictionSet(RowMatrix x0) : x0_(std::move(x0)) {
  RequireInterceptColumn(x0_, "prediction set");
  if (x0_.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "prediction set is empty");
  }
  cross_ = x0_.transpose() * x0_;
}

void ValidateSample(std::span<const Index> sample, Index n_rows) {
  std::vector<bool> seen(static_cast<std::size_t>(n_rows), false);
  for (Index i : sample) {
    if (i < 0 || i >= n_rows) {
      throw Error(ErrorCode::kShapeMismatch,
                  "sample index " + std::to_string(i) + " out of range [0, " +
                      std::to_string(n_rows) + ")");
    }
    if (seen[static_cast<std::size_t>(i)]) {
      throw Error(ErrorCode::kShapeMismatch,
                  "duplicate sample index " + std::to_string(i));
    }
    seen[static_cast<std::size_t>(i)] = true;
  }
}

}  // namespace robsub
