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

#ifndef ROBSUB_DATASET_H_
#define ROBSUB_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace robsub {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Design matrices are stored row-major so that x_i is a contiguous row.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A tall regression dataset: N rows x_i^T = (1, x~_i^T) with an optional
// response per row. Row identifiers default to 0..N-1.
class Dataset {
 public:
  // `x` must already carry the intercept column. Throws kShapeMismatch when
  // an invariant is violated.
  explicit Dataset(RowMatrix x, std::optional<Vector> y = std::nullopt,
                   std::vector<std::int64_t> ids = {});

  // Prepends the column of ones to `factors` (N x k).
  static Dataset WithIntercept(const RowMatrix& factors,
                               std::optional<Vector> y = std::nullopt,
                               std::vector<std::int64_t> ids = {});

  Index n_rows() const { return x_.rows(); }
  Index n_factors() const { return x_.cols() - 1; }
  Index n_params() const { return x_.cols(); }

  const RowMatrix& x() const { return x_; }
  auto row(Index i) const { return x_.row(i).transpose(); }

  bool has_response() const { return y_.has_value(); }
  // Throws kMissingResponse when the dataset has no response.
  const Vector& y() const;
  const std::vector<std::int64_t>& ids() const { return ids_; }

 private:
  RowMatrix x_;
  std::optional<Vector> y_;
  std::vector<std::int64_t> ids_;
};

// Points at which predictions are wanted, with X0^T X0 cached.
class PredictionSet {
 public:
  explicit PredictionSet(RowMatrix x0);

  const RowMatrix& x0() const { return x0_; }
  const Matrix& cross() const { return cross_; }
  Index size() const { return x0_.rows(); }

 private:
  RowMatrix x0_;
  Matrix cross_;
};

// Checks that `sample` holds distinct row indices in [0, n_rows).
void ValidateSample(std::span<const Index> sample, Index n_rows);

}  // namespace robsub

#endif  // ROBSUB_DATASET_H_
