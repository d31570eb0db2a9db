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

#ifndef ROBSUB_GRAM_STATE_H_
#define ROBSUB_GRAM_STATE_H_

#include <span>
#include <vector>

#include "robsub/dataset.h"

namespace robsub {

// Tolerances for the closed-form updates.
inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr double kRemovalLeverageMargin = 1e-10;
inline constexpr double kMinSwapDeterminantRatio = 1e-12;
inline constexpr double kMaxRebuildDrift = 1e-6;
inline constexpr int kDefaultRebuildPeriod = 100;

struct RebuildReport;

// Inverse information matrix (X^T X)^{-1} of the rows currently in a sample,
// maintained under one-for-one exchanges.
//
// The sample is an ordered list; an exchange overwrites one position, so
// positions are stable across updates while row indices are not.
class GramState {
 public:
  // Throws kSingularGram if the sampled rows are rank deficient or the
  // condition number of X^T X exceeds kMaxConditionNumber, and kShapeMismatch
  // for duplicate or out-of-range indices.
  static GramState Build(const Dataset& data, std::vector<Index> sample);

  const std::vector<Index>& sample() const { return sample_; }
  Index size() const { return static_cast<Index>(sample_.size()); }
  const Matrix& gram_inv() const { return gram_inv_; }
  double log_det() const { return log_det_; }
  int updates_since_rebuild() const { return updates_since_rebuild_; }

  // Replaces the row at `position` with `row`. The caller supplies the
  // post-exchange inverse and the determinant ratio d = |new| / |old|.
  void ApplySwap(std::size_t position, Index row, Matrix new_gram_inv,
                 double det_ratio);

  // Test hook: overwrite the inverse without touching the counter.
  void OverwriteInverseForTesting(const Matrix& m) { gram_inv_ = m; }

 private:
  friend RebuildReport Rebuild(GramState& state, const Dataset& data);

  GramState() = default;

  std::vector<Index> sample_;
  Matrix gram_inv_;
  double log_det_ = 0.0;
  int updates_since_rebuild_ = 0;
};

// x^T (X^T X)^{-1} x.
double Leverage(const GramState& state, const Eigen::Ref<const Vector>& x);

// Leverages of every sampled row, in sample order.
Vector SampleLeverages(const GramState& state, const Dataset& data);

// Inverse after deleting `x_removed` from the sample:
//   G + G x x^T G / (1 - x^T G x).
// Throws kDegenerateRemoval if x^T G x >= 1 - kRemovalLeverageMargin.
Matrix DowndateInverse(const GramState& state,
                       const Eigen::Ref<const Vector>& x_removed);

// Inverse after adding `x_added` to a sample whose inverse is `inv`
// (Sherman-Morrison).
Matrix AddRowInverse(const Matrix& inv, const Eigen::Ref<const Vector>& x_added);

// Scalars entering the exchange of x_removed for x_added:
//   removed = x_r^T G x_r, added = x_a^T G x_a, cross = x_r^T G x_a,
//   d = (1 - removed)(1 + added) + cross^2.
struct SwapScalars {
  double removed = 0.0;
  double added = 0.0;
  double cross = 0.0;
  double d = 0.0;
};

SwapScalars ComputeSwapScalars(const Matrix& gram_inv,
                               const Eigen::Ref<const Vector>& x_removed,
                               const Eigen::Ref<const Vector>& x_added);

// Leverage of x_added after the exchange, in terms of the scalars above:
//   added - [2 cross^2 added + (1 - removed) added^2 - (1 + added) cross^2] / d.
double SwapLeverageFromScalars(const SwapScalars& s);

struct SwapInverseResult {
  Matrix inv;
  double d = 0.0;
};

// Inverse after exchanging x_removed for x_added:
//   G - G A G / d,
//   A = cross (x_a x_r^T + x_r x_a^T) + (1 - removed) x_a x_a^T
//       - (1 + added) x_r x_r^T.
// The result is symmetrised. Throws kDegenerateSwap if |d| <
// kMinSwapDeterminantRatio.
SwapInverseResult SwapInverse(const GramState& state,
                              const Eigen::Ref<const Vector>& x_removed,
                              const Eigen::Ref<const Vector>& x_added);

// x_added^T (swapped inverse) x_added, without forming the swapped matrix.
// Throws kDegenerateSwap like SwapInverse.
double SwapLeverage(const GramState& state,
                    const Eigen::Ref<const Vector>& x_removed,
                    const Eigen::Ref<const Vector>& x_added);

struct RebuildReport {
  bool rebuilt = false;
  // ||G_incremental - G_direct||_F / ||G_direct||_F.
  double drift = 0.0;
  // |log_det_incremental - log_det_direct|.
  double log_det_error = 0.0;
  // Sum of sampled leverages under the rebuilt inverse.
  double leverage_sum = 0.0;
};

// Recomputes the inverse and log-determinant from scratch once
// `updates_since_rebuild` reaches `period`. Throws kDriftExceeded when the
// incremental inverse or log-determinant strayed by more than
// kMaxRebuildDrift.
RebuildReport RebuildIfDrifting(GramState& state, const Dataset& data,
                                int period = kDefaultRebuildPeriod);

// Same check, unconditionally.
RebuildReport Rebuild(GramState& state, const Dataset& data);

// Sum over the sample of x_i x_i^T.
Matrix SampleGram(const Dataset& data, std::span<const Index> sample);

}  // namespace robsub

#endif  // ROBSUB_GRAM_STATE_H_
