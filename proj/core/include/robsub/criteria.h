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

#ifndef ROBSUB_CRITERIA_H_
#define ROBSUB_CRITERIA_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "robsub/dataset.h"
#include "robsub/gram_state.h"

namespace robsub {

enum class Criterion { kD, kI };

enum class CookThresholdMode { kFourOverN, kFixed };

// Relative margin by which a candidate must beat the removed unit. Keeps the
// strict lower bound strict under round-off (an exact copy of the removed row
// never qualifies).
inline constexpr double kStrictImprovementMargin = 1e-12;

inline constexpr double kInfiniteNu = std::numeric_limits<double>::infinity();

struct CriterionConfig {
  Criterion kind = Criterion::kD;
  // High-leverage multiplier; +inf disables the upper bound.
  double nu1 = 2.0;
  // Multiplier used while building the initial sample.
  double nu2 = 3.0;
  // Candidates drawn per iteration; 0 means min(2n, N - n).
  Index n_tilde = 0;
  CookThresholdMode cook_mode = CookThresholdMode::kFourOverN;
  double cook_fixed = 0.0;
  // Iteration cap; 0 means 10 n.
  Index t_max = 0;
  int rebuild_period = kDefaultRebuildPeriod;
  std::uint64_t seed = 0;
  // Required iff kind == kI.
  std::optional<PredictionSet> prediction_set;
  // Throw kInitFailed instead of warning when initialisation does not reach
  // the nu2 bound.
  bool strict_init = false;
};

std::string_view CriterionName(Criterion kind);

// Throws kConfigError on an unusable configuration; returns warnings for
// legal but questionable settings.
std::vector<std::string> ValidateConfig(const CriterionConfig& cfg,
                                        const Dataset& data, Index n);

Index ResolvedNTilde(const CriterionConfig& cfg, Index n_rows, Index n);
Index ResolvedTMax(const CriterionConfig& cfg, Index n);

// nu * (k+1) / n.
double LeverageBound(double nu, Index n_params, Index n);
double CookThreshold(const CriterionConfig& cfg, Index n);

// D: leverage x^T G x. I: x^T G C G x / (1 - x^T G x) with C = X0^T X0,
// i.e. the increase of trace(G C) caused by deleting x.
double DeletionScore(const GramState& state, const Eigen::Ref<const Vector>& x,
                     const CriterionConfig& cfg);

// D: x^T G- x. I: x^T G- C G- x / (1 + x^T G- x), i.e. the decrease of
// trace(G- C) caused by adding x. `downdated_inv` is G- = inverse after the
// deletion.
double AdditionScore(const Matrix& downdated_inv,
                     const Eigen::Ref<const Vector>& x,
                     const CriterionConfig& cfg);

// Whether `x_candidate` may replace `x_removed`:
//   D: h_removed < h(x_candidate after swap) < nu1 (k+1)/n
//   I: h~(x_candidate after swap) > h~_removed and
//      h(x_candidate after swap) < nu1 (k+1)/n.
// Degenerate exchanges are rejected.
bool CandidateFilter(const GramState& state,
                     const Eigen::Ref<const Vector>& x_removed,
                     const Eigen::Ref<const Vector>& x_candidate,
                     const CriterionConfig& cfg);

struct CandidateScore {
  bool degenerate = false;
  bool admitted = false;
  double swap_leverage = 0.0;
  // The quantity compared with the removed unit's score by the lower bound:
  // D: swap leverage; I: h~ of the candidate in the swapped sample.
  double filter_score = 0.0;
  double addition_score = 0.0;
  // Determinant ratio of the exchange.
  double d = 0.0;
};

// Scores many candidates against one deletion. Precomputes G x_removed and the
// downdated inverse once; each candidate then costs one (k+1)^2 product.
// Read-only after construction.
class ExchangeScorer {
 public:
  // Throws kDegenerateRemoval when x_removed cannot be deleted.
  ExchangeScorer(const GramState& state, const Eigen::Ref<const Vector>& x_removed,
                 const CriterionConfig& cfg);

  CandidateScore Score(const Eigen::Ref<const Vector>& x_candidate) const;

  double removed_leverage() const { return removed_leverage_; }
  double removed_score() const { return removed_score_; }
  double upper_bound() const { return upper_bound_; }
  const Matrix& downdated_inv() const { return downdated_inv_; }

 private:
  const Matrix& gram_inv_;
  const Matrix* cross_ = nullptr;
  Criterion kind_;
  Vector removed_image_;  // G x_removed
  double removed_leverage_ = 0.0;
  double removed_score_ = 0.0;
  double upper_bound_ = 0.0;
  Matrix downdated_inv_;
};

// trace(G X0^T X0), the sigma-free summed prediction variance.
double TraceCriterion(const Matrix& gram_inv, const PredictionSet& pred);

}  // namespace robsub

#endif  // ROBSUB_CRITERIA_H_
