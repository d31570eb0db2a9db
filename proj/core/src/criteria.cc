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

#include "robsub/criteria.h"

#include <algorithm>
#include <cmath>

#include "robsub/error.h"

namespace robsub {
namespace {

bool Exceeds(double value, double reference) {
  return value - reference >
         kStrictImprovementMargin * std::max(std::abs(reference), 1e-300);
}

const PredictionSet& RequirePrediction(const CriterionConfig& cfg) {
  if (!cfg.prediction_set) {
    throw Error(ErrorCode::kConfigError,
                "the I criterion needs a prediction set");
  }
  return *cfg.prediction_set;
}

void ConfigFail(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

}  // namespace

std::string_view CriterionName(Criterion kind) {
  return kind == Criterion::kD ? "D" : "I";
}

std::vector<std::string> ValidateConfig(const CriterionConfig& cfg,
                                        const Dataset& data, Index n) {
  const Index p = data.n_params();
  const Index rows = data.n_rows();
  std::vector<std::string> warnings;
  if (n < p) {
    ConfigFail("sample size n=" + std::to_string(n) + " is below k+1=" +
               std::to_string(p));
  }
  if (n >= rows) {
    ConfigFail("sample size n=" + std::to_string(n) +
               " leaves no rows outside the sample (N=" +
               std::to_string(rows) + ")");
  }
  if (!(cfg.nu1 > 0.0)) ConfigFail("nu1 must be positive");
  if (!(cfg.nu2 > 0.0)) ConfigFail("nu2 must be positive");
  if (cfg.n_tilde < 0 || cfg.n_tilde > rows - n) {
    ConfigFail("n_tilde must lie in [1, N-n]; 0 selects the default");
  }
  if (cfg.t_max < 0) ConfigFail("t_max must be non-negative");
  if (cfg.rebuild_period < 1) ConfigFail("rebuild_period must be >= 1");
  if (cfg.cook_mode == CookThresholdMode::kFixed && !(cfg.cook_fixed > 0.0)) {
    ConfigFail("fixed Cook threshold must be positive");
  }
  if (cfg.kind == Criterion::kI) {
    const PredictionSet& pred = RequirePrediction(cfg);
    if (pred.x0().cols() != p) {
      ConfigFail("prediction set has " + std::to_string(pred.x0().cols()) +
                 " columns, dataset has " + std::to_string(p));
    }
  }
  if (LeverageBound(cfg.nu1, p, n) >= 1.0 && std::isfinite(cfg.nu1)) {
    warnings.push_back("nu1 (k+1)/n >= 1: the high-leverage bound never binds");
  }
  if (LeverageBound(cfg.nu2, p, n) >= 1.0) {
    warnings.push_back(
        "nu2 (k+1)/n >= 1: initialisation never exchanges any unit");
  }
  return warnings;
}

Index ResolvedNTilde(const CriterionConfig& cfg, Index n_rows, Index n) {
  if (cfg.n_tilde > 0) return cfg.n_tilde;
  return std::min<Index>(2 * n, n_rows - n);
}

Index ResolvedTMax(const CriterionConfig& cfg, Index n) {
  return cfg.t_max > 0 ? cfg.t_max : 10 * n;
}

double LeverageBound(double nu, Index n_params, Index n) {
  return nu * static_cast<double>(n_params) / static_cast<double>(n);
}

double CookThreshold(const CriterionConfig& cfg, Index n) {
  if (cfg.cook_mode == CookThresholdMode::kFixed) return cfg.cook_fixed;
  return 4.0 / static_cast<double>(n);
}

double DeletionScore(const GramState& state, const Eigen::Ref<const Vector>& x,
                     const CriterionConfig& cfg) {
  const Vector gx = state.gram_inv() * x;
  const double h = x.dot(gx);
  if (cfg.kind == Criterion::kD) return h;
  const double denom = 1.0 - h;
  if (denom <= kRemovalLeverageMargin) {
    throw Error(ErrorCode::kDegenerateRemoval,
                "deletion score undefined for leverage " + std::to_string(h));
  }
  return gx.dot(RequirePrediction(cfg).cross() * gx) / denom;
}

double AdditionScore(const Matrix& downdated_inv,
                     const Eigen::Ref<const Vector>& x,
                     const CriterionConfig& cfg) {
  const Vector v = downdated_inv * x;
  const double h = x.dot(v);
  if (cfg.kind == Criterion::kD) return h;
  return v.dot(RequirePrediction(cfg).cross() * v) / (1.0 + h);
}

bool CandidateFilter(const GramState& state,
                     const Eigen::Ref<const Vector>& x_removed,
                     const Eigen::Ref<const Vector>& x_candidate,
                     const CriterionConfig& cfg) {
  SwapInverseResult swapped;
  try {
    swapped = SwapInverse(state, x_removed, x_candidate);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateSwap) return false;
    throw;
  }
  const Vector v = swapped.inv * x_candidate;
  const double swap_leverage = x_candidate.dot(v);
  const double upper = LeverageBound(cfg.nu1, state.gram_inv().rows(),
                                     state.size());
  if (!(swap_leverage < upper)) return false;
  if (cfg.kind == Criterion::kD) {
    return Exceeds(swap_leverage, Leverage(state, x_removed));
  }
  if (1.0 - swap_leverage <= kRemovalLeverageMargin) return false;
  const double swapped_score =
      v.dot(RequirePrediction(cfg).cross() * v) / (1.0 - swap_leverage);
  return Exceeds(swapped_score, DeletionScore(state, x_removed, cfg));
}

ExchangeScorer::ExchangeScorer(const GramState& state,
                               const Eigen::Ref<const Vector>& x_removed,
                               const CriterionConfig& cfg)
    : gram_inv_(state.gram_inv()), kind_(cfg.kind) {
  if (kind_ == Criterion::kI) cross_ = &RequirePrediction(cfg).cross();
  removed_image_ = gram_inv_ * x_removed;
  removed_leverage_ = x_removed.dot(removed_image_);
  if (removed_leverage_ >= 1.0 - kRemovalLeverageMargin) {
    throw Error(ErrorCode::kDegenerateRemoval,
                "removing a row with leverage " +
                    std::to_string(removed_leverage_) +
                    " would make the Gram matrix singular");
  }
  const double keep = 1.0 - removed_leverage_;
  downdated_inv_ = gram_inv_;
  downdated_inv_.noalias() += (removed_image_ * removed_image_.transpose()) / keep;
  removed_score_ =
      kind_ == Criterion::kD
          ? removed_leverage_
          : removed_image_.dot(*cross_ * removed_image_) / keep;
  upper_bound_ = LeverageBound(cfg.nu1, gram_inv_.rows(), state.size());
}

CandidateScore ExchangeScorer::Score(
    const Eigen::Ref<const Vector>& x_candidate) const {
  CandidateScore out;
  const Vector g = gram_inv_ * x_candidate;
  SwapScalars s;
  s.removed = removed_leverage_;
  s.added = x_candidate.dot(g);
  s.cross = removed_image_.dot(x_candidate);
  s.d = (1.0 - s.removed) * (1.0 + s.added) + s.cross * s.cross;
  out.d = s.d;
  if (!(s.d >= kMinSwapDeterminantRatio)) {
    out.degenerate = true;
    return out;
  }
  out.swap_leverage = SwapLeverageFromScalars(s);
  const double keep = 1.0 - s.removed;
  if (kind_ == Criterion::kD) {
    out.filter_score = out.swap_leverage;
    out.addition_score = s.added + s.cross * s.cross / keep;
  } else {
    // G~ x_c = g (1 - alpha/d) + G x_r (cross/d), alpha = cross^2 + keep added.
    const double alpha = s.cross * s.cross + keep * s.added;
    const Vector swapped_image =
        (1.0 - alpha / s.d) * g + (s.cross / s.d) * removed_image_;
    const double free = 1.0 - out.swap_leverage;
    out.filter_score =
        free > kRemovalLeverageMargin
            ? swapped_image.dot(*cross_ * swapped_image) / free
            : -std::numeric_limits<double>::infinity();
    const Vector downdated_image = g + (s.cross / keep) * removed_image_;
    out.addition_score = downdated_image.dot(*cross_ * downdated_image) /
                         (1.0 + s.added + s.cross * s.cross / keep);
  }
  out.admitted = out.swap_leverage < upper_bound_ &&
                 Exceeds(out.filter_score, removed_score_);
  return out;
}

double TraceCriterion(const Matrix& gram_inv, const PredictionSet& pred) {
  return (gram_inv.cwiseProduct(pred.cross())).sum();
}

}  // namespace robsub
