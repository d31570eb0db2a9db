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

#ifndef ROBSUB_SIMULATION_H_
#define ROBSUB_SIMULATION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robsub/criteria.h"
#include "robsub/dataset.h"
#include "robsub/diagnostics.h"
#include "robsub/random.h"

namespace robsub {

// A generated dataset and the rows drawn from the contaminating regime.
struct MarkedDataset {
  Dataset data;
  std::vector<Index> planted;
};

// Simple regression with N rows; the last n_out rows are contaminated.
//   bulk:    y = 1.5 + 2.7 x + e,  x ~ N(3, 4),  e ~ N(0, 81)
//   planted: y = 1.5 - 2.7 x + e,  x ~ N(3, 20), e ~ N(0, 400)
// Second arguments are variances. Rows are drawn in order, x before e.
MarkedDataset GenerateExample1(Index n_rows, Index n_out, Rng& rng);

struct StudyConfig {
  Index n_rows = 100000;
  Index n_planted = 50;
  int datasets = 3;            // H
  int responses = 5;           // S
  Index n = 500;
  Index n_prediction = 500;    // N0
  Index n_test = 500;          // NT
  int srs_replicates = 10;
  Index n_tilde = 0;           // 0 selects 2 n
  double nu1 = 2.0;
  double nu2 = 3.0;
  Index t_max = 0;             // 0 selects 10 n
  Vector beta_main;
  Vector beta_out;
  double sigma_main = 3.0;
  double sigma_out = 20.0;
  std::uint64_t seed = 1;
};

// Desk-scale defaults with the coefficient vectors filled in.
StudyConfig DefaultStudyConfig();

// Throws kConfigError.
void ValidateStudyConfig(const StudyConfig& cfg);

// Ten covariates plus intercept. Columns 1-3 U(0,5); (4,5) and (6,7) two
// independent bivariate normal blocks with covariance [[9,-1],[-1,9]], or
// [[25,1],[1,25]] for the last n_planted rows; (8,9) bivariate t with 3
// degrees of freedom and scale [[1,.5],[.5,1]]; column 10 Poisson(5).
struct StudyDesign {
  RowMatrix x;
  std::vector<Index> planted;
};
StudyDesign GenerateStudyX(Index n_rows, Index n_planted, Rng& rng);

// x^T beta_main + sigma_main e for bulk rows, x^T beta_out + sigma_out e for
// planted rows.
Vector GenerateStudyY(const StudyDesign& design, const StudyConfig& cfg,
                      Rng& rng);

// The exact draws RunStudy makes for dataset h, response replicate s, and the
// shared prediction/test sets.
StudyDesign StudyDesignFor(const StudyConfig& cfg, int h);
Vector StudyResponseFor(const StudyConfig& cfg, const StudyDesign& design,
                        int h, int s);

struct HoldoutSets {
  StudyDesign prediction;
  Vector y_prediction;
  StudyDesign test;
  Vector y_test;
};
HoldoutSets StudyHoldout(const StudyConfig& cfg);

enum class Strategy { kNonInfI, kNonInfD, kInfI, kInfD, kSrs };
inline constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::kNonInfI, Strategy::kNonInfD, Strategy::kInfI, Strategy::kInfD,
    Strategy::kSrs};
std::string_view StrategyName(Strategy s);

struct MetricsRow {
  Strategy strategy = Strategy::kSrs;
  // sigma^2 trace[(X^T X)^{-1} X0^T X0] / N0; needs sigma.
  std::optional<double> mspe_x0;
  // trace[(X^T X)^{-1} X0^T X0] / N0, reported when sigma is unknown.
  std::optional<double> trace_x0;
  double log_det = 0.0;
  std::optional<double> spe_x0;
  std::optional<double> spe_xt;
  std::optional<double> se_d0;
  std::optional<double> se_dt;
};

// Inputs beyond the sample; absent pieces leave the matching columns empty.
struct MetricsInputs {
  const PredictionSet* prediction = nullptr;
  const Vector* y_prediction = nullptr;
  const RowMatrix* x_test = nullptr;
  const Vector* y_test = nullptr;
  std::optional<double> sigma_true;
  const Vector* beta_true = nullptr;
};

// `fit` is only consulted for beta_hat; pass nullopt when the dataset has no
// response. Throws kSingularGram.
MetricsRow ComputeMetrics(const Dataset& data, std::span<const Index> sample,
                          const std::optional<OlsFit>& fit,
                          const MetricsInputs& inputs);

struct StudyCell {
  int h = 0;
  int s = 0;
  std::array<MetricsRow, 5> rows;
  // FNV-1a digest of each strategy's selected indices (all SRS replicates
  // chained for SRS).
  std::array<std::string, 5> checksums;
};

struct StudyResult {
  // Monte Carlo averages in kAllStrategies order.
  std::array<MetricsRow, 5> averages;
  std::vector<StudyCell> cells;
};

// For each (h, s): draw X_h (once per h) and Y_{h,s}; derive one initial
// sample; run the four exchange strategies from it; draw srs_replicates simple
// random samples. Prediction and test sets are drawn once, contamination free.
// Every stream is derived from (seed, role, h, s, ...), so cells are
// independent of evaluation order.
StudyResult RunStudy(const StudyConfig& cfg);

}  // namespace robsub

#endif  // ROBSUB_SIMULATION_H_
