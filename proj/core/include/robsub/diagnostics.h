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

#ifndef ROBSUB_DIAGNOSTICS_H_
#define ROBSUB_DIAGNOSTICS_H_

#include <span>

#include "robsub/dataset.h"

namespace robsub {

// Residual variances below this are treated as an exact fit; every Cook
// distance is then 0.
inline constexpr double kZeroVarianceFloor = 1e-14;

// Ordinary least squares on the rows of a sample.
struct OlsFit {
  Vector beta_hat;
  // Residual mean square, denominator n - (k+1).
  double sigma2_hat = 0.0;
  Vector fitted;
  Vector residuals;
  Vector leverages;

  Index n_params() const { return beta_hat.size(); }
};

// Throws kMissingResponse, kSingularGram, or kInsufficientDoF (n <= k+1).
OlsFit FitOls(const Dataset& data, std::span<const Index> sample);

// Same, reusing a known (X^T X)^{-1} of the sampled rows.
OlsFit FitOlsWithInverse(const Dataset& data, std::span<const Index> sample,
                         const Matrix& gram_inv);

// Cook's distance of the unit at `position` of the fitted sample:
//   r_i^2 / ((k+1) sigma2) * h_ii / (1 - h_ii)^2.
// Returns 0 when sigma2_hat <= kZeroVarianceFloor. Throws kDegenerateLeverage
// if h_ii >= 1 - 1e-10.
double CooksDistance(const OlsFit& fit, Index position);

// Cook's distance of `position` in the fit over `sample` whose inverse Gram
// is `gram_inv`; computes only what that single distance needs.
double CooksDistanceAt(const Dataset& data, std::span<const Index> sample,
                       const Matrix& gram_inv, Index position);

}  // namespace robsub

#endif  // ROBSUB_DIAGNOSTICS_H_
