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

#include "robsub/diagnostics.h"

#include <string>

#include "robsub/error.h"
#include "robsub/gram_state.h"

namespace robsub {
namespace {

void RequireDoF(Index n, Index p) {
  if (n <= p) {
    throw Error(ErrorCode::kInsufficientDoF,
                "residual variance needs n > k+1 (n=" + std::to_string(n) +
                    ", k+1=" + std::to_string(p) + ")");
  }
}

double CookFormula(double residual, double leverage, double sigma2,
                   Index n_params) {
  if (sigma2 <= kZeroVarianceFloor) return 0.0;
  if (leverage >= 1.0 - kRemovalLeverageMargin) {
    throw Error(ErrorCode::kDegenerateLeverage,
                "Cook's distance undefined at leverage " +
                    std::to_string(leverage));
  }
  const double keep = 1.0 - leverage;
  return residual * residual / (static_cast<double>(n_params) * sigma2) *
         leverage / (keep * keep);
}

}  // namespace

OlsFit FitOlsWithInverse(const Dataset& data, std::span<const Index> sample,
                         const Matrix& gram_inv) {
  const Vector& y = data.y();
  const Index n = static_cast<Index>(sample.size());
  const Index p = data.n_params();
  RequireDoF(n, p);

  Vector xty = Vector::Zero(p);
  for (Index i : sample) xty.noalias() += data.row(i) * y(i);

  OlsFit fit;
  fit.beta_hat = gram_inv * xty;
  fit.fitted.resize(n);
  fit.residuals.resize(n);
  fit.leverages.resize(n);
  for (Index pos = 0; pos < n; ++pos) {
    const auto x = data.row(sample[pos]);
    fit.fitted(pos) = x.dot(fit.beta_hat);
    fit.residuals(pos) = y(sample[pos]) - fit.fitted(pos);
    fit.leverages(pos) = x.dot(gram_inv * x);
  }
  fit.sigma2_hat = fit.residuals.squaredNorm() / static_cast<double>(n - p);
  return fit;
}

OlsFit FitOls(const Dataset& data, std::span<const Index> sample) {
  data.y();
  RequireDoF(static_cast<Index>(sample.size()), data.n_params());
  const GramState state =
      GramState::Build(data, std::vector<Index>(sample.begin(), sample.end()));
  return FitOlsWithInverse(data, sample, state.gram_inv());
}

double CooksDistance(const OlsFit& fit, Index position) {
  return CookFormula(fit.residuals(position), fit.leverages(position),
                     fit.sigma2_hat, fit.n_params());
}

double CooksDistanceAt(const Dataset& data, std::span<const Index> sample,
                       const Matrix& gram_inv, Index position) {
  const Vector& y = data.y();
  const Index n = static_cast<Index>(sample.size());
  const Index p = data.n_params();
  RequireDoF(n, p);

  Vector xty = Vector::Zero(p);
  for (Index i : sample) xty.noalias() += data.row(i) * y(i);
  const Vector beta = gram_inv * xty;
  double rss = 0.0;
  for (Index i : sample) {
    const double r = y(i) - data.row(i).dot(beta);
    rss += r * r;
  }
  const Index row = sample[position];
  const auto x = data.row(row);
  return CookFormula(y(row) - x.dot(beta), x.dot(gram_inv * x),
                     rss / static_cast<double>(n - p), p);
}

}  // namespace robsub
