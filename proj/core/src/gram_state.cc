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

#include "robsub/gram_state.h"

#include <cmath>
#include <string>

#include "robsub/error.h"

namespace robsub {
namespace {

struct DirectInverse {
  Matrix inv;
  double log_det = 0.0;
};

DirectInverse InvertGram(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxConditionNumber) {
    throw Error(ErrorCode::kSingularGram,
                "sampled rows are rank deficient (eigenvalue range [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "])");
  }
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularGram, "Cholesky factorisation failed");
  }
  DirectInverse out;
  out.inv = llt.solve(Matrix::Identity(gram.rows(), gram.cols()));
  out.inv = 0.5 * (out.inv + out.inv.transpose());
  out.log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return out;
}

}  // namespace

Matrix SampleGram(const Dataset& data, std::span<const Index> sample) {
  const Index p = data.n_params();
  Matrix gram = Matrix::Zero(p, p);
  for (Index i : sample) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(data.row(i));
  }
  return gram.selfadjointView<Eigen::Lower>();
}

GramState GramState::Build(const Dataset& data, std::vector<Index> sample) {
  ValidateSample(sample, data.n_rows());
  if (static_cast<Index>(sample.size()) < data.n_params()) {
    throw Error(ErrorCode::kSingularGram,
                "sample of size " + std::to_string(sample.size()) +
                    " cannot identify " + std::to_string(data.n_params()) +
                    " parameters");
  }
  DirectInverse direct = InvertGram(SampleGram(data, sample));
  GramState state;
  state.sample_ = std::move(sample);
  state.gram_inv_ = std::move(direct.inv);
  state.log_det_ = direct.log_det;
  return state;
}

void GramState::ApplySwap(std::size_t position, Index row,
                          Matrix new_gram_inv, double det_ratio) {
  sample_.at(position) = row;
  gram_inv_ = std::move(new_gram_inv);
  log_det_ += std::log(det_ratio);
  ++updates_since_rebuild_;
}

double Leverage(const GramState& state, const Eigen::Ref<const Vector>& x) {
  return x.dot(state.gram_inv() * x);
}

Vector SampleLeverages(const GramState& state, const Dataset& data) {
  Vector h(state.size());
  for (Index p = 0; p < state.size(); ++p) {
    h(p) = Leverage(state, data.row(state.sample()[p]));
  }
  return h;
}

Matrix DowndateInverse(const GramState& state,
                       const Eigen::Ref<const Vector>& x_removed) {
  const Vector a = state.gram_inv() * x_removed;
  const double h = x_removed.dot(a);
  if (h >= 1.0 - kRemovalLeverageMargin) {
    throw Error(ErrorCode::kDegenerateRemoval,
                "removing a row with leverage " + std::to_string(h) +
                    " would make the Gram matrix singular");
  }
  Matrix out = state.gram_inv();
  out.noalias() += (a * a.transpose()) / (1.0 - h);
  return out;
}

Matrix AddRowInverse(const Matrix& inv,
                     const Eigen::Ref<const Vector>& x_added) {
  const Vector g = inv * x_added;
  Matrix out = inv;
  out.noalias() -= (g * g.transpose()) / (1.0 + x_added.dot(g));
  return out;
}

SwapScalars ComputeSwapScalars(const Matrix& gram_inv,
                               const Eigen::Ref<const Vector>& x_removed,
                               const Eigen::Ref<const Vector>& x_added) {
  SwapScalars s;
  const Vector g = gram_inv * x_added;
  s.removed = x_removed.dot(gram_inv * x_removed);
  s.added = x_added.dot(g);
  s.cross = x_removed.dot(g);
  s.d = (1.0 - s.removed) * (1.0 + s.added) + s.cross * s.cross;
  return s;
}

double SwapLeverageFromScalars(const SwapScalars& s) {
  const double quad = 2.0 * s.cross * s.cross * s.added +
                      (1.0 - s.removed) * s.added * s.added -
                      (1.0 + s.added) * s.cross * s.cross;
  return s.added - quad / s.d;
}

SwapInverseResult SwapInverse(const GramState& state,
                              const Eigen::Ref<const Vector>& x_removed,
                              const Eigen::Ref<const Vector>& x_added) {
  const Matrix& g_inv = state.gram_inv();
  const Vector a = g_inv * x_removed;
  const Vector g = g_inv * x_added;
  const double removed = x_removed.dot(a);
  const double added = x_added.dot(g);
  const double cross = x_removed.dot(g);
  const double d = (1.0 - removed) * (1.0 + added) + cross * cross;
  if (!(d >= kMinSwapDeterminantRatio)) {
    throw Error(ErrorCode::kDegenerateSwap,
                "exchange makes the Gram matrix singular (d=" +
                    std::to_string(d) + ")");
  }
  // G A G with A expanded term by term.
  Matrix gag = cross * (g * a.transpose() + a * g.transpose());
  gag.noalias() += (1.0 - removed) * (g * g.transpose());
  gag.noalias() -= (1.0 + added) * (a * a.transpose());
  SwapInverseResult out;
  out.inv = g_inv - gag / d;
  out.inv = 0.5 * (out.inv + out.inv.transpose());
  out.d = d;
  return out;
}

double SwapLeverage(const GramState& state,
                    const Eigen::Ref<const Vector>& x_removed,
                    const Eigen::Ref<const Vector>& x_added) {
  const SwapScalars s =
      ComputeSwapScalars(state.gram_inv(), x_removed, x_added);
  if (!(s.d >= kMinSwapDeterminantRatio)) {
    throw Error(ErrorCode::kDegenerateSwap,
                "exchange makes the Gram matrix singular (d=" +
                    std::to_string(s.d) + ")");
  }
  return SwapLeverageFromScalars(s);
}

RebuildReport Rebuild(GramState& state, const Dataset& data) {
  const DirectInverse direct = InvertGram(SampleGram(data, state.sample_));
  RebuildReport report;
  report.rebuilt = true;
  report.drift = (state.gram_inv_ - direct.inv).norm() / direct.inv.norm();
  report.log_det_error = std::abs(state.log_det_ - direct.log_det);
  if (!(report.drift < kMaxRebuildDrift) ||
      !(report.log_det_error < kMaxRebuildDrift)) {
    throw Error(ErrorCode::kDriftExceeded,
                "incremental inverse drifted: relative Frobenius " +
                    std::to_string(report.drift) + ", log-det error " +
                    std::to_string(report.log_det_error));
  }
  state.gram_inv_ = direct.inv;
  state.log_det_ = direct.log_det;
  state.updates_since_rebuild_ = 0;
  report.leverage_sum = SampleLeverages(state, data).sum();
  return report;
}

RebuildReport RebuildIfDrifting(GramState& state, const Dataset& data,
                                int period) {
  if (state.updates_since_rebuild() == 0 ||
      state.updates_since_rebuild() < period) {
    return {};
  }
  return Rebuild(state, data);
}

}  // namespace robsub
