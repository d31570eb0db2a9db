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

#include "robsub/simulation.h"

#include <cmath>
#include <string>

#include "robsub/digest.h"
#include "robsub/error.h"
#include "robsub/gram_state.h"
#include "robsub/sampler.h"

namespace robsub {
namespace {

// Stream roles; part of the reproducibility contract, do not renumber.
enum StreamRole : std::uint64_t {
  kHoldoutStream = 0,
  kDesignStream = 1,
  kResponseStream = 2,
  kInitStream = 3,
  kStrategyStream = 4,
  kSrsStream = 5,
};

// Lower Cholesky factor of [[a, b], [b, a]].
Eigen::Matrix2d Chol2(double a, double b) {
  Eigen::Matrix2d m;
  m << a, b, b, a;
  return m.llt().matrixL();
}

}  // namespace

MarkedDataset GenerateExample1(Index n_rows, Index n_out, Rng& rng) {
  if (n_rows <= 2 || n_out < 0 || n_out >= n_rows) {
    throw Error(ErrorCode::kConfigError,
                "example 1 needs N > 2 and 0 <= N_out < N");
  }
  std::normal_distribution<double> z(0.0, 1.0);
  RowMatrix factors(n_rows, 1);
  Vector y(n_rows);
  const Index first_planted = n_rows - n_out;
  for (Index i = 0; i < n_rows; ++i) {
    const bool planted = i >= first_planted;
    const double x = 3.0 + (planted ? std::sqrt(20.0) : 2.0) * z(rng);
    const double e = (planted ? 20.0 : 9.0) * z(rng);
    factors(i, 0) = x;
    y(i) = 1.5 + (planted ? -2.7 : 2.7) * x + e;
  }
  MarkedDataset out{Dataset::WithIntercept(factors, std::move(y)), {}};
  for (Index i = first_planted; i < n_rows; ++i) out.planted.push_back(i);
  return out;
}

StudyConfig DefaultStudyConfig() {
  StudyConfig cfg;
  cfg.beta_main.resize(11);
  cfg.beta_main << 1, 1, 1, 1, 2, 2, 2, 2, 1, 1, 1;
  cfg.beta_out.resize(11);
  cfg.beta_out << 1, 1, 1, 1, -2, -2, -2, -2, 1, -1, -1;
  return cfg;
}

void ValidateStudyConfig(const StudyConfig& cfg) {
  auto fail = [](const std::string& m) {
    throw Error(ErrorCode::kConfigError, m);
  };
  if (cfg.n_rows <= 0 || cfg.n <= 0 || cfg.n_prediction <= 0 ||
      cfg.n_test <= 0 || cfg.datasets <= 0 || cfg.responses <= 0 ||
      cfg.srs_replicates <= 0) {
    fail("study sizes must all be positive");
  }
  if (cfg.n_planted < 0 || cfg.n_planted >= cfg.n_rows) {
    fail("N2 must lie in [0, N)");
  }
  if (cfg.n >= cfg.n_rows) fail("n must be below N");
  if (cfg.n <= 11) fail("n must exceed k+1 = 11");
  if (cfg.n_tilde < 0 || cfg.n_tilde > cfg.n_rows - cfg.n) {
    fail("n_tilde must lie in [0, N-n]");
  }
  if (cfg.beta_main.size() != 11 || cfg.beta_out.size() != 11) {
    fail("coefficient vectors need 11 entries");
  }
  if (!(cfg.sigma_main >= 0.0) || !(cfg.sigma_out >= 0.0)) {
    fail("noise scales must be non-negative");
  }
}

StudyDesign GenerateStudyX(Index n_rows, Index n_planted, Rng& rng) {
  static const Eigen::Matrix2d kBulk = Chol2(9.0, -1.0);
  static const Eigen::Matrix2d kPlanted = Chol2(25.0, 1.0);
  static const Eigen::Matrix2d kScale = Chol2(1.0, 0.5);

  std::uniform_real_distribution<double> unif(0.0, 5.0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(3.0);
  std::poisson_distribution<int> poisson(5.0);

  StudyDesign out;
  out.x.resize(n_rows, 11);
  const Index first_planted = n_rows - n_planted;
  for (Index i = 0; i < n_rows; ++i) {
    const Eigen::Matrix2d& block = i >= first_planted ? kPlanted : kBulk;
    auto row = out.x.row(i);
    row(0) = 1.0;
    for (int j = 1; j <= 3; ++j) row(j) = unif(rng);
    for (int j : {4, 6}) {
      Eigen::Vector2d e(z(rng), z(rng));
      row.segment<2>(j) = (block * e).transpose();
    }
    Eigen::Vector2d e(z(rng), z(rng));
    const double w = chi2(rng);
    row.segment<2>(8) = (kScale * e).transpose() / std::sqrt(w / 3.0);
    row(10) = poisson(rng);
  }
  for (Index i = first_planted; i < n_rows; ++i) out.planted.push_back(i);
  return out;
}

Vector GenerateStudyY(const StudyDesign& design, const StudyConfig& cfg,
                      Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  const Index n_rows = design.x.rows();
  const Index first_planted = n_rows - static_cast<Index>(design.planted.size());
  Vector y(n_rows);
  for (Index i = 0; i < n_rows; ++i) {
    const bool planted = i >= first_planted;
    const Vector& beta = planted ? cfg.beta_out : cfg.beta_main;
    const double sigma = planted ? cfg.sigma_out : cfg.sigma_main;
    y(i) = design.x.row(i).dot(beta) + sigma * z(rng);
  }
  return y;
}

StudyDesign StudyDesignFor(const StudyConfig& cfg, int h) {
  Rng rng = MakeStream(cfg.seed, {kDesignStream, static_cast<std::uint64_t>(h)});
  return GenerateStudyX(cfg.n_rows, cfg.n_planted, rng);
}

Vector StudyResponseFor(const StudyConfig& cfg, const StudyDesign& design,
                        int h, int s) {
  Rng rng = MakeStream(cfg.seed, {kResponseStream, static_cast<std::uint64_t>(h),
                                  static_cast<std::uint64_t>(s)});
  return GenerateStudyY(design, cfg, rng);
}

HoldoutSets StudyHoldout(const StudyConfig& cfg) {
  Rng rng = MakeStream(cfg.seed, {kHoldoutStream});
  HoldoutSets out;
  out.prediction = GenerateStudyX(cfg.n_prediction, 0, rng);
  out.y_prediction = GenerateStudyY(out.prediction, cfg, rng);
  out.test = GenerateStudyX(cfg.n_test, 0, rng);
  out.y_test = GenerateStudyY(out.test, cfg, rng);
  return out;
}

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kNonInfI: return "noninf_I";
    case Strategy::kNonInfD: return "noninf_D";
    case Strategy::kInfI: return "inf_I";
    case Strategy::kInfD: return "inf_D";
    case Strategy::kSrs: return "SRS";
  }
  return "unknown";
}

MetricsRow ComputeMetrics(const Dataset& data, std::span<const Index> sample,
                          const std::optional<OlsFit>& fit,
                          const MetricsInputs& in) {
  const GramState state =
      GramState::Build(data, std::vector<Index>(sample.begin(), sample.end()));
  MetricsRow row;
  row.log_det = state.log_det();
  if (in.prediction) {
    const double avg_trace = TraceCriterion(state.gram_inv(), *in.prediction) /
                             static_cast<double>(in.prediction->size());
    if (in.sigma_true) {
      row.mspe_x0 = *in.sigma_true * *in.sigma_true * avg_trace;
    } else {
      row.trace_x0 = avg_trace;
    }
  }
  if (!fit) return row;

  const Vector& beta_hat = fit->beta_hat;
  if (in.prediction) {
    const Vector pred = in.prediction->x0() * beta_hat;
    if (in.beta_true) {
      row.spe_x0 =
          (pred - in.prediction->x0() * *in.beta_true).squaredNorm() /
          static_cast<double>(pred.size());
    }
    if (in.y_prediction) {
      row.se_d0 = (pred - *in.y_prediction).squaredNorm() /
                  static_cast<double>(pred.size());
    }
  }
  if (in.x_test) {
    const Vector pred = *in.x_test * beta_hat;
    if (in.beta_true) {
      row.spe_xt = (pred - *in.x_test * *in.beta_true).squaredNorm() /
                   static_cast<double>(pred.size());
    }
    if (in.y_test) {
      row.se_dt = (pred - *in.y_test).squaredNorm() /
                  static_cast<double>(pred.size());
    }
  }
  return row;
}

namespace {

struct Accumulator {
  double mspe = 0, trace = 0, log_det = 0, spe_x0 = 0, spe_xt = 0, se_d0 = 0,
         se_dt = 0;
  int count = 0;

  void Add(const MetricsRow& r) {
    mspe += r.mspe_x0.value_or(0.0);
    log_det += r.log_det;
    spe_x0 += r.spe_x0.value_or(0.0);
    spe_xt += r.spe_xt.value_or(0.0);
    se_d0 += r.se_d0.value_or(0.0);
    se_dt += r.se_dt.value_or(0.0);
    ++count;
  }

  MetricsRow Average(Strategy s) const {
    const double c = count;
    MetricsRow r;
    r.strategy = s;
    r.mspe_x0 = mspe / c;
    r.log_det = log_det / c;
    r.spe_x0 = spe_x0 / c;
    r.spe_xt = spe_xt / c;
    r.se_d0 = se_d0 / c;
    r.se_dt = se_dt / c;
    return r;
  }
};

}  // namespace

StudyResult RunStudy(const StudyConfig& cfg) {
  ValidateStudyConfig(cfg);

  const HoldoutSets holdout = StudyHoldout(cfg);
  const PredictionSet prediction(holdout.prediction.x);

  MetricsInputs inputs;
  inputs.prediction = &prediction;
  inputs.y_prediction = &holdout.y_prediction;
  inputs.x_test = &holdout.test.x;
  inputs.y_test = &holdout.y_test;
  inputs.sigma_true = cfg.sigma_main;
  inputs.beta_true = &cfg.beta_main;

  CriterionConfig base;
  base.nu1 = cfg.nu1;
  base.nu2 = cfg.nu2;
  base.n_tilde = cfg.n_tilde;
  base.t_max = cfg.t_max;

  std::array<Accumulator, 5> acc;
  StudyResult result;
  for (int h = 0; h < cfg.datasets; ++h) {
    const auto hh = static_cast<std::uint64_t>(h);
    const StudyDesign design = StudyDesignFor(cfg, h);
    for (int s = 0; s < cfg.responses; ++s) {
      const auto ss = static_cast<std::uint64_t>(s);
      const Dataset data(design.x, StudyResponseFor(cfg, design, h, s));

      Rng init_rng = MakeStream(cfg.seed, {kInitStream, hh, ss});
      const InitResult init = InitSample(data, cfg.n, base, init_rng);

      StudyCell cell;
      cell.h = h;
      cell.s = s;
      for (std::size_t k = 0; k < kAllStrategies.size(); ++k) {
        const Strategy strategy = kAllStrategies[k];
        Fnv1a digest;
        if (strategy == Strategy::kSrs) {
          Accumulator srs;
          for (int r = 0; r < cfg.srs_replicates; ++r) {
            Rng rng = MakeStream(cfg.seed, {kSrsStream, hh, ss,
                                            static_cast<std::uint64_t>(r)});
            const std::vector<Index> sample = Srs(data, cfg.n, rng);
            digest.Update(sample);
            MetricsRow row =
                ComputeMetrics(data, sample, FitOls(data, sample), inputs);
            srs.Add(row);
            acc[k].Add(row);
          }
          cell.rows[k] = srs.Average(strategy);
        } else {
          CriterionConfig c = base;
          const bool is_i = strategy == Strategy::kNonInfI ||
                            strategy == Strategy::kInfI;
          const bool informative =
              strategy == Strategy::kInfI || strategy == Strategy::kInfD;
          c.kind = is_i ? Criterion::kI : Criterion::kD;
          if (is_i) c.prediction_set = prediction;
          Rng rng = MakeStream(cfg.seed, {kStrategyStream, hh, ss, k});
          const SamplerResult run =
              informative ? RunInformative(data, cfg.n, c, init.sample, rng)
                          : RunExchange(data, cfg.n, c, init.sample, rng);
          digest.Update(run.sample);
          MetricsRow row = ComputeMetrics(data, run.sample,
                                          FitOls(data, run.sample), inputs);
          row.strategy = strategy;
          cell.rows[k] = row;
          acc[k].Add(row);
        }
        cell.checksums[k] = digest.hex();
      }
      result.cells.push_back(std::move(cell));
    }
  }
  for (std::size_t k = 0; k < kAllStrategies.size(); ++k) {
    result.averages[k] = acc[k].Average(kAllStrategies[k]);
  }
  return result;
}

}  // namespace robsub
