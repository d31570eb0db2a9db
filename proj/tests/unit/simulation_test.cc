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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "robsub/error.h"
#include "robsub/sampler.h"

namespace robsub {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected robsub::Error";
  return ErrorCode::kIoError;
}

double Mean(const Vector& v) { return v.mean(); }

double Cov(const Vector& a, const Vector& b) {
  const double n = static_cast<double>(a.size());
  return ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / (n - 1);
}

TEST(Example1Test, DefaultPlantedIndices) {
  Rng rng = MakeStream(1, {});
  const MarkedDataset md = GenerateExample1(10000, 10, rng);
  ASSERT_EQ(md.planted.size(), 10u);
  for (Index i = 0; i < 10; ++i) {
    EXPECT_EQ(md.planted[static_cast<std::size_t>(i)], 9990 + i);
  }
  EXPECT_EQ(md.data.n_rows(), 10000);
  EXPECT_EQ(md.data.n_factors(), 1);
  EXPECT_TRUE(md.data.has_response());
}

TEST(Example1Test, HomogeneousWithoutPlantedRows) {
  Rng rng = MakeStream(2, {});
  EXPECT_TRUE(GenerateExample1(500, 0, rng).planted.empty());
}

TEST(Example1Test, BulkMoments) {
  Rng rng = MakeStream(3, {});
  const Index n = 100000;
  const MarkedDataset md = GenerateExample1(n, 0, rng);
  const Vector x = md.data.x().col(1);
  EXPECT_LT(std::abs(Mean(x) - 3.0), 5.0 * 2.0 / std::sqrt(double(n)));
  EXPECT_NEAR(Cov(x, x), 4.0, 5.0 * 4.0 * std::sqrt(2.0 / double(n)));
  const Vector beta = testing::QrSolve(Matrix(md.data.x()), md.data.y());
  EXPECT_NEAR(beta(1), 2.7, 0.05);
}

TEST(Example1Test, InvalidSizes) {
  Rng rng = MakeStream(4, {});
  EXPECT_EQ(CodeOf([&] { GenerateExample1(0, 0, rng); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { GenerateExample1(10, 10, rng); }),
            ErrorCode::kConfigError);
}

TEST(StudyDesignTest, ColumnDistributions) {
  Rng rng = MakeStream(5, {});
  const Index n = 100000;
  const StudyDesign d = GenerateStudyX(n, 0, rng);
  ASSERT_EQ(d.x.cols(), 11);
  EXPECT_TRUE(d.planted.empty());
  EXPECT_TRUE((d.x.col(0).array() == 1.0).all());
  for (int j = 1; j <= 3; ++j) {
    EXPECT_GE(d.x.col(j).minCoeff(), 0.0);
    EXPECT_LE(d.x.col(j).maxCoeff(), 5.0);
    EXPECT_LT(std::abs(Mean(d.x.col(j)) - 2.5),
              5.0 * std::sqrt(25.0 / 12.0 / double(n)));
  }
  const double var_se = 9.0 * std::sqrt(2.0 / double(n));
  const double cov_se = std::sqrt((81.0 + 1.0) / double(n));
  for (int j : {4, 6}) {
    const Vector a = d.x.col(j);
    const Vector b = d.x.col(j + 1);
    EXPECT_NEAR(Cov(a, a), 9.0, 5.0 * var_se);
    EXPECT_NEAR(Cov(b, b), 9.0, 5.0 * var_se);
    EXPECT_NEAR(Cov(a, b), -1.0, 5.0 * cov_se);
  }
  // Blocks are independent of each other.
  EXPECT_NEAR(Cov(d.x.col(4), d.x.col(6)), 0.0, 5.0 * 9.0 / std::sqrt(double(n)));
  const Vector pois = d.x.col(10);
  EXPECT_LT(std::abs(Mean(pois) - 5.0), 5.0 * std::sqrt(5.0 / double(n)));
  EXPECT_TRUE((pois.array() == pois.array().round()).all());
  // Heavy-tailed block: t3 has variance 3 times its scale.
  const Vector t = d.x.col(8);
  std::vector<double> sorted(t.data(), t.data() + t.size());
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  EXPECT_NEAR(median, 0.0, 0.02);
  EXPECT_GT(t.cwiseAbs().maxCoeff(), 20.0);
}

TEST(StudyDesignTest, PlantedRowsUseWiderCovariance) {
  Rng rng = MakeStream(6, {});
  const Index n = 40000;
  const StudyDesign d = GenerateStudyX(n, n / 2, rng);
  ASSERT_EQ(d.planted.size(), static_cast<std::size_t>(n / 2));
  EXPECT_EQ(d.planted.front(), n / 2);
  const Vector planted = d.x.col(4).tail(n / 2);
  const Vector bulk = d.x.col(4).head(n / 2);
  EXPECT_NEAR(Cov(planted, planted), 25.0, 5.0 * 25.0 * std::sqrt(2.0 / (n / 2)));
  EXPECT_NEAR(Cov(bulk, bulk), 9.0, 5.0 * 9.0 * std::sqrt(2.0 / (n / 2)));
  EXPECT_NEAR(Cov(d.x.col(6).tail(n / 2), d.x.col(7).tail(n / 2)), 1.0, 0.5);
}

TEST(StudyResponseTest, NoiselessRecoversBeta) {
  StudyConfig cfg = DefaultStudyConfig();
  cfg.sigma_main = 0.0;
  Rng rng = MakeStream(7, {});
  const StudyDesign d = GenerateStudyX(2000, 0, rng);
  const Vector y = GenerateStudyY(d, cfg, rng);
  const Vector beta = testing::QrSolve(Matrix(d.x), y);
  EXPECT_LT((beta - cfg.beta_main).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(StudyResponseTest, BulkResidualScale) {
  const StudyConfig cfg = DefaultStudyConfig();
  Rng rng = MakeStream(8, {});
  const StudyDesign d = GenerateStudyX(100000, 0, rng);
  const Vector y = GenerateStudyY(d, cfg, rng);
  const Matrix x = d.x;
  const Vector r = y - x * testing::QrSolve(x, y);
  EXPECT_NEAR(std::sqrt(r.squaredNorm() / (100000 - 11)), 3.0, 0.05);
}

TEST(StudyResponseTest, PlantedRowsFollowOutlierModel) {
  const StudyConfig cfg = DefaultStudyConfig();
  Rng rng = MakeStream(9, {});
  const StudyDesign d = GenerateStudyX(5000, 500, rng);
  const Vector y = GenerateStudyY(d, cfg, rng);
  const Matrix xp = d.x.bottomRows(500);
  const Vector yp = y.tail(500);
  const double to_main = (yp - xp * cfg.beta_main).squaredNorm() / 500;
  const double to_out = (yp - xp * cfg.beta_out).squaredNorm() / 500;
  EXPECT_NEAR(to_out, 400.0, 80.0);
  EXPECT_GT(to_main, 2.0 * to_out);
}

TEST(StudyConfigTest, Validation) {
  StudyConfig cfg = DefaultStudyConfig();
  EXPECT_NO_THROW(ValidateStudyConfig(cfg));
  cfg.n_rows = 0;
  EXPECT_EQ(CodeOf([&] { ValidateStudyConfig(cfg); }), ErrorCode::kConfigError);
  cfg = DefaultStudyConfig();
  cfg.n = 11;
  EXPECT_EQ(CodeOf([&] { ValidateStudyConfig(cfg); }), ErrorCode::kConfigError);
  cfg = DefaultStudyConfig();
  cfg.beta_out.resize(3);
  EXPECT_EQ(CodeOf([&] { ValidateStudyConfig(cfg); }), ErrorCode::kConfigError);
}

TEST(StudyHoldoutTest, Uncontaminated) {
  StudyConfig cfg = DefaultStudyConfig();
  cfg.n_prediction = 300;
  cfg.n_test = 200;
  const HoldoutSets h = StudyHoldout(cfg);
  EXPECT_TRUE(h.prediction.planted.empty());
  EXPECT_TRUE(h.test.planted.empty());
  EXPECT_EQ(h.prediction.x.rows(), 300);
  EXPECT_EQ(h.y_test.size(), 200);
}

struct MetricsFixture {
  Dataset data;
  PredictionSet prediction;
  Vector y_prediction;
  RowMatrix x_test;
  Vector y_test;
  Vector beta;
};

MetricsFixture MakeMetricsFixture(double sigma) {
  StudyConfig cfg = DefaultStudyConfig();
  cfg.sigma_main = sigma;
  Rng rng = MakeStream(10, {});
  const StudyDesign d = GenerateStudyX(3000, 0, rng);
  Vector y = GenerateStudyY(d, cfg, rng);
  const StudyDesign p = GenerateStudyX(100, 0, rng);
  Vector yp = GenerateStudyY(p, cfg, rng);
  const StudyDesign t = GenerateStudyX(80, 0, rng);
  Vector yt = GenerateStudyY(t, cfg, rng);
  return {Dataset(d.x, std::move(y)), PredictionSet(p.x), std::move(yp), t.x,
          std::move(yt), cfg.beta_main};
}

MetricsInputs AllInputs(const MetricsFixture& f) {
  MetricsInputs in;
  in.prediction = &f.prediction;
  in.y_prediction = &f.y_prediction;
  in.x_test = &f.x_test;
  in.y_test = &f.y_test;
  in.sigma_true = 3.0;
  in.beta_true = &f.beta;
  return in;
}

TEST(ComputeMetricsTest, ExactCoefficientsGiveZeroSpe) {
  const MetricsFixture f = MakeMetricsFixture(0.0);
  Rng rng = MakeStream(11, {});
  const std::vector<Index> s = Srs(f.data, 100, rng);
  const MetricsRow row = ComputeMetrics(f.data, s, FitOls(f.data, s), AllInputs(f));
  EXPECT_NEAR(*row.spe_x0, 0.0, 1e-18);
  EXPECT_NEAR(*row.spe_xt, 0.0, 1e-18);
  EXPECT_NEAR(*row.se_d0, 0.0, 1e-18);
}

TEST(ComputeMetricsTest, TraceIdentityAndLogDet) {
  const MetricsFixture f = MakeMetricsFixture(3.0);
  Rng rng = MakeStream(12, {});
  const std::vector<Index> s = Srs(f.data, 200, rng);
  const MetricsRow row = ComputeMetrics(f.data, s, FitOls(f.data, s), AllInputs(f));
  const Matrix rows = testing::Rows(f.data, s);
  const double pointwise = testing::PointwiseTrace(rows, f.prediction.x0());
  EXPECT_NEAR(100.0 * *row.mspe_x0 / 9.0, pointwise, 1e-9);
  EXPECT_NEAR(row.log_det, testing::DenseLogDet(rows.transpose() * rows), 1e-8);
  // Direct evaluation of the squared-error metrics.
  const Vector beta_hat = testing::QrSolve(rows, testing::Responses(f.data, s));
  const Matrix x0 = f.prediction.x0();
  const Matrix xt = f.x_test;
  EXPECT_NEAR(*row.spe_x0, (x0 * (beta_hat - f.beta)).squaredNorm() / 100, 1e-9);
  EXPECT_NEAR(*row.spe_xt, (xt * (beta_hat - f.beta)).squaredNorm() / 80, 1e-9);
  EXPECT_NEAR(*row.se_d0, (x0 * beta_hat - f.y_prediction).squaredNorm() / 100,
              1e-8);
  EXPECT_NEAR(*row.se_dt, (xt * beta_hat - f.y_test).squaredNorm() / 80, 1e-8);
}

TEST(ComputeMetricsTest, OmitsMetricsWithoutInputs) {
  const MetricsFixture f = MakeMetricsFixture(3.0);
  Rng rng = MakeStream(13, {});
  const std::vector<Index> s = Srs(f.data, 100, rng);
  MetricsInputs in;
  in.prediction = &f.prediction;
  const MetricsRow row = ComputeMetrics(f.data, s, std::nullopt, in);
  EXPECT_FALSE(row.mspe_x0);
  ASSERT_TRUE(row.trace_x0);
  EXPECT_FALSE(row.spe_x0 || row.spe_xt || row.se_d0 || row.se_dt);
}

TEST(ComputeMetricsTest, PureFunction) {
  const MetricsFixture f = MakeMetricsFixture(3.0);
  Rng rng = MakeStream(14, {});
  const std::vector<Index> s = Srs(f.data, 100, rng);
  const MetricsRow a = ComputeMetrics(f.data, s, FitOls(f.data, s), AllInputs(f));
  const MetricsRow b = ComputeMetrics(f.data, s, FitOls(f.data, s), AllInputs(f));
  EXPECT_EQ(a.mspe_x0, b.mspe_x0);
  EXPECT_EQ(a.log_det, b.log_det);
  EXPECT_EQ(a.se_dt, b.se_dt);
}

TEST(ComputeMetricsTest, SingularSample) {
  RowMatrix f(20, 1);
  f.setZero();
  f(0, 0) = 1.0;
  const Dataset d = Dataset::WithIntercept(f, Vector::Zero(20));
  const std::vector<Index> s = {1, 2, 3, 4};
  EXPECT_EQ(CodeOf([&] { ComputeMetrics(d, s, std::nullopt, {}); }),
            ErrorCode::kSingularGram);
}

StudyConfig SmallStudy() {
  StudyConfig cfg = DefaultStudyConfig();
  cfg.n_rows = 2000;
  cfg.n_planted = 20;
  cfg.datasets = 1;
  cfg.responses = 1;
  cfg.n = 100;
  cfg.n_prediction = 100;
  cfg.n_test = 100;
  cfg.srs_replicates = 3;
  return cfg;
}

TEST(RunStudyTest, SmokeAllFinite) {
  const StudyResult r = RunStudy(SmallStudy());
  ASSERT_EQ(r.cells.size(), 1u);
  for (std::size_t k = 0; k < 5; ++k) {
    const MetricsRow& row = r.averages[k];
    EXPECT_EQ(row.strategy, kAllStrategies[k]);
    for (const auto& v : {row.mspe_x0, row.spe_x0, row.spe_xt, row.se_d0,
                          row.se_dt}) {
      ASSERT_TRUE(v.has_value());
      EXPECT_TRUE(std::isfinite(*v));
    }
    EXPECT_TRUE(std::isfinite(row.log_det));
    EXPECT_EQ(r.cells[0].checksums[k].size(), 16u);
  }
}

TEST(RunStudyTest, Deterministic) {
  const StudyResult a = RunStudy(SmallStudy());
  const StudyResult b = RunStudy(SmallStudy());
  EXPECT_EQ(a.cells[0].checksums, b.cells[0].checksums);
  EXPECT_EQ(a.averages[0].mspe_x0, b.averages[0].mspe_x0);
  StudyConfig other = SmallStudy();
  other.seed = 99;
  EXPECT_NE(RunStudy(other).cells[0].checksums, a.cells[0].checksums);
}

TEST(RunStudyTest, UncontaminatedStrategiesAgree) {
  StudyConfig cfg = SmallStudy();
  cfg.n_planted = 0;
  cfg.n_rows = 5000;
  cfg.responses = 2;
  const StudyResult r = RunStudy(cfg);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const MetricsRow& row : r.averages) {
    lo = std::min(lo, *row.spe_x0);
    hi = std::max(hi, *row.spe_x0);
  }
  EXPECT_LT(hi, 3.0 * lo);
}

// Planted rows from the initial sample, or with bulk-like responses, can
// remain in the informative sample.
TEST(RunStudyTest, InformativeDKeepsFewerPlantedRows) {
  std::size_t informative = 0;
  std::size_t plain = 0;
  for (int seed = 1; seed <= 3; ++seed) {
    StudyConfig cfg = DefaultStudyConfig();
    cfg.n_rows = 20000;
    cfg.n_planted = 50;
    cfg.seed = static_cast<std::uint64_t>(seed);
    const StudyDesign design = StudyDesignFor(cfg, 0);
    const Dataset data(design.x, StudyResponseFor(cfg, design, 0, 0));
    CriterionConfig c;
    c.seed = static_cast<std::uint64_t>(seed);
    const PipelineResult inf = SelectSample(data, 300, c, true);
    const PipelineResult base = SelectSample(data, 300, c, false);
    for (Index r : design.planted) {
      const auto& si = inf.result.sample;
      const auto& sp = base.result.sample;
      informative += std::binary_search(si.begin(), si.end(), r);
      plain += std::binary_search(sp.begin(), sp.end(), r);
    }
  }
  EXPECT_GT(plain, 0u);
  EXPECT_LT(3 * informative, plain);
}

}  // namespace
}  // namespace robsub
