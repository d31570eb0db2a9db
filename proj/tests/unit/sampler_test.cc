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

#include "robsub/sampler.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "robsub/diagnostics.h"
#include "robsub/error.h"
#include "robsub/simulation.h"

namespace robsub {
namespace {

using testing::GramInverseOf;
using testing::HatDiagonal;
using testing::RandomDataset;
using testing::Rows;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected robsub::Error";
  return ErrorCode::kIoError;
}

bool Contains(const std::vector<Index>& s, Index r) {
  return std::find(s.begin(), s.end(), r) != s.end();
}

std::size_t CountIn(const std::vector<Index>& s,
                    const std::vector<Index>& rows) {
  std::size_t c = 0;
  for (Index r : rows) c += Contains(s, r);
  return c;
}

// Bulk rows x ~ N(0, 1) with a block of planted rows far outside the bulk.
MarkedDataset ExtremeRows(Index n_rows, Index n_out, Rng& rng) {
  std::normal_distribution<double> z;
  RowMatrix f(n_rows, 1);
  Vector y(n_rows);
  for (Index i = 0; i < n_rows; ++i) {
    const bool planted = i >= n_rows - n_out;
    const double sign = i % 2 ? 1.0 : -1.0;
    f(i, 0) = planted ? sign * (12.0 + static_cast<double>(i % 7)) : z(rng);
    y(i) = 1.0 + 2.0 * f(i, 0) + z(rng);
  }
  MarkedDataset out{Dataset::WithIntercept(f, std::move(y)), {}};
  for (Index i = n_rows - n_out; i < n_rows; ++i) out.planted.push_back(i);
  return out;
}

void ExpectWellFormed(const SamplerResult& r, Index n, Index n_rows) {
  ASSERT_EQ(static_cast<Index>(r.sample.size()), n);
  EXPECT_TRUE(std::is_sorted(r.sample.begin(), r.sample.end()));
  EXPECT_EQ(std::set<Index>(r.sample.begin(), r.sample.end()).size(),
            r.sample.size());
  EXPECT_TRUE(r.sample.front() >= 0 && r.sample.back() < n_rows);
  Index last_closed = -1;
  std::set<Index> accepted;
  for (const ExchangeTrace& rec : r.trace) {
    if (rec.status == TraceStatus::kRejectedCook) {
      EXPECT_GT(rec.iteration, last_closed);
      continue;
    }
    EXPECT_GT(rec.iteration, last_closed);
    last_closed = rec.iteration;
    if (rec.status == TraceStatus::kAccepted) {
      EXPECT_TRUE(rec.added.has_value());
      EXPECT_TRUE(accepted.insert(rec.iteration).second);
    }
  }
  for (const RebuildReport& rb : r.rebuilds) {
    EXPECT_LT(rb.drift, kMaxRebuildDrift);
  }
}

// Replays accepted exchanges from `s0`, checking against dense recomputation.
struct Replay {
  std::vector<Index> sample;
  int accepted = 0;
};

Replay ReplayTrace(const Dataset& d, std::vector<Index> s0,
                   const std::vector<ExchangeTrace>& trace,
                   const CriterionConfig& cfg,
                   const std::function<void(const std::vector<Index>&,
                                            const std::vector<Index>&,
                                            const ExchangeTrace&)>& check) {
  Replay out{std::move(s0), 0};
  for (const ExchangeTrace& rec : trace) {
    if (rec.status != TraceStatus::kAccepted) continue;
    auto it = std::find(out.sample.begin(), out.sample.end(), rec.removed);
    EXPECT_NE(it, out.sample.end());
    if (it == out.sample.end()) break;
    std::vector<Index> after = out.sample;
    after[static_cast<std::size_t>(it - out.sample.begin())] = *rec.added;
    check(out.sample, after, rec);
    out.sample = std::move(after);
    ++out.accepted;
  }
  (void)cfg;
  return out;
}

double LeverageIn(const Dataset& d, const std::vector<Index>& s, Index row) {
  const Matrix inv = GramInverseOf(Rows(d, s));
  const Vector x = d.row(row);
  return x.dot(inv * x);
}

TEST(InitSampleTest, NoHighLeverageReturnsSrs) {
  const Dataset d(RowMatrix::Ones(200, 1));
  CriterionConfig cfg;
  Rng a = MakeStream(1, {});
  Rng b = MakeStream(1, {});
  const InitResult r = InitSample(d, 20, cfg, a);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations_run, 0);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.sample, SampleWithoutReplacement(200, 20, b));
}

TEST(InitSampleTest, ExcludesExtremeRows) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng gen = MakeStream(seed, {0});
    const MarkedDataset md = ExtremeRows(10000, 10, gen);
    // Ensure at least one planted row starts in the sample.
    CriterionConfig cfg;
    cfg.seed = seed;
    for (std::uint64_t s = 0;; ++s) {
      Rng probe = MakeStream(s, {1});
      if (CountIn(SampleWithoutReplacement(10000, 100, probe), md.planted)) {
        Rng rng = MakeStream(s, {1});
        const InitResult r = InitSample(md.data, 100, cfg, rng);
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(CountIn(r.sample, md.planted), 0u);
        EXPECT_LT(r.max_leverage, 3.0 * 2 / 100);
        break;
      }
    }
  }
}

TEST(InitSampleTest, Example1ReachesLeverageBound) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng gen = MakeStream(seed, {0});
    const MarkedDataset md = GenerateExample1(10000, 10, gen);
    CriterionConfig cfg;
    Rng rng = MakeStream(seed, {1});
    const InitResult r = InitSample(md.data, 100, cfg, rng);
    ASSERT_TRUE(r.converged);
    const GramState st = GramState::Build(md.data, r.sample);
    EXPECT_LT(SampleLeverages(st, md.data).maxCoeff(), 0.06);
    EXPECT_NEAR(r.max_leverage, SampleLeverages(st, md.data).maxCoeff(), 1e-10);
  }
}

TEST(InitSampleTest, TraceAuditReplays) {
  Rng gen = MakeStream(2, {});
  const MarkedDataset md = ExtremeRows(5000, 40, gen);
  CriterionConfig cfg;
  Rng rng = MakeStream(3, {});
  Rng probe = MakeStream(3, {});
  const std::vector<Index> s0 = SampleWithoutReplacement(5000, 200, probe);
  const InitResult r = InitSample(md.data, 200, cfg, rng);
  const double bound = 3.0 * 2 / 200;
  const Replay rep = ReplayTrace(
      md.data, s0, r.trace, cfg,
      [&](const std::vector<Index>& before, const std::vector<Index>& after,
          const ExchangeTrace& rec) {
        const Vector h = HatDiagonal(Rows(md.data, before));
        const auto pos = std::find(before.begin(), before.end(), rec.removed) -
                         before.begin();
        EXPECT_NEAR(h(pos), h.maxCoeff(), 1e-12);
        const double lev = LeverageIn(md.data, after, *rec.added);
        EXPECT_LT(lev, bound);
        EXPECT_NEAR(lev, rec.swap_leverage, 1e-9);
      });
  EXPECT_GT(rep.accepted, 0);
  EXPECT_EQ(rep.sample, r.sample);
}

TEST(InitSampleTest, UnreachableBoundWarnsOrFails) {
  Rng gen = MakeStream(4, {});
  const Dataset d = RandomDataset(500, 3, gen);
  CriterionConfig cfg;
  cfg.nu2 = 1.0;  // max leverage below the mean leverage is impossible
  cfg.t_max = 5;
  Rng a = MakeStream(5, {});
  const InitResult r = InitSample(d, 50, cfg, a);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.warnings.empty());
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.back().status, TraceStatus::kTerminated);
  cfg.strict_init = true;
  Rng b = MakeStream(5, {});
  EXPECT_EQ(CodeOf([&] { InitSample(d, 50, cfg, b); }), ErrorCode::kInitFailed);
}

TEST(RunExchangeTest, ExchangeableRowsConvergeImmediately) {
  const Dataset d(RowMatrix::Ones(300, 1));
  CriterionConfig cfg;
  Rng rng = MakeStream(6, {});
  const SamplerResult r =
      RunExchange(d, 30, cfg, SampleWithoutReplacement(300, 30, rng), rng);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations_run, 1);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].iteration, 0);
  EXPECT_EQ(r.trace[0].status, TraceStatus::kNoCandidates);
}

TEST(RunExchangeTest, LeverageBoundExcludesExtremeRows) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng gen = MakeStream(seed, {7});
    const MarkedDataset md = ExtremeRows(10000, 10, gen);
    CriterionConfig cfg;
    cfg.n_tilde = 10000 - 100;
    cfg.seed = seed;
    const PipelineResult bounded = SelectSample(md.data, 100, cfg, false);
    EXPECT_EQ(CountIn(bounded.result.sample, md.planted), 0u);
    cfg.nu1 = kInfiniteNu;
    const PipelineResult free = SelectSample(md.data, 100, cfg, false);
    EXPECT_EQ(CountIn(free.result.sample, md.planted), 10u);
    ExpectWellFormed(free.result, 100, 10000);
    EXPECT_GT(free.result.final_log_det, bounded.result.final_log_det);
  }
}

TEST(RunExchangeTest, MonotoneTraceAudit) {
  Rng gen = MakeStream(8, {});
  const StudyDesign design = GenerateStudyX(5000, 25, gen);
  const Dataset d(design.x);
  CriterionConfig cfg;
  cfg.seed = 9;
  Rng rng = MakeStream(9, {});
  const InitResult init = InitSample(d, 500, cfg, rng);
  const SamplerResult r = RunExchange(d, 500, cfg, init.sample, rng);
  ExpectWellFormed(r, 500, 5000);
  double last_log_det = -std::numeric_limits<double>::infinity();
  const Replay rep = ReplayTrace(
      d, init.sample, r.trace, cfg,
      [&](const std::vector<Index>& before, const std::vector<Index>& after,
          const ExchangeTrace& rec) {
        const double h_before = LeverageIn(d, before, rec.removed);
        const double h_after = LeverageIn(d, after, *rec.added);
        EXPECT_GT(h_after, h_before);
        EXPECT_LT(h_after, 0.044);
        EXPECT_NEAR(h_after, rec.swap_leverage, 1e-9);
        EXPECT_NEAR(h_before, rec.removed_leverage, 1e-9);
        const Vector hb = HatDiagonal(Rows(d, before));
        EXPECT_NEAR(h_before, hb.minCoeff(), 1e-12);
        EXPECT_GT(rec.log_det_after, last_log_det);
        last_log_det = rec.log_det_after;
      });
  EXPECT_GT(rep.accepted, 10);
  std::vector<Index> sorted = rep.sample;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, r.sample);
  const Matrix rows = Rows(d, r.sample);
  EXPECT_NEAR(r.final_log_det, testing::DenseLogDet(rows.transpose() * rows),
              1e-8);
  for (const RebuildReport& rb : r.rebuilds) EXPECT_NEAR(rb.leverage_sum, 11.0, 1e-8);
}

TEST(RunExchangeTest, ICriterionDecreasesTrace) {
  Rng gen = MakeStream(10, {});
  const Dataset d = RandomDataset(3000, 4, gen);
  CriterionConfig cfg;
  cfg.kind = Criterion::kI;
  cfg.prediction_set.emplace(testing::RandomPredictionPoints(50, 4, gen));
  cfg.seed = 11;
  const PipelineResult run = SelectSample(d, 100, cfg, false);
  ExpectWellFormed(run.result, 100, 3000);
  const PredictionSet& pred = *cfg.prediction_set;
  double last = testing::PointwiseTrace(Rows(d, run.init.sample), pred.x0());
  const Replay rep = ReplayTrace(
      d, run.init.sample, run.result.trace, cfg,
      [&](const std::vector<Index>&, const std::vector<Index>& after,
          const ExchangeTrace& rec) {
        const double now = testing::PointwiseTrace(Rows(d, after), pred.x0());
        EXPECT_LT(now, last);
        EXPECT_LT(LeverageIn(d, after, *rec.added), 2.0 * 5 / 100);
        last = now;
      });
  EXPECT_GT(rep.accepted, 0);
  ASSERT_TRUE(run.result.final_trace_criterion.has_value());
  EXPECT_NEAR(*run.result.final_trace_criterion, last, 1e-8 * last);
}

TEST(RunExchangeTest, DeterministicUnderSeed) {
  Rng gen = MakeStream(12, {});
  const Dataset d = RandomDataset(2000, 5, gen);
  CriterionConfig cfg;
  cfg.seed = 13;
  const PipelineResult a = SelectSample(d, 80, cfg, false);
  const PipelineResult b = SelectSample(d, 80, cfg, false);
  EXPECT_EQ(a.result.sample, b.result.sample);
  ASSERT_EQ(a.result.trace.size(), b.result.trace.size());
  for (std::size_t i = 0; i < a.result.trace.size(); ++i) {
    EXPECT_EQ(a.result.trace[i].removed, b.result.trace[i].removed);
    EXPECT_EQ(a.result.trace[i].added, b.result.trace[i].added);
    EXPECT_EQ(a.result.trace[i].log_det_after, b.result.trace[i].log_det_after);
  }
  cfg.seed = 14;
  EXPECT_NE(SelectSample(d, 80, cfg, false).result.sample, a.result.sample);
}

TEST(RunExchangeTest, TerminatesAtIterationCap) {
  Rng gen = MakeStream(15, {});
  const Dataset d = RandomDataset(5000, 3, gen);
  CriterionConfig cfg;
  cfg.t_max = 3;
  cfg.nu1 = kInfiniteNu;
  Rng rng = MakeStream(16, {});
  const SamplerResult r =
      RunExchange(d, 200, cfg, SampleWithoutReplacement(5000, 200, rng), rng);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations_run, 3);
  EXPECT_EQ(r.trace.back().status, TraceStatus::kTerminated);
  EXPECT_EQ(r.trace.back().iteration, 3);
}

TEST(RunExchangeTest, WrongInitialSizeRejected) {
  Rng gen = MakeStream(17, {});
  const Dataset d = RandomDataset(100, 2, gen);
  CriterionConfig cfg;
  Rng rng = MakeStream(18, {});
  EXPECT_EQ(CodeOf([&] { RunExchange(d, 10, cfg, {0, 1, 2, 3}, rng); }),
            ErrorCode::kConfigError);
}

TEST(RunInformativeTest, ExactResponsesMatchExchange) {
  Rng gen = MakeStream(19, {});
  const Dataset base = RandomDataset(3000, 3, gen);
  Vector y = 2.0 + base.x().rightCols(3).rowwise().sum().array();
  const Dataset d(base.x(), y);
  CriterionConfig cfg;
  cfg.seed = 20;
  const PipelineResult plain = SelectSample(d, 100, cfg, false);
  const PipelineResult inf = SelectSample(d, 100, cfg, true);
  EXPECT_EQ(plain.result.sample, inf.result.sample);
  EXPECT_EQ(plain.result.trace.size(), inf.result.trace.size());
  for (const ExchangeTrace& rec : inf.result.trace) {
    EXPECT_NE(rec.status, TraceStatus::kRejectedCook);
  }
}

TEST(RunInformativeTest, DisplacedResponseIsInfluential) {
  Rng gen = MakeStream(21, {});
  const Dataset base = RandomDataset(1000, 4, gen, true);
  Rng rng = MakeStream(22, {});
  const std::vector<Index> s = SampleWithoutReplacement(1000, 100, rng);
  const GramState st = GramState::Build(base, s);
  // Outside row whose leverage after swapping in is closest to (k+1)/n.
  Index best = -1;
  double gap = 1e9;
  for (Index j = 0; j < 1000; ++j) {
    if (Contains(s, j)) continue;
    const double h = SwapLeverage(st, base.row(s[0]), base.row(j));
    if (std::abs(h - 0.05) < gap) {
      gap = std::abs(h - 0.05);
      best = j;
    }
  }
  Vector y = base.y();
  y(best) += 50.0;  // residual scale is 1
  const Dataset d(base.x(), y);
  std::vector<Index> tentative = s;
  tentative[0] = best;
  const double cook =
      CooksDistanceAt(d, tentative, GramInverseOf(Rows(d, tentative)), 0);
  const double oracle = testing::LeaveOneOutCook(
      Rows(d, tentative), testing::Responses(d, tentative), 0);
  EXPECT_LT(testing::RelativeError(cook, oracle), 1e-8);
  EXPECT_GT(cook, 4.0 / 100);
}

TEST(RunInformativeTest, RejectsOutliersAndRecordsCook) {
  Rng gen = MakeStream(23, {});
  std::normal_distribution<double> z;
  const Index n_rows = 4000;
  RowMatrix f = testing::StandardNormal(n_rows, 2, gen);
  Vector y(n_rows);
  std::vector<Index> displaced;
  for (Index i = 0; i < n_rows; ++i) {
    y(i) = 1.0 + f(i, 0) - f(i, 1) + z(gen);
    // Edge-of-bulk rows are the ones the criterion wants to add.
    if (f.row(i).norm() > 2.0 && i % 2 == 0) {
      y(i) += 50.0;
      displaced.push_back(i);
    }
  }
  const Dataset d = Dataset::WithIntercept(f, y);
  CriterionConfig cfg;
  cfg.seed = 24;
  const PipelineResult run = SelectSample(d, 100, cfg, true);
  ExpectWellFormed(run.result, 100, n_rows);
  int rejected = 0;
  const Replay rep = ReplayTrace(
      d, run.init.sample, run.result.trace, cfg,
      [&](const std::vector<Index>&, const std::vector<Index>& after,
          const ExchangeTrace& rec) {
        EXPECT_LT(rec.cook_distance, 4.0 / 100);
        const auto pos =
            std::find(after.begin(), after.end(), *rec.added) - after.begin();
        const double oracle = testing::LeaveOneOutCook(
            Rows(d, after), testing::Responses(d, after), pos);
        EXPECT_NEAR(rec.cook_distance, oracle, 1e-8 * std::max(oracle, 1e-6));
        EXPECT_FALSE(std::binary_search(displaced.begin(), displaced.end(),
                                        *rec.added));
      });
  for (const ExchangeTrace& rec : run.result.trace) {
    if (rec.status == TraceStatus::kRejectedCook) {
      ++rejected;
      EXPECT_GE(rec.cook_distance, 4.0 / 100);
    }
  }
  EXPECT_GT(rep.accepted, 0);
  EXPECT_GT(rejected, 0);
}

TEST(RunInformativeTest, RequiresResponse) {
  Rng gen = MakeStream(25, {});
  const Dataset d = RandomDataset(100, 2, gen);
  CriterionConfig cfg;
  EXPECT_EQ(CodeOf([&] { SelectSample(d, 10, cfg, true); }),
            ErrorCode::kMissingResponse);
}

}  // namespace
}  // namespace robsub
