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
#include <string>

#include "robsub/diagnostics.h"
#include "robsub/error.h"

namespace robsub {
namespace {

std::vector<char> Membership(Index n_rows, const std::vector<Index>& sample) {
  std::vector<char> in(static_cast<std::size_t>(n_rows), 0);
  for (Index i : sample) in[static_cast<std::size_t>(i)] = 1;
  return in;
}

void RequireSize(const std::vector<Index>& s0, Index n) {
  if (static_cast<Index>(s0.size()) != n) {
    throw Error(ErrorCode::kConfigError,
                "initial sample has " + std::to_string(s0.size()) +
                    " units, expected " + std::to_string(n));
  }
}

struct Admitted {
  Index row;
  CandidateScore score;
};

// Larger addition score first; ties go to the lower row index.
bool BetterCandidate(const Admitted& a, const Admitted& b) {
  if (a.score.addition_score != b.score.addition_score) {
    return a.score.addition_score > b.score.addition_score;
  }
  return a.row < b.row;
}

void MaybeRebuild(GramState& state, const Dataset& data, int period,
                  std::vector<RebuildReport>& reports) {
  RebuildReport report = RebuildIfDrifting(state, data, period);
  if (report.rebuilt) reports.push_back(report);
}

SamplerResult RunLoop(const Dataset& data, Index n, const CriterionConfig& cfg,
                      std::vector<Index> s0, Rng& rng, bool informative) {
  SamplerResult result;
  result.warnings = ValidateConfig(cfg, data, n);
  RequireSize(s0, n);
  if (informative) {
    data.y();
    if (n <= data.n_params()) {
      throw Error(ErrorCode::kInsufficientDoF,
                  "informative sampling needs n > k+1");
    }
  }

  const Index n_rows = data.n_rows();
  const Index n_tilde = ResolvedNTilde(cfg, n_rows, n);
  const Index t_max = ResolvedTMax(cfg, n);
  const double cook_threshold = CookThreshold(cfg, n);

  GramState state = GramState::Build(data, std::move(s0));
  std::vector<char> in_sample = Membership(n_rows, state.sample());
  std::vector<Index> tentative;
  std::vector<Admitted> admitted;

  for (Index t = 0; t < t_max; ++t) {
    std::size_t pos_m = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < state.sample().size(); ++pos) {
      const Index row = state.sample()[pos];
      const double score = DeletionScore(state, data.row(row), cfg);
      if (score < best ||
          (score == best && row < state.sample()[pos_m])) {
        best = score;
        pos_m = pos;
      }
    }
    const Index row_m = state.sample()[pos_m];
    const auto x_m = data.row(row_m);
    const ExchangeScorer scorer(state, x_m, cfg);

    const std::vector<Index> pool =
        SampleOutside(in_sample, n_rows - n, n_tilde, rng);
    admitted.clear();
    for (Index j : pool) {
      const CandidateScore s = scorer.Score(data.row(j));
      if (s.degenerate) {
        ++result.degenerate_candidates;
      } else if (s.admitted) {
        admitted.push_back({j, s});
      }
    }

    ExchangeTrace record;
    record.iteration = t;
    record.removed = row_m;
    record.removed_score = scorer.removed_score();
    record.removed_leverage = scorer.removed_leverage();
    record.upper_bound = scorer.upper_bound();
    result.iterations_run = t + 1;

    if (admitted.empty()) {
      record.status = TraceStatus::kNoCandidates;
      record.log_det_after = state.log_det();
      result.trace.push_back(record);
      result.converged = true;
      break;
    }

    std::sort(admitted.begin(), admitted.end(), BetterCandidate);
    bool accepted = false;
    for (const Admitted& cand : admitted) {
      const auto x_j = data.row(cand.row);
      SwapInverseResult swapped = SwapInverse(state, x_m, x_j);
      ExchangeTrace attempt = record;
      attempt.added = cand.row;
      attempt.added_score = cand.score.addition_score;
      attempt.swap_leverage = cand.score.swap_leverage;
      attempt.filter_score = cand.score.filter_score;
      if (informative) {
        tentative = state.sample();
        tentative[pos_m] = cand.row;
        attempt.cook_distance = CooksDistanceAt(
            data, tentative, swapped.inv, static_cast<Index>(pos_m));
        if (!(attempt.cook_distance < cook_threshold)) {
          attempt.status = TraceStatus::kRejectedCook;
          attempt.log_det_after = state.log_det();
          result.trace.push_back(attempt);
          continue;
        }
      }
      state.ApplySwap(pos_m, cand.row, std::move(swapped.inv), swapped.d);
      in_sample[static_cast<std::size_t>(row_m)] = 0;
      in_sample[static_cast<std::size_t>(cand.row)] = 1;
      attempt.status = TraceStatus::kAccepted;
      attempt.log_det_after = state.log_det();
      result.trace.push_back(attempt);
      MaybeRebuild(state, data, cfg.rebuild_period, result.rebuilds);
      accepted = true;
      break;
    }
    if (!accepted) {
      record.status = TraceStatus::kNoCandidates;
      record.log_det_after = state.log_det();
      result.trace.push_back(record);
    }
  }

  if (!result.converged) {
    ExchangeTrace last;
    last.iteration = t_max;
    last.status = TraceStatus::kTerminated;
    last.log_det_after = state.log_det();
    result.trace.push_back(last);
  }

  result.final_log_det = state.log_det();
  if (cfg.kind == Criterion::kI) {
    result.final_trace_criterion =
        TraceCriterion(state.gram_inv(), *cfg.prediction_set);
  }
  result.sample = state.sample();
  std::sort(result.sample.begin(), result.sample.end());
  return result;
}

}  // namespace

std::string_view TraceStatusName(TraceStatus status) {
  switch (status) {
    case TraceStatus::kAccepted: return "accepted";
    case TraceStatus::kRejectedCook: return "rejected_cook";
    case TraceStatus::kNoCandidates: return "no_candidates";
    case TraceStatus::kTerminated: return "terminated";
  }
  return "unknown";
}

InitResult InitSample(const Dataset& data, Index n, const CriterionConfig& cfg,
                      Rng& rng) {
  InitResult out;
  out.warnings = ValidateConfig(cfg, data, n);
  const Index n_rows = data.n_rows();
  const Index n_tilde = ResolvedNTilde(cfg, n_rows, n);
  const Index t_max = ResolvedTMax(cfg, n);
  out.bound = LeverageBound(cfg.nu2, data.n_params(), n);

  GramState state =
      GramState::Build(data, SampleWithoutReplacement(n_rows, n, rng));
  std::vector<char> in_sample = Membership(n_rows, state.sample());
  std::vector<RebuildReport> rebuilds;

  for (Index t = 0;; ++t) {
    std::size_t pos_m = 0;
    double h_max = -1.0;
    for (std::size_t pos = 0; pos < state.sample().size(); ++pos) {
      const Index row = state.sample()[pos];
      const double h = Leverage(state, data.row(row));
      if (h > h_max || (h == h_max && row < state.sample()[pos_m])) {
        h_max = h;
        pos_m = pos;
      }
    }
    out.max_leverage = h_max;
    out.iterations_run = t;
    if (h_max < out.bound) {
      out.converged = true;
      break;
    }
    if (t >= t_max) break;

    const Index row_m = state.sample()[pos_m];
    const auto x_m = data.row(row_m);
    const std::vector<Index> pool =
        SampleOutside(in_sample, n_rows - n, n_tilde, rng);
    std::vector<Index> admissible;
    std::vector<double> admissible_leverage;
    for (Index j : pool) {
      const SwapScalars s =
          ComputeSwapScalars(state.gram_inv(), x_m, data.row(j));
      if (!(s.d >= kMinSwapDeterminantRatio)) continue;
      const double h_swap = SwapLeverageFromScalars(s);
      if (h_swap < out.bound) {
        admissible.push_back(j);
        admissible_leverage.push_back(h_swap);
      }
    }

    ExchangeTrace record;
    record.iteration = t;
    record.removed = row_m;
    record.removed_score = h_max;
    record.removed_leverage = h_max;
    record.upper_bound = out.bound;
    if (admissible.empty()) {
      record.status = TraceStatus::kNoCandidates;
      record.log_det_after = state.log_det();
      out.trace.push_back(record);
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, admissible.size() - 1);
    const std::size_t chosen = pick(rng);
    const Index row_a = admissible[chosen];
    SwapInverseResult swapped = SwapInverse(state, x_m, data.row(row_a));
    state.ApplySwap(pos_m, row_a, std::move(swapped.inv), swapped.d);
    in_sample[static_cast<std::size_t>(row_m)] = 0;
    in_sample[static_cast<std::size_t>(row_a)] = 1;
    record.status = TraceStatus::kAccepted;
    record.added = row_a;
    record.swap_leverage = admissible_leverage[chosen];
    record.filter_score = record.swap_leverage;
    record.log_det_after = state.log_det();
    out.trace.push_back(record);
    MaybeRebuild(state, data, cfg.rebuild_period, rebuilds);
  }

  if (!out.converged) {
    const std::string message =
        "initialisation stopped at t_max with max leverage " +
        std::to_string(out.max_leverage) + " >= " + std::to_string(out.bound);
    if (cfg.strict_init) throw Error(ErrorCode::kInitFailed, message);
    out.warnings.push_back(message);
    ExchangeTrace last;
    last.iteration = out.iterations_run;
    last.status = TraceStatus::kTerminated;
    last.log_det_after = state.log_det();
    out.trace.push_back(last);
  }
  out.sample = state.sample();
  return out;
}

SamplerResult RunExchange(const Dataset& data, Index n,
                          const CriterionConfig& cfg, std::vector<Index> s0,
                          Rng& rng) {
  return RunLoop(data, n, cfg, std::move(s0), rng, /*informative=*/false);
}

SamplerResult RunInformative(const Dataset& data, Index n,
                             const CriterionConfig& cfg,
                             std::vector<Index> s0, Rng& rng) {
  return RunLoop(data, n, cfg, std::move(s0), rng, /*informative=*/true);
}

std::vector<Index> Srs(const Dataset& data, Index n, Rng& rng) {
  return SampleWithoutReplacement(data.n_rows(), n, rng);
}

PipelineResult SelectSample(const Dataset& data, Index n,
                            const CriterionConfig& cfg, bool informative) {
  if (informative) data.y();
  Rng rng = MakeStream(cfg.seed, {});
  PipelineResult out;
  out.init = InitSample(data, n, cfg, rng);
  out.result = informative
                   ? RunInformative(data, n, cfg, out.init.sample, rng)
                   : RunExchange(data, n, cfg, out.init.sample, rng);
  std::vector<std::string> merged = out.init.warnings;
  for (std::string& w : out.result.warnings) {
    if (std::find(merged.begin(), merged.end(), w) == merged.end()) {
      merged.push_back(std::move(w));
    }
  }
  out.result.warnings = std::move(merged);
  return out;
}

}  // namespace robsub
