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

#ifndef ROBSUB_SAMPLER_H_
#define ROBSUB_SAMPLER_H_

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robsub/criteria.h"
#include "robsub/dataset.h"
#include "robsub/gram_state.h"
#include "robsub/random.h"

namespace robsub {

enum class TraceStatus { kAccepted, kRejectedCook, kNoCandidates, kTerminated };

std::string_view TraceStatusName(TraceStatus status);

// One exchange attempt. An iteration produces zero or more kRejectedCook
// records followed by exactly one closing record (kAccepted or
// kNoCandidates); a run that hits t_max ends with one kTerminated record.
struct ExchangeTrace {
  Index iteration = 0;
  TraceStatus status = TraceStatus::kNoCandidates;
  Index removed = -1;
  std::optional<Index> added;
  double removed_score = 0.0;
  double added_score = 0.0;
  double swap_leverage = 0.0;
  double log_det_after = 0.0;

  // Audit fields, kept in memory only.
  double removed_leverage = 0.0;
  // Value tested against removed_score by the lower bound.
  double filter_score = 0.0;
  // Upper bound on swap_leverage in force for this run.
  double upper_bound = 0.0;
  double cook_distance = std::numeric_limits<double>::quiet_NaN();
};

struct InitResult {
  // Working order; positions match the Gram state that produced it.
  std::vector<Index> sample;
  std::vector<ExchangeTrace> trace;
  Index iterations_run = 0;
  bool converged = false;
  double max_leverage = 0.0;
  double bound = 0.0;
  std::vector<std::string> warnings;
};

struct SamplerResult {
  // Ascending row indices.
  std::vector<Index> sample;
  std::vector<ExchangeTrace> trace;
  double final_log_det = 0.0;
  // trace(G X0^T X0); I criterion only.
  std::optional<double> final_trace_criterion;
  Index iterations_run = 0;
  bool converged = false;
  // One entry per scheduled rebuild.
  std::vector<RebuildReport> rebuilds;
  Index degenerate_candidates = 0;
  std::vector<std::string> warnings;
};

// Builds a starting sample free of units with leverage >= nu2 (k+1)/n: starts
// from a simple random sample and repeatedly swaps the maximum-leverage unit
// for a random admissible outside unit. Draw order: the initial sample, then
// per iteration the candidate pool followed by the pick from it.
//
// If t_max passes before the bound holds, returns the current sample with
// converged == false and a warning, or throws kInitFailed under strict_init.
InitResult InitSample(const Dataset& data, Index n, const CriterionConfig& cfg,
                      Rng& rng);

// Non-informative exchange (D or I per cfg.kind): each iteration deletes the
// unit with the smallest deletion score, draws n_tilde outside units,
// keeps those passing CandidateFilter, and adds the one with the largest
// addition score. Stops at t_max or when no candidate qualifies
// (converged). Draw order: one candidate pool per iteration.
SamplerResult RunExchange(const Dataset& data, Index n,
                          const CriterionConfig& cfg, std::vector<Index> s0,
                          Rng& rng);

// As RunExchange, but a candidate is accepted only if its Cook's distance in
// the tentative exchanged sample is below CookThreshold; otherwise the next
// best candidate is tried. If every candidate is rejected the iteration ends
// without an exchange. Throws kMissingResponse without y.
SamplerResult RunInformative(const Dataset& data, Index n,
                             const CriterionConfig& cfg,
                             std::vector<Index> s0, Rng& rng);

// Simple random sample without replacement, ascending.
std::vector<Index> Srs(const Dataset& data, Index n, Rng& rng);

struct PipelineResult {
  InitResult init;
  SamplerResult result;
};

// InitSample followed by RunExchange or RunInformative, all driven by one
// generator seeded from cfg.seed.
PipelineResult SelectSample(const Dataset& data, Index n,
                            const CriterionConfig& cfg, bool informative);

}  // namespace robsub

#endif  // ROBSUB_SAMPLER_H_
