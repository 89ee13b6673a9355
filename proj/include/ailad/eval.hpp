// Copyright 2026 The ailad Authors.
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

#ifndef AILAD_EVAL_HPP_
#define AILAD_EVAL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ailad/policy.hpp"
#include "ailad/summarize.hpp"

// Jensen-Shannon divergence between agent and expert metric distributions,
// per metric and aggregated, plus the absolute in-game metrics report.
namespace ailad::eval {

struct JsdConfig {
  int bin_count = 20;
  double alpha = 1e-3;  // additive smoothing per bin
};

// Histogram JSD in natural log: both sample sets share bins over the pooled
// range, every bin gets alpha mass, then (KL(P||M) + KL(Q||M)) / 2 with
// M = (P+Q)/2. Bounded by ln 2 up to smoothing.
double jsd_1d(const std::vector<double>& samples_p,
              const std::vector<double>& samples_q, const JsdConfig& cfg);

struct SetReport {
  std::array<double, summarize::kMetricCount> per_metric_jsd{};
  double all_jsd = 0.0;  // arithmetic mean of the per-metric values
  std::array<double, summarize::kMetricCount> agent_metric_mean{};
  std::array<double, summarize::kMetricCount> agent_metric_var{};
  std::array<double, summarize::kExtendedRowCount> agent_extended{};
  int agent_episodes = 0;
  int expert_samples = 0;
};

// Mean extended-row values of the expert episodes, by split; produced at
// expert-generation time since learners never see expert episodes.
struct ExpertExtended {
  std::array<double, summarize::kExtendedRowCount> train{};
  std::array<double, summarize::kExtendedRowCount> test{};

  std::string to_csv() const;
  static ExpertExtended from_episode_csv(const std::string& csv);
};

struct EvalReport {
  SetReport train;
  SetReport test;
  std::optional<ExpertExtended> players;
  uint64_t expert_hash = 0;
  uint64_t config_hash = 0;

  std::string to_summary_json() const;
  static EvalReport from_summary_json(const std::string& json_text);
};

struct EvalParams {
  std::vector<int> train_levels;
  int test_level = 9;
  uint64_t level_seed = 42;
  uint64_t eval_seed = 0;
  int episodes_per_set = 256;  // >= 50
  bool no_latent = false;
  int workers = 1;
  JsdConfig jsd;
};

// Rolls out the policy on both level sets with a fresh z per episode and
// reports per-metric JSD against the expert split plus the extended means.
// Deterministic given eval_seed.
EvalReport evaluate_agent(const policy::Nets& nets, const EvalParams& params,
                          const summarize::ExpertDataset& expert,
                          const summarize::NormalizationStats& stats);

// Per-run tables: jsd.csv, extended.csv, summary.json under dir.
void emit_tables(const EvalReport& report, const std::string& dir);

// Cross-run tables in the published layouts: the CARMI/AILAD JSD comparison
// and the absolute in-game metrics table (players vs both agents).
void emit_comparison_tables(const EvalReport& carmi, const EvalReport& ailad,
                            const std::string& dir);

}  // namespace ailad::eval

#endif  // AILAD_EVAL_HPP_
