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

#ifndef AILAD_TRAINER_HPP_
#define AILAD_TRAINER_HPP_

#include <string>
#include <vector>

#include "ailad/config.hpp"
#include "ailad/eval.hpp"
#include "ailad/summarize.hpp"

// Orchestration of the full adversarial training loop and its ablations.
namespace ailad::trainer {

struct RunArtifacts {
  std::string run_dir;
  eval::EvalReport report;
  int64_t env_steps = 0;
  int64_t episodes = 0;
  int64_t disc_updates = 0;
  uint64_t expert_hash = 0;
  std::string error;  // nonempty when a suite cell failed

  bool ok() const { return error.empty(); }
};

// Full training run under run_dir: normalizer fit on train-level expert
// metrics, optional discriminator pretraining with the fill-in constant,
// then the outer loop — collect one episode with a fresh z, refresh the
// density estimate, update the discriminator with probability d_epochs,
// relabel every buffered reward, update the policy — and finally
// checkpoints plus evaluation.
RunArtifacts run(const config::RunConfig& cfg, const std::string& run_dir);

struct AblationTable {
  std::vector<std::string> names;  // column order
  std::vector<RunArtifacts> cells;

  std::string to_csv() const;  // train/test blocks x (metrics + All)
};

// The seven-column comparison: No z, Real Fill In, No Pre-Train, D_E=0,
// D_E=1, No GAN-GCL Corr, and the unablated run, under identical budgets,
// seeds and expert data. Cell failures are recorded, not propagated.
AblationTable run_ablation_suite(const config::RunConfig& base,
                                 const std::string& out_dir);

// Evaluation of the freshly initialized policy under the same protocol and
// seeds a finished run would use: the no-training baseline.
eval::EvalReport evaluate_untrained(const config::RunConfig& cfg);

struct ExpertFiles {
  summarize::ExpertDataset dataset;
  std::string dataset_csv;
  std::string styles_csv;    // row,style — kept away from learners
  std::string extended_csv;  // split,<extended values> per episode
};

// Scripted heterogeneous experts played over the level split. Style knob
// combinations are fixed for the first three styles and spread
// deterministically beyond that.
ExpertFiles generate_experts(int styles, int episodes_per_style_per_level,
                             uint64_t seed, const std::vector<int>& train_levels,
                             int test_level, uint64_t level_seed, int workers);

}  // namespace ailad::trainer

namespace ailad::carmi {

// Baseline reward: negative euclidean distance between the episode's
// normalized metrics and the sampled goal z, scaled by lambda. Zero at an
// exact match, negative everywhere else.
double carmi_reward(const summarize::MetricVector& raw_metrics,
                    const summarize::NormalizationStats& stats,
                    const std::vector<double>& goal, double lambda);

// Same collection/update loop and budget accounting as the adversarial run,
// but rewards come from carmi_reward at collection time. Takes no
// discriminator and no density estimate, by construction.
trainer::RunArtifacts train_carmi(const config::RunConfig& cfg,
                                  const std::string& run_dir);

}  // namespace ailad::carmi

#endif  // AILAD_TRAINER_HPP_
