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

#ifndef AILAD_CONFIG_HPP_
#define AILAD_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

// Every knob the training loop leaves open, in one flat structure. Config
// files are `key = value` lines with '#' comments; unknown keys are rejected
// so typos cannot silently change a run.
namespace ailad::config {

struct RunConfig {
  uint64_t seed = 1;
  uint64_t level_seed = 42;
  std::string algorithm = "ailad";  // ailad | carmi

  int64_t k_iterations = 1000000;  // outer loop cap
  int64_t step_budget = 50000;     // env micro-steps; 0 = no budget

  double gamma = 0.99;
  double beta = 0.01;
  double c_clip = 10.0;
  int latent_dim = 7;

  double d_epochs = 0.5;  // per-iteration discriminator update probability

  bool pretrain_enabled = true;
  double pretrain_c = 0.3;
  int pretrain_steps = 2000;
  int pretrain_negatives = 2000;
  double pretrain_lr = 1e-3;

  std::string density_estimator = "kde";  // kde | gaussian
  int density_window = 2048;
  int density_nmin = 32;

  int replay_capacity = 512;
  int replay_recent = 128;  // sampling window for policy updates; 0 = all
  int policy_batch = 8;
  int disc_batch = 64;
  bool advantage_norm = true;

  double lr_actor = 1e-3;
  double lr_critic = 2e-3;
  double lr_disc = 1e-3;

  std::string actor_hidden = "64,64";
  std::string critic_hidden = "64,64";
  std::string disc_hidden = "64,64";

  bool no_latent = false;
  bool real_fill_in = false;
  bool no_pretrain = false;
  bool plain_sigmoid = false;

  std::string levels_train = "1-8";
  int level_test = 9;

  int eval_episodes = 256;
  int workers = 1;

  std::string expert_csv = "experts.csv";
  double carmi_lambda = 1.0;

  // --- helpers ---
  std::vector<int> train_level_ids() const;
  std::vector<int> hidden_sizes(const std::string& which) const;
  void validate() const;  // throws ConfigInvalid

  // Canonical snapshot, bit-stable, parseable by parse().
  std::string serialize() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Applies one "key=value" override; throws ConfigInvalid on unknown keys.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace ailad::config

#endif  // AILAD_CONFIG_HPP_
