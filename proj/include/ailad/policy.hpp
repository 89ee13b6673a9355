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

#ifndef AILAD_POLICY_HPP_
#define AILAD_POLICY_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "ailad/density.hpp"
#include "ailad/discriminator.hpp"
#include "ailad/env.hpp"
#include "ailad/nn.hpp"
#include "ailad/rng.hpp"
#include "ailad/summarize.hpp"

// Latent-conditioned policy and critic, episode collection, reward
// relabeling, and the entropy-regularized off-policy actor-critic update.
// The latent z is drawn once per episode and never changes mid-episode.
namespace ailad::policy {

struct StepRecord {
  std::vector<float> obs;  // observation as collected (float-rounded)
  std::vector<uint8_t> mask;
  int action = 0;
  double behavior_logprob = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::vector<double> z;
  env::EventLog log;
  summarize::MetricVector metrics{};  // raw episode counts
  double terminal_reward = 0.0;
  bool reward_set = false;
  int64_t episode_id = 0;
  int level_id = 0;
};

struct Nets {
  nn::MlpSpec actor_spec;
  nn::MlpSpec critic_spec;
  nn::ParamVector actor;
  nn::ParamVector critic;
};

Nets make_nets(int obs_size, int action_count, int latent_dim,
               const std::vector<int>& actor_hidden,
               const std::vector<int>& critic_hidden, Rng& rng);

// Samples an action from the masked softmax over concat(obs, z). Returns the
// action id and its log-probability under the current parameters.
std::pair<int, double> act(const nn::MlpSpec& actor_spec,
                           const nn::ParamVector& actor,
                           const std::vector<double>& obs,
                           const std::vector<double>& z,
                           const std::vector<uint8_t>& mask, Rng& rng);

// Plays one episode to termination. The reward slot is left unset.
Trajectory collect_episode(const env::LevelSpec& level, const Nets& nets,
                           const std::vector<double>& z, Rng& rng,
                           int64_t episode_id, int level_id);

// FIFO episode store paired with the metric window used by the density
// estimate; both receive every stored trajectory.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity, size_t metric_window,
                        const summarize::NormalizationStats& stats);

  void push(Trajectory t);
  size_t size() const { return items_.size(); }
  Trajectory& at(size_t i) { return items_[(begin_ + i) % items_.size()]; }
  const Trajectory& at(size_t i) const {
    return items_[(begin_ + i) % items_.size()];
  }
  density::MetricBuffer& metric_buffer() { return metrics_; }
  const density::MetricBuffer& metric_buffer() const { return metrics_; }

  // Uniform with replacement; a positive recent_window restricts sampling to
  // the newest entries so reuse tracks the current policy.
  std::vector<const Trajectory*> sample(int k, Rng& rng,
                                        int recent_window = 0) const;

 private:
  size_t capacity_;
  std::vector<Trajectory> items_;
  size_t begin_ = 0;
  density::MetricBuffer metrics_;
  summarize::NormalizationStats stats_;
};

// Recomputes every stored trajectory's terminal reward with the current
// discriminator and density model (or the fill-in constant when the model is
// null). Returns the number of relabeled trajectories.
int relabel_rewards(ReplayBuffer& buffer, const discriminator::Discriminator& d,
                    const density::DensityModel* model, double fill_in_log_q,
                    const summarize::NormalizationStats& stats, int threads);

struct PolicyUpdateConfig {
  double gamma = 0.99;
  double beta = 0.01;    // entropy bonus
  double c_clip = 10.0;  // importance weight truncation
  double lr_actor = 3e-4;
  double lr_critic = 1e-3;
  // Standardize advantages over the batch before the actor step.
  bool normalize_advantages = true;
};

struct UpdateDiagnostics {
  double mean_entropy = 0.0;
  double mean_advantage = 0.0;
  double mean_importance = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  int steps = 0;
};

// One optimizer step each for actor and critic on a batch of labeled
// trajectories. The terminal reward is propagated backward as
// G_t = gamma^(T-1-t) * r with zero intermediate rewards; advantages use the
// critic as baseline; per-step importance weights are truncated at c_clip.
UpdateDiagnostics update_policy(Nets& nets, nn::AdamState& actor_opt,
                                nn::AdamState& critic_opt,
                                const std::vector<const Trajectory*>& batch,
                                const PolicyUpdateConfig& cfg, int threads);

}  // namespace ailad::policy

#endif  // AILAD_POLICY_HPP_
