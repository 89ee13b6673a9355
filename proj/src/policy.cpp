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

#include "ailad/policy.hpp"

#include <cmath>

#include "ailad/errors.hpp"
#include "ailad/parallel.hpp"

namespace ailad::policy {

namespace {

// Collection and update must see bit-identical inputs, so observations pass
// through the stored float representation on both paths.
std::vector<double> assemble_input(const std::vector<float>& obs,
                                   const std::vector<double>& z) {
  std::vector<double> input(obs.size() + z.size());
  for (size_t i = 0; i < obs.size(); ++i) input[i] = obs[i];
  for (size_t i = 0; i < z.size(); ++i) input[obs.size() + i] = z[i];
  return input;
}

std::vector<float> to_float(const std::vector<double>& v) {
  std::vector<float> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

double masked_logprob(const nn::Workspace& ws, const std::vector<uint8_t>& mask,
                      int action) {
  double mx = -1e300;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && ws.logits[i] > mx) mx = ws.logits[i];
  double z = 0.0;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) z += std::exp(ws.logits[i] - mx);
  return ws.logits[action] - mx - std::log(z);
}

}  // namespace

Nets make_nets(int obs_size, int action_count, int latent_dim,
               const std::vector<int>& actor_hidden,
               const std::vector<int>& critic_hidden, Rng& rng) {
  Nets nets;
  nets.actor_spec.widths = {obs_size + latent_dim};
  for (int h : actor_hidden) nets.actor_spec.widths.push_back(h);
  nets.actor_spec.widths.push_back(action_count);
  nets.actor_spec.head = nn::Head::kMaskedSoftmax;
  // Near-uniform start over legal actions.
  nets.actor_spec.init_scale = 0.1;

  nets.critic_spec.widths = {obs_size + latent_dim};
  for (int h : critic_hidden) nets.critic_spec.widths.push_back(h);
  nets.critic_spec.widths.push_back(1);
  nets.critic_spec.head = nn::Head::kLinear;

  nets.actor = nn::init_params(nets.actor_spec, rng);
  nets.critic = nn::init_params(nets.critic_spec, rng);
  return nets;
}

std::pair<int, double> act(const nn::MlpSpec& actor_spec,
                           const nn::ParamVector& actor,
                           const std::vector<double>& obs,
                           const std::vector<double>& z,
                           const std::vector<uint8_t>& mask, Rng& rng) {
  std::vector<double> input(obs.size() + z.size());
  std::copy(obs.begin(), obs.end(), input.begin());
  std::copy(z.begin(), z.end(), input.begin() + static_cast<long>(obs.size()));
  nn::Workspace ws;
  nn::forward(actor_spec, actor, input, mask.data(), ws);

  double u = rng.uniform();
  double cum = 0.0;
  int action = -1;
  for (size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    cum += ws.output[i];
    action = static_cast<int>(i);
    if (u < cum) break;
  }
  if (action < 0) throw EmptyMask("act: no legal action");
  return {action, masked_logprob(ws, mask, action)};
}

Trajectory collect_episode(const env::LevelSpec& level, const Nets& nets,
                           const std::vector<double>& z, Rng& rng,
                           int64_t episode_id, int level_id) {
  env::Battle battle(level);
  Trajectory traj;
  traj.z = z;
  traj.episode_id = episode_id;
  traj.level_id = level_id;

  while (!battle.done()) {
    StepRecord rec;
    rec.obs = to_float(battle.observation().flat());
    rec.mask = battle.mask().legal;
    std::vector<double> obs_rounded(rec.obs.begin(), rec.obs.end());
    auto [action, logprob] =
        act(nets.actor_spec, nets.actor, obs_rounded, z, rec.mask, rng);
    rec.action = action;
    rec.behavior_logprob = logprob;
    traj.steps.push_back(std::move(rec));
    battle.step(action);
  }
  traj.log = battle.log();
  traj.metrics = summarize::summarize(traj.log);
  return traj;
}

ReplayBuffer::ReplayBuffer(size_t capacity, size_t metric_window,
                           const summarize::NormalizationStats& stats)
    : capacity_(capacity),
      metrics_(metric_window, summarize::kMetricCount),
      stats_(stats) {
  items_.reserve(capacity);
}

void ReplayBuffer::push(Trajectory t) {
  auto norm = summarize::normalize(t.metrics, stats_);
  metrics_.push(std::vector<double>(norm.begin(), norm.end()));
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[begin_] = std::move(t);
    begin_ = (begin_ + 1) % capacity_;
  }
}

std::vector<const Trajectory*> ReplayBuffer::sample(int k, Rng& rng,
                                                    int recent_window) const {
  int n = static_cast<int>(size());
  int window = recent_window > 0 ? std::min(recent_window, n) : n;
  int first = n - window;
  std::vector<const Trajectory*> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i)
    out.push_back(&at(first + rng.uniform_int(window)));
  return out;
}

int relabel_rewards(ReplayBuffer& buffer, const discriminator::Discriminator& d,
                    const density::DensityModel* model, double fill_in_log_q,
                    const summarize::NormalizationStats& stats, int threads) {
  int n = static_cast<int>(buffer.size());
  if (n == 0) return 0;
  std::vector<std::vector<double>> queries(n);
  std::vector<summarize::MetricVector> normalized(n);
  for (int i = 0; i < n; ++i) {
    normalized[i] = summarize::normalize(buffer.at(i).metrics, stats);
    queries[i].assign(normalized[i].begin(), normalized[i].end());
  }
  std::vector<double> log_q(n, fill_in_log_q);
  if (model != nullptr) density::log_density_batch(*model, queries, log_q, threads);

  parallel::parallel_for(n, threads, [&](int i) {
    Trajectory& t = buffer.at(i);
    t.terminal_reward = discriminator::reward(
        d, normalized[i], discriminator::FillInValue::log_value(log_q[i]));
    t.reward_set = true;
  });
  return n;
}

UpdateDiagnostics update_policy(Nets& nets, nn::AdamState& actor_opt,
                                nn::AdamState& critic_opt,
                                const std::vector<const Trajectory*>& batch,
                                const PolicyUpdateConfig& cfg, int threads) {
  if (batch.empty()) throw EmptySet("update_policy: empty batch");
  struct StepRef {
    const Trajectory* traj;
    int step;
    double ret;  // discounted terminal return at this step
  };
  std::vector<StepRef> steps;
  for (const Trajectory* t : batch) {
    if (!t->reward_set)
      throw UnlabeledTrajectory("trajectory " + std::to_string(t->episode_id) +
                                " has no reward");
    int len = static_cast<int>(t->steps.size());
    for (int s = 0; s < len; ++s) {
      double ret =
          std::pow(cfg.gamma, static_cast<double>(len - 1 - s)) *
          t->terminal_reward;
      steps.push_back({t, s, ret});
    }
  }
  int n = static_cast<int>(steps.size());
  double inv_n = 1.0 / n;
  size_t actor_size = nets.actor.size();
  size_t critic_size = nets.critic.size();

  std::vector<double> entropies(n), advantages(n), importances(n),
      logps(n), values(n);
  std::vector<nn::Workspace> actor_ws(n), critic_ws(n);

  // Forward pass over every step; gradients need the raw advantages first.
  parallel::parallel_for(n, threads, [&](int i) {
    const StepRef& ref = steps[i];
    const StepRecord& rec = ref.traj->steps[ref.step];
    std::vector<double> input = assemble_input(rec.obs, ref.traj->z);
    nn::forward(nets.actor_spec, nets.actor, input, rec.mask.data(),
                actor_ws[i]);
    nn::forward(nets.critic_spec, nets.critic, input, nullptr, critic_ws[i]);

    values[i] = critic_ws[i].output[0];
    advantages[i] = ref.ret - values[i];
    logps[i] = masked_logprob(actor_ws[i], rec.mask, ref.traj->steps[ref.step].action);
    importances[i] =
        std::min(std::exp(logps[i] - rec.behavior_logprob), cfg.c_clip);
    double entropy = 0.0;
    for (size_t a = 0; a < rec.mask.size(); ++a) {
      if (!rec.mask[a]) continue;
      double p = actor_ws[i].output[a];
      if (p > 1e-300) entropy -= p * std::log(p);
    }
    entropies[i] = entropy;
  });

  std::vector<double> actor_adv = advantages;
  if (cfg.normalize_advantages && n > 1) {
    double mean = 0.0;
    for (double a : actor_adv) mean += a;
    mean *= inv_n;
    double var = 0.0;
    for (double a : actor_adv) var += (a - mean) * (a - mean);
    double sd = std::sqrt(var * inv_n);
    if (sd > 1e-8)
      for (double& a : actor_adv) a = (a - mean) / sd;
    else
      for (double& a : actor_adv) a -= mean;
  }

  // Sample gradients land in one combined [actor | critic] vector.
  std::vector<double> grad;
  double total_actor_loss = parallel::batch_accumulate(
      actor_size + critic_size, n,
      [&](int i, std::vector<double>& g) {
        const StepRef& ref = steps[i];
        const StepRecord& rec = ref.traj->steps[ref.step];
        int n_actions = static_cast<int>(rec.mask.size());
        double w = importances[i];
        double adv = actor_adv[i];
        double entropy = entropies[i];

        // d(actor loss)/d(logits), loss = -(w*adv*logp + beta*H) / n.
        std::vector<double> dlogits(n_actions, 0.0);
        for (int a = 0; a < n_actions; ++a) {
          if (!rec.mask[a]) continue;
          double p = actor_ws[i].output[a];
          double g_pg = w * adv * (p - (a == rec.action ? 1.0 : 0.0));
          double g_ent =
              cfg.beta * p * (std::log(std::max(p, 1e-300)) + entropy);
          dlogits[a] = (g_pg + g_ent) * inv_n;
        }
        nn::backward_into(nets.actor_spec, nets.actor, actor_ws[i],
                          rec.mask.data(), dlogits, true, g.data());
        std::vector<double> dvalue = {2.0 * (values[i] - ref.ret) * inv_n};
        nn::backward_into(nets.critic_spec, nets.critic, critic_ws[i], nullptr,
                          dvalue, false, g.data() + actor_size);
        return (-(w * adv * logps[i]) - cfg.beta * entropy) * inv_n;
      },
      grad, threads);

  std::vector<double> actor_grad(grad.begin(), grad.begin() + actor_size);
  std::vector<double> critic_grad(grad.begin() + actor_size, grad.end());
  nn::adam_step(nets.actor, actor_grad, actor_opt, {cfg.lr_actor});
  nn::adam_step(nets.critic, critic_grad, critic_opt, {cfg.lr_critic});

  UpdateDiagnostics diag;
  diag.steps = n;
  diag.actor_loss = total_actor_loss;
  for (int i = 0; i < n; ++i) {
    diag.mean_entropy += entropies[i] * inv_n;
    diag.mean_advantage += advantages[i] * inv_n;
    diag.mean_importance += importances[i] * inv_n;
    diag.critic_loss += advantages[i] * advantages[i] * inv_n;
  }
  return diag;
}

}  // namespace ailad::policy
