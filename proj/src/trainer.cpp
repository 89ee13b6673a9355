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

#include "ailad/trainer.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "ailad/density.hpp"
#include "ailad/discriminator.hpp"
#include "ailad/env.hpp"
#include "ailad/errors.hpp"
#include "ailad/io.hpp"
#include "ailad/parallel.hpp"
#include "ailad/policy.hpp"

namespace ailad::trainer {

using nlohmann::json;

namespace {

struct RunContext {
  config::RunConfig cfg;
  std::string run_dir;
  summarize::ExpertDataset dataset;
  uint64_t expert_hash = 0;
  summarize::NormalizationStats stats;
  std::vector<int> train_levels;
  int obs_size = 0;
  int action_count = 0;
  policy::Nets nets;
  Rng rng{0};
  std::ostringstream log;
  int64_t env_steps = 0;
  int64_t episodes = 0;
};

std::string extended_csv_path(const std::string& expert_csv) {
  auto dot = expert_csv.rfind(".csv");
  if (dot == std::string::npos) return expert_csv + "_extended.csv";
  return expert_csv.substr(0, dot) + "_extended.csv";
}

RunContext setup(const config::RunConfig& cfg, const std::string& run_dir) {
  cfg.validate();
  RunContext ctx;
  ctx.cfg = cfg;
  ctx.run_dir = run_dir;
  bool persist = !run_dir.empty();
  if (persist) {
    io::ensure_dir(run_dir);
    io::ensure_dir(run_dir + "/checkpoints");
    // Config snapshot lands before anything else runs.
    io::write_file(run_dir + "/config.snapshot", cfg.serialize());
  }

  std::string expert_text = io::read_file(cfg.expert_csv);
  ctx.dataset = summarize::ExpertDataset::from_csv(expert_text);
  ctx.expert_hash = io::fnv1a(expert_text);
  if (persist) {
    io::write_file(run_dir + "/expert.csv", expert_text);
    // The per-episode extended metrics travel with the run when available,
    // so the run directory alone can rebuild every report.
    std::string ext_path = extended_csv_path(cfg.expert_csv);
    if (io::file_exists(ext_path))
      io::write_file(run_dir + "/expert_extended.csv",
                     io::read_file(ext_path));
  }

  ctx.stats = summarize::fit_normalizer(
      ctx.dataset.split_metrics(summarize::Split::kTrain));
  if (persist)
    io::write_file(run_dir + "/normalization.txt", ctx.stats.to_text());

  ctx.train_levels = cfg.train_level_ids();
  env::LevelSpec probe = env::generate_level(ctx.train_levels[0], cfg.level_seed);
  ctx.obs_size = probe.observation_size();
  ctx.action_count = probe.action_count();

  ctx.rng = Rng(derive_seed(cfg.seed, 0x41a11ad));
  ctx.nets = policy::make_nets(ctx.obs_size, ctx.action_count, cfg.latent_dim,
                               cfg.hidden_sizes("actor"),
                               cfg.hidden_sizes("critic"), ctx.rng);
  return ctx;
}

eval::EvalParams eval_params_for(const RunContext& ctx) {
  const config::RunConfig& cfg = ctx.cfg;
  eval::EvalParams params;
  params.train_levels = ctx.train_levels;
  params.test_level = cfg.level_test;
  params.level_seed = cfg.level_seed;
  params.eval_seed = derive_seed(cfg.seed, 0xe7a1);
  params.episodes_per_set = cfg.eval_episodes;
  params.no_latent = cfg.algorithm == "ailad" && cfg.no_latent;
  params.workers = cfg.workers;
  return params;
}

RunArtifacts finalize(RunContext& ctx, int64_t disc_updates) {
  const config::RunConfig& cfg = ctx.cfg;
  io::write_file(ctx.run_dir + "/train_log.jsonl", ctx.log.str());
  nn::save_checkpoint(ctx.run_dir + "/checkpoints/actor.nn",
                      ctx.nets.actor_spec, ctx.nets.actor);
  nn::save_checkpoint(ctx.run_dir + "/checkpoints/critic.nn",
                      ctx.nets.critic_spec, ctx.nets.critic);

  eval::EvalParams params = eval_params_for(ctx);

  RunArtifacts artifacts;
  artifacts.run_dir = ctx.run_dir;
  artifacts.env_steps = ctx.env_steps;
  artifacts.episodes = ctx.episodes;
  artifacts.disc_updates = disc_updates;
  artifacts.expert_hash = ctx.expert_hash;
  artifacts.report =
      eval::evaluate_agent(ctx.nets, params, ctx.dataset, ctx.stats);
  artifacts.report.expert_hash = ctx.expert_hash;
  artifacts.report.config_hash = io::fnv1a(cfg.serialize());

  std::string ext_path = ctx.run_dir + "/expert_extended.csv";
  if (io::file_exists(ext_path)) {
    artifacts.report.players =
        eval::ExpertExtended::from_episode_csv(io::read_file(ext_path));
  }
  eval::emit_tables(artifacts.report, ctx.run_dir + "/eval");
  return artifacts;
}

json iteration_record(const RunContext& ctx, int64_t k,
                      const policy::Trajectory& traj, bool disc_updated,
                      double disc_loss,
                      const policy::UpdateDiagnostics& diag) {
  json j;
  j["k"] = k;
  j["steps"] = ctx.env_steps;
  j["level"] = traj.level_id;
  j["z"] = traj.z;
  j["metrics"] = traj.metrics;
  j["reward"] = traj.terminal_reward;
  j["disc"] = disc_updated ? 1 : 0;
  j["disc_loss"] = disc_loss;
  j["entropy"] = diag.mean_entropy;
  j["adv"] = diag.mean_advantage;
  j["imp"] = diag.mean_importance;
  return j;
}

env::StyleParams style_params(int style) {
  switch (style) {
    case 0:
      return {1.0, 0.12, 0.0};   // rusher
    case 1:
      return {0.1, 0.9, 0.95};   // guardian
    case 2:
      return {0.55, 0.45, 0.4};  // skirmisher
    default: {
      auto frac = [](double x) { return x - std::floor(x); };
      return {0.2 + 0.6 * frac(0.37 * style + 0.11),
              frac(0.53 * style + 0.29), frac(0.71 * style + 0.07)};
    }
  }
}

}  // namespace

RunArtifacts run(const config::RunConfig& cfg, const std::string& run_dir) {
  if (cfg.algorithm != "ailad")
    throw ConfigInvalid("trainer::run drives the adversarial algorithm only");
  RunContext ctx = setup(cfg, run_dir);

  bool plain = cfg.plain_sigmoid;
  Rng disc_rng = ctx.rng.split(0xd15c);
  discriminator::Discriminator disc = discriminator::make_discriminator(
      disc_rng, plain, cfg.hidden_sizes("disc"));

  std::vector<summarize::MetricVector> expert_train_norm;
  for (const auto& m :
       ctx.dataset.split_metrics(summarize::Split::kTrain))
    expert_train_norm.push_back(summarize::normalize(m, ctx.stats));

  // Pretraining with the constant fill-in (or the sampler's real density in
  // the corresponding ablation).
  if (cfg.pretrain_enabled && !cfg.no_pretrain) {
    Rng neg_rng = ctx.rng.split(0x9e6);
    auto negatives = discriminator::synthesize_negatives(
        ctx.stats, cfg.pretrain_negatives, neg_rng);
    std::optional<std::vector<double>> expert_lq, neg_lq;
    if (cfg.real_fill_in) {
      expert_lq.emplace();
      neg_lq.emplace();
      for (const auto& m : expert_train_norm)
        expert_lq->push_back(
            discriminator::negative_sampler_log_density(ctx.stats, m));
      for (const auto& m : negatives)
        neg_lq->push_back(
            discriminator::negative_sampler_log_density(ctx.stats, m));
    }
    auto pre = discriminator::pretrain(
        disc, expert_train_norm, negatives, cfg.pretrain_c,
        cfg.pretrain_steps, cfg.pretrain_lr, derive_seed(cfg.seed, 0x97e),
        expert_lq ? &*expert_lq : nullptr, neg_lq ? &*neg_lq : nullptr,
        cfg.workers);
    io::write_file(run_dir + "/pretrain_curve.jsonl", pre.curve_jsonl);
  }

  policy::ReplayBuffer buffer(cfg.replay_capacity, cfg.density_window,
                              ctx.stats);
  nn::AdamState actor_opt(ctx.nets.actor.size());
  nn::AdamState critic_opt(ctx.nets.critic.size());
  nn::AdamState disc_opt(disc.f_params.size());

  policy::PolicyUpdateConfig pol_cfg;
  pol_cfg.gamma = cfg.gamma;
  pol_cfg.beta = cfg.beta;
  pol_cfg.c_clip = cfg.c_clip;
  pol_cfg.lr_actor = cfg.lr_actor;
  pol_cfg.lr_critic = cfg.lr_critic;
  pol_cfg.normalize_advantages = cfg.advantage_norm;

  density::Estimator kind = cfg.density_estimator == "kde"
                                ? density::Estimator::kKde
                                : density::Estimator::kDiagGaussian;
  double fill_log_c = std::log(cfg.pretrain_c);
  int64_t disc_updates = 0;

  for (int64_t k = 1; k <= cfg.k_iterations; ++k) {
    if (cfg.step_budget > 0 && ctx.env_steps >= cfg.step_budget) break;

    std::vector<double> z =
        cfg.no_latent ? std::vector<double>(cfg.latent_dim, 0.0)
                      : ctx.rng.normal_vec(cfg.latent_dim);
    int level_id =
        ctx.train_levels[ctx.rng.uniform_int(
            static_cast<int>(ctx.train_levels.size()))];
    env::LevelSpec level = env::generate_level(level_id, cfg.level_seed);
    policy::Trajectory traj = policy::collect_episode(
        level, ctx.nets, z, ctx.rng, ctx.episodes, level_id);
    ctx.env_steps += static_cast<int64_t>(traj.steps.size());
    ctx.episodes += 1;
    buffer.push(std::move(traj));

    std::optional<density::DensityModel> model;
    if (buffer.metric_buffer().size() >=
        static_cast<size_t>(cfg.density_nmin))
      model = density::fit(buffer.metric_buffer(), kind);

    bool disc_updated = false;
    double disc_loss = 0.0;
    if (ctx.rng.uniform() < cfg.d_epochs) {
      auto fill_at = [&](const std::vector<double>& point) {
        return model ? model->log_density(point) : fill_log_c;
      };
      std::vector<discriminator::LabeledMetric> expert_batch, agent_batch;
      for (int b = 0; b < cfg.disc_batch; ++b) {
        const auto& m = expert_train_norm[ctx.rng.uniform_int(
            static_cast<int>(expert_train_norm.size()))];
        std::vector<double> point(m.begin(), m.end());
        expert_batch.push_back(
            {m, discriminator::FillInValue::log_value(fill_at(point))});
      }
      const auto& metric_buf = buffer.metric_buffer();
      for (int b = 0; b < cfg.disc_batch; ++b) {
        std::vector<double> row = metric_buf.row(
            ctx.rng.uniform_int(static_cast<int>(metric_buf.size())));
        summarize::MetricVector m;
        std::copy(row.begin(), row.end(), m.begin());
        agent_batch.push_back(
            {m, discriminator::FillInValue::log_value(fill_at(row))});
      }
      disc_loss = discriminator::update(disc, disc_opt, cfg.lr_disc,
                                        expert_batch, agent_batch,
                                        cfg.workers);
      disc_updated = true;
      ++disc_updates;
    }

    // Every stored reward reflects the newest discriminator before the
    // policy consumes it.
    policy::relabel_rewards(buffer, disc, model ? &*model : nullptr,
                            fill_log_c, ctx.stats, cfg.workers);

    auto batch = buffer.sample(cfg.policy_batch, ctx.rng, cfg.replay_recent);
    policy::UpdateDiagnostics diag = policy::update_policy(
        ctx.nets, actor_opt, critic_opt, batch, pol_cfg, cfg.workers);

    ctx.log << iteration_record(ctx, k, buffer.at(buffer.size() - 1),
                                disc_updated, disc_loss, diag)
                   .dump()
            << "\n";
  }

  nn::save_checkpoint(run_dir + "/checkpoints/disc.nn", disc.f_spec,
                      disc.f_params);
  return finalize(ctx, disc_updates);
}

std::string AblationTable::to_csv() const {
  std::ostringstream out;
  out << "section,metric";
  for (const auto& name : names) out << "," << name;
  out << "\n";
  for (const std::string& section : {std::string("train"), std::string("test")}) {
    for (int d = 0; d <= summarize::kMetricCount; ++d) {
      bool all_row = d == summarize::kMetricCount;
      out << section << ","
          << (all_row ? "All" : summarize::kMetricDisplayNames[d]);
      for (const auto& cell : cells) {
        out << ",";
        if (!cell.ok()) {
          out << "error";
          continue;
        }
        const eval::SetReport& set =
            section == "train" ? cell.report.train : cell.report.test;
        out << io::format_double(all_row ? set.all_jsd
                                         : set.per_metric_jsd[d]);
      }
      out << "\n";
    }
  }
  return out.str();
}

AblationTable run_ablation_suite(const config::RunConfig& base,
                                 const std::string& out_dir) {
  base.validate();
  io::ensure_dir(out_dir);

  struct Variant {
    std::string column;
    std::string dir;
    std::function<void(config::RunConfig&)> tweak;
  };
  const std::vector<Variant> variants = {
      {"No z", "no_z", [](config::RunConfig& c) { c.no_latent = true; }},
      {"Real Fill In", "real_fill_in",
       [](config::RunConfig& c) { c.real_fill_in = true; }},
      {"No Pre-Train", "no_pretrain",
       [](config::RunConfig& c) { c.no_pretrain = true; }},
      {"D_E=0", "d_e_0", [](config::RunConfig& c) { c.d_epochs = 0.0; }},
      {"D_E=1", "d_e_1", [](config::RunConfig& c) { c.d_epochs = 1.0; }},
      {"No GAN-GCL Corr", "no_gan_gcl",
       [](config::RunConfig& c) { c.plain_sigmoid = true; }},
      {"AILAD", "ailad", [](config::RunConfig&) {}},
  };

  AblationTable table;
  for (const Variant& v : variants) {
    table.names.push_back(v.column);
    config::RunConfig cfg = base;
    v.tweak(cfg);
    RunArtifacts artifacts;
    try {
      artifacts = run(cfg, out_dir + "/" + v.dir);
    } catch (const std::exception& e) {
      artifacts.run_dir = out_dir + "/" + v.dir;
      artifacts.error = e.what();
    }
    table.cells.push_back(std::move(artifacts));
  }
  io::write_file(out_dir + "/ablation_jsd.csv", table.to_csv());
  return table;
}

eval::EvalReport evaluate_untrained(const config::RunConfig& cfg) {
  RunContext ctx = setup(cfg, "");
  eval::EvalReport report =
      eval::evaluate_agent(ctx.nets, eval_params_for(ctx), ctx.dataset,
                           ctx.stats);
  report.expert_hash = ctx.expert_hash;
  report.config_hash = io::fnv1a(cfg.serialize());
  return report;
}

ExpertFiles generate_experts(int styles, int episodes_per_style_per_level,
                             uint64_t seed,
                             const std::vector<int>& train_levels,
                             int test_level, uint64_t level_seed,
                             int workers) {
  if (styles < 2)
    throw ConfigInvalid("expert generation needs at least 2 styles");
  if (episodes_per_style_per_level < 1)
    throw ConfigInvalid("episodes_per_style_per_level must be >= 1");

  std::vector<int> all_levels = train_levels;
  all_levels.push_back(test_level);

  struct Job {
    int style;
    int level_id;
    bool train;
    uint64_t episode_seed;
  };
  std::vector<Job> jobs;
  for (int s = 0; s < styles; ++s)
    for (size_t li = 0; li < all_levels.size(); ++li)
      for (int e = 0; e < episodes_per_style_per_level; ++e)
        jobs.push_back({s, all_levels[li], li + 1 < all_levels.size(),
                        derive_seed(seed, s, all_levels[li], e)});

  int n = static_cast<int>(jobs.size());
  std::vector<env::EventLog> logs(n);
  parallel::parallel_for(n, workers, [&](int i) {
    env::LevelSpec level = env::generate_level(jobs[i].level_id, level_seed);
    logs[i] = env::play_expert_episode(level, style_params(jobs[i].style),
                                       jobs[i].episode_seed);
  });

  ExpertFiles files;
  std::ostringstream styles_csv, extended_csv;
  styles_csv << "row,style\n";
  extended_csv << "split";
  for (const auto& name :
       {"shots", "stabs", "shots_taken", "stabs_taken", "shields", "heals",
        "empowered_shots", "dist_heroes", "dist_enemies",
        "heroes_pct_hp_lost", "enemies_pct_hp_lost", "win", "lose", "draw",
        "turns"})
    extended_csv << "," << name;
  extended_csv << "\n";

  for (int i = 0; i < n; ++i) {
    const Job& job = jobs[i];
    files.dataset.metrics.push_back(summarize::summarize(logs[i]));
    files.dataset.level_ids.push_back(job.level_id);
    files.dataset.splits.push_back(job.train ? summarize::Split::kTrain
                                             : summarize::Split::kTest);
    files.dataset.style_ids.push_back(job.style);
    styles_csv << i << "," << job.style << "\n";

    env::LevelSpec level = env::generate_level(job.level_id, level_seed);
    auto row = summarize::extended_row(
        summarize::extended_metrics(logs[i], level));
    extended_csv << (job.train ? "train" : "test");
    for (double v : row) extended_csv << "," << io::format_double(v);
    extended_csv << "\n";
  }
  files.dataset_csv = files.dataset.to_csv();
  files.styles_csv = styles_csv.str();
  files.extended_csv = extended_csv.str();
  return files;
}

}  // namespace ailad::trainer

namespace ailad::carmi {

double carmi_reward(const summarize::MetricVector& raw_metrics,
                    const summarize::NormalizationStats& stats,
                    const std::vector<double>& goal, double lambda) {
  if (static_cast<int>(goal.size()) != summarize::kMetricCount)
    throw ShapeMismatch("carmi goal dimension mismatch");
  if (lambda <= 0.0) throw ConfigInvalid("carmi lambda must be positive");
  summarize::MetricVector norm = summarize::normalize(raw_metrics, stats);
  double sq = 0.0;
  for (int d = 0; d < summarize::kMetricCount; ++d) {
    double diff = norm[d] - goal[d];
    sq += diff * diff;
  }
  return -lambda * std::sqrt(sq);
}

trainer::RunArtifacts train_carmi(const config::RunConfig& cfg,
                                  const std::string& run_dir) {
  if (cfg.algorithm != "carmi")
    throw ConfigInvalid("train_carmi expects algorithm = carmi");
  using trainer::json;
  auto ctx = ailad::trainer::setup(cfg, run_dir);

  policy::ReplayBuffer buffer(cfg.replay_capacity, cfg.density_window,
                              ctx.stats);
  nn::AdamState actor_opt(ctx.nets.actor.size());
  nn::AdamState critic_opt(ctx.nets.critic.size());

  policy::PolicyUpdateConfig pol_cfg;
  pol_cfg.gamma = cfg.gamma;
  pol_cfg.beta = cfg.beta;
  pol_cfg.c_clip = cfg.c_clip;
  pol_cfg.lr_actor = cfg.lr_actor;
  pol_cfg.lr_critic = cfg.lr_critic;
  pol_cfg.normalize_advantages = cfg.advantage_norm;

  for (int64_t k = 1; k <= cfg.k_iterations; ++k) {
    if (cfg.step_budget > 0 && ctx.env_steps >= cfg.step_budget) break;

    // The goal doubles as the policy's latent input.
    std::vector<double> z = ctx.rng.normal_vec(cfg.latent_dim);
    int level_id = ctx.train_levels[ctx.rng.uniform_int(
        static_cast<int>(ctx.train_levels.size()))];
    env::LevelSpec level = env::generate_level(level_id, cfg.level_seed);
    policy::Trajectory traj = policy::collect_episode(
        level, ctx.nets, z, ctx.rng, ctx.episodes, level_id);
    traj.terminal_reward =
        carmi_reward(traj.metrics, ctx.stats, z, cfg.carmi_lambda);
    traj.reward_set = true;
    ctx.env_steps += static_cast<int64_t>(traj.steps.size());
    ctx.episodes += 1;
    buffer.push(std::move(traj));

    auto batch = buffer.sample(cfg.policy_batch, ctx.rng, cfg.replay_recent);
    policy::UpdateDiagnostics diag = policy::update_policy(
        ctx.nets, actor_opt, critic_opt, batch, pol_cfg, cfg.workers);

    ctx.log << ailad::trainer::iteration_record(
                   ctx, k, buffer.at(buffer.size() - 1), false, 0.0, diag)
                   .dump()
            << "\n";
  }
  return ailad::trainer::finalize(ctx, 0);
}

}  // namespace ailad::carmi
