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

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ailad/config.hpp"
#include "ailad/env.hpp"
#include "ailad/errors.hpp"
#include "ailad/eval.hpp"
#include "ailad/io.hpp"
#include "ailad/nn.hpp"
#include "ailad/policy.hpp"
#include "ailad/trainer.hpp"

namespace {

using namespace ailad;

std::string default_out_root() {
  const char* run_dir = std::getenv("RUN_DIR");
  return run_dir != nullptr ? run_dir : ".";
}

config::RunConfig build_config(const std::string& config_path,
                               const std::vector<std::string>& overrides,
                               int64_t seed_override) {
  config::RunConfig cfg;
  if (!config_path.empty()) cfg = config::load_config_file(config_path);
  for (const std::string& ov : overrides) config::apply_override(cfg, ov);
  if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
  return cfg;
}

int cmd_gen_experts(int styles, int episodes, uint64_t seed,
                    uint64_t level_seed, const std::string& levels_train,
                    int level_test, const std::string& out_dir, int workers) {
  config::RunConfig probe;
  probe.levels_train = levels_train;
  auto files = trainer::generate_experts(styles, episodes, seed,
                                         probe.train_level_ids(), level_test,
                                         level_seed, workers);
  io::ensure_dir(out_dir);
  io::write_file(out_dir + "/experts.csv", files.dataset_csv);
  io::write_file(out_dir + "/experts_styles.csv", files.styles_csv);
  io::write_file(out_dir + "/experts_extended.csv", files.extended_csv);
  std::cout << "wrote " << files.dataset.size() << " metric sets to "
            << out_dir << "/experts.csv\n";
  return 0;
}

int cmd_train(const config::RunConfig& cfg, const std::string& run_dir) {
  trainer::RunArtifacts artifacts =
      cfg.algorithm == "carmi" ? carmi::train_carmi(cfg, run_dir)
                               : trainer::run(cfg, run_dir);
  std::cout << "run complete: " << artifacts.episodes << " episodes, "
            << artifacts.env_steps << " env steps\n"
            << "train All JSD " << artifacts.report.train.all_jsd
            << ", test All JSD " << artifacts.report.test.all_jsd << "\n"
            << "artifacts in " << artifacts.run_dir << "\n";
  return 0;
}

int cmd_ablate(const config::RunConfig& base, const std::string& out_dir) {
  trainer::AblationTable table = trainer::run_ablation_suite(base, out_dir);
  std::cout << table.to_csv();
  std::cout << "table written to " << out_dir << "/ablation_jsd.csv\n";
  for (size_t i = 0; i < table.cells.size(); ++i)
    if (!table.cells[i].ok())
      std::cerr << "cell '" << table.names[i]
                << "' failed: " << table.cells[i].error << "\n";
  return 0;
}

int cmd_evaluate(const std::string& run_dir, int episodes) {
  config::RunConfig cfg =
      config::parse_config_text(io::read_file(run_dir + "/config.snapshot"));
  if (episodes > 0) cfg.eval_episodes = episodes;

  std::string expert_text = io::read_file(run_dir + "/expert.csv");
  auto dataset = summarize::ExpertDataset::from_csv(expert_text);
  auto stats = summarize::fit_normalizer(
      dataset.split_metrics(summarize::Split::kTrain));

  auto [actor_spec, actor] =
      nn::load_checkpoint(run_dir + "/checkpoints/actor.nn");
  auto [critic_spec, critic] =
      nn::load_checkpoint(run_dir + "/checkpoints/critic.nn");
  policy::Nets nets{actor_spec, critic_spec, actor, critic};

  eval::EvalParams params;
  params.train_levels = cfg.train_level_ids();
  params.test_level = cfg.level_test;
  params.level_seed = cfg.level_seed;
  params.eval_seed = derive_seed(cfg.seed, 0xe7a1);
  params.episodes_per_set = cfg.eval_episodes;
  params.no_latent = cfg.algorithm == "ailad" && cfg.no_latent;
  params.workers = cfg.workers;

  eval::EvalReport report =
      eval::evaluate_agent(nets, params, dataset, stats);
  report.expert_hash = io::fnv1a(expert_text);
  report.config_hash = io::fnv1a(cfg.serialize());
  if (io::file_exists(run_dir + "/expert_extended.csv"))
    report.players = eval::ExpertExtended::from_episode_csv(
        io::read_file(run_dir + "/expert_extended.csv"));
  eval::emit_tables(report, run_dir + "/eval");
  std::cout << "train All JSD " << report.train.all_jsd << ", test All JSD "
            << report.test.all_jsd << "\n";
  return 0;
}

int cmd_report(const std::string& carmi_dir, const std::string& ailad_dir,
               const std::string& out_dir) {
  auto carmi_report = eval::EvalReport::from_summary_json(
      io::read_file(carmi_dir + "/eval/summary.json"));
  auto ailad_report = eval::EvalReport::from_summary_json(
      io::read_file(ailad_dir + "/eval/summary.json"));
  if (carmi_report.expert_hash != ailad_report.expert_hash)
    std::cerr << "warning: runs were trained on different expert data\n";
  eval::emit_comparison_tables(carmi_report, ailad_report, out_dir);
  std::cout << "comparison tables written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial imitation learning on aggregated episode metrics"};
  app.require_subcommand(1);

  // gen-experts
  auto* gen = app.add_subcommand(
      "gen-experts", "Generate the scripted heterogeneous expert dataset");
  int styles = 3, gen_episodes = 8, level_test = 9, gen_workers = 1;
  uint64_t gen_seed = 1, gen_level_seed = 42;
  std::string gen_levels = "1-8";
  std::string gen_out = default_out_root();
  gen->add_option("--styles", styles, "Number of expert styles (>= 2)");
  gen->add_option("--episodes", gen_episodes, "Episodes per style per level");
  gen->add_option("--seed", gen_seed, "Expert behavior seed");
  gen->add_option("--level-seed", gen_level_seed, "Level family seed");
  gen->add_option("--levels-train", gen_levels, "Train level ids, e.g. 1-8");
  gen->add_option("--level-test", level_test, "Held-out level id");
  gen->add_option("--workers", gen_workers, "Parallel rollout workers");
  gen->add_option("--out", gen_out, "Output directory");

  // shared train options
  std::string config_path, run_dir;
  std::vector<std::string> overrides;
  int64_t seed_override = -1;

  auto add_train_opts = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file (key = value)");
    cmd->add_option("--set", overrides, "Override, key=value (repeatable)");
    cmd->add_option("--run-dir", run_dir, "Run directory");
    cmd->add_option("--seed", seed_override, "Seed override");
  };
  auto* train = app.add_subcommand("train", "Train the adversarial agent");
  add_train_opts(train);
  auto* train_carmi =
      app.add_subcommand("train-carmi", "Train the goal-distance baseline");
  add_train_opts(train_carmi);
  auto* ablate =
      app.add_subcommand("ablate", "Run the seven-variant ablation suite");
  add_train_opts(ablate);

  // evaluate
  auto* evaluate =
      app.add_subcommand("evaluate", "Re-evaluate a finished run");
  std::string eval_dir;
  int eval_episodes = 0;
  evaluate->add_option("--run-dir", eval_dir, "Run directory")->required();
  evaluate->add_option("--episodes", eval_episodes,
                       "Episodes per level set (default: config value)");

  // report
  auto* report = app.add_subcommand(
      "report", "Combined comparison tables from two finished runs");
  std::string carmi_dir, ailad_dir;
  std::string report_out = default_out_root();
  report->add_option("--carmi", carmi_dir, "CARMI run directory")->required();
  report->add_option("--ailad", ailad_dir, "AILAD run directory")->required();
  report->add_option("--out", report_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen_experts(styles, gen_episodes, gen_seed, gen_level_seed,
                             gen_levels, level_test, gen_out, gen_workers);
    if (train->parsed() || train_carmi->parsed()) {
      config::RunConfig cfg =
          build_config(config_path, overrides, seed_override);
      cfg.algorithm = train_carmi->parsed() ? "carmi" : "ailad";
      if (run_dir.empty())
        run_dir = default_out_root() + "/" + cfg.algorithm + "_run";
      return cmd_train(cfg, run_dir);
    }
    if (ablate->parsed()) {
      config::RunConfig cfg =
          build_config(config_path, overrides, seed_override);
      cfg.algorithm = "ailad";
      if (run_dir.empty()) run_dir = default_out_root() + "/ablation";
      return cmd_ablate(cfg, run_dir);
    }
    if (evaluate->parsed()) return cmd_evaluate(eval_dir, eval_episodes);
    if (report->parsed())
      return cmd_report(carmi_dir, ailad_dir, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
