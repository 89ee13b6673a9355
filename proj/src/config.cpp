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

#include "ailad/config.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "ailad/errors.hpp"
#include "ailad/io.hpp"
#include "ailad/summarize.hpp"

namespace ailad::config {

namespace {

struct KeyDef {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string bool_str(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigInvalid("not a boolean: '" + s + "'");
}

// Ordered key table; the snapshot is emitted in this order.
const std::vector<std::pair<std::string, KeyDef>>& key_table() {
  static const auto* table = [] {
    auto* t = new std::vector<std::pair<std::string, KeyDef>>;
    auto add_u64 = [t](const std::string& k, uint64_t RunConfig::*f) {
      t->push_back({k,
                    {[f](const RunConfig& c) { return std::to_string(c.*f); },
                     [f, k](RunConfig& c, const std::string& v) {
                       c.*f = static_cast<uint64_t>(io::parse_int(v));
                     }}});
    };
    auto add_i64 = [t](const std::string& k, int64_t RunConfig::*f) {
      t->push_back({k,
                    {[f](const RunConfig& c) { return std::to_string(c.*f); },
                     [f](RunConfig& c, const std::string& v) {
                       c.*f = io::parse_int(v);
                     }}});
    };
    auto add_int = [t](const std::string& k, int RunConfig::*f) {
      t->push_back({k,
                    {[f](const RunConfig& c) { return std::to_string(c.*f); },
                     [f](RunConfig& c, const std::string& v) {
                       c.*f = static_cast<int>(io::parse_int(v));
                     }}});
    };
    auto add_dbl = [t](const std::string& k, double RunConfig::*f) {
      t->push_back(
          {k,
           {[f](const RunConfig& c) { return io::format_double(c.*f); },
            [f](RunConfig& c, const std::string& v) {
              c.*f = io::parse_double(v);
            }}});
    };
    auto add_bool = [t](const std::string& k, bool RunConfig::*f) {
      t->push_back({k,
                    {[f](const RunConfig& c) { return bool_str(c.*f); },
                     [f](RunConfig& c, const std::string& v) {
                       c.*f = parse_bool(v);
                     }}});
    };
    auto add_str = [t](const std::string& k, std::string RunConfig::*f) {
      t->push_back({k,
                    {[f](const RunConfig& c) { return c.*f; },
                     [f](RunConfig& c, const std::string& v) { c.*f = v; }}});
    };

    add_u64("seed", &RunConfig::seed);
    add_u64("level_seed", &RunConfig::level_seed);
    add_str("algorithm", &RunConfig::algorithm);
    add_i64("k_iterations", &RunConfig::k_iterations);
    add_i64("step_budget", &RunConfig::step_budget);
    add_dbl("gamma", &RunConfig::gamma);
    add_dbl("beta", &RunConfig::beta);
    add_dbl("c_clip", &RunConfig::c_clip);
    add_int("latent_dim", &RunConfig::latent_dim);
    add_dbl("d_epochs", &RunConfig::d_epochs);
    add_bool("pretrain_enabled", &RunConfig::pretrain_enabled);
    add_dbl("pretrain_c", &RunConfig::pretrain_c);
    add_int("pretrain_steps", &RunConfig::pretrain_steps);
    add_int("pretrain_negatives", &RunConfig::pretrain_negatives);
    add_dbl("pretrain_lr", &RunConfig::pretrain_lr);
    add_str("density_estimator", &RunConfig::density_estimator);
    add_int("density_window", &RunConfig::density_window);
    add_int("density_nmin", &RunConfig::density_nmin);
    add_int("replay_capacity", &RunConfig::replay_capacity);
    add_int("replay_recent", &RunConfig::replay_recent);
    add_int("policy_batch", &RunConfig::policy_batch);
    add_bool("advantage_norm", &RunConfig::advantage_norm);
    add_int("disc_batch", &RunConfig::disc_batch);
    add_dbl("lr_actor", &RunConfig::lr_actor);
    add_dbl("lr_critic", &RunConfig::lr_critic);
    add_dbl("lr_disc", &RunConfig::lr_disc);
    add_str("actor_hidden", &RunConfig::actor_hidden);
    add_str("critic_hidden", &RunConfig::critic_hidden);
    add_str("disc_hidden", &RunConfig::disc_hidden);
    add_bool("no_latent", &RunConfig::no_latent);
    add_bool("real_fill_in", &RunConfig::real_fill_in);
    add_bool("no_pretrain", &RunConfig::no_pretrain);
    add_bool("plain_sigmoid", &RunConfig::plain_sigmoid);
    add_str("levels_train", &RunConfig::levels_train);
    add_int("level_test", &RunConfig::level_test);
    add_int("eval_episodes", &RunConfig::eval_episodes);
    add_int("workers", &RunConfig::workers);
    add_str("expert_csv", &RunConfig::expert_csv);
    add_dbl("carmi_lambda", &RunConfig::carmi_lambda);
    return t;
  }();
  return *table;
}

const KeyDef* find_key(const std::string& key) {
  for (const auto& [k, def] : key_table())
    if (k == key) return &def;
  return nullptr;
}

}  // namespace

std::vector<int> RunConfig::train_level_ids() const {
  std::vector<int> ids;
  for (const std::string& part : io::split(levels_train, ',')) {
    auto dash = part.find('-');
    if (dash == std::string::npos) {
      ids.push_back(static_cast<int>(io::parse_int(part)));
    } else {
      int lo = static_cast<int>(io::parse_int(part.substr(0, dash)));
      int hi = static_cast<int>(io::parse_int(part.substr(dash + 1)));
      for (int i = lo; i <= hi; ++i) ids.push_back(i);
    }
  }
  if (ids.empty()) throw ConfigInvalid("levels_train is empty");
  return ids;
}

std::vector<int> RunConfig::hidden_sizes(const std::string& which) const {
  const std::string& src = which == "actor"    ? actor_hidden
                           : which == "critic" ? critic_hidden
                                               : disc_hidden;
  std::vector<int> out;
  for (const std::string& part : io::split(src, ','))
    out.push_back(static_cast<int>(io::parse_int(part)));
  return out;
}

void RunConfig::validate() const {
  if (algorithm != "ailad" && algorithm != "carmi")
    throw ConfigInvalid("algorithm must be ailad or carmi");
  if (k_iterations < 1) throw ConfigInvalid("k_iterations must be >= 1");
  if (d_epochs < 0.0 || d_epochs > 1.0)
    throw ConfigInvalid("d_epochs must lie in [0, 1]");
  if (latent_dim != summarize::kMetricCount)
    throw ConfigInvalid("latent_dim must equal the metric count");
  if (pretrain_c <= 0.0) throw ConfigInvalid("pretrain_c must be positive");
  if (density_estimator != "kde" && density_estimator != "gaussian")
    throw ConfigInvalid("density_estimator must be kde or gaussian");
  if (density_window < replay_capacity)
    throw ConfigInvalid("density_window must cover replay_capacity");
  if (replay_capacity < 1 || policy_batch < 1 || disc_batch < 1)
    throw ConfigInvalid("buffer and batch sizes must be >= 1");
  if (workers < 1) throw ConfigInvalid("workers must be >= 1");
  if (step_budget < 0) throw ConfigInvalid("step_budget must be >= 0");
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigInvalid("gamma out of range");
  train_level_ids();  // parse check
  hidden_sizes("actor");
  hidden_sizes("critic");
  hidden_sizes("disc");
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [key, def] : key_table())
    out << key << " = " << def.get(*this) << "\n";
  return out.str();
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  for (const std::string& raw : io::split_lines(text)) {
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid("expected key = value, got: '" + line + "'");
    auto strip = [](std::string s) {
      auto a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      auto b = s.find_last_not_of(" \t");
      return s.substr(a, b - a + 1);
    };
    apply_override(cfg, strip(line.substr(0, eq)) + "=" +
                            strip(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  return parse_config_text(io::read_file(path));
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigInvalid("override must be key=value: '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  const KeyDef* def = find_key(key);
  if (def == nullptr) throw ConfigInvalid("unknown config key: '" + key + "'");
  def->set(cfg, value);
}

}  // namespace ailad::config
