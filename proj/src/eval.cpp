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

#include "ailad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ailad/errors.hpp"
#include "ailad/io.hpp"
#include "ailad/parallel.hpp"

namespace ailad::eval {

using nlohmann::json;

double jsd_1d(const std::vector<double>& samples_p,
              const std::vector<double>& samples_q, const JsdConfig& cfg) {
  if (samples_p.empty() || samples_q.empty())
    throw EmptySamples("jsd_1d needs nonempty sample sets");
  if (cfg.bin_count < 2 || cfg.alpha <= 0.0)
    throw ConfigInvalid("jsd config needs bin_count >= 2 and alpha > 0");

  double lo = samples_p[0], hi = samples_p[0];
  for (double v : samples_p) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : samples_q) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) return 0.0;  // all mass in one spot on both sides

  const int bins = cfg.bin_count;
  double width = (hi - lo) / bins;
  auto histogram = [&](const std::vector<double>& samples) {
    std::vector<double> h(bins, cfg.alpha);
    for (double v : samples) {
      int b = static_cast<int>((v - lo) / width);
      b = std::clamp(b, 0, bins - 1);
      h[b] += 1.0;
    }
    double total = static_cast<double>(samples.size()) + bins * cfg.alpha;
    for (double& x : h) x /= total;
    return h;
  };
  std::vector<double> p = histogram(samples_p);
  std::vector<double> q = histogram(samples_q);

  double kl_pm = 0.0, kl_qm = 0.0;
  for (int b = 0; b < bins; ++b) {
    double m = 0.5 * (p[b] + q[b]);
    kl_pm += p[b] * std::log(p[b] / m);
    kl_qm += q[b] * std::log(q[b] / m);
  }
  return 0.5 * (kl_pm + kl_qm);
}

namespace {

const std::array<std::string, summarize::kExtendedRowCount> kExtendedCsvKeys = {
    "shots", "stabs", "shots_taken", "stabs_taken", "shields", "heals",
    "empowered_shots", "dist_heroes", "dist_enemies", "heroes_pct_hp_lost",
    "enemies_pct_hp_lost", "win", "lose", "draw", "turns"};

json set_report_json(const SetReport& r) {
  json j;
  for (int d = 0; d < summarize::kMetricCount; ++d) {
    j["jsd"][summarize::kMetricNames[d]] = r.per_metric_jsd[d];
    j["agent_metric_mean"][summarize::kMetricNames[d]] = r.agent_metric_mean[d];
    j["agent_metric_var"][summarize::kMetricNames[d]] = r.agent_metric_var[d];
  }
  j["jsd"]["all"] = r.all_jsd;
  for (int d = 0; d < summarize::kExtendedRowCount; ++d)
    j["agent_extended"][kExtendedCsvKeys[d]] = r.agent_extended[d];
  j["agent_episodes"] = r.agent_episodes;
  j["expert_samples"] = r.expert_samples;
  return j;
}

SetReport set_report_from_json(const json& j) {
  SetReport r;
  for (int d = 0; d < summarize::kMetricCount; ++d) {
    r.per_metric_jsd[d] = j["jsd"][summarize::kMetricNames[d]];
    r.agent_metric_mean[d] = j["agent_metric_mean"][summarize::kMetricNames[d]];
    r.agent_metric_var[d] = j["agent_metric_var"][summarize::kMetricNames[d]];
  }
  r.all_jsd = j["jsd"]["all"];
  for (int d = 0; d < summarize::kExtendedRowCount; ++d)
    r.agent_extended[d] = j["agent_extended"][kExtendedCsvKeys[d]];
  r.agent_episodes = j["agent_episodes"];
  r.expert_samples = j["expert_samples"];
  return r;
}

}  // namespace

std::string ExpertExtended::to_csv() const {
  std::ostringstream out;
  out << "metric,train,test\n";
  for (int d = 0; d < summarize::kExtendedRowCount; ++d)
    out << kExtendedCsvKeys[d] << "," << io::format_double(train[d]) << ","
        << io::format_double(test[d]) << "\n";
  return out.str();
}

ExpertExtended ExpertExtended::from_episode_csv(const std::string& csv) {
  // Per-episode rows: split,<15 extended values>. Averaged per split here.
  auto lines = io::split_lines(csv);
  if (lines.empty()) throw IoFailure("empty expert extended csv");
  ExpertExtended ex;
  std::array<double, summarize::kExtendedRowCount> sum_train{}, sum_test{};
  int n_train = 0, n_test = 0;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto tok = io::split(lines[i], ',');
    if (tok.size() != 1 + summarize::kExtendedRowCount)
      throw IoFailure("bad expert extended row: " + lines[i]);
    bool train = tok[0] == "train";
    for (int d = 0; d < summarize::kExtendedRowCount; ++d) {
      double v = io::parse_double(tok[1 + d]);
      (train ? sum_train : sum_test)[d] += v;
    }
    (train ? n_train : n_test)++;
  }
  for (int d = 0; d < summarize::kExtendedRowCount; ++d) {
    ex.train[d] = n_train > 0 ? sum_train[d] / n_train : 0.0;
    ex.test[d] = n_test > 0 ? sum_test[d] / n_test : 0.0;
  }
  return ex;
}

std::string EvalReport::to_summary_json() const {
  json j;
  j["train"] = set_report_json(train);
  j["test"] = set_report_json(test);
  j["expert_hash"] = io::hex64(expert_hash);
  j["config_hash"] = io::hex64(config_hash);
  if (players) {
    for (int d = 0; d < summarize::kExtendedRowCount; ++d) {
      j["players"]["train"][kExtendedCsvKeys[d]] = players->train[d];
      j["players"]["test"][kExtendedCsvKeys[d]] = players->test[d];
    }
  }
  return j.dump(2) + "\n";
}

EvalReport EvalReport::from_summary_json(const std::string& json_text) {
  json j = json::parse(json_text);
  EvalReport r;
  r.train = set_report_from_json(j["train"]);
  r.test = set_report_from_json(j["test"]);
  r.expert_hash = std::stoull(j["expert_hash"].get<std::string>(), nullptr, 16);
  r.config_hash = std::stoull(j["config_hash"].get<std::string>(), nullptr, 16);
  if (j.contains("players")) {
    ExpertExtended ex;
    for (int d = 0; d < summarize::kExtendedRowCount; ++d) {
      ex.train[d] = j["players"]["train"][kExtendedCsvKeys[d]];
      ex.test[d] = j["players"]["test"][kExtendedCsvKeys[d]];
    }
    r.players = ex;
  }
  return r;
}

EvalReport evaluate_agent(const policy::Nets& nets, const EvalParams& params,
                          const summarize::ExpertDataset& expert,
                          const summarize::NormalizationStats& stats) {
  if (params.episodes_per_set < 50)
    throw ConfigInvalid("evaluation needs at least 50 episodes per level set");
  if (params.train_levels.empty())
    throw ConfigInvalid("evaluation needs at least one train level");

  EvalReport report;
  for (int which = 0; which < 2; ++which) {
    bool is_train = which == 0;
    const std::vector<int> levels =
        is_train ? params.train_levels : std::vector<int>{params.test_level};
    summarize::Split split =
        is_train ? summarize::Split::kTrain : summarize::Split::kTest;

    int n = params.episodes_per_set;
    std::vector<summarize::MetricVector> agent_metrics(n);
    std::vector<std::array<double, summarize::kExtendedRowCount>> rows(n);

    parallel::parallel_for(n, params.workers, [&](int i) {
      int level_id = levels[i % levels.size()];
      env::LevelSpec level = env::generate_level(level_id, params.level_seed);
      Rng rng(derive_seed(params.eval_seed, which, i));
      std::vector<double> z =
          params.no_latent ? std::vector<double>(summarize::kMetricCount, 0.0)
                           : rng.normal_vec(summarize::kMetricCount);
      policy::Trajectory traj =
          policy::collect_episode(level, nets, z, rng, i, level_id);
      agent_metrics[i] = traj.metrics;
      rows[i] = summarize::extended_row(
          summarize::extended_metrics(traj.log, level));
    });

    std::vector<summarize::MetricVector> expert_raw =
        expert.split_metrics(split);
    if (expert_raw.empty())
      throw EmptySamples(is_train ? "no train expert samples"
                                  : "no test expert samples");

    SetReport set;
    set.agent_episodes = n;
    set.expert_samples = static_cast<int>(expert_raw.size());
    for (int d = 0; d < summarize::kMetricCount; ++d) {
      std::vector<double> agent_vals(n), expert_vals(expert_raw.size());
      for (int i = 0; i < n; ++i)
        agent_vals[i] =
            (agent_metrics[i][d] - stats.mean[d]) / stats.stddev[d];
      for (size_t i = 0; i < expert_raw.size(); ++i)
        expert_vals[i] = (expert_raw[i][d] - stats.mean[d]) / stats.stddev[d];
      set.per_metric_jsd[d] = jsd_1d(expert_vals, agent_vals, params.jsd);

      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += agent_metrics[i][d];
      mean /= n;
      double var = 0.0;
      for (int i = 0; i < n; ++i) {
        double diff = agent_metrics[i][d] - mean;
        var += diff * diff;
      }
      set.agent_metric_mean[d] = mean;
      set.agent_metric_var[d] = var / n;
    }
    double all = 0.0;
    for (double v : set.per_metric_jsd) all += v;
    set.all_jsd = all / summarize::kMetricCount;

    for (int i = 0; i < n; ++i)
      for (int d = 0; d < summarize::kExtendedRowCount; ++d)
        set.agent_extended[d] += rows[i][d] / n;

    (is_train ? report.train : report.test) = set;
  }
  return report;
}

void emit_tables(const EvalReport& report, const std::string& dir) {
  io::ensure_dir(dir);

  std::ostringstream jsd;
  jsd << "metric,train,test\n";
  for (int d = 0; d < summarize::kMetricCount; ++d)
    jsd << summarize::kMetricDisplayNames[d] << ","
        << io::format_double(report.train.per_metric_jsd[d]) << ","
        << io::format_double(report.test.per_metric_jsd[d]) << "\n";
  jsd << "All," << io::format_double(report.train.all_jsd) << ","
      << io::format_double(report.test.all_jsd) << "\n";
  io::write_file(dir + "/jsd.csv", jsd.str());

  std::ostringstream ext;
  ext << "metric,players_train,agent_train,players_test,agent_test\n";
  for (int d = 0; d < summarize::kExtendedRowCount; ++d) {
    ext << summarize::kExtendedRowNames[d] << ",";
    if (report.players) ext << io::format_double(report.players->train[d]);
    ext << "," << io::format_double(report.train.agent_extended[d]) << ",";
    if (report.players) ext << io::format_double(report.players->test[d]);
    ext << "," << io::format_double(report.test.agent_extended[d]) << "\n";
  }
  io::write_file(dir + "/extended.csv", ext.str());

  io::write_file(dir + "/summary.json", report.to_summary_json());
}

void emit_comparison_tables(const EvalReport& carmi, const EvalReport& ailad,
                            const std::string& dir) {
  io::ensure_dir(dir);

  std::ostringstream t3;
  t3 << "metric,carmi_train,ailad_train,carmi_test,ailad_test\n";
  for (int d = 0; d < summarize::kMetricCount; ++d)
    t3 << summarize::kMetricDisplayNames[d] << ","
       << io::format_double(carmi.train.per_metric_jsd[d]) << ","
       << io::format_double(ailad.train.per_metric_jsd[d]) << ","
       << io::format_double(carmi.test.per_metric_jsd[d]) << ","
       << io::format_double(ailad.test.per_metric_jsd[d]) << "\n";
  t3 << "All," << io::format_double(carmi.train.all_jsd) << ","
     << io::format_double(ailad.train.all_jsd) << ","
     << io::format_double(carmi.test.all_jsd) << ","
     << io::format_double(ailad.test.all_jsd) << "\n";
  io::write_file(dir + "/jsd_comparison.csv", t3.str());

  const EvalReport* with_players =
      ailad.players ? &ailad : (carmi.players ? &carmi : nullptr);
  std::ostringstream t4;
  t4 << "metric,players_train,carmi_train,ailad_train,players_test,"
        "carmi_test,ailad_test\n";
  for (int d = 0; d < summarize::kExtendedRowCount; ++d) {
    t4 << summarize::kExtendedRowNames[d] << ",";
    if (with_players)
      t4 << io::format_double((*with_players->players).train[d]);
    t4 << "," << io::format_double(carmi.train.agent_extended[d]) << ","
       << io::format_double(ailad.train.agent_extended[d]) << ",";
    if (with_players) t4 << io::format_double((*with_players->players).test[d]);
    t4 << "," << io::format_double(carmi.test.agent_extended[d]) << ","
       << io::format_double(ailad.test.agent_extended[d]) << "\n";
  }
  io::write_file(dir + "/absolute_metrics.csv", t4.str());
}

}  // namespace ailad::eval
