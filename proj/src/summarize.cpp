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

#include "ailad/summarize.hpp"

#include <cmath>
#include <sstream>

#include "ailad/errors.hpp"
#include "ailad/io.hpp"

namespace ailad::summarize {

const std::array<std::string, kMetricCount> kMetricNames = {
    "shots",   "stabs", "shots_taken",    "stabs_taken",
    "shields", "heals", "empowered_shots"};

const std::array<std::string, kMetricCount> kMetricDisplayNames = {
    "Shots",   "Stabs", "Shots Taken",    "Stabs Taken",
    "Shields", "Heals", "Shots Empowered"};

const std::array<std::string, kExtendedRowCount> kExtendedRowNames = {
    "Shots",
    "Stabs",
    "Shots Taken",
    "Stabs Taken",
    "Shields",
    "Heals",
    "Shots Empowered",
    "Average Distance Between Heroes",
    "Average Distance To Enemies",
    "Heroes % Lost HP",
    "Enemies % Lost HP",
    "% Win",
    "% Lost",
    "% Draw",
    "Nb of Turns"};

MetricVector summarize(const env::EventLog& log) {
  return {static_cast<double>(log.shots_by_heroes),
          static_cast<double>(log.stabs_by_heroes),
          static_cast<double>(log.shots_taken),
          static_cast<double>(log.stabs_taken),
          static_cast<double>(log.shields_used),
          static_cast<double>(log.heals_used),
          static_cast<double>(log.empowered_shots)};
}

NormalizationStats fit_normalizer(const std::vector<MetricVector>& samples,
                                  double std_floor) {
  if (samples.size() < 2)
    throw InsufficientData("fit_normalizer needs at least 2 samples, got " +
                           std::to_string(samples.size()));
  NormalizationStats stats;
  stats.std_floor = std_floor;
  const double n = static_cast<double>(samples.size());
  for (int d = 0; d < kMetricCount; ++d) {
    double sum = 0.0;
    for (const auto& m : samples) sum += m[d];
    double mean = sum / n;
    double sq = 0.0;
    for (const auto& m : samples) {
      double diff = m[d] - mean;
      sq += diff * diff;
    }
    stats.mean[d] = mean;
    stats.stddev[d] = std::max(std::sqrt(sq / n), std_floor);
  }
  return stats;
}

MetricVector normalize(const MetricVector& m,
                       const NormalizationStats& stats) {
  MetricVector out;
  for (int d = 0; d < kMetricCount; ++d)
    out[d] = (m[d] - stats.mean[d]) / stats.stddev[d];
  return out;
}

MetricVector denormalize(const MetricVector& m,
                         const NormalizationStats& stats) {
  MetricVector out;
  for (int d = 0; d < kMetricCount; ++d)
    out[d] = m[d] * stats.stddev[d] + stats.mean[d];
  return out;
}

std::string NormalizationStats::to_text() const {
  std::ostringstream out;
  out << "normstats v1\n";
  out << "floor " << io::format_double(std_floor) << "\n";
  out << "mean";
  for (double v : mean) out << " " << io::format_double(v);
  out << "\nstd";
  for (double v : stddev) out << " " << io::format_double(v);
  out << "\n";
  return out.str();
}

NormalizationStats NormalizationStats::from_text(const std::string& text) {
  NormalizationStats stats;
  auto lines = io::split_lines(text);
  if (lines.empty() || lines[0] != "normstats v1")
    throw IoFailure("bad normstats header");
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto tok = io::split(lines[i], ' ');
    if (tok[0] == "floor" && tok.size() == 2) {
      stats.std_floor = io::parse_double(tok[1]);
    } else if (tok[0] == "mean" && tok.size() == kMetricCount + 1) {
      for (int d = 0; d < kMetricCount; ++d)
        stats.mean[d] = io::parse_double(tok[d + 1]);
    } else if (tok[0] == "std" && tok.size() == kMetricCount + 1) {
      for (int d = 0; d < kMetricCount; ++d)
        stats.stddev[d] = io::parse_double(tok[d + 1]);
    } else {
      throw IoFailure("unknown normstats key: " + tok[0]);
    }
  }
  return stats;
}

std::vector<MetricVector> ExpertDataset::split_metrics(Split s) const {
  std::vector<MetricVector> out;
  for (size_t i = 0; i < metrics.size(); ++i)
    if (splits[i] == s) out.push_back(metrics[i]);
  return out;
}

std::string ExpertDataset::to_csv() const {
  std::ostringstream out;
  out << "level,split";
  for (const auto& name : kMetricNames) out << "," << name;
  out << "\n";
  for (size_t i = 0; i < metrics.size(); ++i) {
    out << level_ids[i] << ","
        << (splits[i] == Split::kTrain ? "train" : "test");
    for (double v : metrics[i]) out << "," << io::format_double(v);
    out << "\n";
  }
  return out.str();
}

ExpertDataset ExpertDataset::from_csv(const std::string& csv) {
  ExpertDataset ds;
  auto lines = io::split_lines(csv);
  if (lines.empty()) throw IoFailure("empty expert csv");
  std::string expected_header = "level,split";
  for (const auto& name : kMetricNames) expected_header += "," + name;
  if (lines[0] != expected_header)
    throw IoFailure("unexpected expert csv header: " + lines[0]);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto tok = io::split(lines[i], ',');
    if (tok.size() != 2 + kMetricCount)
      throw IoFailure("bad expert csv row: " + lines[i]);
    ds.level_ids.push_back(static_cast<int>(io::parse_int(tok[0])));
    if (tok[1] == "train") ds.splits.push_back(Split::kTrain);
    else if (tok[1] == "test") ds.splits.push_back(Split::kTest);
    else throw IoFailure("bad split tag: " + tok[1]);
    MetricVector m;
    for (int d = 0; d < kMetricCount; ++d)
      m[d] = io::parse_double(tok[2 + d]);
    ds.metrics.push_back(m);
    ds.style_ids.push_back(-1);
  }
  if (ds.metrics.empty()) throw IoFailure("expert csv has no rows");
  return ds;
}

ExtendedMetrics extended_metrics(const env::EventLog& log,
                                 const env::LevelSpec& level) {
  ExtendedMetrics em;
  em.metrics = summarize(log);

  // Distances averaged over turn snapshots; units dead in a snapshot are
  // excluded from it.
  double hero_pair_sum = 0.0;
  int hero_pair_turns = 0;
  double cross_sum = 0.0;
  int cross_turns = 0;
  for (const auto& snap : log.turn_snapshots) {
    double pair_sum = 0.0;
    int pairs = 0;
    for (int a = 0; a < env::kHeroCount; ++a) {
      if (!snap.hero_alive[a]) continue;
      for (int b = a + 1; b < env::kHeroCount; ++b) {
        if (!snap.hero_alive[b]) continue;
        pair_sum += env::euclid(snap.hero_pos[a], snap.hero_pos[b]);
        ++pairs;
      }
    }
    if (pairs > 0) {
      hero_pair_sum += pair_sum / pairs;
      ++hero_pair_turns;
    }
    double cs = 0.0;
    int cn = 0;
    for (int h = 0; h < env::kHeroCount; ++h) {
      if (!snap.hero_alive[h]) continue;
      for (int e = 0; e < env::kMaxEnemies; ++e) {
        if (!snap.enemy_alive[e]) continue;
        cs += env::euclid(snap.hero_pos[h], snap.enemy_pos[e]);
        ++cn;
      }
    }
    if (cn > 0) {
      cross_sum += cs / cn;
      ++cross_turns;
    }
  }
  em.avg_distance_between_heroes =
      hero_pair_turns > 0 ? hero_pair_sum / hero_pair_turns : 0.0;
  em.avg_distance_to_enemies =
      cross_turns > 0 ? cross_sum / cross_turns : 0.0;

  int hero_total_hp = 0;
  for (int h = 0; h < env::kHeroCount; ++h)
    hero_total_hp +=
        env::hero_base_stats(static_cast<env::HeroClass>(h)).max_hp;
  int enemy_total_hp = level.enemy_count * env::enemy_base_stats().max_hp;
  em.heroes_pct_hp_lost =
      100.0 * (log.hero_damage_taken - log.hero_hp_healed) / hero_total_hp;
  em.enemies_pct_hp_lost = 100.0 * log.enemy_damage_taken / enemy_total_hp;

  em.win = log.outcome == env::Outcome::kWin ? 1.0 : 0.0;
  em.lose = log.outcome == env::Outcome::kLose ? 1.0 : 0.0;
  em.draw = log.outcome == env::Outcome::kDraw ? 1.0 : 0.0;
  em.turns = static_cast<double>(log.turns_played);
  return em;
}

std::array<double, kExtendedRowCount> extended_row(const ExtendedMetrics& em) {
  std::array<double, kExtendedRowCount> row;
  for (int d = 0; d < kMetricCount; ++d) row[d] = em.metrics[d];
  row[7] = em.avg_distance_between_heroes;
  row[8] = em.avg_distance_to_enemies;
  row[9] = em.heroes_pct_hp_lost;
  row[10] = em.enemies_pct_hp_lost;
  row[11] = 100.0 * em.win;
  row[12] = 100.0 * em.lose;
  row[13] = 100.0 * em.draw;
  row[14] = em.turns;
  return row;
}

}  // namespace ailad::summarize
