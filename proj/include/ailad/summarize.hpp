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

#ifndef AILAD_SUMMARIZE_HPP_
#define AILAD_SUMMARIZE_HPP_

#include <array>
#include <string>
#include <vector>

#include "ailad/env.hpp"

// The summarizing map from an episode to its aggregated metrics, the Gaussian
// normalizer fitted on the expert set, and the expert dataset container.
namespace ailad::summarize {

inline constexpr int kMetricCount = 7;

// Canonical metric order. Every vector, CSV column and report row follows it.
extern const std::array<std::string, kMetricCount> kMetricNames;
extern const std::array<std::string, kMetricCount> kMetricDisplayNames;

using MetricVector = std::array<double, kMetricCount>;

// Copies the seven per-episode counters in canonical order.
MetricVector summarize(const env::EventLog& log);

struct NormalizationStats {
  std::array<double, kMetricCount> mean{};
  std::array<double, kMetricCount> stddev{};
  double std_floor = 1e-6;

  std::string to_text() const;
  static NormalizationStats from_text(const std::string& text);
  bool operator==(const NormalizationStats&) const = default;
};

enum class Split { kTrain, kTest };

struct ExpertDataset {
  std::vector<MetricVector> metrics;  // raw episode counts
  std::vector<int> level_ids;
  std::vector<Split> splits;
  std::vector<int> style_ids;  // synthetic provenance; never fed to learners

  size_t size() const { return metrics.size(); }
  std::vector<MetricVector> split_metrics(Split s) const;

  // Learner-facing CSV: level,split,<7 metric columns>. Style ids are kept
  // out on purpose.
  std::string to_csv() const;
  static ExpertDataset from_csv(const std::string& csv);
};

// Per-dimension population mean/std over the dataset, std clamped from below.
// Throws InsufficientData on fewer than two samples.
NormalizationStats fit_normalizer(const std::vector<MetricVector>& samples,
                                  double std_floor = 1e-6);

MetricVector normalize(const MetricVector& m, const NormalizationStats& stats);
MetricVector denormalize(const MetricVector& m,
                         const NormalizationStats& stats);

// Extended in-game report for one episode: the seven training metrics plus
// position- and outcome-derived values.
struct ExtendedMetrics {
  MetricVector metrics{};
  double avg_distance_between_heroes = 0.0;
  double avg_distance_to_enemies = 0.0;
  double heroes_pct_hp_lost = 0.0;
  double enemies_pct_hp_lost = 0.0;
  double win = 0.0;
  double lose = 0.0;
  double draw = 0.0;
  double turns = 0.0;
};

inline constexpr int kExtendedRowCount = 15;
extern const std::array<std::string, kExtendedRowCount> kExtendedRowNames;

ExtendedMetrics extended_metrics(const env::EventLog& log,
                                 const env::LevelSpec& level);

// Row view in the canonical extended-table order.
std::array<double, kExtendedRowCount> extended_row(const ExtendedMetrics& em);

}  // namespace ailad::summarize

#endif  // AILAD_SUMMARIZE_HPP_
