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

#ifndef AILAD_DISCRIMINATOR_HPP_
#define AILAD_DISCRIMINATOR_HPP_

#include <string>
#include <vector>

#include "ailad/nn.hpp"
#include "ailad/rng.hpp"
#include "ailad/summarize.hpp"

// The reward learner over normalized metric space. The scalar net f is
// combined with a fill-in estimate q of the agent's own density:
//   D(m) = exp(f(m)) / (exp(f(m)) + q(m))  computed as logistic(f - log q),
//   r(m) = log D - log(1-D)                which collapses to f - log q.
// The plain-sigmoid ablation drops the correction: D = logistic(f).
namespace ailad::discriminator {

using summarize::MetricVector;

inline constexpr double kOutputClamp = 1e-7;
inline constexpr double kRewardClamp = 20.0;
inline constexpr double kDefaultFillInConstant = 0.3;

// log q to substitute into D when the agent density is fixed or estimated.
struct FillInValue {
  double log_q = 0.0;
  static FillInValue constant(double c) { return {std::log(c)}; }
  static FillInValue log_value(double lq) { return {lq}; }
};

struct Discriminator {
  nn::MlpSpec f_spec;
  nn::ParamVector f_params;
  bool plain_sigmoid = false;  // ablation: no density correction

  double f(const MetricVector& m) const;
};

Discriminator make_discriminator(Rng& rng, bool plain_sigmoid = false,
                                 const std::vector<int>& hidden = {64, 64});

// D(m) in (0,1), clamped away from 0 and 1.
double d_output(const Discriminator& d, const MetricVector& m,
                const FillInValue& q);

// r = log D - log(1-D), clamped to [-kRewardClamp, kRewardClamp].
double reward(const Discriminator& d, const MetricVector& m,
              const FillInValue& q);

struct PretrainResult {
  int steps = 0;
  double final_loss = 0.0;
  double holdout_auc = 0.0;
  std::string curve_jsonl;  // one record per logged step
};

// Binary cross-entropy pretraining: expert metrics labeled 1, synthetic
// negatives 0, a fixed fill-in constant c for every point. When
// per_point_log_q is non-null it overrides log(c) per point (negatives
// first, experts appended), which is the real-fill-in ablation.
PretrainResult pretrain(Discriminator& d,
                        const std::vector<MetricVector>& expert,
                        const std::vector<MetricVector>& negatives, double c,
                        int steps, double lr, uint64_t seed,
                        const std::vector<double>* expert_log_q = nullptr,
                        const std::vector<double>* negative_log_q = nullptr,
                        int threads = 1);

using LabeledMetric = std::pair<MetricVector, FillInValue>;

// One optimizer step on mean BCE over both batches. Every entry carries its
// fill-in: agent entries their density-derived log q, expert entries the
// agent density evaluated at the expert point (or the constant while the
// density is not yet available). Returns the post-step loss.
double update(Discriminator& d, nn::AdamState& opt, double lr,
              const std::vector<LabeledMetric>& expert_batch,
              const std::vector<LabeledMetric>& agent_batch, int threads = 1);

// Broad negatives in normalized space: N(0, 3^2) per dimension, resampled so
// the denormalized counts stay >= 0.
std::vector<MetricVector> synthesize_negatives(
    const summarize::NormalizationStats& stats, int n, Rng& rng);

// Log-density of the negative sampler itself (per-dimension truncated
// normal); feeds the real-fill-in ablation.
double negative_sampler_log_density(const summarize::NormalizationStats& stats,
                                    const MetricVector& normalized);

// Rank-based AUC of scores (positives vs negatives).
double auc(const std::vector<double>& positive_scores,
           const std::vector<double>& negative_scores);

}  // namespace ailad::discriminator

#endif  // AILAD_DISCRIMINATOR_HPP_
