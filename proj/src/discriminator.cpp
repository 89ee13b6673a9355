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

#include "ailad/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "ailad/density.hpp"
#include "ailad/errors.hpp"
#include "ailad/io.hpp"
#include "ailad/parallel.hpp"

namespace ailad::discriminator {

namespace {

std::vector<double> to_vec(const MetricVector& m) {
  return std::vector<double>(m.begin(), m.end());
}

// BCE gradient-on-f for one point: dL/df = D - y with D = logistic(f - log q)
// (or logistic(f) in the plain-sigmoid ablation).
double point_loss_and_grad(const Discriminator& d, const MetricVector& m,
                           double log_q, double y, double weight,
                           std::vector<double>& grad) {
  nn::Workspace ws;
  std::vector<double> input = to_vec(m);
  nn::forward(d.f_spec, d.f_params, input, nullptr, ws);
  double logit = d.plain_sigmoid ? ws.output[0] : ws.output[0] - log_q;
  double prob = nn::logistic(logit);
  // loss = -y log D - (1-y) log(1-D), stable through log1p_exp
  double loss = y > 0.5 ? nn::log1p_exp(-logit) : nn::log1p_exp(logit);
  std::vector<double> upstream = {(prob - y) * weight};
  nn::backward(d.f_spec, d.f_params, ws, nullptr, upstream, false, grad);
  return loss * weight;
}

}  // namespace

double Discriminator::f(const MetricVector& m) const {
  return nn::forward(f_spec, f_params, to_vec(m))[0];
}

Discriminator make_discriminator(Rng& rng, bool plain_sigmoid,
                                 const std::vector<int>& hidden) {
  Discriminator d;
  d.f_spec.widths = {summarize::kMetricCount};
  for (int h : hidden) d.f_spec.widths.push_back(h);
  d.f_spec.widths.push_back(1);
  d.f_spec.head = nn::Head::kLinear;
  d.f_params = nn::init_params(d.f_spec, rng);
  d.plain_sigmoid = plain_sigmoid;
  return d;
}

double d_output(const Discriminator& d, const MetricVector& m,
                const FillInValue& q) {
  double logit = d.plain_sigmoid ? d.f(m) : d.f(m) - q.log_q;
  double prob = nn::logistic(logit);
  return std::clamp(prob, kOutputClamp, 1.0 - kOutputClamp);
}

double reward(const Discriminator& d, const MetricVector& m,
              const FillInValue& q) {
  double r = d.plain_sigmoid ? d.f(m) : d.f(m) - q.log_q;
  return std::clamp(r, -kRewardClamp, kRewardClamp);
}

PretrainResult pretrain(Discriminator& d,
                        const std::vector<MetricVector>& expert,
                        const std::vector<MetricVector>& negatives, double c,
                        int steps, double lr, uint64_t seed,
                        const std::vector<double>* expert_log_q,
                        const std::vector<double>* negative_log_q,
                        int threads) {
  if (expert.empty() || negatives.empty())
    throw EmptySet("pretrain needs nonempty expert and negative sets");
  if (c <= 0.0) throw ConfigInvalid("fill-in constant must be positive");

  double log_c = std::log(c);
  auto lq_expert = [&](size_t i) {
    return expert_log_q ? (*expert_log_q)[i] : log_c;
  };
  auto lq_negative = [&](size_t i) {
    return negative_log_q ? (*negative_log_q)[i] : log_c;
  };

  // Deterministic 80/20 holdout split per class.
  Rng rng(derive_seed(seed, 0xd15c));
  auto make_split = [&rng](size_t n) {
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    for (size_t i = n - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.uniform_int(static_cast<int>(i + 1))]);
    size_t n_train = std::max<size_t>(1, (n * 8) / 10);
    return std::pair(std::vector<size_t>(idx.begin(), idx.begin() + n_train),
                     std::vector<size_t>(idx.begin() + n_train, idx.end()));
  };
  auto [expert_train, expert_hold] = make_split(expert.size());
  auto [neg_train, neg_hold] = make_split(negatives.size());

  nn::AdamState opt(d.f_params.size());
  nn::AdamConfig adam{lr, 0.9, 0.999, 1e-8};
  const int batch = 64;

  auto holdout_auc = [&]() {
    std::vector<double> pos, neg;
    for (size_t i : expert_hold) pos.push_back(d.f(expert[i]) - lq_expert(i));
    for (size_t i : neg_hold) neg.push_back(d.f(negatives[i]) - lq_negative(i));
    if (pos.empty() || neg.empty()) return 0.5;
    return auc(pos, neg);
  };

  PretrainResult result;
  std::ostringstream curve;
  int log_every = std::max(1, steps / 20);
  std::vector<double> grad;
  for (int step = 0; step < steps; ++step) {
    struct Pick {
      const MetricVector* m;
      double log_q, y;
    };
    std::vector<Pick> picks;
    picks.reserve(2 * batch);
    for (int b = 0; b < batch; ++b) {
      size_t i = expert_train[rng.uniform_int(static_cast<int>(expert_train.size()))];
      picks.push_back({&expert[i], lq_expert(i), 1.0});
    }
    for (int b = 0; b < batch; ++b) {
      size_t i = neg_train[rng.uniform_int(static_cast<int>(neg_train.size()))];
      picks.push_back({&negatives[i], lq_negative(i), 0.0});
    }
    double w = 1.0 / picks.size();
    double loss = parallel::batch_accumulate(
        d.f_params.size(), static_cast<int>(picks.size()),
        [&](int i, std::vector<double>& g) {
          return point_loss_and_grad(d, *picks[i].m, picks[i].log_q,
                                     picks[i].y, w, g);
        },
        grad, threads);
    nn::adam_step(d.f_params, grad, opt, adam);
    result.final_loss = loss;
    if ((step + 1) % log_every == 0 || step + 1 == steps) {
      curve << "{\"step\":" << (step + 1)
            << ",\"loss\":" << io::format_double(loss)
            << ",\"auc\":" << io::format_double(holdout_auc()) << "}\n";
    }
  }
  result.steps = steps;
  result.holdout_auc = holdout_auc();
  result.curve_jsonl = curve.str();
  return result;
}

double update(Discriminator& d, nn::AdamState& opt, double lr,
              const std::vector<LabeledMetric>& expert_batch,
              const std::vector<LabeledMetric>& agent_batch, int threads) {
  if (expert_batch.empty() || agent_batch.empty())
    throw EmptySet("discriminator update needs nonempty batches");
  int total = static_cast<int>(expert_batch.size() + agent_batch.size());
  double w = 1.0 / total;

  auto sample = [&](int i) -> std::tuple<const MetricVector*, double, double> {
    if (i < static_cast<int>(expert_batch.size()))
      return {&expert_batch[i].first, expert_batch[i].second.log_q, 1.0};
    const auto& a = agent_batch[i - expert_batch.size()];
    return {&a.first, a.second.log_q, 0.0};
  };

  std::vector<double> grad;
  parallel::batch_accumulate(
      d.f_params.size(), total,
      [&](int i, std::vector<double>& g) {
        auto [m, log_q, y] = sample(i);
        return point_loss_and_grad(d, *m, log_q, y, w, g);
      },
      grad, threads);
  nn::AdamConfig adam{lr, 0.9, 0.999, 1e-8};
  nn::adam_step(d.f_params, grad, opt, adam);

  // Post-step loss, as reported to the training log.
  double loss = 0.0;
  for (int i = 0; i < total; ++i) {
    auto [m, log_q, y] = sample(i);
    double logit = d.plain_sigmoid ? d.f(*m) : d.f(*m) - log_q;
    loss += (y > 0.5 ? nn::log1p_exp(-logit) : nn::log1p_exp(logit)) * w;
  }
  return loss;
}

std::vector<MetricVector> synthesize_negatives(
    const summarize::NormalizationStats& stats, int n, Rng& rng) {
  if (n < 1) throw ConfigInvalid("synthesize_negatives needs n >= 1");
  std::vector<MetricVector> out(n);
  for (int i = 0; i < n; ++i) {
    for (int dm = 0; dm < summarize::kMetricCount; ++dm) {
      // Denormalized counts must stay >= 0.
      double lb = -stats.mean[dm] / stats.stddev[dm];
      double x = lb;
      for (int tries = 0; tries < 1000; ++tries) {
        x = 3.0 * rng.normal();
        if (x >= lb) break;
        x = lb;
      }
      out[i][dm] = x;
    }
  }
  return out;
}

double negative_sampler_log_density(const summarize::NormalizationStats& stats,
                                    const MetricVector& normalized) {
  constexpr double kHalfLog2Pi = 0.9189385332046727;
  double lp = 0.0;
  for (int dm = 0; dm < summarize::kMetricCount; ++dm) {
    double lb = -stats.mean[dm] / stats.stddev[dm];
    double x = normalized[dm];
    if (x < lb - 1e-9) return density::kLogDensityFloor;
    double z = x / 3.0;
    // Mass kept by truncation at lb: 1 - Phi(lb/3).
    double keep = 0.5 * std::erfc(lb / 3.0 / std::sqrt(2.0));
    keep = std::max(keep, 1e-300);
    lp += -0.5 * z * z - kHalfLog2Pi - std::log(3.0) - std::log(keep);
  }
  return lp;
}

double auc(const std::vector<double>& positive_scores,
           const std::vector<double>& negative_scores) {
  // Mann-Whitney U via average ranks.
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) all.push_back({s, true});
  for (double s : negative_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j + 1 < all.size() && all[j + 1].score == all[i].score) ++j;
    double avg_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (size_t k = i; k <= j; ++k)
      if (all[k].positive) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  double np = static_cast<double>(positive_scores.size());
  double nn_ = static_cast<double>(negative_scores.size());
  double u = rank_sum_pos - np * (np + 1) / 2.0;
  return u / (np * nn_);
}

}  // namespace ailad::discriminator
