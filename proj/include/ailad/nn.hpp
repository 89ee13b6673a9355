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

#ifndef AILAD_NN_HPP_
#define AILAD_NN_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ailad/rng.hpp"

// Minimal MLP substrate with exact analytic gradients: tanh hidden layers and
// linear / masked-softmax / sigmoid heads. No hidden global state anywhere;
// forward and backward are pure functions of (spec, params, input).
namespace ailad::nn {

enum class Head { kLinear = 0, kMaskedSoftmax = 1, kSigmoid = 2 };

struct MlpSpec {
  std::vector<int> widths;  // input, hidden..., output
  Head head = Head::kLinear;
  double init_scale = 1.0;

  int input_size() const { return widths.front(); }
  int output_size() const { return widths.back(); }
  int layer_count() const { return static_cast<int>(widths.size()) - 1; }
  size_t param_count() const;
  bool operator==(const MlpSpec&) const = default;
};

struct ParamVector {
  std::vector<double> values;
  size_t size() const { return values.size(); }
};

ParamVector zero_params(const MlpSpec& spec);
// Uniform(-scale/sqrt(fan_in), +scale/sqrt(fan_in)) weights, zero biases.
ParamVector init_params(const MlpSpec& spec, Rng& rng);

// Activation cache reused across forward/backward and across calls.
struct Workspace {
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = layer l out
  std::vector<double> logits;            // pre-head output of the last layer
  std::vector<double> output;            // head output
};

// mask is required (and only allowed) for the masked-softmax head; it must
// have at least one set entry. Masked entries get probability exactly 0.
void forward(const MlpSpec& spec, const ParamVector& params,
             const std::vector<double>& input, const uint8_t* mask,
             Workspace& ws);

std::vector<double> forward(const MlpSpec& spec, const ParamVector& params,
                            const std::vector<double>& input,
                            const std::vector<uint8_t>* mask = nullptr);

struct GradRecord {
  std::vector<double> grad;
  double loss = 0.0;
};

// Accumulates dL/dparams into grad given dL/d(output) in `upstream`. For the
// masked-softmax head, `upstream_is_logit_grad` lets the caller hand over
// dL/d(logits) directly, which is the numerically sound route for log-prob
// and entropy losses.
void backward(const MlpSpec& spec, const ParamVector& params,
              const Workspace& ws, const uint8_t* mask,
              const std::vector<double>& upstream, bool upstream_is_logit_grad,
              std::vector<double>& grad);

// Same, accumulating into a raw slice of length spec.param_count().
void backward_into(const MlpSpec& spec, const ParamVector& params,
                   const Workspace& ws, const uint8_t* mask,
                   const std::vector<double>& upstream,
                   bool upstream_is_logit_grad, double* grad);

GradRecord backward(const MlpSpec& spec, const ParamVector& params,
                    const std::vector<double>& input, const uint8_t* mask,
                    const std::vector<double>& upstream);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m, v;
  int64_t t = 0;
  explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(ParamVector& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& cfg);

// Versioned binary checkpoint with the spec embedded, plus a text manifest
// carrying shapes and a content hash.
void save_checkpoint(const std::string& path, const MlpSpec& spec,
                     const ParamVector& params);
std::pair<MlpSpec, ParamVector> load_checkpoint(const std::string& path);

// Numerically stable helpers shared with the discriminator.
double logistic(double x);
double log1p_exp(double x);  // log(1 + e^x)

}  // namespace ailad::nn

#endif  // AILAD_NN_HPP_
