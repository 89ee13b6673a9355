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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ailad/errors.hpp"
#include "ailad/nn.hpp"
#include "ailad/parallel.hpp"

using namespace ailad;
using namespace ailad::nn;

namespace {

// Central-difference gradient of a scalar loss over the parameters.
std::vector<double> fd_gradient(
    const MlpSpec& spec, const ParamVector& params,
    const std::function<double(const ParamVector&)>& loss, double eps) {
  std::vector<double> grad(params.size());
  ParamVector p = params;
  for (size_t i = 0; i < p.size(); ++i) {
    double saved = p.values[i];
    p.values[i] = saved + eps;
    double up = loss(p);
    p.values[i] = saved - eps;
    double down = loss(p);
    p.values[i] = saved;
    grad[i] = (up - down) / (2 * eps);
  }
  return grad;
}

double max_rel_error(const std::vector<double>& a,
                     const std::vector<double>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-8});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("masked softmax with one legal entry puts probability 1 on it") {
  MlpSpec spec;
  spec.widths = {3, 4};
  spec.head = Head::kMaskedSoftmax;
  Rng rng(1);
  ParamVector params = init_params(spec, rng);
  std::vector<uint8_t> mask = {0, 0, 1, 0};
  auto out = forward(spec, params, {0.3, -0.2, 0.9}, &mask);
  CHECK(out[2] == doctest::Approx(1.0));
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  CHECK(out[3] == 0.0);
}

TEST_CASE("zero parameters give a uniform masked softmax") {
  MlpSpec spec;
  spec.widths = {5, 6};
  spec.head = Head::kMaskedSoftmax;
  ParamVector params = zero_params(spec);
  std::vector<uint8_t> mask = {1, 0, 1, 1, 0, 1};
  auto out = forward(spec, params, {1, 2, 3, 4, 5}, &mask);
  for (int i = 0; i < 6; ++i)
    CHECK(out[i] == doctest::Approx(mask[i] ? 0.25 : 0.0));
}

TEST_CASE("identity-weight linear layer reproduces its input") {
  MlpSpec spec;
  spec.widths = {3, 3};
  spec.head = Head::kLinear;
  ParamVector params = zero_params(spec);
  for (int i = 0; i < 3; ++i) params.values[i * 3 + i] = 1.0;
  std::vector<double> x = {0.5, -1.25, 2.0};
  CHECK(forward(spec, params, x) == x);
}

TEST_CASE("masked softmax sums to one over legal entries") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    MlpSpec spec;
    spec.widths = {4, 8, 9};
    spec.head = Head::kMaskedSoftmax;
    ParamVector params = init_params(spec, rng);
    std::vector<uint8_t> mask(9, 0);
    int n_legal = 1 + rng.uniform_int(9);
    for (int i = 0; i < n_legal; ++i) mask[rng.uniform_int(9)] = 1;
    auto out = forward(spec, params, rng.normal_vec(4), &mask);
    double total = 0.0;
    for (int i = 0; i < 9; ++i) {
      if (!mask[i]) CHECK(out[i] == 0.0);
      total += out[i];
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("empty mask is rejected") {
  MlpSpec spec;
  spec.widths = {2, 3};
  spec.head = Head::kMaskedSoftmax;
  ParamVector params = zero_params(spec);
  std::vector<uint8_t> mask = {0, 0, 0};
  CHECK_THROWS_AS(forward(spec, params, {1, 2}, &mask), EmptyMask);
  CHECK_THROWS_AS(forward(spec, params, {1, 2}), EmptyMask);
}

TEST_CASE("shape mismatches are rejected") {
  MlpSpec spec;
  spec.widths = {2, 3};
  ParamVector params = zero_params(spec);
  CHECK_THROWS_AS(forward(spec, params, {1, 2, 3}), ShapeMismatch);
  ParamVector bad;
  bad.values.assign(4, 0.0);
  CHECK_THROWS_AS(forward(spec, bad, {1, 2}), ShapeMismatch);
}

TEST_CASE("linear quadratic loss matches the closed-form gradient") {
  // Single linear unit, loss (w.x - y)^2: gradient is 2(w.x - y) x.
  MlpSpec spec;
  spec.widths = {3, 1};
  spec.head = Head::kLinear;
  Rng rng(4);
  ParamVector params = init_params(spec, rng);
  std::vector<double> x = {0.7, -1.1, 0.4};
  double target = 0.25;

  Workspace ws;
  forward(spec, params, x, nullptr, ws);
  double err = ws.output[0] - target;
  std::vector<double> grad(spec.param_count(), 0.0);
  backward(spec, params, ws, nullptr, {2.0 * err}, false, grad);

  for (int i = 0; i < 3; ++i)
    CHECK(grad[i] == doctest::Approx(2.0 * err * x[i]));
  CHECK(grad[3] == doctest::Approx(2.0 * err));  // bias
}

TEST_CASE("analytic gradients agree with central differences on all heads") {
  Rng rng(123);
  const double eps = 1e-5;
  for (int trial = 0; trial < 30; ++trial) {
    Head head = static_cast<Head>(trial % 3);
    MlpSpec spec;
    int in = 2 + rng.uniform_int(4);
    int hid = 3 + rng.uniform_int(5);
    int out = head == Head::kMaskedSoftmax ? 3 + rng.uniform_int(4) : 1 + rng.uniform_int(3);
    spec.widths = {in, hid, out};
    spec.head = head;
    ParamVector params = init_params(spec, rng);
    std::vector<double> input = rng.normal_vec(in);
    std::vector<uint8_t> mask(out, 1);
    if (head == Head::kMaskedSoftmax && out > 2) mask[0] = 0;
    const uint8_t* mask_ptr = head == Head::kMaskedSoftmax ? mask.data() : nullptr;

    // Random linear functional of the output as the scalar loss.
    std::vector<double> c = rng.normal_vec(out);
    auto loss = [&](const ParamVector& p) {
      Workspace ws;
      forward(spec, p, input, mask_ptr, ws);
      double l = 0.0;
      for (int i = 0; i < out; ++i) l += c[i] * ws.output[i];
      return l;
    };

    Workspace ws;
    forward(spec, params, input, mask_ptr, ws);
    std::vector<double> analytic(spec.param_count(), 0.0);
    backward(spec, params, ws, mask_ptr, c, false, analytic);

    std::vector<double> numeric = fd_gradient(spec, params, loss, eps);
    CHECK(max_rel_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("log-prob loss through the logit-space path matches differences") {
  Rng rng(321);
  MlpSpec spec;
  spec.widths = {4, 6, 5};
  spec.head = Head::kMaskedSoftmax;
  ParamVector params = init_params(spec, rng);
  std::vector<double> input = rng.normal_vec(4);
  std::vector<uint8_t> mask = {1, 1, 0, 1, 1};
  int action = 3;

  auto loss = [&](const ParamVector& p) {
    Workspace ws;
    forward(spec, p, input, mask.data(), ws);
    return -std::log(ws.output[action]);
  };

  Workspace ws;
  forward(spec, params, input, mask.data(), ws);
  // d(-log p_a)/dlogit_j = p_j - [j == a] on legal entries.
  std::vector<double> dlogits(5, 0.0);
  for (int j = 0; j < 5; ++j)
    if (mask[j]) dlogits[j] = ws.output[j] - (j == action ? 1.0 : 0.0);
  std::vector<double> analytic(spec.param_count(), 0.0);
  backward(spec, params, ws, mask.data(), dlogits, true, analytic);

  std::vector<double> numeric = fd_gradient(spec, params, loss, 1e-5);
  CHECK(max_rel_error(analytic, numeric) < 1e-4);
}

TEST_CASE("masked logits receive zero gradient") {
  Rng rng(9);
  MlpSpec spec;
  spec.widths = {3, 4};
  spec.head = Head::kMaskedSoftmax;
  ParamVector params = init_params(spec, rng);
  std::vector<double> input = {0.2, -0.4, 1.3};
  std::vector<uint8_t> mask = {1, 0, 1, 0};

  // Perturbing only weights that feed masked logits never changes the loss,
  // so their gradient must be zero.
  Workspace ws;
  forward(spec, params, input, mask.data(), ws);
  std::vector<double> upstream = {1.0, 1.0, -2.0, 1.0};
  std::vector<double> grad(spec.param_count(), 0.0);
  backward(spec, params, ws, mask.data(), upstream, false, grad);
  // Row 1 and row 3 of the single layer feed masked outputs.
  for (int c = 0; c < 3; ++c) {
    CHECK(grad[1 * 3 + c] == 0.0);
    CHECK(grad[3 * 3 + c] == 0.0);
  }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  MlpSpec spec;
  spec.widths = {2, 2};
  Rng rng(2);
  ParamVector params = init_params(spec, rng);
  ParamVector before = params;
  AdamState state(params.size());
  adam_step(params, std::vector<double>(params.size(), 0.0), state, {0.01});
  CHECK(params.values == before.values);
}

TEST_CASE("adam: first step moves each coordinate by about lr") {
  MlpSpec spec;
  spec.widths = {3, 2};
  ParamVector params = zero_params(spec);
  AdamState state(params.size());
  AdamConfig cfg{0.05};
  std::vector<double> grad(params.size());
  Rng rng(6);
  for (double& g : grad) g = rng.uniform() < 0.5 ? -1.0 : 1.0;
  adam_step(params, grad, state, cfg);
  // Bias-corrected first step: lr * g / (|g| + eps).
  for (size_t i = 0; i < params.size(); ++i) {
    double expect = -cfg.lr * grad[i] / (std::abs(grad[i]) + cfg.eps);
    CHECK(params.values[i] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("adam runs are deterministic") {
  MlpSpec spec;
  spec.widths = {4, 3};
  auto run = [&] {
    Rng rng(33);
    ParamVector params = init_params(spec, rng);
    AdamState state(params.size());
    for (int step = 0; step < 25; ++step) {
      std::vector<double> grad = rng.normal_vec(params.size());
      adam_step(params, grad, state, {0.003});
    }
    return params.values;
  };
  CHECK(run() == run());
}

TEST_CASE("checkpoint round trip with manifest") {
  MlpSpec spec;
  spec.widths = {5, 8, 2};
  spec.head = Head::kSigmoid;
  Rng rng(44);
  ParamVector params = init_params(spec, rng);

  std::string path =
      (std::filesystem::temp_directory_path() / "ailad_test_ckpt.nn").string();
  save_checkpoint(path, spec, params);
  auto [spec2, params2] = load_checkpoint(path);
  CHECK(spec2 == spec);
  CHECK(params2.values == params.values);
  CHECK(std::filesystem::exists(path + ".manifest"));
  std::remove(path.c_str());
  std::remove((path + ".manifest").c_str());
}

TEST_CASE("blocked batch gradients are thread-count invariant") {
  Rng rng(55);
  MlpSpec spec;
  spec.widths = {6, 12, 3};
  spec.head = Head::kLinear;
  ParamVector params = init_params(spec, rng);
  const int n = 37;
  std::vector<std::vector<double>> inputs(n);
  for (auto& x : inputs) x = rng.normal_vec(6);
  std::vector<double> upstream = {0.3, -1.0, 0.5};

  auto fn = [&](int i, std::vector<double>& g) {
    nn::Workspace ws;
    nn::forward(spec, params, inputs[i], nullptr, ws);
    nn::backward_into(spec, params, ws, nullptr, upstream, false, g.data());
    return 0.0;
  };
  std::vector<double> g1, g2, gs;
  parallel::batch_accumulate(params.size(), n, fn, g1, 1);
  parallel::batch_accumulate(params.size(), n, fn, g2, 2);
  CHECK(g1 == g2);  // bitwise

  parallel::batch_accumulate_serial(params.size(), n, fn, gs);
  CHECK(max_rel_error(g1, gs) < 1e-12);
}
