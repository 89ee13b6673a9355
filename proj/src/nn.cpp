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

#include "ailad/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "ailad/errors.hpp"
#include "ailad/io.hpp"

namespace ailad::nn {

size_t MlpSpec::param_count() const {
  size_t n = 0;
  for (int l = 0; l < layer_count(); ++l)
    n += static_cast<size_t>(widths[l]) * widths[l + 1] + widths[l + 1];
  return n;
}

ParamVector zero_params(const MlpSpec& spec) {
  ParamVector p;
  p.values.assign(spec.param_count(), 0.0);
  return p;
}

ParamVector init_params(const MlpSpec& spec, Rng& rng) {
  ParamVector p = zero_params(spec);
  size_t off = 0;
  for (int l = 0; l < spec.layer_count(); ++l) {
    int in = spec.widths[l], out = spec.widths[l + 1];
    double s = spec.init_scale / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < in * out; ++i)
      p.values[off + i] = rng.uniform(-s, s);
    off += static_cast<size_t>(in) * out + out;  // biases stay zero
  }
  return p;
}

namespace {

void check_forward_args(const MlpSpec& spec, const ParamVector& params,
                        const std::vector<double>& input,
                        const uint8_t* mask) {
  if (spec.widths.size() < 2) throw ShapeMismatch("MlpSpec needs >= 1 layer");
  if (params.size() != spec.param_count())
    throw ShapeMismatch("param vector size " + std::to_string(params.size()) +
                        " != spec " + std::to_string(spec.param_count()));
  if (static_cast<int>(input.size()) != spec.input_size())
    throw ShapeMismatch("input size " + std::to_string(input.size()) +
                        " != spec input " + std::to_string(spec.input_size()));
  if (spec.head == Head::kMaskedSoftmax) {
    if (mask == nullptr) throw EmptyMask("masked-softmax head needs a mask");
    bool any = false;
    for (int i = 0; i < spec.output_size() && !any; ++i) any = mask[i] != 0;
    if (!any) throw EmptyMask("mask has no legal entry");
  } else if (mask != nullptr) {
    throw ShapeMismatch("mask supplied to a non-masked head");
  }
}

}  // namespace

double logistic(double x) {
  if (x >= 0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double log1p_exp(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void forward(const MlpSpec& spec, const ParamVector& params,
             const std::vector<double>& input, const uint8_t* mask,
             Workspace& ws) {
  check_forward_args(spec, params, input, mask);
  int layers = spec.layer_count();
  ws.act.resize(layers + 1);
  ws.act[0] = input;

  size_t off = 0;
  for (int l = 0; l < layers; ++l) {
    int in = spec.widths[l], out = spec.widths[l + 1];
    const double* w = params.values.data() + off;
    const double* b = w + static_cast<size_t>(in) * out;
    const std::vector<double>& x = ws.act[l];
    std::vector<double>& y = ws.act[l + 1];
    y.assign(out, 0.0);
    for (int r = 0; r < out; ++r) {
      const double* wr = w + static_cast<size_t>(r) * in;
      double acc = b[r];
      for (int c = 0; c < in; ++c) acc += wr[c] * x[c];
      y[r] = acc;
    }
    if (l + 1 < layers)
      for (int r = 0; r < out; ++r) y[r] = std::tanh(y[r]);
    off += static_cast<size_t>(in) * out + out;
  }

  ws.logits = ws.act[layers];
  int n_out = spec.output_size();
  ws.output.assign(n_out, 0.0);
  switch (spec.head) {
    case Head::kLinear:
      ws.output = ws.logits;
      break;
    case Head::kSigmoid:
      for (int i = 0; i < n_out; ++i) ws.output[i] = logistic(ws.logits[i]);
      break;
    case Head::kMaskedSoftmax: {
      double mx = -1e300;
      for (int i = 0; i < n_out; ++i)
        if (mask[i] && ws.logits[i] > mx) mx = ws.logits[i];
      double z = 0.0;
      for (int i = 0; i < n_out; ++i)
        if (mask[i]) z += std::exp(ws.logits[i] - mx);
      for (int i = 0; i < n_out; ++i)
        ws.output[i] = mask[i] ? std::exp(ws.logits[i] - mx) / z : 0.0;
      break;
    }
  }
}

std::vector<double> forward(const MlpSpec& spec, const ParamVector& params,
                            const std::vector<double>& input,
                            const std::vector<uint8_t>* mask) {
  Workspace ws;
  forward(spec, params, input, mask ? mask->data() : nullptr, ws);
  return ws.output;
}

void backward(const MlpSpec& spec, const ParamVector& params,
              const Workspace& ws, const uint8_t* mask,
              const std::vector<double>& upstream, bool upstream_is_logit_grad,
              std::vector<double>& grad) {
  if (grad.size() != spec.param_count())
    throw ShapeMismatch("grad size != param count");
  backward_into(spec, params, ws, mask, upstream, upstream_is_logit_grad,
                grad.data());
}

void backward_into(const MlpSpec& spec, const ParamVector& params,
                   const Workspace& ws, const uint8_t* mask,
                   const std::vector<double>& upstream,
                   bool upstream_is_logit_grad, double* grad_data) {
  int layers = spec.layer_count();
  int n_out = spec.output_size();
  if (static_cast<int>(upstream.size()) != n_out)
    throw ShapeMismatch("upstream size != output size");

  // Head output gradient -> logit gradient.
  std::vector<double> dz(n_out, 0.0);
  if (upstream_is_logit_grad) {
    if (spec.head != Head::kMaskedSoftmax)
      throw ShapeMismatch("logit-space upstream only for masked softmax");
    dz = upstream;
  } else {
    switch (spec.head) {
      case Head::kLinear:
        dz = upstream;
        break;
      case Head::kSigmoid:
        for (int i = 0; i < n_out; ++i)
          dz[i] = upstream[i] * ws.output[i] * (1.0 - ws.output[i]);
        break;
      case Head::kMaskedSoftmax: {
        double dot = 0.0;
        for (int i = 0; i < n_out; ++i) dot += ws.output[i] * upstream[i];
        for (int i = 0; i < n_out; ++i)
          dz[i] = (mask && mask[i]) ? ws.output[i] * (upstream[i] - dot) : 0.0;
        break;
      }
    }
  }

  // Walk layers backward; parameter offsets recomputed per layer.
  std::vector<size_t> offsets(layers);
  size_t off = 0;
  for (int l = 0; l < layers; ++l) {
    offsets[l] = off;
    off += static_cast<size_t>(spec.widths[l]) * spec.widths[l + 1] +
           spec.widths[l + 1];
  }

  std::vector<double> delta = dz;
  for (int l = layers - 1; l >= 0; --l) {
    int in = spec.widths[l], out = spec.widths[l + 1];
    const double* w = params.values.data() + offsets[l];
    double* gw = grad_data + offsets[l];
    double* gb = gw + static_cast<size_t>(in) * out;
    const std::vector<double>& x = ws.act[l];
    for (int r = 0; r < out; ++r) {
      double d = delta[r];
      if (d == 0.0) continue;
      double* gwr = gw + static_cast<size_t>(r) * in;
      for (int c = 0; c < in; ++c) gwr[c] += d * x[c];
      gb[r] += d;
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (int r = 0; r < out; ++r) {
      double d = delta[r];
      if (d == 0.0) continue;
      const double* wr = w + static_cast<size_t>(r) * in;
      for (int c = 0; c < in; ++c) prev[c] += wr[c] * d;
    }
    // act[l] holds tanh outputs for hidden layers.
    for (int c = 0; c < in; ++c) {
      double a = ws.act[l][c];
      prev[c] *= (1.0 - a * a);
    }
    delta = std::move(prev);
  }
}

GradRecord backward(const MlpSpec& spec, const ParamVector& params,
                    const std::vector<double>& input, const uint8_t* mask,
                    const std::vector<double>& upstream) {
  Workspace ws;
  forward(spec, params, input, mask, ws);
  GradRecord rec;
  rec.grad.assign(spec.param_count(), 0.0);
  backward(spec, params, ws, mask, upstream, false, rec.grad);
  return rec;
}

void adam_step(ParamVector& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& cfg) {
  if (grad.size() != params.size() || state.m.size() != params.size())
    throw ShapeMismatch("adam buffers misaligned");
  state.t += 1;
  double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    double g = grad[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    double mhat = state.m[i] / b1t;
    double vhat = state.v[i] / b2t;
    params.values[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

namespace {

constexpr char kMagic[8] = {'A', 'I', 'L', 'A', 'D', 'N', 'N', '1'};

template <typename T>
void put(std::string& buf, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  buf.append(p, sizeof(T));
}

template <typename T>
T take(const std::string& buf, size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw IoFailure("truncated checkpoint");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const MlpSpec& spec,
                     const ParamVector& params) {
  std::string blob;
  blob.append(kMagic, sizeof(kMagic));
  put<uint32_t>(blob, 1);
  put<uint8_t>(blob, static_cast<uint8_t>(spec.head));
  put<double>(blob, spec.init_scale);
  put<uint32_t>(blob, static_cast<uint32_t>(spec.widths.size()));
  for (int w : spec.widths) put<int32_t>(blob, w);
  put<uint64_t>(blob, params.size());
  for (double v : params.values) put<double>(blob, v);
  io::write_file(path, blob);

  std::string manifest = "checkpoint v1\nwidths";
  for (int w : spec.widths) manifest += " " + std::to_string(w);
  manifest += "\nhead " + std::to_string(static_cast<int>(spec.head));
  manifest += "\nparams " + std::to_string(params.size());
  manifest += "\nhash " + io::hex64(io::fnv1a(blob)) + "\n";
  io::write_file(path + ".manifest", manifest);
}

std::pair<MlpSpec, ParamVector> load_checkpoint(const std::string& path) {
  std::string blob = io::read_file(path);
  if (blob.size() < sizeof(kMagic) ||
      std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0)
    throw IoFailure("bad checkpoint magic: " + path);
  size_t pos = sizeof(kMagic);
  uint32_t version = take<uint32_t>(blob, pos);
  if (version != 1) throw IoFailure("unsupported checkpoint version");
  MlpSpec spec;
  spec.head = static_cast<Head>(take<uint8_t>(blob, pos));
  spec.init_scale = take<double>(blob, pos);
  uint32_t n_widths = take<uint32_t>(blob, pos);
  spec.widths.resize(n_widths);
  for (uint32_t i = 0; i < n_widths; ++i)
    spec.widths[i] = take<int32_t>(blob, pos);
  uint64_t n_params = take<uint64_t>(blob, pos);
  if (n_params != spec.param_count())
    throw IoFailure("checkpoint param count mismatch");
  ParamVector params;
  params.values.resize(n_params);
  for (uint64_t i = 0; i < n_params; ++i)
    params.values[i] = take<double>(blob, pos);
  return {spec, params};
}

}  // namespace ailad::nn
