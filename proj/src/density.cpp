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

#include "ailad/density.hpp"

#include <cmath>

#include "ailad/errors.hpp"
#include "ailad/parallel.hpp"

namespace ailad::density {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
}

MetricBuffer::MetricBuffer(size_t capacity, int dim)
    : capacity_(capacity), dim_(dim), data_(capacity * dim, 0.0) {}

void MetricBuffer::push(const std::vector<double>& m) {
  if (static_cast<int>(m.size()) != dim_)
    throw ShapeMismatch("metric buffer dim mismatch");
  for (int d = 0; d < dim_; ++d) data_[head_ * dim_ + d] = m[d];
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
  ++inserted_;
}

std::vector<double> MetricBuffer::snapshot() const {
  std::vector<double> out(size_ * dim_);
  // Oldest element sits at head_ when the ring is full, else at 0.
  size_t start = size_ < capacity_ ? 0 : head_;
  for (size_t i = 0; i < size_; ++i) {
    size_t src = (start + i) % capacity_;
    for (int d = 0; d < dim_; ++d) out[i * dim_ + d] = data_[src * dim_ + d];
  }
  return out;
}

std::vector<double> MetricBuffer::row(size_t i) const {
  size_t start = size_ < capacity_ ? 0 : head_;
  size_t src = (start + i) % capacity_;
  return std::vector<double>(data_.begin() + src * dim_,
                             data_.begin() + (src + 1) * dim_);
}

DensityModel fit(const MetricBuffer& buffer, Estimator kind) {
  if (buffer.size() < kMinFitSamples)
    throw InsufficientSamples("density fit needs " +
                              std::to_string(kMinFitSamples) + " samples, " +
                              "buffer has " + std::to_string(buffer.size()));
  DensityModel model;
  model.kind = kind;
  model.dim = buffer.dim();
  model.n = buffer.size();
  model.points = buffer.snapshot();

  const int dim = model.dim;
  const double n = static_cast<double>(model.n);
  model.mean.assign(dim, 0.0);
  model.stddev.assign(dim, 0.0);
  for (size_t i = 0; i < model.n; ++i)
    for (int d = 0; d < dim; ++d) model.mean[d] += model.points[i * dim + d];
  for (int d = 0; d < dim; ++d) model.mean[d] /= n;
  for (size_t i = 0; i < model.n; ++i)
    for (int d = 0; d < dim; ++d) {
      double diff = model.points[i * dim + d] - model.mean[d];
      model.stddev[d] += diff * diff;
    }
  for (int d = 0; d < dim; ++d)
    model.stddev[d] = std::max(std::sqrt(model.stddev[d] / n),
                               kBandwidthStdFloor);

  if (kind == Estimator::kKde) {
    double factor = std::pow(n, -1.0 / (dim + 4));  // Scott's rule
    model.bandwidth.assign(dim, 0.0);
    for (int d = 0; d < dim; ++d)
      model.bandwidth[d] = model.stddev[d] * factor;
  } else {
    model.points.clear();  // diagonal Gaussian keeps only moments
  }
  return model;
}

double DensityModel::log_density(const double* m) const {
  if (kind == Estimator::kDiagGaussian) {
    double lp = 0.0;
    for (int d = 0; d < dim; ++d) {
      double z = (m[d] - mean[d]) / stddev[d];
      lp += -0.5 * z * z - std::log(stddev[d]) - 0.5 * kLog2Pi;
    }
    return std::max(lp, log_floor);
  }

  // log( (1/n) sum_i prod_d phi((m_d - x_id)/h_d)/h_d ), via log-sum-exp.
  double log_const = -std::log(static_cast<double>(n));
  for (int d = 0; d < dim; ++d)
    log_const += -std::log(bandwidth[d]) - 0.5 * kLog2Pi;

  double mx = -1e300;
  std::vector<double> expo(n);
  for (size_t i = 0; i < n; ++i) {
    double e = 0.0;
    const double* x = points.data() + i * dim;
    for (int d = 0; d < dim; ++d) {
      double z = (m[d] - x[d]) / bandwidth[d];
      e -= 0.5 * z * z;
    }
    expo[i] = e;
    if (e > mx) mx = e;
  }
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::exp(expo[i] - mx);
  double lp = log_const + mx + std::log(s);
  return std::max(lp, log_floor);
}

double DensityModel::log_density(const std::vector<double>& m) const {
  if (static_cast<int>(m.size()) != dim)
    throw ShapeMismatch("density query dim mismatch");
  return log_density(m.data());
}

void log_density_batch(const DensityModel& model,
                       const std::vector<std::vector<double>>& queries,
                       std::vector<double>& out, int threads) {
  out.assign(queries.size(), 0.0);
  parallel::parallel_for(
      static_cast<int>(queries.size()), threads,
      [&](int i) { out[i] = model.log_density(queries[i]); });
}

void log_density_batch_serial(const DensityModel& model,
                              const std::vector<std::vector<double>>& queries,
                              std::vector<double>& out) {
  out.assign(queries.size(), 0.0);
  for (size_t i = 0; i < queries.size(); ++i)
    out[i] = model.log_density(queries[i]);
}

}  // namespace ailad::density
