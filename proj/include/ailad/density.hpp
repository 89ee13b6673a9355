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

#ifndef AILAD_DENSITY_HPP_
#define AILAD_DENSITY_HPP_

#include <cstddef>
#include <vector>

// Estimate of the agent's own distribution over normalized metric space,
// fitted on a sliding window of recently generated metric vectors.
namespace ailad::density {

inline constexpr size_t kDefaultWindow = 2048;
inline constexpr size_t kMinFitSamples = 32;
inline constexpr double kBandwidthStdFloor = 1e-3;
inline constexpr double kLogDensityFloor = -30.0;

// FIFO ring of normalized metric vectors.
class MetricBuffer {
 public:
  explicit MetricBuffer(size_t capacity = kDefaultWindow, int dim = 7);

  void push(const std::vector<double>& m);
  size_t size() const { return size_; }
  size_t capacity() const { return capacity_; }
  int dim() const { return dim_; }
  int64_t inserted() const { return inserted_; }

  // Oldest-first copy of the window contents, row-major.
  std::vector<double> snapshot() const;

  // i-th oldest entry, i in [0, size).
  std::vector<double> row(size_t i) const;

 private:
  size_t capacity_;
  int dim_;
  std::vector<double> data_;  // capacity * dim ring storage
  size_t head_ = 0;           // next write slot
  size_t size_ = 0;
  int64_t inserted_ = 0;
};

enum class Estimator { kKde, kDiagGaussian };

// Immutable density snapshot. KDE uses a Gaussian product kernel with
// per-dimension Scott bandwidths h_d = sigma_d * n^(-1/(dim+4)); the
// alternative is a diagonal Gaussian fit.
struct DensityModel {
  Estimator kind = Estimator::kKde;
  int dim = 0;
  size_t n = 0;
  std::vector<double> points;     // KDE: n x dim snapshot
  std::vector<double> bandwidth;  // KDE: per-dimension h
  std::vector<double> mean, stddev;  // diagonal Gaussian
  double log_floor = kLogDensityFloor;

  double log_density(const double* m) const;
  double log_density(const std::vector<double>& m) const;
};

// Throws InsufficientSamples below kMinFitSamples; the caller falls back to
// the fill-in constant.
DensityModel fit(const MetricBuffer& buffer,
                 Estimator kind = Estimator::kKde);

// Batch queries; OMP over query points, each point an independent output.
void log_density_batch(const DensityModel& model,
                       const std::vector<std::vector<double>>& queries,
                       std::vector<double>& out, int threads);
void log_density_batch_serial(const DensityModel& model,
                              const std::vector<std::vector<double>>& queries,
                              std::vector<double>& out);

}  // namespace ailad::density

#endif  // AILAD_DENSITY_HPP_
