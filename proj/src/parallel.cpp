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

#include "ailad/parallel.hpp"

#include <omp.h>

#include <algorithm>

namespace ailad::parallel {

namespace {
// Fixed fold width keeps the reduction tree independent of the thread count.
constexpr int kReduceBlocks = 16;
}  // namespace

double batch_accumulate(size_t grad_size, int n, const SampleGradFn& fn,
                        std::vector<double>& grad_out, int threads) {
  grad_out.assign(grad_size, 0.0);
  if (n <= 0) return 0.0;
  int blocks = std::min(kReduceBlocks, n);
  std::vector<std::vector<double>> block_grad(blocks);
  std::vector<double> block_loss(blocks, 0.0);

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (int b = 0; b < blocks; ++b) {
    auto& g = block_grad[b];
    g.assign(grad_size, 0.0);
    int lo = static_cast<int>(static_cast<long>(n) * b / blocks);
    int hi = static_cast<int>(static_cast<long>(n) * (b + 1) / blocks);
    double loss = 0.0;
    for (int i = lo; i < hi; ++i) loss += fn(i, g);
    block_loss[b] = loss;
  }

  double loss = 0.0;
  for (int b = 0; b < blocks; ++b) {
    loss += block_loss[b];
    const auto& g = block_grad[b];
    for (size_t j = 0; j < grad_size; ++j) grad_out[j] += g[j];
  }
  return loss;
}

double batch_accumulate_serial(size_t grad_size, int n, const SampleGradFn& fn,
                               std::vector<double>& grad_out) {
  grad_out.assign(grad_size, 0.0);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) loss += fn(i, grad_out);
  return loss;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (int i = 0; i < n; ++i) fn(i);
}

int hardware_threads() { return omp_get_max_threads(); }

}  // namespace ailad::parallel
