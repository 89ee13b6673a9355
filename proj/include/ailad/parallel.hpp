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

#ifndef AILAD_PARALLEL_HPP_
#define AILAD_PARALLEL_HPP_

#include <cstddef>
#include <functional>
#include <vector>

// OpenMP kernels with serial reference counterparts. Every kernel here is
// reduction-order stable: results are bit-identical for any thread count, so
// reruns of a fixed config reproduce artifacts byte for byte.
namespace ailad::parallel {

// Per-sample gradient accumulation. fn(i, scratch) must add sample i's
// gradient into scratch and return its loss contribution. Samples are folded
// in a fixed block structure regardless of thread count.
using SampleGradFn = std::function<double(int i, std::vector<double>& grad)>;

double batch_accumulate(size_t grad_size, int n, const SampleGradFn& fn,
                        std::vector<double>& grad_out, int threads);

// Naive single-loop fold, kept as the testing reference for the blocked
// kernel above (fold order differs, so agreement is to tolerance).
double batch_accumulate_serial(size_t grad_size, int n, const SampleGradFn& fn,
                               std::vector<double>& grad_out);

// Runs fn(i) for i in [0, n) with independent outputs.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

int hardware_threads();

}  // namespace ailad::parallel

#endif  // AILAD_PARALLEL_HPP_
