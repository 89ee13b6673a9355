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

// Timings for the parallel kernels against their serial reference paths:
// KDE batch log-density, batched MLP gradients, and evaluation rollouts.

#include <chrono>
#include <cstdio>
#include <vector>

#include "ailad/density.hpp"
#include "ailad/env.hpp"
#include "ailad/nn.hpp"
#include "ailad/parallel.hpp"
#include "ailad/policy.hpp"
#include "ailad/rng.hpp"

using namespace ailad;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

void bench_kde(int threads) {
  Rng rng(7);
  density::MetricBuffer buffer(2048, 7);
  for (int i = 0; i < 2048; ++i) buffer.push(rng.normal_vec(7));
  density::DensityModel model = density::fit(buffer);

  std::vector<std::vector<double>> queries(512);
  for (auto& q : queries) q = rng.normal_vec(7);

  std::vector<double> out_serial, out_omp;
  double t_serial = time_best_of(3, [&] {
    density::log_density_batch_serial(model, queries, out_serial);
  });
  double t_omp = time_best_of(3, [&] {
    density::log_density_batch(model, queries, out_omp, threads);
  });
  bool identical = out_serial == out_omp;
  std::printf("kde_logdensity   512q x 2048k   serial %8.2f ms   omp(%d) %8.2f ms   x%.2f   bitwise_equal=%s\n",
              t_serial, threads, t_omp, t_serial / t_omp,
              identical ? "yes" : "no");
}

void bench_mlp_batch(int threads) {
  Rng rng(11);
  nn::MlpSpec spec;
  spec.widths = {606, 64, 64, 154};
  spec.head = nn::Head::kLinear;
  nn::ParamVector params = nn::init_params(spec, rng);

  const int n = 512;
  std::vector<std::vector<double>> inputs(n);
  for (auto& x : inputs) x = rng.normal_vec(606);
  std::vector<double> upstream(154, 1.0 / 154);

  auto fn = [&](int i, std::vector<double>& g) {
    nn::Workspace ws;
    nn::forward(spec, params, inputs[i], nullptr, ws);
    nn::backward_into(spec, params, ws, nullptr, upstream, false, g.data());
    return 0.0;
  };

  std::vector<double> g_serial, g_blocked, g_omp;
  double t_serial = time_best_of(3, [&] {
    parallel::batch_accumulate_serial(params.size(), n, fn, g_serial);
  });
  double t_blocked = time_best_of(3, [&] {
    parallel::batch_accumulate(params.size(), n, fn, g_blocked, 1);
  });
  double t_omp = time_best_of(3, [&] {
    parallel::batch_accumulate(params.size(), n, fn, g_omp, threads);
  });
  bool stable = g_blocked == g_omp;
  std::printf("mlp_batch_grad   512 x (606-64-64-154)   serial %8.2f ms   blocked(1) %8.2f ms   omp(%d) %8.2f ms   x%.2f   thread_invariant=%s\n",
              t_serial, t_blocked, threads, t_omp, t_blocked / t_omp,
              stable ? "yes" : "no");
}

void bench_rollouts(int threads) {
  Rng rng(13);
  env::LevelSpec level = env::generate_level(1, 42);
  policy::Nets nets =
      policy::make_nets(level.observation_size(), level.action_count(), 7,
                        {64, 64}, {64, 64}, rng);
  const int n = 64;
  std::vector<int> lengths(n);

  auto roll = [&](int workers) {
    parallel::parallel_for(n, workers, [&](int i) {
      Rng ep_rng(derive_seed(99, i));
      auto traj = policy::collect_episode(level, nets, ep_rng.normal_vec(7),
                                          ep_rng, i, 1);
      lengths[i] = static_cast<int>(traj.steps.size());
    });
  };
  double t_serial = time_best_of(3, [&] { roll(1); });
  std::vector<int> serial_lengths = lengths;
  double t_omp = time_best_of(3, [&] { roll(threads); });
  bool identical = serial_lengths == lengths;
  std::printf("eval_rollouts    64 episodes            serial %8.2f ms   omp(%d) %8.2f ms   x%.2f   bitwise_equal=%s\n",
              t_serial, threads, t_omp, t_serial / t_omp,
              identical ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  int threads = argc > 1 ? std::atoi(argv[1]) : parallel::hardware_threads();
  std::printf("threads: %d\n", threads);
  bench_kde(threads);
  bench_mlp_batch(threads);
  bench_rollouts(threads);
  return 0;
}
