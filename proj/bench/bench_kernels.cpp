// Compares the OpenMP kernels against their serial reference: Monte-Carlo
// moment estimation over the Gamma-basis sampler, and batched backward
// passes. Both pairs must agree bit-for-bit; the point here is wall time.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "modex/courtroom.hpp"
#include "modex/mc.hpp"
#include "modex/nnet.hpp"
#include "modex/verify.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void bench_moments(std::size_t draws) {
  modex::Rng rng(99);
  const modex::CourtroomParams cp = modex::random_params(5, rng);
  const auto sampler = [&cp](modex::Rng& r, std::vector<double>& out) {
    out = modex::efd_sample_basis(cp, r).probs();
  };
  const modex::Rng base(7);

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = modex::serial::estimate_moments(5, draws, base, sampler);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = modex::estimate_moments(5, draws, base, sampler);
  const double t_parallel = seconds_since(t0);

  const bool identical = serial.mean == parallel.mean && serial.var == parallel.var;
  std::printf(
      "moment estimation  %9zu draws   serial %7.3fs   parallel %7.3fs   "
      "speedup %.2fx   bit-identical %s\n",
      draws, t_serial, t_parallel, t_serial / t_parallel,
      identical ? "yes" : "NO");
}

void bench_backward(std::size_t batch, int reps) {
  modex::Rng rng(4);
  const std::size_t d = 16;
  modex::ModelConfig cfg;
  cfg.feature_dim = 64;
  cfg.extractor_layers = 2;
  cfg.head_layers = 2;
  cfg.head_hidden = 64;
  const modex::ModelState model = modex::init_model(d, 10, cfg, rng);

  modex::Matrix xs(batch, d);
  std::vector<int> ys(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < d; ++j) xs(i, j) = rng.next_gaussian();
    ys[i] = static_cast<int>(rng.next_u64() % 10);
  }

#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  auto t0 = std::chrono::steady_clock::now();
  double check_serial = 0.0;
  for (int r = 0; r < reps; ++r) {
    check_serial = modex::backward(model, xs, ys, 0.1).first;
  }
  const double t_serial = seconds_since(t0);

#ifdef _OPENMP
  omp_set_num_threads(max_threads);
#endif
  t0 = std::chrono::steady_clock::now();
  double check_parallel = 0.0;
  for (int r = 0; r < reps; ++r) {
    check_parallel = modex::backward(model, xs, ys, 0.1).first;
  }
  const double t_parallel = seconds_since(t0);

  std::printf(
      "batch backward     %4zu x %d reps   serial %7.3fs   parallel %7.3fs   "
      "speedup %.2fx   bit-identical %s\n",
      batch, reps, t_serial, t_parallel, t_serial / t_parallel,
      check_serial == check_parallel ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run the same serial code\n");
#endif
  bench_moments(2'000'000);
  bench_backward(512, 50);
  return 0;
}
