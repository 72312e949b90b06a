#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "modex/courtroom.hpp"
#include "modex/mc.hpp"
#include "modex/nnet.hpp"
#include "modex/verify.hpp"

using namespace modex;

namespace {

struct ThreadCountGuard {
#ifdef _OPENMP
  int saved = omp_get_max_threads();
  ~ThreadCountGuard() { omp_set_num_threads(saved); }
  void set(int n) { omp_set_num_threads(n); }
#else
  void set(int) {}
#endif
};

}  // namespace

TEST_CASE("parallel moment kernel matches the serial reference bit for bit") {
  Rng seed_rng(301);
  const CourtroomParams cp = random_params(4, seed_rng);
  const auto sampler = [&cp](Rng& r, std::vector<double>& out) {
    out = efd_sample_basis(cp, r).probs();
  };
  const Rng base(302);
  const std::size_t n = 200000;

  const MomentStats reference = serial::estimate_moments(4, n, base, sampler);

  ThreadCountGuard guard;
  for (const int threads : {1, 2, 4}) {
    guard.set(threads);
    const MomentStats parallel = estimate_moments(4, n, base, sampler);
    CHECK(parallel.mean == reference.mean);
    CHECK(parallel.var == reference.var);
    CHECK(parallel.m4 == reference.m4);
  }
}

TEST_CASE("batch backward is independent of the thread count") {
  Rng rng(303);
  ModelConfig cfg;
  cfg.feature_dim = 12;
  cfg.extractor_layers = 2;
  cfg.head_layers = 2;
  cfg.head_hidden = 8;
  const ModelState model = init_model(6, 4, cfg, rng);

  const std::size_t batch = 70;  // deliberately not a multiple of the block size
  Matrix xs(batch, 6);
  std::vector<int> ys(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < 6; ++j) xs(i, j) = rng.next_gaussian();
    ys[i] = static_cast<int>(rng.next_u64() % 4);
  }

  ThreadCountGuard guard;
  guard.set(1);
  const auto [loss1, grads1] = backward(model, xs, ys, 0.1);
  guard.set(2);
  const auto [loss2, grads2] = backward(model, xs, ys, 0.1);

  CHECK(loss1 == loss2);
  for (std::size_t part = 0; part < 4; ++part) {
    const auto& a = part == 0   ? grads1.extractor
                    : part == 1 ? grads1.alpha_head
                    : part == 2 ? grads1.omega_head
                                : grads1.tau_head;
    const auto& b = part == 0   ? grads2.extractor
                    : part == 1 ? grads2.alpha_head
                    : part == 2 ? grads2.omega_head
                                : grads2.tau_head;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].w.data == b[i].w.data);
      CHECK(a[i].b == b[i].b);
    }
  }
}

TEST_CASE("moment kernel recovers dirichlet moments") {
  const DirichletDist d({2.0, 3.0, 4.0});
  const auto sampler = [&d](Rng& r, std::vector<double>& out) {
    out = dir_sample(d, r).probs();
  };
  const auto s = estimate_moments(3, 200000, Rng(305), sampler);
  const auto mean = dir_mean(d);
  const auto var = dir_var(d);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::abs(s.mean[j] - mean[j]) < 5.0 * s.mean_se()[j]);
    CHECK(std::abs(s.var[j] - var[j]) < 5.0 * s.var_se()[j]);
  }
}

TEST_CASE("moment kernel rejects empty requests") {
  const auto sampler = [](Rng&, std::vector<double>&) {};
  CHECK_THROWS_AS(estimate_moments(0, 10, Rng(1), sampler), std::invalid_argument);
  CHECK_THROWS_AS(estimate_moments(3, 0, Rng(1), sampler), std::invalid_argument);
}
