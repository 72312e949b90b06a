#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "modex/matrix.hpp"
#include "modex/mc.hpp"
#include "modex/numerics.hpp"
#include "modex/rng.hpp"
#include "oracles.hpp"

using namespace modex;

TEST_CASE("log_gamma matches high-precision references across the domain") {
  // reference values computed with 30-digit arithmetic
  const std::pair<double, double> refs[] = {
      {0.001, 6.907178885383853682512},
      {0.01, 4.599479878042021722514},
      {0.1, 2.25271265173420595987},
      {0.3, 1.095797994818075521677},
      {0.5, 0.5723649429247000870717},
      {1.0, 0.0},
      {1.5, -0.1207822376352452223455},
      {2.0, 0.0},
      {2.5, 0.2846828704729191596325},
      {3.7, 1.428072326665387921872},
      {7.5, 7.534364236758732955158},
      {10.0, 12.80182748008146961121},
      {123.456, 469.6055471299294687301},
      {1000.0, 5905.220423209181211826},
      {54321.0, 537918.1967084220625729},
      {1e6, 12815504.56914761165998},
  };
  for (const auto& [x, expected] : refs) {
    const double got = log_gamma(x);
    if (expected == 0.0) {
      CHECK(std::abs(got) < 1e-12);
    } else {
      CHECK(std::abs(got - expected) / std::abs(expected) < 1e-12);
    }
  }
}

TEST_CASE("log_gamma rejects non-positive and non-finite input") {
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-1.5), std::domain_error);
  CHECK_THROWS_AS(log_gamma(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(log_gamma(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("softmax handles the pinned examples") {
  {
    const auto p = softmax(std::vector<double>{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }
  {
    const auto p = softmax(std::vector<double>{1000.0, 0.0});
    CHECK(std::abs(p[0] - 1.0) < 1e-12);
    CHECK(std::abs(p[1]) < 1e-12);
  }
  {
    const auto p = softmax(std::vector<double>{std::log(2.0), 0.0});
    CHECK(p[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }
  CHECK_THROWS_AS(softmax(std::vector<double>{}), std::domain_error);
  CHECK_THROWS_AS(softmax(std::vector<double>{1.0, std::nan("")}), std::domain_error);
}

TEST_CASE("softmax is invariant under constant logit shifts") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.next_u64() % 9;
    std::vector<double> logits(k), shifted(k);
    const double shift = 20.0 * (rng.next_double() - 0.5);
    for (std::size_t i = 0; i < k; ++i) {
      logits[i] = 10.0 * (rng.next_double() - 0.5);
      shifted[i] = logits[i] + shift;
    }
    const auto a = softmax(logits);
    const auto b = softmax(shifted);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(std::abs(a[i] - b[i]) < 1e-12);
      sum += a[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("entropy in nats with the 0 log 0 convention") {
  CHECK(entropy(SimplexVec({0.25, 0.25, 0.25, 0.25})) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(entropy(std::vector<double>{1.0, 0.0, 0.0}) == 0.0);
  CHECK(entropy(SimplexVec({0.575, 0.425})) ==
        doctest::Approx(0.68185460873078340).epsilon(1e-12));
}

TEST_CASE("rng streams are reproducible and splittable") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  const Rng parent(42);
  Rng s1 = parent.split(1);
  Rng s1_again = parent.split(1);
  Rng s2 = parent.split(2);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = s1.next_u64();
    CHECK(x == s1_again.next_u64());
    if (x != s2.next_u64()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("gaussian draws have the right first two moments") {
  Rng rng(3);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_gaussian();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gamma sampler matches the distribution moments") {
  const std::size_t n = 1'000'000;
  auto run = [n](double shape) {
    const auto sampler = [shape](Rng& r, std::vector<double>& out) {
      out[0] = sample_gamma(shape, r);
    };
    return estimate_moments(1, n, Rng(4321 + static_cast<std::uint64_t>(shape * 100)),
                            sampler);
  };

  {
    const auto s = run(1.0);
    CHECK(std::abs(s.mean[0] - 1.0) < 0.004);
  }
  {
    const auto s = run(5.0);
    CHECK(std::abs(s.mean[0] - 5.0) < 0.01);
    CHECK(std::abs(s.var[0] - 5.0) < 0.05);
  }
  {
    const auto s = run(0.3);
    CHECK(std::abs(s.mean[0] - 0.3) < 0.003);
  }
}

TEST_CASE("gamma moments hold across the shape grid") {
  // mean = var = shape for unit scale
  for (const double shape : {0.3, 1.0, 2.5, 7.0}) {
    const std::size_t n = 1'000'000;
    const auto sampler = [shape](Rng& r, std::vector<double>& out) {
      out[0] = sample_gamma(shape, r);
    };
    const auto s = estimate_moments(
        1, n, Rng(88 + static_cast<std::uint64_t>(shape * 10)), sampler);
    CHECK(std::abs(s.mean[0] - shape) < 4.0 * s.mean_se()[0]);
    CHECK(std::abs(s.var[0] - shape) < 4.0 * s.var_se()[0]);
  }
}

TEST_CASE("gamma sampler rejects non-positive shape") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_gamma(0.0, rng), std::domain_error);
  CHECK_THROWS_AS(sample_gamma(-2.0, rng), std::domain_error);
}

TEST_CASE("spectral sigma on known matrices") {
  Rng rng(5);
  {
    Matrix eye(3, 3);
    for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
    const auto est = spectral_sigma(eye, 50, rng);
    CHECK(est.sigma == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(est.degenerate);
  }
  {
    Matrix diag(2, 2);
    diag(0, 0) = 3.0;
    diag(1, 1) = 1.0;
    const auto est = spectral_sigma(diag, 50, rng);
    CHECK(std::abs(est.sigma - 3.0) < 1e-6);
  }
  {
    Matrix zero(4, 3);
    const auto est = spectral_sigma(zero, 10, rng);
    CHECK(est.sigma == 0.0);
    CHECK(est.degenerate);
  }
}

TEST_CASE("spectral sigma agrees with the Jacobi oracle on random matrices") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix w(8, 4);
    for (double& x : w.data) x = rng.next_gaussian();
    const auto est = spectral_sigma(w, 100, rng);
    const auto sv = oracle::singular_values(w.rows, w.cols, w.data);
    CHECK(std::abs(est.sigma - sv[0]) < 1e-6);

    // rescaling by 1/sigma pins the top singular value at 1
    Matrix scaled = w;
    for (double& x : scaled.data) x /= est.sigma;
    const auto sv_scaled = oracle::singular_values(scaled.rows, scaled.cols, scaled.data);
    CHECK(std::abs(sv_scaled[0] - 1.0) < 1e-3);
  }
}
