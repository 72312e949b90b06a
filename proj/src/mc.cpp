#include "modex/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace modex {

namespace {

constexpr std::size_t kChunk = 1u << 14;

struct PartialSums {
  // raw power sums per component: sum x, x^2, x^3, x^4
  std::vector<double> s1, s2, s3, s4;

  explicit PartialSums(std::size_t k) : s1(k), s2(k), s3(k), s4(k) {}
};

void accumulate_chunk(std::size_t k, std::size_t count, Rng rng,
                      const VectorSampler& sampler, PartialSums& out) {
  std::vector<double> draw(k);
  for (std::size_t i = 0; i < count; ++i) {
    sampler(rng, draw);
    for (std::size_t c = 0; c < k; ++c) {
      const double x = draw[c];
      const double x2 = x * x;
      out.s1[c] += x;
      out.s2[c] += x2;
      out.s3[c] += x2 * x;
      out.s4[c] += x2 * x2;
    }
  }
}

MomentStats finalize(std::size_t k, std::size_t n,
                     const std::vector<PartialSums>& partials) {
  PartialSums total(k);
  for (const auto& p : partials) {
    for (std::size_t c = 0; c < k; ++c) {
      total.s1[c] += p.s1[c];
      total.s2[c] += p.s2[c];
      total.s3[c] += p.s3[c];
      total.s4[c] += p.s4[c];
    }
  }
  MomentStats stats;
  stats.n = n;
  stats.mean.resize(k);
  stats.var.resize(k);
  stats.m4.resize(k);
  const double dn = static_cast<double>(n);
  for (std::size_t c = 0; c < k; ++c) {
    const double m = total.s1[c] / dn;
    const double e2 = total.s2[c] / dn;
    const double e3 = total.s3[c] / dn;
    const double e4 = total.s4[c] / dn;
    stats.mean[c] = m;
    stats.var[c] = e2 - m * m;
    stats.m4[c] = e4 - 4.0 * m * e3 + 6.0 * m * m * e2 - 3.0 * m * m * m * m;
  }
  return stats;
}

std::vector<PartialSums> make_partials(std::size_t k, std::size_t n_chunks) {
  return std::vector<PartialSums>(n_chunks, PartialSums(k));
}

}  // namespace

std::vector<double> MomentStats::mean_se() const {
  std::vector<double> se(mean.size());
  for (std::size_t c = 0; c < se.size(); ++c) {
    se[c] = std::sqrt(std::max(var[c], 0.0) / static_cast<double>(n));
  }
  return se;
}

std::vector<double> MomentStats::var_se() const {
  std::vector<double> se(mean.size());
  for (std::size_t c = 0; c < se.size(); ++c) {
    const double spread = std::max(m4[c] - var[c] * var[c], 0.0);
    se[c] = std::sqrt(spread / static_cast<double>(n));
  }
  return se;
}

MomentStats estimate_moments(std::size_t k, std::size_t n, const Rng& base,
                             const VectorSampler& sampler) {
  if (k == 0 || n == 0) throw std::invalid_argument("estimate_moments: empty request");
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  auto partials = make_partials(k, n_chunks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long c = 0; c < static_cast<long long>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t count = std::min(kChunk, n - begin);
    accumulate_chunk(k, count, base.split(static_cast<std::uint64_t>(c)), sampler,
                     partials[static_cast<std::size_t>(c)]);
  }
  return finalize(k, n, partials);
}

namespace serial {

MomentStats estimate_moments(std::size_t k, std::size_t n, const Rng& base,
                             const VectorSampler& sampler) {
  if (k == 0 || n == 0) throw std::invalid_argument("estimate_moments: empty request");
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  auto partials = make_partials(k, n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t begin = c * kChunk;
    const std::size_t count = std::min(kChunk, n - begin);
    accumulate_chunk(k, count, base.split(c), sampler, partials[c]);
  }
  return finalize(k, n, partials);
}

}  // namespace serial

}  // namespace modex
