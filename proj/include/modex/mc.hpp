#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "modex/rng.hpp"

namespace modex {

// Component-wise sample moments of a K-dimensional sampler.
struct MomentStats {
  std::size_t n = 0;
  std::vector<double> mean;
  std::vector<double> var;  // biased (1/n) central second moment
  std::vector<double> m4;   // central fourth moment

  // standard error of the sample mean, per component
  std::vector<double> mean_se() const;
  // asymptotic standard error of the sample variance, per component
  std::vector<double> var_se() const;
};

// Fills `out` (length k) with one draw.
using VectorSampler = std::function<void(Rng&, std::vector<double>&)>;

// Moment estimation over n draws, chunked so the result is a pure function
// of (base rng, n, k): chunk c consumes substream base.split(c) and partial
// sums are combined in chunk order. The parallel kernel and the serial
// reference therefore produce bit-identical output for any thread count.
MomentStats estimate_moments(std::size_t k, std::size_t n, const Rng& base,
                             const VectorSampler& sampler);

namespace serial {
// Reference implementation: identical chunking, plain loop.
MomentStats estimate_moments(std::size_t k, std::size_t n, const Rng& base,
                             const VectorSampler& sampler);
}  // namespace serial

}  // namespace modex
