#pragma once

#include <span>
#include <vector>

#include "modex/matrix.hpp"
#include "modex/rng.hpp"
#include "modex/simplex.hpp"

namespace modex {

// ln Gamma(x) for x > 0 (Lanczos, g=7). Relative error below 1e-12 across
// [1e-3, 1e6]. Throws std::domain_error for non-positive or non-finite x.
double log_gamma(double x);

// Gamma(shape, scale=1) variate, Marsaglia-Tsang squeeze. Shapes below 1 use
// the boost transform on a shape+1 draw. Throws std::domain_error for
// shape <= 0.
double sample_gamma(double shape, Rng& rng);

// Numerically stable softmax (max subtraction). Throws on empty or
// non-finite input.
SimplexVec softmax(std::span<const double> logits);

// Shannon entropy in nats, with 0 ln 0 := 0.
double entropy(const SimplexVec& p);
double entropy(std::span<const double> p);

struct SpectralEstimate {
  double sigma = 0.0;
  std::vector<double> u;  // left vector, warm-start state
  std::vector<double> v;  // right vector, warm-start state
  bool degenerate = false;  // set for the zero matrix
};

// Largest singular value by power iteration, random start from rng.
// u and v persist in the result so callers can warm-start further rounds.
SpectralEstimate spectral_sigma(const Matrix& w, int iters, Rng& rng);

// One warm-started power iteration; u/v updated in place. Returns sigma
// (0 for the zero matrix, leaving u/v untouched).
double spectral_sigma_warm(const Matrix& w, std::vector<double>& u,
                           std::vector<double>& v);

}  // namespace modex
