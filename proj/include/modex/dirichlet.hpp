#pragma once

#include <vector>

#include "modex/rng.hpp"
#include "modex/simplex.hpp"

namespace modex {

// Dirichlet distribution with strictly positive concentration vector.
class DirichletDist {
 public:
  explicit DirichletDist(std::vector<double> alpha);

  const std::vector<double>& alpha() const { return alpha_; }
  // concentration total ||alpha||_1
  double total() const { return total_; }
  std::size_t size() const { return alpha_.size(); }

 private:
  std::vector<double> alpha_;
  double total_;
};

// mean: alpha / ||alpha||_1
SimplexVec dir_mean(const DirichletDist& d);

// per-component variance: alpha_j (A - alpha_j) / (A^2 (A + 1))
std::vector<double> dir_var(const DirichletDist& d);

// log density at a strictly interior simplex point
double dir_logpdf(const DirichletDist& d, const SimplexVec& p);

// draw via normalized Gamma variates
SimplexVec dir_sample(const DirichletDist& d, Rng& rng);

}  // namespace modex
