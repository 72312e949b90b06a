#include "modex/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace modex {

SimplexVec::SimplexVec(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw std::domain_error("SimplexVec: empty vector");
  double sum = 0.0;
  for (double x : p_) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::domain_error("SimplexVec: entries must be positive and finite");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::domain_error("SimplexVec: entries must sum to 1");
  }
}

}  // namespace modex
