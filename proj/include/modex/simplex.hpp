#pragma once

#include <cstddef>
#include <vector>

namespace modex {

// Point on the probability simplex: strictly positive entries summing to 1
// (within 1e-9). The checked constructor throws std::domain_error on
// violation; unchecked() is for producers whose output is valid by
// construction (softmax, normalized Gamma draws, closed-form means).
class SimplexVec {
 public:
  explicit SimplexVec(std::vector<double> probs);

  static SimplexVec unchecked(std::vector<double> probs) {
    SimplexVec v;
    v.p_ = std::move(probs);
    return v;
  }

  const std::vector<double>& probs() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }
  std::size_t size() const { return p_.size(); }

  static constexpr double kSumTolerance = 1e-9;

 private:
  SimplexVec() = default;
  std::vector<double> p_;
};

}  // namespace modex
