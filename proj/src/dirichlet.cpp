#include "modex/dirichlet.hpp"

#include <cmath>
#include <stdexcept>

#include "modex/numerics.hpp"

namespace modex {

DirichletDist::DirichletDist(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw std::domain_error("DirichletDist: empty concentration");
  total_ = 0.0;
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::domain_error("DirichletDist: concentrations must be positive and finite");
    }
    total_ += a;
  }
}

SimplexVec dir_mean(const DirichletDist& d) {
  std::vector<double> m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m[i] = d.alpha()[i] / d.total();
  return SimplexVec::unchecked(std::move(m));
}

std::vector<double> dir_var(const DirichletDist& d) {
  const double a0 = d.total();
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double ai = d.alpha()[i];
    v[i] = ai * (a0 - ai) / (a0 * a0 * (a0 + 1.0));
  }
  return v;
}

double dir_logpdf(const DirichletDist& d, const SimplexVec& p) {
  if (p.size() != d.size()) throw std::invalid_argument("dir_logpdf: length mismatch");
  double log_norm = -log_gamma(d.total());
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double pi = p[i];
    if (!(pi > 0.0)) throw std::domain_error("dir_logpdf: boundary point");
    log_norm += log_gamma(d.alpha()[i]);
    acc += (d.alpha()[i] - 1.0) * std::log(pi);
  }
  return acc - log_norm;
}

SimplexVec dir_sample(const DirichletDist& d, Rng& rng) {
  std::vector<double> y(d.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    y[i] = sample_gamma(d.alpha()[i], rng);
    sum += y[i];
  }
  for (double& x : y) x /= sum;
  return SimplexVec::unchecked(std::move(y));
}

}  // namespace modex
