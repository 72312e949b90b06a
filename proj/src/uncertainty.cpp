#include "modex/uncertainty.hpp"

#include "modex/dirichlet.hpp"
#include "modex/numerics.hpp"

namespace modex {

double aleatoric(const CourtroomParams& cp) { return entropy(efd_mean(cp)); }

double epistemic(const CourtroomParams& cp) {
  double total = 0.0;
  for (double v : efd_var(cp)) total += v;
  return total;
}

std::pair<double, double> epistemic_decompose(const CourtroomParams& cp) {
  const MixtureRepr repr = mixture_repr(cp);
  const SimplexVec mu_bar = aggregate(repr);
  const std::size_t n = cp.size();
  double inter = 0.0;
  double intra = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = cp.omega()[k];
    double dist2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = repr.expert_means[k][j] - mu_bar[j];
      dist2 += d * d;
    }
    inter += wk * dist2;
    double var_sum = 0.0;
    for (double v : dir_var(expert_concentration(cp, k))) var_sum += v;
    intra += wk * var_sum;
  }
  return {inter, intra};
}

double inter_pairwise(const CourtroomParams& cp) {
  const MixtureRepr repr = mixture_repr(cp);
  const std::size_t n = cp.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      double dist2 = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        const double d = repr.expert_means[k][c] - repr.expert_means[j][c];
        dist2 += d * d;
      }
      acc += cp.omega()[k] * cp.omega()[j] * dist2;
    }
  }
  return 0.5 * acc;
}

UncertaintyReport report(const CourtroomParams& cp) {
  UncertaintyReport rep;
  rep.mean = efd_mean(cp);
  rep.predicted_class = 0;
  for (std::size_t k = 1; k < rep.mean.size(); ++k) {
    if (rep.mean[k] > rep.mean[rep.predicted_class]) rep.predicted_class = k;
  }
  rep.au = entropy(rep.mean);
  rep.eu = epistemic(cp);
  const auto [inter, intra] = epistemic_decompose(cp);
  rep.eu_inter = inter;
  rep.eu_intra = intra;
  return rep;
}

}  // namespace modex
