#pragma once

#include <cstddef>
#include <utility>

#include "modex/courtroom.hpp"
#include "modex/simplex.hpp"

namespace modex {

struct UncertaintyReport {
  std::size_t predicted_class = 0;
  SimplexVec mean = SimplexVec::unchecked({1.0});
  double au = 0.0;        // entropy of the predictive mean, nats
  double eu = 0.0;        // total variance of the latent class probabilities
  double eu_inter = 0.0;  // disagreement among expert means
  double eu_intra = 0.0;  // expected within-expert Dirichlet variance
};

// Aleatoric uncertainty: entropy of the predictive mean, in nats.
double aleatoric(const CourtroomParams& cp);

// Epistemic uncertainty: trace of the covariance of the latent class
// probability vector, i.e. the sum of the closed-form per-component
// variances.
double epistemic(const CourtroomParams& cp);

// Split of the epistemic uncertainty into (inter, intra):
//   inter = sum_k omega_k ||mu_k - mu_bar||^2
//   intra = sum_k omega_k sum_j Var_{Dir(alpha_k)}[pi_j]
// Their sum equals epistemic() up to roundoff.
std::pair<double, double> epistemic_decompose(const CourtroomParams& cp);

// Equivalent pairwise form of the inter component:
//   1/2 sum_k sum_j omega_k omega_j ||mu_k - mu_j||^2
double inter_pairwise(const CourtroomParams& cp);

// Full report: predictive mean, argmax class (ties break to the lowest
// index), aleatoric entropy, and the epistemic total with its split. The
// epistemic total comes from the closed-form variance path.
UncertaintyReport report(const CourtroomParams& cp);

}  // namespace modex
