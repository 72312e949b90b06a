#pragma once

#include <cstddef>
#include <vector>

#include "modex/dirichlet.hpp"
#include "modex/rng.hpp"
#include "modex/simplex.hpp"

namespace modex {

// Parameters of the courtroom distribution over the simplex: a structured
// mixture of K Dirichlet components sharing base evidence `alpha`, where
// component k adds advocacy strength `tau[k]` to coordinate k and the
// components are weighted by plausibilities `omega`. Equivalently, the
// extended flexible Dirichlet obtained by normalizing the Gamma basis
// Y_k = W_k + Z_k U_k with W_k ~ Gamma(alpha_k), U_k ~ Gamma(tau_k) and Z a
// one-hot multinomial with probabilities omega.
//
// Validation is strict by design: invalid inputs throw rather than being
// repaired, so the network activations stay the only legal producer.
class CourtroomParams {
 public:
  CourtroomParams(std::vector<double> alpha, SimplexVec omega,
                  std::vector<double> tau);

  const std::vector<double>& alpha() const { return alpha_; }
  const SimplexVec& omega() const { return omega_; }
  const std::vector<double>& tau() const { return tau_; }

  // ||alpha||_1, cached; appears in every moment formula
  double evidence_total() const { return evidence_total_; }
  std::size_t size() const { return alpha_.size(); }

 private:
  std::vector<double> alpha_;
  SimplexVec omega_;
  std::vector<double> tau_;
  double evidence_total_;
};

// Mixture-of-experts view: weights omega and the per-expert Dirichlet means.
// The weighted aggregation of expert means equals efd_mean.
struct MixtureRepr {
  SimplexVec weights;
  std::vector<SimplexVec> expert_means;
};

// Two-predictor blend view: the predictive mean decomposes into a base
// evidence predictor alpha/A scaled by lambda_edl plus the plausibility
// vector omega scaled componentwise by lambda_sm.
struct EdlSoftmaxRepr {
  double lambda_edl = 0.0;
  std::vector<double> lambda_sm;
  SimplexVec p_edl;
  SimplexVec p_sm;
};

enum class ReductionKind {
  kFlexibleDirichlet,  // shared advocacy strength: tau_k -> mean(tau)
  kDirichlet,          // tau = 1, omega = alpha/||alpha||_1
};

// Dirichlet opinion of expert k: Dir(alpha + tau_k e_k).
DirichletDist expert_concentration(const CourtroomParams& cp, std::size_t k);

// Closed-form predictive mean,
//   mu_k = alpha_k kappa1 + tau_k omega_k / (A + tau_k),
// with kappa1 = sum_j omega_j / (A + tau_j) and A = ||alpha||_1.
SimplexVec efd_mean(const CourtroomParams& cp);

// Closed-form per-component variance of pi_k (five-term expression in
// kappa1, kappa2); kappa2 = sum_j omega_j / ((A+tau_j)(A+tau_j+1)).
std::vector<double> efd_var(const CourtroomParams& cp);

// Draw through the mixture route: L ~ Cat(omega), then Dir(alpha + tau_L e_L).
SimplexVec efd_sample_mixture(const CourtroomParams& cp, Rng& rng);

// Draw through the Gamma-basis route: W_k ~ Gamma(alpha_k), Z one-hot on
// omega, U ~ Gamma(tau_L) added to the selected coordinate, then normalize.
// (The unselected U_k never enter the normalized vector, so only the
// selected one is materialized.)
SimplexVec efd_sample_basis(const CourtroomParams& cp, Rng& rng);

MixtureRepr mixture_repr(const CourtroomParams& cp);

// sum_k weights_k * expert_means_k
SimplexVec aggregate(const MixtureRepr& repr);

EdlSoftmaxRepr edl_softmax_repr(const CourtroomParams& cp);

// lambda_edl * p_edl + lambda_sm ⊙ p_sm; equals efd_mean of the source params
SimplexVec reconstruct(const EdlSoftmaxRepr& repr);

// Project params onto a reduced family (see ReductionKind). Idempotent.
CourtroomParams reduction_params(ReductionKind kind, const CourtroomParams& cp);

}  // namespace modex
