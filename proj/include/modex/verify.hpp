#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modex/courtroom.hpp"
#include "modex/rng.hpp"

namespace modex {

// Executable identity suite over random parameter draws: the closed-form
// reductions, both equivalent mean representations, the epistemic
// decomposition with its pairwise form, the total-variance assembly of the
// closed-form variance, and the agreement of the two sampling routes with
// each other and with the closed forms.
struct VerifyOptions {
  int trials = 1000;
  std::uint64_t seed = 20241;
  std::size_t mc_draws = 1'000'000;
  int mc_stride = 50;  // every mc_stride-th trial also runs sampling checks
  double tol_identity = 1e-12;
  double tol_decomposition = 1e-10;
  double se_multiplier = 4.0;
};

struct CheckSummary {
  std::string name;
  int runs = 0;
  int failures = 0;
  double worst = 0.0;          // largest deviation seen (abs, or in SE units)
  std::string worst_example;   // parameters that produced it
};

struct VerifyReport {
  std::vector<CheckSummary> checks;
  bool all_passed() const;
};

VerifyReport run_verify(const VerifyOptions& opts);

// Per-trial deviations, exposed so tests can probe sensitivity directly.
// Each returns the maximum absolute deviation of the identity it checks.
double check_reduction_dirichlet(const CourtroomParams& cp);
double check_mixture_aggregation(const CourtroomParams& cp);
double check_predictor_blend(const CourtroomParams& cp);
double check_decomposition(const CourtroomParams& cp);
double check_pairwise(const CourtroomParams& cp);
double check_variance_assembly(const CourtroomParams& cp);

struct SamplingDeviation {
  double sampler_agreement = 0.0;  // mixture vs basis, in combined-SE units
  double closed_form_fit = 0.0;    // worst |empirical - closed| in SE units
};
SamplingDeviation check_sampling(const CourtroomParams& cp, std::size_t draws,
                                 const Rng& base);

// alpha ~ U(0.1, 50), tau ~ U(0.01, 50), omega ~ symmetric Dirichlet(1)
CourtroomParams random_params(std::size_t k, Rng& rng);

std::string describe_params(const CourtroomParams& cp);

}  // namespace modex
