#include "modex/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "modex/dirichlet.hpp"
#include "modex/mc.hpp"
#include "modex/numerics.hpp"
#include "modex/uncertainty.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace modex {

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

double max_abs_diff(const SimplexVec& a, const SimplexVec& b) {
  return max_abs_diff(a.probs(), b.probs());
}

}  // namespace

bool VerifyReport::all_passed() const {
  for (const CheckSummary& c : checks) {
    if (c.failures > 0) return false;
  }
  return true;
}

CourtroomParams random_params(std::size_t k, Rng& rng) {
  std::vector<double> alpha(k), tau(k), gamma(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    alpha[i] = 0.1 + 49.9 * rng.next_double_pos();
    tau[i] = 0.01 + 49.99 * rng.next_double_pos();
    gamma[i] = sample_gamma(1.0, rng);
    sum += gamma[i];
  }
  for (double& g : gamma) g /= sum;
  return CourtroomParams(std::move(alpha),
                         SimplexVec::unchecked(std::move(gamma)),
                         std::move(tau));
}

std::string describe_params(const CourtroomParams& cp) {
  std::ostringstream out;
  char buf[32];
  auto emit = [&out, &buf](const char* name, const std::vector<double>& v) {
    out << name << "=(";
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
      out << (i ? "," : "") << buf;
    }
    out << ") ";
  };
  emit("alpha", cp.alpha());
  emit("omega", cp.omega().probs());
  emit("tau", cp.tau());
  return out.str();
}

double check_reduction_dirichlet(const CourtroomParams& cp) {
  const CourtroomParams reduced = reduction_params(ReductionKind::kDirichlet, cp);
  const DirichletDist dir(cp.alpha());
  double worst = max_abs_diff(efd_mean(reduced), dir_mean(dir));
  worst = std::max(worst, max_abs_diff(efd_var(reduced), dir_var(dir)));
  return worst;
}

double check_mixture_aggregation(const CourtroomParams& cp) {
  return max_abs_diff(aggregate(mixture_repr(cp)), efd_mean(cp));
}

double check_predictor_blend(const CourtroomParams& cp) {
  return max_abs_diff(reconstruct(edl_softmax_repr(cp)), efd_mean(cp));
}

double check_decomposition(const CourtroomParams& cp) {
  const auto [inter, intra] = epistemic_decompose(cp);
  return std::abs(inter + intra - epistemic(cp));
}

double check_pairwise(const CourtroomParams& cp) {
  const auto [inter, intra] = epistemic_decompose(cp);
  (void)intra;
  return std::abs(inter_pairwise(cp) - inter);
}

double check_variance_assembly(const CourtroomParams& cp) {
  // law of total variance assembled from the expert components
  const std::size_t k = cp.size();
  const MixtureRepr repr = mixture_repr(cp);
  const SimplexVec mu_bar = aggregate(repr);
  std::vector<double> assembled(k, 0.0);
  for (std::size_t e = 0; e < k; ++e) {
    const double we = cp.omega()[e];
    const auto var_e = dir_var(expert_concentration(cp, e));
    for (std::size_t j = 0; j < k; ++j) {
      const double dm = repr.expert_means[e][j] - mu_bar[j];
      assembled[j] += we * (var_e[j] + dm * dm);
    }
  }
  return max_abs_diff(assembled, efd_var(cp));
}

SamplingDeviation check_sampling(const CourtroomParams& cp, std::size_t draws,
                                 const Rng& base) {
  const std::size_t k = cp.size();
  const auto mixture_sampler = [&cp](Rng& r, std::vector<double>& out) {
    out = efd_sample_mixture(cp, r).probs();
  };
  const auto basis_sampler = [&cp](Rng& r, std::vector<double>& out) {
    out = efd_sample_basis(cp, r).probs();
  };
  const MomentStats mix =
      estimate_moments(k, draws, base.split(0), mixture_sampler);
  const MomentStats bas =
      estimate_moments(k, draws, base.split(1), basis_sampler);

  const SimplexVec mean_cf = efd_mean(cp);
  const std::vector<double> var_cf = efd_var(cp);
  const auto mix_mean_se = mix.mean_se();
  const auto mix_var_se = mix.var_se();
  const auto bas_mean_se = bas.mean_se();
  const auto bas_var_se = bas.var_se();

  SamplingDeviation dev;
  for (std::size_t c = 0; c < k; ++c) {
    const double se_mean =
        std::sqrt(mix_mean_se[c] * mix_mean_se[c] + bas_mean_se[c] * bas_mean_se[c]);
    const double se_var =
        std::sqrt(mix_var_se[c] * mix_var_se[c] + bas_var_se[c] * bas_var_se[c]);
    dev.sampler_agreement = std::max(
        dev.sampler_agreement, std::abs(mix.mean[c] - bas.mean[c]) / se_mean);
    dev.sampler_agreement = std::max(
        dev.sampler_agreement, std::abs(mix.var[c] - bas.var[c]) / se_var);
    dev.closed_form_fit = std::max(
        dev.closed_form_fit, std::abs(mix.mean[c] - mean_cf[c]) / mix_mean_se[c]);
    dev.closed_form_fit = std::max(
        dev.closed_form_fit, std::abs(bas.mean[c] - mean_cf[c]) / bas_mean_se[c]);
    dev.closed_form_fit = std::max(
        dev.closed_form_fit, std::abs(mix.var[c] - var_cf[c]) / mix_var_se[c]);
    dev.closed_form_fit = std::max(
        dev.closed_form_fit, std::abs(bas.var[c] - var_cf[c]) / bas_var_se[c]);
  }
  return dev;
}

VerifyReport run_verify(const VerifyOptions& opts) {
  if (opts.trials < 1) throw std::invalid_argument("run_verify: trials must be >= 1");
  constexpr std::size_t kChoices[] = {2, 3, 5, 10};

  struct TrialResult {
    double identity[6];
    double sampler_agreement = -1.0;  // negative when not sampled
    double closed_form_fit = -1.0;
    std::string params;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(opts.trials));

  const Rng base(opts.seed);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int t = 0; t < opts.trials; ++t) {
    Rng rng = base.split(static_cast<std::uint64_t>(t));
    const std::size_t k = kChoices[rng.next_u64() % 4];
    const CourtroomParams cp = random_params(k, rng);
    TrialResult& r = results[static_cast<std::size_t>(t)];
    r.identity[0] = check_reduction_dirichlet(cp);
    r.identity[1] = check_mixture_aggregation(cp);
    r.identity[2] = check_predictor_blend(cp);
    r.identity[3] = check_decomposition(cp);
    r.identity[4] = check_pairwise(cp);
    r.identity[5] = check_variance_assembly(cp);
    if (opts.mc_draws > 0 && t % opts.mc_stride == 0) {
      const SamplingDeviation dev =
          check_sampling(cp, opts.mc_draws, rng.split(777));
      r.sampler_agreement = dev.sampler_agreement;
      r.closed_form_fit = dev.closed_form_fit;
    }
    r.params = describe_params(cp);
  }

  const char* names[6] = {"reduction-dirichlet", "mixture-aggregation",
                          "predictor-blend",     "eu-decomposition",
                          "eu-pairwise",         "variance-assembly"};
  const double tols[6] = {opts.tol_identity,      opts.tol_identity,
                          opts.tol_identity,      opts.tol_decomposition,
                          opts.tol_decomposition, opts.tol_decomposition};

  VerifyReport report;
  for (int c = 0; c < 6; ++c) {
    CheckSummary summary;
    summary.name = names[c];
    for (const TrialResult& r : results) {
      summary.runs++;
      if (r.identity[c] > summary.worst) {
        summary.worst = r.identity[c];
        summary.worst_example = r.params;
      }
      if (r.identity[c] > tols[c]) summary.failures++;
    }
    report.checks.push_back(std::move(summary));
  }

  CheckSummary dual{"dual-sampling-agreement", 0, 0, 0.0, ""};
  CheckSummary fit{"moments-vs-sampling", 0, 0, 0.0, ""};
  for (const TrialResult& r : results) {
    if (r.sampler_agreement < 0.0) continue;
    dual.runs++;
    fit.runs++;
    if (r.sampler_agreement > dual.worst) {
      dual.worst = r.sampler_agreement;
      dual.worst_example = r.params;
    }
    if (r.closed_form_fit > fit.worst) {
      fit.worst = r.closed_form_fit;
      fit.worst_example = r.params;
    }
    if (r.sampler_agreement > opts.se_multiplier) dual.failures++;
    if (r.closed_form_fit > opts.se_multiplier) fit.failures++;
  }
  report.checks.push_back(std::move(dual));
  report.checks.push_back(std::move(fit));
  return report;
}

}  // namespace modex
