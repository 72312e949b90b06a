#include "modex/courtroom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "modex/numerics.hpp"

namespace modex {

namespace {

void check_positive_finite(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw std::domain_error(std::string(what) + ": empty vector");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::domain_error(std::string(what) + ": entries must be positive and finite");
    }
  }
}

}  // namespace

CourtroomParams::CourtroomParams(std::vector<double> alpha, SimplexVec omega,
                                 std::vector<double> tau)
    : alpha_(std::move(alpha)), omega_(std::move(omega)), tau_(std::move(tau)) {
  check_positive_finite(alpha_, "CourtroomParams.alpha");
  check_positive_finite(tau_, "CourtroomParams.tau");
  if (omega_.size() != alpha_.size() || tau_.size() != alpha_.size()) {
    throw std::domain_error("CourtroomParams: alpha, omega, tau lengths differ");
  }
  evidence_total_ = 0.0;
  for (double a : alpha_) evidence_total_ += a;
}

DirichletDist expert_concentration(const CourtroomParams& cp, std::size_t k) {
  if (k >= cp.size()) throw std::out_of_range("expert_concentration: class index out of range");
  std::vector<double> conc = cp.alpha();
  conc[k] += cp.tau()[k];
  return DirichletDist(std::move(conc));
}

namespace {

// kappa1 = sum omega_j/(A+tau_j), kappa2 = sum omega_j/((A+tau_j)(A+tau_j+1))
struct Kappas {
  double k1 = 0.0;
  double k2 = 0.0;
};

Kappas kappas(const CourtroomParams& cp) {
  const double a0 = cp.evidence_total();
  Kappas k;
  for (std::size_t j = 0; j < cp.size(); ++j) {
    const double dj = a0 + cp.tau()[j];
    k.k1 += cp.omega()[j] / dj;
    k.k2 += cp.omega()[j] / (dj * (dj + 1.0));
  }
  return k;
}

}  // namespace

SimplexVec efd_mean(const CourtroomParams& cp) {
  const double a0 = cp.evidence_total();
  const double k1 = kappas(cp).k1;
  std::vector<double> mu(cp.size());
  for (std::size_t k = 0; k < cp.size(); ++k) {
    mu[k] = cp.alpha()[k] * k1 + cp.tau()[k] * cp.omega()[k] / (a0 + cp.tau()[k]);
  }
  return SimplexVec::unchecked(std::move(mu));
}

std::vector<double> efd_var(const CourtroomParams& cp) {
  const double a0 = cp.evidence_total();
  const auto [k1, k2] = kappas(cp);
  std::vector<double> var(cp.size());
  for (std::size_t k = 0; k < cp.size(); ++k) {
    const double ak = cp.alpha()[k];
    const double wk = cp.omega()[k];
    const double tk = cp.tau()[k];
    const double dk = a0 + tk;
    var[k] = ak * ak * (k2 - k1 * k1)
           + wk * tk * (2.0 * ak + tk + 1.0) / (dk * (dk + 1.0))
           + ak * k2
           - wk * wk * tk * tk / (dk * dk)
           - k1 * 2.0 * ak * wk * tk / dk;
  }
  return var;
}

SimplexVec efd_sample_mixture(const CourtroomParams& cp, Rng& rng) {
  // L ~ Cat(omega) by inverse CDF
  const double u = rng.next_double();
  std::size_t pick = cp.size() - 1;
  double cum = 0.0;
  for (std::size_t k = 0; k < cp.size(); ++k) {
    cum += cp.omega()[k];
    if (u < cum) {
      pick = k;
      break;
    }
  }
  return dir_sample(expert_concentration(cp, pick), rng);
}

SimplexVec efd_sample_basis(const CourtroomParams& cp, Rng& rng) {
  std::vector<double> y(cp.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < cp.size(); ++k) {
    y[k] = sample_gamma(cp.alpha()[k], rng);
    sum += y[k];
  }
  const double u = rng.next_double();
  std::size_t pick = cp.size() - 1;
  double cum = 0.0;
  for (std::size_t k = 0; k < cp.size(); ++k) {
    cum += cp.omega()[k];
    if (u < cum) {
      pick = k;
      break;
    }
  }
  const double boost = sample_gamma(cp.tau()[pick], rng);
  y[pick] += boost;
  sum += boost;
  for (double& x : y) x /= sum;
  return SimplexVec::unchecked(std::move(y));
}

MixtureRepr mixture_repr(const CourtroomParams& cp) {
  MixtureRepr repr{cp.omega(), {}};
  repr.expert_means.reserve(cp.size());
  for (std::size_t k = 0; k < cp.size(); ++k) {
    repr.expert_means.push_back(dir_mean(expert_concentration(cp, k)));
  }
  return repr;
}

SimplexVec aggregate(const MixtureRepr& repr) {
  const std::size_t n = repr.weights.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = repr.weights[k];
    for (std::size_t j = 0; j < n; ++j) out[j] += wk * repr.expert_means[k][j];
  }
  return SimplexVec::unchecked(std::move(out));
}

EdlSoftmaxRepr edl_softmax_repr(const CourtroomParams& cp) {
  const double a0 = cp.evidence_total();
  EdlSoftmaxRepr repr{0.0,
                      std::vector<double>(cp.size()),
                      SimplexVec::unchecked({}),
                      cp.omega()};
  std::vector<double> p_edl(cp.size());
  for (std::size_t k = 0; k < cp.size(); ++k) {
    const double dk = a0 + cp.tau()[k];
    repr.lambda_edl += a0 * cp.omega()[k] / dk;
    repr.lambda_sm[k] = cp.tau()[k] / dk;
    p_edl[k] = cp.alpha()[k] / a0;
  }
  repr.p_edl = SimplexVec::unchecked(std::move(p_edl));
  return repr;
}

SimplexVec reconstruct(const EdlSoftmaxRepr& repr) {
  std::vector<double> out(repr.lambda_sm.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = repr.lambda_edl * repr.p_edl[k] + repr.lambda_sm[k] * repr.p_sm[k];
  }
  return SimplexVec::unchecked(std::move(out));
}

CourtroomParams reduction_params(ReductionKind kind, const CourtroomParams& cp) {
  switch (kind) {
    case ReductionKind::kFlexibleDirichlet: {
      double mean_tau = 0.0;
      for (double t : cp.tau()) mean_tau += t;
      mean_tau /= static_cast<double>(cp.size());
      return CourtroomParams(cp.alpha(), cp.omega(),
                             std::vector<double>(cp.size(), mean_tau));
    }
    case ReductionKind::kDirichlet: {
      std::vector<double> w(cp.size());
      for (std::size_t k = 0; k < cp.size(); ++k) {
        w[k] = cp.alpha()[k] / cp.evidence_total();
      }
      return CourtroomParams(cp.alpha(), SimplexVec::unchecked(std::move(w)),
                             std::vector<double>(cp.size(), 1.0));
    }
  }
  throw std::invalid_argument("reduction_params: unknown kind");
}

}  // namespace modex
