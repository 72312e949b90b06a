#include "modex/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace modex {

double Rng::next_gaussian() noexcept {
  // Marsaglia polar; discards the paired variate to keep the stream layout
  // a pure function of the draw count.
  for (;;) {
    const double u = 2.0 * next_double() - 1.0;
    const double v = 2.0 * next_double() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};

double log_gamma_lanczos(double x) {
  // valid for x >= 0.5
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (int i = 1; i < 9; ++i) series += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  constexpr double kHalfLogTwoPi = 0.91893853320467274178;
  return kHalfLogTwoPi + (z + 0.5) * std::log(t) - t + std::log(series);
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error("log_gamma: requires finite x > 0");
  }
  if (x < 0.5) {
    // reflection: ln Gamma(x) = ln(pi / sin(pi x)) - ln Gamma(1 - x)
    constexpr double kPi = 3.14159265358979323846;
    return std::log(kPi / std::sin(kPi * x)) - log_gamma_lanczos(1.0 - x);
  }
  return log_gamma_lanczos(x);
}

double sample_gamma(double shape, Rng& rng) {
  if (!std::isfinite(shape) || shape <= 0.0) {
    throw std::domain_error("sample_gamma: requires finite shape > 0");
  }
  if (shape < 1.0) {
    // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.next_double_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

SimplexVec softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::domain_error("softmax: empty input");
  double max_logit = logits[0];
  for (double x : logits) {
    if (!std::isfinite(x)) throw std::domain_error("softmax: non-finite logit");
    max_logit = std::max(max_logit, x);
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return SimplexVec::unchecked(std::move(out));
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double entropy(const SimplexVec& p) { return entropy(std::span<const double>(p.probs())); }

SpectralEstimate spectral_sigma(const Matrix& w, int iters, Rng& rng) {
  if (iters < 1) throw std::invalid_argument("spectral_sigma: iters must be >= 1");
  SpectralEstimate est;
  est.u.resize(w.rows);
  est.v.resize(w.cols);
  for (double& x : est.u) x = rng.next_gaussian();
  if (normalize(est.u) == 0.0) est.u[0] = 1.0;
  for (int it = 0; it < iters; ++it) {
    const double sigma = spectral_sigma_warm(w, est.u, est.v);
    if (sigma == 0.0) {
      est.sigma = 0.0;
      est.degenerate = true;
      return est;
    }
    est.sigma = sigma;
  }
  return est;
}

double spectral_sigma_warm(const Matrix& w, std::vector<double>& u,
                           std::vector<double>& v) {
  if (u.size() != w.rows) {
    u.assign(w.rows, 0.0);
    u[0] = 1.0;
  }
  v.resize(w.cols);
  matvec_t(w, u, v);
  if (normalize(v) == 0.0) return 0.0;
  matvec(w, v, u);
  const double sigma = normalize(u);
  return sigma;
}

}  // namespace modex
