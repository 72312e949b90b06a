#include "modex/nnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "modex/numerics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace modex {

namespace {

constexpr double kLogitClamp = 30.0;

double clamp_logit(double x) { return std::clamp(x, -kLogitClamp, kLogitClamp); }
bool clamp_interior(double x) { return x > -kLogitClamp && x < kLogitClamp; }

std::vector<double> apply_activation(Activation act, std::vector<double> v) {
  if (act == Activation::kTanh) {
    for (double& x : v) x = std::tanh(x);
  }
  return v;
}

// Per-layer input and post-activation output kept for the backward pass.
struct StackTrace {
  std::vector<std::vector<double>> inputs;   // input to each layer
  std::vector<std::vector<double>> outputs;  // activated output of each layer
};

std::vector<double> run_stack(const std::vector<Layer>& layers,
                              std::vector<double> h, StackTrace* trace) {
  for (const Layer& layer : layers) {
    if (trace) trace->inputs.push_back(h);
    std::vector<double> pre(layer.w.rows);
    matvec(layer.w, h, pre);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += layer.b[i];
    h = apply_activation(layer.act, std::move(pre));
    if (trace) trace->outputs.push_back(h);
  }
  return h;
}

// Given the cotangent of the stack output, accumulates layer grads (scaled
// by `scale`) and returns the cotangent of the stack input.
std::vector<double> backprop_stack(const std::vector<Layer>& layers,
                                   const StackTrace& trace,
                                   std::vector<double> dout,
                                   std::vector<LayerGrad>& grads, double scale) {
  for (std::size_t li = layers.size(); li-- > 0;) {
    const Layer& layer = layers[li];
    const auto& h_in = trace.inputs[li];
    const auto& h_out = trace.outputs[li];
    // d(pre-activation)
    if (layer.act == Activation::kTanh) {
      for (std::size_t i = 0; i < dout.size(); ++i) {
        dout[i] *= 1.0 - h_out[i] * h_out[i];
      }
    }
    add_outer(grads[li].w, dout, h_in, scale);
    for (std::size_t i = 0; i < dout.size(); ++i) grads[li].b[i] += scale * dout[i];
    std::vector<double> din(layer.w.cols);
    matvec_t(layer.w, dout, din);
    dout = std::move(din);
  }
  return dout;
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(std::string("forward: non-finite ") + what);
    }
  }
}

struct HeadOutputs {
  std::vector<double> alpha_logits, omega_logits, tau_logits;
  std::vector<double> alpha, tau_raw, tau_eff;
  SimplexVec omega = SimplexVec::unchecked({1.0});
  bool omega_pinned = false;
  bool tau_shared = false;
};

struct FullTrace {
  StackTrace extractor, alpha_head, omega_head, tau_head;
  std::vector<double> z;
  HeadOutputs heads;
};

HeadOutputs activate_heads(std::vector<double> alpha_logits,
                           std::vector<double> omega_logits,
                           std::vector<double> tau_logits,
                           const AblationFlags& flags) {
  check_finite(alpha_logits, "evidence logits");
  check_finite(omega_logits, "gating logits");
  check_finite(tau_logits, "strength logits");
  const std::size_t k = alpha_logits.size();
  HeadOutputs out;
  out.alpha.resize(k);
  out.tau_raw.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.alpha[i] = std::exp(clamp_logit(alpha_logits[i]));
    out.tau_raw[i] = std::exp(clamp_logit(tau_logits[i]));
  }
  if (flags.fix_omega_uniform) {
    out.omega = SimplexVec::unchecked(
        std::vector<double>(k, 1.0 / static_cast<double>(k)));
    out.omega_pinned = true;
  } else {
    out.omega = softmax(omega_logits);
  }
  if (flags.fix_tau_shared) {
    double mean_tau = 0.0;
    for (double t : out.tau_raw) mean_tau += t;
    mean_tau /= static_cast<double>(k);
    out.tau_eff.assign(k, mean_tau);
    out.tau_shared = true;
  } else {
    out.tau_eff = out.tau_raw;
  }
  out.alpha_logits = std::move(alpha_logits);
  out.omega_logits = std::move(omega_logits);
  out.tau_logits = std::move(tau_logits);
  return out;
}

CourtroomParams run_forward(const ModelState& m, std::span<const double> x,
                            const AblationFlags& flags, FullTrace* trace) {
  if (x.size() != m.input_dim) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  std::vector<double> standardized(x.begin(), x.end());
  for (std::size_t j = 0; j < standardized.size(); ++j) {
    standardized[j] = (standardized[j] - m.input_mean[j]) / m.input_scale[j];
  }
  std::vector<double> z = run_stack(m.extractor, std::move(standardized),
                                    trace ? &trace->extractor : nullptr);
  check_finite(z, "feature vector");
  auto heads = activate_heads(
      run_stack(m.alpha_head, z, trace ? &trace->alpha_head : nullptr),
      run_stack(m.omega_head, z, trace ? &trace->omega_head : nullptr),
      run_stack(m.tau_head, z, trace ? &trace->tau_head : nullptr), flags);
  CourtroomParams cp(heads.alpha, heads.omega, heads.tau_eff);
  if (trace) {
    trace->z = std::move(z);
    trace->heads = std::move(heads);
  }
  return cp;
}

std::vector<LayerGrad> zero_grads(const std::vector<Layer>& layers) {
  std::vector<LayerGrad> g;
  g.reserve(layers.size());
  for (const Layer& layer : layers) {
    g.push_back({Matrix(layer.w.rows, layer.w.cols),
                 std::vector<double>(layer.b.size(), 0.0)});
  }
  return g;
}

Layer make_layer(std::size_t out_dim, std::size_t in_dim, Activation act,
                 Rng& rng) {
  Layer layer;
  layer.w = Matrix(out_dim, in_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (double& x : layer.w.data) x = bound * (2.0 * rng.next_double() - 1.0);
  layer.b.assign(out_dim, 0.0);
  layer.act = act;
  return layer;
}

std::vector<Layer> make_head(std::size_t in_dim, std::size_t out_dim,
                             const ModelConfig& cfg, Rng& rng) {
  std::vector<Layer> head;
  if (cfg.head_layers <= 1) {
    head.push_back(make_layer(out_dim, in_dim, Activation::kIdentity, rng));
    return head;
  }
  head.push_back(make_layer(cfg.head_hidden, in_dim, Activation::kTanh, rng));
  for (std::size_t i = 2; i < cfg.head_layers; ++i) {
    head.push_back(make_layer(cfg.head_hidden, cfg.head_hidden, Activation::kTanh, rng));
  }
  head.push_back(make_layer(out_dim, cfg.head_hidden, Activation::kIdentity, rng));
  return head;
}

}  // namespace

std::size_t ModelState::parameter_count() const {
  std::size_t n = 0;
  for (const auto* part : {&extractor, &alpha_head, &omega_head, &tau_head}) {
    for (const Layer& layer : *part) n += layer.w.data.size() + layer.b.size();
  }
  return n;
}

Gradients Gradients::zeros_like(const ModelState& m) {
  return Gradients{zero_grads(m.extractor), zero_grads(m.alpha_head),
                   zero_grads(m.omega_head), zero_grads(m.tau_head)};
}

void Gradients::add(const Gradients& other) {
  auto add_part = [](std::vector<LayerGrad>& a, const std::vector<LayerGrad>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a[i].w.data.size(); ++j) {
        a[i].w.data[j] += b[i].w.data[j];
      }
      for (std::size_t j = 0; j < a[i].b.size(); ++j) a[i].b[j] += b[i].b[j];
    }
  };
  add_part(extractor, other.extractor);
  add_part(alpha_head, other.alpha_head);
  add_part(omega_head, other.omega_head);
  add_part(tau_head, other.tau_head);
}

void Gradients::scale(double s) {
  for (auto* part : {&extractor, &alpha_head, &omega_head, &tau_head}) {
    for (LayerGrad& g : *part) {
      for (double& x : g.w.data) x *= s;
      for (double& x : g.b) x *= s;
    }
  }
}

bool Gradients::all_finite() const {
  for (const auto* part : {&extractor, &alpha_head, &omega_head, &tau_head}) {
    for (const LayerGrad& g : *part) {
      if (!g.w.all_finite()) return false;
      for (double x : g.b) {
        if (!std::isfinite(x)) return false;
      }
    }
  }
  return true;
}

ModelState init_model(std::size_t input_dim, std::size_t num_classes,
                      const ModelConfig& cfg, Rng& rng) {
  if (input_dim == 0 || num_classes < 2 || cfg.feature_dim == 0 ||
      cfg.extractor_layers == 0) {
    throw std::invalid_argument("init_model: bad dimensions");
  }
  ModelState m;
  m.input_dim = input_dim;
  m.feature_dim = cfg.feature_dim;
  m.num_classes = num_classes;
  m.input_mean.assign(input_dim, 0.0);
  m.input_scale.assign(input_dim, 1.0);
  m.extractor.push_back(make_layer(cfg.feature_dim, input_dim, Activation::kTanh, rng));
  for (std::size_t i = 1; i < cfg.extractor_layers; ++i) {
    m.extractor.push_back(
        make_layer(cfg.feature_dim, cfg.feature_dim, Activation::kTanh, rng));
  }
  m.alpha_head = make_head(cfg.feature_dim, num_classes, cfg, rng);
  m.omega_head = make_head(cfg.feature_dim, num_classes, cfg, rng);
  m.tau_head = make_head(cfg.feature_dim, num_classes, cfg, rng);
  m.sn.resize(m.extractor.size() + m.alpha_head.size());
  return m;
}

CourtroomParams forward(const ModelState& m, std::span<const double> x,
                        const AblationFlags& flags) {
  return run_forward(m, x, flags, nullptr);
}

void set_standardizer(ModelState& m, const Matrix& train_features) {
  if (train_features.cols != m.input_dim || train_features.rows == 0) {
    throw std::invalid_argument("set_standardizer: feature shape mismatch");
  }
  const auto n = static_cast<double>(train_features.rows);
  for (std::size_t j = 0; j < m.input_dim; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < train_features.rows; ++i) {
      mean += train_features(i, j);
    }
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < train_features.rows; ++i) {
      const double dx = train_features(i, j) - mean;
      var += dx * dx;
    }
    const double std_dev = std::sqrt(var / n);
    m.input_mean[j] = mean;
    m.input_scale[j] = std_dev > 1e-9 ? std_dev : 1.0;
  }
}

std::vector<double> smoothed_target(std::size_t y, double eps, std::size_t k) {
  if (k < 2) throw std::invalid_argument("smoothed_target: need at least 2 classes");
  if (y >= k) throw std::out_of_range("smoothed_target: class index out of range");
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::domain_error("smoothed_target: eps must lie in [0, 1]");
  }
  std::vector<double> t(k, eps / static_cast<double>(k - 1));
  t[y] = 1.0 - eps;
  return t;
}

LossTerms loss_terms(const CourtroomParams& cp, std::size_t y, double eps,
                     const AblationFlags& flags) {
  if (y >= cp.size()) throw std::out_of_range("loss: class index out of range");
  const SimplexVec mu = efd_mean(cp);
  LossTerms terms;
  for (std::size_t k = 0; k < cp.size(); ++k) {
    const double yk = (k == y) ? 1.0 : 0.0;
    const double dm = yk - mu[k];
    terms.mse += dm * dm;
    if (!flags.drop_omega_reg) {
      const double dw = yk - cp.omega()[k];
      terms.omega_reg += dw * dw;
    }
  }
  if (!flags.drop_tau_reg) {
    const std::vector<double> target = smoothed_target(y, eps, cp.size());
    const SimplexVec s = softmax(cp.tau());
    for (std::size_t k = 0; k < cp.size(); ++k) {
      if (target[k] <= 0.0) {
        throw std::domain_error("loss: smoothed target has a zero entry, KL undefined");
      }
      // 0 ln 0 := 0; softmax can underflow to exact zero at extreme tau
      if (s[k] > 0.0) {
        terms.tau_reg += s[k] * (std::log(s[k]) - std::log(target[k]));
      }
    }
  }
  return terms;
}

double loss(const CourtroomParams& cp, std::size_t y, double eps,
            const AblationFlags& flags) {
  return loss_terms(cp, y, eps, flags).total();
}

namespace {

// Cotangents of (alpha, omega, tau) from the squared error of the
// predictive mean, via the closed-form mean's Jacobian.
void mean_grad_to_params(const CourtroomParams& cp,
                         std::span<const double> g_mu,
                         std::vector<double>& g_alpha,
                         std::vector<double>& g_omega,
                         std::vector<double>& g_tau) {
  const std::size_t n = cp.size();
  const double a0 = cp.evidence_total();
  double kappa1 = 0.0;
  double s2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double dj = a0 + cp.tau()[j];
    kappa1 += cp.omega()[j] / dj;
    s2 += cp.omega()[j] / (dj * dj);
  }
  double c1 = 0.0;  // sum g_k alpha_k
  double c2 = 0.0;  // sum g_k tau_k omega_k / d_k^2
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = a0 + cp.tau()[k];
    c1 += g_mu[k] * cp.alpha()[k];
    c2 += g_mu[k] * cp.tau()[k] * cp.omega()[k] / (dk * dk);
  }
  for (std::size_t m = 0; m < n; ++m) {
    const double dm = a0 + cp.tau()[m];
    g_alpha[m] += g_mu[m] * kappa1 - c1 * s2 - c2;
    g_omega[m] += c1 / dm + g_mu[m] * cp.tau()[m] / dm;
    g_tau[m] += cp.omega()[m] * (g_mu[m] * a0 - c1) / (dm * dm);
  }
}

void backward_example(const ModelState& m, std::span<const double> x, int y,
                      double eps, const AblationFlags& flags, double scale,
                      double& loss_acc, Gradients& grads) {
  FullTrace trace;
  const CourtroomParams cp = run_forward(m, x, flags, &trace);
  const std::size_t n = cp.size();
  const LossTerms terms =
      loss_terms(cp, static_cast<std::size_t>(y), eps, flags);
  loss_acc += scale * terms.total();

  const SimplexVec mu = efd_mean(cp);
  std::vector<double> g_mu(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double yk = (static_cast<std::size_t>(y) == k) ? 1.0 : 0.0;
    g_mu[k] = 2.0 * (mu[k] - yk);
  }

  std::vector<double> g_alpha(n, 0.0), g_omega(n, 0.0), g_tau(n, 0.0);
  mean_grad_to_params(cp, g_mu, g_alpha, g_omega, g_tau);

  if (!flags.drop_omega_reg) {
    for (std::size_t k = 0; k < n; ++k) {
      const double yk = (static_cast<std::size_t>(y) == k) ? 1.0 : 0.0;
      g_omega[k] += 2.0 * (cp.omega()[k] - yk);
    }
  }
  if (!flags.drop_tau_reg) {
    const std::vector<double> target =
        smoothed_target(static_cast<std::size_t>(y), eps, n);
    const SimplexVec s = softmax(cp.tau());
    std::vector<double> v(n, 0.0);
    double v_bar = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (s[k] > 0.0) {
        v[k] = std::log(s[k]) - std::log(target[k]);
        v_bar += s[k] * v[k];
      }
    }
    for (std::size_t k = 0; k < n; ++k) g_tau[k] += s[k] * (v[k] - v_bar);
  }

  const HeadOutputs& heads = trace.heads;

  // chain through the activations back to head logits
  std::vector<double> d_alpha_logits(n), d_omega_logits(n, 0.0), d_tau_logits(n);
  for (std::size_t k = 0; k < n; ++k) {
    d_alpha_logits[k] = clamp_interior(heads.alpha_logits[k])
                            ? g_alpha[k] * heads.alpha[k]
                            : 0.0;
  }
  if (!heads.omega_pinned) {
    double inner = 0.0;
    for (std::size_t k = 0; k < n; ++k) inner += g_omega[k] * heads.omega[k];
    for (std::size_t k = 0; k < n; ++k) {
      d_omega_logits[k] = heads.omega[k] * (g_omega[k] - inner);
    }
  }
  std::vector<double> g_tau_raw(n, 0.0);
  if (heads.tau_shared) {
    double total = 0.0;
    for (double g : g_tau) total += g;
    const double shared = total / static_cast<double>(n);
    g_tau_raw.assign(n, shared);
  } else {
    g_tau_raw = g_tau;
  }
  for (std::size_t k = 0; k < n; ++k) {
    d_tau_logits[k] = clamp_interior(heads.tau_logits[k])
                          ? g_tau_raw[k] * heads.tau_raw[k]
                          : 0.0;
  }

  std::vector<double> dz(m.feature_dim, 0.0);
  auto into_z = [&dz](std::vector<double> d) {
    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] += d[i];
  };
  into_z(backprop_stack(m.alpha_head, trace.alpha_head,
                        std::move(d_alpha_logits), grads.alpha_head, scale));
  if (!heads.omega_pinned) {
    into_z(backprop_stack(m.omega_head, trace.omega_head,
                          std::move(d_omega_logits), grads.omega_head, scale));
  }
  into_z(backprop_stack(m.tau_head, trace.tau_head, std::move(d_tau_logits),
                        grads.tau_head, scale));
  backprop_stack(m.extractor, trace.extractor, std::move(dz), grads.extractor,
                 scale);
}

constexpr std::size_t kBackwardBlock = 16;

}  // namespace

std::pair<double, Gradients> backward(const ModelState& m, const Matrix& xs,
                                      std::span<const int> ys, double eps,
                                      const AblationFlags& flags) {
  if (xs.rows == 0 || ys.size() != xs.rows) {
    throw std::invalid_argument("backward: empty batch or label count mismatch");
  }
  const std::size_t batch = xs.rows;
  const std::size_t n_blocks = (batch + kBackwardBlock - 1) / kBackwardBlock;
  std::vector<Gradients> block_grads(n_blocks, Gradients::zeros_like(m));
  std::vector<double> block_loss(n_blocks, 0.0);

  // exceptions may not unwind out of the parallel region; marshal the
  // first one across the join
  std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBackwardBlock;
    const std::size_t end = std::min(begin + kBackwardBlock, batch);
    try {
      for (std::size_t i = begin; i < end; ++i) {
        std::span<const double> x(xs.data.data() + i * xs.cols, xs.cols);
        backward_example(m, x, ys[i], eps, flags, 1.0, block_loss[b],
                         block_grads[b]);
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  Gradients total = std::move(block_grads[0]);
  double loss_sum = block_loss[0];
  for (std::size_t b = 1; b < n_blocks; ++b) {
    total.add(block_grads[b]);
    loss_sum += block_loss[b];
  }
  const double inv = 1.0 / static_cast<double>(batch);
  total.scale(inv);
  if (!total.all_finite() || !std::isfinite(loss_sum)) {
    throw std::runtime_error("backward: non-finite gradient");
  }
  return {loss_sum * inv, std::move(total)};
}

void spectral_normalize(ModelState& m) {
  std::size_t sn_index = 0;
  auto normalize_part = [&m, &sn_index](std::vector<Layer>& layers) {
    for (Layer& layer : layers) {
      SpectralState& state = m.sn[sn_index++];
      const double sigma = spectral_sigma_warm(layer.w, state.u, state.v);
      if (sigma == 0.0) {
        std::cerr << "spectral_normalize: zero matrix left unchanged\n";
        continue;
      }
      for (double& x : layer.w.data) x /= sigma;
    }
  };
  normalize_part(m.extractor);
  normalize_part(m.alpha_head);
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

constexpr char kMagic[4] = {'M', 'D', 'X', 'C'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  write_pod(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::istream& in) {
  const auto n = read_pod<std::uint64_t>(in);
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void write_layers(std::ostream& out, const std::vector<Layer>& layers) {
  write_pod(out, static_cast<std::uint64_t>(layers.size()));
  for (const Layer& layer : layers) {
    write_pod(out, static_cast<std::uint8_t>(layer.act));
    write_pod(out, static_cast<std::uint64_t>(layer.w.rows));
    write_pod(out, static_cast<std::uint64_t>(layer.w.cols));
    out.write(reinterpret_cast<const char*>(layer.w.data.data()),
              static_cast<std::streamsize>(layer.w.data.size() * sizeof(double)));
    write_doubles(out, layer.b);
  }
}

std::vector<Layer> read_layers(std::istream& in) {
  const auto count = read_pod<std::uint64_t>(in);
  std::vector<Layer> layers(count);
  for (Layer& layer : layers) {
    layer.act = static_cast<Activation>(read_pod<std::uint8_t>(in));
    const auto rows = read_pod<std::uint64_t>(in);
    const auto cols = read_pod<std::uint64_t>(in);
    layer.w = Matrix(rows, cols);
    in.read(reinterpret_cast<char*>(layer.w.data.data()),
            static_cast<std::streamsize>(layer.w.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    layer.b = read_doubles(in);
  }
  return layers;
}

}  // namespace

void save_checkpoint(const ModelState& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(m.input_dim));
  write_pod(out, static_cast<std::uint64_t>(m.feature_dim));
  write_pod(out, static_cast<std::uint64_t>(m.num_classes));
  write_doubles(out, m.input_mean);
  write_doubles(out, m.input_scale);
  write_layers(out, m.extractor);
  write_layers(out, m.alpha_head);
  write_layers(out, m.omega_head);
  write_layers(out, m.tau_head);
  write_pod(out, static_cast<std::uint64_t>(m.sn.size()));
  for (const SpectralState& s : m.sn) {
    write_doubles(out, s.u);
    write_doubles(out, s.v);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

ModelState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version");
  }
  ModelState m;
  m.input_dim = read_pod<std::uint64_t>(in);
  m.feature_dim = read_pod<std::uint64_t>(in);
  m.num_classes = read_pod<std::uint64_t>(in);
  m.input_mean = read_doubles(in);
  m.input_scale = read_doubles(in);
  m.extractor = read_layers(in);
  m.alpha_head = read_layers(in);
  m.omega_head = read_layers(in);
  m.tau_head = read_layers(in);
  const auto sn_count = read_pod<std::uint64_t>(in);
  m.sn.resize(sn_count);
  for (SpectralState& s : m.sn) {
    s.u = read_doubles(in);
    s.v = read_doubles(in);
  }
  return m;
}

}  // namespace modex
