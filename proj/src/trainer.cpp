#include "modex/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "modex/courtroom.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace modex {

void TrainConfig::validate() const {
  if (max_epochs == 0 || step_size == 0 || batch_size == 0) {
    throw std::invalid_argument("TrainConfig: counts must be positive");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("TrainConfig: gamma must lie in (0, 1)");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("TrainConfig: label smoothing must lie in [0, 1]");
  }
}

AdamState AdamState::zeros_like(const ModelState& model) {
  AdamState s;
  s.m = Gradients::zeros_like(model);
  s.v = Gradients::zeros_like(model);
  return s;
}

namespace {

void adam_update_array(std::vector<double>& theta, const std::vector<double>& g,
                       std::vector<double>& m, std::vector<double>& v,
                       double lr, double b1, double b2, double bc1, double bc2,
                       double eps_adam) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps_adam);
  }
}

void adam_update_part(std::vector<Layer>& layers,
                      const std::vector<LayerGrad>& g,
                      std::vector<LayerGrad>& m, std::vector<LayerGrad>& v,
                      double lr, double b1, double b2, double bc1, double bc2,
                      double eps_adam) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    adam_update_array(layers[i].w.data, g[i].w.data, m[i].w.data, v[i].w.data,
                      lr, b1, b2, bc1, bc2, eps_adam);
    adam_update_array(layers[i].b, g[i].b, m[i].b, v[i].b, lr, b1, b2, bc1,
                      bc2, eps_adam);
  }
}

bool model_finite(const ModelState& m) {
  for (const auto* part :
       {&m.extractor, &m.alpha_head, &m.omega_head, &m.tau_head}) {
    for (const Layer& layer : *part) {
      if (!layer.w.all_finite()) return false;
      for (double b : layer.b) {
        if (!std::isfinite(b)) return false;
      }
    }
  }
  return true;
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.next_u64() % (i + 1);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

constexpr std::size_t kEvalBlock = 64;

}  // namespace

void adam_step(ModelState& model, const Gradients& g, AdamState& s, double lr) {
  s.timestep += 1;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.timestep));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.timestep));
  adam_update_part(model.extractor, g.extractor, s.m.extractor, s.v.extractor,
                   lr, s.beta1, s.beta2, bc1, bc2, s.eps_adam);
  adam_update_part(model.alpha_head, g.alpha_head, s.m.alpha_head,
                   s.v.alpha_head, lr, s.beta1, s.beta2, bc1, bc2, s.eps_adam);
  adam_update_part(model.omega_head, g.omega_head, s.m.omega_head,
                   s.v.omega_head, lr, s.beta1, s.beta2, bc1, bc2, s.eps_adam);
  adam_update_part(model.tau_head, g.tau_head, s.m.tau_head, s.v.tau_head, lr,
                   s.beta1, s.beta2, bc1, bc2, s.eps_adam);
  if (!model_finite(model)) {
    throw std::runtime_error("adam_step: non-finite parameter update");
  }
}

double scheduled_lr(const TrainConfig& cfg, std::size_t epoch) {
  const auto decays = static_cast<double>(epoch / cfg.step_size);
  return cfg.lr * std::pow(cfg.gamma, decays);
}

std::pair<double, double> evaluate(const ModelState& model,
                                   const LabeledDataset& ds, double eps,
                                   const AblationFlags& flags) {
  if (ds.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  const std::size_t n = ds.size();
  const std::size_t n_blocks = (n + kEvalBlock - 1) / kEvalBlock;
  std::vector<double> block_loss(n_blocks, 0.0);
  std::vector<std::size_t> block_correct(n_blocks, 0);

  std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kEvalBlock;
    const std::size_t end = std::min(begin + kEvalBlock, n);
    try {
      for (std::size_t i = begin; i < end; ++i) {
        std::span<const double> x(ds.features.data.data() + i * ds.dim(), ds.dim());
        const CourtroomParams cp = forward(model, x, flags);
        block_loss[b] += loss(cp, static_cast<std::size_t>(ds.labels[i]), eps, flags);
        const SimplexVec mu = efd_mean(cp);
        std::size_t arg = 0;
        for (std::size_t k = 1; k < mu.size(); ++k) {
          if (mu[k] > mu[arg]) arg = k;
        }
        if (arg == static_cast<std::size_t>(ds.labels[i])) block_correct[b]++;
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    loss_sum += block_loss[b];
    correct += block_correct[b];
  }
  return {loss_sum / static_cast<double>(n),
          static_cast<double>(correct) / static_cast<double>(n)};
}

TrainResult train(const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const LabeledDataset& train_set,
                  const LabeledDataset& val_set) {
  cfg.validate();
  if (train_set.size() == 0 || val_set.size() == 0) {
    throw std::invalid_argument("train: datasets must be nonempty");
  }
  if (train_set.dim() != val_set.dim() ||
      train_set.num_classes != val_set.num_classes) {
    throw std::invalid_argument("train: train/val shape mismatch");
  }

  Rng rng(cfg.seed);
  Rng init_rng = rng.split(0);
  Rng shuffle_rng = rng.split(1);

  ModelState model = init_model(train_set.dim(), train_set.num_classes,
                                model_cfg, init_rng);
  set_standardizer(model, train_set.features);
  spectral_normalize(model);
  AdamState adam = AdamState::zeros_like(model);

  ModelState best_model = model;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_best = 0;
  History history;

  const std::size_t n = train_set.size();
  const std::size_t d = train_set.dim();

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = scheduled_lr(cfg, epoch);
    const auto perm = permutation(n, shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t step = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++step) {
      const std::size_t count = std::min(cfg.batch_size, n - start);
      Matrix xs(count, d);
      std::vector<int> ys(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t r = perm[start + i];
        std::copy_n(train_set.features.data.begin() + r * d, d,
                    xs.data.begin() + i * d);
        ys[i] = train_set.labels[r];
      }
      try {
        auto [batch_loss, grads] = backward(model, xs, ys, cfg.eps, cfg.ablation);
        adam_step(model, grads, adam, lr);
        epoch_loss += batch_loss * static_cast<double>(count);
      } catch (const std::runtime_error& err) {
        throw std::runtime_error("train: diverged at epoch " +
                                 std::to_string(epoch) + " step " +
                                 std::to_string(step) + ": " + err.what());
      }
      spectral_normalize(model);
    }
    const auto [val_loss, val_acc] = evaluate(model, val_set, cfg.eps, cfg.ablation);
    history.push_back({epoch, epoch_loss / static_cast<double>(n), val_loss,
                       val_acc, lr});
    if (val_loss < best_val) {
      best_val = val_loss;
      best_model = model;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.early_stop_patience) break;
    }
  }
  return {std::move(best_model), std::move(history)};
}

std::vector<UncertaintyReport> predict_batch(const ModelState& model,
                                             const Matrix& xs,
                                             const AblationFlags& flags) {
  if (xs.cols != model.input_dim) {
    throw std::invalid_argument("predict_batch: input dimension mismatch");
  }
  std::vector<UncertaintyReport> reports(xs.rows);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (long long i = 0; i < static_cast<long long>(xs.rows); ++i) {
    std::span<const double> x(
        xs.data.data() + static_cast<std::size_t>(i) * xs.cols, xs.cols);
    reports[static_cast<std::size_t>(i)] = report(forward(model, x, flags));
  }
  return reports;
}

void save_history_csv(const History& history, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("save_history_csv: cannot open " + path);
  out << "epoch,train_loss,val_loss,val_acc,lr\n";
  char buf[160];
  for (const EpochStats& e : history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", e.epoch,
                  e.train_loss, e.val_loss, e.val_acc, e.lr);
    out << buf;
  }
}

}  // namespace modex
