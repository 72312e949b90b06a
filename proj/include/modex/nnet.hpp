#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modex/courtroom.hpp"
#include "modex/matrix.hpp"
#include "modex/rng.hpp"

namespace modex {

enum class Activation : std::uint8_t { kIdentity = 0, kTanh = 1 };

struct Layer {
  Matrix w;
  std::vector<double> b;
  Activation act = Activation::kIdentity;
};

// Warm-start vectors for one power-iteration-normalized matrix.
struct SpectralState {
  std::vector<double> u;
  std::vector<double> v;
};

struct ModelConfig {
  std::size_t feature_dim = 16;      // width of the extracted feature z
  std::size_t extractor_layers = 2;  // tanh layers input -> ... -> feature
  std::size_t head_layers = 1;       // 1 = linear head, 2 = one hidden layer
  std::size_t head_hidden = 32;      // hidden width for head_layers >= 2
};

// Feature extractor plus the three prediction heads. The evidence head
// feeds exp() to produce alpha, the gating head feeds softmax() to produce
// omega, and the strength head feeds exp() to produce tau. Spectral
// normalization state covers the extractor and the evidence head only.
struct ModelState {
  std::size_t input_dim = 0;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  // per-feature input standardization, fitted on the training split and
  // applied before the extractor; identity until set_standardizer is called
  std::vector<double> input_mean;
  std::vector<double> input_scale;
  std::vector<Layer> extractor;
  std::vector<Layer> alpha_head;
  std::vector<Layer> omega_head;
  std::vector<Layer> tau_head;
  std::vector<SpectralState> sn;  // extractor matrices first, then alpha head

  std::size_t parameter_count() const;
};

// Column mean/std standardizer; near-constant columns fall back to scale 1.
void set_standardizer(ModelState& m, const Matrix& train_features);

struct LayerGrad {
  Matrix w;
  std::vector<double> b;
};

// Cotangents shaped like the trainable part of a ModelState.
struct Gradients {
  std::vector<LayerGrad> extractor;
  std::vector<LayerGrad> alpha_head;
  std::vector<LayerGrad> omega_head;
  std::vector<LayerGrad> tau_head;

  static Gradients zeros_like(const ModelState& m);
  void add(const Gradients& other);
  void scale(double s);
  bool all_finite() const;
};

// Training-time model surgery used by the ablation study and the reduced
// baseline: pin omega to uniform, share tau across classes, or drop loss
// regularizers.
struct AblationFlags {
  bool fix_omega_uniform = false;
  bool fix_tau_shared = false;
  bool drop_omega_reg = false;
  bool drop_tau_reg = false;
};

// Fan-in uniform initialization, biases zero.
ModelState init_model(std::size_t input_dim, std::size_t num_classes,
                      const ModelConfig& cfg, Rng& rng);

// x -> z -> (exp, softmax, exp) -> courtroom parameters.
// Evidence and strength logits are clamped to [-30, 30] before exp; the
// clamp never fires for sanely scaled inputs but bounds alpha and tau away
// from overflow. Throws on dimension mismatch or non-finite activations.
CourtroomParams forward(const ModelState& m, std::span<const double> x,
                        const AblationFlags& flags = {});

// (1-eps) on the target class, eps/(K-1) elsewhere. eps = 0 gives the
// one-hot vector, so the result is a plain probability vector rather than a
// strictly interior simplex point.
std::vector<double> smoothed_target(std::size_t y, double eps, std::size_t k);

struct LossTerms {
  double mse = 0.0;        // squared error of the predictive mean
  double omega_reg = 0.0;  // squared error of the plausibility weights
  double tau_reg = 0.0;    // KL(softmax(tau) || smoothed target)
  double total() const { return mse + omega_reg + tau_reg; }
};

// Composite objective for one example. The KL regularizer takes softmax of
// the tau values (after the exp activation). A smoothed target with any
// zero entry would make the KL infinite; that is rejected as a domain
// error.
LossTerms loss_terms(const CourtroomParams& cp, std::size_t y, double eps,
                     const AblationFlags& flags = {});
double loss(const CourtroomParams& cp, std::size_t y, double eps,
            const AblationFlags& flags = {});

// Mean loss over the batch and its exact gradient. Rows of xs are
// examples. Work is blocked in fixed-size groups of examples and combined
// in index order, so the result does not depend on thread count.
std::pair<double, Gradients> backward(const ModelState& m, const Matrix& xs,
                                      std::span<const int> ys, double eps,
                                      const AblationFlags& flags = {});

// One warm-started power iteration per matrix of the extractor and the
// evidence head; each matrix is divided by its estimated largest singular
// value. Gating and strength heads are never touched. A zero matrix passes
// through unchanged with a warning on stderr.
void spectral_normalize(ModelState& m);

// Versioned little-endian binary checkpoint; round-trips bit-exactly.
void save_checkpoint(const ModelState& m, const std::string& path);
ModelState load_checkpoint(const std::string& path);

}  // namespace modex
