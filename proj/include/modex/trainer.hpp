#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "modex/data.hpp"
#include "modex/nnet.hpp"
#include "modex/uncertainty.hpp"

namespace modex {

struct TrainConfig {
  std::size_t max_epochs = 100;
  double lr = 1e-3;
  std::size_t step_size = 100;  // epochs between learning-rate decays
  double gamma = 0.1;           // decay factor
  std::size_t batch_size = 64;
  double eps = 0.1;  // label smoothing
  std::uint64_t seed = 1;
  std::size_t early_stop_patience = 20;
  AblationFlags ablation;

  void validate() const;
};

// First/second-moment accumulators shaped like the gradients.
struct AdamState {
  Gradients m;
  Gradients v;
  std::size_t timestep = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;

  static AdamState zeros_like(const ModelState& model);
};

// Standard bias-corrected Adam update, in place. Throws on a non-finite
// result.
void adam_step(ModelState& model, const Gradients& g, AdamState& s, double lr);

struct EpochStats {
  std::size_t epoch = 0;  // zero-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double lr = 0.0;
};

using History = std::vector<EpochStats>;

struct TrainResult {
  ModelState model;  // weights at the best validation loss
  History history;
};

// Minibatch loop: shuffle, forward/loss/backward, Adam step, spectral
// normalization, step-decayed learning rate, early stopping on validation
// loss. Fully deterministic given (cfg, model_cfg, datasets).
TrainResult train(const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const LabeledDataset& train_set, const LabeledDataset& val_set);

// Mean loss and accuracy over a dataset (no gradients).
std::pair<double, double> evaluate(const ModelState& model,
                                   const LabeledDataset& ds, double eps,
                                   const AblationFlags& flags = {});

// One uncertainty report per row of xs; single pass, no sampling.
std::vector<UncertaintyReport> predict_batch(const ModelState& model,
                                             const Matrix& xs,
                                             const AblationFlags& flags = {});

// Learning rate in effect at a zero-based epoch index.
double scheduled_lr(const TrainConfig& cfg, std::size_t epoch);

// History CSV: header epoch,train_loss,val_loss,val_acc,lr.
void save_history_csv(const History& history, const std::string& path);

}  // namespace modex
