#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <vector>

#include "modex/data.hpp"
#include "modex/eval.hpp"
#include "modex/trainer.hpp"
#include "oracles.hpp"

using namespace modex;

namespace {

ModelConfig small_model() {
  ModelConfig cfg;
  cfg.feature_dim = 16;
  cfg.extractor_layers = 2;
  cfg.head_layers = 1;
  return cfg;
}

TrainConfig quick_train(std::uint64_t seed, std::size_t epochs = 50) {
  TrainConfig cfg;
  cfg.max_epochs = epochs;
  cfg.lr = 5e-3;
  cfg.step_size = 40;
  cfg.gamma = 0.1;
  cfg.batch_size = 32;
  cfg.eps = 0.1;
  cfg.seed = seed;
  cfg.early_stop_patience = 200;  // effectively off unless a test wants it
  return cfg;
}

std::vector<double> flatten(const ModelState& m) {
  std::vector<double> out;
  for (const auto* part : {&m.extractor, &m.alpha_head, &m.omega_head, &m.tau_head}) {
    for (const Layer& layer : *part) {
      out.insert(out.end(), layer.w.data.begin(), layer.w.data.end());
      out.insert(out.end(), layer.b.begin(), layer.b.end());
    }
  }
  return out;
}

}  // namespace

TEST_CASE("adam first step with a unit gradient moves by the learning rate") {
  Rng rng(1);
  ModelConfig mc;
  mc.feature_dim = 2;
  mc.extractor_layers = 1;
  mc.head_layers = 1;
  ModelState m = init_model(2, 2, mc, rng);
  const double before = m.extractor[0].w.data[0];

  Gradients g = Gradients::zeros_like(m);
  g.extractor[0].w.data[0] = 1.0;
  AdamState s = AdamState::zeros_like(m);
  adam_step(m, g, s, 0.001);

  const double step = before - m.extractor[0].w.data[0];
  // bias correction makes the first step almost exactly lr
  CHECK(step == doctest::Approx(0.001).epsilon(1e-7));
  CHECK(s.timestep == 1);
}

TEST_CASE("adam with a zero gradient leaves parameters unchanged") {
  Rng rng(2);
  ModelState m = init_model(3, 2, small_model(), rng);
  const auto before = flatten(m);
  Gradients g = Gradients::zeros_like(m);
  AdamState s = AdamState::zeros_like(m);
  adam_step(m, g, s, 0.01);
  CHECK(flatten(m) == before);
  CHECK(s.timestep == 1);
}

TEST_CASE("training is bit-deterministic") {
  const LabeledDataset ds = gen_blobs(2, 60, 4, 1.0, 5);
  const SplitDataset split = three_way_split(ds, 6);
  const TrainConfig cfg = quick_train(77, 10);
  const auto r1 = train(cfg, small_model(), split.train, split.val);
  const auto r2 = train(cfg, small_model(), split.train, split.val);
  CHECK(flatten(r1.model) == flatten(r2.model));
  REQUIRE(r1.history.size() == r2.history.size());
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].train_loss == r2.history[i].train_loss);
    CHECK(r1.history[i].val_loss == r2.history[i].val_loss);
  }
}

TEST_CASE("separable blobs train to high accuracy") {
  const LabeledDataset ds = gen_blobs(2, 100, 4, 0.8, 11);
  // the one-nearest-centroid oracle (a linear classifier) already separates
  // this set, so any correct trainer should too
  const auto oracle_clf = oracle::CentroidClassifier::fit(
      2, ds.dim(), ds.size(), ds.features.data, ds.labels);
  std::size_t oracle_correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::span<const double> x(ds.features.data.data() + i * ds.dim(), ds.dim());
    if (oracle_clf.predict(x) == ds.labels[i]) ++oracle_correct;
  }
  CHECK(static_cast<double>(oracle_correct) / ds.size() >= 0.99);

  const SplitDataset split = three_way_split(ds, 12);
  const auto result = train(quick_train(13), small_model(), split.train, split.val);
  const auto [train_loss, train_acc] =
      evaluate(result.model, split.train, 0.1, {});
  (void)train_loss;
  CHECK(train_acc >= 0.99);
}

TEST_CASE("the reduced baseline still trains on separable blobs") {
  const LabeledDataset ds = gen_blobs(2, 100, 4, 0.8, 11);
  const SplitDataset split = three_way_split(ds, 12);
  TrainConfig cfg = quick_train(14);
  cfg.ablation.fix_omega_uniform = true;
  cfg.ablation.fix_tau_shared = true;
  const auto result = train(cfg, small_model(), split.train, split.val);
  const auto [loss_value, acc] =
      evaluate(result.model, split.train, cfg.eps, cfg.ablation);
  (void)loss_value;
  CHECK(acc >= 0.95);
}

TEST_CASE("history length and learning-rate schedule") {
  const LabeledDataset ds = gen_blobs(2, 40, 4, 1.0, 21);
  const SplitDataset split = three_way_split(ds, 22);
  TrainConfig cfg = quick_train(23, 25);
  cfg.step_size = 10;
  const auto result = train(cfg, small_model(), split.train, split.val);
  CHECK(result.history.size() == 25);  // patience never triggers here
  for (const EpochStats& e : result.history) {
    const double expected =
        cfg.lr * std::pow(cfg.gamma, static_cast<double>(e.epoch / cfg.step_size));
    CHECK(e.lr == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(scheduled_lr(cfg, 0) == cfg.lr);
  CHECK(scheduled_lr(cfg, 9) == cfg.lr);
  CHECK(scheduled_lr(cfg, 10) == doctest::Approx(cfg.lr * 0.1));
  CHECK(scheduled_lr(cfg, 25) == doctest::Approx(cfg.lr * 0.01));
}

TEST_CASE("early stopping cuts the history short") {
  // validation labels are deliberately inconsistent with training labels,
  // so validation loss deteriorates as the model fits the training set
  const LabeledDataset ds = gen_blobs(2, 60, 4, 1.0, 31);
  SplitDataset split = three_way_split(ds, 32);
  for (int& y : split.val.labels) y = 1 - y;
  TrainConfig cfg = quick_train(33, 100);
  cfg.early_stop_patience = 5;
  const auto result = train(cfg, small_model(), split.train, split.val);
  CHECK(result.history.size() < 100);
}

TEST_CASE("training aborts with context on divergence") {
  const LabeledDataset ds = gen_blobs(2, 40, 4, 1.0, 41);
  const SplitDataset split = three_way_split(ds, 42);
  TrainConfig cfg = quick_train(43, 5);
  // Adam steps are bounded by the learning rate, so only a rate near the
  // double limit overflows the parameters
  cfg.lr = 1e308;
  CHECK_THROWS_WITH_AS(train(cfg, small_model(), split.train, split.val),
                       doctest::Contains("diverged at epoch"),
                       std::runtime_error);
}

TEST_CASE("spectral constraint holds after training") {
  const LabeledDataset ds = gen_blobs(3, 60, 4, 1.0, 51);
  const SplitDataset split = three_way_split(ds, 52);
  const auto result = train(quick_train(53, 20), small_model(), split.train, split.val);
  auto check_part = [](const std::vector<Layer>& layers) {
    for (const Layer& layer : layers) {
      const auto sv =
          oracle::singular_values(layer.w.rows, layer.w.cols, layer.w.data);
      CHECK(sv[0] <= 1.0 + 1e-2);
    }
  };
  check_part(result.model.extractor);
  check_part(result.model.alpha_head);
}

TEST_CASE("predict_batch is stateless and shape-correct") {
  const LabeledDataset ds = gen_blobs(3, 50, 4, 1.0, 61);
  const SplitDataset split = three_way_split(ds, 62);
  const auto result = train(quick_train(63, 15), small_model(), split.train, split.val);

  const auto all = predict_batch(result.model, split.test.features);
  CHECK(all.size() == split.test.size());

  // concatenation invariance: evaluating a prefix and suffix separately
  // reproduces the combined reports
  const std::size_t half = split.test.size() / 2;
  Matrix first(half, split.test.dim());
  Matrix second(split.test.size() - half, split.test.dim());
  std::copy_n(split.test.features.data.begin(), half * split.test.dim(),
              first.data.begin());
  std::copy(split.test.features.data.begin() + half * split.test.dim(),
            split.test.features.data.end(), second.data.begin());
  const auto a = predict_batch(result.model, first);
  const auto b = predict_batch(result.model, second);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const UncertaintyReport& ref = i < half ? a[i] : b[i - half];
    CHECK(all[i].predicted_class == ref.predicted_class);
    CHECK(all[i].eu == ref.eu);
    CHECK(all[i].au == ref.au);
  }

  CHECK_THROWS_AS(predict_batch(result.model, Matrix(3, 9)),
                  std::invalid_argument);
}

TEST_CASE("epistemic uncertainty separates far inputs from the data") {
  const LabeledDataset ds = gen_blobs(3, 100, 4, 1.0, 71);
  const SplitDataset split = three_way_split(ds, 72);
  const auto result = train(quick_train(73, 40), small_model(), split.train, split.val);

  const auto id_reports = predict_batch(result.model, split.test.features);
  const Matrix far = gen_ood(split.test, 5.0, 74);
  const auto far_reports = predict_batch(result.model, far);

  double id_eu = 0.0, far_eu = 0.0;
  for (const auto& r : id_reports) id_eu += r.eu;
  for (const auto& r : far_reports) far_eu += r.eu;
  id_eu /= static_cast<double>(id_reports.size());
  far_eu /= static_cast<double>(far_reports.size());
  CHECK(far_eu > id_eu);
}

TEST_CASE("history CSV serialization") {
  History h{{0, 1.5, 1.25, 0.5, 0.01}, {1, 1.0, 0.75, 0.75, 0.01}};
  const std::string path = "test_history.csv";
  save_history_csv(h, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,train_loss,val_loss,val_acc,lr");
  std::getline(in, line);
  CHECK(line.rfind("0,1.5,", 0) == 0);
  std::filesystem::remove(path);
}
