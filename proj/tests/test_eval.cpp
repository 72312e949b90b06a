#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "modex/data.hpp"
#include "modex/eval.hpp"
#include "modex/rng.hpp"
#include "modex/trainer.hpp"
#include "oracles.hpp"

using namespace modex;

TEST_CASE("auroc on pinned examples") {
  {
    const std::vector<double> scores{0.9, 0.8, 0.2, 0.1};
    const std::vector<int> labels{1, 1, 0, 0};
    CHECK(auroc(scores, labels) == 1.0);
  }
  {
    const std::vector<double> scores{0.5, 0.5, 0.5, 0.5};
    const std::vector<int> labels{1, 0, 1, 0};
    CHECK(auroc(scores, labels) == 0.5);
  }
  {
    const std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
    const std::vector<int> labels{1, 0, 1, 0};
    CHECK(auroc(scores, labels) == 0.75);
  }
  CHECK_THROWS_AS(auroc(std::vector<double>{1.0, 2.0}, std::vector<int>{1, 1}),
                  std::domain_error);
}

TEST_CASE("aupr on pinned examples") {
  {
    const std::vector<double> scores{0.9, 0.8, 0.2, 0.1};
    const std::vector<int> labels{1, 1, 0, 0};
    CHECK(aupr(scores, labels) == 1.0);
  }
  {
    // all scores tied: single PR point at (recall 1, precision = base rate)
    const std::vector<double> scores{0.5, 0.5, 0.5, 0.5, 0.5};
    const std::vector<int> labels{1, 1, 0, 0, 0};
    CHECK(aupr(scores, labels) == doctest::Approx(0.4).epsilon(1e-14));
  }
  {
    const std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
    const std::vector<int> labels{1, 0, 1, 0};
    // groups: tp=1 fp=0 -> r=.5 p=1; tp=1 fp=1; tp=2 fp=1 -> r=1 p=2/3; tp=2 fp=2
    CHECK(aupr(scores, labels) == doctest::Approx(0.5 + 1.0 / 3.0).epsilon(1e-14));
    CHECK(aupr(scores, labels) == oracle::brute_aupr(scores, labels));
  }
}

TEST_CASE("metrics equal the brute-force oracles on random instances") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 11;  // up to 12
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid scores so ties happen often
      scores[i] = static_cast<double>(rng.next_u64() % 5) / 4.0;
      labels[i] = static_cast<int>(rng.next_u64() % 2);
      (labels[i] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos) labels[0] = 1;
    if (!has_neg) labels[n - 1] = 0;
    CHECK(auroc(scores, labels) == oracle::brute_auroc(scores, labels));
    CHECK(aupr(scores, labels) == oracle::brute_aupr(scores, labels));
  }
}

TEST_CASE("metrics are invariant under increasing score transforms") {
  Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng.next_u64() % 30;
    std::vector<double> scores(n), warped(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = 4.0 * rng.next_double() - 2.0;
      warped[i] = std::exp(scores[i]) + scores[i];  // strictly increasing
      labels[i] = static_cast<int>(rng.next_u64() % 2);
    }
    labels[0] = 1;
    labels[n - 1] = 0;
    CHECK(auroc(scores, labels) == doctest::Approx(auroc(warped, labels)).epsilon(1e-14));
    CHECK(aupr(scores, labels) == doctest::Approx(aupr(warped, labels)).epsilon(1e-14));
  }
}

TEST_CASE("flipping the score sign mirrors auroc") {
  Rng rng(105);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.next_u64() % 20;
    std::vector<double> scores(n), flipped(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = rng.next_gaussian();
      flipped[i] = -scores[i];
      labels[i] = static_cast<int>(rng.next_u64() % 2);
    }
    labels[0] = 1;
    labels[n - 1] = 0;
    CHECK(auroc(scores, labels) ==
          doctest::Approx(1.0 - auroc(flipped, labels)).epsilon(1e-12));
  }
}

TEST_CASE("random scores give chance-level auroc") {
  Rng rng(107);
  const std::size_t n = 2000;
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.next_double();
    labels[i] = i < n / 2 ? 1 : 0;
  }
  CHECK(std::abs(auroc(scores, labels) - 0.5) < 0.05);
}

namespace {

struct TrainedFixture {
  LabeledDataset test;
  ModelState model;
};

// one trained model shared by the task tests
const TrainedFixture& fixture() {
  static const TrainedFixture fixture = [] {
    LabeledDataset ds = gen_blobs(3, 150, 4, 1.2, 201);
    ds = add_label_ambiguity(ds, 0.35, {{0, 1}}, 202);
    const SplitDataset split = three_way_split(ds, 203);
    TrainConfig cfg;
    cfg.max_epochs = 60;
    cfg.lr = 5e-3;
    cfg.step_size = 40;
    cfg.batch_size = 32;
    cfg.seed = 204;
    cfg.early_stop_patience = 100;
    ModelConfig mc;
    mc.feature_dim = 16;
    mc.extractor_layers = 2;
    mc.head_layers = 1;
    auto result = train(cfg, mc, split.train, split.val);
    return TrainedFixture{split.test, std::move(result.model)};
  }();
  return fixture;
}

}  // namespace

TEST_CASE("misclassification detection beats the base rate") {
  const auto& f = fixture();
  const double acc = accuracy(f.model, f.test);
  CHECK(acc > 0.5);
  CHECK(acc < 1.0);  // the ambiguous pair guarantees mistakes
  const DetectionResult r = misclassification_task(f.model, f.test);
  CHECK(r.n_pos + r.n_neg == f.test.size());
  const double base_rate =
      static_cast<double>(r.n_pos) / static_cast<double>(r.n_pos + r.n_neg);
  CHECK(r.aupr > base_rate);
  CHECK(r.auroc > 0.5);
}

TEST_CASE("misclassification task requires both outcomes") {
  const auto& f = fixture();
  // keep only correctly predicted points: the metric is then undefined
  const auto reports = predict_batch(f.model, f.test.features);
  std::vector<std::size_t> correct_rows;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].predicted_class == static_cast<std::size_t>(f.test.labels[i])) {
      correct_rows.push_back(i);
    }
  }
  LabeledDataset all_correct;
  all_correct.features = Matrix(correct_rows.size(), f.test.dim());
  all_correct.num_classes = f.test.num_classes;
  for (std::size_t i = 0; i < correct_rows.size(); ++i) {
    const std::size_t r = correct_rows[i];
    std::copy_n(f.test.features.data.begin() + r * f.test.dim(), f.test.dim(),
                all_correct.features.data.begin() + i * f.test.dim());
    all_correct.labels.push_back(f.test.labels[r]);
  }
  CHECK_THROWS_AS(misclassification_task(f.model, all_correct), std::domain_error);
}

TEST_CASE("ood detection with a displaced cluster") {
  const auto& f = fixture();
  const Matrix far = gen_ood(f.test, 5.0, 205);
  const DetectionResult r = ood_task(f.model, f.test, far);
  CHECK(r.n_pos == f.test.size());
  CHECK(r.n_neg == far.rows);
  CHECK(r.auroc > 0.8);

  const Matrix near = gen_ood(f.test, 0.01, 206);
  const DetectionResult rn = ood_task(f.model, f.test, near);
  CHECK(rn.auroc < r.auroc);

  CHECK_THROWS_AS(ood_task(f.model, f.test, Matrix(0, 4)), std::invalid_argument);
}

TEST_CASE("shift detection strengthens with severity") {
  const auto& f = fixture();
  const std::vector<int> severities{1, 3, 5};
  const auto results = shift_task(f.model, f.test, severities, 207);
  REQUIRE(results.size() == severities.size());
  int violations = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].aupr < results[i - 1].aupr) ++violations;
  }
  CHECK(violations <= 1);
  CHECK_THROWS_AS(shift_task(f.model, f.test, std::vector<int>{0}, 1),
                  std::invalid_argument);
}
