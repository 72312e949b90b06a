#include "modex/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "modex/trainer.hpp"

namespace modex {

namespace {

void check_binary_input(std::span<const double> scores,
                        std::span<const int> labels, std::size_t& n_pos,
                        std::size_t& n_neg) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("detection metric: size mismatch or empty input");
  }
  n_pos = 0;
  n_neg = 0;
  for (int y : labels) {
    if (y == 1) {
      ++n_pos;
    } else if (y == 0) {
      ++n_neg;
    } else {
      throw std::invalid_argument("detection metric: labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw std::domain_error("detection metric: both classes must be present");
  }
}

std::vector<std::size_t> order_by_score_desc(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return idx;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  std::size_t n_pos = 0, n_neg = 0;
  check_binary_input(scores, labels, n_pos, n_neg);
  // midrank sum of the positive class
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    // 1-based ranks i+1 .. j share the midrank
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t) {
      if (labels[idx[t]] == 1) rank_sum_pos += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double aupr(std::span<const double> scores, std::span<const int> labels) {
  std::size_t n_pos = 0, n_neg = 0;
  check_binary_input(scores, labels, n_pos, n_neg);
  const auto idx = order_by_score_desc(scores);
  const double pos = static_cast<double>(n_pos);
  double tp = 0.0;
  double fp = 0.0;
  double prev_recall = 0.0;
  double area = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[idx[t]] == 1) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
    }
    const double recall = tp / pos;
    const double precision = tp / (tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

double accuracy(const ModelState& m, const LabeledDataset& test,
                const AblationFlags& flags) {
  const auto reports = predict_batch(m, test.features, flags);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].predicted_class == static_cast<std::size_t>(test.labels[i])) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

DetectionResult misclassification_task(const ModelState& m,
                                       const LabeledDataset& test,
                                       const AblationFlags& flags) {
  const auto reports = predict_batch(m, test.features, flags);
  std::vector<double> scores(reports.size());
  std::vector<int> labels(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    scores[i] = -reports[i].au;
    labels[i] =
        reports[i].predicted_class == static_cast<std::size_t>(test.labels[i])
            ? 1
            : 0;
  }
  DetectionResult result;
  result.score_convention = "negative aleatoric uncertainty, correct = 1";
  result.auroc = auroc(scores, labels);
  result.aupr = aupr(scores, labels);
  for (int y : labels) (y == 1 ? result.n_pos : result.n_neg)++;
  return result;
}

DetectionResult ood_task(const ModelState& m, const LabeledDataset& id_test,
                         const Matrix& ood_features,
                         const AblationFlags& flags) {
  if (id_test.size() == 0 || ood_features.rows == 0) {
    throw std::invalid_argument("ood_task: both sets must be nonempty");
  }
  const auto id_reports = predict_batch(m, id_test.features, flags);
  const auto ood_reports = predict_batch(m, ood_features, flags);
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(id_reports.size() + ood_reports.size());
  for (const auto& r : id_reports) {
    scores.push_back(-r.eu);
    labels.push_back(1);
  }
  for (const auto& r : ood_reports) {
    scores.push_back(-r.eu);
    labels.push_back(0);
  }
  DetectionResult result;
  result.score_convention = "negative epistemic uncertainty, ID = 1";
  result.auroc = auroc(scores, labels);
  result.aupr = aupr(scores, labels);
  result.n_pos = id_reports.size();
  result.n_neg = ood_reports.size();
  return result;
}

std::vector<DetectionResult> shift_task(const ModelState& m,
                                        const LabeledDataset& clean_test,
                                        std::span<const int> severities,
                                        std::uint64_t seed,
                                        const AblationFlags& flags) {
  for (int s : severities) {
    if (s < 1 || s > 5) throw std::invalid_argument("shift_task: severity out of 1..5");
  }
  const auto clean_reports = predict_batch(m, clean_test.features, flags);
  std::vector<DetectionResult> results;
  results.reserve(severities.size());
  const Rng base(seed);
  for (int s : severities) {
    const LabeledDataset shifted =
        corrupt(clean_test, s, base.split(static_cast<std::uint64_t>(s)).seed());
    const auto shifted_reports = predict_batch(m, shifted.features, flags);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& r : clean_reports) {
      scores.push_back(-r.eu);
      labels.push_back(1);
    }
    for (const auto& r : shifted_reports) {
      scores.push_back(-r.eu);
      labels.push_back(0);
    }
    DetectionResult result;
    result.score_convention = "negative epistemic uncertainty, clean = 1";
    result.auroc = auroc(scores, labels);
    result.aupr = aupr(scores, labels);
    result.n_pos = clean_reports.size();
    result.n_neg = shifted_reports.size();
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace modex
