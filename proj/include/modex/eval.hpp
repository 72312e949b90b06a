#pragma once

#include <span>
#include <string>
#include <vector>

#include "modex/data.hpp"
#include "modex/nnet.hpp"

namespace modex {

struct DetectionResult {
  double auroc = 0.0;  // in [0, 1]
  double aupr = 0.0;   // in [0, 1]
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::string score_convention;
};

// Probability that a random positive outranks a random negative, ties
// counted half (Mann-Whitney normalization). Requires both classes present.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Area under the precision-recall step curve: thresholds sweep the unique
// scores in descending order with ties grouped, each recall increment
// weighted by the precision of the group that produced it (no trapezoids).
double aupr(std::span<const double> scores, std::span<const int> labels);

// Fraction of test points whose argmax of the predictive mean matches the
// label.
double accuracy(const ModelState& m, const LabeledDataset& test,
                const AblationFlags& flags = {});

// Correct predictions are the positive class, scored by negative aleatoric
// uncertainty. Throws if the predictions are all correct or all incorrect.
DetectionResult misclassification_task(const ModelState& m,
                                       const LabeledDataset& test,
                                       const AblationFlags& flags = {});

// In-distribution points are the positive class, scored by negative
// epistemic uncertainty.
DetectionResult ood_task(const ModelState& m, const LabeledDataset& id_test,
                         const Matrix& ood_features,
                         const AblationFlags& flags = {});

// One result per severity: clean points positive, corrupted negative,
// scored by negative epistemic uncertainty. Corruption noise is seeded per
// severity from `seed`.
std::vector<DetectionResult> shift_task(const ModelState& m,
                                        const LabeledDataset& clean_test,
                                        std::span<const int> severities,
                                        std::uint64_t seed,
                                        const AblationFlags& flags = {});

}  // namespace modex
