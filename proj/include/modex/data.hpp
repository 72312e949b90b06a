#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modex/matrix.hpp"

namespace modex {

struct DatasetMeta {
  std::string name;
  std::optional<double> imbalance_rho;
  std::optional<double> noise_level;
  std::uint64_t seed = 0;
  std::vector<std::size_t> class_counts;
};

struct LabeledDataset {
  Matrix features;          // N x D
  std::vector<int> labels;  // in [0, num_classes)
  std::size_t num_classes = 0;
  DatasetMeta meta;

  std::size_t size() const { return features.rows; }
  std::size_t dim() const { return features.cols; }
  std::vector<std::size_t> class_counts() const;
};

// Gaussian clusters centered on a circle of fixed radius in the first two
// feature dimensions (remaining dimensions center at zero); `spread` is the
// per-dimension standard deviation. Deterministic per seed.
LabeledDataset gen_blobs(std::size_t k, std::size_t per_class, std::size_t d,
                         double spread, std::uint64_t seed);

// Exponential long-tail profile: class k keeps ceil(n_head * rho^(k/(K-1)))
// samples, subsampled without replacement, so tail/head = rho. Requires a
// balanced input.
LabeledDataset apply_imbalance(const LabeledDataset& ds, double rho,
                               std::uint64_t seed);

// For each listed class pair, a fraction of the points on both sides is
// replaced by a 50/50 blend with a random point of the partner class
// (labels kept). Blending reads the original features, so the result does
// not depend on processing order.
LabeledDataset add_label_ambiguity(const LabeledDataset& ds, double fraction,
                                   const std::vector<std::pair<int, int>>& pairs,
                                   std::uint64_t seed);

// Additive Gaussian feature noise with sigma = severity * 0.25 * column std.
LabeledDataset corrupt(const LabeledDataset& ds, int severity,
                       std::uint64_t seed);

// Unlabeled cluster displaced from the first class centroid by
// offset_scale times the maximum inter-centroid distance (so offset_scale
// near 0 overlaps the data); same N and D as ds, spread matched to the
// average in-distribution class spread.
Matrix gen_ood(const LabeledDataset& ds, double offset_scale,
               std::uint64_t seed);

struct SplitDataset {
  LabeledDataset train;
  LabeledDataset val;
  LabeledDataset test;
};

// Stratified three-way split: 5% test held out, the remainder divided
// 0.95:0.05 into train and validation, per class, shuffled per seed.
SplitDataset three_way_split(const LabeledDataset& ds, std::uint64_t seed);

// CSV with header f0,...,f{D-1},label; values written at full precision so
// a round trip reproduces features exactly. Metadata travels in a JSON
// sidecar (<path>.meta.json).
void save_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_csv(const std::string& path);

}  // namespace modex
