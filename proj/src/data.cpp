#include "modex/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "modex/rng.hpp"

namespace modex {

namespace {

constexpr double kCentroidRadius = 4.0;

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.next_u64() % (i + 1);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

LabeledDataset take_rows(const LabeledDataset& ds,
                         const std::vector<std::size_t>& rows) {
  LabeledDataset out;
  out.features = Matrix(rows.size(), ds.dim());
  out.labels.resize(rows.size());
  out.num_classes = ds.num_classes;
  out.meta = ds.meta;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    std::copy_n(ds.features.data.begin() + r * ds.dim(), ds.dim(),
                out.features.data.begin() + i * ds.dim());
    out.labels[i] = ds.labels[r];
  }
  out.meta.class_counts = out.class_counts();
  return out;
}

std::vector<std::vector<std::size_t>> rows_by_class(const LabeledDataset& ds) {
  std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  }
  return by_class;
}

}  // namespace

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int y : labels) counts[static_cast<std::size_t>(y)]++;
  return counts;
}

LabeledDataset gen_blobs(std::size_t k, std::size_t per_class, std::size_t d,
                         double spread, std::uint64_t seed) {
  if (k < 2 || per_class < 1 || d < 2) {
    throw std::invalid_argument("gen_blobs: need k >= 2, per_class >= 1, d >= 2");
  }
  Rng rng(seed);
  Rng noise = rng.split(0);
  LabeledDataset ds;
  ds.features = Matrix(k * per_class, d);
  ds.labels.resize(k * per_class);
  ds.num_classes = k;
  constexpr double kTwoPi = 6.28318530717958647692;
  std::size_t row = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double angle = kTwoPi * static_cast<double>(c) / static_cast<double>(k);
    const double cx = kCentroidRadius * std::cos(angle);
    const double cy = kCentroidRadius * std::sin(angle);
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      double* f = ds.features.data.data() + row * d;
      f[0] = cx + spread * noise.next_gaussian();
      f[1] = cy + spread * noise.next_gaussian();
      for (std::size_t j = 2; j < d; ++j) f[j] = spread * noise.next_gaussian();
      ds.labels[row] = static_cast<int>(c);
    }
  }
  ds.meta.name = "blobs";
  ds.meta.seed = seed;
  ds.meta.class_counts = ds.class_counts();
  return ds;
}

LabeledDataset apply_imbalance(const LabeledDataset& ds, double rho,
                               std::uint64_t seed) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("apply_imbalance: rho must lie in (0, 1]");
  }
  const auto counts = ds.class_counts();
  const std::size_t head = counts.empty() ? 0 : counts[0];
  for (std::size_t c : counts) {
    if (c != head) throw std::invalid_argument("apply_imbalance: dataset must be balanced");
  }
  const auto by_class = rows_by_class(ds);
  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < ds.num_classes; ++c) {
    const double frac =
        std::pow(rho, static_cast<double>(c) /
                          static_cast<double>(ds.num_classes - 1));
    const std::size_t target = static_cast<std::size_t>(
        std::ceil(static_cast<double>(head) * frac));
    if (target == 0) throw std::runtime_error("apply_imbalance: tail class emptied");
    Rng class_rng = rng.split(c);
    auto perm = permutation(by_class[c].size(), class_rng);
    for (std::size_t i = 0; i < target; ++i) keep.push_back(by_class[c][perm[i]]);
  }
  LabeledDataset out = take_rows(ds, keep);
  out.meta.imbalance_rho = rho;
  return out;
}

LabeledDataset add_label_ambiguity(const LabeledDataset& ds, double fraction,
                                   const std::vector<std::pair<int, int>>& pairs,
                                   std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("add_label_ambiguity: fraction must lie in [0, 1]");
  }
  for (auto [a, b] : pairs) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= ds.num_classes ||
        static_cast<std::size_t>(b) >= ds.num_classes || a == b) {
      throw std::out_of_range("add_label_ambiguity: bad class pair");
    }
  }
  LabeledDataset out = ds;
  if (fraction == 0.0) return out;
  const auto by_class = rows_by_class(ds);
  Rng rng(seed);
  std::uint64_t stream = 0;
  const std::size_t d = ds.dim();
  auto blend_side = [&](int cls, int partner) {
    const auto& rows = by_class[static_cast<std::size_t>(cls)];
    const auto& partner_rows = by_class[static_cast<std::size_t>(partner)];
    if (rows.empty() || partner_rows.empty()) return;
    Rng side = rng.split(stream++);
    const std::size_t count = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(rows.size()) + 0.5));
    auto perm = permutation(rows.size(), side);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t r = rows[perm[i]];
      const std::size_t p = partner_rows[side.next_u64() % partner_rows.size()];
      double* dst = out.features.data.data() + r * d;
      const double* self = ds.features.data.data() + r * d;
      const double* other = ds.features.data.data() + p * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] = 0.5 * (self[j] + other[j]);
    }
  };
  for (auto [a, b] : pairs) {
    blend_side(a, b);
    blend_side(b, a);
  }
  return out;
}

LabeledDataset corrupt(const LabeledDataset& ds, int severity,
                       std::uint64_t seed) {
  if (severity < 1 || severity > 5) {
    throw std::invalid_argument("corrupt: severity must lie in 1..5");
  }
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  std::vector<double> col_std(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ds.features(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = ds.features(i, j) - mean;
      var += dx * dx;
    }
    col_std[j] = std::sqrt(var / static_cast<double>(n));
  }
  LabeledDataset out = ds;
  Rng rng(seed);
  Rng noise = rng.split(0);
  const double level = 0.25 * static_cast<double>(severity);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.features(i, j) += level * col_std[j] * noise.next_gaussian();
    }
  }
  out.meta.noise_level = level;
  return out;
}

Matrix gen_ood(const LabeledDataset& ds, double offset_scale,
               std::uint64_t seed) {
  if (!(offset_scale > 0.0)) {
    throw std::invalid_argument("gen_ood: offset_scale must be positive");
  }
  const std::size_t d = ds.dim();
  const auto by_class = rows_by_class(ds);
  std::vector<std::vector<double>> centroids;
  std::vector<double> spreads;
  for (const auto& rows : by_class) {
    if (rows.empty()) continue;
    std::vector<double> c(d, 0.0);
    for (std::size_t r : rows) {
      for (std::size_t j = 0; j < d; ++j) c[j] += ds.features(r, j);
    }
    for (double& x : c) x /= static_cast<double>(rows.size());
    double var = 0.0;
    for (std::size_t r : rows) {
      for (std::size_t j = 0; j < d; ++j) {
        const double dx = ds.features(r, j) - c[j];
        var += dx * dx;
      }
    }
    spreads.push_back(std::sqrt(var / static_cast<double>(rows.size() * d)));
    centroids.push_back(std::move(c));
  }
  if (centroids.empty()) throw std::invalid_argument("gen_ood: empty dataset");
  double max_dist = 0.0;
  for (std::size_t a = 0; a < centroids.size(); ++a) {
    for (std::size_t b = a + 1; b < centroids.size(); ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double dx = centroids[a][j] - centroids[b][j];
        d2 += dx * dx;
      }
      max_dist = std::max(max_dist, std::sqrt(d2));
    }
  }
  if (max_dist == 0.0) max_dist = 1.0;

  Rng rng(seed);
  Rng noise = rng.split(0);
  // anchored at the first class centroid so offset_scale -> 0 degenerates
  // to genuine overlap with the data; direction drawn per seed
  constexpr double kTwoPi = 6.28318530717958647692;
  const double angle = kTwoPi * rng.next_double();
  std::vector<double> ood_center = centroids[0];
  ood_center[0] += offset_scale * max_dist * std::cos(angle);
  ood_center[1] += offset_scale * max_dist * std::sin(angle);

  double spread = 0.0;
  for (double s : spreads) spread += s;
  spread /= static_cast<double>(spreads.size());
  if (spread == 0.0) spread = 1.0;

  Matrix out(ds.size(), d);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out(i, j) = ood_center[j] + spread * noise.next_gaussian();
    }
  }
  return out;
}

SplitDataset three_way_split(const LabeledDataset& ds, std::uint64_t seed) {
  const auto by_class = rows_by_class(ds);
  Rng rng(seed);
  std::vector<std::size_t> train_rows, val_rows, test_rows;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    Rng class_rng = rng.split(c);
    auto perm = permutation(by_class[c].size(), class_rng);
    const std::size_t n = perm.size();
    const std::size_t n_test = static_cast<std::size_t>(
        std::floor(0.05 * static_cast<double>(n) + 0.5));
    const std::size_t n_val = static_cast<std::size_t>(
        std::floor(0.05 * 0.95 * static_cast<double>(n) + 0.5));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = by_class[c][perm[i]];
      if (i < n_test) {
        test_rows.push_back(r);
      } else if (i < n_test + n_val) {
        val_rows.push_back(r);
      } else {
        train_rows.push_back(r);
      }
    }
  }
  SplitDataset split{take_rows(ds, train_rows), take_rows(ds, val_rows),
                     take_rows(ds, test_rows)};
  split.train.meta.name = ds.meta.name + "/train";
  split.val.meta.name = ds.meta.name + "/val";
  split.test.meta.name = ds.meta.name + "/test";
  return split;
}

void save_csv(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  for (std::size_t j = 0; j < ds.dim(); ++j) out << 'f' << j << ',';
  out << "label\n";
  char buf[40];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
      out << buf << ',';
    }
    out << ds.labels[i] << '\n';
  }
  if (!out) throw std::runtime_error("save_csv: write failed " + path);

  nlohmann::json meta;
  meta["name"] = ds.meta.name;
  meta["seed"] = ds.meta.seed;
  meta["num_classes"] = ds.num_classes;
  meta["class_counts"] = ds.meta.class_counts;
  if (ds.meta.imbalance_rho) meta["imbalance_rho"] = *ds.meta.imbalance_rho;
  if (ds.meta.noise_level) meta["noise_level"] = *ds.meta.noise_level;
  std::ofstream meta_out(path + ".meta.json", std::ios::trunc);
  meta_out << meta.dump(2) << '\n';
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);
  std::size_t d = 0;
  {
    std::stringstream header(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(header, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2 || cells.back() != "label") {
      throw std::runtime_error("load_csv: header must be f0,...,label");
    }
    d = cells.size() - 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (cells[j] != "f" + std::to_string(j)) {
        throw std::runtime_error("load_csv: unexpected header column " + cells[j]);
      }
    }
  }
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != d + 1) {
      throw std::runtime_error("load_csv: ragged row at line " +
                               std::to_string(line_no));
    }
    for (std::size_t j = 0; j < d; ++j) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[j], &used);
      } catch (const std::exception&) {
        throw std::runtime_error("load_csv: non-numeric cell at line " +
                                 std::to_string(line_no));
      }
      if (used != cells[j].size()) {
        throw std::runtime_error("load_csv: non-numeric cell at line " +
                                 std::to_string(line_no));
      }
      values.push_back(v);
    }
    try {
      std::size_t used = 0;
      const int y = std::stoi(cells[d], &used);
      if (used != cells[d].size() || y < 0) throw std::invalid_argument("label");
      labels.push_back(y);
    } catch (const std::exception&) {
      throw std::runtime_error("load_csv: bad label at line " +
                               std::to_string(line_no));
    }
  }
  if (labels.empty()) throw std::runtime_error("load_csv: no data rows in " + path);
  LabeledDataset ds;
  ds.features = Matrix(labels.size(), d, std::move(values));
  ds.labels = std::move(labels);
  ds.num_classes = static_cast<std::size_t>(
                       *std::max_element(ds.labels.begin(), ds.labels.end())) + 1;
  ds.meta.name = path;

  std::ifstream meta_in(path + ".meta.json");
  if (meta_in) {
    try {
      nlohmann::json meta = nlohmann::json::parse(meta_in);
      if (meta.contains("name")) ds.meta.name = meta["name"].get<std::string>();
      if (meta.contains("seed")) ds.meta.seed = meta["seed"].get<std::uint64_t>();
      if (meta.contains("num_classes")) {
        const auto k = meta["num_classes"].get<std::size_t>();
        if (k > ds.num_classes) ds.num_classes = k;
      }
      if (meta.contains("imbalance_rho")) {
        ds.meta.imbalance_rho = meta["imbalance_rho"].get<double>();
      }
      if (meta.contains("noise_level")) {
        ds.meta.noise_level = meta["noise_level"].get<double>();
      }
    } catch (const nlohmann::json::exception&) {
      // sidecar is best-effort; a corrupt one is ignored
    }
  }
  for (int y : ds.labels) {
    if (static_cast<std::size_t>(y) >= ds.num_classes) {
      throw std::runtime_error("load_csv: label out of range");
    }
  }
  ds.meta.class_counts = ds.class_counts();
  return ds;
}

}  // namespace modex
