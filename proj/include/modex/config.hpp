#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "modex/nnet.hpp"
#include "modex/trainer.hpp"

namespace modex {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value experiment configuration ('#' comments, blank lines
// ignored). Every key must be known and well-typed; unknown keys are
// rejected by name. One master seed drives data generation, training and
// evaluation through labeled substreams.
struct RunConfig {
  std::string method = "modex";  // label used in result file names
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // dataset
  std::string data_kind = "blobs";  // blobs | csv
  std::size_t data_classes = 5;
  std::size_t data_per_class = 500;
  std::size_t data_dim = 8;
  double data_spread = 1.5;
  std::string data_csv_path;
  double data_imbalance_rho = 1.0;  // 1 keeps the dataset balanced
  double data_ambiguity_fraction = 0.0;
  std::vector<std::pair<int, int>> data_ambiguity_pairs;  // "0:4,1:3"

  ModelConfig model;
  TrainConfig train;

  std::vector<std::string> eval_tasks = {"accuracy"};
  double eval_ood_offset_scale = 5.0;
  std::vector<int> eval_shift_severities = {1, 3, 5};

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_string(const std::string& text);

  void validate() const;
};

}  // namespace modex
