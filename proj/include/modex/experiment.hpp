#pragma once

#include <string>
#include <vector>

#include "modex/config.hpp"
#include "modex/data.hpp"
#include "modex/nnet.hpp"

namespace modex {

// Dataset pipeline shared by training and evaluation. Rebuilt
// deterministically from the config, so evaluating a checkpoint needs no
// serialized dataset: generate (or load CSV), inject ambiguity, split
// stratified, then long-tail the training portion.
struct ExperimentData {
  LabeledDataset train;
  LabeledDataset val;
  LabeledDataset test;
};

ExperimentData build_datasets(const RunConfig& cfg);

struct TrainOutputs {
  std::string checkpoint_path;
  std::string history_path;
};

// Trains per config and writes <out_dir>/<method>_seed<seed>.ckpt plus the
// matching history CSV.
TrainOutputs run_training(const RunConfig& cfg);

struct ResultRow {
  std::string task;
  std::string dataset;
  std::uint64_t seed = 0;
  double auroc = 0.0;  // in [0, 1]; accuracy rows store accuracy here
  double aupr = 0.0;   // in [0, 1]; unset for accuracy rows
  bool has_aupr = true;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// Runs the configured tasks against a trained model.
std::vector<ResultRow> run_evaluation(const RunConfig& cfg,
                                      const ModelState& model);

// CSV columns task,dataset,seed,auroc,aupr,n_pos,n_neg with metric values
// scaled to 0-100; JSON carries the same rows raw.
void write_results(const std::vector<ResultRow>& rows,
                   const std::string& csv_path, const std::string& json_path);

// Aggregates every results CSV in `results_dir` into a markdown table
// (one row per method, one column per task, mean +/- std across seeds).
// The method label is the file stem with the on-disk suffix stripped.
// Returns the number of aggregated rows; writes to <results_dir>/report.md
// and returns the table text through `out_table`.
std::size_t write_report(const std::string& results_dir, std::string& out_table);

}  // namespace modex
