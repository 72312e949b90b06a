#include "modex/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "modex/eval.hpp"
#include "modex/trainer.hpp"

namespace modex {

namespace {

// substream labels carved out of the master seed
enum SeedLabel : std::uint64_t {
  kSeedData = 1,
  kSeedAmbiguity = 2,
  kSeedSplit = 3,
  kSeedImbalance = 4,
  kSeedTrain = 5,
  kSeedOod = 6,
  kSeedShift = 7,
};

std::uint64_t sub_seed(const RunConfig& cfg, SeedLabel label) {
  return Rng(cfg.seed).split(label).seed();
}

std::string run_stem(const RunConfig& cfg) {
  return cfg.method + "_seed" + std::to_string(cfg.seed);
}

}  // namespace

ExperimentData build_datasets(const RunConfig& cfg) {
  LabeledDataset full;
  if (cfg.data_kind == "csv") {
    full = load_csv(cfg.data_csv_path);
  } else {
    full = gen_blobs(cfg.data_classes, cfg.data_per_class, cfg.data_dim,
                     cfg.data_spread, sub_seed(cfg, kSeedData));
  }
  if (cfg.data_ambiguity_fraction > 0.0 && !cfg.data_ambiguity_pairs.empty()) {
    full = add_label_ambiguity(full, cfg.data_ambiguity_fraction,
                               cfg.data_ambiguity_pairs,
                               sub_seed(cfg, kSeedAmbiguity));
  }
  SplitDataset split = three_way_split(full, sub_seed(cfg, kSeedSplit));
  if (cfg.data_imbalance_rho < 1.0) {
    split.train = apply_imbalance(split.train, cfg.data_imbalance_rho,
                                  sub_seed(cfg, kSeedImbalance));
  }
  return {std::move(split.train), std::move(split.val), std::move(split.test)};
}

TrainOutputs run_training(const RunConfig& cfg) {
  const ExperimentData data = build_datasets(cfg);
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = sub_seed(cfg, kSeedTrain);
  const TrainResult result = train(train_cfg, cfg.model, data.train, data.val);

  std::filesystem::create_directories(cfg.out_dir);
  TrainOutputs outputs;
  outputs.checkpoint_path = cfg.out_dir + "/" + run_stem(cfg) + ".ckpt";
  outputs.history_path = cfg.out_dir + "/" + run_stem(cfg) + "_history.csv";
  save_checkpoint(result.model, outputs.checkpoint_path);
  save_history_csv(result.history, outputs.history_path);
  return outputs;
}

std::vector<ResultRow> run_evaluation(const RunConfig& cfg,
                                      const ModelState& model) {
  const ExperimentData data = build_datasets(cfg);
  if (model.input_dim != data.test.dim() ||
      model.num_classes != data.test.num_classes) {
    throw std::invalid_argument(
        "run_evaluation: checkpoint dimensions do not match the configured dataset");
  }
  const AblationFlags flags = cfg.train.ablation;
  const std::string dataset_name =
      cfg.data_kind == "csv" ? cfg.data_csv_path : data.test.meta.name;

  std::vector<ResultRow> rows;
  for (const std::string& task : cfg.eval_tasks) {
    if (task == "accuracy") {
      ResultRow row{"accuracy", dataset_name, cfg.seed, 0.0, 0.0, false, 0, 0};
      row.auroc = accuracy(model, data.test, flags);
      const auto n_correct = static_cast<std::size_t>(
          std::lround(row.auroc * static_cast<double>(data.test.size())));
      row.n_pos = n_correct;
      row.n_neg = data.test.size() - n_correct;
      rows.push_back(std::move(row));
    } else if (task == "misclassification") {
      const DetectionResult r = misclassification_task(model, data.test, flags);
      rows.push_back({"misclassification", dataset_name, cfg.seed, r.auroc,
                      r.aupr, true, r.n_pos, r.n_neg});
    } else if (task == "ood") {
      const Matrix ood = gen_ood(data.test, cfg.eval_ood_offset_scale,
                                 sub_seed(cfg, kSeedOod));
      const DetectionResult r = ood_task(model, data.test, ood, flags);
      rows.push_back({"ood", dataset_name, cfg.seed, r.auroc, r.aupr, true,
                      r.n_pos, r.n_neg});
    } else if (task == "shift") {
      const auto results = shift_task(model, data.test, cfg.eval_shift_severities,
                                      sub_seed(cfg, kSeedShift), flags);
      for (std::size_t i = 0; i < results.size(); ++i) {
        rows.push_back({"shift-s" + std::to_string(cfg.eval_shift_severities[i]),
                        dataset_name, cfg.seed, results[i].auroc,
                        results[i].aupr, true, results[i].n_pos,
                        results[i].n_neg});
      }
    }
  }
  return rows;
}

void write_results(const std::vector<ResultRow>& rows,
                   const std::string& csv_path, const std::string& json_path) {
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw std::runtime_error("write_results: cannot open " + csv_path);
  csv << "task,dataset,seed,auroc,aupr,n_pos,n_neg\n";
  char buf[64];
  for (const ResultRow& row : rows) {
    csv << row.task << ',' << row.dataset << ',' << row.seed << ',';
    std::snprintf(buf, sizeof(buf), "%.6f", 100.0 * row.auroc);
    csv << buf << ',';
    if (row.has_aupr) {
      std::snprintf(buf, sizeof(buf), "%.6f", 100.0 * row.aupr);
      csv << buf;
    }
    csv << ',' << row.n_pos << ',' << row.n_neg << '\n';
  }

  nlohmann::json doc = nlohmann::json::array();
  for (const ResultRow& row : rows) {
    nlohmann::json item;
    item["task"] = row.task;
    item["dataset"] = row.dataset;
    item["seed"] = row.seed;
    item["auroc"] = row.auroc;
    if (row.has_aupr) item["aupr"] = row.aupr;
    item["n_pos"] = row.n_pos;
    item["n_neg"] = row.n_neg;
    doc.push_back(std::move(item));
  }
  std::ofstream json_out(json_path, std::ios::trunc);
  if (!json_out) throw std::runtime_error("write_results: cannot open " + json_path);
  json_out << doc.dump(2) << '\n';
}

namespace {

struct Aggregate {
  std::vector<double> auroc;
  std::vector<double> aupr;
};

std::string mean_std(const std::vector<double>& values) {
  char buf[64];
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) {
    std::snprintf(buf, sizeof(buf), "%.2f", mean);
    return buf;
  }
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size() - 1);
  std::snprintf(buf, sizeof(buf), "%.2f ±%.2f", mean, std::sqrt(var));
  return buf;
}

std::string method_from_filename(std::string stem) {
  const auto seed_pos = stem.rfind("_seed");
  if (seed_pos != std::string::npos) {
    bool digits = seed_pos + 5 < stem.size();
    for (std::size_t i = seed_pos + 5; i < stem.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(stem[i]))) {
        const std::string tail = stem.substr(i);
        digits = digits && (tail == "_results");
        break;
      }
    }
    if (digits) stem = stem.substr(0, seed_pos);
  }
  return stem;
}

}  // namespace

std::size_t write_report(const std::string& results_dir, std::string& out_table) {
  namespace fs = std::filesystem;
  // method -> task -> values
  std::map<std::string, std::map<std::string, Aggregate>> table;
  std::vector<std::string> task_order;
  std::size_t row_count = 0;

  if (!fs::is_directory(results_dir)) {
    throw std::runtime_error("report: not a directory: " + results_dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    if (entry.path().extension() == ".csv" &&
        entry.path().stem().string().find("history") == std::string::npos) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::ifstream in(file);
    std::string line;
    if (!std::getline(in, line)) continue;
    if (line.rfind("task,dataset,seed", 0) != 0) continue;
    const std::string method = method_from_filename(file.stem().string());
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream row(line);
      std::string task, dataset, seed, auroc_s, aupr_s;
      std::getline(row, task, ',');
      std::getline(row, dataset, ',');
      std::getline(row, seed, ',');
      std::getline(row, auroc_s, ',');
      std::getline(row, aupr_s, ',');
      Aggregate& agg = table[method][task];
      if (std::find(task_order.begin(), task_order.end(), task) == task_order.end()) {
        task_order.push_back(task);
      }
      agg.auroc.push_back(std::stod(auroc_s));
      if (!aupr_s.empty()) agg.aupr.push_back(std::stod(aupr_s));
      ++row_count;
    }
  }
  if (row_count == 0) throw std::runtime_error("report: no result rows found in " + results_dir);

  std::ostringstream md;
  md << "| Method |";
  for (const std::string& task : task_order) md << ' ' << task << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < task_order.size(); ++i) md << "---|";
  md << '\n';
  for (const auto& [method, tasks] : table) {
    md << "| " << method << " |";
    for (const std::string& task : task_order) {
      const auto it = tasks.find(task);
      if (it == tasks.end()) {
        md << " - |";
      } else if (it->second.aupr.empty()) {
        md << ' ' << mean_std(it->second.auroc) << " |";
      } else {
        md << ' ' << mean_std(it->second.auroc) << " / "
           << mean_std(it->second.aupr) << " |";
      }
    }
    md << '\n';
  }
  out_table = md.str();

  std::ofstream out(results_dir + "/report.md", std::ios::trunc);
  out << out_table;
  return row_count;
}

}  // namespace modex
