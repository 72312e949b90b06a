#include "modex/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace modex {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    // stoull silently wraps negatives, so reject a sign up front
    if (value.empty() || value[0] == '-' || value[0] == '+') {
      throw std::invalid_argument(value);
    }
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a non-negative integer, got '" +
                      value + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(parse_u64(key, value));
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& key,
                                             const std::string& value) {
  std::vector<std::pair<int, int>> pairs;
  for (const std::string& item : split_list(value)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("config: key '" + key + "' expects a:b pairs, got '" + item + "'");
    }
    pairs.emplace_back(static_cast<int>(parse_u64(key, trim(item.substr(0, colon)))),
                       static_cast<int>(parse_u64(key, trim(item.substr(colon + 1)))));
  }
  return pairs;
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " is not of the form key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: empty key at line " + std::to_string(line_no));
    }

    if (key == "method") {
      cfg.method = value;
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "data.kind") {
      cfg.data_kind = value;
    } else if (key == "data.classes") {
      cfg.data_classes = parse_count(key, value);
    } else if (key == "data.per_class") {
      cfg.data_per_class = parse_count(key, value);
    } else if (key == "data.dim") {
      cfg.data_dim = parse_count(key, value);
    } else if (key == "data.spread") {
      cfg.data_spread = parse_double(key, value);
    } else if (key == "data.csv_path") {
      cfg.data_csv_path = value;
    } else if (key == "data.imbalance_rho") {
      cfg.data_imbalance_rho = parse_double(key, value);
    } else if (key == "data.ambiguity_fraction") {
      cfg.data_ambiguity_fraction = parse_double(key, value);
    } else if (key == "data.ambiguity_pairs") {
      cfg.data_ambiguity_pairs = parse_pairs(key, value);
    } else if (key == "model.feature_dim") {
      cfg.model.feature_dim = parse_count(key, value);
    } else if (key == "model.extractor_layers") {
      cfg.model.extractor_layers = parse_count(key, value);
    } else if (key == "model.head_layers") {
      cfg.model.head_layers = parse_count(key, value);
    } else if (key == "model.head_hidden") {
      cfg.model.head_hidden = parse_count(key, value);
    } else if (key == "train.max_epochs") {
      cfg.train.max_epochs = parse_count(key, value);
    } else if (key == "train.lr") {
      cfg.train.lr = parse_double(key, value);
    } else if (key == "train.step_size") {
      cfg.train.step_size = parse_count(key, value);
    } else if (key == "train.gamma") {
      cfg.train.gamma = parse_double(key, value);
    } else if (key == "train.batch_size") {
      cfg.train.batch_size = parse_count(key, value);
    } else if (key == "train.label_smoothing") {
      cfg.train.eps = parse_double(key, value);
    } else if (key == "train.patience") {
      cfg.train.early_stop_patience = parse_count(key, value);
    } else if (key == "train.fix_omega_uniform") {
      cfg.train.ablation.fix_omega_uniform = parse_bool(key, value);
    } else if (key == "train.fix_tau_shared") {
      cfg.train.ablation.fix_tau_shared = parse_bool(key, value);
    } else if (key == "train.drop_omega_reg") {
      cfg.train.ablation.drop_omega_reg = parse_bool(key, value);
    } else if (key == "train.drop_tau_reg") {
      cfg.train.ablation.drop_tau_reg = parse_bool(key, value);
    } else if (key == "eval.tasks") {
      cfg.eval_tasks = split_list(value);
    } else if (key == "eval.ood_offset_scale") {
      cfg.eval_ood_offset_scale = parse_double(key, value);
    } else if (key == "eval.shift_severities") {
      cfg.eval_shift_severities.clear();
      for (const std::string& item : split_list(value)) {
        cfg.eval_shift_severities.push_back(static_cast<int>(parse_u64(key, item)));
      }
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

void RunConfig::validate() const {
  if (data_kind != "blobs" && data_kind != "csv") {
    throw ConfigError("config: data.kind must be blobs or csv");
  }
  if (data_kind == "csv" && data_csv_path.empty()) {
    throw ConfigError("config: data.kind = csv requires data.csv_path");
  }
  if (data_kind == "blobs") {
    if (data_classes < 2 || data_per_class < 1 || data_dim < 2) {
      throw ConfigError("config: blobs need data.classes >= 2, data.per_class >= 1, data.dim >= 2");
    }
  }
  if (!(data_imbalance_rho > 0.0 && data_imbalance_rho <= 1.0)) {
    throw ConfigError("config: data.imbalance_rho must lie in (0, 1]");
  }
  if (!(data_ambiguity_fraction >= 0.0 && data_ambiguity_fraction <= 1.0)) {
    throw ConfigError("config: data.ambiguity_fraction must lie in [0, 1]");
  }
  try {
    train.validate();
  } catch (const std::exception& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
  for (const std::string& task : eval_tasks) {
    if (task != "accuracy" && task != "misclassification" && task != "ood" &&
        task != "shift") {
      throw ConfigError("config: unknown eval task '" + task + "'");
    }
  }
  for (int s : eval_shift_severities) {
    if (s < 1 || s > 5) throw ConfigError("config: eval.shift_severities must lie in 1..5");
  }
}

}  // namespace modex
