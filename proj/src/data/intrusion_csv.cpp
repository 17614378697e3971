#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "rnnlab/data.hpp"
#include "rnnlab/errors.hpp"

namespace rnnlab {
namespace {

using ojson = nlohmann::ordered_json;

// Splits one CSV record on ','; double-quoted fields may contain commas and
// "" escapes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

struct Row {
  std::vector<double> features;
  std::string label_class;
};

}  // namespace

LabelMode parse_label_mode(std::string_view text) {
  if (text == "binary") return LabelMode::binary;
  if (text == "multiclass") return LabelMode::multiclass;
  throw std::invalid_argument("unknown label mode '" + std::string(text) +
                              "' (expected binary or multiclass)");
}

std::string_view to_string(LabelMode m) noexcept {
  return m == LabelMode::binary ? "binary" : "multiclass";
}

std::vector<std::pair<std::string, std::string>> default_intrusion_labels() {
  return {{"normal", "normal"},
          {"arp_spoofing", "arp_spoofing"},
          {"dos_syn_flooding", "dos_syn_flooding"},
          {"scan_host_port", "scan_host_port"},
          {"scan_port_os", "scan_port_os"},
          {"mirai_udp_flooding", "mirai_udp_flooding"},
          {"mirai_ack_flooding", "mirai_ack_flooding"},
          {"mirai_http_flooding", "mirai_http_flooding"},
          {"telnet_bruteforce", "telnet_bruteforce"}};
}

IntrusionSchema IntrusionSchema::from_json_text(const std::string& text) {
  const ojson j = ojson::parse(text);
  IntrusionSchema s;
  if (!j.contains("feature_columns") || !j["feature_columns"].is_array() ||
      j["feature_columns"].empty()) {
    throw DataError("schema: feature_columns must be a nonempty array");
  }
  s.feature_columns = j["feature_columns"].get<std::vector<std::string>>();
  s.label_column = j.value("label_column", s.label_column);
  s.normal_class = j.value("normal_class", s.normal_class);
  s.window_length = j.value("window_length", s.window_length);
  if (s.window_length == 0) {
    throw DataError("schema: window_length must be >= 1");
  }
  if (j.contains("flow_column") && !j["flow_column"].is_null()) {
    s.flow_column = j["flow_column"].get<std::string>();
  }
  if (j.contains("label_map")) {
    for (const auto& [raw, cls] : j["label_map"].items()) {
      s.label_map.emplace_back(raw, cls.get<std::string>());
    }
  } else {
    s.label_map = default_intrusion_labels();
  }
  if (s.label_map.empty()) {
    throw DataError("schema: label_map is empty");
  }
  return s;
}

IntrusionSchema IntrusionSchema::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open schema " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

IntrusionSplit load_intrusion_csv(const std::filesystem::path& csv, const IntrusionSchema& schema,
                                  const IntrusionLoadOptions& options) {
  std::ifstream in(csv);
  if (!in) {
    throw std::runtime_error("cannot open " + csv.string());
  }
  if (!(options.test_fraction >= 0.0 && options.test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in [0, 1)");
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(csv.string() + ": missing header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw DataError(csv.string() + ": column '" + name + "' not in header");
  };
  std::vector<std::size_t> feature_idx;
  for (const auto& f : schema.feature_columns) feature_idx.push_back(column(f));
  const std::size_t label_idx = column(schema.label_column);
  const std::optional<std::size_t> flow_idx =
      schema.flow_column ? std::optional(column(*schema.flow_column)) : std::nullopt;

  std::map<std::string, std::string> raw_to_class(schema.label_map.begin(),
                                                  schema.label_map.end());

  // Rows grouped per flow, flows in order of first appearance.
  std::vector<std::vector<Row>> flows;
  std::unordered_map<std::string, std::size_t> flow_slot;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw DataError(csv.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    Row row;
    row.features.resize(feature_idx.size());
    for (std::size_t f = 0; f < feature_idx.size(); ++f) {
      const std::string cell = trim(cells[feature_idx[f]]);
      if (!parse_double(cell, row.features[f])) {
        throw DataError(csv.string() + ":" + std::to_string(line_no) + ": non-numeric value '" +
                        cell + "' in column " + schema.feature_columns[f]);
      }
    }
    const std::string raw = trim(cells[label_idx]);
    const auto it = raw_to_class.find(raw);
    if (it == raw_to_class.end()) {
      std::string known;
      for (const auto& [k, v] : schema.label_map) known += (known.empty() ? "" : ", ") + k;
      throw DataError(csv.string() + ":" + std::to_string(line_no) + ": unknown label '" + raw +
                      "' (known labels: " + known + ")");
    }
    row.label_class = it->second;
    const std::string key = flow_idx ? trim(cells[*flow_idx]) : std::string();
    auto [slot, inserted] = flow_slot.try_emplace(key, flows.size());
    if (inserted) flows.emplace_back();
    flows[slot->second].push_back(std::move(row));
  }

  // Class list.
  std::vector<std::string> class_names;
  if (options.mode == LabelMode::binary) {
    class_names = {schema.normal_class, "attack"};
  } else {
    for (const auto& [raw, cls] : schema.label_map) {
      if (std::find(class_names.begin(), class_names.end(), cls) == class_names.end()) {
        class_names.push_back(cls);
      }
    }
  }
  auto class_index = [&](const std::string& cls) -> int {
    if (options.mode == LabelMode::binary) return cls == schema.normal_class ? 0 : 1;
    return static_cast<int>(std::find(class_names.begin(), class_names.end(), cls) -
                            class_names.begin());
  };

  // Windows.
  const std::size_t W = schema.window_length;
  const std::size_t m = feature_idx.size();
  SequenceDataset all;
  all.steps = W;
  all.features = m;
  all.class_names = class_names;
  std::size_t dropped = 0;
  for (const auto& flow : flows) {
    const std::size_t full = flow.size() / W;
    dropped += flow.size() - full * W;
    for (std::size_t w = 0; w < full; ++w) {
      for (std::size_t r = 0; r < W; ++r) {
        const auto& feats = flow[w * W + r].features;
        all.values.insert(all.values.end(), feats.begin(), feats.end());
      }
      all.labels.push_back(class_index(flow[w * W + W - 1].label_class));
    }
  }
  if (all.size() == 0) {
    throw DataError(csv.string() + ": no complete window of " + std::to_string(W) + " rows");
  }
  if (dropped > 0) {
    all.warnings.push_back(std::to_string(dropped) + " trailing rows did not fill a window of " +
                           std::to_string(W) + " and were dropped");
  }
  {
    std::vector<std::size_t> per_class(class_names.size(), 0);
    for (int l : all.labels) ++per_class[static_cast<std::size_t>(l)];
    const auto present = std::count_if(per_class.begin(), per_class.end(),
                                       [](std::size_t c) { return c > 0; });
    if (present < 2) {
      all.warnings.push_back("degenerate class balance: all " + std::to_string(all.size()) +
                             " windows belong to one class");
    }
  }

  // Stratified split.
  std::vector<std::size_t> train_idx, test_idx;
  std::mt19937_64 rng(options.split_seed);
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (static_cast<std::size_t>(all.labels[i]) == c) members.push_back(i);
    }
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::floor(options.test_fraction * static_cast<double>(members.size()) + 0.5));
    n_test = std::min(n_test, members.size() - 1);
    test_idx.insert(test_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_idx.insert(train_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  IntrusionSplit split;
  split.train = all.select(train_idx);
  split.test = all.select(test_idx);

  // Min-max statistics from the training split only.
  split.feature_min.assign(m, std::numeric_limits<double>::infinity());
  split.feature_max.assign(m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < split.train.values.size(); ++i) {
    const std::size_t f = i % m;
    split.feature_min[f] = std::min(split.feature_min[f], split.train.values[i]);
    split.feature_max[f] = std::max(split.feature_max[f], split.train.values[i]);
  }
  auto scale = [&](SequenceDataset& ds) {
    for (std::size_t i = 0; i < ds.values.size(); ++i) {
      const std::size_t f = i % m;
      const double range = split.feature_max[f] - split.feature_min[f];
      ds.values[i] = range > 0.0 ? (ds.values[i] - split.feature_min[f]) / range : 0.0;
    }
  };
  scale(split.train);
  scale(split.test);
  return split;
}

}  // namespace rnnlab
