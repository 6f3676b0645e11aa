#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eqs/ingest.hpp"

namespace eqs::ingest {

namespace fs = std::filesystem;

namespace {

struct Placement {
  int qa;
  int qb;
};

Placement random_placement(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int a = pick(rng);
  int b = pick(rng);
  while (b == a) b = pick(rng);
  return {a, b};
}

// One two-qubit gate: ordered product of the 15 generator rotations.
void append_random_gate(QasmProgram& p, Placement where, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int code = 1; code < 16; ++code) {
    const double theta = scale * normal(rng);
    if (theta == 0.0) continue;
    append_pauli_rotation(p, code / 4, code % 4, where.qa, where.qb, theta);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string item_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

}  // namespace

LabeledCircuitDataset generate_clustered_dataset(const GeneratorSpec& spec) {
  if (spec.n_qubits < 2 || spec.n_qubits > 20) throw std::invalid_argument("generator: n_qubits must be in [2, 20]");
  if (spec.labels < 1 || spec.per_label < 1 || spec.anchor_depth < 1 || spec.noise_depth < 1)
    throw std::invalid_argument("generator: counts must be >= 1");
  if (!(spec.noise_scale >= 0.0)) throw std::invalid_argument("generator: noise_scale must be >= 0");

  std::mt19937_64 rng(spec.seed);
  std::vector<QasmProgram> anchors;
  for (int l = 0; l < spec.labels; ++l) {
    QasmProgram a;
    a.n_qubits = spec.n_qubits;
    for (int g = 0; g < spec.anchor_depth; ++g) append_random_gate(a, random_placement(spec.n_qubits, rng), 1.0, rng);
    anchors.push_back(std::move(a));
  }

  LabeledCircuitDataset ds;
  ds.n_qubits = spec.n_qubits;
  ds.label_count = spec.labels;
  for (int l = 0; l < spec.labels; ++l) {
    for (int k = 0; k < spec.per_label; ++k) {
      QasmProgram p = anchors[l];
      for (int g = 0; g < spec.noise_depth; ++g)
        append_random_gate(p, random_placement(spec.n_qubits, rng), spec.noise_scale, rng);
      ds.items.push_back({item_id(ds.items.size()), std::move(p), l});
    }
  }
  return ds;
}

void write_dataset(const LabeledCircuitDataset& dataset, const fs::path& dir) {
  fs::create_directories(dir / "circuits");
  nlohmann::json meta = {{"n_qubits", dataset.n_qubits},
                         {"label_count", dataset.label_count},
                         {"item_count", dataset.items.size()}};
  std::ofstream(dir / "meta.json") << meta.dump(2) << "\n";
  std::ofstream labels(dir / "labels.csv");
  labels << "id,label\n";
  for (const auto& item : dataset.items) {
    labels << item.id << "," << item.label << "\n";
    std::ofstream(dir / "circuits" / (item.id + ".qasm")) << to_qasm(item.program);
  }
  if (!labels) throw std::runtime_error("failed writing " + (dir / "labels.csv").string());
}

LabeledCircuitDataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("dataset directory not found: " + dir.string());
  LabeledCircuitDataset ds;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(dir / "meta.json"));
    ds.n_qubits = meta.at("n_qubits").get<int>();
    ds.label_count = meta.at("label_count").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error((dir / "meta.json").string() + ": " + e.what());
  }
  if (ds.label_count < 1) throw std::runtime_error((dir / "meta.json").string() + ": label_count must be >= 1");

  std::istringstream labels(read_file(dir / "labels.csv"));
  std::string line;
  int lineno = 0;
  while (std::getline(labels, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line == "id,label")) continue;
    const auto comma = line.find(',');
    const std::string where = (dir / "labels.csv").string() + ":" + std::to_string(lineno);
    if (comma == std::string::npos) throw std::runtime_error(where + ": expected 'id,label'");
    DatasetItem item;
    item.id = line.substr(0, comma);
    try {
      std::size_t used = 0;
      const std::string lab = line.substr(comma + 1);
      item.label = std::stoi(lab, &used);
      if (used != lab.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": invalid label");
    }
    if (item.label < 0 || item.label >= ds.label_count) throw std::runtime_error(where + ": label out of range");
    const fs::path qasm = dir / "circuits" / (item.id + ".qasm");
    try {
      item.program = parse_qasm(read_file(qasm));
    } catch (const QasmError& e) {
      throw std::runtime_error(qasm.string() + ": " + e.what());
    }
    if (item.program.n_qubits != ds.n_qubits)
      throw std::runtime_error(qasm.string() + ": register size differs from meta.json n_qubits");
    ds.items.push_back(std::move(item));
  }
  if (ds.items.empty()) throw std::runtime_error((dir / "labels.csv").string() + ": no items");
  return ds;
}

std::uint64_t dataset_hash(const LabeledCircuitDataset& dataset) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view s) {
    for (const unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(std::to_string(dataset.n_qubits));
  mix(std::to_string(dataset.label_count));
  for (const auto& item : dataset.items) {
    mix(item.id);
    mix(std::to_string(item.label));
    mix(to_qasm(item.program));
  }
  return h;
}

void require_classification(const LabeledCircuitDataset& dataset) {
  std::set<int> labels;
  for (const auto& item : dataset.items) labels.insert(item.label);
  if (labels.size() < 2) throw std::invalid_argument("classification requires at least two distinct labels");
}

}  // namespace eqs::ingest
