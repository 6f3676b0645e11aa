#include "eqs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "eqs/aqce.hpp"
#include "eqs/ingest.hpp"
#include "eqs/kernel.hpp"
#include "eqs/parallel.hpp"
#include "eqs/spectral.hpp"
#include "eqs/surrogate.hpp"

#ifndef EQS_VERSION
#define EQS_VERSION "0.1.0"
#endif

namespace eqs::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return EQS_VERSION; }

json default_config() {
  return json::parse(R"({
    "dataset": {
      "source": "generate",
      "path": null,
      "generator": {"n_qubits": 6, "labels": 4, "per_label": 50, "anchor_depth": 20,
                    "noise_depth": 1, "noise_scale": 0.07, "seed": 7}
    },
    "split": {"train_fraction": 0.5, "seed": 11},
    "svm": {"c": 1.0, "tol": 0.001},
    "gram_schmidt_tol": 1e-8,
    "k": 4,
    "k_sweep": [1, 2, 4, 8, 16, 32],
    "aqce": {"j0": 12, "delta_j": 6, "sweeps": 4, "j_max": null, "hard_cap": 1000, "f_target": 0.6},
    "eqs_accuracy_slack": 0.05,
    "gradients": {"random_seeds": 10, "seed": 3},
    "adam": {"steps": 200, "alpha": 0.009, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8,
             "batch_size": 1000, "seed": 5}
  })");
}

namespace {

// Keys whose default is null and the type they accept otherwise.
bool nullable_accepts(const std::string& path, const json& v) {
  if (path == "dataset.path") return v.is_string();
  if (path == "aqce.j_max") return v.is_number_integer();
  return false;
}

void merge(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object()) throw ConfigError("config" + (prefix.empty() ? "" : " key '" + prefix + "'") + " must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      merge(slot, value, path);
    } else if (slot.is_null()) {
      if (!value.is_null() && !nullable_accepts(path, value)) throw ConfigError("config key '" + path + "' has the wrong type");
      slot = value;
    } else {
      const bool ok = (slot.is_number() && value.is_number()) || (slot.is_string() && value.is_string()) ||
                      (slot.is_array() && value.is_array()) || (slot.is_boolean() && value.is_boolean());
      if (!ok) throw ConfigError("config key '" + path + "' has the wrong type");
      if (slot.is_number_integer() && !value.is_number_integer())
        throw ConfigError("config key '" + path + "' must be an integer");
      slot = value;
    }
  }
}

template <typename T>
T get(const json& c, const std::string& path) {
  return c.at(json::json_pointer("/" + [&] {
           std::string p = path;
           std::replace(p.begin(), p.end(), '.', '/');
           return p;
         }()))
      .get<T>();
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace

json resolve_config(const json& user) {
  json c = default_config();
  merge(c, user, "");
  const std::string source = get<std::string>(c, "dataset.source");
  require(source == "generate" || source == "directory", "dataset.source must be 'generate' or 'directory'");
  require(source != "directory" || c["dataset"]["path"].is_string(), "dataset.path is required when dataset.source is 'directory'");
  const auto& g = c["dataset"]["generator"];
  require(g["n_qubits"].get<int>() >= 2 && g["n_qubits"].get<int>() <= 20, "dataset.generator.n_qubits must be in [2, 20]");
  for (const char* k : {"labels", "per_label", "anchor_depth", "noise_depth"})
    require(g[k].get<int>() >= 1, std::string("dataset.generator.") + k + " must be >= 1");
  require(g["noise_scale"].get<double>() >= 0.0, "dataset.generator.noise_scale must be >= 0");
  require(g["seed"].get<long long>() >= 0, "dataset.generator.seed must be >= 0");
  const double frac = get<double>(c, "split.train_fraction");
  require(frac > 0.0 && frac < 1.0, "split.train_fraction must be in (0, 1)");
  require(get<long long>(c, "split.seed") >= 0, "split.seed must be >= 0");
  require(get<double>(c, "svm.c") > 0.0, "svm.c must be > 0");
  require(get<double>(c, "svm.tol") > 0.0, "svm.tol must be > 0");
  require(get<double>(c, "gram_schmidt_tol") > 0.0, "gram_schmidt_tol must be > 0");
  require(get<int>(c, "k") >= 1, "k must be >= 1");
  for (const auto& v : c["k_sweep"]) require(v.is_number_integer() && v.get<int>() >= 1, "k_sweep entries must be integers >= 1");
  const auto& a = c["aqce"];
  for (const char* k : {"j0", "delta_j", "sweeps", "hard_cap"})
    require(a[k].get<int>() >= 1, std::string("aqce.") + k + " must be >= 1");
  require(a["j_max"].is_null() || a["j_max"].get<int>() >= a["j0"].get<int>(), "aqce.j_max must be >= aqce.j0");
  const double ft = a["f_target"].get<double>();
  require(ft > 0.0 && ft <= 1.0, "aqce.f_target must be in (0, 1]");
  require(get<double>(c, "eqs_accuracy_slack") >= 0.0, "eqs_accuracy_slack must be >= 0");
  require(get<int>(c, "gradients.random_seeds") >= 1, "gradients.random_seeds must be >= 1");
  require(get<long long>(c, "gradients.seed") >= 0, "gradients.seed must be >= 0");
  require(get<int>(c, "adam.steps") >= 0, "adam.steps must be >= 0");
  require(get<int>(c, "adam.batch_size") >= 1, "adam.batch_size must be >= 1");
  require(get<double>(c, "adam.alpha") > 0.0, "adam.alpha must be > 0");
  require(get<long long>(c, "adam.seed") >= 0, "adam.seed must be >= 0");
  for (const char* k : {"beta1", "beta2"}) {
    const double b = c["adam"][k].get<double>();
    require(b >= 0.0 && b < 1.0, std::string("adam.") + k + " must be in [0, 1)");
  }
  require(get<double>(c, "adam.eps") > 0.0, "adam.eps must be > 0");
  return c;
}

json load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json report_header(const json& c, const std::string& stage) {
  return {{"stage", stage},
          {"version", version()},
          {"config_hash", config_hash(c)},
          {"config", c},
          {"seeds",
           {{"generator", c["dataset"]["generator"]["seed"]},
            {"split", c["split"]["seed"]},
            {"gradients", c["gradients"]["seed"]},
            {"adam", c["adam"]["seed"]}}}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path.string() + " (run the earlier stage first)");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

fs::path dataset_dir(const json& c, const fs::path& out) {
  if (c["dataset"]["source"] == "directory") return c["dataset"]["path"].get<std::string>();
  return out / "dataset";
}

struct Data {
  ingest::LabeledCircuitDataset dataset;
  std::vector<StateVector> states;
  std::vector<int> labels;
  std::uint64_t hash = 0;
};

Data load_data(const json& c, const fs::path& out) {
  Data d;
  d.dataset = ingest::load_dataset(dataset_dir(c, out));
  ingest::require_classification(d.dataset);
  d.hash = ingest::dataset_hash(d.dataset);
  d.states.resize(d.dataset.items.size());
  parallel_for(d.states.size(), [&](std::size_t i) { d.states[i] = ingest::to_feature_state(d.dataset.items[i].program); });
  for (const auto& item : d.dataset.items) d.labels.push_back(item.label);
  return d;
}

struct Split {
  std::vector<std::size_t> train, test;
};

// Stratified: each label contributes round(fraction * count) items, at least
// one to each side when it has two or more.
Split make_split(const Data& d, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<bool> in_train(d.labels.size(), false);
  for (int l = 0; l < d.dataset.label_count; ++l) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.labels.size(); ++i)
      if (d.labels[i] == l) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    if (idx.size() >= 2) take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
    for (std::size_t t = 0; t < take && t < idx.size(); ++t) in_train[idx[t]] = true;
  }
  Split s;
  for (std::size_t i = 0; i < in_train.size(); ++i) (in_train[i] ? s.train : s.test).push_back(i);
  return s;
}

Split read_split(const fs::path& out, const Data& d) {
  const json j = read_json(out / "split.json");
  if (j.at("dataset_hash").get<std::string>() != hex64(d.hash))
    throw std::runtime_error("split.json was produced for a different dataset; rerun train");
  return {j.at("train").get<std::vector<std::size_t>>(), j.at("test").get<std::vector<std::size_t>>()};
}

template <typename T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

template <typename Predict>
double accuracy(const std::vector<StateVector>& states, const std::vector<int>& labels, Predict predict) {
  if (states.empty()) return 0.0;
  std::vector<int> ok(states.size());
  parallel_for(states.size(), [&](std::size_t i) { ok[i] = predict(states[i]).label == labels[i]; });
  return static_cast<double>(std::accumulate(ok.begin(), ok.end(), 0)) / static_cast<double>(states.size());
}

kernel::KernelModel read_kernel_model(const fs::path& out, const Data& d, const Split& s) {
  auto m = kernel::kernel_model_from_json(read_json(out / "kernel_model.json"), pick(d.states, s.train));
  if (m.dataset_hash != d.hash) throw std::runtime_error("kernel_model.json was trained on a different dataset");
  return m;
}

aqce::AqceConfig aqce_config(const json& c) {
  const auto& a = c["aqce"];
  aqce::AqceConfig cfg;
  cfg.j0 = a["j0"].get<int>();
  cfg.delta_j = a["delta_j"].get<int>();
  cfg.sweeps = a["sweeps"].get<int>();
  if (!a["j_max"].is_null()) cfg.j_max = a["j_max"].get<int>();
  cfg.hard_cap = a["hard_cap"].get<int>();
  cfg.default_target = a["f_target"].get<double>();
  return cfg;
}

}  // namespace

Status cmd_generate(const json& c, const fs::path& out) {
  fs::create_directories(out);
  if (c["dataset"]["source"] != "generate") throw ConfigError("dataset.source is 'directory'; nothing to generate");
  const auto& g = c["dataset"]["generator"];
  ingest::GeneratorSpec spec{g["n_qubits"].get<int>(),     g["labels"].get<int>(),
                             g["per_label"].get<int>(),    g["anchor_depth"].get<int>(),
                             g["noise_depth"].get<int>(),  g["noise_scale"].get<double>(),
                             g["seed"].get<std::uint64_t>()};
  const auto ds = ingest::generate_clustered_dataset(spec);
  fs::remove_all(out / "dataset");
  ingest::write_dataset(ds, out / "dataset");

  // within / across label mean fidelity, for checking cluster geometry
  std::vector<StateVector> st(ds.items.size());
  parallel_for(st.size(), [&](std::size_t i) { st[i] = ingest::to_feature_state(ds.items[i].program); });
  const auto gram = kernel::gram(st);
  double within = 0.0, cross = 0.0;
  std::size_t nw = 0, nc = 0;
  for (std::size_t i = 0; i < st.size(); ++i)
    for (std::size_t j = i + 1; j < st.size(); ++j) {
      if (ds.items[i].label == ds.items[j].label) {
        within += gram(i, j);
        ++nw;
      } else {
        cross += gram(i, j);
        ++nc;
      }
    }
  json r = report_header(c, "generate");
  r["dataset_hash"] = hex64(ingest::dataset_hash(ds));
  r["items"] = ds.items.size();
  r["within_label_mean_fidelity"] = nw ? within / static_cast<double>(nw) : 1.0;
  r["cross_label_mean_fidelity"] = nc ? cross / static_cast<double>(nc) : 0.0;
  write_json(out / "generate_report.json", r);
  return Status::ok;
}

Status cmd_train(const json& c, const fs::path& out) {
  fs::create_directories(out);
  const Data d = load_data(c, out);
  const Split s = make_split(d, c["split"]["train_fraction"].get<double>(), c["split"]["seed"].get<std::uint64_t>());
  write_json(out / "split.json", {{"dataset_hash", hex64(d.hash)}, {"train", s.train}, {"test", s.test}});

  const auto train_states = pick(d.states, s.train);
  const auto train_labels = pick(d.labels, s.train);
  kernel::SvmOptions opt;
  opt.c = c["svm"]["c"].get<double>();
  opt.tol = c["svm"]["tol"].get<double>();
  auto model = kernel::train_one_vs_rest(train_states, train_labels, d.dataset.label_count, opt);
  model.dataset_hash = d.hash;
  for (auto i : s.train) model.train_ids.push_back(d.dataset.items[i].id);
  write_json(out / "kernel_model.json", kernel::kernel_model_to_json(model));

  auto predict = [&](const StateVector& x) { return kernel::predict_implicit(model, x); };
  json r = report_header(c, "train");
  r["dataset_hash"] = hex64(d.hash);
  r["n_qubits"] = d.dataset.n_qubits;
  r["label_count"] = d.dataset.label_count;
  r["n_train"] = s.train.size();
  r["n_test"] = s.test.size();
  r["train_accuracy"] = accuracy(train_states, train_labels, predict);
  r["test_accuracy"] = accuracy(pick(d.states, s.test), pick(d.labels, s.test), predict);
  write_json(out / "train_report.json", r);
  return Status::ok;
}

Status cmd_spectral(const json& c, const fs::path& out) {
  fs::create_directories(out);
  const Data d = load_data(c, out);
  const Split s = read_split(out, d);
  const auto model = read_kernel_model(out, d, s);
  const auto train_states = pick(d.states, s.train), test_states = pick(d.states, s.test);
  const auto train_labels = pick(d.labels, s.train), test_labels = pick(d.labels, s.test);
  const double gs_tol = c["gram_schmidt_tol"].get<double>();

  const auto gram = kernel::gram(train_states);
  const auto gs = num::gram_schmidt(train_states, gs_tol);
  const auto full = spectral::decompose(model, gram, gs);
  const std::size_t k = c["k"].get<std::size_t>();
  const auto lr = spectral::make_low_rank(model, gs, full, k, gs_tol);
  write_json(out / "spectral_bundle.json", spectral::low_rank_to_json(lr));
  write_text(out / "spectrum.csv", spectral::spectrum_csv(full));

  auto implicit = [&](const StateVector& x) { return kernel::predict_implicit(model, x); };
  const double implicit_test = accuracy(test_states, test_labels, implicit);
  const double implicit_train = accuracy(train_states, train_labels, implicit);

  std::vector<std::size_t> ks;
  for (const auto& v : c["k_sweep"]) ks.push_back(std::min(v.get<std::size_t>(), gs.rank));
  ks.push_back(gs.rank);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::ostringstream table;
  table << "k,test_accuracy,train_accuracy\n";
  json rows = json::array();
  for (const std::size_t kk : ks) {
    const auto m = spectral::make_low_rank(model, gs, full, kk, gs_tol);
    auto pr = [&](const StateVector& x) { return spectral::predict_low_rank(m, x); };
    const double te = accuracy(test_states, test_labels, pr), tr = accuracy(train_states, train_labels, pr);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", kk, te, tr);
    table << buf;
    rows.push_back({{"k", kk}, {"test_accuracy", te}, {"train_accuracy", tr}});
  }
  write_text(out / "accuracy_vs_k.csv", table.str());

  // full-rank agreement with the implicit model over every point
  const auto fr = spectral::make_low_rank(model, gs, full, gs.rank, gs_tol);
  std::vector<double> dev(d.states.size());
  parallel_for(d.states.size(), [&](std::size_t i) {
    const auto a = kernel::predict_implicit(model, d.states[i]), b = spectral::predict_low_rank(fr, d.states[i]);
    double m = 0.0;
    for (std::size_t l = 0; l < a.decisions.size(); ++l) m = std::max(m, std::abs(a.decisions[l] - b.decisions[l]));
    dev[i] = m;
  });

  auto low = [&](const StateVector& x) { return spectral::predict_low_rank(lr, x); };
  json labels = json::array();
  for (const auto& obs : full)
    labels.push_back({{"label", obs.label},
                      {"k", std::min(k, obs.values.size())},
                      {"cumulative_ratio", spectral::cumulative_contribution(obs, std::min(k, obs.values.size()))}});
  json r = report_header(c, "spectral");
  r["subspace_dim"] = gs.rank;
  r["k"] = k;
  r["labels"] = labels;
  r["implicit_test_accuracy"] = implicit_test;
  r["implicit_train_accuracy"] = implicit_train;
  r["low_rank_test_accuracy"] = accuracy(test_states, test_labels, low);
  r["low_rank_train_accuracy"] = accuracy(train_states, train_labels, low);
  r["full_rank_max_abs_decision_diff"] = *std::max_element(dev.begin(), dev.end());
  r["accuracy_vs_k"] = rows;
  write_json(out / "spectral_report.json", r);
  return Status::ok;
}

Status cmd_synthesize(const json& c, const fs::path& out) {
  fs::create_directories(out);
  const Data d = load_data(c, out);
  const Split s = read_split(out, d);
  const auto train_states = pick(d.states, s.train), test_states = pick(d.states, s.test);
  const auto train_labels = pick(d.labels, s.train), test_labels = pick(d.labels, s.test);
  const auto lr = spectral::low_rank_from_json(read_json(out / "spectral_bundle.json"), train_states);
  const auto cfg = aqce_config(c);

  surrogate::EQSModel eqs{lr.n_qubits, {}};
  json labels = json::array();
  bool all_converged = true;
  for (std::size_t l = 0; l < lr.observables.size(); ++l) {
    const auto& obs = lr.observables[l];
    const auto res = aqce::synthesize_isometry(obs.vectors, cfg);
    write_text(out / ("aqce_trace_" + std::to_string(l) + ".csv"), aqce::trace_csv(res.trace));
    write_text(out / ("aqce_heatmap_" + std::to_string(l) + ".csv"), aqce::heatmap_csv(res.circuit));
    all_converged = all_converged && res.converged;
    labels.push_back({{"label", l},
                      {"k", obs.values.size()},
                      {"converged", res.converged},
                      {"fidelities", res.fidelities},
                      {"gates", res.circuit.gates.size()},
                      {"sweeps", res.sweeps_run},
                      {"updates", res.trace.updates.size()}});
    eqs.labels.push_back({res.circuit, obs.values, lr.bias[l], res.converged, res.fidelities});
  }
  write_json(out / "eqs_model.json", surrogate::eqs_model_to_json(eqs));

  auto pe = [&](const StateVector& x) { return surrogate::predict_eqs(eqs, x); };
  auto pl = [&](const StateVector& x) { return spectral::predict_low_rank(lr, x); };
  const double eqs_test = accuracy(test_states, test_labels, pe), low_test = accuracy(test_states, test_labels, pl);
  json r = report_header(c, "synthesize");
  r["labels"] = labels;
  r["all_converged"] = all_converged;
  r["eqs_test_accuracy"] = eqs_test;
  r["eqs_train_accuracy"] = accuracy(train_states, train_labels, pe);
  r["low_rank_test_accuracy"] = low_test;
  r["within_slack"] = std::abs(eqs_test - low_test) <= c["eqs_accuracy_slack"].get<double>();
  write_json(out / "synthesize_report.json", r);
  return all_converged ? Status::ok : Status::not_converged;
}

Status cmd_gradients(const json& c, const fs::path& out) {
  fs::create_directories(out);
  const Data d = load_data(c, out);
  const Split s = read_split(out, d);
  const auto eqs = surrogate::eqs_model_from_json(read_json(out / "eqs_model.json"));
  if (eqs.n_qubits != d.dataset.n_qubits) throw std::runtime_error("eqs_model.json qubit count differs from the dataset");
  const auto train_states = pick(d.states, s.train), test_states = pick(d.states, s.test);
  const auto train_labels = pick(d.labels, s.train), test_labels = pick(d.labels, s.test);

  surrogate::GradientExperimentConfig gcfg;
  gcfg.random_seeds = c["gradients"]["random_seeds"].get<int>();
  gcfg.seed = c["gradients"]["seed"].get<std::uint64_t>();
  const auto& a = c["adam"];
  surrogate::AdamConfig acfg;
  acfg.alpha = a["alpha"].get<double>();
  acfg.beta1 = a["beta1"].get<double>();
  acfg.beta2 = a["beta2"].get<double>();
  acfg.eps = a["eps"].get<double>();
  acfg.batch_size = a["batch_size"].get<std::size_t>();
  acfg.steps = a["steps"].get<int>();
  acfg.seed = a["seed"].get<std::uint64_t>();

  json labels = json::array();
  for (std::size_t l = 0; l < eqs.labels.size(); ++l) {
    const int label = static_cast<int>(l);
    const auto params = surrogate::recover_params(eqs.labels[l]);
    const auto g = surrogate::gradient_experiment(params, label, test_states, test_labels, gcfg);
    json entry = {{"label", label},
                  {"parameters", params.theta.size()},
                  {"sum_sq_eqs", g.sum_sq_eqs},
                  {"sum_sq_random", g.sum_sq_random},
                  {"sum_sq_random_mean", g.random_mean},
                  {"sum_sq_random_std", g.random_std},
                  {"ratio_mean", g.ratio}};
    if (acfg.steps > 0) {
      const auto t = surrogate::adam_train(params, train_states, train_labels, label, acfg);
      std::ostringstream csv;
      csv << "step,loss\n";
      char buf[64];
      for (std::size_t i = 0; i < t.loss_trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, t.loss_trace[i]);
        csv << buf;
      }
      write_text(out / ("adam_loss_" + std::to_string(l) + ".csv"), csv.str());
      entry["adam_initial_loss"] = t.initial_loss;
      entry["adam_final_loss"] = t.final_loss;
    }
    labels.push_back(entry);
  }
  json r = report_header(c, "gradients");
  r["eval_set"] = "test";
  r["n_eval"] = test_states.size();
  r["labels"] = labels;
  write_json(out / "gradient_report.json", r);
  return Status::ok;
}

Status cmd_pipeline(const json& c, const fs::path& out) {
  fs::create_directories(out);
  json stages = json::object();
  auto strip = [](json r) {
    for (const char* k : {"stage", "version", "config_hash", "config", "seeds"}) r.erase(k);
    return r;
  };
  if (c["dataset"]["source"] == "generate") {
    cmd_generate(c, out);
    stages["generate"] = strip(read_json(out / "generate_report.json"));
  }
  cmd_train(c, out);
  stages["train"] = strip(read_json(out / "train_report.json"));
  cmd_spectral(c, out);
  stages["spectral"] = strip(read_json(out / "spectral_report.json"));
  const Status st = cmd_synthesize(c, out);
  stages["synthesize"] = strip(read_json(out / "synthesize_report.json"));
  cmd_gradients(c, out);
  stages["gradients"] = strip(read_json(out / "gradient_report.json"));
  json r = report_header(c, "pipeline");
  r["stages"] = stages;
  write_json(out / "pipeline_report.json", r);
  return st;
}

}  // namespace eqs::pipeline
