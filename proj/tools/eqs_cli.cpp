// eqs: command-line driver for the surrogate pipeline.
//
//   eqs <generate|train|spectral|synthesize|gradients|pipeline> [--config FILE] [--out DIR] [overrides]
//
// Exit codes: 0 success, 1 runtime failure, 2 config/usage error,
// 3 circuit synthesis ran out of gate budget.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "eqs/parallel.hpp"
#include "eqs/pipeline.hpp"

namespace {

using nlohmann::json;
namespace pl = eqs::pipeline;

template <typename T>
struct Override {
  std::optional<T> value;
  std::vector<std::string> path;
};

void set_path(json& j, const std::vector<std::string>& path, json v) {
  json* slot = &j;
  for (const auto& p : path) slot = &(*slot)[p];
  *slot = std::move(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit quantum surrogate pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", pl::version());

  std::string config_path, out_dir = "eqs_out";
  unsigned threads = 0;
  app.add_option("--config", config_path, "JSON config file (missing keys take defaults)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)");

  std::optional<std::string> dataset_dir;
  app.add_option("--dataset", dataset_dir, "Load the dataset from this directory instead of generating one");

  Override<int> n_qubits{{}, {"dataset", "generator", "n_qubits"}}, labels{{}, {"dataset", "generator", "labels"}},
      per_label{{}, {"dataset", "generator", "per_label"}}, anchor_depth{{}, {"dataset", "generator", "anchor_depth"}},
      noise_depth{{}, {"dataset", "generator", "noise_depth"}}, k{{}, {"k"}}, j0{{}, {"aqce", "j0"}},
      delta_j{{}, {"aqce", "delta_j"}}, sweeps{{}, {"aqce", "sweeps"}}, j_max{{}, {"aqce", "j_max"}},
      random_seeds{{}, {"gradients", "random_seeds"}}, adam_steps{{}, {"adam", "steps"}};
  Override<std::uint64_t> seed{{}, {"dataset", "generator", "seed"}}, split_seed{{}, {"split", "seed"}},
      grad_seed{{}, {"gradients", "seed"}}, adam_seed{{}, {"adam", "seed"}};
  Override<double> noise_scale{{}, {"dataset", "generator", "noise_scale"}},
      train_fraction{{}, {"split", "train_fraction"}}, svm_c{{}, {"svm", "c"}}, f_target{{}, {"aqce", "f_target"}};

  app.add_option("--n-qubits", n_qubits.value, "Generator: qubits");
  app.add_option("--labels", labels.value, "Generator: label count");
  app.add_option("--per-label", per_label.value, "Generator: items per label");
  app.add_option("--anchor-depth", anchor_depth.value, "Generator: anchor gates");
  app.add_option("--noise-depth", noise_depth.value, "Generator: noise gates per item");
  app.add_option("--noise-scale", noise_scale.value, "Generator: noise coefficient std");
  app.add_option("--seed", seed.value, "Generator seed");
  app.add_option("--train-fraction", train_fraction.value, "Train split fraction");
  app.add_option("--split-seed", split_seed.value, "Split seed");
  app.add_option("--c", svm_c.value, "SVM regularization C");
  app.add_option("--k", k.value, "Truncation rank K");
  app.add_option("--f-target", f_target.value, "AQCE target fidelity per eigenvector");
  app.add_option("--j0", j0.value, "AQCE initial gate count");
  app.add_option("--delta-j", delta_j.value, "AQCE gates added per growth step");
  app.add_option("--sweeps", sweeps.value, "AQCE sweeps per growth step");
  app.add_option("--j-max", j_max.value, "AQCE gate budget");
  app.add_option("--random-seeds", random_seeds.value, "Random initializations in the gradient experiment");
  app.add_option("--gradient-seed", grad_seed.value, "Gradient experiment seed");
  app.add_option("--adam-steps", adam_steps.value, "Adam steps per label (0 skips training)");
  app.add_option("--adam-seed", adam_seed.value, "Adam batch shuffling seed");

  const std::map<std::string, std::function<pl::Status(const json&, const std::filesystem::path&)>> commands = {
      {"generate", pl::cmd_generate},     {"train", pl::cmd_train},         {"spectral", pl::cmd_spectral},
      {"synthesize", pl::cmd_synthesize}, {"gradients", pl::cmd_gradients}, {"pipeline", pl::cmd_pipeline}};
  const std::map<std::string, std::string> help = {
      {"generate", "Write a synthetic clustered dataset to OUT/dataset"},
      {"train", "Fidelity-kernel SVM (one-vs-rest) on the train split"},
      {"spectral", "Diagonalize and truncate each label's observable"},
      {"synthesize", "Build surrogate circuits for the kept eigenvectors"},
      {"gradients", "Gradient-magnitude experiment and Adam fine-tuning"},
      {"pipeline", "Run every stage and write a consolidated report"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json user = config_path.empty() ? json::object() : pl::load_config_file(config_path);
    if (!user.is_object()) throw pl::ConfigError("config file must contain a JSON object");
    auto apply = [&](const auto& o) {
      if (o.value) set_path(user, o.path, *o.value);
    };
    for (const auto* o : {&n_qubits, &labels, &per_label, &anchor_depth, &noise_depth, &k, &j0, &delta_j, &sweeps,
                          &j_max, &random_seeds, &adam_steps})
      apply(*o);
    for (const auto* o : {&seed, &split_seed, &grad_seed, &adam_seed}) apply(*o);
    for (const auto* o : {&noise_scale, &train_fraction, &svm_c, &f_target}) apply(*o);
    if (dataset_dir) {
      set_path(user, {"dataset", "source"}, "directory");
      set_path(user, {"dataset", "path"}, *dataset_dir);
    }
    const json config = pl::resolve_config(user);
    eqs::set_thread_count(threads);

    const std::string cmd = app.get_subcommands().front()->get_name();
    const pl::Status st = commands.at(cmd)(config, out_dir);
    if (st == pl::Status::not_converged) {
      std::cerr << "eqs: circuit synthesis did not reach the target fidelity for every label (see "
                << out_dir << "/synthesize_report.json)\n";
      return 3;
    }
    return 0;
  } catch (const pl::ConfigError& e) {
    std::cerr << "eqs: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "eqs: " << e.what() << "\n";
    return 1;
  }
}
