#pragma once

// Stage orchestration behind the command-line tool. Each stage reads what the
// previous stage wrote into the output directory, so running the stages one
// by one produces the same files as `pipeline`.
//
// Output directory layout:
//   dataset/                      generated dataset (generate)
//   split.json, kernel_model.json, train_report.json            (train)
//   spectral_bundle.json, spectrum.csv, accuracy_vs_k.csv,
//   spectral_report.json                                        (spectral)
//   eqs_model.json, aqce_trace_<l>.csv, aqce_heatmap_<l>.csv,
//   synthesize_report.json                                      (synthesize)
//   gradient_report.json, adam_loss_<l>.csv                     (gradients)
//   pipeline_report.json                                        (pipeline)

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace eqs::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default configuration; see README for the schema.
nlohmann::json default_config();

/// Merges `user` over the defaults and validates. Unknown keys, wrong types
/// and out-of-range values raise ConfigError.
nlohmann::json resolve_config(const nlohmann::json& user);

nlohmann::json load_config_file(const std::filesystem::path& path);

std::string version();

/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

enum class Status { ok, not_converged };

Status cmd_generate(const nlohmann::json& config, const std::filesystem::path& out);
Status cmd_train(const nlohmann::json& config, const std::filesystem::path& out);
Status cmd_spectral(const nlohmann::json& config, const std::filesystem::path& out);
Status cmd_synthesize(const nlohmann::json& config, const std::filesystem::path& out);
Status cmd_gradients(const nlohmann::json& config, const std::filesystem::path& out);
Status cmd_pipeline(const nlohmann::json& config, const std::filesystem::path& out);

}  // namespace eqs::pipeline
