#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcs/csv.hpp"

namespace qcs {

enum class Experiment {
  SuccessVsM,
  MminVsK,
  NmseVsM,
  ConfusionTLS,
  DftDemo,
  JitterBandwidth,
  ResolutionVsIntegration,
};

std::string_view to_string(Experiment experiment) noexcept;
/// Throws UnknownExperiment.
Experiment parse_experiment(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::SuccessVsM;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  unsigned threads = 1;

  nlohmann::json to_json() const;
};

/// Validates a parsed JSON document. `fallback_seed` is used only when the
/// document has no "seed" (the QCS_SEED environment variable in the CLI).
/// Errors: MissingField(name), TypeMismatch(name), UnknownExperiment,
/// InvalidArgument for unrecognized parameter keys.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> fallback_seed = std::nullopt);

/// Reads and validates a config file. Errors as parse_config, plus Io and
/// ParseError.
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> fallback_seed = std::nullopt);

struct OutputRecord {
  std::string file;          // relative to the output directory
  std::string sha256;
  std::size_t rows = 0;
  std::size_t bytes = 0;
};

/// Writes the CSV and returns its checksum record. Throws Io naming the path.
OutputRecord emit_results(const std::vector<Row>& rows, const std::vector<std::string>& schema,
                          const std::filesystem::path& path);

struct RunManifest {
  nlohmann::json config;
  std::string version;
  double wall_time_s = 0.0;
  std::vector<OutputRecord> outputs;
  nlohmann::json provenance;
  nlohmann::json summary;

  nlohmann::json to_json() const;
};

/// Runs the sweep, writes its CSVs and manifest.json into output_dir.
/// Module errors are rethrown with the experiment name prefixed.
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace qcs
