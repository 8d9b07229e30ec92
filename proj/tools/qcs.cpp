#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qcs/error.hpp"
#include "qcs/harness.hpp"
#include "qcs/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("QCS_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used == std::string(raw).size() && raw[0] != '-') return v;
  } catch (const std::exception&) {
  }
  throw qcs::Error(qcs::ErrorCode::TypeMismatch, "QCS_SEED (expected unsigned 64-bit integer)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum compressed sensing simulation toolkit"};
  app.set_version_flag("--version", std::string(qcs::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;

  CLI::App* run = app.add_subcommand("run", "Run an experiment and write its CSVs and manifest");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Override the output directory");
  run->add_option("--threads", threads, "Worker threads for trial fan-out")->check(CLI::Range(1u, 1024u));

  CLI::App* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  validate->add_option("--seed", seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  qcs::ExperimentConfig config;
  try {
    // CLI --seed beats the config file, which beats QCS_SEED.
    std::optional<std::uint64_t> fallback = seed ? seed : env_seed();
    config = qcs::load_config(config_path, fallback);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (threads) config.threads = *threads;
  } catch (const qcs::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  if (validate->parsed()) {
    std::cout << config.to_json().dump(2) << '\n';
    return kOk;
  }

  try {
    const qcs::RunManifest manifest = qcs::run_experiment(config);
    for (const auto& o : manifest.outputs)
      std::cout << (config.output_dir / o.file).string() << "  " << o.sha256 << '\n';
    std::cout << "manifest: " << (config.output_dir / "manifest.json").string() << "  (" << manifest.wall_time_s
              << " s)\n";
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
