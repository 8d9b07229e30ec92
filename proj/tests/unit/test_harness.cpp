#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "qcs/csv.hpp"
#include "qcs/experiments.hpp"
#include "qcs/harness.hpp"
#include "qcs/version.hpp"

using namespace qcs;
using nlohmann::json;
using qcs::testing::code_of;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qcs_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json minimal_success() {
  return json{{"experiment", "SuccessVsM"}, {"seed", 7}, {"parameters", {{"ks", {10}}, {"ms", {5, 10, 20}}}}};
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalSuccessVsM) {
  const ExperimentConfig cfg = parse_config(minimal_success());
  EXPECT_EQ(cfg.experiment, Experiment::SuccessVsM);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.threads, 1u);
}

TEST(Config, MissingSeed) {
  json doc = minimal_success();
  doc.erase("seed");
  EXPECT_EQ(code_of([&] { parse_config(doc); }), ErrorCode::MissingField);
  EXPECT_EQ(error_text([&] { parse_config(doc); }), "MissingField: seed");
  EXPECT_EQ(parse_config(doc, 99).seed, 99u);
}

TEST(Config, UnknownExperiment) {
  json doc = minimal_success();
  doc["experiment"] = "foo";
  EXPECT_EQ(code_of([&] { parse_config(doc); }), ErrorCode::UnknownExperiment);
}

TEST(Config, TypeMismatchNamesField) {
  json doc = minimal_success();
  doc["parameters"]["ks"] = "ten";
  EXPECT_EQ(code_of([&] { parse_config(doc); }), ErrorCode::TypeMismatch);
  EXPECT_NE(error_text([&] { parse_config(doc); }).find("ks"), std::string::npos);
  doc = minimal_success();
  doc["seed"] = -3;
  EXPECT_EQ(code_of([&] { parse_config(doc); }), ErrorCode::TypeMismatch);
}

TEST(Config, RequiredParameterPerExperiment) {
  json doc = minimal_success();
  doc["parameters"].erase("ks");
  EXPECT_EQ(error_text([&] { parse_config(doc); }), "MissingField: ks");
  const json nmse{{"experiment", "NmseVsM"}, {"seed", 1}, {"parameters", json::object()}};
  EXPECT_EQ(error_text([&] { parse_config(nmse); }), "MissingField: ms");
}

TEST(Config, UnknownParameterRejected) {
  json doc = minimal_success();
  doc["parameters"]["kz"] = 3;
  EXPECT_EQ(code_of([&] { parse_config(doc); }), ErrorCode::InvalidArgument);
}

TEST(Config, LoadFromFile) {
  const fs::path dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << minimal_success().dump();
  EXPECT_EQ(load_config(dir / "cfg.json").seed, 7u);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_EQ(code_of([&] { load_config(dir / "bad.json"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { load_config(dir / "missing.json"); }), ErrorCode::Io);
}

TEST(Config, ExampleConfigsParse) {
  const fs::path dir = fs::path(QCS_SOURCE_DIR) / "configs";
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    ++seen;
  }
  EXPECT_EQ(seen, 7u);
}

TEST(Emit, EmptyRowsGiveHeaderOnly) {
  const fs::path dir = scratch("emit");
  const OutputRecord r = emit_results({}, {"a", "b"}, dir / "empty.csv");
  EXPECT_EQ(slurp(dir / "empty.csv"), "a,b\n");
  EXPECT_EQ(r.rows, 0u);
  EXPECT_EQ(r.sha256, sha256_hex("a,b\n"));
}

TEST(Emit, ThreeRowsFourLines) {
  const fs::path dir = scratch("emit3");
  emit_results({{std::int64_t{1}, 0.1, std::string("x")}, {std::int64_t{2}, 1.0 / 3.0, std::string("y")},
                {std::int64_t{3}, 1e-20, std::string("z")}},
               {"i", "v", "s"}, dir / "rows.csv");
  EXPECT_EQ(slurp(dir / "rows.csv"), "i,v,s\n1,0.1,x\n2,0.333333333,y\n3,1e-20,z\n");
}

TEST(Emit, SchemaMismatch) {
  const fs::path dir = scratch("emitbad");
  EXPECT_EQ(code_of([&] { emit_results({{std::int64_t{1}}}, {"a", "b"}, dir / "x.csv"); }), ErrorCode::InvalidArgument);
}

TEST(Emit, IoFailureNamesPath) {
  const fs::path dir = scratch("emitio");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  const std::string text = error_text([&] { emit_results({}, {"a"}, dir / "file" / "nested.csv"); });
  EXPECT_NE(text.find("Io"), std::string::npos);
  EXPECT_NE(text.find("file"), std::string::npos);
}

TEST(Run, SuccessPerfectDetection) {
  json doc{{"experiment", "SuccessVsM"},
           {"seed", 3},
           {"parameters",
            {{"n", 32768}, {"ks", {10}}, {"p", 1.0}, {"ms", {5, 8, 9, 10, 20, 40}}, {"trials", 200},
             {"min_count", 1}, {"rule", "coverage"}}}};
  ExperimentConfig cfg = parse_config(doc);
  cfg.output_dir = scratch("perfect");
  const RunManifest m = run_experiment(cfg);
  ASSERT_EQ(m.outputs.size(), 1u);
  std::istringstream csv(slurp(cfg.output_dir / "success_vs_m.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "k,m,stream,trials,successes,rate,ci_lo,ci_hi");
  while (std::getline(csv, line)) {
    std::stringstream row(line);
    std::string k, mm, stream, trials, succ, rate;
    std::getline(row, k, ',');
    std::getline(row, mm, ',');
    std::getline(row, stream, ',');
    std::getline(row, trials, ',');
    std::getline(row, succ, ',');
    std::getline(row, rate, ',');
    EXPECT_EQ(rate, std::stoi(mm) >= 10 ? "1" : "0") << line;
  }
}

TEST(Run, ConfusionWithoutBackground) {
  json doc{{"experiment", "ConfusionTLS"},
           {"seed", 4},
           {"parameters", {{"photons", {1}}, {"trials", 500}, {"background", 0.0}}}};
  const auto result = experiments::confusion_tls(experiments::ConfusionParams{
                                                     {5.4e9, 16.2e9, 27.0e9, 37.8e9}, 1074e-24, 1024e-12, 1024, {1},
                                                     500, 0.0, 0.47},
                                                 4);
  ASSERT_EQ(result.points.size(), 1u);
  EXPECT_EQ(result.points[0].accuracy, 1.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(result.points[0].confusion[i][j], i == j ? 1.0 : 0.0);
  ExperimentConfig cfg = parse_config(doc);
  cfg.output_dir = scratch("confusion");
  EXPECT_NO_THROW(run_experiment(cfg));
}

TEST(Run, ManifestListsChecksums) {
  json doc{{"experiment", "JitterBandwidth"}, {"seed", 1}, {"parameters", {{"fwhm_s", {45.3e-12}}}}};
  ExperimentConfig cfg = parse_config(doc);
  cfg.output_dir = scratch("manifest");
  run_experiment(cfg);
  const json manifest = json::parse(slurp(cfg.output_dir / "manifest.json"));
  EXPECT_EQ(manifest["config"]["experiment"], "JitterBandwidth");
  EXPECT_EQ(manifest["version"], kVersion);
  ASSERT_EQ(manifest["outputs"].size(), 2u);
  for (const auto& o : manifest["outputs"])
    EXPECT_EQ(o["sha256"], sha256_hex(slurp(cfg.output_dir / o["file"].get<std::string>())));
}

TEST(Run, DeterministicAcrossRunsAndThreads) {
  json doc{{"experiment", "NmseVsM"},
           {"seed", 12},
           {"parameters", {{"ms", {100, 1000}}, {"trials", 6}}}};
  ExperimentConfig a = parse_config(doc), b = parse_config(doc);
  a.output_dir = scratch("det_a");
  b.output_dir = scratch("det_b");
  b.threads = 3;
  const RunManifest ma = run_experiment(a), mb = run_experiment(b);
  ASSERT_EQ(ma.outputs.size(), mb.outputs.size());
  for (std::size_t i = 0; i < ma.outputs.size(); ++i) EXPECT_EQ(ma.outputs[i].sha256, mb.outputs[i].sha256);
  ExperimentConfig c = parse_config(doc);
  c.seed = 13;
  c.output_dir = scratch("det_c");
  EXPECT_NE(run_experiment(c).outputs[0].sha256, ma.outputs[0].sha256);
}

TEST(Run, ModuleErrorsCarryExperimentName) {
  json doc{{"experiment", "JitterBandwidth"}, {"seed", 1}, {"parameters", {{"fwhm_s", {-1.0}}}}};
  ExperimentConfig cfg = parse_config(doc);
  cfg.output_dir = scratch("err");
  EXPECT_EQ(error_text([&] { run_experiment(cfg); }).rfind("InvalidArgument: JitterBandwidth: ", 0), 0u);
}

TEST(Run, NmseSlope) {
  experiments::NmseVsMParams p;
  p.trials = 10;
  const auto r = experiments::nmse_vs_m(p, 5);
  EXPECT_NEAR(r.loglog_slope, -0.5, 0.1);
}

TEST(Experiments, BackgroundForAccuracy) {
  EXPECT_NEAR(experiments::background_for_accuracy(0.47, 4), 0.7066666666666667, 1e-15);
  EXPECT_EQ(experiments::background_for_accuracy(1.0, 4), 0.0);
  EXPECT_EQ(code_of([] { experiments::background_for_accuracy(0.2, 4); }), ErrorCode::InvalidArgument);
}

TEST(Experiments, LogLogSlope) {
  EXPECT_NEAR(experiments::loglog_slope({1, 10, 100}, {1, 0.1, 0.01}), -1.0, 1e-12);
}
