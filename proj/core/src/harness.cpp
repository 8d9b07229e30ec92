#include "qcs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qcs/error.hpp"
#include "qcs/experiments.hpp"
#include "qcs/version.hpp"

namespace qcs {

namespace {

using nlohmann::json;
namespace ex = experiments;

constexpr std::pair<Experiment, std::string_view> kNames[] = {
    {Experiment::SuccessVsM, "SuccessVsM"},
    {Experiment::MminVsK, "MminVsK"},
    {Experiment::NmseVsM, "NmseVsM"},
    {Experiment::ConfusionTLS, "ConfusionTLS"},
    {Experiment::DftDemo, "DftDemo"},
    {Experiment::JitterBandwidth, "JitterBandwidth"},
    {Experiment::ResolutionVsIntegration, "ResolutionVsIntegration"},
};

[[noreturn]] void mismatch(const std::string& name, const char* expected) {
  fail(ErrorCode::TypeMismatch, name + " (expected " + expected + ")");
}

std::uint64_t as_u64(const json& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  // 1e6 style literals parse as floating point.
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  mismatch(name, "nonnegative integer");
}

double as_double(const json& v, const std::string& name) {
  if (!v.is_number()) mismatch(name, "number");
  return v.get<double>();
}

/// Typed access to one experiment's parameter map. Every key read is
/// recorded so leftovers can be reported as unknown.
class Params {
 public:
  explicit Params(const json& j) : j_(j) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    if (!has(key)) fail(ErrorCode::MissingField, key);
    return j_.at(key);
  }

  double real(const std::string& key, double fallback) { return has(key) ? as_double(j_.at(key), key) : fallback; }
  std::size_t size(const std::string& key, std::size_t fallback) {
    return has(key) ? static_cast<std::size_t>(as_u64(j_.at(key), key)) : fallback;
  }
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    return has(key) ? as_u64(j_.at(key), key) : fallback;
  }

  template <class T>
  std::vector<T> list(const std::string& key, std::vector<T> fallback, bool required = false) {
    if (!has(key)) {
      if (required) fail(ErrorCode::MissingField, key);
      return fallback;
    }
    const json& v = j_.at(key);
    if (!v.is_array()) mismatch(key, "array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string name = key + "[" + std::to_string(i) + "]";
      if constexpr (std::is_same_v<T, double>)
        out.push_back(as_double(v[i], name));
      else
        out.push_back(static_cast<T>(as_u64(v[i], name)));
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) fail(ErrorCode::InvalidArgument, "unknown parameter '" + key + "'");
  }

 private:
  const json& j_;
  std::set<std::string> seen_;
};

ex::SuccessVsMParams success_params(Params& p) {
  ex::SuccessVsMParams out;
  out.n = p.size("n", out.n);
  out.ks = p.list<std::size_t>("ks", out.ks, true);
  out.p = p.real("p", out.p);
  out.ms = p.list<std::size_t>("ms", {});
  if (p.has("relative_ms")) {
    const json& v = p.at("relative_ms");
    if (!v.is_array()) mismatch("relative_ms", "array of [per_k, offset] pairs");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string name = "relative_ms[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 2) mismatch(name, "[per_k, offset] pair");
      out.relative_ms.push_back({as_double(v[i][0], name), as_double(v[i][1], name)});
    }
  }
  if (out.ms.empty() && out.relative_ms.empty()) fail(ErrorCode::MissingField, "ms");
  out.trials = p.size("trials", out.trials);
  out.min_count = p.u64("min_count", out.min_count);
  out.dark_per_period = p.real("dark_per_period", out.dark_per_period);
  if (p.has("rule")) {
    const json& v = p.at("rule");
    if (v == "coverage")
      out.rule = SuccessRule::Coverage;
    else if (v == "exact_support")
      out.rule = SuccessRule::ExactSupport;
    else
      mismatch("rule", "\"coverage\" or \"exact_support\"");
  }
  return out;
}

ex::MminVsKParams mmin_params(Params& p) {
  ex::MminVsKParams out;
  out.ks = p.list<std::size_t>("ks", out.ks, true);
  out.p = p.real("p", out.p);
  out.target = p.real("target", out.target);
  out.min_counts = p.list<std::uint64_t>("min_counts", out.min_counts);
  out.trials = p.size("trials", out.trials);
  out.n = p.size("n", out.n);
  out.dark_per_period = p.real("dark_per_period", out.dark_per_period);
  out.bound_n = p.size("bound_n", out.bound_n);
  out.bound_c = p.real("bound_c", out.bound_c);
  return out;
}

ex::NmseVsMParams nmse_params(Params& p) {
  ex::NmseVsMParams out;
  out.tone_hz = p.real("tone_hz", out.tone_hz);
  out.window_s = p.real("window_s", out.window_s);
  out.n = p.size("n", out.n);
  out.render_grid = p.size("render_grid", out.render_grid);
  out.depth = p.real("depth", out.depth);
  out.span_s = p.real("span_s", out.span_s);
  out.ms = p.list<std::size_t>("ms", out.ms, true);
  out.trials = p.size("trials", out.trials);
  return out;
}

ex::ConfusionParams confusion_params(Params& p) {
  ex::ConfusionParams out;
  out.tones_hz = p.list<double>("tones_hz", out.tones_hz);
  out.phi_ddot_s2 = p.real("phi_ddot_s2", out.phi_ddot_s2);
  out.window_s = p.real("window_s", out.window_s);
  out.bins = p.size("bins", out.bins);
  out.photons = p.list<std::size_t>("photons", out.photons, true);
  out.trials = p.size("trials", out.trials);
  if (p.has("background")) out.background = as_double(p.at("background"), "background");
  out.target_single_accuracy = p.real("target_single_accuracy", out.target_single_accuracy);
  return out;
}

ex::DftDemoParams dft_params(Params& p) {
  ex::DftDemoParams out;
  out.tone_hz = as_double(p.at("tone_hz"), "tone_hz");
  out.window_s = p.real("window_s", out.window_s);
  out.n = p.size("n", out.n);
  out.render_grid = p.size("render_grid", out.render_grid);
  out.depth = p.real("depth", out.depth);
  out.span_s = p.real("span_s", out.span_s);
  out.photons = p.size("photons", out.photons);
  out.runs = p.size("runs", out.runs);
  if (p.has("comb")) {
    const json& v = p.at("comb");
    if (!v.is_object()) mismatch("comb", "object");
    Params c(v);
    ex::CombParams comb;
    comb.first_hz = c.real("first_hz", comb.first_hz);
    comb.spacing_hz = c.real("spacing_hz", comb.spacing_hz);
    comb.count = c.size("count", comb.count);
    comb.n = c.size("n", comb.n);
    comb.render_grid = c.size("render_grid", comb.render_grid);
    comb.photons = c.size("photons", comb.photons);
    c.reject_unknown();
    out.comb = comb;
  }
  return out;
}

ex::JitterBandwidthParams jitter_params(Params& p) {
  ex::JitterBandwidthParams out;
  out.fwhm_s = p.list<double>("fwhm_s", out.fwhm_s, true);
  out.tau_over_sigma = p.list<double>("tau_over_sigma", out.tau_over_sigma);
  out.curve_max_hz = p.real("curve_max_hz", out.curve_max_hz);
  out.curve_step_hz = p.real("curve_step_hz", out.curve_step_hz);
  return out;
}

ex::ResolutionParams resolution_params(Params& p) {
  ex::ResolutionParams out;
  out.tone_hz = p.real("tone_hz", out.tone_hz);
  out.integration_s = p.list<double>("integration_s", out.integration_s, true);
  if (p.has("clocks")) {
    const json& v = p.at("clocks");
    if (!v.is_array()) mismatch("clocks", "array of {name, skew} objects");
    out.clocks.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string name = "clocks[" + std::to_string(i) + "]";
      if (!v[i].is_object() || !v[i].contains("name") || !v[i].contains("skew") || !v[i]["name"].is_string())
        mismatch(name, "{\"name\": string, \"skew\": number}");
      out.clocks.emplace_back(v[i]["name"].get<std::string>(), as_double(v[i]["skew"], name + ".skew"));
    }
  }
  out.photons = p.size("photons", out.photons);
  out.search_points = p.size("search_points", out.search_points);
  out.depth = p.real("depth", out.depth);
  return out;
}

template <class F>
auto parse_params(const json& parameters, F&& parse) {
  Params p(parameters);
  auto out = parse(p);
  p.reject_unknown();
  return out;
}

void check_parameters(Experiment e, const json& parameters) {
  switch (e) {
    case Experiment::SuccessVsM: parse_params(parameters, success_params); break;
    case Experiment::MminVsK: parse_params(parameters, mmin_params); break;
    case Experiment::NmseVsM: parse_params(parameters, nmse_params); break;
    case Experiment::ConfusionTLS: parse_params(parameters, confusion_params); break;
    case Experiment::DftDemo: parse_params(parameters, dft_params); break;
    case Experiment::JitterBandwidth: parse_params(parameters, jitter_params); break;
    case Experiment::ResolutionVsIntegration: parse_params(parameters, resolution_params); break;
  }
}

std::int64_t I(std::size_t v) { return static_cast<std::int64_t>(v); }
std::int64_t I(std::uint64_t v, int) { return static_cast<std::int64_t>(v); }

const char* kTrialRule = "trial t of stream s uses derive_seed(derive_seed(seed, s, 0), 0, t)";

struct Run {
  const ExperimentConfig& config;
  RunManifest& manifest;

  void emit(const std::string& file, const std::vector<std::string>& schema, const std::vector<Row>& rows) {
    OutputRecord record = emit_results(rows, schema, config.output_dir / file);
    record.file = file;
    manifest.outputs.push_back(std::move(record));
  }
};

void run_success(Run& run, const ex::SuccessVsMParams& params) {
  const auto points = ex::success_vs_m(params, run.config.seed, run.config.threads);
  std::vector<Row> rows;
  for (const auto& pt : points) {
    const auto& e = pt.estimate;
    rows.push_back({I(pt.k), I(e.measurements), I(pt.stream, 0), I(e.trials), I(e.successes), e.rate, e.ci_lo, e.ci_hi});
  }
  run.emit("success_vs_m.csv", {"k", "m", "stream", "trials", "successes", "rate", "ci_lo", "ci_hi"}, rows);
  run.manifest.provenance["trial_rule"] = kTrialRule;
  run.manifest.provenance["note"] =
      "every M of a stream replays the same trials; success at M uses the first M detections";
}

void run_mmin(Run& run, const ex::MminVsKParams& params) {
  const auto result = ex::mmin_vs_k(params, run.config.seed, run.config.threads);
  std::vector<Row> rows;
  for (const auto& pt : result.points)
    rows.push_back({I(pt.k), I(pt.min_count, 0), I(pt.stream, 0), I(params.trials), I(pt.m_min), I(pt.classical)});
  run.emit("mmin_vs_k.csv", {"k", "min_count", "stream", "trials", "m_min", "classical_bound"}, rows);
  std::vector<Row> fits;
  json summary = json::array();
  for (const auto& [c0, fit] : result.fits) {
    fits.push_back({I(c0, 0), fit.alpha, fit.c, fit.r2});
    summary.push_back({{"min_count", c0}, {"alpha", fit.alpha}, {"c", fit.c}, {"r2", fit.r2}});
  }
  run.emit("mmin_fit.csv", {"min_count", "alpha", "c", "r2"}, fits);
  run.manifest.summary["fits"] = summary;
  run.manifest.provenance["trial_rule"] = kTrialRule;
  run.manifest.provenance["note"] =
      "m_min for stream s is an order statistic of the hitting times of its trials (exact chain for K <= 3, c0 = 1, no "
      "background)";
}

void run_nmse(Run& run, const ex::NmseVsMParams& params) {
  const auto result = ex::nmse_vs_m(params, run.config.seed, run.config.threads);
  std::vector<Row> rows;
  for (const auto& pt : result.points) {
    const auto& first = result.points.front();
    const double reference = first.rmse * std::sqrt(static_cast<double>(first.m) / static_cast<double>(pt.m));
    rows.push_back({I(pt.m), I(pt.stream, 0), I(pt.trials), pt.mean_nmse, pt.rmse, reference, pt.top1_rate});
  }
  run.emit("nmse_vs_m.csv", {"m", "stream", "trials", "mean_nmse", "rmse", "rmse_reference", "top1_rate"}, rows);
  run.manifest.summary["loglog_slope"] = result.loglog_slope;
  run.manifest.provenance["trial_rule"] = kTrialRule;
}

void run_confusion(Run& run, const ex::ConfusionParams& params) {
  const auto result = ex::confusion_tls(params, run.config.seed, run.config.threads);
  std::vector<Row> acc, conf;
  for (const auto& pt : result.points) {
    acc.push_back({I(pt.photons), I(pt.stream, 0), I(params.trials * params.tones_hz.size()), pt.accuracy, pt.ci_lo,
                   pt.ci_hi});
    for (std::size_t i = 0; i < pt.confusion.size(); ++i)
      for (std::size_t j = 0; j < pt.confusion[i].size(); ++j)
        conf.push_back({I(pt.photons), params.tones_hz[i], params.tones_hz[j], pt.confusion[i][j]});
  }
  run.emit("accuracy_vs_photons.csv", {"photons", "stream", "trials", "accuracy", "ci_lo", "ci_hi"}, acc);
  run.emit("confusion.csv", {"photons", "true_hz", "predicted_hz", "fraction"}, conf);
  run.manifest.summary["background"] = result.background;
  run.manifest.summary["tone_bins"] = result.tone_bins;
  run.manifest.provenance["trial_rule"] = kTrialRule;
  run.manifest.provenance["index"] = "t = tone_index * trials + trial; tie-breaks draw from derive_seed(trial_seed, 1, 0)";
}

void run_dft(Run& run, const ex::DftDemoParams& params) {
  const auto result = ex::dft_demo(params, run.config.seed, run.config.threads);
  std::vector<Row> runs;
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const auto& d = result.runs[r];
    runs.push_back({I(r), I(std::size_t{500}), I(d.top_bin), I(std::size_t{d.correct ? 1u : 0u}), d.nmse});
  }
  run.emit("dft_runs.csv", {"run", "stream", "top_bin", "correct", "nmse"}, runs);

  std::vector<Row> spectrum;
  for (std::size_t k = 0; k < result.frequencies_hz.size(); ++k)
    spectrum.push_back({I(k), result.frequencies_hz[k], result.magnitudes[k],
                        k < result.coefficients.size() ? result.coefficients[k] : 0.0});
  run.emit("dft_spectrum.csv", {"bin", "frequency_hz", "magnitude", "coefficient"}, spectrum);

  std::vector<Row> wave;
  const double n = static_cast<double>(result.truth_waveform.size());
  for (std::size_t i = 0; i < result.truth_waveform.size(); ++i)
    wave.push_back({I(i), (static_cast<double>(i) + 0.5) * params.window_s / n, result.truth_waveform[i],
                    result.reconstructed_waveform[i]});
  run.emit("dft_waveform.csv", {"index", "time_s", "truth", "reconstructed"}, wave);

  run.manifest.summary["true_bin"] = result.true_bin;
  run.manifest.summary["correct_runs"] = result.correct_runs;
  if (result.has_comb) {
    std::vector<Row> comb;
    const double period = 1.0 / params.comb->spacing_hz;
    for (std::size_t k = 0; k < result.comb_coefficients.size(); ++k)
      comb.push_back({I(k), static_cast<double>(k) / period, result.comb_coefficients[k]});
    run.emit("comb_coefficients.csv", {"bin", "frequency_hz", "coefficient"}, comb);
    run.manifest.summary["comb_recall"] = result.comb_recall;
    run.manifest.summary["comb_nmse"] = result.comb_nmse;
  }
  run.manifest.provenance["trial_rule"] = kTrialRule;
  run.manifest.provenance["index"] = "run r is trial r of stream 500; the comb is trial 0 of stream 600";
}

void run_jitter(Run& run, const ex::JitterBandwidthParams& params) {
  const auto result = ex::jitter_bandwidth(params);
  std::vector<Row> rows;
  for (const auto& pt : result.points)
    rows.push_back({pt.fwhm_s, pt.tau_over_sigma, pt.sigma_s, pt.tau_s, pt.f3db_hz, pt.product});
  run.emit("jitter_bandwidth.csv", {"fwhm_s", "tau_over_sigma", "sigma_s", "tau_s", "f3db_hz", "f3db_times_fwhm"}, rows);
  std::vector<Row> curve;
  for (const auto& c : result.curve) curve.push_back({c[0], c[1], c[2]});
  run.emit("jitter_response.csv", {"fwhm_s", "frequency_hz", "magnitude"}, curve);
  run.manifest.provenance["note"] = "deterministic; no random draws";
}

void run_resolution(Run& run, const ex::ResolutionParams& params) {
  const auto points = ex::resolution_vs_integration(params, run.config.seed, run.config.threads);
  std::vector<Row> rows;
  for (const auto& pt : points)
    rows.push_back({pt.clock, pt.skew, pt.integration_s, I(pt.stream, 0), pt.fourier_limit_hz, pt.peak_offset_hz,
                    pt.resolution_hz});
  run.emit("resolution_vs_integration.csv",
           {"clock", "skew", "integration_s", "stream", "fourier_limit_hz", "peak_offset_hz", "resolution_hz"}, rows);
  run.manifest.provenance["trial_rule"] = kTrialRule;
  run.manifest.provenance["index"] = "trial 0 draws the photons, trial 1 the detector";
}

std::string strip_code(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

}  // namespace

std::string_view to_string(Experiment experiment) noexcept {
  for (const auto& [e, name] : kNames)
    if (e == experiment) return name;
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (const auto& [e, n] : kNames)
    if (n == name) return e;
  fail(ErrorCode::UnknownExperiment, std::string(name));
}

json ExperimentConfig::to_json() const {
  return {{"experiment", to_string(experiment)},
          {"parameters", parameters},
          {"seed", seed},
          {"output_dir", output_dir.generic_string()},
          {"threads", threads}};
}

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> fallback_seed) {
  if (!doc.is_object()) mismatch("config", "object");
  static const std::set<std::string> allowed{"experiment", "parameters", "seed", "output_dir", "threads"};
  for (const auto& [key, value] : doc.items())
    if (!allowed.count(key)) fail(ErrorCode::InvalidArgument, "unknown config field '" + key + "'");

  ExperimentConfig cfg;
  if (!doc.contains("experiment")) fail(ErrorCode::MissingField, "experiment");
  if (!doc["experiment"].is_string()) mismatch("experiment", "string");
  cfg.experiment = parse_experiment(doc["experiment"].get<std::string>());

  if (doc.contains("seed"))
    cfg.seed = as_u64(doc["seed"], "seed");
  else if (fallback_seed)
    cfg.seed = *fallback_seed;
  else
    fail(ErrorCode::MissingField, "seed");

  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object()) mismatch("parameters", "object");
    cfg.parameters = doc["parameters"];
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) mismatch("output_dir", "string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("threads")) {
    const std::uint64_t t = as_u64(doc["threads"], "threads");
    if (t == 0 || t > 1024) mismatch("threads", "integer in [1, 1024]");
    cfg.threads = static_cast<unsigned>(t);
  }
  check_parameters(cfg.experiment, cfg.parameters);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> fallback_seed) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return parse_config(doc, fallback_seed);
}

OutputRecord emit_results(const std::vector<Row>& rows, const std::vector<std::string>& schema,
                          const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_csv(buffer, schema, rows);
  const std::string bytes = buffer.str();
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
  return {path.filename().string(), sha256_hex(bytes), rows.size(), bytes.size()};
}

json RunManifest::to_json() const {
  json outs = json::array();
  for (const auto& o : outputs) outs.push_back({{"file", o.file}, {"sha256", o.sha256}, {"rows", o.rows}, {"bytes", o.bytes}});
  return {{"config", config},          {"version", version}, {"wall_time_s", wall_time_s},
          {"outputs", outs},           {"provenance", provenance}, {"summary", summary}};
}

RunManifest run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.config = config.to_json();
  manifest.version = kVersion;
  manifest.provenance = {{"experiment", to_string(config.experiment)}, {"seed", config.seed}};
  manifest.summary = json::object();
  Run run{config, manifest};

  try {
    const json& p = config.parameters;
    switch (config.experiment) {
      case Experiment::SuccessVsM: run_success(run, parse_params(p, success_params)); break;
      case Experiment::MminVsK: run_mmin(run, parse_params(p, mmin_params)); break;
      case Experiment::NmseVsM: run_nmse(run, parse_params(p, nmse_params)); break;
      case Experiment::ConfusionTLS: run_confusion(run, parse_params(p, confusion_params)); break;
      case Experiment::DftDemo: run_dft(run, parse_params(p, dft_params)); break;
      case Experiment::JitterBandwidth: run_jitter(run, parse_params(p, jitter_params)); break;
      case Experiment::ResolutionVsIntegration: run_resolution(run, parse_params(p, resolution_params)); break;
    }
  } catch (const Error& e) {
    throw Error(e.code(), std::string(to_string(config.experiment)) + ": " + strip_code(e));
  }

  manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + config.output_dir.string() + ": " + ec.message());
  const auto path = config.output_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << manifest.to_json().dump(2) << '\n';
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
  return manifest;
}

}  // namespace qcs
