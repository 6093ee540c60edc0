#include "dmri/experiment.hpp"

#include "dmri/error.hpp"
#include "dmri/metrics.hpp"
#include "dmri/phantom.hpp"
#include "dmri/random.hpp"
#include "file_header.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

namespace dmri {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(Method m)
{
  switch (m) {
  case Method::Rdledm: return "rdledm";
  case Method::Baseline: return "baseline";
  case Method::ZeroFill: return "zerofill";
  }
  return "?";
}

Method parse_method(std::string_view name)
{
  for (auto m : {Method::Rdledm, Method::Baseline, Method::ZeroFill}) {
    if (name == to_string(m)) {
      return m;
    }
  }
  throw LookupError(fmt::format("unknown solver method '{}' (expected rdledm, baseline or zerofill)", name));
}

namespace {

constexpr char const *kVersion = "0.1.0";
constexpr int kManifestVersion = 1;

json threshold_to_json(double v)
{
  if (std::isinf(v)) {
    return "inf";
  }
  return v;
}

// Strict view of one JSON object: every key must be read exactly once, nothing extra.
class Section
{
public:
  Section(json const &doc, std::string path)
    : path_{std::move(path)}
  {
    if (!doc.is_object()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, fmt::format("'{}' must be a JSON object", path_.empty() ? "<root>" : path_));
    }
    doc_ = &doc;
  }

  json const &raw(std::string const &key)
  {
    auto const full = qualified(key);
    auto it = doc_->find(key);
    if (it == doc_->end()) {
      throw ConfigError(full, fmt::format("missing config key '{}'", full));
    }
    seen_.insert(key);
    return *it;
  }

  Section section(std::string const &key) { return Section(raw(key), qualified(key)); }

  double number(std::string const &key)
  {
    auto const &v = raw(key);
    if (!v.is_number()) {
      throw ConfigError(qualified(key), fmt::format("config key '{}' must be a number", qualified(key)));
    }
    return v.get<double>();
  }

  double number_or_inf(std::string const &key)
  {
    auto const &v = raw(key);
    if (v.is_string() && v.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    if (!v.is_number()) {
      throw ConfigError(qualified(key), fmt::format("config key '{}' must be a number or \"inf\"", qualified(key)));
    }
    return v.get<double>();
  }

  std::uint64_t unsigned_integer(std::string const &key)
  {
    auto const &v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(qualified(key), fmt::format("config key '{}' must be a non-negative integer", qualified(key)));
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(std::string const &key)
  {
    auto const &v = raw(key);
    if (!v.is_boolean()) {
      throw ConfigError(qualified(key), fmt::format("config key '{}' must be true or false", qualified(key)));
    }
    return v.get<bool>();
  }

  std::string string(std::string const &key)
  {
    auto const &v = raw(key);
    if (!v.is_string()) {
      throw ConfigError(qualified(key), fmt::format("config key '{}' must be a string", qualified(key)));
    }
    return v.get<std::string>();
  }

  template <typename Parse>
  auto named(std::string const &key, Parse parse)
  {
    auto const name = string(key);
    try {
      return parse(name);
    } catch (LookupError const &e) {
      throw ConfigError(qualified(key), fmt::format("config key '{}': {}", qualified(key), e.what()));
    }
  }

  void finish() const
  {
    for (auto const &[key, value] : doc_->items()) {
      if (!seen_.contains(key)) {
        throw ConfigError(qualified(key), fmt::format("unknown config key '{}'", qualified(key)));
      }
    }
  }

private:
  std::string qualified(std::string const &key) const { return path_.empty() ? key : path_ + "." + key; }

  json const *doc_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

} // namespace

nlohmann::ordered_json to_json(ExperimentConfig const &cfg)
{
  auto const &s = cfg.solver;
  nlohmann::ordered_json doc;
  doc["phantom"] = {{"preset", cfg.phantom.preset}, {"size", cfg.phantom.size}, {"frames", cfg.phantom.frames}};
  doc["mask"] = {{"pattern", to_string(cfg.mask.pattern)},
                 {"ratio", cfg.mask.ratio},
                 {"seed", cfg.mask.seed},
                 {"static_mask", cfg.mask.static_mask}};
  doc["noise"] = {{"sigma", cfg.noise.sigma}, {"seed", cfg.noise.seed}};
  doc["solver"] = {{"method", to_string(cfg.method)},
                   {"lambda1", s.lambda1},
                   {"lambda2", s.lambda2},
                   {"tau", s.tau},
                   {"t1", s.t1},
                   {"t2", s.t2},
                   {"epsilon_threshold", threshold_to_json(s.epsilon_threshold)},
                   {"max_iters", s.max_iters},
                   {"min_iters", s.min_iters},
                   {"tol_re", s.tol_re},
                   {"record_metrics", s.record_metrics},
                   {"epsilon_sign", to_string(s.epsilon_sign)},
                   {"coupling", to_string(s.coupling)},
                   {"decomposition", s.decomposition}};
  doc["output"] = {{"dir", cfg.output.dir}, {"export_pgm", cfg.output.export_pgm}};
  return doc;
}

ExperimentConfig experiment_from_json(json const &doc)
{
  ExperimentConfig cfg;
  Section root(doc, "");

  auto phantom = root.section("phantom");
  cfg.phantom.preset = phantom.string("preset");
  cfg.phantom.size = phantom.unsigned_integer("size");
  cfg.phantom.frames = phantom.unsigned_integer("frames");
  phantom.finish();

  auto mask = root.section("mask");
  cfg.mask.pattern = mask.named("pattern", parse_mask_pattern);
  cfg.mask.ratio = mask.number("ratio");
  cfg.mask.seed = mask.unsigned_integer("seed");
  cfg.mask.static_mask = mask.boolean("static_mask");
  mask.finish();

  auto noise = root.section("noise");
  cfg.noise.sigma = noise.number("sigma");
  cfg.noise.seed = noise.unsigned_integer("seed");
  noise.finish();

  auto solver = root.section("solver");
  cfg.method = solver.named("method", parse_method);
  auto &s = cfg.solver;
  s.lambda1 = solver.number("lambda1");
  s.lambda2 = solver.number("lambda2");
  s.tau = solver.number("tau");
  s.t1 = solver.number("t1");
  s.t2 = solver.number("t2");
  s.epsilon_threshold = solver.number_or_inf("epsilon_threshold");
  s.max_iters = solver.unsigned_integer("max_iters");
  s.min_iters = solver.unsigned_integer("min_iters");
  s.tol_re = solver.number("tol_re");
  s.record_metrics = solver.boolean("record_metrics");
  s.epsilon_sign = solver.named("epsilon_sign", parse_epsilon_sign);
  s.coupling = solver.named("coupling", parse_coupling);
  s.decomposition = solver.boolean("decomposition");
  solver.finish();

  auto output = root.section("output");
  cfg.output.dir = output.string("dir");
  cfg.output.export_pgm = output.boolean("export_pgm");
  output.finish();

  root.finish();

  if (!(cfg.noise.sigma >= 0.0)) {
    throw ConfigError("noise.sigma", fmt::format("noise.sigma must be >= 0, got {}", cfg.noise.sigma));
  }
  if (cfg.phantom.frames < 1) {
    throw ConfigError("phantom.frames", "phantom.frames must be >= 1");
  }
  s.validate();
  return cfg;
}

ExperimentConfig load_experiment(fs::path const &path)
{
  auto const bytes = detail::read_file(path);
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (json::parse_error const &e) {
    throw ConfigError("<root>", fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  if (doc.is_object() && doc.contains("manifest_version")) {
    if (!doc.contains("config")) {
      throw ConfigError("config", fmt::format("{}: manifest has no 'config' section", path.string()));
    }
    return experiment_from_json(doc["config"]);
  }
  return experiment_from_json(doc);
}

ExperimentResult run_experiment(ExperimentConfig const &cfg, IterationObserver const &observer)
{
  auto truth = generate_phantom(phantom_preset(cfg.phantom.preset, cfg.phantom.size, cfg.phantom.frames));
  MaskParams params;
  params.pattern = cfg.mask.pattern;
  params.shape = truth.shape();
  params.ratio = cfg.mask.ratio;
  params.seed = cfg.mask.seed;
  params.static_mask = cfg.mask.static_mask;
  auto mask = make_mask(params);
  auto kspace = measure(truth, mask, cfg.noise.sigma, cfg.noise.seed);
  auto const zf = zero_fill(kspace, mask);

  std::optional<SolveReport> report;
  switch (cfg.method) {
  case Method::Rdledm: report = rdledm_solve(kspace, mask, cfg.solver, &truth, observer); break;
  case Method::Baseline: report = baseline_tvnn_solve(kspace, mask, cfg.solver, &truth, observer); break;
  case Method::ZeroFill: break;
  }
  auto recon = report ? report->reconstruction : zf;
  double const p = psnr(truth, recon);
  double const r = rmse(truth, recon);
  double const zf_psnr = psnr(truth, zf);
  return ExperimentResult{std::move(truth), std::move(mask), std::move(kspace), std::move(recon), std::move(report),
                          p, r, zf_psnr};
}

std::vector<fs::path> export_pgm_frames(DynamicSequence const &x, fs::path const &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto const &v : x.values()) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  double const range = hi - lo;
  auto const s = x.shape();
  std::vector<fs::path> written;
  for (std::size_t t = 0; t < s.frames; ++t) {
    std::vector<std::uint8_t> bytes;
    auto const header = fmt::format("P5\n{} {}\n255\n", s.cols, s.rows);
    bytes.assign(header.begin(), header.end());
    for (auto const &v : x.frame(t)) {
      // Zero range (constant magnitude) maps to all-0 frames.
      double const level = range > 0.0 ? 255.0 * (std::abs(v) - lo) / range : 0.0;
      bytes.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(level), 0L, 255L)));
    }
    auto path = dir / fmt::format("frame_{:04d}.pgm", t);
    detail::write_file(path, bytes);
    written.push_back(std::move(path));
  }
  return written;
}

namespace {

void ensure_dir(fs::path const &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
}

void write_text(fs::path const &path, std::string const &text)
{
  detail::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

json finite_or_null(double v)
{
  if (std::isfinite(v)) {
    return v;
  }
  return nullptr;
}

} // namespace

void cmd_phantom(std::string const &preset, std::size_t size, std::size_t frames, fs::path const &out, std::ostream &log)
{
  auto const x = generate_phantom(phantom_preset(preset, size, frames));
  write_sequence(x, out);
  log << fmt::format("phantom {} {} -> {}\n", preset, to_string(x.shape()), out.string());
}

void cmd_mask(MaskParams const &params, fs::path const &out, std::ostream &log)
{
  auto const mask = make_mask(params);
  write_mask(mask, out);
  log << fmt::format("mask {} {} ratio {:.4f} (requested {}) -> {}\n", to_string(params.pattern),
                     to_string(mask.shape()), mask.ratio(), params.ratio, out.string());
}

void cmd_measure(fs::path const &seq, fs::path const &mask_path, double sigma, std::uint64_t seed, fs::path const &out,
                 std::ostream &log)
{
  auto const x = read_sequence(seq);
  auto const mask = read_mask(mask_path);
  auto const k = measure(x, mask, sigma, seed);
  write_sequence(k, out);
  log << fmt::format("measure {} sigma {} seed {} -> {}\n", to_string(k.shape()), sigma, seed, out.string());
}

ExperimentResult cmd_reconstruct(fs::path const &config_path, std::ostream &log)
{
  auto const cfg = load_experiment(config_path);
  auto const started = std::chrono::steady_clock::now();
  auto result = run_experiment(cfg);
  auto const total = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  fs::path const dir = cfg.output.dir;
  ensure_dir(dir);
  std::vector<std::string> outputs{"truth.dseq", "mask.mask", "kspace.dseq", "recon.dseq"};
  write_sequence(result.truth, dir / "truth.dseq");
  write_mask(result.mask, dir / "mask.mask");
  write_sequence(result.kspace, dir / "kspace.dseq");
  write_sequence(result.reconstruction, dir / "recon.dseq");

  if (result.report) {
    auto const &rep = *result.report;
    std::vector<MetricSeries> series{MetricSeries("relative_error")};
    if (!rep.psnr.empty()) {
      series.emplace_back("psnr_db");
      series.emplace_back("rmse");
    }
    for (std::size_t k = 0; k < rep.iterations; ++k) {
      double const index = static_cast<double>(k + 1);
      series[0].push(index, rep.relative_errors[k]);
      if (!rep.psnr.empty()) {
        series[1].push(index, rep.psnr[k]);
        series[2].push(index, rep.rmse[k]);
      }
    }
    write_text(dir / "series.csv", series_to_csv(series));
    outputs.emplace_back("series.csv");
  }
  if (cfg.output.export_pgm) {
    for (auto const &p : export_pgm_frames(result.reconstruction, dir / "frames")) {
      outputs.push_back(fs::relative(p, dir).generic_string());
    }
  }
  outputs.emplace_back("manifest.json");

  nlohmann::ordered_json manifest;
  manifest["manifest_version"] = kManifestVersion;
  manifest["tool"] = {{"name", "dmri"}, {"version", kVersion}};
  manifest["config"] = to_json(cfg);
  auto const s = result.truth.shape();
  manifest["resolved"] = {{"shape", {s.frames, s.rows, s.cols}},
                          {"achieved_ratio", result.mask.ratio()},
                          {"lipschitz", result.mask.count() > 0 ? 1.0 : 0.0},
                          {"rng", "mt19937_64 + splitmix64 sub-seeds"}};
  nlohmann::ordered_json res;
  res["psnr_db"] = finite_or_null(result.psnr);
  res["rmse"] = result.rmse;
  res["zero_fill_psnr_db"] = finite_or_null(result.zero_fill_psnr);
  if (result.report) {
    res["iterations"] = result.report->iterations;
    res["termination"] = to_string(result.report->termination);
    res["final_relative_error"] = finite_or_null(result.report->relative_errors.back());
  } else {
    res["iterations"] = 0;
    res["termination"] = "single-pass";
  }
  manifest["result"] = res;
  manifest["timing"] = {{"solve_seconds", result.report ? result.report->seconds : 0.0}, {"total_seconds", total}};
  manifest["outputs"] = outputs;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  log << fmt::format("reconstruct {} {} {} ratio {:.3f}: PSNR {:.2f} dB (zero-fill {:.2f} dB), RMSE {:.4f}", to_string(cfg.method),
                     to_string(s), to_string(cfg.mask.pattern), result.mask.ratio(), result.psnr, result.zero_fill_psnr,
                     result.rmse);
  if (result.report) {
    log << fmt::format(", {} iterations ({})", result.report->iterations, to_string(result.report->termination));
  }
  log << fmt::format(" -> {}\n", dir.string());
  return result;
}

void cmd_sweep(fs::path const &config_path, std::vector<double> const &ratios, std::ostream &log)
{
  if (ratios.empty()) {
    throw EmptyInputError("sweep needs at least one ratio");
  }
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    if (!(ratios[k] > ratios[k - 1])) {
      throw ValidationError(fmt::format("sweep ratios must be strictly increasing, got {} after {}", ratios[k], ratios[k - 1]));
    }
  }
  auto const base = load_experiment(config_path);
  fs::path const dir = base.output.dir;
  ensure_dir(dir);

  std::string table = "pattern,ratio,psnr_db,rmse\n";
  constexpr MaskPattern patterns[] = {MaskPattern::Cartesian, MaskPattern::Radial, MaskPattern::Random2D};
  for (std::size_t p = 0; p < std::size(patterns); ++p) {
    std::vector<ExperimentResult> results;
    for (std::size_t r = 0; r < ratios.size(); ++r) {
      auto cfg = base;
      cfg.mask.pattern = patterns[p];
      cfg.mask.ratio = ratios[r];
      cfg.mask.seed = derive_seed(base.mask.seed, p, r);
      results.push_back(run_experiment(cfg));
      log << fmt::format("sweep {} ratio {:.2f}: PSNR {:.2f} dB, RMSE {:.4f}\n", to_string(patterns[p]), ratios[r],
                         results.back().psnr, results.back().rmse);
    }
    std::vector<SweepEntry> entries;
    for (std::size_t r = 0; r < ratios.size(); ++r) {
      entries.push_back({ratios[r], results[r].reconstruction, results[r].truth});
    }
    auto const [psnr_series, rmse_series] = psnr_rmse_sweep(entries);
    for (std::size_t r = 0; r < ratios.size(); ++r) {
      table += fmt::format("{},{},{},{}\n", to_string(patterns[p]), format_value(ratios[r]),
                           format_value(psnr_series.points()[r].second), format_value(rmse_series.points()[r].second));
    }
    std::vector<MetricSeries> const pair{psnr_series, rmse_series};
    write_text(dir / fmt::format("sweep_{}.csv", to_string(patterns[p])), series_to_csv(pair));
  }
  write_text(dir / "sweep.csv", table);
  log << fmt::format("sweep {} cells -> {}\n", std::size(patterns) * ratios.size(), (dir / "sweep.csv").string());
}

void cmd_export(fs::path const &seq, fs::path const &out_dir, std::ostream &log)
{
  auto const x = read_sequence(seq);
  auto const files = export_pgm_frames(x, out_dir);
  log << fmt::format("export {} frames -> {}\n", files.size(), out_dir.string());
}

int exit_code_for(std::exception const &e)
{
  if (dynamic_cast<ValidationError const *>(&e) != nullptr || dynamic_cast<DimensionError const *>(&e) != nullptr) {
    return 2;
  }
  if (dynamic_cast<NumericalError const *>(&e) != nullptr || dynamic_cast<CallbackError const *>(&e) != nullptr) {
    return 3;
  }
  if (dynamic_cast<IoError const *>(&e) != nullptr || dynamic_cast<FormatError const *>(&e) != nullptr) {
    return 4;
  }
  return 1;
}

} // namespace dmri
