#include "dmri/error.hpp"
#include "dmri/experiment.hpp"
#include "dmri/phantom.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dmri;
namespace fs = std::filesystem;
using Catch::Matchers::WithinRel;

namespace {

fs::path fresh_dir(std::string const &name)
{
  auto dir = fs::temp_directory_path() / "dmri-test-experiment" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(fs::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + p.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(fs::path const &p, std::string const &text)
{
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

std::vector<std::string> lines_of(std::string const &text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

ExperimentConfig quick_config(fs::path const &dir)
{
  ExperimentConfig cfg;
  cfg.phantom = {"cine-like", 32, 3};
  cfg.mask.ratio = 0.35;
  cfg.noise.sigma = 0.02;
  cfg.solver.max_iters = 15;
  cfg.output.dir = dir.string();
  return cfg;
}

fs::path write_config(ExperimentConfig const &cfg, fs::path const &path)
{
  spit(path, to_json(cfg).dump(2));
  return path;
}

// Runs experiment_from_json on `doc` and returns the offending key.
std::string config_error_key(nlohmann::json const &doc)
{
  try {
    experiment_from_json(doc);
  } catch (ConfigError const &e) {
    return e.key();
  }
  return "";
}

} // namespace

TEST_CASE("method names", "[experiment]")
{
  for (auto m : {Method::Rdledm, Method::Baseline, Method::ZeroFill}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("admm"), LookupError);
}

TEST_CASE("config json", "[experiment][config]")
{
  ExperimentConfig cfg;
  auto const doc = to_json(cfg);

  SECTION("round trip")
  {
    CHECK(to_json(experiment_from_json(doc)) == doc);
    auto odd = cfg;
    odd.solver.epsilon_threshold = std::numeric_limits<double>::infinity();
    odd.mask.pattern = MaskPattern::Radial;
    odd.method = Method::Baseline;
    odd.solver.coupling = Coupling::Additive;
    auto const odd_doc = to_json(odd);
    CHECK(odd_doc["solver"]["epsilon_threshold"] == "inf");
    auto const back = experiment_from_json(odd_doc);
    CHECK(std::isinf(back.solver.epsilon_threshold));
    CHECK(back.mask.pattern == MaskPattern::Radial);
    CHECK(back.method == Method::Baseline);
    CHECK(to_json(back) == odd_doc);
  }
  SECTION("section order")
  {
    std::vector<std::string> keys;
    for (auto const &item : doc.items()) {
      keys.push_back(item.key());
    }
    CHECK(keys == std::vector<std::string>{"phantom", "mask", "noise", "solver", "output"});
  }

  nlohmann::json plain = nlohmann::json::parse(doc.dump());
  SECTION("missing key")
  {
    plain["solver"].erase("tau");
    CHECK(config_error_key(plain) == "solver.tau");
    plain.erase("noise");
    CHECK(config_error_key(plain) == "noise");
  }
  SECTION("unknown key")
  {
    plain["mask"]["density"] = 0.5;
    CHECK(config_error_key(plain) == "mask.density");
    plain = nlohmann::json::parse(doc.dump());
    plain["extra"] = {};
    CHECK(config_error_key(plain) == "extra");
  }
  SECTION("wrong type")
  {
    plain["phantom"]["size"] = "64";
    CHECK(config_error_key(plain) == "phantom.size");
    plain = nlohmann::json::parse(doc.dump());
    plain["mask"]["static_mask"] = 1;
    CHECK(config_error_key(plain) == "mask.static_mask");
    plain = nlohmann::json::parse(doc.dump());
    plain["noise"]["seed"] = -3;
    CHECK(config_error_key(plain) == "noise.seed");
  }
  SECTION("bad values")
  {
    plain["mask"]["pattern"] = "spiral";
    CHECK_THROWS_AS(experiment_from_json(plain), ValidationError);
    plain = nlohmann::json::parse(doc.dump());
    plain["solver"]["lambda1"] = -0.1;
    CHECK_THROWS_AS(experiment_from_json(plain), ValidationError);
  }
  SECTION("not an object") { CHECK(config_error_key(nlohmann::json::array()) == "<root>"); }
}

TEST_CASE("config file loading", "[experiment][config]")
{
  auto const dir = fresh_dir("load");
  spit(dir / "broken.json", "{\"phantom\": ");
  CHECK_THROWS_AS(load_experiment(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_experiment(dir / "absent.json"), IoError);
  spit(dir / "manifest.json", "{\"manifest_version\": 1}");
  CHECK_THROWS_AS(load_experiment(dir / "manifest.json"), ConfigError);
}

TEST_CASE("golden relative-error trace", "[experiment][regression]")
{
  auto const cfg = load_experiment(fs::path(DMRI_TEST_DATA) / "golden_config.json");
  auto const result = run_experiment(cfg);
  REQUIRE(result.report.has_value());
  auto const rows = lines_of(slurp(fs::path(DMRI_TEST_DATA) / "golden_series_rdledm_32x32x4.csv"));
  REQUIRE(rows.size() == 41);
  CHECK(rows[0] == "index,relative_error,psnr_db,rmse");
  REQUIRE(result.report->relative_errors.size() == 40);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    auto const first = rows[k].find(',');
    auto const second = rows[k].find(',', first + 1);
    double const expected = std::stod(rows[k].substr(first + 1, second - first - 1));
    CHECK_THAT(result.report->relative_errors[k - 1], WithinRel(expected, 1e-9));
  }
}

TEST_CASE("reconstruct command", "[experiment][cli]")
{
  auto const dir = fresh_dir("reconstruct");
  auto const out = dir / "run";
  auto cfg = quick_config(out);
  cfg.output.export_pgm = true;
  auto const config_path = write_config(cfg, dir / "config.json");
  std::ostringstream log;
  auto const result = cmd_reconstruct(config_path, log);
  CHECK(log.str().find("PSNR") != std::string::npos);

  for (auto const *name : {"truth.dseq", "mask.mask", "kspace.dseq", "recon.dseq", "series.csv", "manifest.json",
                           "frames/frame_0000.pgm", "frames/frame_0002.pgm"}) {
    CHECK(fs::exists(out / name));
  }
  CHECK(read_sequence(out / "recon.dseq") == result.reconstruction);
  auto const series = lines_of(slurp(out / "series.csv"));
  CHECK(series.size() == 16);
  CHECK(series[0] == "index,relative_error,psnr_db,rmse");

  auto const manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["manifest_version"] == 1);
  CHECK(manifest["config"] == nlohmann::json::parse(to_json(cfg).dump()));
  CHECK(manifest["result"]["iterations"] == 15);
  CHECK(manifest["resolved"]["shape"] == nlohmann::json::array({3, 32, 32}));
  CHECK(manifest["outputs"].size() == 9);

  SECTION("replaying the manifest reproduces the run")
  {
    auto const recon = slurp(out / "recon.dseq");
    auto const csv = slurp(out / "series.csv");
    fs::copy_file(out / "manifest.json", dir / "replay.json");
    fs::remove_all(out);
    cmd_reconstruct(dir / "replay.json", log);
    CHECK(slurp(out / "recon.dseq") == recon);
    CHECK(slurp(out / "series.csv") == csv);
  }
  SECTION("zero filling writes no iteration series")
  {
    auto zf = cfg;
    zf.method = Method::ZeroFill;
    zf.output.dir = (dir / "zf").string();
    zf.output.export_pgm = false;
    auto const r = cmd_reconstruct(write_config(zf, dir / "zf.json"), log);
    CHECK_FALSE(r.report.has_value());
    CHECK_FALSE(fs::exists(dir / "zf" / "series.csv"));
    CHECK(fs::exists(dir / "zf" / "recon.dseq"));
    CHECK(r.psnr == r.zero_fill_psnr);
    CHECK(result.psnr > r.psnr);
  }
}

TEST_CASE("sweep command", "[experiment][cli]")
{
  auto const dir = fresh_dir("sweep");
  auto cfg = quick_config(dir / "out");
  cfg.solver.max_iters = 10;
  cfg.solver.min_iters = 10;
  auto const config_path = write_config(cfg, dir / "config.json");
  std::ostringstream log;
  cmd_sweep(config_path, {0.2, 0.35, 0.5, 0.65}, log);

  auto const table = lines_of(slurp(dir / "out" / "sweep.csv"));
  REQUIRE(table.size() == 13);
  CHECK(table[0] == "pattern,ratio,psnr_db,rmse");
  CHECK(table[1].starts_with("cartesian,0.20000000000000001,"));
  CHECK(table[5].starts_with("radial,0.20000000000000001,"));
  CHECK(table[12].starts_with("random2d,0.65000000000000002,"));
  for (auto const *p : {"cartesian", "radial", "random2d"}) {
    auto const per = lines_of(slurp(dir / "out" / fmt::format("sweep_{}.csv", p)));
    CHECK(per.size() == 5);
    CHECK(per[0] == "index,psnr_db,rmse");
  }

  CHECK_THROWS_AS(cmd_sweep(config_path, {}, log), EmptyInputError);
  CHECK_THROWS_AS(cmd_sweep(config_path, {0.5, 0.35}, log), ValidationError);
}

TEST_CASE("file commands", "[experiment][cli]")
{
  auto const dir = fresh_dir("files");
  std::ostringstream log;
  cmd_phantom("perf-like", 32, 3, dir / "x.dseq", log);
  auto const x = read_sequence(dir / "x.dseq");
  CHECK(x == generate_phantom(phantom_preset("perf-like", 32, 3)));

  MaskParams params{.pattern = MaskPattern::Radial, .shape = {3, 32, 32}, .ratio = 0.4, .seed = 5};
  cmd_mask(params, dir / "m.mask", log);
  auto const mask = read_mask(dir / "m.mask");
  CHECK(mask == make_mask(params));

  cmd_measure(dir / "x.dseq", dir / "m.mask", 0.05, 9, dir / "k.dseq", log);
  CHECK(read_sequence(dir / "k.dseq") == measure(x, mask, 0.05, 9));

  cmd_export(dir / "x.dseq", dir / "pgm", log);
  std::size_t count = 0;
  for (auto const &entry : fs::directory_iterator(dir / "pgm")) {
    CHECK(entry.path().extension() == ".pgm");
    ++count;
  }
  CHECK(count == 3);
  auto const pgm = slurp(dir / "pgm" / "frame_0001.pgm");
  CHECK(pgm.starts_with("P5\n32 32\n255\n"));
  CHECK(pgm.size() == std::string("P5\n32 32\n255\n").size() + 32 * 32);

  CHECK_THROWS_AS(cmd_phantom("nope", 32, 3, dir / "y.dseq", log), LookupError);
  CHECK_THROWS_AS(cmd_measure(dir / "x.dseq", dir / "missing.mask", 0.05, 9, dir / "k2.dseq", log), IoError);
}

TEST_CASE("pgm export", "[experiment][io]")
{
  auto const dir = fresh_dir("pgm");
  SECTION("constant magnitude gives black frames")
  {
    auto const files = export_pgm_frames(DynamicSequence::constant({2, 4, 5}, Cx{0, 0.7}), dir);
    REQUIRE(files.size() == 2);
    auto const bytes = slurp(files[1]);
    std::string const header = "P5\n5 4\n255\n";
    CHECK(bytes.substr(0, header.size()) == header);
    CHECK(bytes.substr(header.size()) == std::string(20, '\0'));
  }
  SECTION("global min-max normalization")
  {
    auto const files = export_pgm_frames(DynamicSequence({2, 1, 2}, {0.0, 1.0, 0.5, 2.0}), dir);
    auto const a = slurp(files[0]);
    auto const b = slurp(files[1]);
    std::string const header = "P5\n2 1\n255\n";
    CHECK(static_cast<unsigned char>(a[header.size()]) == 0);
    CHECK(static_cast<unsigned char>(a[header.size() + 1]) == 128);
    CHECK(static_cast<unsigned char>(b[header.size()]) == 64);
    CHECK(static_cast<unsigned char>(b[header.size() + 1]) == 255);
  }
}

TEST_CASE("exit codes", "[experiment][cli]")
{
  CHECK(exit_code_for(ValidationError("x")) == 2);
  CHECK(exit_code_for(ConfigError("a.b", "x")) == 2);
  CHECK(exit_code_for(DimensionError("x")) == 2);
  CHECK(exit_code_for(DivergenceError(3, "x")) == 3);
  CHECK(exit_code_for(CallbackError(3, "x")) == 3);
  CHECK(exit_code_for(IoError("x")) == 4);
  CHECK(exit_code_for(FormatError(FormatFault::Truncated, "x")) == 4);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
}
