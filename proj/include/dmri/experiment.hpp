#pragma once

#include "dmri/sampling.hpp"
#include "dmri/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dmri {

enum struct Method
{
  Rdledm,
  Baseline,
  ZeroFill
};

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/**
 * One phantom -> mask -> measure -> reconstruct run. Serialized as JSON with
 * exactly these sections and keys; missing or unknown keys are rejected.
 *
 *   phantom: preset, size, frames
 *   mask:    pattern, ratio, seed, static_mask
 *   noise:   sigma, seed
 *   solver:  method, lambda1, lambda2, tau, t1, t2, epsilon_threshold, max_iters,
 *            min_iters, tol_re, record_metrics, epsilon_sign, coupling, decomposition
 *   output:  dir, export_pgm
 */
struct ExperimentConfig
{
  struct Phantom
  {
    std::string preset = "cine-like";
    std::size_t size = 64;
    std::size_t frames = 8;
  } phantom;

  struct Mask
  {
    MaskPattern pattern = MaskPattern::Cartesian;
    double ratio = 0.25;
    std::uint64_t seed = 7;
    bool static_mask = false;
  } mask;

  struct Noise
  {
    double sigma = 0.05;
    std::uint64_t seed = 11;
  } noise;

  Method method = Method::Rdledm;
  SolverConfig solver;

  struct Output
  {
    std::string dir = "out";
    bool export_pgm = false;
  } output;
};

nlohmann::ordered_json to_json(ExperimentConfig const &cfg);
ExperimentConfig experiment_from_json(nlohmann::json const &doc);

/// Reads a config file; a run manifest is accepted too and replays its embedded config.
ExperimentConfig load_experiment(std::filesystem::path const &path);

struct ExperimentResult
{
  DynamicSequence truth;
  SamplingMask mask;
  DynamicSequence kspace;
  DynamicSequence reconstruction;
  std::optional<SolveReport> report; // absent for zero-fill
  double psnr = 0.0;
  double rmse = 0.0;
  double zero_fill_psnr = 0.0;
};

/// Runs the pipeline in memory, with no files written.
ExperimentResult run_experiment(ExperimentConfig const &cfg, IterationObserver const &observer = {});

/// Writes one binary PGM (P5, maxval 255) per frame of |x|, min-max normalized over the whole sequence.
std::vector<std::filesystem::path> export_pgm_frames(DynamicSequence const &x, std::filesystem::path const &dir);

// Subcommands. Each writes its artifacts and a short summary to `log`.
void cmd_phantom(std::string const &preset, std::size_t size, std::size_t frames, std::filesystem::path const &out,
                 std::ostream &log);
void cmd_mask(MaskParams const &params, std::filesystem::path const &out, std::ostream &log);
void cmd_measure(std::filesystem::path const &seq, std::filesystem::path const &mask, double sigma, std::uint64_t seed,
                 std::filesystem::path const &out, std::ostream &log);
ExperimentResult cmd_reconstruct(std::filesystem::path const &config, std::ostream &log);
void cmd_sweep(std::filesystem::path const &config, std::vector<double> const &ratios, std::ostream &log);
void cmd_export(std::filesystem::path const &seq, std::filesystem::path const &out_dir, std::ostream &log);

/// Process exit code for an exception escaping a subcommand: 2 validation, 3 numerical, 4 I/O.
int exit_code_for(std::exception const &e);

} // namespace dmri
