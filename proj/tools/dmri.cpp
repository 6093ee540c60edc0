#include "dmri/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

int main(int argc, char **argv)
{
  CLI::App app{"Dynamic MRI compressed-sensing toolkit: phantom, masks, k-space simulation, reconstruction"};
  app.require_subcommand(1);

  std::string preset;
  std::size_t size = 128;
  std::size_t frames = 0;
  std::string out;
  auto *phantom = app.add_subcommand("phantom", "Write a synthetic dynamic phantom as a sequence file");
  phantom->add_option("--preset", preset, "perf-like | cine-like | cerebral-like")->required();
  phantom->add_option("--size", size, "rows = cols")->capture_default_str();
  phantom->add_option("--frames", frames, "frame count (default: preset)");
  phantom->add_option("--out", out)->required();

  dmri::MaskParams mask_params;
  std::string pattern;
  auto *mask = app.add_subcommand("mask", "Write an undersampling mask file");
  mask->add_option("--pattern", pattern, "cartesian | radial | random2d")->required();
  mask->add_option("--rows", mask_params.shape.rows)->required();
  mask->add_option("--cols", mask_params.shape.cols)->required();
  mask->add_option("--frames", mask_params.shape.frames)->required();
  mask->add_option("--ratio", mask_params.ratio)->required();
  mask->add_option("--seed", mask_params.seed)->required();
  mask->add_flag("--static-mask", mask_params.static_mask, "one draw for every frame");
  mask->add_option("--out", out)->required();

  std::string seq, mask_path;
  double sigma = 0.05;
  std::uint64_t seed = 0;
  auto *measure = app.add_subcommand("measure", "Simulate noisy undersampled k-space");
  measure->add_option("--seq", seq)->required();
  measure->add_option("--mask", mask_path)->required();
  measure->add_option("--sigma", sigma)->capture_default_str();
  measure->add_option("--seed", seed)->required();
  measure->add_option("--out", out)->required();

  std::string config;
  auto *reconstruct = app.add_subcommand("reconstruct", "Run one experiment from a JSON config or run manifest");
  reconstruct->add_option("--config", config)->required();

  std::vector<double> ratios;
  auto *sweep = app.add_subcommand("sweep", "PSNR/RMSE over sampling ratios for every mask pattern");
  sweep->add_option("--config", config)->required();
  sweep->add_option("--ratios", ratios, "comma separated, increasing")->required()->delimiter(',');

  std::string out_dir;
  auto *export_cmd = app.add_subcommand("export", "Write per-frame magnitude PGM images");
  export_cmd->add_option("--seq", seq)->required();
  export_cmd->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*phantom) {
      dmri::cmd_phantom(preset, size, frames, out, std::cout);
    } else if (*mask) {
      mask_params.pattern = dmri::parse_mask_pattern(pattern);
      dmri::cmd_mask(mask_params, out, std::cout);
    } else if (*measure) {
      dmri::cmd_measure(seq, mask_path, sigma, seed, out, std::cout);
    } else if (*reconstruct) {
      dmri::cmd_reconstruct(config, std::cout);
    } else if (*sweep) {
      dmri::cmd_sweep(config, ratios, std::cout);
    } else if (*export_cmd) {
      dmri::cmd_export(seq, out_dir, std::cout);
    }
  } catch (std::exception const &e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return dmri::exit_code_for(e);
  }
  return 0;
}
