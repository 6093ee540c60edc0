#include "dmri/phantom.hpp"

#include "dmri/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace dmri {

PhantomSpec default_phantom_spec(std::size_t rows, std::size_t cols, std::size_t frames)
{
  PhantomSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.frames = frames;
  spec.ellipses = {
    {.center_row = 0.50, .center_col = 0.50, .semi_row = 0.42, .semi_col = 0.42, .intensity = 0.20},
    {.center_row = 0.40,
     .center_col = 0.40,
     .semi_row = 0.12,
     .semi_col = 0.10,
     .intensity = 0.90,
     .motion_axis = MotionAxis::Row,
     .motion_amplitude = 0.05},
    {.center_row = 0.60,
     .center_col = 0.62,
     .semi_row = 0.08,
     .semi_col = 0.08,
     .intensity = 0.60,
     .motion_axis = MotionAxis::Col,
     .motion_amplitude = 0.04,
     .motion_phase = std::numbers::pi / 2},
    {.center_row = 0.50,
     .center_col = 0.30,
     .semi_row = 0.06,
     .semi_col = 0.06,
     .intensity = 0.30,
     .ramp_amplitude = 0.50,
     .ramp_rate = 3.0},
  };
  return spec;
}

namespace {

struct Placed
{
  double ci, cj, ai, aj, value;
};

Placed place(Ellipse const &e, PhantomSpec const &spec, std::size_t t)
{
  double const m = static_cast<double>(spec.rows);
  double const n = static_cast<double>(spec.cols);
  double const phase = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(spec.frames);
  Placed p{e.center_row * m, e.center_col * n, e.semi_row * m, e.semi_col * n, e.intensity};
  double const swing = std::sin(phase + e.motion_phase);
  if (e.motion_axis == MotionAxis::Row) {
    p.ci += e.motion_amplitude * m * swing;
  } else if (e.motion_axis == MotionAxis::Col) {
    p.cj += e.motion_amplitude * n * swing;
  }
  p.value += e.ramp_amplitude * (1.0 - std::exp(-e.ramp_rate * static_cast<double>(t) / static_cast<double>(spec.frames)));
  return p;
}

} // namespace

void validate(PhantomSpec const &spec)
{
  if (spec.frames < 1 || spec.rows < 2 || spec.cols < 2) {
    throw ValidationError(fmt::format("phantom needs T >= 1 and m, n >= 2, got {}x{}x{}", spec.frames, spec.rows, spec.cols));
  }
  for (std::size_t k = 0; k < spec.ellipses.size(); ++k) {
    auto const &e = spec.ellipses[k];
    if (!(e.semi_row > 0.0 && e.semi_col > 0.0)) {
      throw ValidationError(fmt::format("ellipse {} has a non-positive semi-axis", k));
    }
    for (std::size_t t = 0; t < spec.frames; ++t) {
      auto const p = place(e, spec, t);
      if (!(p.value >= 0.0 && p.value <= 1.0)) {
        throw ValidationError(fmt::format("ellipse {} intensity {} outside [0, 1] at frame {}", k, p.value, t));
      }
      double const last_row = static_cast<double>(spec.rows - 1);
      double const last_col = static_cast<double>(spec.cols - 1);
      if (p.ci - p.ai < 0.0 || p.ci + p.ai > last_row || p.cj - p.aj < 0.0 || p.cj + p.aj > last_col) {
        throw ValidationError(fmt::format("ellipse {} leaves the {}x{} grid at frame {}", k, spec.rows, spec.cols, t));
      }
    }
  }
}

DynamicSequence generate_phantom(PhantomSpec const &spec)
{
  validate(spec);
  Shape const shape{spec.frames, spec.rows, spec.cols};
  std::vector<Cx> values(shape.size());
  for (std::size_t t = 0; t < spec.frames; ++t) {
    auto *frame = values.data() + t * shape.frame_size();
    for (auto const &e : spec.ellipses) {
      auto const p = place(e, spec, t);
      for (std::size_t i = 0; i < spec.rows; ++i) {
        double const di = (static_cast<double>(i) - p.ci) / p.ai;
        for (std::size_t j = 0; j < spec.cols; ++j) {
          double const dj = (static_cast<double>(j) - p.cj) / p.aj;
          if (di * di + dj * dj <= 1.0) {
            frame[i * spec.cols + j] = Cx{p.value, 0.0};
          }
        }
      }
    }
  }
  return DynamicSequence(shape, std::move(values));
}

std::vector<PhantomPreset> phantom_presets(std::size_t size)
{
  if (size < 16) {
    throw ValidationError(fmt::format("phantom size must be >= 16, got {}", size));
  }
  return {
    {"perf-like", default_phantom_spec(size, size, 40)},
    {"cine-like", default_phantom_spec(size, size, 20)},
    {"cerebral-like", default_phantom_spec(size, size, 60)},
  };
}

PhantomSpec phantom_preset(std::string const &name, std::size_t size, std::size_t frames)
{
  for (auto &preset : phantom_presets(size)) {
    if (preset.name == name) {
      if (frames > 0) {
        preset.spec.frames = frames;
      }
      return preset.spec;
    }
  }
  throw LookupError(fmt::format("unknown phantom preset '{}' (expected perf-like, cine-like or cerebral-like)", name));
}

} // namespace dmri
