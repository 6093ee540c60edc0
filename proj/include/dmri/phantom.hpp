#pragma once

#include "dmri/sequence.hpp"

#include <string>
#include <vector>

namespace dmri {

enum struct MotionAxis
{
  None,
  Row,
  Col
};

/**
 * One filled ellipse. Positions and semi-axes are fractions of the grid
 * (rows for the first component, cols for the second). Per frame t of T:
 *
 *   center += amplitude * len(axis) * sin(2 pi t / T + phase)   along `motion_axis`
 *   value   = intensity + ramp_amplitude * (1 - exp(-ramp_rate * t / T))
 */
struct Ellipse
{
  double center_row;
  double center_col;
  double semi_row;
  double semi_col;
  double intensity;
  MotionAxis motion_axis = MotionAxis::None;
  double motion_amplitude = 0.0;
  double motion_phase = 0.0;
  double ramp_amplitude = 0.0;
  double ramp_rate = 0.0;
};

struct PhantomSpec
{
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t frames = 20;
  std::vector<Ellipse> ellipses; // painted in order, later ones overwrite
};

/// Background plus a moving bright ellipse, a swinging ellipse and an enhancing "perfusion" disk.
PhantomSpec default_phantom_spec(std::size_t rows, std::size_t cols, std::size_t frames);

/// Throws ValidationError if an intensity leaves [0, 1] or an ellipse leaves the grid in any frame.
void validate(PhantomSpec const &spec);

/// Real-valued, deterministic rendering of the spec.
DynamicSequence generate_phantom(PhantomSpec const &spec);

struct PhantomPreset
{
  std::string name;
  PhantomSpec spec;
};

/// "perf-like" (T=40), "cine-like" (T=20), "cerebral-like" (T=60) at m = n = size.
std::vector<PhantomPreset> phantom_presets(std::size_t size = 128);

/// Preset lookup; `frames` of 0 keeps the preset's T. Unknown names raise LookupError.
PhantomSpec phantom_preset(std::string const &name, std::size_t size, std::size_t frames = 0);

} // namespace dmri
