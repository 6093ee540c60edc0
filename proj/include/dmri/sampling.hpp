#pragma once

#include "dmri/sequence.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dmri {

enum struct MaskPattern
{
  Cartesian,
  Radial,
  Random2D
};

std::string_view to_string(MaskPattern p);
MaskPattern parse_mask_pattern(std::string_view name);

/// Everything make_mask depends on. Fractions are the variable-density knobs.
struct MaskParams
{
  MaskPattern pattern = MaskPattern::Cartesian;
  Shape shape;
  double ratio = 1.0;
  std::uint64_t seed = 0;
  bool static_mask = false;           // one draw replicated over all frames
  double center_band_fraction = 0.08; // cartesian: always-on central rows, ceil(f m)
  double density_width_fraction = 0.15; // cartesian: Gaussian row weight width, f m
  double center_block_fraction = 0.04;  // random2d: always-on central block, ceil(f m) x ceil(f n)
};

/// How a mask was generated; absent for masks read from disk.
struct MaskOrigin
{
  MaskPattern pattern;
  double ratio;
  std::uint64_t seed;
};

/**
 * Binary k-space selector, one indicator per (t, i, j). Stored in centered
 * coordinates: k-space DC is at (m/2, n/2), as masks are usually drawn.
 */
class SamplingMask
{
public:
  SamplingMask(Shape shape, std::vector<std::uint8_t> bits, std::optional<MaskOrigin> origin = std::nullopt);

  Shape shape() const { return shape_; }
  std::vector<std::uint8_t> const &bits() const { return bits_; }
  std::optional<MaskOrigin> const &origin() const { return origin_; }

  bool at(std::size_t t, std::size_t i, std::size_t j) const { return bits_[(t * shape_.rows + i) * shape_.cols + j] != 0; }
  /// Whether DFT bin (u, v) of frame t is sampled (bin (0, 0) is DC).
  bool sampled_bin(std::size_t t, std::size_t u, std::size_t v) const
  {
    return at(t, (u + shape_.rows / 2) % shape_.rows, (v + shape_.cols / 2) % shape_.cols);
  }

  std::size_t count() const;
  double ratio() const;

  bool operator==(SamplingMask const &other) const { return shape_ == other.shape_ && bits_ == other.bits_; }

private:
  Shape shape_;
  std::vector<std::uint8_t> bits_;
  std::optional<MaskOrigin> origin_;
};

inline constexpr double kRatioTolerance = 0.02;

SamplingMask make_mask(MaskParams const &params);
SamplingMask make_mask(MaskPattern pattern, Shape shape, double ratio, std::uint64_t seed);

// MaskFile: "MASK1\n", "T m n\n", then T*m*n bytes of 0/1.
void write_mask(SamplingMask const &mask, std::filesystem::path const &path);
SamplingMask read_mask(std::filesystem::path const &path);

/// Noisy acquisition: per frame DFT, add i.i.d. N(0, sigma^2) to real and imaginary parts, then mask.
DynamicSequence measure(DynamicSequence const &x, SamplingMask const &mask, double sigma, std::uint64_t seed);

/// A = R F
DynamicSequence forward_op(DynamicSequence const &x, SamplingMask const &mask);
/// A^H = F^H R
DynamicSequence adjoint_op(DynamicSequence const &b, SamplingMask const &mask);
DynamicSequence zero_fill(DynamicSequence const &b, SamplingMask const &mask);

/// Zeroes unsampled bins of a k-space stack.
DynamicSequence apply_mask(DynamicSequence const &k, SamplingMask const &mask);

} // namespace dmri
