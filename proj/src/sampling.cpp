#include "dmri/sampling.hpp"

#include "dmri/error.hpp"
#include "dmri/random.hpp"
#include "dmri/transforms.hpp"
#include "file_header.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dmri {

std::string_view to_string(MaskPattern p)
{
  switch (p) {
  case MaskPattern::Cartesian: return "cartesian";
  case MaskPattern::Radial: return "radial";
  case MaskPattern::Random2D: return "random2d";
  }
  return "?";
}

MaskPattern parse_mask_pattern(std::string_view name)
{
  for (auto p : {MaskPattern::Cartesian, MaskPattern::Radial, MaskPattern::Random2D}) {
    if (name == to_string(p)) {
      return p;
    }
  }
  throw LookupError(fmt::format("unknown mask pattern '{}' (expected cartesian, radial or random2d)", name));
}

SamplingMask::SamplingMask(Shape shape, std::vector<std::uint8_t> bits, std::optional<MaskOrigin> origin)
  : shape_{shape}
  , bits_{std::move(bits)}
  , origin_{origin}
{
  if (shape_.frames < 1 || shape_.rows < 1 || shape_.cols < 1 || bits_.size() != shape_.size()) {
    throw DimensionError(fmt::format("mask shape {} does not match {} bits", to_string(shape_), bits_.size()));
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
    throw ValidationError("mask values must be 0 or 1");
  }
}

std::size_t SamplingMask::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

double SamplingMask::ratio() const { return static_cast<double>(count()) / static_cast<double>(bits_.size()); }

namespace {

// Stream tags keep the per-pattern and noise generators independent.
constexpr std::uint64_t kCartesianStream = 0x636172746573ULL;
constexpr std::uint64_t kRadialStream = 0x72616469616cULL;
constexpr std::uint64_t kRandomStream = 0x72616e643264ULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

// ceil(f * m) without 0.08 * 100 = 8.000000000000002 rounding up to 9.
std::size_t ceil_fraction(double f, std::size_t m)
{
  return static_cast<std::size_t>(std::ceil(f * static_cast<double>(m) - 1e-9));
}

std::size_t rounded_count(double ratio, std::size_t total)
{
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(total)));
}

std::uint64_t frame_seed(MaskParams const &p, std::uint64_t stream, std::size_t t)
{
  return derive_seed(p.seed, stream, p.static_mask ? 0 : t);
}

void cartesian_frame(MaskParams const &p, std::size_t t, std::uint8_t *frame)
{
  auto const m = p.shape.rows;
  auto const n = p.shape.cols;
  auto const band = std::min(m, std::max<std::size_t>(1, ceil_fraction(p.center_band_fraction, m)));
  auto const target = rounded_count(p.ratio, m);
  if (target < band) {
    throw InfeasibleRatioError(fmt::format(
      "cartesian ratio {} selects {} of {} rows, below the {} mandatory center rows", p.ratio, target, m, band));
  }

  std::vector<bool> chosen(m, false);
  auto const first = m / 2 - band / 2;
  for (std::size_t i = first; i < first + band; ++i) {
    chosen[i] = true;
  }

  double const width = p.density_width_fraction * static_cast<double>(m);
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) {
    double const d = static_cast<double>(i) - static_cast<double>(m / 2);
    weight[i] = std::exp(-d * d / (2.0 * width * width));
  }

  Rng rng(frame_seed(p, kCartesianStream, t));
  for (std::size_t picked = band; picked < target; ++picked) {
    double total = 0.0;
    std::size_t last = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (!chosen[i]) {
        total += weight[i];
        last = i;
      }
    }
    double const u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = last;
    for (std::size_t i = 0; i < m; ++i) {
      if (!chosen[i]) {
        acc += weight[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (chosen[i]) {
      std::fill_n(frame + i * n, n, std::uint8_t{1});
    }
  }
}

void random2d_frame(MaskParams const &p, std::size_t t, std::uint8_t *frame)
{
  auto const m = p.shape.rows;
  auto const n = p.shape.cols;
  auto const br = std::min(m, std::max<std::size_t>(1, ceil_fraction(p.center_block_fraction, m)));
  auto const bc = std::min(n, std::max<std::size_t>(1, ceil_fraction(p.center_block_fraction, n)));
  auto const target = rounded_count(p.ratio, m * n);
  if (target < br * bc) {
    throw InfeasibleRatioError(fmt::format(
      "random2d ratio {} selects {} samples, below the {}x{} mandatory center block", p.ratio, target, br, bc));
  }

  auto const r0 = m / 2 - br / 2;
  auto const c0 = n / 2 - bc / 2;
  std::vector<std::size_t> candidates;
  candidates.reserve(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i >= r0 && i < r0 + br && j >= c0 && j < c0 + bc) {
        frame[i * n + j] = 1;
      } else {
        candidates.push_back(i * n + j);
      }
    }
  }

  Rng rng(frame_seed(p, kRandomStream, t));
  auto const need = target - br * bc;
  for (std::size_t k = 0; k < need; ++k) {
    auto const swap_with = k + static_cast<std::size_t>(rng.below(candidates.size() - k));
    std::swap(candidates[k], candidates[swap_with]);
    frame[candidates[k]] = 1;
  }
}

// Bresenham from (r0, c0) to (r1, c1), keeping in-grid pixels.
void draw_line(long r0, long c0, long r1, long c1, std::size_t m, std::size_t n, std::uint8_t *frame)
{
  long const dr = std::abs(r1 - r0);
  long const dc = std::abs(c1 - c0);
  long const sr = r0 < r1 ? 1 : -1;
  long const sc = c0 < c1 ? 1 : -1;
  long err = dc - dr;
  while (true) {
    if (r0 >= 0 && c0 >= 0 && r0 < static_cast<long>(m) && c0 < static_cast<long>(n)) {
      frame[static_cast<std::size_t>(r0) * n + static_cast<std::size_t>(c0)] = 1;
    }
    if (r0 == r1 && c0 == c1) {
      break;
    }
    long const e2 = 2 * err;
    if (e2 > -dr) {
      err -= dr;
      c0 += sc;
    }
    if (e2 < dc) {
      err += dc;
      r0 += sr;
    }
  }
}

void radial_frame(std::size_t spokes, double rotation, std::size_t m, std::size_t n, std::uint8_t *frame)
{
  auto const cr = static_cast<long>(m / 2);
  auto const cc = static_cast<long>(n / 2);
  double const reach = static_cast<double>(m + n);
  for (std::size_t k = 0; k < spokes; ++k) {
    double const theta = (static_cast<double>(k) + rotation) * std::numbers::pi / static_cast<double>(spokes);
    auto const dr = std::lround(reach * std::sin(theta));
    auto const dc = std::lround(reach * std::cos(theta));
    // Two half-spokes from the center so every spoke passes through DC.
    draw_line(cr, cc, cr + dr, cc + dc, m, n, frame);
    draw_line(cr, cc, cr - dr, cc - dc, m, n, frame);
  }
}

std::vector<std::uint8_t> radial_mask(MaskParams const &p, std::size_t spokes, std::vector<double> const &rotations)
{
  auto const fs = p.shape.frame_size();
  std::vector<std::uint8_t> bits(p.shape.size(), 0);
  for (std::size_t t = 0; t < p.shape.frames; ++t) {
    radial_frame(spokes, rotations[t], p.shape.rows, p.shape.cols, bits.data() + t * fs);
  }
  return bits;
}

double fraction_on(std::vector<std::uint8_t> const &bits)
{
  return static_cast<double>(std::count(bits.begin(), bits.end(), 1)) / static_cast<double>(bits.size());
}

std::vector<std::uint8_t> make_radial(MaskParams const &p)
{
  std::vector<double> rotations(p.shape.frames);
  for (std::size_t t = 0; t < p.shape.frames; ++t) {
    rotations[t] = Rng(frame_seed(p, kRadialStream, t)).uniform();
  }

  // Coverage grows (almost) monotonically with the spoke count: bisect for the
  // first count reaching the target, then take the closest nearby count.
  std::size_t const max_spokes = 4 * std::max(p.shape.rows, p.shape.cols);
  std::size_t lo = 1;
  std::size_t hi = max_spokes;
  while (lo < hi) {
    auto const mid = lo + (hi - lo) / 2;
    if (fraction_on(radial_mask(p, mid, rotations)) >= p.ratio) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }

  std::vector<std::uint8_t> best;
  double best_error = 2.0;
  for (std::size_t s = lo > 3 ? lo - 3 : 1; s <= std::min(lo + 3, max_spokes); ++s) {
    auto bits = radial_mask(p, s, rotations);
    double const error = std::abs(fraction_on(bits) - p.ratio);
    if (error < best_error) {
      best_error = error;
      best = std::move(bits);
    }
  }
  return best;
}

} // namespace

SamplingMask make_mask(MaskParams const &params)
{
  if (!(params.ratio > 0.0 && params.ratio <= 1.0)) {
    throw ValidationError(fmt::format("sampling ratio must be in (0, 1], got {}", params.ratio));
  }
  auto const &shape = params.shape;
  if (shape.frames < 1 || shape.rows < 1 || shape.cols < 1) {
    throw DimensionError(fmt::format("mask shape {} has an empty axis", to_string(shape)));
  }
  MaskOrigin const origin{params.pattern, params.ratio, params.seed};
  if (params.ratio == 1.0) {
    return SamplingMask(shape, std::vector<std::uint8_t>(shape.size(), 1), origin);
  }

  std::vector<std::uint8_t> bits(shape.size(), 0);
  auto const fs = shape.frame_size();
  switch (params.pattern) {
  case MaskPattern::Cartesian:
    for (std::size_t t = 0; t < shape.frames; ++t) {
      cartesian_frame(params, t, bits.data() + t * fs);
    }
    break;
  case MaskPattern::Random2D:
    for (std::size_t t = 0; t < shape.frames; ++t) {
      random2d_frame(params, t, bits.data() + t * fs);
    }
    break;
  case MaskPattern::Radial: bits = make_radial(params); break;
  }

  SamplingMask mask(shape, std::move(bits), origin);
  if (std::abs(mask.ratio() - params.ratio) > kRatioTolerance + 1e-12) {
    throw InfeasibleRatioError(fmt::format("{} mask on {} reaches ratio {:.4f}, requested {} (tolerance {})",
                                           to_string(params.pattern), to_string(shape), mask.ratio(), params.ratio,
                                           kRatioTolerance));
  }
  return mask;
}

SamplingMask make_mask(MaskPattern pattern, Shape shape, double ratio, std::uint64_t seed)
{
  MaskParams params;
  params.pattern = pattern;
  params.shape = shape;
  params.ratio = ratio;
  params.seed = seed;
  return make_mask(params);
}

namespace {
constexpr std::string_view kMaskMagic = "MASK1\n";
}

void write_mask(SamplingMask const &mask, std::filesystem::path const &path)
{
  std::vector<std::uint8_t> bytes;
  detail::put_header(bytes, kMaskMagic, mask.shape());
  bytes.insert(bytes.end(), mask.bits().begin(), mask.bits().end());
  detail::write_file(path, bytes);
}

SamplingMask read_mask(std::filesystem::path const &path)
{
  auto const bytes = detail::read_file(path);
  auto const header = detail::parse_header(bytes, kMaskMagic);
  detail::check_payload(bytes.size() - header.payload_offset, header.shape.size(), path);
  std::vector<std::uint8_t> bits(bytes.begin() + static_cast<std::ptrdiff_t>(header.payload_offset), bytes.end());
  if (std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b > 1; })) {
    throw FormatError(FormatFault::BadValue, fmt::format("{}: mask bytes must be 0 or 1", path.string()));
  }
  return SamplingMask(header.shape, std::move(bits));
}

DynamicSequence apply_mask(DynamicSequence const &k, SamplingMask const &mask)
{
  require_same_shape(k.shape(), mask.shape(), "apply_mask");
  auto const s = k.shape();
  std::vector<Cx> out(k.values().begin(), k.values().end());
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t u = 0; u < s.rows; ++u) {
      for (std::size_t v = 0; v < s.cols; ++v) {
        if (!mask.sampled_bin(t, u, v)) {
          out[(t * s.rows + u) * s.cols + v] = Cx{0.0, 0.0};
        }
      }
    }
  }
  return DynamicSequence(s, std::move(out));
}

DynamicSequence forward_op(DynamicSequence const &x, SamplingMask const &mask)
{
  require_same_shape(x.shape(), mask.shape(), "forward_op");
  return apply_mask(dft2_forward(x), mask);
}

DynamicSequence adjoint_op(DynamicSequence const &b, SamplingMask const &mask)
{
  require_same_shape(b.shape(), mask.shape(), "adjoint_op");
  return dft2_adjoint(apply_mask(b, mask));
}

DynamicSequence zero_fill(DynamicSequence const &b, SamplingMask const &mask) { return adjoint_op(b, mask); }

DynamicSequence measure(DynamicSequence const &x, SamplingMask const &mask, double sigma, std::uint64_t seed)
{
  require_same_shape(x.shape(), mask.shape(), "measure");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ValidationError(fmt::format("noise sigma must be finite and >= 0, got {}", sigma));
  }
  auto const k = dft2_forward(x);
  if (sigma == 0.0) {
    return apply_mask(k, mask);
  }
  auto const s = x.shape();
  std::vector<Cx> noisy(k.values().begin(), k.values().end());
  for (std::size_t t = 0; t < s.frames; ++t) {
    Rng rng(derive_seed(seed, kNoiseStream, t));
    auto *frame = noisy.data() + t * s.frame_size();
    for (std::size_t idx = 0; idx < s.frame_size(); ++idx) {
      auto const [re, im] = rng.normal_pair();
      frame[idx] += Cx{sigma * re, sigma * im};
    }
  }
  return apply_mask(DynamicSequence(s, std::move(noisy)), mask);
}

} // namespace dmri
