#include "dmri/sequence.hpp"

#include "dmri/error.hpp"
#include "file_header.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace dmri {

std::string to_string(Shape const &s) { return fmt::format("{}x{}x{}", s.frames, s.rows, s.cols); }

DynamicSequence::DynamicSequence(Shape shape, std::vector<Cx> values)
  : shape_{shape}
  , values_{std::move(values)}
{
  if (shape_.frames < 1 || shape_.rows < 1 || shape_.cols < 1) {
    throw DimensionError(fmt::format("sequence shape {} has an empty axis", to_string(shape_)));
  }
  if (values_.size() != shape_.size()) {
    throw DimensionError(
      fmt::format("sequence shape {} needs {} values, got {}", to_string(shape_), shape_.size(), values_.size()));
  }
}

DynamicSequence DynamicSequence::zeros(Shape shape) { return constant(shape, Cx{0.0, 0.0}); }

DynamicSequence DynamicSequence::constant(Shape shape, Cx value)
{
  return DynamicSequence(shape, std::vector<Cx>(shape.size(), value));
}

std::span<Cx const> DynamicSequence::frame(std::size_t t) const
{
  if (t >= shape_.frames) {
    throw DimensionError(fmt::format("frame {} out of range for {}", t, to_string(shape_)));
  }
  return std::span<Cx const>(values_).subspan(t * shape_.frame_size(), shape_.frame_size());
}

bool DynamicSequence::all_finite() const
{
  return std::all_of(values_.begin(), values_.end(), [](Cx const &v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

double DynamicSequence::max_magnitude() const
{
  double peak = 0.0;
  for (auto const &v : values_) {
    peak = std::max(peak, std::abs(v));
  }
  return peak;
}

void require_same_shape(Shape const &a, Shape const &b, char const *context)
{
  if (!(a == b)) {
    throw DimensionError(fmt::format("{}: shape mismatch {} vs {}", context, to_string(a), to_string(b)));
  }
}

DynamicSequence DynamicSequence::operator+(DynamicSequence const &other) const
{
  require_same_shape(shape_, other.shape_, "sequence +");
  std::vector<Cx> out(values_.size());
  std::transform(values_.begin(), values_.end(), other.values_.begin(), out.begin(), std::plus<>{});
  return DynamicSequence(shape_, std::move(out));
}

DynamicSequence DynamicSequence::operator-(DynamicSequence const &other) const
{
  require_same_shape(shape_, other.shape_, "sequence -");
  std::vector<Cx> out(values_.size());
  std::transform(values_.begin(), values_.end(), other.values_.begin(), out.begin(), std::minus<>{});
  return DynamicSequence(shape_, std::move(out));
}

DynamicSequence DynamicSequence::operator*(Cx scale) const
{
  std::vector<Cx> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [scale](Cx v) { return v * scale; });
  return DynamicSequence(shape_, std::move(out));
}

DynamicSequence DynamicSequence::operator*(double scale) const
{
  std::vector<Cx> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [scale](Cx v) { return v * scale; });
  return DynamicSequence(shape_, std::move(out));
}

double frobenius_norm(DynamicSequence const &x)
{
  double sum = 0.0;
  for (auto const &v : x.values()) {
    sum += std::norm(v);
  }
  return std::sqrt(sum);
}

Cx inner_product(DynamicSequence const &a, DynamicSequence const &b)
{
  require_same_shape(a.shape(), b.shape(), "inner_product");
  Cx sum{0.0, 0.0};
  auto const av = a.values();
  auto const bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) {
    sum += std::conj(av[k]) * bv[k];
  }
  return sum;
}

CasoratiView::CasoratiView(DynamicSequence const &x)
  : matrix_(static_cast<Eigen::Index>(x.shape().frame_size()), static_cast<Eigen::Index>(x.shape().frames))
  , rows_{x.shape().rows}
  , cols_{x.shape().cols}
{
  // Frame-major storage is already the column-major Casorati layout.
  std::copy(x.values().begin(), x.values().end(), matrix_.data());
}

CasoratiView::CasoratiView(Eigen::MatrixXcd matrix, std::size_t rows, std::size_t cols)
  : matrix_{std::move(matrix)}
  , rows_{rows}
  , cols_{cols}
{
  if (static_cast<std::size_t>(matrix_.rows()) != rows * cols || matrix_.cols() < 1) {
    throw DimensionError(
      fmt::format("Casorati matrix {}x{} does not match frames of {}x{}", matrix_.rows(), matrix_.cols(), rows, cols));
  }
}

DynamicSequence CasoratiView::to_sequence() const
{
  Shape const shape{static_cast<std::size_t>(matrix_.cols()), rows_, cols_};
  return DynamicSequence(shape, std::vector<Cx>(matrix_.data(), matrix_.data() + matrix_.size()));
}

CasoratiView casorati(DynamicSequence const &x) { return CasoratiView(x); }

namespace {

constexpr std::string_view kSequenceMagic = "DSEQ1\n";

void put_f64(std::vector<std::uint8_t> &out, double v)
{
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<std::uint8_t>(bits & 0xffu));
    bits >>= 8;
  }
}

double get_f64(std::uint8_t const *p)
{
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) {
    bits = (bits << 8) | p[b];
  }
  return std::bit_cast<double>(bits);
}

} // namespace

void write_sequence(DynamicSequence const &x, std::filesystem::path const &path)
{
  std::vector<std::uint8_t> bytes;
  bytes.reserve(32 + 16 * x.size());
  detail::put_header(bytes, kSequenceMagic, x.shape());
  for (auto const &v : x.values()) {
    put_f64(bytes, v.real());
    put_f64(bytes, v.imag());
  }
  detail::write_file(path, bytes);
}

DynamicSequence read_sequence(std::filesystem::path const &path)
{
  auto const bytes = detail::read_file(path);
  auto const header = detail::parse_header(bytes, kSequenceMagic);
  detail::check_payload(bytes.size() - header.payload_offset, 16 * header.shape.size(), path);

  std::vector<Cx> values(header.shape.size());
  auto const *p = bytes.data() + header.payload_offset;
  for (auto &v : values) {
    v = Cx{get_f64(p), get_f64(p + 8)};
    p += 16;
  }
  DynamicSequence x(header.shape, std::move(values));
  if (!x.all_finite()) {
    throw FormatError(FormatFault::BadValue, fmt::format("{}: payload contains non-finite values", path.string()));
  }
  return x;
}

} // namespace dmri
