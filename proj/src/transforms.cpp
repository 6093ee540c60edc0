#include "dmri/transforms.hpp"

#include "dmri/error.hpp"
#include "fft.hpp"

#include <fmt/format.h>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmri {

namespace {

std::size_t p_size(Shape const &s) { return s.frames * (s.rows - 1) * s.cols; }
std::size_t q_size(Shape const &s) { return s.frames * s.rows * (s.cols - 1); }

void require_gradient_shape(Shape const &s, char const *context)
{
  if (s.rows < 2 || s.cols < 2) {
    throw DimensionError(fmt::format("{}: forward differences need m, n >= 2, got {}", context, to_string(s)));
  }
}

bool finite(Cx const &v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

} // namespace

DualField::DualField(Shape shape, std::vector<Cx> p, std::vector<Cx> q)
  : shape_{shape}
  , p_{std::move(p)}
  , q_{std::move(q)}
{
  require_gradient_shape(shape_, "DualField");
  if (p_.size() != p_size(shape_) || q_.size() != q_size(shape_)) {
    throw DimensionError(fmt::format("DualField for {} needs P/Q sizes {}/{}, got {}/{}", to_string(shape_),
                                     p_size(shape_), q_size(shape_), p_.size(), q_.size()));
  }
}

DualField DualField::zeros(Shape shape)
{
  require_gradient_shape(shape, "DualField");
  return DualField(shape, std::vector<Cx>(p_size(shape)), std::vector<Cx>(q_size(shape)));
}

bool DualField::all_finite() const
{
  return std::all_of(p_.begin(), p_.end(), finite) && std::all_of(q_.begin(), q_.end(), finite);
}

double DualField::max_magnitude() const
{
  double peak = 0.0;
  for (auto const &v : p_) {
    peak = std::max(peak, std::abs(v));
  }
  for (auto const &v : q_) {
    peak = std::max(peak, std::abs(v));
  }
  return peak;
}

DualField DualField::operator+(DualField const &other) const
{
  require_same_shape(shape_, other.shape_, "DualField +");
  std::vector<Cx> p(p_.size()), q(q_.size());
  std::transform(p_.begin(), p_.end(), other.p_.begin(), p.begin(), std::plus<>{});
  std::transform(q_.begin(), q_.end(), other.q_.begin(), q.begin(), std::plus<>{});
  return DualField(shape_, std::move(p), std::move(q));
}

DualField DualField::operator*(double scale) const
{
  std::vector<Cx> p(p_.size()), q(q_.size());
  std::transform(p_.begin(), p_.end(), p.begin(), [scale](Cx v) { return v * scale; });
  std::transform(q_.begin(), q_.end(), q.begin(), [scale](Cx v) { return v * scale; });
  return DualField(shape_, std::move(p), std::move(q));
}

Cx inner_product(DualField const &a, DualField const &b)
{
  require_same_shape(a.image_shape(), b.image_shape(), "inner_product(DualField)");
  Cx sum{0.0, 0.0};
  for (std::size_t k = 0; k < a.p().size(); ++k) {
    sum += std::conj(a.p()[k]) * b.p()[k];
  }
  for (std::size_t k = 0; k < a.q().size(); ++k) {
    sum += std::conj(a.q()[k]) * b.q()[k];
  }
  return sum;
}

namespace {

DynamicSequence unitary_dft(DynamicSequence const &x, int sign)
{
  auto const shape = x.shape();
  std::vector<Cx> values(x.values().begin(), x.values().end());
  double const scale = 1.0 / std::sqrt(static_cast<double>(shape.frame_size()));
  for (std::size_t t = 0; t < shape.frames; ++t) {
    detail::fft2_inplace(values.data() + t * shape.frame_size(), shape.rows, shape.cols, sign);
  }
  for (auto &v : values) {
    v *= scale;
  }
  return DynamicSequence(shape, std::move(values));
}

} // namespace

DynamicSequence dft2_forward(DynamicSequence const &x) { return unitary_dft(x, -1); }
DynamicSequence dft2_adjoint(DynamicSequence const &k) { return unitary_dft(k, +1); }

DualField grad_forward(DynamicSequence const &x)
{
  auto const s = x.shape();
  require_gradient_shape(s, "grad_forward");
  std::vector<Cx> p(p_size(s)), q(q_size(s));
  auto pit = p.begin();
  auto qit = q.begin();
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t i = 0; i + 1 < s.rows; ++i) {
      for (std::size_t j = 0; j < s.cols; ++j) {
        *pit++ = x(t, i, j) - x(t, i + 1, j);
      }
    }
    for (std::size_t i = 0; i < s.rows; ++i) {
      for (std::size_t j = 0; j + 1 < s.cols; ++j) {
        *qit++ = x(t, i, j) - x(t, i, j + 1);
      }
    }
  }
  return DualField(s, std::move(p), std::move(q));
}

DynamicSequence grad_adjoint(DualField const &y)
{
  auto const s = y.image_shape();
  std::vector<Cx> out(s.size());
  auto at = [&](std::size_t t, std::size_t i, std::size_t j) -> Cx & { return out[(t * s.rows + i) * s.cols + j]; };
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t i = 0; i < s.rows; ++i) {
      for (std::size_t j = 0; j < s.cols; ++j) {
        // P_{i,j} + Q_{i,j} - P_{i-1,j} - Q_{i,j-1}, out-of-range terms are zero.
        Cx v{0.0, 0.0};
        if (i + 1 < s.rows) {
          v += y.p(t, i, j);
        }
        if (i > 0) {
          v -= y.p(t, i - 1, j);
        }
        if (j + 1 < s.cols) {
          v += y.q(t, i, j);
        }
        if (j > 0) {
          v -= y.q(t, i, j - 1);
        }
        at(t, i, j) = v;
      }
    }
  }
  return DynamicSequence(s, std::move(out));
}

double tv_seminorm(DynamicSequence const &x)
{
  auto const g = grad_forward(x);
  double sum = 0.0;
  for (auto const &v : g.p()) {
    sum += std::abs(v);
  }
  for (auto const &v : g.q()) {
    sum += std::abs(v);
  }
  return sum;
}

namespace {

template <int Options>
Eigen::JacobiSVD<Eigen::MatrixXcd, Eigen::ColPivHouseholderQRPreconditioner> decompose(DynamicSequence const &x)
{
  if (!x.all_finite()) {
    throw NumericalError(fmt::format("SVD input of shape {} contains non-finite values", to_string(x.shape())));
  }
  auto const view = casorati(x);
  Eigen::JacobiSVD<Eigen::MatrixXcd, Eigen::ColPivHouseholderQRPreconditioner> svd(view.matrix(), Options);
  if (svd.info() != Eigen::Success) {
    throw NumericalError(fmt::format("SVD of {}x{} Casorati matrix did not converge", view.matrix().rows(),
                                     view.matrix().cols()));
  }
  return svd;
}

} // namespace

std::vector<double> singular_values(DynamicSequence const &x)
{
  auto const svd = decompose<0>(x);
  auto const &sigma = svd.singularValues();
  return {sigma.data(), sigma.data() + sigma.size()};
}

double nuclear_norm(DynamicSequence const &x)
{
  double sum = 0.0;
  for (auto s : singular_values(x)) {
    sum += s;
  }
  return sum;
}

DynamicSequence svt(DynamicSequence const &xbar, double threshold)
{
  if (!(threshold >= 0.0)) {
    throw ValidationError(fmt::format("svt threshold must be >= 0, got {}", threshold));
  }
  auto const svd = decompose<Eigen::ComputeThinU | Eigen::ComputeThinV>(xbar);
  Eigen::VectorXd shrunk = (svd.singularValues().array() - threshold).max(0.0);
  Eigen::MatrixXcd out = svd.matrixU() * shrunk.cast<Cx>().asDiagonal() * svd.matrixV().adjoint();
  return CasoratiView(std::move(out), xbar.shape().rows, xbar.shape().cols).to_sequence();
}

Cx project_unit_disk(Cx y)
{
  double const mag = std::abs(y);
  if (mag <= 1.0) {
    return y;
  }
  Cx out = y / mag;
  // Rounding can leave |out| a few ulp above 1; pull it inside so a second projection is a no-op.
  while (std::abs(out) > 1.0) {
    out *= std::nextafter(1.0, 0.0);
  }
  return out;
}

DualField project_linf_ball(DualField const &ybar)
{
  std::vector<Cx> p(ybar.p().begin(), ybar.p().end());
  std::vector<Cx> q(ybar.q().begin(), ybar.q().end());
  std::transform(p.begin(), p.end(), p.begin(), project_unit_disk);
  std::transform(q.begin(), q.end(), q.begin(), project_unit_disk);
  return DualField(ybar.image_shape(), std::move(p), std::move(q));
}

} // namespace dmri
