#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dmri {

using Cx = std::complex<double>;

/// Dimensions of a dynamic sequence: T frames of m rows by n columns.
struct Shape
{
  std::size_t frames = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t frame_size() const { return rows * cols; }
  std::size_t size() const { return frames * rows * cols; }
  bool operator==(Shape const &) const = default;
};

std::string to_string(Shape const &s);

/**
 * A T x m x n stack of complex samples, frame-major then row-major. Used for
 * image sequences and k-space stacks alike.
 *
 * Values are fixed at construction; arithmetic returns new sequences.
 */
class DynamicSequence
{
public:
  DynamicSequence(Shape shape, std::vector<Cx> values);

  static DynamicSequence zeros(Shape shape);
  static DynamicSequence constant(Shape shape, Cx value);

  Shape shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }

  std::span<Cx const> values() const { return values_; }
  std::span<Cx const> frame(std::size_t t) const;
  Cx operator()(std::size_t t, std::size_t i, std::size_t j) const
  {
    return values_[(t * shape_.rows + i) * shape_.cols + j];
  }

  bool all_finite() const;
  double max_magnitude() const;

  DynamicSequence operator+(DynamicSequence const &other) const;
  DynamicSequence operator-(DynamicSequence const &other) const;
  DynamicSequence operator*(Cx scale) const;
  DynamicSequence operator*(double scale) const;

  bool operator==(DynamicSequence const &other) const = default;

private:
  Shape shape_;
  std::vector<Cx> values_;
};

inline DynamicSequence operator*(double scale, DynamicSequence const &x) { return x * scale; }

void require_same_shape(Shape const &a, Shape const &b, char const *context);

double frobenius_norm(DynamicSequence const &x);

/// Sum over entries of conj(a) * b.
Cx inner_product(DynamicSequence const &a, DynamicSequence const &b);

/// (m*n) x T matrix whose column t is frame t flattened row-major.
class CasoratiView
{
public:
  explicit CasoratiView(DynamicSequence const &x);
  CasoratiView(Eigen::MatrixXcd matrix, std::size_t rows, std::size_t cols);

  Eigen::MatrixXcd const &matrix() const { return matrix_; }
  DynamicSequence to_sequence() const;

private:
  Eigen::MatrixXcd matrix_;
  std::size_t rows_;
  std::size_t cols_;
};

CasoratiView casorati(DynamicSequence const &x);

// SequenceFile: "DSEQ1\n", "T m n\n", then T*m*n little-endian float64 (re, im) pairs.
void write_sequence(DynamicSequence const &x, std::filesystem::path const &path);
DynamicSequence read_sequence(std::filesystem::path const &path);

} // namespace dmri
